"""Problem instances: factor states, product states and low-rank operators.

Occupation vectors label *normalized* Fock states,

    |n> = prod_i (a_i^dagger)^{n_i} / sqrt(n_i!) |vac>,

with the creation operators written in ascending mode order.  For fermions
this ordering fixes every sign; product states are built block by block in
ascending block order, so the global creation string is ascending in the
global mode index as well.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

MAX_RANK = 6


class Statistics(enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"


class InstanceError(ValueError):
    """Base class for malformed or inconsistent instances.

    ``field`` names the offending part of the input when it is known.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class DimensionMismatchError(InstanceError):
    pass


class PauliViolationError(InstanceError):
    pass


class NegativeOccupationError(InstanceError):
    pass


class NonFiniteError(InstanceError):
    pass


class RankCapError(InstanceError):
    pass


def _as_statistics(value) -> Statistics:
    if isinstance(value, Statistics):
        return value
    try:
        return Statistics(str(value).lower())
    except ValueError:
        raise InstanceError(f"unknown statistics {value!r}", field="statistics") from None


@dataclass(frozen=True)
class FactorState:
    """A finite state on ``d`` modes, stored as occupation vector -> amplitude.

    Zero amplitudes are dropped on construction.  An empty table is the zero
    vector (not the vacuum; the vacuum is ``{(0,)*d: 1}``).
    """

    d: int
    terms: Mapping[tuple[int, ...], complex]
    statistics: Statistics = Statistics.BOSON

    def __post_init__(self):
        stats = _as_statistics(self.statistics)
        object.__setattr__(self, "statistics", stats)
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise DimensionMismatchError(f"mode count must be a positive integer, got {self.d!r}", field="d")
        clean: dict[tuple[int, ...], complex] = {}
        for occ, amp in dict(self.terms).items():
            occ = tuple(int(x) for x in occ)
            if len(occ) != self.d:
                raise DimensionMismatchError(
                    f"occupation vector {list(occ)} has length {len(occ)}, expected {self.d}", field="occ"
                )
            if any(x < 0 for x in occ):
                raise NegativeOccupationError(f"negative occupation in {list(occ)}", field="occ")
            if stats is Statistics.FERMION and any(x > 1 for x in occ):
                raise PauliViolationError(f"fermionic occupation {list(occ)} exceeds 1", field="occ")
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise NonFiniteError(f"non-finite amplitude for {list(occ)}", field="amp")
            if amp != 0:
                clean[occ] = clean.get(occ, 0j) + amp
        clean = {occ: a for occ, a in clean.items() if a != 0}
        object.__setattr__(self, "terms", MappingProxyType(clean))
        object.__setattr__(self, "d", int(self.d))

    @classmethod
    def vacuum(cls, d: int, statistics=Statistics.BOSON) -> "FactorState":
        return cls(d, {(0,) * d: 1.0}, statistics)

    @classmethod
    def single_particle(cls, statistics=Statistics.BOSON) -> "FactorState":
        """The one-mode, one-particle state ``a^dagger |vac>``."""
        return cls(1, {(1,): 1.0}, statistics)

    @property
    def n_max(self) -> int:
        """Largest total occupation among the stored terms."""
        return max((sum(occ) for occ in self.terms), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def parity_part(self, parity: int) -> "FactorState":
        """Component with total particle number of the given parity."""
        return FactorState(
            self.d, {o: a for o, a in self.terms.items() if sum(o) % 2 == parity}, self.statistics
        )

    def inner(self, other: "FactorState") -> complex:
        """Hermitian inner product <self|other>."""
        return sum((a.conjugate() * other.terms.get(o, 0) for o, a in self.terms.items()), 0j)


def state_norm_sq(state: FactorState) -> float:
    return float(sum(abs(a) ** 2 for a in state.terms.values()))


@dataclass(frozen=True)
class ProductState:
    """Ordered product of factor states sharing one statistics."""

    factors: tuple[FactorState, ...]
    statistics: Statistics = field(init=False)

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise DimensionMismatchError("a product state needs at least one factor", field="blocks")
        stats = factors[0].statistics
        for mu, f in enumerate(factors):
            if f.statistics is not stats:
                raise InstanceError(f"block {mu} has statistics {f.statistics.value}, expected {stats.value}",
                                    field=f"blocks[{mu}]")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "statistics", stats)

    @property
    def N(self) -> int:
        return len(self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.d for f in self.factors)

    @property
    def M(self) -> int:
        return sum(self.dims)

    @property
    def D(self) -> int:
        return sum(f.n_max for f in self.factors)

    @property
    def offsets(self) -> tuple[int, ...]:
        """Global index of the first mode of each block, plus the total."""
        return tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.dims)]))

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)


def _frozen_array(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LowRankOperator:
    """A = u @ v with u of shape (M, k) and v of shape (k, M)."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = _frozen_array(self.u)
        v = _frozen_array(self.v)
        if u.ndim != 2 or v.ndim != 2:
            raise DimensionMismatchError("u and v must be matrices", field="u")
        if v.shape != (u.shape[1], u.shape[0]):
            raise DimensionMismatchError(
                f"u has shape {u.shape} but v has shape {v.shape}; expected {(u.shape[1], u.shape[0])}", field="v"
            )
        if u.shape[1] < 1:
            raise RankCapError("rank must be at least 1", field="k")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise NonFiniteError("non-finite entry in u or v", field="u" if not np.all(np.isfinite(u)) else "v")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def k(self) -> int:
        return self.u.shape[1]

    @property
    def M(self) -> int:
        return self.u.shape[0]

    def dense(self) -> np.ndarray:
        """Materialize A.  Only oracles and tests should need this."""
        return self.u @ self.v

    def adjoint(self) -> "LowRankOperator":
        """Factorization of A^dagger = v^dagger u^dagger."""
        return LowRankOperator(self.v.conj().T, self.u.conj().T)


@dataclass(frozen=True)
class BlockSlices:
    u_blocks: tuple[np.ndarray, ...]
    v_blocks: tuple[np.ndarray, ...]

    def __len__(self):
        return len(self.u_blocks)

    def __getitem__(self, mu):
        return self.u_blocks[mu], self.v_blocks[mu]


def block_slice(op: LowRankOperator, layout: ProductState) -> BlockSlices:
    off = layout.offsets
    us = tuple(op.u[off[mu]:off[mu + 1], :] for mu in range(layout.N))
    vs = tuple(op.v[:, off[mu]:off[mu + 1]] for mu in range(layout.N))
    return BlockSlices(us, vs)


@dataclass(frozen=True)
class Instance:
    """A validated matrix-element problem <bra| P(1 + u v) |ket>."""

    bra: ProductState
    ket: ProductState
    op: LowRankOperator

    @property
    def statistics(self) -> Statistics:
        return self.ket.statistics

    @property
    def same_states(self) -> bool:
        return self.bra == self.ket


def check_compatible(bra: ProductState, ket: ProductState, op: LowRankOperator) -> None:
    if bra.statistics is not ket.statistics:
        raise InstanceError("bra and ket have different statistics", field="ket_blocks")
    if bra.dims != ket.dims:
        raise DimensionMismatchError(f"bra block sizes {bra.dims} differ from ket block sizes {ket.dims}",
                                     field="ket_blocks")
    if op.M != ket.M:
        raise DimensionMismatchError(f"u has {op.M} rows but the blocks hold {ket.M} modes", field="u")
    if op.k > MAX_RANK:
        raise RankCapError(f"rank {op.k} exceeds the cap {MAX_RANK}", field="k")


def make_instance(bra: ProductState, op: LowRankOperator, ket: ProductState | None = None) -> Instance:
    ket = bra if ket is None else ket
    check_compatible(bra, ket, op)
    return Instance(bra, ket, op)


# -- JSON instance files ---------------------------------------------------

def _complex_entry(x, where: str) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x):
        z = complex(float(x[0]), float(x[1]))
    elif isinstance(x, (int, float)) and not isinstance(x, bool):
        z = complex(float(x), 0.0)
    else:
        raise InstanceError(f"{where}: expected [re, im], got {x!r}", field=where)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NonFiniteError(f"{where}: non-finite value", field=where)
    return z


def _matrix(raw, name: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise InstanceError(f"{name}: expected a non-empty list of rows", field=name)
    rows = []
    for i, row in enumerate(raw):
        if not isinstance(row, list):
            raise InstanceError(f"{name}[{i}]: expected a list", field=f"{name}[{i}]")
        rows.append([_complex_entry(x, f"{name}[{i}][{j}]") for j, x in enumerate(row)])
    if len({len(r) for r in rows}) != 1:
        raise DimensionMismatchError(f"{name}: ragged rows", field=name)
    return np.array(rows, dtype=complex)


def _blocks(raw, stats: Statistics, name: str) -> ProductState:
    if not isinstance(raw, list) or not raw:
        raise InstanceError(f"{name}: expected a non-empty list", field=name)
    factors = []
    for mu, blk in enumerate(raw):
        where = f"{name}[{mu}]"
        if not isinstance(blk, dict) or "d" not in blk or "terms" not in blk:
            raise InstanceError(f"{where}: expected an object with 'd' and 'terms'", field=where)
        terms: dict[tuple[int, ...], complex] = {}
        for t, term in enumerate(blk["terms"]):
            tw = f"{where}.terms[{t}]"
            if not isinstance(term, dict) or "occ" not in term or "amp" not in term:
                raise InstanceError(f"{tw}: expected an object with 'occ' and 'amp'", field=tw)
            occ = term["occ"]
            if not isinstance(occ, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in occ):
                raise InstanceError(f"{tw}.occ: expected a list of integers", field=f"{tw}.occ")
            key = tuple(occ)
            terms[key] = terms.get(key, 0j) + _complex_entry(term["amp"], f"{tw}.amp")
        try:
            factors.append(FactorState(blk["d"], terms, stats))
        except InstanceError as exc:
            raise type(exc)(f"{where}: {exc}", field=f"{where}.{exc.field}" if exc.field else where) from None
    return ProductState(tuple(factors))


def validate_instance(raw: Mapping[str, Any]) -> Instance:
    """Check a parsed instance document and build the validated objects."""
    if not isinstance(raw, Mapping):
        raise InstanceError("instance must be a JSON object")
    for key in ("statistics", "k", "blocks", "u", "v"):
        if key not in raw:
            raise InstanceError(f"missing field '{key}'", field=key)
    stats = _as_statistics(raw["statistics"])
    k = raw["k"]
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise RankCapError(f"k must be a positive integer, got {k!r}", field="k")
    if k > MAX_RANK:
        raise RankCapError(f"rank {k} exceeds the cap {MAX_RANK}", field="k")
    bra = _blocks(raw["blocks"], stats, "blocks")
    ket = _blocks(raw["ket_blocks"], stats, "ket_blocks") if raw.get("ket_blocks") is not None else bra
    u = _matrix(raw["u"], "u")
    v = _matrix(raw["v"], "v")
    if u.shape[0] != bra.M:
        raise DimensionMismatchError(f"u has {u.shape[0]} rows but the blocks hold {bra.M} modes", field="u")
    if u.shape[1] != k:
        raise DimensionMismatchError(f"u has {u.shape[1]} columns, expected k={k}", field="u")
    if v.shape != (k, bra.M):
        raise DimensionMismatchError(f"v has shape {v.shape}, expected {(k, bra.M)}", field="v")
    return make_instance(bra, LowRankOperator(u, v), ket)


def _encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _encode_blocks(state: ProductState) -> list[dict]:
    return [
        {"d": f.d, "terms": [{"occ": list(o), "amp": _encode_complex(a)} for o, a in sorted(f.terms.items())]}
        for f in state.factors
    ]


def instance_to_dict(inst: Instance) -> dict:
    doc = {
        "statistics": inst.statistics.value,
        "k": inst.op.k,
        "blocks": _encode_blocks(inst.bra),
        "u": [[_encode_complex(x) for x in row] for row in inst.op.u],
        "v": [[_encode_complex(x) for x in row] for row in inst.op.v],
    }
    if not inst.same_states:
        doc["ket_blocks"] = _encode_blocks(inst.ket)
    return doc


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1, sort_keys=True) + "\n"


def loads_instance(text: str) -> Instance:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: {exc}") from None
    return validate_instance(raw)


def load_instance(path) -> Instance:
    with open(path) as fh:
        return loads_instance(fh.read())


def product_state(factors: Iterable[FactorState]) -> ProductState:
    return ProductState(tuple(factors))


def occupations(d: int, max_total: int, statistics=Statistics.BOSON) -> list[tuple[int, ...]]:
    """All occupation vectors on ``d`` modes with at most ``max_total`` particles."""
    cap = 1 if _as_statistics(statistics) is Statistics.FERMION else max_total
    out = [occ for occ in np.ndindex(*([cap + 1] * d)) if sum(occ) <= max_total]
    return sorted((tuple(int(x) for x in o) for o in out), key=lambda o: (sum(o), o))


__all__: Sequence[str] = [
    "MAX_RANK", "Statistics", "InstanceError", "DimensionMismatchError", "PauliViolationError",
    "NegativeOccupationError", "NonFiniteError", "RankCapError", "FactorState", "ProductState",
    "LowRankOperator", "BlockSlices", "Instance", "block_slice", "state_norm_sq", "validate_instance",
    "make_instance", "check_compatible", "instance_to_dict", "dumps_instance", "loads_instance",
    "load_instance", "product_state", "occupations",
]
