"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 resource guard.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from .bench import CSV_HEADER, bench_scaling, generate_instance, target_slope, write_csv
from .core import InstanceError, Statistics, dumps_instance, load_instance
from .engine import compute, determinant_fast, is_single_particle_family
from .oracles import OracleSizeError, brute_force_expectation
from .poly import CapOverflowError, ResourceGuardError
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fmt(z: complex) -> str:
    return f"{z.real:.16g}{z.imag:+.16g}i"


def _load(path):
    try:
        return load_instance(path)
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}", field="file") from None


def sylvester_applicable(inst) -> bool:
    return inst.statistics is Statistics.FERMION and inst.same_states and is_single_particle_family(inst.ket)


def cmd_compute(args) -> int:
    inst = _load(args.instance)
    path = args.fast_path
    if path == "sylvester" and not sylvester_applicable(inst):
        raise UsageError("--fast-path sylvester needs a fermionic instance with one fermion in each "
                         "single-mode block and identical bra and ket")
    if path == "auto":
        path = "sylvester" if sylvester_applicable(inst) else "engine"
    if path == "sylvester":
        t0 = time.perf_counter()
        value = determinant_fast(inst.op.u, inst.op.v)
        report = {"value": [value.real, value.imag], "op_count": inst.op.M * inst.op.k ** 2,
                  "wall_time": time.perf_counter() - t0, "N": inst.ket.N, "k": inst.op.k,
                  "statistics": inst.statistics.value, "path": "sylvester"}
    else:
        report = compute(inst).as_dict()
        report["path"] = "engine"
    if args.json:
        print(json.dumps(report))
    else:
        print(f"value: {_fmt(complex(*report['value']))}")
        print(f"op_count: {report['op_count']}")
        print(f"wall_time: {report['wall_time']:.6f} s")
        print(f"path: {report['path']}")
    return EXIT_OK


def cmd_gen(args) -> int:
    inst = generate_instance(args.seed, args.N, args.d, args.k, args.statistics, args.n_max,
                             single_particle=args.single_particle, distinct_ket=args.distinct_ket)
    text = dumps_instance(inst)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    value = brute_force_expectation(inst.bra, inst.ket, inst.op.dense())
    print(f"value: {_fmt(value)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    ok = True
    for name in names:
        result = run_suite(name, args.seeds, args.seed)
        print("\n".join(result.lines()))
        ok &= result.passed
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_bench(args) -> int:
    stats = Statistics(args.statistics)
    if args.N:
        ns = [int(float(x)) for x in args.N.split(",")]
    elif stats is Statistics.BOSON:
        ns = [16, 32, 64, 128, 256] if args.k == 1 else [16, 32, 48, 64, 96]
    else:
        ns = [1000, 3000, 10000, 30000, 100000]
    records, fit = bench_scaling(args.k, stats, ns, args.seed)
    if args.out:
        write_csv(records, args.out, append=args.append)
    else:
        print(",".join(CSV_HEADER))
        for r in records:
            print(",".join(str(getattr(r, h)) for h in CSV_HEADER))
    print(f"# slope {fit.slope:.4f} (target {target_slope(args.k, stats):g}), "
          f"intercept {fit.intercept:.4f}, r^2 {fit.r_squared:.6f}; op_count = complex multiply-adds "
          f"in the product stage", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockrank", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="evaluate an instance file")
    p.add_argument("instance")
    p.add_argument("--fast-path", choices=["auto", "engine", "sylvester"], default="auto")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("gen", help="write a seeded random instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--statistics", choices=[s.value for s in Statistics], default="boson")
    p.add_argument("--n-max", type=int, default=1)
    p.add_argument("--single-particle", action="store_true")
    p.add_argument("--distinct-ket", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.add_argument("--seeds", type=int)
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="operation-count scaling sweep")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--statistics", choices=[s.value for s in Statistics], default="boson")
    p.add_argument("--N", help="comma-separated sizes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--append", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="brute-force value of a small instance")
    p.add_argument("instance")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, UsageError, OracleSizeError) as exc:
        field = getattr(exc, "field", None)
        prefix = f"error [{field}]" if field else "error"
        print(f"{prefix}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ResourceGuardError, CapOverflowError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
