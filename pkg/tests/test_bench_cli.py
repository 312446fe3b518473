import json

import numpy as np
import pytest

from fockrank.bench import (
    CSV_HEADER, BenchRecord, bench_one, bench_scaling, fit_slope, generate_instance, read_csv, write_csv,
)
from fockrank.cli import main
from fockrank.core import PauliViolationError, Statistics, dumps_instance, load_instance
from fockrank.poly import ResourceGuardError

B, F = Statistics.BOSON, Statistics.FERMION

N1 = {"statistics": "boson", "k": 1, "blocks": [{"d": 1, "terms": [{"occ": [1], "amp": [1, 0]}]}],
      "u": [[[2, 0]]], "v": [[[3, 0]]]}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generation_deterministic():
    a = dumps_instance(generate_instance(5, 3, 2, 2, F, n_max=2, distinct_ket=True))
    b = dumps_instance(generate_instance(5, 3, 2, 2, F, n_max=2, distinct_ket=True))
    assert a == b
    assert a != dumps_instance(generate_instance(6, 3, 2, 2, F, n_max=2, distinct_ket=True))


def test_generation_single_particle_family():
    inst = generate_instance(1, 3, 1, 1, B, n_max=1, single_particle=True)
    assert all(dict(f.terms) == {(1,): 1.0} for f in inst.bra.factors)
    assert inst.op.u.shape == (3, 1)
    assert np.all(np.abs(inst.op.u.real) <= 1) and np.all(np.abs(inst.op.u.imag) <= 1)


def test_generation_normalized_factors():
    inst = generate_instance(2, 4, 2, 1, B, n_max=3)
    for f in inst.bra.factors:
        assert f.inner(f).real == pytest.approx(1.0)
        assert f.n_max <= 3


def test_generation_pauli():
    with pytest.raises(PauliViolationError):
        generate_instance(0, 2, 1, 1, F, n_max=2)


def test_fit_slope_requires_four_points():
    with pytest.raises(ValueError):
        fit_slope([1, 2, 3], [1, 8, 27])
    fit = fit_slope([1, 2, 4, 8], [3, 24, 192, 1536])
    assert fit.slope == pytest.approx(3) and fit.r_squared == pytest.approx(1)


def test_bench_records_positive():
    rec = bench_one(8, 1, B, 0)
    assert rec.op_count > 0 and rec.deg_cap == 8 and rec.d == 1 and rec.stat == "boson"


def test_bench_guard():
    with pytest.raises(ResourceGuardError, match=r"N=300, k=1"):
        bench_scaling(1, B, [16, 300])
    with pytest.raises(ResourceGuardError):
        bench_scaling(3, B, [16, 32, 64, 128])


def test_large_boson_bench_skips_average():
    rec = bench_one(200, 1, B, 0)
    assert np.isnan(rec.re) and rec.op_count > 0


def test_csv_append_and_order(tmp_path):
    path = tmp_path / "out.csv"
    recs, _ = bench_scaling(1, F, [400, 100, 300, 200], seed=3)
    write_csv(recs, path)
    write_csv(list(reversed(recs)), path, append=True)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert sum(line.startswith("n,") for line in lines) == 1
    back = read_csv(path)
    assert [r.n for r in back] == [100, 200, 300, 400] * 2
    assert back[0] == recs[0]


def test_cli_compute_example(tmp_path, capsys):
    f = tmp_path / "n1.json"
    f.write_text(json.dumps(N1))
    code, out, _ = run(capsys, "compute", f)
    assert code == 0
    assert "value: 7+0i" in out and "op_count:" in out and "wall_time:" in out


def test_cli_compute_json(tmp_path, capsys):
    f = tmp_path / "n1.json"
    f.write_text(json.dumps(N1))
    code, out, _ = run(capsys, "compute", f, "--json")
    assert code == 0 and json.loads(out)["value"] == [7.0, 0.0]


def test_cli_malformed(tmp_path, capsys):
    bad = dict(N1, v=[[[3, 0], [1, 0]]])
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(bad))
    code, _, err = run(capsys, "compute", f)
    assert code == 2 and "[v]" in err
    f.write_text("{")
    assert run(capsys, "compute", f)[0] == 2
    assert run(capsys, "compute", tmp_path / "missing.json")[0] == 2


def test_cli_sylvester_illegal(tmp_path, capsys):
    f = tmp_path / "n1.json"
    f.write_text(json.dumps(N1))
    code, _, err = run(capsys, "compute", f, "--fast-path", "sylvester")
    assert code == 2 and "sylvester" in err


def test_cli_gen_round_trip(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["--seed", 9, "--N", 3, "--d", 2, "--k", 2, "--statistics", "fermion", "--n-max", 2, "--distinct-ket"]
    assert run(capsys, "gen", *args, "--out", a)[0] == 0
    assert run(capsys, "gen", *args, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    load_instance(a)
    first = json.loads(run(capsys, "compute", a, "--json")[1])
    second = json.loads(run(capsys, "compute", a, "--json")[1])
    assert first["value"] == second["value"] and first["op_count"] == second["op_count"]
    code, out, _ = run(capsys, "oracle", a)
    assert code == 0
    re, im = first["value"]
    assert out.startswith("value: ")
    assert complex(out.split()[1][:-1] + "j") == pytest.approx(complex(re, im), rel=1e-9)


def test_cli_gen_pauli_exit(capsys):
    code, _, err = run(capsys, "gen", "--N", 2, "--statistics", "fermion", "--n-max", 2)
    assert code == 2 and "n_max" in err


def test_cli_sylvester_matches_engine(tmp_path, capsys):
    f = tmp_path / "f.json"
    run(capsys, "gen", "--seed", 4, "--N", 6, "--k", 3, "--statistics", "fermion", "--single-particle", "--out", f)
    fast = json.loads(run(capsys, "compute", f, "--fast-path", "sylvester", "--json")[1])
    slow = json.loads(run(capsys, "compute", f, "--fast-path", "engine", "--json")[1])
    auto = json.loads(run(capsys, "compute", f, "--json")[1])
    assert fast["path"] == auto["path"] == "sylvester" and slow["path"] == "engine"
    assert complex(*fast["value"]) == pytest.approx(complex(*slow["value"]), rel=1e-10)


def test_cli_verify(capsys):
    code, out, _ = run(capsys, "verify", "moments")
    assert code == 0 and out.count("PASS") == 3
    code, out, _ = run(capsys, "verify", "determinant", "--seeds", 5)
    assert code == 0


def test_cli_verify_failure_exit(monkeypatch, capsys):
    from fockrank import cli
    from fockrank.verify import CaseResult, SuiteResult
    monkeypatch.setattr(cli, "run_suite",
                        lambda name, seeds, base: SuiteResult(name, [CaseResult("x", 1.0, 1e-9, [3, 7])]))
    code, out, _ = run(capsys, "verify", "permanent")
    assert code == 1 and "FAIL" in out and "[3, 7]" in out


def test_cli_bench(tmp_path, capsys):
    out_csv = tmp_path / "b.csv"
    code, out, _ = run(capsys, "bench", "--k", 1, "--statistics", "fermion", "--N", "100,200,400,800",
                       "--out", out_csv)
    assert code == 0 and "slope" in out
    run(capsys, "bench", "--k", 1, "--statistics", "fermion", "--N", "100,200,400,800", "--out", out_csv,
        "--append")
    assert len(read_csv(out_csv)) == 8
    code, out, err = run(capsys, "bench", "--k", 1, "--N", "8,16,32,64")
    assert code == 0 and out.splitlines()[0] == ",".join(CSV_HEADER) and "slope" in err


def test_cli_bench_guard(capsys):
    code, _, err = run(capsys, "bench", "--k", 3, "--N", "16,32,64,128")
    assert code == 3 and "k=3" in err
