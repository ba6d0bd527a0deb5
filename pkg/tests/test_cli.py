import csv
import io
import json

import numpy as np
import pytest

from sketchpinv.cli import main, split_seeds
from sketchpinv.linalg import residual
from sketchpinv.matrices import GeneratorSpec, write_matrix_market
from sketchpinv.solvers import init_newton_schulz


def run_cli(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def parse(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_ns_tiny_converges(capsys):
    code, out, _ = run_cli(capsys, ["run", "--method", "ns", "--gen", "gaussian:m=4,n=4,r=4", "--tol", "1e-8"])
    assert code == 0
    rows = parse(out)
    A = GeneratorSpec.parse("gaussian:m=4,n=4,r=4").build()
    assert float(rows[-1]["residual"]) <= 1e-8 * np.linalg.norm(A)
    assert list(rows[0]) == ["iter", "phase", "time_s", "flops", "residual"]


def test_iter0_matches_init(capsys):
    _, out, _ = run_cli(capsys, ["run", "--method", "ns", "--gen", "gaussian:m=6,n=3,r=2", "--max-iters", "3"])
    A = GeneratorSpec.parse("gaussian:m=6,n=3,r=2").build()
    row = parse(out)[0]
    assert row["iter"] == "0"
    assert float(row["residual"]) == residual(A, init_newton_schulz(A))


def test_tau_too_large(capsys):
    code, _, err = run_cli(capsys, ["run", "--method", "satax_uni", "--tau", "999999",
                                    "--gen", "gaussian:m=10,n=5"])
    assert code == 1
    assert "tau exceeds dimension" in err


def test_saxas_rep_tau_one(capsys):
    code, _, err = run_cli(capsys, ["run", "--method", "saxas_rep", "--tau", "1", "--gen", "sym:n=4"])
    assert code == 1
    assert err.startswith("error:")


def test_saxas_asymmetric(capsys):
    code, _, err = run_cli(capsys, ["run", "--method", "saxas_uni", "--tau", "2", "--gen", "gaussian:m=4,n=4"])
    assert code == 1
    assert "symmetric" in err


def test_max_iters_exit(capsys):
    code, out, _ = run_cli(capsys, ["run", "--method", "satax_uni", "--tau", "2", "--max-iters", "3",
                                    "--tol", "1e-14", "--trace-every", "1", "--gen", "gaussian:m=30,n=10,r=5"])
    assert code == 2
    assert [r["iter"] for r in parse(out)] == ["0", "1", "2", "3"]


def test_bad_matrix_file(capsys, tmp_path):
    p = tmp_path / "bad.mtx"
    p.write_text("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n")
    code, _, err = run_cli(capsys, ["run", "--method", "ns", "--matrix", str(p)])
    assert code == 1
    assert "unsupported field: pattern" in err


def test_matrix_file_and_out(capsys, tmp_path):
    p = tmp_path / "a.mtx"
    write_matrix_market(p, np.diag([2.0, 1.0, 0.5]))
    out_path = tmp_path / "trace.csv"
    code, out, _ = run_cli(capsys, ["run", "--method", "satax_uni", "--tau", "3", "--matrix", str(p),
                                    "--oracle", "on", "--out", str(out_path)])
    assert code == 0 and out == ""
    rows = parse(out_path.read_text())
    assert "err_oracle" in rows[0]
    assert float(rows[-1]["err_oracle"]) <= 1e-8


def test_explain_flops(capsys):
    code, _, err = run_cli(capsys, ["run", "--method", "ns", "--gen", "diag:values=1;2", "--explain-flops"])
    assert code == 0
    assert "14" in err and "flop" in err.lower()


class TestCertify:
    def test_singletons_identity(self, capsys):
        code, out, _ = run_cli(capsys, ["certify", "--gen", "diag:values=1;1", "--dist", "singletons"])
        assert code == 0
        assert "rho_exact: 0.5" in out

    def test_full(self, capsys):
        _, out, _ = run_cli(capsys, ["certify", "--gen", "gaussian:m=5,n=4,r=2", "--dist", "full", "--json"])
        rep = json.loads(out)
        assert rep["rho_exact"] == pytest.approx(0.0, abs=1e-10)

    def test_rep_saxas(self, capsys):
        _, out, _ = run_cli(capsys, ["certify", "--gen", "sym:n=3", "--dist", "rep:tau=2", "--rate", "saxas",
                                     "--json"])
        rep = json.loads(out)
        assert rep["certified"] is True
        assert rep["rho_exact"] <= rep["rho_bound"] + 1e-10

    def test_convenient(self, capsys):
        _, out, _ = run_cli(capsys, ["certify", "--gen", "gaussian:m=6,n=4", "--dist", "singletons",
                                     "--convenient", "--json"])
        rep = json.loads(out)
        assert rep["rho_bound"] is not None
        assert rep["rho_exact"] <= rep["rho_bound"] + 1e-10

    def test_cap(self, capsys, monkeypatch):
        monkeypatch.setenv("PINV_ANALYSIS_CAP", "3")
        code, _, err = run_cli(capsys, ["certify", "--gen", "gaussian:m=5,n=4", "--dist", "singletons"])
        assert code == 1
        assert "analysis cap" in err

    def test_bad_dist(self, capsys):
        code, _, err = run_cli(capsys, ["certify", "--gen", "sym:n=3", "--dist", "uniform"])
        assert code == 1 and "tau" in err

    def test_saxas_needs_symmetric(self, capsys):
        code, _, _ = run_cli(capsys, ["certify", "--gen", "gaussian:m=3,n=3", "--rate", "saxas"])
        assert code == 1


class TestCompare:
    ARGS = ["compare", "--methods", "ns,ns-satax", "--tau", "5", "--gen", "gaussian:m=200,n=20,r=15",
            "--max-iters", "60", "--tol", "1e-10"]

    def test_iter0_shared_init(self, capsys):
        argv = list(self.ARGS)
        argv[2] = "satax_uni,satax_ada,ns-satax"
        _, out, _ = run_cli(capsys, argv)
        first = {r["method"]: r["residual"] for r in parse(out) if r["iter"] == "0"}
        assert len(set(first.values())) == 1

    def test_phases(self, capsys):
        code, out, _ = run_cli(capsys, self.ARGS)
        assert code == 0
        rows = parse(out)
        phases = {r["phase"] for r in rows if r["method"] == "ns-satax"}
        assert phases == {"satax", "ns"}

    def test_unknown_method(self, capsys):
        code, _, err = run_cli(capsys, ["compare", "--methods", "ns,bogus", "--gen", "diag:values=1"])
        assert code == 1 and "bogus" in err

    def test_split_seeds_independent(self):
        a, b = split_seeds(7, 2)
        assert a.generate_state(2).tolist() != b.generate_state(2).tolist()
        assert split_seeds(7, 2)[0].generate_state(2).tolist() == a.generate_state(2).tolist()
