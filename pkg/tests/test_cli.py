import csv
import io
import json
import math
import subprocess
import sys

import pytest

from walkextrap import cli
from walkextrap.cli import ConfigError, RunConfig, build_report, main, parse_real, render, run
from walkextrap.inner_products import FunctionSpec, QuadratureError, load_csv
from walkextrap.oracle_sim import discrete_v


@pytest.fixture
def samples_csv(tmp_path):
    path = tmp_path / "samples.csv"
    rows = ["x,y"] + [f"{x},{math.sin(0.7 * x) + 0.1 * x!r}" for x in range(11)]
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return path


def _run_main(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "text,value",
    [("1.5", 1.5), ("pi", math.pi), ("2pi", 2 * math.pi), ("1.5*pi", 1.5 * math.pi), ("pi/2", math.pi / 2),
     ("3 pi", 3 * math.pi), ("-pi", -math.pi), ("1e1", 10.0)],
)
def test_parse_real(text, value):
    assert parse_real(text) == value


def test_parse_real_rejects():
    with pytest.raises(ConfigError):
        parse_real("tau")


class TestReports:
    def test_rw_cosine_example(self, capsys):
        code, out, _ = _run_main(["--walk", "rw", "--n", "2", "--a", "pi", "--b", "4", "--function", "builtin:cos"], capsys)
        assert code == 0
        rep = json.loads(out)
        assert rep["schema"] == 1
        assert rep["p_star"] == pytest.approx(0.5 + 3 / math.pi**3, abs=1e-13)
        assert rep["m_tilde"] == pytest.approx(-1 + 3 * (4 - math.pi) / math.pi**3 * -2, abs=1e-13)
        assert rep["m"] == pytest.approx((1 - 2 * rep["p_star"]) * 4, abs=1e-15)
        assert rep["variance"] == {"at_b": 4.0, "at_b_minus_a": 4 - math.pi}
        assert rep["discrete_model"] is False

    def test_ctqw_identity_example(self, capsys):
        code, out, _ = _run_main(["--walk", "ctqw", "--n", "2", "--a", "1", "--b", "2", "--function", "builtin:identity"],
                                 capsys)
        rep = json.loads(out)
        assert code == 0
        assert rep["p_star"] == 0.0 and rep["m"] == 2.0 and rep["m_tilde"] == 2.0

    def test_dtrw_csv_example(self, samples_csv, capsys):
        code, out, _ = _run_main(
            ["--walk", "dtrw-z", "--n", "2", "--a", "10", "--b", "12", "--function", f"csv:{samples_csv}"], capsys)
        assert code == 0
        rep = json.loads(out)
        assert rep["discrete_model"] is True
        assert {(b["alpha"], b["beta"]) for b in rep["brackets"]} == {(0.0, 2), (1.0, 1)}
        assert all(b["method"] == "discrete_sum" for b in rep["brackets"])
        f = load_csv(samples_csv)
        coeffs = rep["v_coefficients_w"]
        for p in (0.2, 0.5, 0.9):
            w = 1 - 2 * p
            assert coeffs[0] + coeffs[1] * w + coeffs[2] * w * w == pytest.approx(discrete_v(f, 10, p), rel=1e-10)
        assert rep["variance"]["at_b"] is not None

    def test_csv_a_defaults_to_table_end(self, samples_csv):
        rep = build_report(RunConfig("rw", 2, None, 12.0, f"csv:{samples_csv}"))
        assert rep["a"] == 10.0

    def test_dtqw_reports_r(self, capsys):
        code, out, _ = _run_main(
            ["--walk", "dtqw", "--r", "0.5", "--n", "4", "--a", "2pi", "--b", "3pi", "--function", "builtin:cos"], capsys)
        rep = json.loads(out)
        assert code == 0 and rep["r"] == 0.5
        assert rep["discriminant"] < 0
        assert len(rep["local_minima"]) == 1

    def test_polynomial_function(self):
        rep = build_report(RunConfig("ctqw", 2, 2.0, 3.0, "poly:0,1"))
        assert rep["p_star"] == 0.0

    def test_v_curve(self):
        rep = build_report(RunConfig("ctqw", 4, math.pi, 4.0, "builtin:cos", emit_v_curve=11))
        curve = rep["v_curve"]
        assert len(curve) == 11 and curve[0]["p"] == 0.0 and curve[-1]["p"] == 1.0
        v_star = min(c["v"] for c in rep["candidates"])
        assert min(c["v"] for c in curve) >= v_star - 1e-9 * abs(v_star)


class TestFormats:
    CFG = dict(walk="ctqw", n=4, a=math.pi, b=4.0, function="builtin:cos", emit_v_curve=5)

    def test_json_round_trip(self):
        rep = build_report(RunConfig(**self.CFG))
        back = json.loads(render(rep, "json"))
        for key in ("p_star", "m", "m_tilde"):
            assert back[key] == rep[key]
        assert back == json.loads(json.dumps(rep))

    def test_csv(self):
        rep = build_report(RunConfig(**self.CFG, output_format="csv"))
        text = render(rep, "csv")
        head, curve = text.split("\n\n")
        rows = dict(r for r in csv.reader(io.StringIO(head)) if r)
        assert float(rows["p_star"]) == rep["p_star"]
        assert float(rows["m_tilde"]) == rep["m_tilde"]
        assert list(csv.reader(io.StringIO(curve)))[0] == ["p", "v"]

    def test_text(self):
        text = render(build_report(RunConfig(**self.CFG)), "text")
        assert "p_*" in text and "discriminant" in text and "p, V(p)" in text


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ["--walk", "rw", "--n", "3", "--a", "1", "--b", "2", "--function", "builtin:cos"],
            ["--walk", "rw", "--n", "2", "--a", "2", "--b", "1", "--function", "builtin:cos"],
            ["--walk", "rw", "--n", "2", "--a", "1", "--b", "2", "--function", "builtin:sin"],
            ["--walk", "rw", "--n", "2", "--a", "1", "--b", "2", "--function", "builtin:cos", "--r", "0.5"],
            ["--walk", "dtqw", "--n", "2", "--a", "1", "--b", "2", "--function", "builtin:cos", "--r", "1.5"],
            ["--walk", "dtrw-z", "--n", "2", "--a", "2.5", "--b", "4", "--function", "builtin:cos"],
            ["--walk", "ctrw-z", "--n", "4", "--a", "1", "--b", "2", "--function", "builtin:cos"],
            ["--walk", "rw", "--n", "2", "--b", "2", "--function", "builtin:cos"],
            ["--walk", "rw", "--n", "2", "--a", "1", "--b", "2", "--function", "csv:/nonexistent/f.csv"],
            ["--walk", "rw", "--n", "2", "--a", "1", "--b", "2", "--function", "poly:1,x"],
            ["--walk", "rw", "--n", "2", "--a", "tau", "--b", "2", "--function", "builtin:cos"],
            ["--walk", "rw", "--n", "2", "--a", "1", "--b", "2", "--function", "builtin:cos", "--emit-v-curve", "1"],
        ],
    )
    def test_invalid_config(self, argv, capsys):
        code, out, err = _run_main(argv, capsys)
        assert code == 2
        assert out == ""
        assert "invalid configuration" in err

    def test_argparse_errors_are_config_errors(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--walk", "levy", "--b", "2", "--function", "builtin:cos"])
        assert exc.value.code == 2

    def test_csv_a_mismatch(self, samples_csv, capsys):
        code, _, err = _run_main(["--walk", "rw", "--a", "9", "--b", "12", "--function", f"csv:{samples_csv}"], capsys)
        assert code == 2 and "does not match" in err

    def test_numeric_failure(self, monkeypatch):
        def boom(spec):
            raise QuadratureError("<x^1 f^1>", 0.1, 0.5, "did not converge")

        monkeypatch.setattr(cli, "_assemble", boom)
        err = io.StringIO()
        code = run(RunConfig("ctqw", 2, 1.0, 2.0, "builtin:cos"), stdout=io.StringIO(), stderr=err)
        assert code == 3
        assert "stage brackets" in err.getvalue()

    def test_root_stage_failure(self, monkeypatch):
        def boom(spec, v):
            raise ArithmeticError("no convergence")

        monkeypatch.setattr(cli, "argmin_p", boom)
        err = io.StringIO()
        assert run(RunConfig("rw", 2, 1.0, 2.0, "builtin:cos"), stdout=io.StringIO(), stderr=err) == 3
        assert "stage minimize" in err.getvalue()


def test_out_file(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, out, _ = _run_main(["--walk", "rw", "--a", "1", "--b", "2", "--function", "builtin:cos", "--out", str(path)],
                             capsys)
    assert code == 0 and out == ""
    assert json.loads(path.read_text(encoding="utf-8"))["schema"] == 1


@pytest.mark.parametrize("fmt", ["json", "csv", "text"])
def test_deterministic_output(tmp_path, samples_csv, fmt):
    argv = ["--walk", "dtqw", "--n", "4", "--a", "pi", "--b", "5", "--function", "builtin:cos", "--format", fmt,
            "--emit-v-curve", "21"]
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.{fmt}"
        assert main(argv + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "walkextrap", "--walk", "ctqw", "--a", "1", "--b", "2", "--function", "builtin:identity"],
        capture_output=True, text=True, check=False,
        env={"WALK_EXTRAP_LOG": "debug", "PATH": ""},
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["m"] == 2.0
    assert "stage brackets" in proc.stderr


def test_function_spec_builtins():
    assert RunConfig("rw", 2, 1.0, 2.0, "builtin:zero").function_spec() == FunctionSpec.polynomial([0.0], 1.0)
    assert RunConfig("rw", 2, 1.0, 2.0, "builtin:x").function_spec() == FunctionSpec.identity(1.0)
