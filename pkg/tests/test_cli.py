import io
import json

import pytest

from hspec import io as hio
from hspec.cli import RunConfig, main, resolve_workers
from hspec.matcore import from_rows


@pytest.fixture
def two(tmp_path):
    p = tmp_path / "two.mtx"
    hio.save_matrix(from_rows([[1, 2], [3, 4]]), p)
    return str(p)


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_rho_prints_value_and_narrow_interval(two):
    code, text = run("rho", "--functional", "r", "--matrix", two)
    assert code == 0
    assert "5.372281323" in text
    lo, hi = (float(x) for x in text.split("[")[1].split("]")[0].split(","))
    assert hi - lo <= 1e-9 and lo <= 5.372281323269014 <= hi


@pytest.mark.parametrize("f, prefix", [("op2", "5.464985704"), ("w", "5.415475947"),
                                       ("op1", "6.0"), ("opinf", "7.0"), ("maxentry", "4.0")])
def test_rho_other_functionals(two, f, prefix):
    code, text = run("rho", "--functional", f, "--matrix", two)
    assert code == 0 and prefix in text


def test_check_l17_exit_zero():
    code, text = run("check", "--law", "L17", "--trials", "5", "--seed", "1")
    assert code == 0
    assert "0 counterexamples" in text


def test_check_json_is_byte_stable(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("check", "--law", "L02,L20", "--trials", "20", "--json", str(a), "--workers", "1")[0] == 0
    assert run("check", "--law", "L02,L20", "--trials", "20", "--json", str(b), "--workers", "2")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["seed"] == 0


def test_refine_alpha_out_of_range_is_usage_error(two, capsys):
    code, _ = run("refine", "--matrix", two, "--alpha", "1.5", "--depth", "2")
    assert code == 2
    assert "alpha" in capsys.readouterr().err


def test_refine_prints_sequence_and_cap(two):
    code, text = run("refine", "--matrix", two, "--alpha", "0.5", "--depth", "2")
    assert code == 0
    assert "rho_0" in text and "rho_2" in text and "cap" in text


def test_refine_with_beta(two):
    code, text = run("refine", "--matrix", two, "--alpha", "0.7", "--beta", "0.6", "--depth", "1")
    assert code == 0 and "cap" in text


def test_profile_emits_samples(two, tmp_path):
    out = tmp_path / "p.json"
    code, _ = run("profile", "--matrix", two, "--functional", "w", "--grid", "5", "--json", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert [s["alpha"] for s in doc["samples"]] == [0, 0.25, 0.5, 0.75, 1]


def test_profile_rejects_unsupported_functional(two):
    assert run("profile", "--matrix", two, "--functional", "op1", "--grid", "5")[0] == 2


def test_laws_lists_catalog():
    code, text = run("laws")
    assert code == 0
    assert "L01" in text and "L44" in text


def test_eval(tmp_path, two):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"matrices": [two, [[4, 3], [2, 1]]], "weights": [0.5, 0.5], "functional": "r"}))
    out = tmp_path / "r.json"
    code, text = run("eval", "--law", "L01", "--input", str(spec), "--json", str(out))
    assert code == 0 and "verdict: pass" in text
    assert hio.load_report(out).passed


def test_usage_errors(capsys):
    assert run()[0] == 2
    assert run("check", "--bogus")[0] == 2
    assert run("check", "--law", "L99")[0] == 2
    assert run("check", "--trials", "0")[0] == 2
    assert run("rho", "--matrix", "/nonexistent.mtx")[0] == 2
    assert run("rho", "--functional", "nope", "--matrix", "/nonexistent.mtx")[0] == 2


def test_parse_error_reported_with_line(tmp_path, capsys):
    p = tmp_path / "bad.mtx"
    p.write_text("%%MatrixMarket matrix array real general\n2 2\n1\nx\n3\n4\n")
    assert run("rho", "--matrix", str(p))[0] == 2
    assert "line 4" in capsys.readouterr().err


def test_nonconvergence_exit_code(two, monkeypatch):
    import hspec.cli as cli
    from hspec.spectral import CertifiedValue

    monkeypatch.setattr(cli, "certified", lambda f, A, **kw: CertifiedValue(5.0, 4.0, 6.0, 1, False))
    assert run("rho", "--matrix", two)[0] == 3


def test_workers_precedence():
    assert resolve_workers(4, {"HSPEC_WORKERS": "2"}) == 4
    assert resolve_workers(None, {"HSPEC_WORKERS": "2"}) == 2
    assert resolve_workers(None, {}) == 1
    with pytest.raises(ValueError):
        RunConfig(workers=0)
