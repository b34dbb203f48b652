import io
import json
from pathlib import Path

import pytest

from mframe.algebra import DiffExpr
from mframe.algebra.symbols import indep
from mframe.cli.config import ActionConfig, ConfigError
from mframe.cli.main import main
from mframe.cli.syntax import ParseError, UnknownSymbol, parse_expr

EUCLIDEAN = str(Path(__file__).resolve().parents[1] / "configs" / "euclidean.mfa")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_parse_expr_examples():
    assert parse_expr("((x))") == DiffExpr.sym(indep("x", 0))
    assert parse_expr("2^-1*x") == parse_expr("x/2")


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_expr("x +\n  * y")
    assert (info.value.line, info.value.column) == (2, 3)
    with pytest.raises(UnknownSymbol):
        parse_expr("omega[1,2,3]")


def test_orbits_text():
    code, out, _ = run("orbits", "--action", "conformal", "--max-order", "3")
    assert code == 0
    assert "group dimension 10" in out and "stabilization order: 3" in out


def test_orbits_json():
    code, out, _ = run("orbits", "--action", "projective", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["ranks"] == [3, 5, 8, 12, 15] and data["stabilization"] == 4


def test_frame_latex():
    code, out, _ = run("frame", "--action", "conformal", "--cross-section", "degenerate", "--format", "latex")
    assert code == 0
    assert out.startswith("% action conformal") and "\\begin{pmatrix}" in out and "\\Delta_{10}" in out


def test_frame_json_lists_syzygies():
    code, out, _ = run("frame", "--action", "conformal", "--cross-section", "degenerate", "--format", "json")
    data = json.loads(out)
    assert [z["label"] for z in data["syzygies"]] == ["Delta_7", "Delta_8", "Delta_9", "Delta_10"]
    assert set(data["aliases"]) == {"phi", "psi", "tau", "kappa", "sigma"}


def test_frame_needs_cross_section_choice():
    code, _, err = run("frame", "--action", "conformal")
    assert code == 2 and "hyperbolic" in err


def test_generators():
    code, out, _ = run("generators", "--action", "projective", "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data["minimal_order"]) == 6


def test_eliminate_with_trace(tmp_path):
    trace = tmp_path / "trace.json"
    code, out, _ = run("eliminate", "--action", "conformal", "--cross-section", "degenerate",
                       "--trace", str(trace))
    assert code == 0 and "sigma = " in out and "valid where:" in out
    steps = json.loads(trace.read_text())
    assert steps[0]["index"] == 1 and {"op", "output_hash", "inputs"} <= set(steps[0])


def test_eliminate_custom_script(tmp_path):
    script = tmp_path / "s.mfs"
    script.write_text("ranking = phi, psi < kappa, tau < sigma\nexpect zero(Delta_10)\nexpect zero(phi)\n")
    code, _, err = run("eliminate", "--action", "conformal", "--cross-section", "degenerate", "--script", str(script))
    # a failed expectation stops the script and names its line
    assert code == 2 and "line 3: expectation failed: zero(phi)" in err


def test_verify_exit_codes():
    assert run("verify", "--suite", "conformal-degenerate")[0] == 0
    code, out, _ = run("verify", "--suite", "conformal-hyperbolic")
    assert code == 1 and "FAIL  I_22" in out


def test_verify_json_report():
    code, out, _ = run("verify", "--suite", "conformal-degenerate", "--format", "json", "--seed", "4")
    data = json.loads(out)
    assert data["seed"] == 4 and data["failed"] == 0 and data["checks"][-1]["check"] == "script"


def test_json_error_object():
    code, out, _ = run("orbits", "--action", "affine", "--format", "json")
    err = json.loads(out)["error"]
    assert code == 2 and err["type"] == "CliError" and "affine" in err["message"]


def test_action_file():
    code, out, _ = run("orbits", "--action", EUCLIDEAN, "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["ranks"][:3] == [3, 5, 6] and data["stabilization"] == 2
    code, out, _ = run("frame", "--action", EUCLIDEAN, "--format", "json")
    assert code == 0 and json.loads(out)["cross_section"] == "principal"


@pytest.mark.parametrize("text, line", [
    ("[action]\ngenerator = 1, 0\n", 2),
    ("[action]\ngenerator = 1, 0, 0\ncolour = red\n", 3),
    ("x = 0\n", 1),
    ("[action]\ngenerator = 1, 0, 0\n[symmetry]\n", 3),
])
def test_config_errors(text, line):
    with pytest.raises(ConfigError) as info:
        ActionConfig.parse(text)
    assert info.value.line == line


def test_config_cross_section_must_be_constant():
    cfg = ActionConfig.parse("[action]\ngenerator = 1, 0, 0\n[cross-section a]\nx = y\n")
    with pytest.raises(ConfigError, match="line 4"):
        cfg.build_cross_section("a")


def test_config_error_as_json(tmp_path):
    bad = tmp_path / "bad.mfa"
    bad.write_text("[action]\ngenerator = 1, 0\n")
    code, out, _ = run("orbits", "--action", str(bad), "--format", "json")
    assert code == 2 and json.loads(out)["error"]["line"] == 2
