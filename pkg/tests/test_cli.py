import json
import subprocess
import sys
from pathlib import Path

import pytest

from jetvar.cli import EXIT_DOMAIN, EXIT_INPUT, EXIT_OK, EXIT_SELFTEST, JobSpec, main, run

GOLDEN = Path(__file__).parent / "golden"


def job(command, *inputs, **kw):
    options = kw.pop("options", {})
    return JobSpec(command=command, n=kw.pop("n", 1), m=kw.pop("m", 1), inputs=inputs,
                   format=kw.pop("format", "text"), seed=kw.pop("seed", 0),
                   max_order=kw.pop("max_order", None), options=options)


@pytest.mark.parametrize(
    "argv,golden",
    [
        (["el", "1/2*u[x]^2"], "el_half_ux2.txt"),
        (["hlm", "u*u[x]"], "hlm_u_ux.txt"),
        (["tonti", "--", "-u[xx]"], "tonti_minus_uxx.txt"),
        (["el", "--format", "json", "1/2*u[x]^2"], "el_half_ux2.json"),
        (["hlm", "--format", "json", "u*u[x]"], "hlm_u_ux.json"),
        (["hlm", "--format", "latex", "u*u[x]"], "hlm_u_ux.tex"),
    ],
)
def test_golden(argv, golden, capsys):
    assert main(argv) == EXIT_OK
    assert capsys.readouterr().out == (GOLDEN / golden).read_text()


def test_tonti_rejects_with_witness(capsys):
    assert main(["tonti", "u*u[x]"]) == EXIT_DOMAIN
    out = capsys.readouterr()
    assert out.out == (GOLDEN / "tonti_u_ux_witness.txt").read_text()
    assert "not locally variational" in out.err


def test_tonti_witness_as_json():
    out = run(job("tonti", "u*u[x]", format="json"))
    assert out.code == EXIT_DOMAIN
    body = json.loads(out.stdout)
    assert body["witness"]["type"] == "operator"


def test_exit_codes(capsys):
    assert main(["el", "u[x"]) == EXIT_INPUT
    assert "^" in capsys.readouterr().err
    assert main(["el", "u/u"]) == EXIT_INPUT
    assert run(job("el", "u", n=0)).code == EXIT_INPUT
    assert run(job("homotopy", "u[x]*dx∧om", options={"primitive": 1})).code == EXIT_DOMAIN
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == EXIT_INPUT


def test_max_order_guard():
    assert run(job("el", "u[xxx]", max_order=2)).code == EXIT_DOMAIN
    assert run(job("el", "u[xx]", max_order=2)).code == EXIT_OK


def test_commands():
    def out(*args, **kw):
        result = run(job(*args, **kw))
        assert result.code == EXIT_OK, result.stderr
        return result.stdout

    assert out("d", "u*dx1 ∧ dx2", n=2) == "dx1∧dx2∧om\n"
    assert out("el", "1/2*u[x2]^2 - 1/2*u[x1]^2", n=2) == "u[x1x1] - u[x2x2]\n"
    assert out("h", "du") == "u[x]*dx\n"
    assert out("v", "du") == "om\n"
    assert out("dbar", "u*dx1", n=2) == "-u[x2]*dx1∧dx2\n"
    assert out("project", "du∧dx", options={"contact": 1, "horizontal": 1}) == "-dx∧om\n"
    assert out("adjoint", "u*D[x]") == "-u*D[x] - u[x]\n"
    assert out("green", "D[x]", "u", "u") == "2*u*u[x]\ncurrent: u^2\ncertified: yes\n"
    assert out("homotopy", "om & dx") == "u*dx\n"
    assert out("eval", "D(x, u^2)") == "2*u*u[x]\n"


def test_homotopy_primitive():
    result = run(job("homotopy", "d(u[x2]*om)", n=2, options={"primitive": 1}))
    assert result.code == EXIT_OK
    assert "om" in result.stdout


def test_json_input():
    doc = json.dumps({"type": "function", "value": {"terms": [{"coeff": "1/2", "monomial": [["u", 0, [1], 2]]}]}})
    result = run(job("el", doc, options={"json_input": True}))
    assert result.stdout == "-u[xx]\n"
    assert run(job("el", "{not json", options={"json_input": True})).code == EXIT_INPUT


def test_format_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("JETVAR_FORMAT", "json")
    assert main(["el", "1/2*u[x]^2"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["command"] == "el"


def test_stdin_input(monkeypatch, capsys):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO("1/2*u[x]^2\n"))
    assert main(["el", "-"]) == EXIT_OK
    assert capsys.readouterr().out == "-u[xx]\n"


def test_selftest_is_deterministic():
    a = run(job("selftest", seed=42, options={"cases": 5}))
    b = run(job("selftest", seed=42, options={"cases": 5}))
    assert a.code == EXIT_OK and a.stdout == b.stdout
    assert a.stdout.splitlines()[-1] == "10/10 suites passed (seed 42)"
    body = json.loads(run(job("selftest", seed=42, format="json", options={"cases": 5})).stdout)
    assert body["ok"] and len(body["suites"]) == 10
    assert EXIT_SELFTEST == 3


def test_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "jetvar.cli", "el", "1/2*u[x]^2"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout == "-u[xx]\n"
