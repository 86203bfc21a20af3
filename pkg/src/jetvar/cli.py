"""Command-line interface: ``jetvar <command> [options] EXPR``.

Exit codes: 0 on success, 1 for input errors (syntax, arity, bidegree),
2 for mathematical domain errors such as a non-variational source form
given to ``tonti``, 3 when ``selftest`` finds a failing property.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Sequence

from . import forms, render
from .cdiff import CDiffOp, adjoint, green_remainder
from .forms import PrimitiveError
from .jetring import JetSpace
from .parser import ParseError, evaluate, parse_form, parse_operator, parse_vector
from .selftest import run_suites
from .variational import NotVariationalError, SourceForm, euler_lagrange, helmholtz, tonti_lagrangian

FORMATS = ("text", "latex", "json")

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN, EXIT_SELFTEST = 0, 1, 2, 3


@dataclass(frozen=True)
class JobSpec:
    """One CLI invocation, independent of argv parsing."""

    command: str
    n: int = 1
    m: int = 1
    inputs: tuple[str, ...] = ()
    format: str = "text"
    seed: int = 0
    max_order: int | None = None
    options: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ValueError("--n and --m must be positive")
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")
        if self.max_order is not None and self.max_order < 0:
            raise ValueError("--max-order must be non-negative")

    @property
    def space(self) -> JetSpace:
        return JetSpace(self.n, self.m)


@dataclass(frozen=True)
class Outcome:
    code: int
    stdout: str = ""
    stderr: str = ""


class DomainError(Exception):
    """A well-formed request outside the domain of the operation."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def _render(value, space: JetSpace, fmt: str) -> str:
    if fmt == "latex":
        return render.latex(value, space)
    return render.text(value, space)


def _order(value) -> int:
    if isinstance(value, (tuple, list)):
        return max((v.order() for v in value), default=0)
    return value.order()


def _guard(job: JobSpec, value):
    if job.max_order is not None and _order(value) > job.max_order:
        raise DomainError(f"input has jet order {_order(value)}, above --max-order {job.max_order}")
    return value


def _load(job: JobSpec, source: str, kind: str, **kw):
    space = job.space
    if job.options.get("json_input"):
        value = render.from_json(json.loads(source), space)
        if kind == "form":
            value = forms.as_form(value)
        elif kind == "operator" and not isinstance(value, CDiffOp):
            value = CDiffOp.scalar(value, space.n)
        elif kind == "vector" and not isinstance(value, tuple):
            value = value.components if isinstance(value, SourceForm) else (value,)
        return _guard(job, value)
    if kind == "form":
        return _guard(job, parse_form(source, space, kw.get("degree")))
    if kind == "operator":
        return _guard(job, parse_operator(source, space))
    if kind == "vector":
        return _guard(job, parse_vector(source, space, kw.get("length")))
    return _guard(job, evaluate(source, space))


def _compute(job: JobSpec):
    """Return ``(value, extra)``; ``extra`` holds additional labelled output."""
    space = job.space
    cmd = job.command
    src = job.inputs[0] if job.inputs else ""
    if cmd == "eval":
        return _load(job, src, "any"), None
    if cmd == "el":
        a = _load(job, src, "form")
        if not a.degree:
            a = a.coefficient(())
        elif a and a.bidegree() != (0, space.n):
            raise ParseError(f"a Lagrangian is a function or a horizontal {space.n}-form")
        return euler_lagrange(a, space), None
    if cmd in ("hlm", "tonti"):
        eta = SourceForm(space, _load(job, src, "vector", length=space.m))
        if cmd == "hlm":
            return helmholtz(eta), None
        try:
            return tonti_lagrangian(eta), None
        except NotVariationalError as exc:
            raise DomainError(str(exc), exc.witness) from exc
    if cmd in ("d", "h", "v", "dbar"):
        a = _load(job, src, "form")
        if cmd == "d":
            return forms.d(a, space.n), None
        if cmd == "h":
            return forms.horizontalize(a), None
        if cmd == "v":
            return forms.vertical(a), None
        p = job.options.get("p")
        if p is None and a and len(a.contact_degrees()) > 1:
            raise ParseError("dbar needs a form of one contact degree, or --p")
        try:
            return forms.dbar(a, p, space.n), None
        except ValueError as exc:
            raise DomainError(str(exc)) from exc
    if cmd == "project":
        a = _load(job, src, "form")
        p, q = job.options["contact"], job.options["horizontal"]
        if a and p + q != a.degree:
            raise ParseError(f"bidegree ({p}, {q}) does not add up to degree {a.degree}")
        return forms.project(a, p, q), None
    if cmd == "adjoint":
        return adjoint(_load(job, src, "operator")), None
    if cmd == "green":
        op = _load(job, src, "operator")
        p = _load(job, job.inputs[1], "vector", length=op.cols)
        q = _load(job, job.inputs[2], "vector", length=op.rows)
        g = green_remainder(op, p, q)
        certified = g.certify(space) and g.divergence() == g.remainder
        return g.remainder, [("current", g.current_form()), ("certified", certified)]
    if cmd == "homotopy":
        a = _load(job, src, "form")
        p = job.options.get("primitive")
        if p is None:
            return forms.contact_homotopy(a), None
        try:
            return forms.contact_primitive(a, p, space.n), None
        except (ValueError, PrimitiveError) as exc:
            raise DomainError(str(exc)) from exc
    raise ParseError(f"unknown command {cmd!r}")


def _selftest(job: JobSpec) -> Outcome:
    cases = job.options.get("cases") or 20
    results = run_suites(job.seed, cases, 2 if job.max_order is None else job.max_order)
    ok = all(r.ok for r in results)
    if job.format == "json":
        body = {
            "seed": job.seed,
            "suites": [{"name": r.name, "passed": r.passed, "total": r.total} for r in results],
            "ok": ok,
        }
        out = json.dumps(body, sort_keys=True)
    else:
        lines = [f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.passed}/{r.total}" for r in results]
        lines.append(f"{sum(r.ok for r in results)}/{len(results)} suites passed (seed {job.seed})")
        out = "\n".join(lines)
    return Outcome(EXIT_OK if ok else EXIT_SELFTEST, out + "\n")


def run(job: JobSpec) -> Outcome:
    """Execute a job and return its exit code and rendered output."""
    try:
        job.validate()
    except ValueError as exc:
        return Outcome(EXIT_INPUT, stderr=f"error: {exc}\n")
    if job.command == "selftest":
        return _selftest(job)
    space = job.space
    try:
        value, extra = _compute(job)
    except ParseError as exc:
        return Outcome(EXIT_INPUT, stderr=f"{exc.describe()}\n")
    except json.JSONDecodeError as exc:
        return Outcome(EXIT_INPUT, stderr=f"error: invalid JSON input: {exc}\n")
    except DomainError as exc:
        if exc.witness is None:
            return Outcome(EXIT_DOMAIN, stderr=f"error: {exc}\n")
        if job.format == "json":
            body = {"command": job.command, "error": str(exc), "witness": render.to_json(exc.witness)}
            return Outcome(EXIT_DOMAIN, json.dumps(body, sort_keys=True) + "\n", f"error: {exc}\n")
        witness = _render(exc.witness, space, job.format)
        return Outcome(EXIT_DOMAIN, witness + "\n", f"error: {exc}; Helmholtz operator follows\n")

    if job.format == "json":
        body = {"command": job.command, "n": job.n, "m": job.m, "result": render.to_json(value)}
        for label, item in extra or []:
            body[label] = item if isinstance(item, bool) else render.to_json(item)
        return Outcome(EXIT_OK, json.dumps(body, sort_keys=True) + "\n")
    lines = [_render(value, space, job.format)]
    for label, item in extra or []:
        text = ("yes" if item else "no") if isinstance(item, bool) else _render(item, space, job.format)
        lines.append(f"{label}: {text}")
    return Outcome(EXIT_OK, "\n".join(lines) + "\n")


# -- argv ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Argument errors are input errors, so they exit with 1 rather than 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, default=1, help="number of base coordinates (default 1)")
    common.add_argument("--m", type=int, default=1, help="number of fibre coordinates (default 1)")
    common.add_argument(
        "--format",
        choices=FORMATS,
        default=os.environ.get("JETVAR_FORMAT", "text"),
        help="output format (default: $JETVAR_FORMAT or text)",
    )
    common.add_argument("--seed", type=int, default=0, help="seed for randomized commands")
    common.add_argument("--max-order", type=int, default=None, help="reject inputs of higher jet order")
    common.add_argument("--json-input", action="store_true", help="read inputs as JSON documents")
    return common


_COMMANDS = {
    "eval": "evaluate an expression",
    "el": "Euler-Lagrange expressions of a Lagrangian",
    "hlm": "Helmholtz operator of a source form",
    "tonti": "Lagrangian of a variational source form",
    "d": "exterior derivative",
    "dbar": "zeroth-page differential (contact-preserving part of d)",
    "h": "horizontal component",
    "v": "contact (vertical) component",
    "project": "component of a given bidegree",
    "adjoint": "formal adjoint of an operator",
    "green": "Green remainder q.op(p) - op*(q).p with its current",
    "homotopy": "contact homotopy operator, or a contact primitive",
    "selftest": "run randomized property suites",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="jetvar",
        description="Variational calculus on jet spaces with exact arithmetic.",
        epilog="Expressions starting with '-' must follow '--'.  Use '-' to read an expression from stdin.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command", parser_class=_Parser)
    common = _common()
    for name, help_text in _COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == "selftest":
            p.add_argument("--cases", type=int, default=20, help="cases per suite (default 20)")
        elif name == "green":
            p.add_argument("operator")
            p.add_argument("p", help="vector the operator acts on")
            p.add_argument("q", help="vector paired with the image")
        else:
            p.add_argument("expr")
        if name == "dbar":
            p.add_argument("--p", type=int, default=None, help="read the input as a p-contact class")
        if name == "project":
            p.add_argument("--contact", type=int, required=True)
            p.add_argument("--horizontal", type=int, required=True)
        if name == "homotopy":
            p.add_argument("--primitive", type=int, default=None, metavar="P",
                           help="return a P-contact primitive of a closed P-contact form")
    return parser


def job_from_args(args: argparse.Namespace, stdin=None) -> JobSpec:
    if args.command == "green":
        inputs = (args.operator, args.p, args.q)
    elif args.command == "selftest":
        inputs = ()
    else:
        inputs = (args.expr,)
    if "-" in inputs:
        text = (stdin or sys.stdin).read().strip()
        inputs = tuple(text if s == "-" else s for s in inputs)
    options = {"json_input": args.json_input}
    for key in ("p", "contact", "horizontal", "primitive", "cases"):
        if key in vars(args) and not (args.command == "green" and key == "p"):
            options[key] = getattr(args, key)
    return JobSpec(
        command=args.command,
        n=args.n,
        m=args.m,
        inputs=inputs,
        format=args.format,
        seed=args.seed,
        max_order=args.max_order,
        options=options,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    outcome = run(job_from_args(args))
    if outcome.stdout:
        sys.stdout.write(outcome.stdout)
    if outcome.stderr:
        sys.stderr.write(outcome.stderr)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
