"""``tensorctx`` command-line front end.

Exit status: 0 when every check passed, 1 when an expectation failed, 2 on a
parse, resolution or validation error in the scenario, 64 on a usage error.
Reports go to stdout and diagnostics to stderr.  ``TENSORCTX_SEED`` supplies
the default seed; ``--seed`` overrides it.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from typing import Any, TextIO

import numpy as np

from .analysis import factorize_operator, factorize_state, schmidt
from .circuit import Circuit, simulate, transform_circuit
from .demos import DEMOS
from .errors import ParseError, ResolutionError, TensorCtxError
from .numerics import approx_eq_phase, dagger, kron, max_abs
from .scenario import (
    Directive,
    ScenarioFile,
    Workspace,
    build,
    circuit_to_def,
    operator_to_def,
    parse_matrix_value,
    parse_scenario,
    parse_vector_value,
    serialize_scenario,
)
from .tensor_op import TensorProductOperator, relating_unitary, verify_axioms

EXIT_OK = 0
EXIT_EXPECTATION = 1
EXIT_INPUT = 2
EXIT_USAGE = 64

DEFAULT_TOLERANCE = 1e-9


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


# -- output ------------------------------------------------------------------


def _fmt_real(x: float, machine: bool) -> str:
    if machine:
        return f"{x:.17g}"
    x = 0.0 if abs(x) < 5e-13 else x
    return f"{x:.6g}"


def _fmt_complex(z: complex, machine: bool) -> str:
    if machine:
        return f"{z.real:.17g}{z.imag:+.17g}i"
    re = 0.0 if abs(z.real) < 5e-13 else z.real
    im = 0.0 if abs(z.imag) < 5e-13 else z.imag
    if im == 0.0:
        return f"{re:.6g}"
    if re == 0.0:
        return f"{im:.6g}i"
    return f"{re:.6g}{im:+.6g}i"


def format_value(v: Any, machine: bool = False) -> str:
    """Render a report value on one line.

    Vectors are space separated; matrix rows are separated by `` ; ``.
    """
    if isinstance(v, (bool, np.bool_)):
        return "yes" if v else "no"
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt_real(float(v), machine)
    if isinstance(v, (complex, np.complexfloating)):
        return _fmt_complex(complex(v), machine)
    if isinstance(v, np.ndarray):
        if v.ndim == 0:
            return format_value(v.item(), machine)
        if v.ndim == 1:
            cplx = np.iscomplexobj(v)
            return " ".join(_fmt_complex(complex(z), machine) if cplx else _fmt_real(float(z), machine) for z in v)
        return " ; ".join(format_value(row, machine) for row in v)
    if isinstance(v, dict):
        return ", ".join(f"{k}:{format_value(x, machine)}" for k, x in v.items())
    if isinstance(v, tuple):
        return "(" + ", ".join(format_value(x, machine) for x in v) + ")"
    if isinstance(v, list):
        return "[" + ", ".join(format_value(x, machine) for x in v) + "]"
    return str(v)


def _machine_key(key: str) -> str:
    # keys never contain whitespace or '=' so each line splits at the first '='
    return "_".join(key.replace("=", ":").split())


class Report:
    """Ordered key/value output plus a tally of pass/fail checks."""

    def __init__(self, out: TextIO, machine: bool):
        self.out = out
        self.machine = machine
        self.failures = 0
        self.checks = 0

    def value(self, key: str, v: Any) -> None:
        if self.machine:
            self.out.write(f"{_machine_key(key)}={format_value(v, True)}\n")
        else:
            self.out.write(f"{key}: {format_value(v, False)}\n")

    def section(self, title: str) -> None:
        if not self.machine:
            self.out.write(f"== {title}\n")

    def check(self, key: str, ok: bool, detail: str = "") -> None:
        self.checks += 1
        if not ok:
            self.failures += 1
        if self.machine:
            key = _machine_key(key)
            self.out.write(f"{key}.status={'pass' if ok else 'fail'}\n")
            if detail:
                self.out.write(f"{key}.detail={detail}\n")
        else:
            self.out.write(f"[{'PASS' if ok else 'FAIL'}] {key}{'  (' + detail + ')' if detail else ''}\n")

    @property
    def exit_code(self) -> int:
        return EXIT_EXPECTATION if self.failures else EXIT_OK


# -- directive execution -----------------------------------------------------


class Runner:
    """Executes directives in order against a workspace, registering named results."""

    def __init__(self, ws: Workspace, report: Report, seed: int, tol: float):
        self.ws = ws
        self.rep = report
        self.seed = seed
        self.tol = tol

    def run_all(self) -> None:
        for k, d in enumerate(self.ws.scenario.directives):
            self.run(d, f"d{k}.{d.cmd}")

    def run(self, d: Directive, key: str) -> None:
        self.rep.section(f"{key} {dict(d.args)}")
        getattr(self, f"_do_{d.cmd}")(d, key, d.expectations)

    def _do_verify(self, d: Directive, key: str, exp):
        t = self.ws.operators[d.arg("op")]
        r = verify_axioms(t, int(d.arg("trials", 100)), self.seed, self.tol)
        self.rep.value(f"{key}.residual", r.residual)
        if exp is not None and "result" in exp:
            want = exp["result"] == "pass"
            self.rep.check(f"{key}.result", r.passed == want, f"axioms {'hold' if r.passed else 'fail'}")

    def _do_schmidt(self, d: Directive, key: str, exp):
        t = self.ws.operators[d.arg("op")]
        state = self.ws.states[d.arg("state")]
        sd = schmidt(state, t)
        self.rep.value(f"{key}.rank", sd.rank)
        self.rep.value(f"{key}.coefficients", sd.coefficients)
        if exp is None:
            return
        if "rank" in exp:
            self.rep.check(f"{key}.rank", sd.rank == exp["rank"], f"got {sd.rank}, expected {exp['rank']}")
        if "coefficients" in exp:
            want = np.array(exp["coefficients"], dtype=float)
            got = sd.coefficients
            if want.size < got.size:
                want = np.concatenate([want, np.zeros(got.size - want.size)])
            ok = want.shape == got.shape and max_abs(want - got) <= self.tol
            self.rep.check(f"{key}.coefficients", ok)

    def _do_factorize(self, d: Directive, key: str, exp):
        t = self.ws.operators[d.arg("op")]
        name = d.arg("target")
        if name in self.ws.states:
            found = factorize_state(self.ws.states[name], t)
            if found is not None:
                self.rep.value(f"{key}.x", found[0])
                self.rep.value(f"{key}.y", found[1])
        else:
            f = factorize_operator(self.ws.matrices[name], t)
            found = None if f is None else (f.left, f.right)
            if f is not None:
                self.rep.value(f"{key}.left", f.left)
                self.rep.value(f"{key}.right", f.right)
                self.rep.value(f"{key}.residual", f.residual)
        self.rep.value(f"{key}.result", "present" if found is not None else "absent")
        if exp is None:
            return
        if "result" in exp:
            got = "present" if found is not None else "absent"
            self.rep.check(f"{key}.result", got == exp["result"], f"got {got}, expected {exp['result']}")
        if found is None:
            return
        if "x" in exp:
            self.rep.check(f"{key}.x", approx_eq_phase(found[0], parse_vector_value(exp["x"]), self.tol))
        if "y" in exp:
            self.rep.check(f"{key}.y", approx_eq_phase(found[1], parse_vector_value(exp["y"]), self.tol))
        if "left" in exp and "right" in exp:
            # factors are only fixed up to a scalar exchange, so compare their product
            want = kron(parse_matrix_value(exp["left"]), parse_matrix_value(exp["right"]))
            self.rep.check(f"{key}.factors", max_abs(kron(found[0], found[1]) - want) <= self.tol)

    def _simulate(self, c: Circuit, d: Directive, key: str, exp):
        trace = simulate(c, int(d.arg("seed", self.seed)))
        for lab, v in trace.checkpoints:
            self.rep.value(f"{key}.state[{lab}]", v)
        for lab, v in trace.outcomes.items():
            self.rep.value(f"{key}.outcome[{lab}]", v)
        self.rep.value(f"{key}.probability", trace.probability)
        if d.arg("as"):
            self.ws.states[d.arg("as")] = trace.final
        if exp is None:
            return trace
        if "final" in exp:
            self.rep.check(f"{key}.final", approx_eq_phase(trace.final, parse_vector_value(exp["final"]), self.tol))
        for lab, vec in (exp.get("checkpoints") or {}).items():
            try:
                got = trace.state(lab)
            except KeyError:
                self.rep.check(f"{key}.checkpoint[{lab}]", False, "no such checkpoint")
                continue
            self.rep.check(f"{key}.checkpoint[{lab}]", approx_eq_phase(got, parse_vector_value(vec), self.tol))
        for lab, want in (exp.get("outcomes") or {}).items():
            got = trace.outcomes.get(lab)
            self.rep.check(f"{key}.outcome[{lab}]", got is not None and abs(got - want) <= self.tol)
        if "probability" in exp:
            self.rep.check(f"{key}.probability", abs(trace.probability - exp["probability"]) <= self.tol)
        return trace

    def _do_run(self, d: Directive, key: str, exp):
        self._simulate(self.ws.circuits[d.arg("circuit")], d, key, exp)

    def _do_transform(self, d: Directive, key: str, exp):
        c = self.ws.circuits[d.arg("circuit")]
        new = transform_circuit(c, self.ws.operators[d.arg("op")])
        if d.arg("as"):
            new = replace(new, name=d.arg("as"))
            self.ws.circuits[d.arg("as")] = new
        self._simulate(new, Directive("run", (), None), key, exp)


# -- subcommands -------------------------------------------------------------


def _load(path: str) -> Workspace:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return build(parse_scenario(data))


def relating_residuals(a: TensorProductOperator, b: TensorProductOperator, rng: np.random.Generator) -> tuple[float, float]:
    """Basis-image and lift-conjugation residuals for the unitary relating ``a`` to ``b``."""
    W = relating_unitary(a, b)
    d1, d2 = a.ttype.d1, a.ttype.d2
    basis = 0.0
    for i in range(d1):
        for j in range(d2):
            ei, ej = np.eye(d1)[i], np.eye(d2)[j]
            basis = max(basis, float(np.linalg.norm(W @ a.apply(ei, ej) - b.apply(ei, ej))))
    l1 = rng.standard_normal((d1, d1)) + 1j * rng.standard_normal((d1, d1))
    l2 = rng.standard_normal((d2, d2)) + 1j * rng.standard_normal((d2, d2))
    lift = max_abs(W @ a.lift(l1, l2) @ dagger(W) - b.lift(l1, l2))
    return basis, lift


def cmd_verify(args, rep: Report) -> int:
    ws = _load(args.scenario)
    rng = np.random.default_rng(args.seed)
    for label, t in ws.operators.items():
        r = verify_axioms(t, 100, args.seed, args.tolerance)
        rep.value(f"axioms[{label}].residual", r.residual)
        rep.check(f"axioms[{label}]", r.passed)
    for name, ctx in ws.contexts.items():
        for pname, p in ctx.pairings.items():
            r = verify_axioms(p.op, 100, args.seed, args.tolerance)
            rep.value(f"axioms[{name}/{pname}].residual", r.residual)
            rep.check(f"axioms[{name}/{pname}]", r.passed)
    ops = list(ws.operators.values())
    for a in ops:
        for b in ops:
            if a is b or a.ttype != b.ttype:
                continue
            basis, lift = relating_residuals(a, b, rng)
            key = f"relating[{a.label}->{b.label}]"
            rep.value(f"{key}.basis_residual", basis)
            rep.value(f"{key}.lift_residual", lift)
            rep.check(key, max(basis, lift) <= args.tolerance)
    runner = Runner(ws, rep, args.seed, args.tolerance)
    for k, d in enumerate(ws.scenario.directives):
        if d.cmd == "verify":
            runner.run(d, f"d{k}.verify")
    return rep.exit_code


def cmd_schmidt(args, rep: Report) -> int:
    ws = _load(args.scenario)
    _need(ws.states, args.state, "state")
    _need(ws.operators, args.op, "operator")
    sd = schmidt(ws.states[args.state], ws.operators[args.op])
    rep.value("rank", sd.rank)
    rep.value("coefficients", sd.coefficients)
    for k in range(sd.rank):
        rep.value(f"left[{k}]", sd.left_vectors[:, k])
        rep.value(f"right[{k}]", sd.right_vectors[:, k])
    return rep.exit_code


def cmd_factorize(args, rep: Report) -> int:
    ws = _load(args.scenario)
    _need(ws.operators, args.op, "operator")
    if args.target not in ws.states and args.target not in ws.matrices:
        raise ResolutionError(f"unknown state or matrix {args.target!r}")
    Runner(ws, rep, args.seed, args.tolerance).run(
        Directive("factorize", (("op", args.op), ("target", args.target))), "factorize"
    )
    return rep.exit_code


def cmd_run(args, rep: Report) -> int:
    ws = _load(args.scenario)
    runner = Runner(ws, rep, args.seed, args.tolerance)
    if ws.scenario.directives:
        runner.run_all()
    else:
        for name in ws.circuits:
            runner.run(Directive("run", (("circuit", name),)), name)
    return rep.exit_code


def cmd_transform(args, rep: Report, out: TextIO) -> int:
    ws = _load(args.scenario)
    _need(ws.circuits, args.circuit, "circuit")
    _need(ws.operators, args.op, "operator")
    new = transform_circuit(ws.circuits[args.circuit], ws.operators[args.op])
    sf = ScenarioFile(
        notes=f"{args.circuit} rewritten for operator {args.op}",
        operators=tuple(operator_to_def(t) for t in ws.operators.values()),
        circuits=(circuit_to_def(new, args.name or args.circuit),),
    )
    text = serialize_scenario(sf)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        rep.value("written", args.output)
    else:
        out.write(text)
    return EXIT_OK


def cmd_paper_demo(args, rep: Report) -> int:
    fn = DEMOS[args.name]
    kwargs: dict[str, Any] = {}
    if args.name == "teleportation":
        kwargs["seed"] = args.seed
    if args.tolerance_given:
        kwargs["tol"] = args.tolerance
    result = fn(**kwargs)
    rep.section(result.name)
    for key, val in result.values:
        rep.value(key, val)
    for key, ok, detail in result.checks:
        rep.check(key, ok, detail)
    return rep.exit_code


def _need(pool: dict, name: str, what: str) -> None:
    if name not in pool:
        raise ResolutionError(f"unknown {what} {name!r}")


def _default_seed() -> int:
    raw = os.environ.get("TENSORCTX_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"TENSORCTX_SEED must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default: $TENSORCTX_SEED or 0)")
    common.add_argument("--tolerance", type=float, default=None, help=f"comparison tolerance (default {DEFAULT_TOLERANCE})")
    common.add_argument("--format", choices=("text", "machine"), default="text")

    parser = _ArgumentParser(prog="tensorctx", description="Tensor product operators as explicit values.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("verify", parents=[common], help="axiom and relating-unitary checks")
    p.add_argument("scenario")
    p = sub.add_parser("schmidt", parents=[common], help="Schmidt decomposition of a state")
    p.add_argument("scenario")
    p.add_argument("state")
    p.add_argument("op")
    p = sub.add_parser("factorize", parents=[common], help="split a state or operator into factors")
    p.add_argument("scenario")
    p.add_argument("target")
    p.add_argument("op")
    p = sub.add_parser("run", parents=[common], help="execute directives or simulate every circuit")
    p.add_argument("scenario")
    p = sub.add_parser("transform", parents=[common], help="rewrite a circuit for another operator")
    p.add_argument("scenario")
    p.add_argument("circuit")
    p.add_argument("op")
    p.add_argument("-o", "--output", help="write the scenario here instead of stdout")
    p.add_argument("--name", help="name for the rewritten circuit")
    p = sub.add_parser("paper-demo", parents=[common], help="run a built-in worked example")
    p.add_argument("name", choices=sorted(DEMOS))
    return parser


def run_cli(argv: list[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        args.tolerance_given = args.tolerance is not None
        if args.tolerance is None:
            args.tolerance = DEFAULT_TOLERANCE
        if args.seed is None:
            args.seed = _default_seed()
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    rep = Report(out, args.format == "machine")
    try:
        if args.command == "verify":
            return cmd_verify(args, rep)
        if args.command == "schmidt":
            return cmd_schmidt(args, rep)
        if args.command == "factorize":
            return cmd_factorize(args, rep)
        if args.command == "run":
            return cmd_run(args, rep)
        if args.command == "transform":
            return cmd_transform(args, rep, out)
        return cmd_paper_demo(args, rep)
    except TensorCtxError as exc:
        err.write(f"tensorctx: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
