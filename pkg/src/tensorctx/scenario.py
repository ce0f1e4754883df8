"""Scenario files: a restricted JSON dialect describing operators, states, circuits and checks.

Only objects, arrays, numbers and strings are allowed (``true``, ``false``
and ``null`` are rejected, as are duplicate keys).  Free text goes in a
top-level ``"notes"`` field.  A complex number is ``[re, im]``; a bare JSON
number is accepted as a real.  Vectors are arrays of complex numbers and
matrices are row-major arrays of rows.  See ``docs/scenario-format.md`` for
the full grammar.

:func:`parse_scenario` produces a :class:`ScenarioFile` made of plain,
immutable values; :func:`build` resolves it into live objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .circuit import (
    MEASUREMENT,
    UNITARY,
    Circuit,
    Gate,
)
from .composition import MultipartiteContext, standard_context_3q
from .errors import DimensionMismatch, ParseError, ResolutionError, TensorCtxError
from .measurement import observable_from
from .numerics import is_hermitian
from .tensor_op import TensorProductOperator, TensorType

FORMAT_VERSION = 1

Complex = complex
Vector = tuple[complex, ...]
Matrix = tuple[tuple[complex, ...], ...]

_SECTIONS = ("version", "notes", "operators", "states", "matrices", "observables", "contexts", "circuits", "directives")
_COMMANDS = ("verify", "schmidt", "factorize", "run", "transform")


@dataclass(frozen=True)
class OperatorDef:
    label: str
    d1: int
    d2: int
    twist: Matrix


@dataclass(frozen=True)
class ContextDef:
    name: str
    kind: str
    t12: str
    t13: str
    t23: str


@dataclass(frozen=True)
class GateDef:
    kind: str  # "unitary" | "local" | "measure"
    label: str = ""
    matrix: Matrix | str | None = None
    left: Matrix | str | None = None
    right: Matrix | str | None = None
    pairing: str | None = None
    when: tuple[str, float] | None = None


@dataclass(frozen=True)
class CircuitDef:
    name: str
    context: str
    initial: Vector | str
    gates: tuple[GateDef, ...]
    parts: tuple[str, ...] = ("Q1", "Q2")


@dataclass(frozen=True)
class Directive:
    cmd: str
    args: tuple[tuple[str, Any], ...]
    expect: tuple[tuple[str, Any], ...] | None = None

    def arg(self, key: str, default=None):
        return _thaw(dict(self.args).get(key, default))

    @property
    def expectations(self) -> dict[str, Any] | None:
        return None if self.expect is None else {k: _thaw(v) for k, v in self.expect}


@dataclass(frozen=True)
class ScenarioFile:
    version: int = FORMAT_VERSION
    notes: str = ""
    operators: tuple[OperatorDef, ...] = ()
    states: tuple[tuple[str, Vector], ...] = ()
    matrices: tuple[tuple[str, Matrix], ...] = ()
    observables: tuple[tuple[str, Matrix], ...] = ()
    contexts: tuple[ContextDef, ...] = ()
    circuits: tuple[CircuitDef, ...] = ()
    directives: tuple[Directive, ...] = ()


# -- parsing -----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text

    def locate(self, needle: str) -> tuple[int | None, int | None]:
        idx = self.text.find(f'"{needle}"')
        if idx < 0:
            return None, None
        line = self.text.count("\n", 0, idx) + 1
        col = idx - (self.text.rfind("\n", 0, idx) + 1) + 1
        return line, col

    def fail(self, msg: str, anchor: str | None = None) -> ParseError:
        line, col = self.locate(anchor) if anchor else (None, None)
        return ParseError(msg, line, col)

    # value converters; ``where`` names the definition for diagnostics
    def string(self, v, where: str, anchor: str) -> str:
        if not isinstance(v, str):
            raise self.fail(f"{where}: expected a string, got {type(v).__name__}", anchor)
        return v

    def integer(self, v, where: str, anchor: str) -> int:
        if not isinstance(v, int) or isinstance(v, bool):
            raise self.fail(f"{where}: expected an integer, got {v!r}", anchor)
        return v

    def number(self, v, where: str, anchor: str) -> float:
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise self.fail(f"{where}: expected a number, got {v!r}", anchor)
        return float(v)

    def complex_(self, v, where: str, anchor: str) -> complex:
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return complex(float(v), 0.0)
        if isinstance(v, list) and len(v) == 2 and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in v):
            return complex(float(v[0]), float(v[1]))
        raise self.fail(f"{where}: expected a complex number [re, im], got {json.dumps(v)}", anchor)

    def vector(self, v, where: str, anchor: str) -> Vector:
        if not isinstance(v, list) or not v:
            raise self.fail(f"{where}: expected a non-empty vector", anchor)
        return tuple(self.complex_(e, f"{where}[{k}]", anchor) for k, e in enumerate(v))

    def matrix(self, v, where: str, anchor: str) -> Matrix:
        if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
            raise self.fail(f"{where}: expected a matrix as a list of rows", anchor)
        rows = tuple(self.vector(r, f"{where} row {k}", anchor) for k, r in enumerate(v))
        if len({len(r) for r in rows}) != 1:
            raise self.fail(f"{where}: rows have unequal lengths", anchor)
        return rows

    def ref_or_matrix(self, v, where: str, anchor: str) -> Matrix | str:
        return v if isinstance(v, str) else self.matrix(v, where, anchor)

    def obj(self, v, where: str, anchor: str | None) -> dict:
        if not isinstance(v, dict):
            raise self.fail(f"{where}: expected an object", anchor)
        return v


def _literal_position(text: str) -> tuple[int | None, int | None]:
    # first true/false/null token outside a string literal
    in_str = esc = False
    for i, ch in enumerate(text):
        if in_str:
            if esc:
                esc = False
            elif ch == "\\":
                esc = True
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
        elif ch in "tfn" and text.startswith(("true", "false", "null"), i):
            line = text.count("\n", 0, i) + 1
            return line, i - (text.rfind("\n", 0, i) + 1) + 1
    return None, None


def _reject_literals(value, path: str, parser: _Parser):
    if value is None or isinstance(value, bool):
        line, col = _literal_position(parser.text)
        raise ParseError(f"{path}: literals true/false/null are not part of the scenario format", line, col)
    if isinstance(value, dict):
        for k, v in value.items():
            _reject_literals(v, f"{path}.{k}", parser)
    elif isinstance(value, list):
        for k, v in enumerate(value):
            _reject_literals(v, f"{path}[{k}]", parser)


def _no_duplicates(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise ParseError(f"duplicate key {k!r}")
        seen[k] = v
    return seen


def parse_scenario(text: str | bytes) -> ScenarioFile:
    """Parse scenario text into its structured form.

    Raises:
        ParseError: malformed JSON, disallowed literals or shape violations.
        ResolutionError: a definition refers to an undefined label.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"scenario is not valid UTF-8: {exc}") from None
    p = _Parser(text)
    try:
        raw = json.loads(text, object_pairs_hook=_no_duplicates, parse_constant=_bad_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    _reject_literals(raw, "$", p)
    top = p.obj(raw, "scenario", None)
    for key in top:
        if key not in _SECTIONS:
            raise p.fail(f"unknown top-level section {key!r}", key)
    version = p.integer(top.get("version", FORMAT_VERSION), "version", "version")
    if version != FORMAT_VERSION:
        raise p.fail(f"unsupported format version {version}", "version")
    notes = p.string(top.get("notes", ""), "notes", "notes")

    operators = []
    for label, body in p.obj(top.get("operators", {}), "operators", "operators").items():
        where = f"operator {label!r}"
        body = p.obj(body, where, label)
        d1 = p.integer(body.get("d1"), f"{where} d1", label)
        d2 = p.integer(body.get("d2"), f"{where} d2", label)
        if d1 < 1 or d2 < 1:
            raise p.fail(f"{where}: dimensions must be positive", label)
        if "twist" not in body:
            raise p.fail(f"{where}: missing twist", label)
        twist = p.matrix(body["twist"], f"{where} twist", label)
        D = d1 * d2
        if len(twist) != D or len(twist[0]) != D:
            raise p.fail(f"{where}: twist is {len(twist)}x{len(twist[0])}, expected {D}x{D} for d1={d1}, d2={d2}", label)
        operators.append(OperatorDef(label, d1, d2, twist))

    states = tuple(
        (name, p.vector(v, f"state {name!r}", name))
        for name, v in p.obj(top.get("states", {}), "states", "states").items()
    )
    matrices = tuple(
        (name, p.matrix(v, f"matrix {name!r}", name))
        for name, v in p.obj(top.get("matrices", {}), "matrices", "matrices").items()
    )
    observables = tuple(
        (name, p.matrix(v, f"observable {name!r}", name))
        for name, v in p.obj(top.get("observables", {}), "observables", "observables").items()
    )
    for name, m in matrices + observables:
        if len(m) != len(m[0]):
            raise p.fail(f"{name!r} must be square, got {len(m)}x{len(m[0])}", name)

    contexts = []
    for name, body in p.obj(top.get("contexts", {}), "contexts", "contexts").items():
        where = f"context {name!r}"
        body = p.obj(body, where, name)
        kind = p.string(body.get("kind", ""), f"{where} kind", name)
        if kind != "standard_3q":
            raise p.fail(f"{where}: unknown kind {kind!r} (only 'standard_3q')", name)
        refs = [p.string(body.get(k), f"{where} {k}", name) for k in ("t12", "t13", "t23")]
        contexts.append(ContextDef(name, kind, *refs))

    circuits = []
    for name, body in p.obj(top.get("circuits", {}), "circuits", "circuits").items():
        where = f"circuit {name!r}"
        body = p.obj(body, where, name)
        ctx = p.string(body.get("context"), f"{where} context", name)
        init = body.get("initial")
        initial = init if isinstance(init, str) else p.vector(init, f"{where} initial", name)
        parts = tuple(p.string(s, f"{where} parts", name) for s in body.get("parts", ["Q1", "Q2"]))
        gates = []
        for k, g in enumerate(body.get("gates", [])):
            gates.append(_parse_gate(p, g, f"{where} gate {k}", name))
        circuits.append(CircuitDef(name, ctx, initial, tuple(gates), parts))

    directives = []
    raw_dirs = top.get("directives", [])
    if not isinstance(raw_dirs, list):
        raise p.fail("directives must be an array", "directives")
    for k, d in enumerate(raw_dirs):
        d = p.obj(d, f"directive {k}", "directives")
        cmd = p.string(d.get("cmd"), f"directive {k} cmd", "directives")
        if cmd not in _COMMANDS:
            raise p.fail(f"directive {k}: unknown command {cmd!r}", cmd)
        args = tuple(sorted((key, _freeze(v)) for key, v in d.items() if key not in ("cmd", "expect")))
        expect = None
        if "expect" in d:
            expect = tuple(sorted((key, _freeze(v)) for key, v in p.obj(d["expect"], f"directive {k} expect", cmd).items()))
        directives.append(Directive(cmd, args, expect))

    sf = ScenarioFile(
        version,
        notes,
        tuple(operators),
        states,
        matrices,
        observables,
        tuple(contexts),
        tuple(circuits),
        tuple(directives),
    )
    _check_references(sf, p)
    return sf


def _bad_constant(name: str):
    raise ParseError(f"{name} is not a valid number in scenario files")


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(e) for e in v)
    if isinstance(v, dict):
        return tuple(sorted((k, _freeze(e)) for k, e in v.items()))
    return v


def _thaw(v):
    if isinstance(v, tuple):
        if v and all(isinstance(e, tuple) and len(e) == 2 and isinstance(e[0], str) for e in v):
            return {k: _thaw(e) for k, e in v}
        return [_thaw(e) for e in v]
    return v


def _parse_gate(p: _Parser, g, where: str, anchor: str) -> GateDef:
    g = p.obj(g, where, anchor)
    kind = p.string(g.get("kind"), f"{where} kind", anchor)
    label = p.string(g.get("label", ""), f"{where} label", anchor)
    pairing = g.get("pairing")
    if pairing is not None:
        pairing = p.string(pairing, f"{where} pairing", anchor)
    when = None
    if "when" in g:
        w = g["when"]
        if not (isinstance(w, list) and len(w) == 2):
            raise p.fail(f"{where}: 'when' must be [measurement-label, outcome]", anchor)
        when = (p.string(w[0], f"{where} when", anchor), p.number(w[1], f"{where} when", anchor))
    if kind == "unitary":
        if "matrix" not in g:
            raise p.fail(f"{where}: unitary gate needs 'matrix'", anchor)
        return GateDef(kind, label, matrix=p.ref_or_matrix(g["matrix"], where, anchor), when=when)
    if kind == "local":
        if "left" not in g or "right" not in g:
            raise p.fail(f"{where}: local gate needs 'left' and 'right'", anchor)
        return GateDef(
            kind,
            label,
            left=p.ref_or_matrix(g["left"], where, anchor),
            right=p.ref_or_matrix(g["right"], where, anchor),
            pairing=pairing,
            when=when,
        )
    if kind == "measure":
        if "observable" in g:
            return GateDef(kind, label, matrix=p.ref_or_matrix(g["observable"], where, anchor))
        if "left" in g and "right" in g:
            return GateDef(
                kind,
                label,
                left=p.ref_or_matrix(g["left"], where, anchor),
                right=p.ref_or_matrix(g["right"], where, anchor),
                pairing=pairing,
            )
        raise p.fail(f"{where}: measurement needs 'observable' or 'left'/'right'", anchor)
    raise p.fail(f"{where}: unknown gate kind {kind!r}", anchor)


def _check_references(sf: ScenarioFile, p: _Parser):
    ops = {o.label for o in sf.operators}
    states = {n for n, _ in sf.states}
    mats = {n for n, _ in sf.matrices} | {n for n, _ in sf.observables}
    ctxs = {c.name for c in sf.contexts}
    circuits = {c.name for c in sf.circuits}
    names = [o.label for o in sf.operators] + [n for n, _ in sf.states] + [n for n, _ in sf.matrices]
    names += [n for n, _ in sf.observables] + [c.name for c in sf.contexts] + [c.name for c in sf.circuits]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise p.fail(f"labels defined more than once: {sorted(dup)}", sorted(dup)[0])

    def need(label, pool, what, where):
        if label not in pool:
            raise ResolutionError(f"{where}: unknown {what} {label!r}")

    for c in sf.contexts:
        for ref in (c.t12, c.t13, c.t23):
            need(ref, ops, "operator", f"context {c.name!r}")
    for c in sf.circuits:
        need(c.context, ops | ctxs, "operator or context", f"circuit {c.name!r}")
        if isinstance(c.initial, str):
            need(c.initial, states, "state", f"circuit {c.name!r}")
        for g in c.gates:
            for m in (g.matrix, g.left, g.right):
                if isinstance(m, str):
                    need(m, mats, "matrix", f"circuit {c.name!r} gate {g.label!r}")

    # directives may refer to results registered by earlier directives via "as"
    produced_states, produced_circuits = set(), set()
    for k, d in enumerate(sf.directives):
        where = f"directive {k} ({d.cmd})"
        if d.cmd in ("verify", "schmidt", "factorize", "transform"):
            need(d.arg("op"), ops, "operator", where)
        if d.cmd == "schmidt":
            need(d.arg("state"), states | produced_states, "state", where)
        if d.cmd == "factorize":
            need(d.arg("target"), states | mats | produced_states, "state or matrix", where)
        if d.cmd in ("run", "transform"):
            need(d.arg("circuit"), circuits | produced_circuits, "circuit", where)
        if d.cmd == "run" and d.arg("as"):
            produced_states.add(d.arg("as"))
        if d.cmd == "transform" and d.arg("as"):
            produced_circuits.add(d.arg("as"))


# -- serialization -----------------------------------------------------------


def _cx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _ser_vec(v: Vector) -> list:
    return [_cx(z) for z in v]


def _ser_mat(m: Matrix) -> list:
    return [_ser_vec(r) for r in m]


def _ser_ref(m):
    return m if isinstance(m, str) else _ser_mat(m)


def to_json_obj(sf: ScenarioFile) -> dict:
    out: dict[str, Any] = {"version": sf.version}
    if sf.notes:
        out["notes"] = sf.notes
    if sf.operators:
        out["operators"] = {o.label: {"d1": o.d1, "d2": o.d2, "twist": _ser_mat(o.twist)} for o in sf.operators}
    if sf.states:
        out["states"] = {n: _ser_vec(v) for n, v in sf.states}
    if sf.matrices:
        out["matrices"] = {n: _ser_mat(m) for n, m in sf.matrices}
    if sf.observables:
        out["observables"] = {n: _ser_mat(m) for n, m in sf.observables}
    if sf.contexts:
        out["contexts"] = {c.name: {"kind": c.kind, "t12": c.t12, "t13": c.t13, "t23": c.t23} for c in sf.contexts}
    if sf.circuits:
        circs = {}
        for c in sf.circuits:
            gates = []
            for g in c.gates:
                d: dict[str, Any] = {"kind": g.kind}
                if g.label:
                    d["label"] = g.label
                if g.matrix is not None:
                    d["observable" if g.kind == "measure" else "matrix"] = _ser_ref(g.matrix)
                if g.left is not None:
                    d["left"] = _ser_ref(g.left)
                    d["right"] = _ser_ref(g.right)
                if g.pairing is not None:
                    d["pairing"] = g.pairing
                if g.when is not None:
                    d["when"] = [g.when[0], g.when[1]]
                gates.append(d)
            body = {
                "context": c.context,
                "initial": c.initial if isinstance(c.initial, str) else _ser_vec(c.initial),
                "gates": gates,
            }
            if c.parts != ("Q1", "Q2"):
                body["parts"] = list(c.parts)
            circs[c.name] = body
        out["circuits"] = circs
    if sf.directives:
        dirs = []
        for d in sf.directives:
            item = {"cmd": d.cmd, **{k: _thaw(v) for k, v in d.args}}
            if d.expect is not None:
                item["expect"] = {k: _thaw(v) for k, v in d.expect}
            dirs.append(item)
        out["directives"] = dirs
    return out


def serialize_scenario(sf: ScenarioFile) -> str:
    return json.dumps(to_json_obj(sf), indent=2) + "\n"


# -- resolution into live objects --------------------------------------------


def to_array(v) -> np.ndarray:
    return np.array(v, dtype=np.complex128)


def parse_vector_value(v) -> np.ndarray:
    """Vectors given as expected values inside directives."""
    return np.array([complex(e[0], e[1]) if isinstance(e, (tuple, list)) else complex(e) for e in v], dtype=np.complex128)


def parse_matrix_value(m) -> np.ndarray:
    return np.stack([parse_vector_value(r) for r in m])


@dataclass
class Workspace:
    scenario: ScenarioFile
    operators: dict[str, TensorProductOperator] = field(default_factory=dict)
    states: dict[str, np.ndarray] = field(default_factory=dict)
    matrices: dict[str, np.ndarray] = field(default_factory=dict)
    contexts: dict[str, MultipartiteContext] = field(default_factory=dict)
    circuits: dict[str, Circuit] = field(default_factory=dict)

    def matrix(self, ref) -> np.ndarray:
        return self.matrices[ref] if isinstance(ref, str) else to_array(ref)


def build(sf: ScenarioFile) -> Workspace:
    """Construct every definition.  Validation errors propagate as :class:`TensorCtxError`."""
    ws = Workspace(sf)
    for o in sf.operators:
        try:
            ws.operators[o.label] = TensorProductOperator(TensorType(o.d1, o.d2), to_array(o.twist), o.label)
        except TensorCtxError as exc:
            raise type(exc)(f"operator {o.label!r}: {exc}") from None
    for n, v in sf.states:
        ws.states[n] = to_array(v)
    for n, m in sf.matrices:
        ws.matrices[n] = to_array(m)
    for n, m in sf.observables:
        arr = to_array(m)
        if not is_hermitian(arr):
            from .errors import NotHermitian

            raise NotHermitian(f"observable {n!r} is not Hermitian")
        ws.matrices[n] = arr
    for c in sf.contexts:
        ws.contexts[c.name] = standard_context_3q(ws.operators[c.t12], ws.operators[c.t13], ws.operators[c.t23])
    for c in sf.circuits:
        ws.circuits[c.name] = build_circuit(c, ws)
    return ws


def build_circuit(c: CircuitDef, ws: Workspace) -> Circuit:
    ctx = ws.operators.get(c.context) or ws.contexts.get(c.context)
    initial = ws.states[c.initial] if isinstance(c.initial, str) else to_array(c.initial)
    gates = []
    for g in c.gates:
        try:
            gates.append(_build_gate(g, ctx, ws))
        except TensorCtxError as exc:
            raise type(exc)(f"circuit {c.name!r} gate {g.label!r}: {exc}") from None
    return Circuit(ctx, tuple(gates), initial, c.name, c.parts)


def _build_gate(g: GateDef, ctx, ws: Workspace) -> Gate:
    if isinstance(ctx, MultipartiteContext):
        if g.left is not None and g.pairing is None:
            raise DimensionMismatch("local gates in a multipartite context need a 'pairing'")
        host = ctx.pairing(g.pairing) if g.pairing is not None else None
        host_label = g.pairing or ""
    else:
        host, host_label = ctx, ctx.label
    if g.kind == "unitary":
        return Gate(UNITARY, ws.matrix(g.matrix), host_label, g.label, condition=g.when)
    if g.kind == "local":
        return Gate(UNITARY, host.lift(ws.matrix(g.left), ws.matrix(g.right)), host_label, g.label, condition=g.when)
    if g.matrix is not None:
        m = ws.matrix(g.matrix)
    else:
        m = host.lift(ws.matrix(g.left), ws.matrix(g.right))
    return Gate(MEASUREMENT, m, host_label, g.label, observable=observable_from(m))


def circuit_to_def(c: Circuit, name: str | None = None) -> CircuitDef:
    """Inline every gate matrix so the circuit stands alone in a scenario file."""
    if not c.is_bipartite:
        raise DimensionMismatch("only bipartite circuits can be written to scenario files")

    def mat(a) -> Matrix:
        return tuple(tuple(complex(z) for z in row) for row in np.asarray(a))

    gates = []
    for g in c.gates:
        kind = "unitary" if g.kind == UNITARY else "measure"
        gates.append(GateDef(kind, g.label, matrix=mat(g.matrix), when=g.condition))
    init = tuple(complex(z) for z in c.initial_state)
    return CircuitDef(name or c.name, c.context.label, init, tuple(gates), c.parts)


def operator_to_def(t: TensorProductOperator) -> OperatorDef:
    return OperatorDef(t.label, t.ttype.d1, t.ttype.d2, tuple(tuple(complex(z) for z in r) for r in t.twist))
