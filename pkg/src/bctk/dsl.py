"""A line-oriented netlist language for process diagrams.

Declarations introduce systems, states, effects and gates; a circuit is a
list of stages separated by ``;`` where each stage is a parallel row of
boxes separated by ``|``.  Two evaluators share the AST: one folds the
stages with the bilocal semantics, the other with the classical images of
every box.  Closed circuits produce scalars in both, and the pair of values
is the empirical-adequacy differ used throughout the test-suite.

Grammar (one construct per line, ``#`` comments)::

    system NAME = elem INT | NAME * NAME
    state NAME : SYSTEM = [NUM] LABEL (+ [NUM] LABEL)*
    effect NAME : SYSTEM = discard | [NUM] LABEL (+ [NUM] LABEL)*
    gate NAME : SYSTEM -> SYSTEM = BODY
    BODY = atomic TERM (+ TERM)* | id | swap A B | nu A B | nu_inv A B
         | rev P1,..,Pn B1,..,Bn
    TERM = ["atomic"] INT -> INT tau BIT w NUM
    circuit NAME = BOX (| BOX)* (; BOX (| BOX)*)*
    eval NAME

Labels use 1-based indices with explicit section bits: ``(2)``,
``((1,2);0)``, ``(((1,2);0,3);1)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import bct, classical, ontic
from .bct import Effect, State, Transformation
from .scalars import number_json
from .systems import PureLabel, SystemShape, flatten_label


@dataclass(frozen=True)
class SourceSpan:
    line: int
    col: int
    end_col: int

    def to_json(self) -> dict:
        return {"line": self.line, "col": self.col, "end_col": self.end_col}


@dataclass(frozen=True)
class Diagnostic:
    span: SourceSpan
    message: str

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.col}: {self.message}"

    def to_json(self) -> dict:
        return {"span": self.span.to_json(), "message": self.message}


class DslError(Exception):
    """Raised when parsing or checking fails; carries every diagnostic."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


# ---------------------------------------------------------------------------
# tokens
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<comment>#.*)|(?P<arrow>->)|(?P<number>\d+/\d+|\d+\.\d+|\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[()\[\],;:=+*|]))"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


def _tokenize_line(line: str, lineno: int) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            stripped = line[pos:].strip()
            if not stripped:
                break
            raise DslError(
                [Diagnostic(SourceSpan(lineno, pos + 1, pos + 2),
                            f"unexpected character {line[pos]!r}")]
            )
        pos = m.end()
        if m.lastgroup == "comment":
            break
        if m.lastgroup is None:
            continue
        text = m.group(m.lastgroup)
        span = SourceSpan(lineno, m.start(m.lastgroup) + 1, m.end(m.lastgroup) + 1)
        tokens.append(Token(m.lastgroup, text, span))
    return tokens


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SystemDecl:
    name: str
    elem: int | None
    parts: tuple[str, str] | None
    span: SourceSpan


@dataclass(frozen=True)
class VectorTerm:
    weight: object
    label: PureLabel
    span: SourceSpan


@dataclass(frozen=True)
class StateDecl:
    name: str
    system: str
    terms: tuple
    span: SourceSpan


@dataclass(frozen=True)
class EffectDecl:
    name: str
    system: str
    terms: tuple | None  # None means the deterministic effect
    span: SourceSpan


@dataclass(frozen=True)
class AtomicTermSyntax:
    src: int
    dst: int
    flip: int
    weight: object
    span: SourceSpan


@dataclass(frozen=True)
class GateBody:
    kind: str  # atomic | id | swap | nu | nu_inv | rev
    terms: tuple = ()
    args: tuple = ()
    perm: tuple = ()
    bits: tuple = ()


@dataclass(frozen=True)
class GateDecl:
    name: str
    in_system: str
    out_system: str
    body: GateBody
    span: SourceSpan


@dataclass(frozen=True)
class BoxRef:
    name: str
    span: SourceSpan


@dataclass(frozen=True)
class CircuitDecl:
    name: str
    stages: tuple  # tuple of tuples of BoxRef
    span: SourceSpan


@dataclass(frozen=True)
class EvalDirective:
    name: str
    span: SourceSpan


@dataclass
class CircuitAst:
    """Checked program: resolved shapes plus the declarations in file order."""

    decls: list = field(default_factory=list)
    shapes: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)
    effects: dict = field(default_factory=dict)
    gates: dict = field(default_factory=dict)
    circuits: dict = field(default_factory=dict)
    evals: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _LineParser:
    def __init__(self, tokens: list[Token], lineno: int):
        self.tokens = tokens
        self.lineno = lineno
        self.pos = 0

    def _here(self) -> SourceSpan:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos].span
        if self.tokens:
            last = self.tokens[-1].span
            return SourceSpan(self.lineno, last.end_col, last.end_col + 1)
        return SourceSpan(self.lineno, 1, 2)

    def fail(self, message: str):
        raise DslError([Diagnostic(self._here(), message)])

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "punct" and tok.text == text

    def take(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            got = tok.text if tok else "end of line"
            self.fail(f"expected {want!r}, got {got!r}")
        self.pos += 1
        return tok

    def take_int(self) -> int:
        tok = self.take("number")
        if "/" in tok.text or "." in tok.text:
            self.fail(f"expected an integer, got {tok.text!r}")
        return int(tok.text)

    def take_number(self):
        tok = self.take("number")
        if "/" in tok.text:
            num, den = tok.text.split("/")
            return Fraction(int(num), int(den))
        if "." in tok.text:
            return Fraction(tok.text)
        return Fraction(int(tok.text))

    def done(self) -> None:
        tok = self.peek()
        if tok is not None:
            self.fail(f"trailing input {tok.text!r}")

    # -- labels ------------------------------------------------------------

    def parse_label(self) -> tuple[PureLabel, SourceSpan]:
        start = self.take("punct", "(").span
        tree = self._parse_label_item()
        end = self.take("punct", ")").span
        indices, sections = tree
        return (
            PureLabel(tuple(indices), tuple(sections)),
            SourceSpan(start.line, start.col, end.end_col),
        )

    def _parse_label_item(self):
        if self.at_punct("("):
            self.take("punct", "(")
            left = self._parse_label_item()
            self.take("punct", ",")
            idx = self.take_int()
            self.take("punct", ")")
            self.take("punct", ";")
            bit = self.take_int()
            if bit not in (0, 1):
                self.fail("section bit must be 0 or 1")
            indices, sections = left
            return indices + [idx], sections + [bit]
        idx = self.take_int()
        return [idx], []

    # -- vector terms --------------------------------------------------------

    def parse_vector_terms(self) -> tuple:
        terms = []
        while True:
            tok = self.peek()
            if tok is None:
                self.fail("expected a weighted label")
            if tok.kind == "number":
                weight = self.take_number()
            else:
                weight = Fraction(1)
            label, span = self.parse_label()
            terms.append(VectorTerm(weight, label, span))
            if self.at_punct("+"):
                self.take("punct", "+")
                continue
            break
        return tuple(terms)

    def parse_int_list(self) -> tuple[int, ...]:
        vals = [self.take_int()]
        while self.at_punct(","):
            self.take("punct", ",")
            vals.append(self.take_int())
        return tuple(vals)


def _parse_gate_body(p: _LineParser) -> GateBody:
    tok = p.peek()
    if tok is None:
        p.fail("expected a gate body")
    if tok.kind == "ident" and tok.text == "id":
        p.take("ident", "id")
        return GateBody(kind="id")
    if tok.kind == "ident" and tok.text in ("swap", "nu", "nu_inv"):
        kind = p.take("ident").text
        a = p.take("ident").text
        b = p.take("ident").text
        return GateBody(kind=kind, args=(a, b))
    if tok.kind == "ident" and tok.text == "rev":
        p.take("ident", "rev")
        perm = p.parse_int_list()
        bits = p.parse_int_list()
        return GateBody(kind="rev", perm=perm, bits=bits)
    if tok.kind == "ident" and tok.text == "atomic":
        terms = []
        while True:
            if p.peek() is not None and p.peek().kind == "ident" and p.peek().text == "atomic":
                p.take("ident", "atomic")
            start = p._here()
            src = p.take_int()
            p.take("arrow")
            dst = p.take_int()
            p.take("ident", "tau")
            flip = p.take_int()
            p.take("ident", "w")
            weight = p.take_number()
            terms.append(AtomicTermSyntax(src, dst, flip, weight, start))
            if p.at_punct("+"):
                p.take("punct", "+")
                continue
            break
        return GateBody(kind="atomic", terms=tuple(terms))
    p.fail(f"unknown gate body starting at {tok.text!r}")


def _parse_line(tokens: list[Token], lineno: int):
    p = _LineParser(tokens, lineno)
    head = p.take("ident")
    if head.text == "system":
        name = p.take("ident").text
        p.take("punct", "=")
        if p.peek() is not None and p.peek().kind == "ident" and p.peek().text == "elem":
            p.take("ident", "elem")
            dim = p.take_int()
            p.done()
            return SystemDecl(name, elem=dim, parts=None, span=head.span)
        left = p.take("ident").text
        p.take("punct", "*")
        right = p.take("ident").text
        p.done()
        return SystemDecl(name, elem=None, parts=(left, right), span=head.span)
    if head.text == "state":
        name = p.take("ident").text
        p.take("punct", ":")
        system = p.take("ident").text
        p.take("punct", "=")
        terms = p.parse_vector_terms()
        p.done()
        return StateDecl(name, system, terms, head.span)
    if head.text == "effect":
        name = p.take("ident").text
        p.take("punct", ":")
        system = p.take("ident").text
        p.take("punct", "=")
        tok = p.peek()
        if tok is not None and tok.kind == "ident" and tok.text == "discard":
            p.take("ident", "discard")
            p.done()
            return EffectDecl(name, system, terms=None, span=head.span)
        terms = p.parse_vector_terms()
        p.done()
        return EffectDecl(name, system, terms, head.span)
    if head.text == "gate":
        name = p.take("ident").text
        p.take("punct", ":")
        in_system = p.take("ident").text
        p.take("arrow")
        out_system = p.take("ident").text
        p.take("punct", "=")
        body = _parse_gate_body(p)
        p.done()
        return GateDecl(name, in_system, out_system, body, head.span)
    if head.text == "circuit":
        name = p.take("ident").text
        p.take("punct", "=")
        stages = []
        while True:
            boxes = []
            tok = p.take("ident")
            boxes.append(BoxRef(tok.text, tok.span))
            while p.at_punct("|"):
                p.take("punct", "|")
                tok = p.take("ident")
                boxes.append(BoxRef(tok.text, tok.span))
            stages.append(tuple(boxes))
            if p.at_punct(";"):
                p.take("punct", ";")
                continue
            break
        p.done()
        return CircuitDecl(name, tuple(stages), head.span)
    if head.text == "eval":
        name = p.take("ident").text
        p.done()
        return EvalDirective(name, head.span)
    p.fail(f"unknown declaration {head.text!r}")


# ---------------------------------------------------------------------------
# checking
# ---------------------------------------------------------------------------


def _vector_weights(shape: SystemShape, terms, diags, kind: str):
    weights = [Fraction(0)] * shape.global_dim
    for term in terms:
        try:
            q = flatten_label(shape, term.label)
        except ValueError as exc:
            diags.append(Diagnostic(term.span, f"{kind} label does not fit system: {exc}"))
            continue
        weights[q - 1] += term.weight
    return tuple(weights)


def _build_gate(decl: GateDecl, shapes: dict, diags) -> Transformation | None:
    in_shape = shapes[decl.in_system]
    out_shape = shapes[decl.out_system]
    body = decl.body
    try:
        if body.kind == "id":
            if in_shape != out_shape:
                raise ValueError("identity gates need equal input and output systems")
            return bct.identity(in_shape)
        if body.kind in ("swap", "nu", "nu_inv"):
            a, b = body.args
            if a not in shapes or b not in shapes:
                missing = a if a not in shapes else b
                raise ValueError(f"unknown system {missing!r}")
            if body.kind == "swap":
                built = bct.swap(shapes[a], shapes[b])
            elif body.kind == "nu":
                built = bct.fuse_map(shapes[a], shapes[b])
            else:
                built = bct.unfuse_map(shapes[a], shapes[b])
            if built.in_shape != in_shape or built.out_shape != out_shape:
                raise ValueError(
                    f"{body.kind} has type {built.in_shape} -> {built.out_shape}, "
                    f"declared {in_shape} -> {out_shape}"
                )
            return built
        if body.kind == "rev":
            if in_shape != out_shape:
                raise ValueError("reversible gates need equal input and output systems")
            spec = bct.ReversibleSpec(body.perm, body.bits)
            return bct.reversible(in_shape, spec)
        coeffs: dict = {}
        for term in body.terms:
            key = (term.src, term.dst, term.flip)
            coeffs[key] = coeffs.get(key, 0) + term.weight
        return Transformation(in_shape, out_shape, coeffs)
    except ValueError as exc:
        diags.append(Diagnostic(decl.span, f"gate {decl.name!r}: {exc}"))
        return None


_KINDS = {"state": "state", "gate": "gate", "effect": "effect"}


def _check_circuit(decl: CircuitDecl, ast: CircuitAst, diags) -> bool:
    current: SystemShape | None = None
    ok = True
    for stage_no, stage in enumerate(decl.stages, start=1):
        kinds = set()
        in_shape = SystemShape(())
        out_shape = SystemShape(())
        for box in stage:
            if box.name in ast.states:
                kinds.add("state")
                out_shape = out_shape.compose(ast.states[box.name].shape)
            elif box.name in ast.effects:
                kinds.add("effect")
                in_shape = in_shape.compose(ast.effects[box.name].shape)
            elif box.name in ast.gates:
                kinds.add("gate")
                in_shape = in_shape.compose(ast.gates[box.name].in_shape)
                out_shape = out_shape.compose(ast.gates[box.name].out_shape)
            else:
                diags.append(Diagnostic(box.span, f"unknown box {box.name!r}"))
                return False
        if len(kinds) > 1:
            diags.append(
                Diagnostic(
                    decl.span,
                    f"stage {stage_no} of circuit {decl.name!r} mixes "
                    f"{'/'.join(sorted(kinds))} boxes",
                )
            )
            return False
        if current is not None and current != in_shape:
            diags.append(
                Diagnostic(
                    decl.span,
                    f"shape error at stage {stage_no} of circuit {decl.name!r}: "
                    f"expected input {current}, stage takes {in_shape}",
                )
            )
            return False
        if current is None and not in_shape.is_trivial:
            # open input wire: the circuit value is a transformation or effect
            pass
        current = out_shape
    return ok


def parse(text: str) -> CircuitAst:
    """Parse and check a program; raises :class:`DslError` with diagnostics."""
    diags: list[Diagnostic] = []
    decls = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            tokens = _tokenize_line(line, lineno)
            if not tokens:
                continue
            decls.append(_parse_line(tokens, lineno))
        except DslError as exc:
            diags.extend(exc.diagnostics)
    if diags:
        raise DslError(diags)
    if not decls:
        raise DslError([Diagnostic(SourceSpan(1, 1, 2), "empty program")])

    ast = CircuitAst(decls=decls)
    names: set[str] = set()
    for decl in decls:
        if isinstance(decl, EvalDirective):
            continue
        if decl.name in names:
            diags.append(Diagnostic(decl.span, f"duplicate name {decl.name!r}"))
            continue
        names.add(decl.name)
        if isinstance(decl, SystemDecl):
            if decl.elem is not None:
                if decl.elem < 2:
                    diags.append(
                        Diagnostic(decl.span, "elementary systems need dimension >= 2")
                    )
                    continue
                ast.shapes[decl.name] = SystemShape((decl.elem,))
            else:
                left, right = decl.parts
                if left not in ast.shapes or right not in ast.shapes:
                    missing = left if left not in ast.shapes else right
                    diags.append(Diagnostic(decl.span, f"unknown system {missing!r}"))
                    continue
                ast.shapes[decl.name] = ast.shapes[left].compose(ast.shapes[right])
        elif isinstance(decl, StateDecl):
            if decl.system not in ast.shapes:
                diags.append(Diagnostic(decl.span, f"unknown system {decl.system!r}"))
                continue
            shape = ast.shapes[decl.system]
            weights = _vector_weights(shape, decl.terms, diags, "state")
            try:
                ast.states[decl.name] = State(shape, weights)
            except ValueError as exc:
                diags.append(Diagnostic(decl.span, f"state {decl.name!r}: {exc}"))
        elif isinstance(decl, EffectDecl):
            if decl.system not in ast.shapes:
                diags.append(Diagnostic(decl.span, f"unknown system {decl.system!r}"))
                continue
            shape = ast.shapes[decl.system]
            if decl.terms is None:
                ast.effects[decl.name] = bct.deterministic_effect(shape)
            else:
                weights = _vector_weights(shape, decl.terms, diags, "effect")
                try:
                    ast.effects[decl.name] = Effect(shape, weights)
                except ValueError as exc:
                    diags.append(Diagnostic(decl.span, f"effect {decl.name!r}: {exc}"))
        elif isinstance(decl, GateDecl):
            if decl.in_system not in ast.shapes or decl.out_system not in ast.shapes:
                missing = (
                    decl.in_system if decl.in_system not in ast.shapes else decl.out_system
                )
                diags.append(Diagnostic(decl.span, f"unknown system {missing!r}"))
                continue
            gate = _build_gate(decl, ast.shapes, diags)
            if gate is not None:
                ast.gates[decl.name] = gate
    if diags:
        raise DslError(diags)

    for decl in decls:
        if isinstance(decl, CircuitDecl):
            if decl.name in ast.circuits:
                continue
            if _check_circuit(decl, ast, diags):
                ast.circuits[decl.name] = decl
        elif isinstance(decl, EvalDirective):
            ast.evals.append(decl)
    for directive in ast.evals:
        if directive.name not in ast.circuits and directive.name not in ast.gates:
            diags.append(
                Diagnostic(directive.span, f"eval of unknown name {directive.name!r}")
            )
    if diags:
        raise DslError(diags)
    return ast


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _stage_kind(stage, ast: CircuitAst) -> str:
    name = stage[0].name
    if name in ast.states:
        return "state"
    if name in ast.effects:
        return "effect"
    return "gate"


def eval_bct(ast: CircuitAst, name: str):
    """Fold a circuit with the bilocal semantics.

    Returns a scalar for closed circuits, a :class:`State`, an
    :class:`Effect`, or a :class:`Transformation` for open ones.
    """
    if name in ast.gates:
        return ast.gates[name]
    if name in ast.states:
        return ast.states[name]
    if name in ast.effects:
        return ast.effects[name]
    if name not in ast.circuits:
        raise KeyError(f"unknown circuit {name!r}")
    decl = ast.circuits[name]
    value = None
    for stage in decl.stages:
        kind = _stage_kind(stage, ast)
        if kind == "state":
            row: object = ast.states[stage[0].name]
            for box in stage[1:]:
                row = bct.par_states(row, ast.states[box.name])
            value = row if value is None else _bct_absorb_scalar(value, row)
        elif kind == "gate":
            gate = ast.gates[stage[0].name]
            for box in stage[1:]:
                gate = bct.compose_par(gate, ast.gates[box.name])
            if value is None:
                value = gate
            elif isinstance(value, State):
                value = bct.apply(gate, value)
            elif isinstance(value, Transformation):
                value = bct.compose_seq(value, gate)
            else:
                raise ValueError(f"cannot feed a {type(value).__name__} into a gate stage")
        else:
            eff: object = ast.effects[stage[0].name]
            for box in stage[1:]:
                eff = bct.par_effects(eff, ast.effects[box.name])
            if value is None:
                value = eff
            elif isinstance(value, State):
                value = bct.pair(eff, value)
            elif isinstance(value, Transformation):
                value = bct.pull(eff, value)
            else:
                raise ValueError(f"cannot feed a {type(value).__name__} into an effect stage")
    return value


def _bct_absorb_scalar(value, row):
    if isinstance(value, (int, Fraction, float)):
        return row.scale(value)
    raise ValueError("state stages must open a circuit")


def eval_ontic(ast: CircuitAst, name: str):
    """Fold the same circuit entirely inside classical theory."""
    if name in ast.gates:
        return ontic.ontic_map(ast.gates[name])
    if name in ast.states:
        return ontic.ontic_state(ast.states[name])
    if name in ast.effects:
        return ontic.ontic_effect(ast.effects[name])
    if name not in ast.circuits:
        raise KeyError(f"unknown circuit {name!r}")
    decl = ast.circuits[name]
    value: classical.ClassicalMap | None = None
    for stage in decl.stages:
        kind = _stage_kind(stage, ast)
        if kind == "state":
            images = [ontic.ontic_state(ast.states[b.name]) for b in stage]
        elif kind == "gate":
            images = [ontic.ontic_map(ast.gates[b.name]) for b in stage]
        else:
            images = [ontic.ontic_effect(ast.effects[b.name]) for b in stage]
        block = images[0]
        for img in images[1:]:
            block = classical.compose_par(block, img)
        value = block if value is None else classical.compose_seq(value, block)
    if value is not None and value.is_scalar:
        return value.scalar_value()
    return value


# ---------------------------------------------------------------------------
# pretty printing
# ---------------------------------------------------------------------------


def _number_str(x) -> str:
    f = Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def _label_str(label: PureLabel) -> str:
    core = str(label.indices[0])
    for idx, bit in zip(label.indices[1:], label.sections):
        core = f"({core},{idx});{bit}"
    return f"({core})"


def _terms_str(terms) -> str:
    parts = []
    for term in terms:
        prefix = "" if term.weight == 1 else _number_str(term.weight) + " "
        parts.append(prefix + _label_str(term.label))
    return " + ".join(parts)


def pretty(ast: CircuitAst) -> str:
    """Render a checked program back to canonical source text."""
    lines = []
    for decl in ast.decls:
        if isinstance(decl, SystemDecl):
            if decl.elem is not None:
                lines.append(f"system {decl.name} = elem {decl.elem}")
            else:
                lines.append(f"system {decl.name} = {decl.parts[0]} * {decl.parts[1]}")
        elif isinstance(decl, StateDecl):
            lines.append(f"state {decl.name} : {decl.system} = {_terms_str(decl.terms)}")
        elif isinstance(decl, EffectDecl):
            if decl.terms is None:
                lines.append(f"effect {decl.name} : {decl.system} = discard")
            else:
                lines.append(
                    f"effect {decl.name} : {decl.system} = {_terms_str(decl.terms)}"
                )
        elif isinstance(decl, GateDecl):
            body = decl.body
            if body.kind == "id":
                rhs = "id"
            elif body.kind in ("swap", "nu", "nu_inv"):
                rhs = f"{body.kind} {body.args[0]} {body.args[1]}"
            elif body.kind == "rev":
                rhs = (
                    "rev "
                    + ",".join(str(v) for v in body.perm)
                    + " "
                    + ",".join(str(v) for v in body.bits)
                )
            else:
                rhs = " + ".join(
                    f"atomic {t.src} -> {t.dst} tau {t.flip} w {_number_str(t.weight)}"
                    for t in body.terms
                )
            lines.append(
                f"gate {decl.name} : {decl.in_system} -> {decl.out_system} = {rhs}"
            )
        elif isinstance(decl, CircuitDecl):
            stages = " ; ".join(
                " | ".join(box.name for box in stage) for stage in decl.stages
            )
            lines.append(f"circuit {decl.name} = {stages}")
        elif isinstance(decl, EvalDirective):
            lines.append(f"eval {decl.name}")
    return "\n".join(lines) + "\n"


def eval_to_json(value) -> object:
    """JSON form of an evaluation result from either backend."""
    if isinstance(value, (int, Fraction, float)):
        return number_json(value)
    if isinstance(value, State):
        return {"shape": list(value.shape.elems), "weights": [number_json(w) for w in value.weights]}
    if isinstance(value, Effect):
        return {"shape": list(value.shape.elems), "weights": [number_json(w) for w in value.weights]}
    if isinstance(value, Transformation):
        return value.to_json()
    if isinstance(value, classical.ClassicalMap):
        return value.to_json()
    raise TypeError(f"cannot serialise {type(value).__name__}")
