"""Bilocal classical theory: states, effects and transformations.

A transformation from a non-trivial system to a non-trivial system is a
unique conical combination of normalised atomic generators.  A generator
``(src, dst, flip)`` maps the pure state ``src`` to ``dst`` and, when acting
next to an ancilla, shifts the pairing section bit by ``flip``.  The
coefficient map is stored sparsely; validity means nonnegative weights with
per-input sums at most one (exactly one for channels), which is precisely
substochasticity of the image under the ontological model.

Composite systems are handled through canonical left-nested labels; partial
application, swaps and parallel composition are all label arithmetic via
:func:`bctk.systems.pair_label`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import HALF, number_from_json, number_json
from .systems import (
    SystemShape,
    TRIVIAL,
    as_label,
    flatten_label,
    pair_label,
    q_decode,
    q_encode,
)

_FLOAT_SLACK = 1e-9


def _slack(values) -> float:
    return _FLOAT_SLACK if any(isinstance(v, float) for v in values) else 0


# ---------------------------------------------------------------------------
# states and effects
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class State:
    """A subnormalised weight vector over the pure states of a shape."""

    shape: SystemShape
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if len(self.weights) != self.shape.global_dim:
            raise ValueError(
                f"state on {self.shape} needs {self.shape.global_dim} weights, "
                f"got {len(self.weights)}"
            )
        tol = _slack(self.weights)
        if any(w < -tol for w in self.weights):
            raise ValueError("state weights must be nonnegative")
        if sum(self.weights, 0) > 1 + tol:
            raise ValueError("state weights must sum to at most 1")

    @property
    def total(self):
        return sum(self.weights, 0)

    def is_deterministic(self, tol=0) -> bool:
        if tol:
            return abs(self.total - 1) <= tol
        return self.total == 1

    def scale(self, p) -> "State":
        return State(self.shape, tuple(p * w for w in self.weights))

    def nonzero(self):
        for q, w in enumerate(self.weights, start=1):
            if w != 0:
                yield q, w


@dataclass(frozen=True)
class Effect:
    """A response covector: entries in [0, 1] over the pure effects of a shape."""

    shape: SystemShape
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if len(self.weights) != self.shape.global_dim:
            raise ValueError(
                f"effect on {self.shape} needs {self.shape.global_dim} weights, "
                f"got {len(self.weights)}"
            )
        tol = _slack(self.weights)
        if any(w < -tol or w > 1 + tol for w in self.weights):
            raise ValueError("effect weights must lie in [0, 1]")

    def scale(self, p) -> "Effect":
        return Effect(self.shape, tuple(p * w for w in self.weights))

    def nonzero(self):
        for q, w in enumerate(self.weights, start=1):
            if w != 0:
                yield q, w


def pure_state(shape: SystemShape, label) -> State:
    q = flatten_label(shape, as_label(label))
    return State(shape, tuple(1 if i == q else 0 for i in range(1, shape.global_dim + 1)))


def pure_effect(shape: SystemShape, label) -> Effect:
    q = flatten_label(shape, as_label(label))
    return Effect(shape, tuple(1 if i == q else 0 for i in range(1, shape.global_dim + 1)))


def deterministic_effect(shape: SystemShape) -> Effect:
    """The unique deterministic effect: the all-ones covector."""
    return Effect(shape, (1,) * shape.global_dim)


def uniform_state(shape: SystemShape) -> State:
    n = shape.global_dim
    return State(shape, (Fraction(1, n),) * n)


def pair(e: Effect, rho: State):
    """The probability ``(e|rho)``."""
    if e.shape != rho.shape:
        raise ValueError(f"effect on {e.shape} cannot meet state on {rho.shape}")
    return sum((a * b for a, b in zip(e.weights, rho.weights)), 0)


def par_states(r1: State, r2: State) -> State:
    """Parallel composition: pure x pure spreads over both section bits with 1/2."""
    if r1.shape.is_trivial:
        return r2.scale(r1.weights[0])
    if r2.shape.is_trivial:
        return r1.scale(r2.weights[0])
    shape = r1.shape.compose(r2.shape)
    out = [0] * shape.global_dim
    for q1, w1 in r1.nonzero():
        for q2, w2 in r2.nonzero():
            w = HALF * w1 * w2
            for s in (0, 1):
                out[pair_label(r1.shape, r2.shape, q1, q2, s) - 1] += w
    return State(shape, tuple(out))


def par_effects(a: Effect, b: Effect) -> Effect:
    """Parallel composition of effects: no 1/2, forced by pairing consistency."""
    if a.shape.is_trivial:
        return b.scale(a.weights[0])
    if b.shape.is_trivial:
        return a.scale(b.weights[0])
    shape = a.shape.compose(b.shape)
    out = [0] * shape.global_dim
    for q1, w1 in a.nonzero():
        for q2, w2 in b.nonzero():
            w = w1 * w2
            for s in (0, 1):
                out[pair_label(a.shape, b.shape, q1, q2, s) - 1] += w
    return Effect(shape, tuple(out))


# ---------------------------------------------------------------------------
# transformations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AtomicTerm:
    """One normalised atomic generator with its conical weight."""

    src: int
    dst: int
    flip: int
    weight: object = 1


class Transformation:
    """A conical combination of normalised atomic generators.

    ``coeffs`` maps ``(src, dst, flip)`` to a nonnegative weight; zero weights
    are pruned so two transformations are equal exactly when their coefficient
    maps are (the uniqueness of the conical decomposition).
    """

    __slots__ = ("in_shape", "out_shape", "coeffs", "_row_sums")

    def __init__(self, in_shape: SystemShape, out_shape: SystemShape, coeffs: dict):
        if in_shape.is_trivial or out_shape.is_trivial:
            raise ValueError("transformations need non-trivial input and output systems")
        n_in, n_out = in_shape.global_dim, out_shape.global_dim
        pruned: dict = {}
        row: dict = {}
        tol = _slack(coeffs.values())
        for (src, dst, flip), w in coeffs.items():
            if not 1 <= src <= n_in:
                raise ValueError(f"input label {src} out of range [1..{n_in}]")
            if not 1 <= dst <= n_out:
                raise ValueError(f"output label {dst} out of range [1..{n_out}]")
            if flip not in (0, 1):
                raise ValueError("section-bit shift must be 0 or 1")
            if w < -tol:
                raise ValueError("conical coefficients must be nonnegative")
            if w != 0:
                pruned[(src, dst, flip)] = w
                row[src] = row.get(src, 0) + w
        for src, total in row.items():
            if total > 1 + tol:
                raise ValueError(
                    f"coefficients for input {src} sum to {total} > 1 (not substochastic)"
                )
        self.in_shape = in_shape
        self.out_shape = out_shape
        self.coeffs = pruned
        self._row_sums = row

    def __eq__(self, other) -> bool:
        if not isinstance(other, Transformation):
            return NotImplemented
        return (
            self.in_shape == other.in_shape
            and self.out_shape == other.out_shape
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.in_shape, self.out_shape, tuple(sorted(self.coeffs.items()))))

    def __repr__(self) -> str:
        return (
            f"Transformation({self.in_shape} -> {self.out_shape}, "
            f"{len(self.coeffs)} terms)"
        )

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def row_sum(self, src: int):
        return self._row_sums.get(src, 0)

    def is_valid(self, tol=0) -> bool:
        return all(total <= 1 + tol for total in self._row_sums.values())

    def is_channel(self, tol=0) -> bool:
        """Deterministic iff every input's coefficients sum to exactly one."""
        if len(self._row_sums) != self.in_shape.global_dim:
            return False
        if tol:
            return all(abs(s - 1) <= tol for s in self._row_sums.values())
        return all(s == 1 for s in self._row_sums.values())

    def scale(self, p) -> "Transformation":
        return Transformation(
            self.in_shape, self.out_shape, {k: p * w for k, w in self.coeffs.items()}
        )

    def add(self, other: "Transformation") -> "Transformation":
        if self.in_shape != other.in_shape or self.out_shape != other.out_shape:
            raise ValueError("can only add transformations of equal shape")
        merged = dict(self.coeffs)
        for k, w in other.coeffs.items():
            merged[k] = merged.get(k, 0) + w
        return Transformation(self.in_shape, self.out_shape, merged)

    def to_json(self) -> dict:
        return {
            "in": list(self.in_shape.elems),
            "out": list(self.out_shape.elems),
            "terms": [
                {"i0": src, "l": dst, "tau": flip, "w": number_json(w)}
                for (src, dst, flip), w in sorted(self.coeffs.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Transformation":
        coeffs = {
            (t["i0"], t["l"], t["tau"]): number_from_json(t["w"]) for t in data["terms"]
        }
        return cls(SystemShape(tuple(data["in"])), SystemShape(tuple(data["out"])), coeffs)


def zero(in_shape: SystemShape, out_shape: SystemShape) -> Transformation:
    return Transformation(in_shape, out_shape, {})


def atomic(in_shape: SystemShape, out_shape: SystemShape, src, dst, flip: int,
           weight=1) -> Transformation:
    """A single atomic term; ``src``/``dst`` may be labels or global indices."""
    s = src if isinstance(src, int) else flatten_label(in_shape, as_label(src))
    d = dst if isinstance(dst, int) else flatten_label(out_shape, as_label(dst))
    return Transformation(in_shape, out_shape, {(s, d, flip): weight})


def identity(shape: SystemShape) -> Transformation:
    return Transformation(
        shape, shape, {(q, q, 0): 1 for q in range(1, shape.global_dim + 1)}
    )


def decompose(t: Transformation) -> list[AtomicTerm]:
    """The unique conical decomposition, sorted by (src, dst, flip)."""
    return [AtomicTerm(src, dst, flip, w) for (src, dst, flip), w in sorted(t.coeffs.items())]


def recompose(in_shape: SystemShape, out_shape: SystemShape,
              terms) -> Transformation:
    coeffs: dict = {}
    for term in terms:
        key = (term.src, term.dst, term.flip)
        coeffs[key] = coeffs.get(key, 0) + term.weight
    return Transformation(in_shape, out_shape, coeffs)


def compose_seq(t1: Transformation, t2: Transformation) -> Transformation:
    """``t1`` then ``t2``; weights multiply, section shifts add mod two."""
    if t1.out_shape != t2.in_shape:
        raise ValueError(
            f"cannot compose {t1.out_shape} -> into -> {t2.in_shape} transformation"
        )
    by_src: dict[int, list] = {}
    for (src, dst, flip), w in t2.coeffs.items():
        by_src.setdefault(src, []).append((dst, flip, w))
    out: dict = {}
    for (src, mid, flip1), w1 in t1.coeffs.items():
        for dst, flip2, w2 in by_src.get(mid, ()):
            key = (src, dst, flip1 ^ flip2)
            out[key] = out.get(key, 0) + w1 * w2
    return Transformation(t1.in_shape, t2.out_shape, out)


def par_with_identity(t: Transformation, right: SystemShape) -> Transformation:
    """``t (x) id`` on a composite; the ancilla keeps its label, its pairing
    bit picks up the term's section shift."""
    if right.is_trivial:
        return t
    out: dict = {}
    for (src, dst, flip), w in t.coeffs.items():
        for q2 in range(1, right.global_dim + 1):
            for s in (0, 1):
                key = (
                    pair_label(t.in_shape, right, src, q2, s),
                    pair_label(t.out_shape, right, dst, q2, s ^ flip),
                    flip,
                )
                out[key] = out.get(key, 0) + w
    return Transformation(t.in_shape.compose(right), t.out_shape.compose(right), out)


def swap(left: SystemShape, right: SystemShape) -> Transformation:
    """The symmetric swap; its section shift equals the pairing bit."""
    if left.is_trivial or right.is_trivial:
        raise ValueError("swap needs two non-trivial systems")
    coeffs = {}
    for q1 in range(1, left.global_dim + 1):
        for q2 in range(1, right.global_dim + 1):
            for s in (0, 1):
                coeffs[
                    (
                        pair_label(left, right, q1, q2, s),
                        pair_label(right, left, q2, q1, s),
                        s,
                    )
                ] = 1
    return Transformation(left.compose(right), right.compose(left), coeffs)


def compose_par(t1: Transformation, t2: Transformation) -> Transformation:
    """``t1 (x) t2``, interleaved as (t1 (x) id) after (id (x) t2)."""
    left_then = par_with_identity(t1, t2.out_shape)
    right_first = compose_seq(
        compose_seq(swap(t1.in_shape, t2.in_shape), par_with_identity(t2, t1.in_shape)),
        swap(t2.out_shape, t1.in_shape),
    )
    return compose_seq(right_first, left_then)


def apply(t: Transformation, rho: State) -> State:
    if t.in_shape != rho.shape:
        raise ValueError(f"transformation expects {t.in_shape}, state is on {rho.shape}")
    out = [0] * t.out_shape.global_dim
    for (src, dst, _), w in t.coeffs.items():
        v = rho.weights[src - 1]
        if v != 0:
            out[dst - 1] += w * v
    return State(t.out_shape, tuple(out))


def pull(e: Effect, t: Transformation) -> Effect:
    """Pre-compose an effect with a transformation: ``(e| . t``."""
    if t.out_shape != e.shape:
        raise ValueError(f"transformation outputs {t.out_shape}, effect is on {e.shape}")
    out = [0] * t.in_shape.global_dim
    for (src, dst, _), w in t.coeffs.items():
        v = e.weights[dst - 1]
        if v != 0:
            out[src - 1] += w * v
    return Effect(t.in_shape, tuple(out))


def fuse_map(left: SystemShape, right: SystemShape) -> Transformation:
    """The merging channel onto the single system of equal global dimension.

    Canonical labels are untouched; only the typing changes.  On a pair of
    elementary systems this is the bipartite-to-single merger sending
    ``|(i j)_s)`` to ``|q_encode(i, j, s))``.
    """
    if left.is_trivial or right.is_trivial:
        raise ValueError("fuse_map needs two non-trivial systems")
    composite = left.compose(right)
    return Transformation(
        composite,
        composite.fused(),
        {(q, q, 0): 1 for q in range(1, composite.global_dim + 1)},
    )


def unfuse_map(left: SystemShape, right: SystemShape) -> Transformation:
    if left.is_trivial or right.is_trivial:
        raise ValueError("unfuse_map needs two non-trivial systems")
    composite = left.compose(right)
    return Transformation(
        composite.fused(),
        composite,
        {(q, q, 0): 1 for q in range(1, composite.global_dim + 1)},
    )


def boxed_effect_left(e: Effect, right: SystemShape) -> Transformation:
    """``e (x) id`` as a transformation from ``e.shape + right`` to ``right``."""
    if e.shape.is_trivial or right.is_trivial:
        raise ValueError("boxed_effect_left needs non-trivial systems")
    out: dict = {}
    for q1, w in e.nonzero():
        for q2 in range(1, right.global_dim + 1):
            for s in (0, 1):
                key = (pair_label(e.shape, right, q1, q2, s), q2, s)
                out[key] = out.get(key, 0) + w
    return Transformation(e.shape.compose(right), right, out)


def boxed_state_left(rho: State, right: SystemShape) -> Transformation:
    """``rho (x) id`` as a transformation from ``right`` to ``rho.shape + right``."""
    if rho.shape.is_trivial or right.is_trivial:
        raise ValueError("boxed_state_left needs non-trivial systems")
    out: dict = {}
    for q1, w in rho.nonzero():
        for q2 in range(1, right.global_dim + 1):
            for s in (0, 1):
                key = (q2, pair_label(rho.shape, right, q1, q2, s), s)
                out[key] = out.get(key, 0) + HALF * w
    return Transformation(right, rho.shape.compose(right), out)


# ---------------------------------------------------------------------------
# reversible transformations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReversibleSpec:
    """A permutation of pure labels with one section-shift bit per label."""

    perm: tuple[int, ...]
    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(self.perm))
        object.__setattr__(self, "bits", tuple(self.bits))
        n = len(self.perm)
        if sorted(self.perm) != list(range(1, n + 1)):
            raise ValueError(f"{self.perm} is not a bijection on [1..{n}]")
        if len(self.bits) != n or any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be a 0/1 vector matching the permutation")

    def inverse(self) -> "ReversibleSpec":
        n = len(self.perm)
        inv = [0] * n
        bits = [0] * n
        for i, target in enumerate(self.perm, start=1):
            inv[target - 1] = i
            bits[target - 1] = self.bits[i - 1]
        return ReversibleSpec(tuple(inv), tuple(bits))


def reversible(shape: SystemShape, spec: ReversibleSpec) -> Transformation:
    n = shape.global_dim
    if len(spec.perm) != n:
        raise ValueError(f"spec permutes {len(spec.perm)} labels, shape has {n}")
    return Transformation(
        shape,
        shape,
        {(i, spec.perm[i - 1], spec.bits[i - 1]): 1 for i in range(1, n + 1)},
    )


@dataclass(frozen=True)
class BipartiteView:
    """A reversible map on a fused pair, decoded into per-wire functions."""

    pi_left: dict
    pi_right: dict
    pi_bit: dict
    sigma: dict


def reversible_bipartite_view(spec: ReversibleSpec, n: int, m: int) -> BipartiteView:
    """Decode a permutation of ``[1..2nm]`` through the pair codec."""
    if len(spec.perm) != 2 * n * m:
        raise ValueError(f"spec acts on {len(spec.perm)} labels, expected {2 * n * m}")
    pi_left: dict = {}
    pi_right: dict = {}
    pi_bit: dict = {}
    sigma: dict = {}
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            for s in (0, 1):
                q = q_encode(n, m, i, j, s)
                i2, j2, s2 = q_decode(n, m, spec.perm[q - 1])
                pi_left[(i, j, s)] = i2
                pi_right[(i, j, s)] = j2
                pi_bit[(i, j, s)] = s2
                sigma[(i, j, s)] = spec.bits[q - 1]
    return BipartiteView(pi_left, pi_right, pi_bit, sigma)


# ---------------------------------------------------------------------------
# instruments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Instrument:
    """An outcome-indexed family whose full coarse-graining is a channel."""

    members: tuple
    outcomes: tuple = field(default=())

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValueError("an instrument needs at least one member")
        shapes = {(t.in_shape, t.out_shape) for t in members}
        if len(shapes) > 1:
            raise ValueError("instrument members must share input and output shapes")
        outcomes = tuple(self.outcomes) or tuple(range(len(members)))
        if len(outcomes) != len(members):
            raise ValueError("one outcome label per member required")
        object.__setattr__(self, "outcomes", outcomes)

    def is_valid(self, tol=0) -> bool:
        return coarse_grain(self, self.outcomes).is_channel(tol)


def coarse_grain(instr: Instrument, subset) -> Transformation:
    """Sum the members at the selected outcomes."""
    wanted = set(subset)
    unknown = wanted - set(instr.outcomes)
    if unknown:
        raise ValueError(f"unknown outcomes {sorted(unknown)!r}")
    first = instr.members[0]
    total = zero(first.in_shape, first.out_shape)
    for outcome, member in zip(instr.outcomes, instr.members):
        if outcome in wanted:
            total = total.add(member)
    return total
