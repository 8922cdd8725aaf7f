"""The ontological model: classical images of systems, states, effects, maps.

Every elementary system of dimension ``n`` is assigned a classical system of
dimension ``2n`` (one extra bit of ontic state); composites get the tensor
product of their factors' ontic spaces, with wires ordered
``(n1, bit1, n2, bit2, ...)``.

Images are computed through one code path: fuse the composite wires down to
a single system with the merging permutation, apply the single-system atomic
rule ``(i, b) -> (l, b ^ flip)``, and unfuse.  The closed forms used for
states and effects (one free bit on the first wire, every later wire shifted
by its section bit) are pinned to that rule by the consistency suites.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import prod

import numpy as np

from . import classical
from .classical import ClassicalMap
from .bct import Effect, Instrument, State, Transformation, coarse_grain
from . import bct
from .scalars import HALF, number_json
from .systems import SystemShape, q_encode, unflatten_label


@dataclass(frozen=True)
class OnticSpace:
    """The classical system assigned to a shape, with its wire layout."""

    shape: SystemShape

    @property
    def wires(self) -> tuple[int, ...]:
        out: list[int] = []
        for n in self.shape.elems:
            out.extend((n, 2))
        return tuple(out)

    @property
    def dim(self) -> int:
        return self.shape.ontic_dim

    def index(self, point) -> int:
        """0-based linear index of ``(i1, b1, i2, b2, ...)`` (values 1-based, bits 0-based)."""
        wires = self.wires
        if len(point) != len(wires):
            raise ValueError(f"point {point} does not fit wires {wires}")
        idx = 0
        for pos, (dim, v) in enumerate(zip(wires, point)):
            v0 = v - 1 if pos % 2 == 0 else v
            if not 0 <= v0 < dim:
                raise ValueError(f"value {v} out of range for wire of dimension {dim}")
            idx = idx * dim + v0
        return idx

    def point(self, index: int) -> tuple:
        wires = self.wires
        vals = []
        for dim in reversed(wires):
            index, v0 = divmod(index, dim)
            vals.append(v0)
        vals.reverse()
        return tuple(v0 + 1 if pos % 2 == 0 else v0 for pos, v0 in enumerate(vals))

    def points(self):
        return [self.point(i) for i in range(self.dim)]


def ontic_system(shape: SystemShape) -> OnticSpace:
    return OnticSpace(shape)


def _bit_pattern(sections, b0: int) -> list[int]:
    """Ontic bits of a pure label: wire ``k+1`` carries ``b0`` shifted by the
    label's ``k``-th section bit (all shifts relative to the first wire)."""
    return [b0] + [b0 ^ s for s in sections]


def ontic_state(rho: State) -> ClassicalMap:
    """Image of a state: each pure label spreads over its two bit patterns."""
    if rho.shape.is_trivial:
        return ClassicalMap.scalar(rho.weights[0])
    space = OnticSpace(rho.shape)
    col = [0] * space.dim
    for q, w in rho.nonzero():
        lab = unflatten_label(rho.shape, q)
        half_w = HALF * w
        for b0 in (0, 1):
            bits = _bit_pattern(lab.sections, b0)
            point = tuple(v for pair in zip(lab.indices, bits) for v in pair)
            col[space.index(point)] += half_w
    return ClassicalMap.state(col)


def ontic_effect(e: Effect) -> ClassicalMap:
    """Image of an effect: same bit patterns, summed without the 1/2."""
    if e.shape.is_trivial:
        return ClassicalMap.scalar(e.weights[0])
    space = OnticSpace(e.shape)
    row = [0] * space.dim
    for q, w in e.nonzero():
        lab = unflatten_label(e.shape, q)
        for b0 in (0, 1):
            bits = _bit_pattern(lab.sections, b0)
            point = tuple(v for pair in zip(lab.indices, bits) for v in pair)
            row[space.index(point)] += w
    return ClassicalMap.effect(row)


@lru_cache(maxsize=None)
def merge_perm(n1: int, n2: int) -> ClassicalMap:
    """The merging permutation: ``(x, b1, y, b2) -> (Q(x, y, b1^b2), b1)``.

    The fused wire keeps the first factor's bit; the pairing bit is the two
    bits' parity.  Keeping the first bit is what makes parallel diagram
    preservation strict (the image of ``t (x) id`` is ``image(t) (x) id``),
    which the diagram suite checks exhaustively.
    """
    dim = 4 * n1 * n2
    m = np.full((dim, dim), 0, dtype=object)
    for x in range(1, n1 + 1):
        for b1 in (0, 1):
            for y in range(1, n2 + 1):
                for b2 in (0, 1):
                    col = (((x - 1) * 2 + b1) * n2 + (y - 1)) * 2 + b2
                    row = (q_encode(n1, n2, x, y, b1 ^ b2) - 1) * 2 + b1
                    m[row, col] = 1
    return ClassicalMap(m)


def merge_perm_inv(n1: int, n2: int) -> ClassicalMap:
    return merge_perm(n1, n2).transpose()


@lru_cache(maxsize=None)
def merge_chain(shape: SystemShape) -> ClassicalMap:
    """Permutation from the composite ontic space onto the fused single one."""
    if shape.num_factors <= 1:
        return ClassicalMap.identity(shape.ontic_dim)
    acc = ClassicalMap.identity(shape.ontic_dim)
    fused = shape.elems[0]
    for k in range(1, shape.num_factors):
        step = merge_perm(fused, shape.elems[k])
        tail = prod(2 * n for n in shape.elems[k + 1 :])
        if tail > 1:
            step = classical.compose_par(step, ClassicalMap.identity(tail))
        acc = classical.compose_seq(acc, step)
        fused = 2 * fused * shape.elems[k]
    return acc


def _fused_matrix(t: Transformation) -> ClassicalMap:
    n_in, n_out = t.in_shape.global_dim, t.out_shape.global_dim
    m = np.full((2 * n_out, 2 * n_in), 0, dtype=object)
    for (src, dst, flip), w in t.coeffs.items():
        for b in (0, 1):
            m[(dst - 1) * 2 + (b ^ flip), (src - 1) * 2 + b] += w
    return ClassicalMap(m)


def ontic_map(t: Transformation) -> ClassicalMap:
    """Image of a transformation: fuse wires, apply the atomic rule, unfuse."""
    fused = _fused_matrix(t)
    if t.in_shape.num_factors <= 1 and t.out_shape.num_factors <= 1:
        return fused
    p_in = merge_chain(t.in_shape)
    p_out = merge_chain(t.out_shape)
    return classical.compose_seq(classical.compose_seq(p_in, fused), p_out.transpose())


@lru_cache(maxsize=None)
def wire_swap_matrix(left: SystemShape, right: SystemShape) -> ClassicalMap:
    """Independent oracle: the permutation exchanging the two wire blocks."""
    sp_in = OnticSpace(left.compose(right))
    sp_out = OnticSpace(right.compose(left))
    cut = 2 * left.num_factors
    m = np.full((sp_out.dim, sp_in.dim), 0, dtype=object)
    for col in range(sp_in.dim):
        point = sp_in.point(col)
        m[sp_out.index(point[cut:] + point[:cut]), col] = 1
    return ClassicalMap(m)


# ---------------------------------------------------------------------------
# verification reports
# ---------------------------------------------------------------------------

_MAX_WITNESSES = 10


@dataclass
class Report:
    """Outcome of a verification run; failures carry explicit witnesses."""

    suite: str
    seed: int = 0
    trials: int = 0
    failures: list = field(default_factory=list)
    max_abs_dev: object = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, witness, lhs, rhs) -> None:
        dev = abs(lhs - rhs)
        if dev > self.max_abs_dev:
            self.max_abs_dev = dev
        if len(self.failures) < _MAX_WITNESSES:
            self.failures.append(
                {"witness": witness, "lhs": number_json(lhs), "rhs": number_json(rhs)}
            )

    def absorb(self, other: "Report") -> "Report":
        self.trials += other.trials
        room = _MAX_WITNESSES - len(self.failures)
        if room > 0:
            self.failures.extend(other.failures[:room])
        elif other.failures and not self.failures:
            self.failures.extend(other.failures[:_MAX_WITNESSES])
        if other.max_abs_dev > self.max_abs_dev:
            self.max_abs_dev = other.max_abs_dev
        return self

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "trials": self.trials,
            "failures": self.failures,
            "max_abs_dev": float(self.max_abs_dev),
        }


def _compare_maps(report: Report, lhs: ClassicalMap, rhs: ClassicalMap, tol=0,
                  context=None) -> None:
    report.trials += 1
    if lhs.entries.shape != rhs.entries.shape:
        report.failures.append(
            {"witness": [context, "shape"], "lhs": list(lhs.entries.shape),
             "rhs": list(rhs.entries.shape)}
        )
        return
    for r in range(lhs.out_dim):
        for c in range(lhs.in_dim):
            a, b = lhs.entries[r, c], rhs.entries[r, c]
            if a == b:
                continue
            dev = abs(a - b)
            if dev > report.max_abs_dev:
                report.max_abs_dev = dev
            if dev > tol:
                witness = [context, r, c] if context is not None else [r, c]
                if len(report.failures) < _MAX_WITNESSES:
                    report.failures.append(
                        {"witness": witness, "lhs": number_json(a), "rhs": number_json(b)}
                    )


def verify_diagram_seq(t1: Transformation, t2: Transformation, tol=0) -> Report:
    """Check that images compose sequentially: image(t1 then t2) == product."""
    report = Report(suite="diagram-seq")
    lhs = ontic_map(bct.compose_seq(t1, t2))
    rhs = classical.compose_seq(ontic_map(t1), ontic_map(t2))
    _compare_maps(report, lhs, rhs, tol)
    return report


def verify_diagram_par(t1: Transformation, t2: Transformation, tol=0) -> Report:
    """Check that images compose in parallel: image(t1 (x) t2) == Kronecker."""
    report = Report(suite="diagram-par")
    lhs = ontic_map(bct.compose_par(t1, t2))
    rhs = classical.compose_par(ontic_map(t1), ontic_map(t2))
    _compare_maps(report, lhs, rhs, tol)
    return report


def verify_probability(e: Effect, t, rho: State, tol=0) -> Report:
    """Compare a theory probability with the classical pairing of the images."""
    report = Report(suite="probability")
    report.trials = 1
    if t is None:
        theory = bct.pair(e, rho)
        model = classical.compose_seq(ontic_state(rho), ontic_effect(e)).scalar_value()
    else:
        theory = bct.pair(e, bct.apply(t, rho))
        chained = classical.compose_seq(ontic_state(rho), ontic_map(t))
        model = classical.compose_seq(chained, ontic_effect(e)).scalar_value()
    if theory != model and abs(theory - model) > tol:
        report.record("pairing", theory, model)
    return report


def verify_determinacy(t: Transformation, tol=0) -> Report:
    """Channels map to stochastic matrices, valid maps to substochastic ones."""
    report = Report(suite="determinacy")
    report.trials = 1
    image = ontic_map(t)
    if not image.is_substochastic(tol):
        report.failures.append(
            {"witness": "substochasticity", "lhs": "image", "rhs": "substochastic"}
        )
    channel = t.is_channel(tol)
    stochastic = image.is_stochastic(tol)
    if channel != stochastic:
        report.failures.append(
            {"witness": "channel-iff-stochastic", "lhs": channel, "rhs": stochastic}
        )
    return report


def verify_instrument(instr: Instrument, tol=0) -> Report:
    """Images of instrument members must sum to a stochastic matrix."""
    report = Report(suite="instrument")
    report.trials = 1
    total = ontic_map(instr.members[0])
    for member in instr.members[1:]:
        total = total.add(ontic_map(member))
    if not total.is_stochastic(tol):
        report.failures.append(
            {"witness": "coarse-grained-image", "lhs": "sum of images",
             "rhs": "stochastic"}
        )
    direct = ontic_map(coarse_grain(instr, instr.outcomes))
    _compare_maps(report, total, direct, tol, context="sum-vs-coarse-grain")
    return report
