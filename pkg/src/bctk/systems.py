"""System bookkeeping for bilocal classical theory.

Systems are ordered lists of elementary dimensions.  A composite of two
non-trivial systems of dimensions ``n`` and ``m`` has dimension ``2*n*m``,
so a shape with ``p`` non-trivial factors has global dimension
``2**(p-1) * n1 * ... * np``.  Pure states of composites carry one hidden
section bit per pairing; the canonical grouping is left-nested and every
label is flattened to a global index through the pair codec ``q_encode``.

The codec used here is ``Q(i, j, s) = 2*n2*(i - 1) + 2*j + s - 1``, which
is a bijection ``[1..n1] x [1..n2] x {0,1} -> [1..2*n1*n2]`` for every pair
of dimensions (the variant with stride ``2*n1`` fails to be injective when
``n1 < n2``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from math import prod
from typing import Iterator


@dataclass(frozen=True)
class SystemShape:
    """An ordered tuple of elementary dimensions; ``()`` is the trivial system.

    Trivial factors (dimension 1) are stripped on construction, so composing
    with the trivial system is a no-op by representation.
    """

    elems: tuple[int, ...] = ()

    def __post_init__(self):
        cleaned = []
        for n in self.elems:
            if not isinstance(n, int) or n < 1:
                raise ValueError(f"elementary dimension must be a positive int, got {n!r}")
            if n > 1:
                cleaned.append(n)
        object.__setattr__(self, "elems", tuple(cleaned))

    @classmethod
    def of(cls, *dims: int) -> "SystemShape":
        return cls(tuple(dims))

    @property
    def is_trivial(self) -> bool:
        return not self.elems

    @property
    def is_single(self) -> bool:
        return len(self.elems) == 1

    @property
    def num_factors(self) -> int:
        return len(self.elems)

    @cached_property
    def global_dim(self) -> int:
        """Dimension of the simplex of states: ``2**(p-1) * prod(n_i)``."""
        if not self.elems:
            return 1
        return 2 ** (len(self.elems) - 1) * prod(self.elems)

    @cached_property
    def ontic_dim(self) -> int:
        """Dimension of the classical space the ontological model assigns."""
        return prod(2 * n for n in self.elems)

    def compose(self, other: "SystemShape") -> "SystemShape":
        return SystemShape(self.elems + other.elems)

    def fused(self) -> "SystemShape":
        """The single system of the same global dimension."""
        if self.is_trivial:
            return self
        return SystemShape((self.global_dim,))

    def __str__(self) -> str:
        if self.is_trivial:
            return "I"
        return "(" + ",".join(str(n) for n in self.elems) + ")"


TRIVIAL = SystemShape(())


def bct_dim(shape: SystemShape) -> int:
    """Global dimension of a shape under the bilocal composition rule."""
    return shape.global_dim


def q_encode(n1: int, n2: int, i: int, j: int, s: int) -> int:
    """Pair codec: ``(i, j, s) -> 2*n2*(i-1) + 2*j + s - 1`` in ``[1..2*n1*n2]``."""
    if not 1 <= i <= n1:
        raise ValueError(f"index i={i} out of range [1..{n1}]")
    if not 1 <= j <= n2:
        raise ValueError(f"index j={j} out of range [1..{n2}]")
    if s not in (0, 1):
        raise ValueError(f"section bit s={s} must be 0 or 1")
    return 2 * n2 * (i - 1) + 2 * j + s - 1


def q_decode(n1: int, n2: int, q: int) -> tuple[int, int, int]:
    """Exact inverse of :func:`q_encode`."""
    if not 1 <= q <= 2 * n1 * n2:
        raise ValueError(f"label q={q} out of range [1..{2 * n1 * n2}]")
    r = q - 1
    i = r // (2 * n2) + 1
    rem = r % (2 * n2)
    j = rem // 2 + 1
    s = rem % 2
    return i, j, s


@dataclass(frozen=True)
class PureLabel:
    """A pure-state/effect label: per-factor indices plus section bits.

    The record is read left-nested: ``(...((i1 i2)_{s1} i3)_{s2}... ip)_{s_{p-1}}``.
    """

    indices: tuple[int, ...]
    sections: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.indices) == 0:
            raise ValueError("a pure label needs at least one index")
        if len(self.sections) != len(self.indices) - 1:
            raise ValueError(
                f"label with {len(self.indices)} indices needs "
                f"{len(self.indices) - 1} section bits, got {len(self.sections)}"
            )
        if any(s not in (0, 1) for s in self.sections):
            raise ValueError("section bits must be 0 or 1")


def _check_label(shape: SystemShape, label: PureLabel) -> None:
    if len(label.indices) != len(shape.elems):
        raise ValueError(f"label {label} does not fit shape {shape}")
    for i, n in zip(label.indices, shape.elems):
        if not 1 <= i <= n:
            raise ValueError(f"index {i} out of range [1..{n}] in label for {shape}")


def as_label(label) -> PureLabel:
    """Accept a bare index (single systems) or a PureLabel."""
    if isinstance(label, PureLabel):
        return label
    if isinstance(label, int):
        return PureLabel((label,))
    return PureLabel(tuple(label[0]), tuple(label[1]))


def flatten_label(shape: SystemShape, label) -> int:
    """Global index in ``[1..N]`` of a pure label, by left-nested pair folding."""
    return _flatten_cached(shape, as_label(label))


@lru_cache(maxsize=None)
def _flatten_cached(shape: SystemShape, lab: PureLabel) -> int:
    _check_label(shape, lab)
    acc = lab.indices[0]
    acc_dim = shape.elems[0]
    for k in range(1, len(shape.elems)):
        acc = q_encode(acc_dim, shape.elems[k], acc, lab.indices[k], lab.sections[k - 1])
        acc_dim = 2 * acc_dim * shape.elems[k]
    return acc


@lru_cache(maxsize=None)
def unflatten_label(shape: SystemShape, q: int) -> PureLabel:
    """Inverse of :func:`flatten_label`."""
    if shape.is_trivial:
        raise ValueError("the trivial system has no pure labels")
    dims = [shape.elems[0]]
    for n in shape.elems[1:]:
        dims.append(2 * dims[-1] * n)
    if not 1 <= q <= dims[-1]:
        raise ValueError(f"label q={q} out of range [1..{dims[-1]}] for {shape}")
    indices: list[int] = []
    sections: list[int] = []
    for k in range(len(shape.elems) - 1, 0, -1):
        q, idx, s = q_decode(dims[k - 1], shape.elems[k], q)
        indices.append(idx)
        sections.append(s)
    indices.append(q)
    return PureLabel(tuple(reversed(indices)), tuple(reversed(sections)))


def all_labels(shape: SystemShape) -> Iterator[PureLabel]:
    """Every pure label of a shape, in global-index order."""
    for q in range(1, shape.global_dim + 1):
        yield unflatten_label(shape, q)


@lru_cache(maxsize=None)
def pair_label(left: SystemShape, right: SystemShape, q1: int, q2: int, s: int) -> int:
    """Global index on ``left + right`` of the grouping ``(q1 q2)_s``.

    Re-associating the grouping into canonical left-nested form appends the
    pairing bit and shifts every section bit of the right factor by it:
    ``(x (y z)_u)_s = ((x y)_s z)_{s^u}``.
    """
    if left.is_trivial or right.is_trivial:
        raise ValueError("pair_label needs two non-trivial shapes")
    a = unflatten_label(left, q1)
    b = unflatten_label(right, q2)
    if s not in (0, 1):
        raise ValueError("pairing bit must be 0 or 1")
    indices = a.indices + b.indices
    sections = a.sections + (s,) + tuple(s ^ u for u in b.sections)
    return flatten_label(left.compose(right), PureLabel(indices, sections))


@lru_cache(maxsize=None)
def split_label(left: SystemShape, right: SystemShape, q: int) -> tuple[int, int, int]:
    """Inverse of :func:`pair_label`: recover ``(q1, q2, s)``."""
    lab = unflatten_label(left.compose(right), q)
    p = len(left.elems)
    a = PureLabel(lab.indices[:p], lab.sections[: p - 1])
    s = lab.sections[p - 1]
    b = PureLabel(lab.indices[p:], tuple(s ^ u for u in lab.sections[p:]))
    return flatten_label(left, a), flatten_label(right, b), s


@dataclass(frozen=True)
class RightNestedLabel:
    """Tripartite label grouped as ``(i (j k)_inner)_outer``."""

    i: int
    j: int
    k: int
    inner: int
    outer: int


def reassoc_label(n1: int, n2: int, n3: int, label: PureLabel) -> RightNestedLabel:
    """Regroup ``((i j)_s k)_t`` as ``(i (j k)_{s^t})_s``."""
    shape = SystemShape((n1, n2, n3))
    _check_label(shape, label)
    i, j, k = label.indices
    s, t = label.sections
    return RightNestedLabel(i, j, k, inner=s ^ t, outer=s)


def reassoc_inverse(n1: int, n2: int, n3: int, label: RightNestedLabel) -> PureLabel:
    """Regroup ``(i (j k)_c)_a`` back to the canonical ``((i j)_a k)_{a^c}``."""
    out = PureLabel((label.i, label.j, label.k), (label.outer, label.outer ^ label.inner))
    _check_label(SystemShape((n1, n2, n3)), out)
    return out


def flatten_right_nested(n1: int, n2: int, n3: int, label: RightNestedLabel) -> int:
    """Global index induced by the right-nested grouping ``(i (j k)_c)_a``."""
    inner = q_encode(n2, n3, label.j, label.k, label.inner)
    return q_encode(n1, 2 * n2 * n3, label.i, inner, label.outer)


def all_right_nested(n1: int, n2: int, n3: int) -> Iterator[RightNestedLabel]:
    for i, j, k, c, a in product(
        range(1, n1 + 1), range(1, n2 + 1), range(1, n3 + 1), (0, 1), (0, 1)
    ):
        yield RightNestedLabel(i, j, k, inner=c, outer=a)
