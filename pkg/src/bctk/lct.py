"""Latent classical bipartite systems and the no-go falsifier.

A latent classical composite of two classical systems ``d1`` and ``d2``
carries an extra latent factor of dimension ``dL`` whose state ``kappa`` is
fixed: product states are ``kappa (x) sigma (x) tau``.  When ``kappa`` has a
zero entry, the effect ``b = kappa_perp (x) discard (x) discard`` is non-null
yet annihilates every product state.  Closing the jellyfish map built from
``b`` and any composite state with the classical Choi pair ties the model's
pairing to the trace of that map, which kills every candidate classical
embedding: either the jellyfish image fails to vanish (diagram preservation
broken) or the model pairing is zero while the theory's is not (probability
preservation broken).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .classical import ClassicalMap, choi_close
from .scalars import number_from_json, number_json


def _kron(*vectors):
    out = np.array([1], dtype=object)
    for v in vectors:
        out = np.kron(out, np.array(list(v), dtype=object))
    return tuple(out.tolist())


@dataclass(frozen=True)
class LctInstance:
    """A bipartite latent classical system with a rank-deficient latent state."""

    d1: int
    d2: int
    dL: int
    kappa: tuple
    kappa_perp: tuple
    kappa_bar: tuple

    @property
    def composite_dim(self) -> int:
        return self.dL * self.d1 * self.d2

    def to_json(self) -> dict:
        return {
            "d1": self.d1,
            "d2": self.d2,
            "dL": self.dL,
            "kappa": [number_json(v) for v in self.kappa],
            "kappa_perp": [number_json(v) for v in self.kappa_perp],
            "kappa_bar": [number_json(v) for v in self.kappa_bar],
        }


def make_instance(d1: int = 2, d2: int = 2, dL: int = 2, kappa=None) -> LctInstance:
    """Build an instance; ``kappa`` defaults to ``(1, 0, ..., 0)``.

    The orthogonal effect and the pairing state are both supported on the
    first zero entry of ``kappa``, so the default pairing value is exactly 1.
    """
    if min(d1, d2, dL) < 2:
        raise ValueError("all dimensions must be at least 2")
    if kappa is None:
        kappa = (1,) + (0,) * (dL - 1)
    kappa = tuple(kappa)
    if len(kappa) != dL:
        raise ValueError(f"kappa needs {dL} entries, got {len(kappa)}")
    if any(v < 0 for v in kappa) or sum(kappa, 0) != 1:
        raise ValueError("kappa must be a normalised distribution")
    zeros = [i for i, v in enumerate(kappa) if v == 0]
    if not zeros:
        raise ValueError("kappa must have at least one zero entry (not full-rank)")
    hole = zeros[0]
    indicator = tuple(1 if i == hole else 0 for i in range(dL))
    return LctInstance(d1, d2, dL, kappa, kappa_perp=indicator, kappa_bar=indicator)


def annihilator(inst: LctInstance) -> tuple:
    """The non-null effect that kills every product state."""
    return _kron(inst.kappa_perp, (1,) * inst.d1, (1,) * inst.d2)


def product_state(inst: LctInstance, sigma, tau) -> tuple:
    """The composite state of the parallel composition ``sigma (x) tau``."""
    if len(sigma) != inst.d1 or len(tau) != inst.d2:
        raise ValueError("marginal states do not fit the instance dimensions")
    return _kron(inst.kappa, sigma, tau)


def beta_state(inst: LctInstance, rho1=None, rho2=None) -> tuple:
    """A composite state with non-zero pairing against the annihilator."""
    if rho1 is None:
        rho1 = (Fraction(1, inst.d1),) * inst.d1
    if rho2 is None:
        rho2 = (Fraction(1, inst.d2),) * inst.d2
    return _kron(inst.kappa_bar, rho1, rho2)


def pairing_value(inst: LctInstance, beta):
    """``(b | beta)`` for the annihilating effect ``b``."""
    if len(beta) != inst.composite_dim:
        raise ValueError(f"beta needs {inst.composite_dim} entries")
    return sum((a * v for a, v in zip(annihilator(inst), beta)), 0)


# ---------------------------------------------------------------------------
# candidate ontological models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CandidateModel:
    """The minimal data the no-go argument touches.

    A candidate must commit to a factorised ontic space ``L1 * L2`` (strict
    parallel-composition preservation forces this), the image of one
    composite state with non-zero theory pairing, and the image of the
    annihilating effect.  ``theory_pairing`` is the scalar the theory assigns
    to that state/effect pair; when omitted it is computed from the instance.
    """

    L1: int
    L2: int
    xi_beta: tuple
    xi_b: tuple
    theory_pairing: object = None
    xi_sigma: tuple | None = None
    xi_tau: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "xi_beta", tuple(self.xi_beta))
        object.__setattr__(self, "xi_b", tuple(self.xi_b))
        if len(self.xi_beta) != self.L1 * self.L2:
            raise ValueError("xi_beta must live on the product ontic space L1*L2")
        if len(self.xi_b) != self.L1 * self.L2:
            raise ValueError("xi_b must live on the product ontic space L1*L2")
        tol = 1e-9 if any(isinstance(v, float) for v in self.xi_beta + self.xi_b) else 0
        if any(v < -tol for v in self.xi_beta) or sum(self.xi_beta, 0) > 1 + tol:
            raise ValueError("xi_beta must be a subnormalised distribution")
        if any(v < -tol or v > 1 + tol for v in self.xi_b):
            raise ValueError("xi_b entries must lie in [0, 1]")
        if self.xi_sigma is not None:
            object.__setattr__(self, "xi_sigma", tuple(self.xi_sigma))
            if len(self.xi_sigma) != self.L1:
                raise ValueError("xi_sigma must live on the first ontic factor")
        if self.xi_tau is not None:
            object.__setattr__(self, "xi_tau", tuple(self.xi_tau))
            if len(self.xi_tau) != self.L2:
                raise ValueError("xi_tau must live on the second ontic factor")

    def to_json(self) -> dict:
        data = {
            "L1": self.L1,
            "L2": self.L2,
            "xi_beta": [number_json(v) for v in self.xi_beta],
            "xi_b": [number_json(v) for v in self.xi_b],
        }
        if self.theory_pairing is not None:
            data["theory_pairing"] = number_json(self.theory_pairing)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "CandidateModel":
        return cls(
            L1=data["L1"],
            L2=data["L2"],
            xi_beta=tuple(number_from_json(v) for v in data["xi_beta"]),
            xi_b=tuple(number_from_json(v) for v in data["xi_b"]),
            theory_pairing=(
                number_from_json(data["theory_pairing"])
                if "theory_pairing" in data
                else None
            ),
        )


def jellyfish_matrix(cand: CandidateModel) -> ClassicalMap:
    """Model image of the second-wire map built from the state and the effect.

    The state's first wire feeds the effect's first wire; the effect's second
    wire is the open input and the state's second wire the open output:
    ``M[y, x] = sum_a xi_beta[a, y] * xi_b[a, x]``.
    """
    m = np.full((cand.L2, cand.L2), 0, dtype=object)
    for a in range(cand.L1):
        base = a * cand.L2
        for y in range(cand.L2):
            w = cand.xi_beta[base + y]
            if w == 0:
                continue
            for x in range(cand.L2):
                v = cand.xi_b[base + x]
                if v != 0:
                    m[y, x] += w * v
    return ClassicalMap(m)


def model_pairing(cand: CandidateModel):
    return sum((a * b for a, b in zip(cand.xi_b, cand.xi_beta)), 0)


@dataclass(frozen=True)
class ViolationCertificate:
    """Which axiom a candidate breaks, with a concrete witness.

    ``violation`` is one of ``jellyfish-nullity``, ``probability-preservation``
    or ``product-annihilation``; ``None`` flags the impossible case where a
    candidate survives every check (a fatal inconsistency of the run itself).
    """

    violation: str | None
    witness: object
    lhs: object
    rhs: object
    trace_identity: object
    fatal: bool = False

    @property
    def ok(self) -> bool:
        return self.violation is not None

    def to_json(self) -> dict:
        return {
            "violation": self.violation,
            "witness": self.witness,
            "lhs": number_json(self.lhs) if self.lhs is not None else None,
            "rhs": number_json(self.rhs) if self.rhs is not None else None,
            "trace_identity": number_json(self.trace_identity),
            "fatal": self.fatal,
        }


def falsify(cand: CandidateModel, inst: LctInstance, beta=None) -> ViolationCertificate:
    """Refute a candidate model by the annihilating-effect contradiction.

    The trace identity ``choi_close(M) == xi_b . xi_beta`` holds for every
    candidate by pure algebra.  The theory demands both ``M == 0`` (the
    jellyfish map is null) and ``xi_b . xi_beta == (b|beta)``; with a
    non-zero theory pairing the two cannot hold together.
    """
    if beta is None:
        beta = beta_state(inst)
    theory = cand.theory_pairing
    if theory is None:
        theory = pairing_value(inst, beta)
    m = jellyfish_matrix(cand)
    model = model_pairing(cand)
    trace = choi_close(m)

    if cand.xi_sigma is not None and cand.xi_tau is not None:
        product_image = _kron(cand.xi_sigma, cand.xi_tau)
        product = sum((b * v for b, v in zip(cand.xi_b, product_image)), 0)
        if product != 0:
            return ViolationCertificate(
                violation="product-annihilation",
                witness="xi_b . (xi_sigma (x) xi_tau)",
                lhs=product,
                rhs=0,
                trace_identity=trace,
            )

    nonzero = [(r, c, v) for r, c, v in m.nonzero()]
    if nonzero:
        r, c, v = nonzero[0]
        return ViolationCertificate(
            violation="jellyfish-nullity",
            witness=[r, c],
            lhs=v,
            rhs=0,
            trace_identity=trace,
        )
    if model != theory:
        return ViolationCertificate(
            violation="probability-preservation",
            witness="model pairing vs theory pairing",
            lhs=model,
            rhs=theory,
            trace_identity=trace,
        )
    return ViolationCertificate(
        violation=None,
        witness="no axiom violated",
        lhs=model,
        rhs=theory,
        trace_identity=trace,
        fatal=True,
    )


def bct_style_candidate(inst: LctInstance) -> CandidateModel:
    """The parity-bit construction transplanted from the bilocal model.

    Each classical factor gets a doubled ontic space; the state image is the
    product of two half-mixed bit pairs and the effect image is the discard
    covector, so the model pairing is exactly 1 -- the trace identity then
    forces a non-zero jellyfish image.
    """
    L1, L2 = 2 * inst.d1, 2 * inst.d2
    factor1 = [0] * L1
    factor1[0] = Fraction(1, 2)
    factor1[1] = Fraction(1, 2)
    factor2 = [0] * L2
    factor2[0] = Fraction(1, 2)
    factor2[1] = Fraction(1, 2)
    return CandidateModel(
        L1=L1,
        L2=L2,
        xi_beta=_kron(factor1, factor2),
        xi_b=(1,) * (L1 * L2),
        theory_pairing=pairing_value(inst, beta_state(inst)),
    )


def random_candidate(rng: random.Random, inst: LctInstance, max_ontic: int = 6,
                     denominator: int = 16) -> CandidateModel:
    """A seeded random candidate with exact rational data."""
    L1 = rng.randint(2, max_ontic)
    L2 = rng.randint(2, max_ontic)
    dim = L1 * L2
    cuts = sorted(rng.randint(0, denominator) for _ in range(dim - 1))
    counts = [b - a for a, b in zip([0] + cuts, cuts + [denominator])]
    xi_beta = tuple(Fraction(c, denominator) for c in counts)
    xi_b = tuple(Fraction(rng.randint(0, denominator), denominator) for _ in range(dim))
    return CandidateModel(L1=L1, L2=L2, xi_beta=xi_beta, xi_b=xi_b)
