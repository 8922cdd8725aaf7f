"""Named verification suites with reproducible, counter-based seeding.

Every suite draws its randomness from per-trial generators derived by
hashing ``(seed, suite, index)``, so identical configurations produce
identical reports byte for byte, independent of execution order.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import bct, classical, ontic
from .bct import (
    Effect,
    Instrument,
    ReversibleSpec,
    State,
    Transformation,
    atomic,
    compose_par,
    compose_seq,
    par_with_identity,
)
from .ontic import Report, ontic_effect, ontic_map, ontic_state
from .scalars import DEFAULT_TOL, FLOAT, RATIONAL, close
from .systems import (
    PureLabel,
    SystemShape,
    TRIVIAL,
    all_labels,
    flatten_label,
    flatten_right_nested,
    pair_label,
    q_decode,
    q_encode,
    reassoc_inverse,
    reassoc_label,
    split_label,
    unflatten_label,
)

SUITE_NAMES = (
    "linearity",
    "diagram",
    "probability",
    "determinacy",
    "atomicity",
    "swap",
    "codec",
)


@dataclass
class RunConfig:
    """Reproducible run parameters; the rational backend ignores ``tol``."""

    seed: int = 0
    trials: int = 200
    max_dim: int = 4
    backend: str = RATIONAL
    tol: float = DEFAULT_TOL
    report_path: str | None = None
    corrupt: str | None = None

    @property
    def cmp_tol(self):
        return 0 if self.backend == RATIONAL else self.tol

    def to_json(self) -> dict:
        data = {
            "seed": self.seed,
            "trials": self.trials,
            "max_dim": self.max_dim,
            "backend": self.backend,
        }
        if self.backend == FLOAT:
            data["tol"] = self.tol
        if self.corrupt:
            data["corrupt"] = self.corrupt
        return data


def derive_seed(seed: int, suite: str, index: int) -> int:
    digest = hashlib.sha256(f"{seed}:{suite}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def trial_rng(cfg: RunConfig, suite: str, index: int) -> random.Random:
    return random.Random(derive_seed(cfg.seed, suite, index))


# ---------------------------------------------------------------------------
# random generators
# ---------------------------------------------------------------------------


def _num(value: Fraction, backend: str):
    return float(value) if backend == FLOAT else value


def rand_distribution(rng: random.Random, n: int, backend: str = RATIONAL,
                      normalised: bool = True, denominator: int = 16) -> tuple:
    """An exact random distribution via integer cut points."""
    total = denominator if normalised else rng.randint(0, denominator)
    cuts = sorted(rng.randint(0, total) for _ in range(n - 1))
    counts = [b - a for a, b in zip([0] + cuts, cuts + [total])]
    return tuple(_num(Fraction(c, denominator), backend) for c in counts)


def rand_shape(rng: random.Random, max_dim: int, max_factors: int = 2,
               max_ontic: int = 64) -> SystemShape:
    while True:
        p = rng.randint(1, max_factors)
        shape = SystemShape(tuple(rng.randint(2, max_dim) for _ in range(p)))
        if shape.ontic_dim <= max_ontic:
            return shape


def rand_state(rng: random.Random, shape: SystemShape, backend: str = RATIONAL,
               deterministic: bool = False) -> State:
    return State(
        shape, rand_distribution(rng, shape.global_dim, backend, normalised=deterministic)
    )


def rand_effect(rng: random.Random, shape: SystemShape,
                backend: str = RATIONAL) -> Effect:
    den = 16
    return Effect(
        shape,
        tuple(
            _num(Fraction(rng.randint(0, den), den), backend)
            for _ in range(shape.global_dim)
        ),
    )


def rand_tensor(rng: random.Random, in_shape: SystemShape, out_shape: SystemShape,
                backend: str = RATIONAL, channel: bool = False,
                max_terms: int = 3) -> Transformation:
    """A random valid transformation with a bounded number of terms per input."""
    n_out = out_shape.global_dim
    coeffs: dict = {}
    for src in range(1, in_shape.global_dim + 1):
        k = rng.randint(1, max_terms) if channel else rng.randint(0, max_terms)
        if k == 0:
            continue
        targets = set()
        while len(targets) < k:
            targets.add((rng.randint(1, n_out), rng.randint(0, 1)))
        weights = rand_distribution(rng, k, backend, normalised=channel)
        for (dst, flip), w in zip(sorted(targets), weights):
            if w != 0:
                coeffs[(src, dst, flip)] = w
    return Transformation(in_shape, out_shape, coeffs)


def rand_channel(rng: random.Random, in_shape: SystemShape, out_shape: SystemShape,
                 backend: str = RATIONAL) -> Transformation:
    return rand_tensor(rng, in_shape, out_shape, backend, channel=True)


def rand_instrument(rng: random.Random, in_shape: SystemShape, out_shape: SystemShape,
                    backend: str = RATIONAL, outcomes: int = 3) -> Instrument:
    """Split a random channel into members by scaling with a random simplex."""
    channel = rand_channel(rng, in_shape, out_shape, backend)
    probs = rand_distribution(rng, outcomes, backend, normalised=True)
    members = tuple(channel.scale(p) for p in probs)
    return Instrument(members)


def rand_reversible(rng: random.Random, n: int) -> ReversibleSpec:
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    bits = tuple(rng.randint(0, 1) for _ in range(n))
    return ReversibleSpec(tuple(perm), bits)


# ---------------------------------------------------------------------------
# check helpers
# ---------------------------------------------------------------------------


def _check_scalar(report: Report, witness, lhs, rhs, tol=0) -> None:
    report.trials += 1
    if not close(lhs, rhs, tol):
        report.record(witness, lhs, rhs)


def _check_true(report: Report, witness, value: bool) -> None:
    report.trials += 1
    if not value:
        report.failures.append({"witness": witness, "lhs": False, "rhs": True})


def _check_vector(report: Report, witness, got, want, tol=0) -> None:
    report.trials += 1
    for q, (a, b) in enumerate(zip(got, want), start=1):
        if not close(a, b, tol):
            report.record([witness, q], a, b)
            return


def _check_state(report: Report, witness, got: State, want: State, tol=0) -> None:
    if got.shape != want.shape:
        report.trials += 1
        report.failures.append(
            {"witness": witness, "lhs": str(got.shape), "rhs": str(want.shape)}
        )
        return
    _check_vector(report, witness, got.weights, want.weights, tol)


def _check_maps(report: Report, witness, lhs, rhs, tol=0) -> None:
    report.trials += 1
    if lhs.entries.shape != rhs.entries.shape:
        report.failures.append(
            {"witness": [witness, "shape"], "lhs": list(lhs.entries.shape),
             "rhs": list(rhs.entries.shape)}
        )
        return
    for r in range(lhs.out_dim):
        for c in range(lhs.in_dim):
            a, b = lhs.entries[r, c], rhs.entries[r, c]
            if not close(a, b, tol):
                report.record([witness, r, c], a, b)
                return


def _tensors_close(t1: Transformation, t2: Transformation, tol) -> bool:
    if not tol:
        return t1 == t2
    keys = set(t1.coeffs) | set(t2.coeffs)
    return all(abs(t1.coeffs.get(k, 0) - t2.coeffs.get(k, 0)) <= tol for k in keys)


def _corrupt_swap(sw: Transformation) -> Transformation:
    """Test fixture: clear the section shift of one swap term."""
    coeffs = dict(sw.coeffs)
    for key in sorted(coeffs):
        src, dst, flip = key
        if flip == 1:
            w = coeffs.pop(key)
            coeffs[(src, dst, 0)] = coeffs.get((src, dst, 0), 0) + w
            break
    return Transformation(sw.in_shape, sw.out_shape, coeffs)


def _swap_under_test(cfg: RunConfig, left: SystemShape, right: SystemShape):
    sw = bct.swap(left, right)
    if cfg.corrupt == "swap":
        sw = _corrupt_swap(sw)
    return sw


# ---------------------------------------------------------------------------
# the suites
# ---------------------------------------------------------------------------


def suite_codec(cfg: RunConfig) -> Report:
    """Label codec: bijectivity, round trips, regrouping invariance."""
    report = Report(suite="codec", seed=cfg.seed)
    top = min(cfg.max_dim, 4)
    for n1 in range(2, top + 1):
        for n2 in range(2, top + 1):
            seen = set()
            ok = True
            for i, j, s in product(range(1, n1 + 1), range(1, n2 + 1), (0, 1)):
                q = q_encode(n1, n2, i, j, s)
                seen.add(q)
                if q_decode(n1, n2, q) != (i, j, s):
                    ok = False
            _check_true(report, ["q-roundtrip", n1, n2], ok)
            _check_true(
                report, ["q-bijective", n1, n2],
                seen == set(range(1, 2 * n1 * n2 + 1)),
            )
    shapes = (
        [SystemShape((n,)) for n in range(2, top + 1)]
        + [SystemShape((a, b)) for a in range(2, top + 1) for b in range(2, top + 1)]
        + [SystemShape((a, b, c)) for a in (2, 3) for b in (2, 3) for c in (2, 3)]
    )
    for shape in shapes:
        seen = set()
        ok = True
        for lab in all_labels(shape):
            q = flatten_label(shape, lab)
            seen.add(q)
            if unflatten_label(shape, q) != lab:
                ok = False
        _check_true(report, ["flatten-roundtrip", str(shape)], ok)
        _check_true(
            report, ["flatten-bijective", str(shape)],
            seen == set(range(1, shape.global_dim + 1)),
        )
    for n1, n2, n3 in product((2, 3), repeat=3):
        shape = SystemShape((n1, n2, n3))
        images = set()
        ok = True
        for lab in all_labels(shape):
            r = reassoc_label(n1, n2, n3, lab)
            images.add(flatten_right_nested(n1, n2, n3, r))
            if reassoc_inverse(n1, n2, n3, r) != lab:
                ok = False
        _check_true(report, ["reassoc-roundtrip", n1, n2, n3], ok)
        _check_true(
            report, ["reassoc-bijective", n1, n2, n3],
            images == set(range(1, shape.global_dim + 1)),
        )
    for idx in range(cfg.trials):
        rng = trial_rng(cfg, "codec", idx)
        left = rand_shape(rng, cfg.max_dim)
        right = rand_shape(rng, cfg.max_dim)
        q1 = rng.randint(1, left.global_dim)
        q2 = rng.randint(1, right.global_dim)
        s = rng.randint(0, 1)
        q = pair_label(left, right, q1, q2, s)
        _check_true(
            report, ["pair-split", str(left), str(right), q1, q2, s],
            split_label(left, right, q) == (q1, q2, s),
        )
    return report


def suite_linearity(cfg: RunConfig) -> Report:
    """Unique conical decomposition: round trips and probe separation."""
    report = Report(suite="linearity", seed=cfg.seed)
    for idx in range(cfg.trials):
        rng = trial_rng(cfg, "linearity", idx)
        in_shape = rand_shape(rng, cfg.max_dim)
        out_shape = rand_shape(rng, cfg.max_dim)
        t = rand_tensor(rng, in_shape, out_shape, cfg.backend)
        back = bct.recompose(in_shape, out_shape, bct.decompose(t))
        _check_true(report, ["decompose-recompose", idx], back == t)
        again = Transformation.from_json(t.to_json())
        _check_true(report, ["json-roundtrip", idx], again == t)
        recovered = _coefficients_from_image(ontic_map(t), t.in_shape, t.out_shape)
        _check_true(report, ["image-faithful", idx], recovered == t.coeffs)
    if cfg.backend == RATIONAL:
        for n, m in ((2, 2), (2, 3), (3, 2), (3, 3)):
            rank = _probe_rank(n, m)
            _check_scalar(report, ["probe-rank", n, m], rank, 2 * n * m)
    return report


def _coefficients_from_image(image: classical.ClassicalMap, in_shape: SystemShape,
                             out_shape: SystemShape) -> dict:
    """Invert the model on fused wires: ``C(i, l, tau) = M[(l, tau), (i, 0)]``."""
    if in_shape.num_factors > 1 or out_shape.num_factors > 1:
        image = classical.compose_seq(
            classical.compose_seq(ontic.merge_chain(in_shape).transpose(), image),
            ontic.merge_chain(out_shape),
        )
    coeffs: dict = {}
    for src in range(1, in_shape.global_dim + 1):
        for dst in range(1, out_shape.global_dim + 1):
            for flip in (0, 1):
                v = image.entries[(dst - 1) * 2 + flip, (src - 1) * 2]
                if v != 0:
                    coeffs[(src, dst, flip)] = v
    return coeffs


def _probe_rank(n: int, m: int) -> int:
    """Rank over the rationals of the probe-response matrix of all atomics.

    Full rank means no two distinct coefficient maps agree on every pure
    state/effect probe with a binary ancilla: an exhaustive collision search.
    """
    n_shape, m_shape = SystemShape((n,)), SystemShape((m,))
    anc = SystemShape((2,))
    probes_in = [bct.pure_state(n_shape.compose(anc), lab)
                 for lab in all_labels(n_shape.compose(anc))]
    probes_out = [bct.pure_effect(m_shape.compose(anc), lab)
                  for lab in all_labels(m_shape.compose(anc))]
    rows = []
    for src in range(1, n + 1):
        for dst in range(1, m + 1):
            for flip in (0, 1):
                gen = par_with_identity(atomic(n_shape, m_shape, src, dst, flip), anc)
                row = []
                for rho in probes_in:
                    moved = bct.apply(gen, rho)
                    for eff in probes_out:
                        row.append(Fraction(bct.pair(eff, moved)))
                rows.append(row)
    return _rank(rows)


def _rank(rows: list[list[Fraction]]) -> int:
    mat = [row[:] for row in rows]
    if not mat:
        return 0
    rank = 0
    cols = len(mat[0])
    pivot_col = 0
    row_idx = 0
    while row_idx < len(mat) and pivot_col < cols:
        pivot = next((k for k in range(row_idx, len(mat)) if mat[k][pivot_col] != 0), None)
        if pivot is None:
            pivot_col += 1
            continue
        mat[row_idx], mat[pivot] = mat[pivot], mat[row_idx]
        lead = mat[row_idx][pivot_col]
        for k in range(row_idx + 1, len(mat)):
            if mat[k][pivot_col] != 0:
                factor = mat[k][pivot_col] / lead
                mat[k] = [a - factor * b for a, b in zip(mat[k], mat[row_idx])]
        rank += 1
        row_idx += 1
        pivot_col += 1
    return rank


def suite_diagram(cfg: RunConfig) -> Report:
    """Sequential/parallel functoriality plus identity, swap and merge pinning."""
    report = Report(suite="diagram", seed=cfg.seed)
    tol = cfg.cmp_tol
    top = min(cfg.max_dim, 4)
    for n in range(2, top + 1):
        shape = SystemShape((n,))
        _check_maps(
            report, ["identity-image", n],
            ontic_map(bct.identity(shape)),
            classical.ClassicalMap.identity(shape.ontic_dim),
            tol,
        )
    for n, m in product(range(2, top + 1), repeat=2):
        left, right = SystemShape((n,)), SystemShape((m,))
        sw = _swap_under_test(cfg, left, right)
        _check_maps(
            report, ["swap-image", n, m],
            ontic_map(sw), ontic.wire_swap_matrix(left, right), tol,
        )
    for n1, n2 in product((2, 3), repeat=2):
        left, right = SystemShape((n1,)), SystemShape((n2,))
        fuse = bct.fuse_map(left, right)
        mu = ontic.merge_perm(n1, n2)
        _check_maps(report, ["merge-image", n1, n2], ontic_map(fuse), mu, tol)
        composite = left.compose(right)
        ok = True
        for lab in all_labels(composite):
            rho = bct.pure_state(composite, lab)
            lhs = ontic_state(bct.apply(fuse, rho))
            rhs = classical.compose_seq(ontic_state(rho), mu)
            if not all(
                close(a, b, tol)
                for a, b in zip(lhs.entries.flat, rhs.entries.flat)
            ):
                ok = False
        _check_true(report, ["merge-pinning", n1, n2], ok)
        _check_true(
            report, ["merge-invertible", n1, n2],
            compose_seq(fuse, bct.unfuse_map(left, right)) == bct.identity(composite),
        )
    for idx in range(cfg.trials):
        rng = trial_rng(cfg, "diagram", idx)
        a = rand_shape(rng, cfg.max_dim)
        b = rand_shape(rng, cfg.max_dim)
        c = rand_shape(rng, cfg.max_dim)
        t1 = rand_tensor(rng, a, b, cfg.backend)
        t2 = rand_tensor(rng, b, c, cfg.backend)
        report.absorb(ontic.verify_diagram_seq(t1, t2, tol))
        pa = rand_shape(rng, cfg.max_dim, max_ontic=16)
        pb = rand_shape(rng, cfg.max_dim, max_ontic=16)
        pc = rand_shape(rng, cfg.max_dim, max_ontic=16)
        pd = rand_shape(rng, cfg.max_dim, max_ontic=16)
        t1 = rand_channel(rng, pa, pb, cfg.backend)
        t2 = rand_channel(rng, pc, pd, cfg.backend)
        report.absorb(ontic.verify_diagram_par(t1, t2, tol))
        both = compose_par(t1, t2)
        other_order = compose_seq(
            par_with_identity(t1, t2.in_shape),
            compose_seq(
                compose_seq(
                    bct.swap(t1.out_shape, t2.in_shape),
                    par_with_identity(t2, t1.out_shape),
                ),
                bct.swap(t2.out_shape, t1.out_shape),
            ),
        )
        _check_true(report, ["bifunctorial", idx], _tensors_close(both, other_order, tol))
    return report


def suite_probability(cfg: RunConfig) -> Report:
    """Empirical adequacy: theory pairings equal model pairings, exactly."""
    report = Report(suite="probability", seed=cfg.seed)
    tol = cfg.cmp_tol
    for n, m in product((2, 3), repeat=2):
        shape = SystemShape((n, m))
        labels = list(all_labels(shape))
        table_ok = True
        for lab_e in labels:
            eff = bct.pure_effect(shape, lab_e)
            img_e = ontic_effect(eff)
            for lab_s in labels:
                rho = bct.pure_state(shape, lab_s)
                expected = 1 if lab_e == lab_s else 0
                theory = bct.pair(eff, rho)
                model = classical.compose_seq(ontic_state(rho), img_e).scalar_value()
                if not close(theory, expected, tol) or not close(model, expected, tol):
                    table_ok = False
        _check_true(report, ["delta-table", n, m], table_ok)
        n_shape, m_shape = SystemShape((n,)), SystemShape((m,))
        for i_prime in range(1, n + 1):
            boxed = bct.boxed_effect_left(bct.pure_effect(n_shape, i_prime), m_shape)
            boxed_img = ontic_map(boxed)
            boxed_state = bct.boxed_state_left(bct.pure_state(n_shape, i_prime), m_shape)
            boxed_state_img = ontic_map(boxed_state)
            for lab in labels:
                i, j = lab.indices
                rho = bct.pure_state(shape, lab)
                got = bct.apply(boxed, rho)
                want = bct.pure_state(m_shape, j).scale(1 if i == i_prime else 0)
                _check_state(report, ["local-effect", n, m, i_prime, str(lab)],
                             got, want, tol)
                _check_maps(
                    report, ["local-effect-image", n, m, i_prime, str(lab)],
                    classical.compose_seq(ontic_state(rho), boxed_img),
                    ontic_state(want), tol,
                )
                eff = bct.pure_effect(shape, lab)
                got_e = bct.pull(eff, boxed_state)
                half = Fraction(1, 2) if i == i_prime else 0
                want_e = bct.pure_effect(m_shape, j).scale(half)
                _check_vector(report, ["half-law", n, m, i_prime, str(lab)],
                              got_e.weights, want_e.weights, tol)
                _check_maps(
                    report, ["half-law-image", n, m, i_prime, str(lab)],
                    classical.compose_seq(boxed_state_img, ontic_effect(eff)),
                    ontic_effect(want_e), tol,
                )
    for idx in range(cfg.trials):
        rng = trial_rng(cfg, "probability", idx)
        a = rand_shape(rng, cfg.max_dim, max_ontic=16)
        b = rand_shape(rng, cfg.max_dim, max_ontic=16)
        anc_dim = rng.choice((1, 2, 3))
        anc = SystemShape((anc_dim,)) if anc_dim > 1 else TRIVIAL
        t = rand_tensor(rng, a, b, cfg.backend)
        lifted = par_with_identity(t, anc) if not anc.is_trivial else t
        rho = rand_state(rng, a.compose(anc), cfg.backend)
        eff = rand_effect(rng, b.compose(anc), cfg.backend)
        report.absorb(ontic.verify_probability(eff, lifted, rho, tol))
    return report


def suite_determinacy(cfg: RunConfig) -> Report:
    """Channels map to stochastic matrices; instruments stay valid."""
    report = Report(suite="determinacy", seed=cfg.seed)
    tol = cfg.cmp_tol
    for n in range(2, min(cfg.max_dim, 4) + 1):
        shape = SystemShape((n,))
        null = bct.zero(shape, shape)
        _check_true(report, ["null-image", n], ontic_map(null).is_substochastic(tol))
        _check_true(report, ["null-not-stochastic", n],
                    not ontic_map(null).is_stochastic(tol))
    for idx in range(cfg.trials):
        rng = trial_rng(cfg, "determinacy", idx)
        a = rand_shape(rng, cfg.max_dim)
        b = rand_shape(rng, cfg.max_dim)
        channel = rand_channel(rng, a, b, cfg.backend)
        report.absorb(ontic.verify_determinacy(channel, tol))
        loose = rand_tensor(rng, a, b, cfg.backend)
        report.absorb(ontic.verify_determinacy(loose, tol))
        pulled = bct.pull(bct.deterministic_effect(b), channel)
        det = bct.deterministic_effect(a)
        matches = all(close(x, y, tol) for x, y in zip(pulled.weights, det.weights))
        _check_true(report, ["causality", idx], matches == channel.is_channel(tol))
        n = rng.randint(2, 6)
        spec = rand_reversible(rng, n)
        shape = SystemShape((n,))
        rev = bct.reversible(shape, spec)
        inverse = bct.reversible(shape, spec.inverse())
        _check_true(
            report, ["reversible-inverse", idx],
            compose_seq(rev, inverse) == bct.identity(shape)
            and compose_seq(inverse, rev) == bct.identity(shape),
        )
        image = ontic_map(rev)
        _check_true(report, ["reversible-permutation", idx], image.is_permutation())
        ok = True
        for i in range(1, n + 1):
            for bit in (0, 1):
                row = (spec.perm[i - 1] - 1) * 2 + (bit ^ spec.bits[i - 1])
                col = (i - 1) * 2 + bit
                if image.entries[row, col] != 1:
                    ok = False
        _check_true(report, ["reversible-closed-form", idx], ok)
        instr = rand_instrument(rng, a, b, cfg.backend, outcomes=3)
        report.absorb(ontic.verify_instrument(instr, tol))
    return report


def suite_atomicity(cfg: RunConfig) -> Report:
    """The ancilla law of atomic generators, elementary and composite."""
    report = Report(suite="atomicity", seed=cfg.seed)
    tol = cfg.cmp_tol
    for n, m, k in product((2, 3), (2, 3), (2, 3)):
        n_shape, m_shape, anc = SystemShape((n,)), SystemShape((m,)), SystemShape((k,))
        for src, dst, flip in product(range(1, n + 1), range(1, m + 1), (0, 1)):
            lifted = par_with_identity(atomic(n_shape, m_shape, src, dst, flip), anc)
            ok = True
            for i, j, s in product(range(1, n + 1), range(1, k + 1), (0, 1)):
                rho = bct.pure_state(n_shape.compose(anc), PureLabel((i, j), (s,)))
                got = bct.apply(lifted, rho)
                want = bct.pure_state(
                    m_shape.compose(anc), PureLabel((dst, j), (s ^ flip,))
                ).scale(1 if i == src else 0)
                if got != want:
                    ok = False
            _check_true(report, ["atomic-law", n, m, k, src, dst, flip], ok)
    comp = SystemShape((2, 2))
    for k in (2, 3):
        anc = SystemShape((k,))
        big = comp.compose(anc)
        for low, up, flip in product(
            range(1, comp.global_dim + 1), range(1, comp.global_dim + 1), (0, 1)
        ):
            lifted = par_with_identity(atomic(comp, comp, low, up, flip), anc)
            ok = True
            for q, j, s in product(range(1, comp.global_dim + 1), range(1, k + 1), (0, 1)):
                rho = bct.pure_state(big, unflatten_label(big, pair_label(comp, anc, q, j, s)))
                got = bct.apply(lifted, rho)
                want_q = pair_label(comp, anc, up, j, s ^ flip)
                want = bct.pure_state(big, unflatten_label(big, want_q)).scale(
                    1 if q == low else 0
                )
                if got != want:
                    ok = False
            _check_true(report, ["composite-atomic-law", k, low, up, flip], ok)
    for idx in range(cfg.trials):
        rng = trial_rng(cfg, "atomicity", idx)
        n = rng.randint(2, cfg.max_dim)
        m = rng.randint(2, cfg.max_dim)
        k = rng.randint(2, 3)
        n_shape, m_shape, anc = SystemShape((n,)), SystemShape((m,)), SystemShape((k,))
        src, dst, flip = rng.randint(1, n), rng.randint(1, m), rng.randint(0, 1)
        weight = _num(Fraction(rng.randint(1, 16), 16), cfg.backend)
        lifted = par_with_identity(atomic(n_shape, m_shape, src, dst, flip, weight), anc)
        i, j, s = rng.randint(1, n), rng.randint(1, k), rng.randint(0, 1)
        rho = bct.pure_state(n_shape.compose(anc), PureLabel((i, j), (s,)))
        got = bct.apply(lifted, rho)
        want = bct.pure_state(m_shape.compose(anc), PureLabel((dst, j), (s ^ flip,))).scale(
            weight if i == src else 0
        )
        _check_state(report, ["atomic-law-weighted", idx], got, want, tol)
    return report


def suite_swap(cfg: RunConfig) -> Report:
    """The defining relation of swap, its involution and the sliding law."""
    report = Report(suite="swap", seed=cfg.seed)
    tol = cfg.cmp_tol
    for n, m, k in product((2, 3), repeat=3):
        left, right, anc = SystemShape((n,)), SystemShape((m,)), SystemShape((k,))
        sw = _swap_under_test(cfg, left, right)
        lifted = par_with_identity(sw, anc)
        ok = True
        for i, j, kk, s, t in product(
            range(1, n + 1), range(1, m + 1), range(1, k + 1), (0, 1), (0, 1)
        ):
            rho = bct.pure_state(left.compose(right).compose(anc),
                                 PureLabel((i, j, kk), (s, t)))
            got = bct.apply(lifted, rho)
            want = bct.pure_state(right.compose(left).compose(anc),
                                  PureLabel((j, i, kk), (s, s ^ t)))
            if got != want:
                ok = False
        _check_true(report, ["swap-defining-relation", n, m, k], ok)
    for n, m in product((2, 3, 4), repeat=2):
        left, right = SystemShape((n,)), SystemShape((m,))
        _check_true(
            report, ["swap-involution", n, m],
            compose_seq(bct.swap(left, right), bct.swap(right, left))
            == bct.identity(left.compose(right)),
        )
        ok = True
        for i, j in product(range(1, n + 1), range(1, m + 1)):
            moved = bct.apply(
                bct.swap(left, right),
                bct.par_states(bct.pure_state(left, i), bct.pure_state(right, j)),
            )
            want = bct.par_states(bct.pure_state(right, j), bct.pure_state(left, i))
            if moved != want:
                ok = False
        _check_true(report, ["swap-product", n, m], ok)
    for idx in range(cfg.trials):
        rng = trial_rng(cfg, "swap", idx)
        a = rand_shape(rng, cfg.max_dim, max_factors=1)
        b = rand_shape(rng, cfg.max_dim, max_factors=1)
        c = rand_shape(rng, cfg.max_dim, max_factors=1)
        d = rand_shape(rng, cfg.max_dim, max_factors=1)
        t1 = rand_tensor(rng, a, b, cfg.backend)
        t2 = rand_tensor(rng, c, d, cfg.backend)
        lhs = compose_seq(compose_par(t1, t2), bct.swap(b, d))
        rhs = compose_seq(bct.swap(a, c), compose_par(t2, t1))
        _check_true(report, ["swap-sliding", idx], _tensors_close(lhs, rhs, tol))
        rho = rand_state(rng, a, cfg.backend)
        sigma = rand_state(rng, c, cfg.backend)
        got = bct.apply(bct.swap(a, c), bct.par_states(rho, sigma))
        _check_state(report, ["swap-mixed-product", idx], got,
                     bct.par_states(sigma, rho), tol)
    return report


SUITES = {
    "linearity": suite_linearity,
    "diagram": suite_diagram,
    "probability": suite_probability,
    "determinacy": suite_determinacy,
    "atomicity": suite_atomicity,
    "swap": suite_swap,
    "codec": suite_codec,
}


def run_suites(names, cfg: RunConfig) -> list[Report]:
    if isinstance(names, str):
        names = SUITE_NAMES if names == "all" else (names,)
    reports = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}")
        reports.append(SUITES[name](cfg))
    return reports


# ---------------------------------------------------------------------------
# random circuit corpus for the differential oracle
# ---------------------------------------------------------------------------


def random_circuit_source(rng: random.Random, max_dim: int = 3) -> str:
    """A random closed circuit as DSL text: a state, channel stages, an effect."""
    n = rng.randint(2, max_dim)
    m = rng.randint(2, max_dim)
    lines = [
        f"system a = elem {n}",
        f"system b = elem {m}",
        "system ab = a * b",
    ]
    shape = SystemShape((n, m))
    lines.append(f"state rho : ab = {_dist_terms(rng, shape)}")
    n_gates = rng.randint(1, 2)
    stage_names = []
    for g in range(n_gates):
        choice = rng.random()
        if choice < 0.4:
            lines.append(f"gate g{g} : ab -> ab = {_atomic_body(rng, 2 * n * m)}")
        elif choice < 0.6:
            perm = list(range(1, 2 * n * m + 1))
            rng.shuffle(perm)
            bits = ",".join(str(rng.randint(0, 1)) for _ in perm)
            lines.append(
                f"gate g{g} : ab -> ab = rev {','.join(str(v) for v in perm)} {bits}"
            )
        else:
            lines.append(f"gate g{g} : ab -> ab = id")
        stage_names.append(f"g{g}")
    lines.append(f"effect e : ab = {_effect_terms(rng, shape)}")
    stages = " ; ".join(["rho"] + stage_names + ["e"])
    lines.append(f"circuit main = {stages}")
    lines.append("eval main")
    return "\n".join(lines) + "\n"


def _label_text(shape: SystemShape, q: int) -> str:
    lab = unflatten_label(shape, q)
    core = str(lab.indices[0])
    for idx, bit in zip(lab.indices[1:], lab.sections):
        core = f"({core},{idx});{bit}"
    return f"({core})"


def _frac_text(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def _dist_terms(rng: random.Random, shape: SystemShape) -> str:
    weights = rand_distribution(rng, shape.global_dim, normalised=True)
    parts = [
        f"{_frac_text(w)} {_label_text(shape, q)}"
        for q, w in enumerate(weights, start=1)
        if w != 0
    ]
    return " + ".join(parts) if parts else f"1 {_label_text(shape, 1)}"


def _effect_terms(rng: random.Random, shape: SystemShape) -> str:
    if rng.random() < 0.3:
        return "discard"
    parts = []
    for q in range(1, shape.global_dim + 1):
        w = Fraction(rng.randint(0, 16), 16)
        if w != 0:
            parts.append(f"{_frac_text(w)} {_label_text(shape, q)}")
    return " + ".join(parts) if parts else "discard"


def _atomic_body(rng: random.Random, dim: int) -> str:
    parts = []
    for src in range(1, dim + 1):
        k = rng.randint(0, 2)
        if k == 0:
            continue
        targets = set()
        while len(targets) < k:
            targets.add((rng.randint(1, dim), rng.randint(0, 1)))
        weights = rand_distribution(rng, k, normalised=False)
        for (dst, flip), w in zip(sorted(targets), weights):
            if w != 0:
                parts.append(f"atomic {src} -> {dst} tau {flip} w {_frac_text(w)}")
    if not parts:
        parts.append("atomic 1 -> 1 tau 0 w 1")
    return " + ".join(parts)
