"""Acceptance criteria, one test per criterion.

Every check is exact (rational arithmetic, equality with ``==``); each test
prints a single pass line with its elapsed time against the stated budget.
"""

import json
import random
import subprocess
import sys
import time
from fractions import Fraction
from itertools import permutations, product

import pytest

from bctk import bct, classical, dsl, lct, ontic, verify
from bctk.bct import (
    apply,
    atomic,
    boxed_effect_left,
    boxed_state_left,
    compose_seq,
    par_with_identity,
    pull,
    pure_effect,
    pure_state,
    swap,
)
from bctk.classical import choi_close
from bctk.lct import (
    bct_style_candidate,
    beta_state,
    falsify,
    jellyfish_matrix,
    make_instance,
    model_pairing,
    pairing_value,
    product_state,
    random_candidate,
)
from bctk.ontic import merge_perm, ontic_effect, ontic_map, ontic_state
from bctk.systems import PureLabel, SystemShape, all_labels, bct_dim, pair_label, unflatten_label
from bctk.verify import RunConfig, derive_seed

HALF = Fraction(1, 2)


class _Budget:
    def __init__(self, number: int, name: str, seconds: float):
        self.number = number
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if exc_type is None else "FAIL"
        print(
            f"[acceptance] criterion {self.number:02d} ({self.name}): {status} "
            f"in {elapsed:.2f}s (budget {self.seconds:g}s)"
        )
        if exc_type is None:
            assert elapsed < self.seconds, (
                f"criterion {self.number} exceeded its {self.seconds}s budget "
                f"({elapsed:.2f}s)"
            )
        return False


def test_criterion_01_dimension_rule():
    with _Budget(1, "dimension rule", 1.0):
        for n in range(1, 7):
            for m in range(1, 7):
                if n != 1 != m:
                    expected = 2 * n * m
                elif m == 1:
                    expected = n
                else:
                    expected = m
                assert bct_dim(SystemShape((n, m))) == expected
                assert bct_dim(SystemShape((m, n))) == expected


def test_criterion_02_pairing_tables_in_both_theories():
    with _Budget(2, "pairing tables", 5.0):
        for n, m in product((2, 3), repeat=2):
            shape = SystemShape((n, m))
            ns, ms = SystemShape((n,)), SystemShape((m,))
            labels = list(all_labels(shape))
            for le in labels:
                eff = pure_effect(shape, le)
                img_e = ontic_effect(eff)
                for ls in labels:
                    rho = pure_state(shape, ls)
                    delta = 1 if le == ls else 0
                    assert bct.pair(eff, rho) == delta
                    assert classical.compose_seq(
                        ontic_state(rho), img_e
                    ).scalar_value() == delta
            for i_prime in range(1, n + 1):
                boxed = boxed_effect_left(pure_effect(ns, i_prime), ms)
                boxed_img = ontic_map(boxed)
                boxed_state = boxed_state_left(pure_state(ns, i_prime), ms)
                boxed_state_img = ontic_map(boxed_state)
                for lab in labels:
                    i, j = lab.indices
                    rho = pure_state(shape, lab)
                    want = pure_state(ms, j).scale(1 if i == i_prime else 0)
                    assert apply(boxed, rho) == want
                    assert classical.compose_seq(
                        ontic_state(rho), boxed_img
                    ) == ontic_state(want)
                    eff = pure_effect(shape, lab)
                    want_e = pure_effect(ms, j).scale(HALF if i == i_prime else 0)
                    assert pull(eff, boxed_state).weights == want_e.weights
                    assert classical.compose_seq(
                        boxed_state_img, ontic_effect(eff)
                    ) == ontic_effect(want_e)


def test_criterion_03_unique_decomposition_and_collision_search():
    with _Budget(3, "unique decomposition", 30.0):
        cfg = RunConfig(seed=2026, trials=500, max_dim=4)
        for idx in range(500):
            rng = verify.trial_rng(cfg, "acceptance-roundtrip", idx)
            in_shape = verify.rand_shape(rng, 4)
            out_shape = verify.rand_shape(rng, 4)
            t = verify.rand_tensor(rng, in_shape, out_shape)
            assert bct.recompose(in_shape, out_shape, bct.decompose(t)) == t
        for n, m in ((2, 2), (2, 3), (3, 2), (3, 3)):
            assert verify._probe_rank(n, m) == 2 * n * m


def test_criterion_04_full_consistency_gate():
    with _Budget(4, "model consistency (verify all)", 60.0):
        cfg = RunConfig(seed=20260809, trials=200, max_dim=4)
        reports = verify.run_suites("all", cfg)
        for report in reports:
            assert report.failures == [], f"{report.suite}: {report.failures[:3]}"
            assert report.trials >= 200
            assert report.max_abs_dev == 0


def test_criterion_05_merge_pinning_and_composite_atomicity():
    with _Budget(5, "merge pinning and composite atomicity", 30.0):
        for n1, n2 in product((2, 3), repeat=2):
            left, right = SystemShape((n1,)), SystemShape((n2,))
            composite = left.compose(right)
            fuse = bct.fuse_map(left, right)
            mu = merge_perm(n1, n2)
            assert ontic_map(fuse) == mu
            for lab in all_labels(composite):
                rho = pure_state(composite, lab)
                assert ontic_state(apply(fuse, rho)) == classical.compose_seq(
                    ontic_state(rho), mu
                )
        comp = SystemShape((2, 2))
        for k in (2, 3):
            anc = SystemShape((k,))
            big = comp.compose(anc)
            for low, up, flip in product(range(1, 9), range(1, 9), (0, 1)):
                lifted = par_with_identity(atomic(comp, comp, low, up, flip), anc)
                for q, j, s in product(range(1, 9), range(1, k + 1), (0, 1)):
                    rho = pure_state(big, unflatten_label(big, pair_label(comp, anc, q, j, s)))
                    got = apply(lifted, rho)
                    want = pure_state(
                        big, unflatten_label(big, pair_label(comp, anc, up, j, s ^ flip))
                    ).scale(1 if q == low else 0)
                    assert got == want


def test_criterion_06_reversible_transformations_exhaustive():
    with _Budget(6, "reversible transformations", 5.0):
        for n in range(2, 7):
            shape = SystemShape((n,))
            ident = bct.identity(shape)
            for perm in permutations(range(1, n + 1)):
                for bits in product((0, 1), repeat=n):
                    spec = bct.ReversibleSpec(perm, bits)
                    rev = bct.reversible(shape, spec)
                    inv = bct.reversible(shape, spec.inverse())
                    assert rev.is_channel()
                    assert compose_seq(rev, inv) == ident
                    assert compose_seq(inv, rev) == ident
                    image = ontic_map(rev)
                    expected = {
                        ((perm[i - 1] - 1) * 2 + (b ^ bits[i - 1]), (i - 1) * 2 + b)
                        for i in range(1, n + 1)
                        for b in (0, 1)
                    }
                    entries = list(image.nonzero())
                    assert all(v == 1 for _, _, v in entries)
                    assert {(r, c) for r, c, _ in entries} == expected


def test_criterion_07_swap_defining_relation():
    with _Budget(7, "swap soundness", 10.0):
        for n, m, k in product((2, 3), repeat=3):
            left, right, anc = SystemShape((n,)), SystemShape((m,)), SystemShape((k,))
            lifted = par_with_identity(swap(left, right), anc)
            for i, j, kk, s, t in product(
                range(1, n + 1), range(1, m + 1), range(1, k + 1), (0, 1), (0, 1)
            ):
                got = apply(
                    lifted,
                    pure_state(left.compose(right).compose(anc),
                               PureLabel((i, j, kk), (s, t))),
                )
                want = pure_state(right.compose(left).compose(anc),
                                  PureLabel((j, i, kk), (s, s ^ t)))
                assert got == want


def test_criterion_08_latent_classical_no_go():
    with _Budget(8, "latent-classical falsifier", 30.0):
        inst = make_instance()
        for i in range(inst.d1):
            sigma = tuple(1 if x == i else 0 for x in range(inst.d1))
            for j in range(inst.d2):
                tau = tuple(1 if x == j else 0 for x in range(inst.d2))
                assert pairing_value(inst, product_state(inst, sigma, tau)) == 0
        assert pairing_value(inst, beta_state(inst)) == 1
        cert = falsify(bct_style_candidate(inst), inst)
        assert cert.violation == "jellyfish-nullity" and not cert.fatal
        violated = 0
        for idx in range(1000):
            rng = random.Random(derive_seed(8, "acceptance-lct", idx))
            cand = random_candidate(rng, inst)
            assert choi_close(jellyfish_matrix(cand)) == model_pairing(cand)
            if not falsify(cand, inst).fatal:
                violated += 1
        assert violated == 1000


def test_criterion_09_backend_agreement_on_random_circuits():
    with _Budget(9, "circuit backend agreement", 30.0):
        for idx in range(100):
            rng = random.Random(derive_seed(9, "acceptance-circuits", idx))
            src = verify.random_circuit_source(rng, max_dim=3)
            ast = dsl.parse(src)
            assert dsl.eval_bct(ast, "main") == dsl.eval_ontic(ast, "main")


def test_criterion_10_negative_controls(tmp_path):
    with _Budget(10, "negative controls", 60.0):
        corrupted = subprocess.run(
            [sys.executable, "-m", "bctk", "verify", "--suite", "diagram",
             "--trials", "2", "--max-dim", "3", "--corrupt", "swap"],
            capture_output=True, text=True,
        )
        assert corrupted.returncode == 3
        payload = json.loads(corrupted.stdout)
        assert any(r["failures"] for r in payload["reports"])

        candidate = tmp_path / "fabricated.json"
        candidate.write_text(json.dumps({
            "L1": 2, "L2": 2,
            "xi_beta": [[1, 2], [1, 2], [0, 1], [0, 1]],
            "xi_b": [[0, 1], [0, 1], [1, 1], [1, 1]],
            "theory_pairing": [0, 1],
        }))
        fabricated = subprocess.run(
            [sys.executable, "-m", "bctk", "lct", "refute", "--model", str(candidate)],
            capture_output=True, text=True,
        )
        assert fabricated.returncode == 4
