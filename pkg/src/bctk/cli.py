"""Command-line entry point.

Exit codes: 0 success, 1 parse/type/IO error, 2 backend disagreement in
``eval``, 3 verification failures, 4 a falsifier run found a candidate with
no violation (which would contradict the no-go theorem and flags a fatal
inconsistency).  All structured output goes to stdout as JSON; diagnostics
go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import dsl, lct, ontic, verify
from .bct import Effect, State, Transformation
from .classical import ClassicalMap
from .scalars import FLOAT, RATIONAL, number_json, parse_number
from .verify import RunConfig

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DISAGREEMENT = 2
EXIT_VERIFY = 3
EXIT_INCONSISTENT = 4


def _dump(payload) -> None:
    print(json.dumps(payload, sort_keys=True))


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def _load_ast(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        _err(f"cannot read {path}: {exc}")
        return None
    try:
        return dsl.parse(text)
    except dsl.DslError as exc:
        for diag in exc.diagnostics:
            _err(f"{path}:{diag}")
        return None


def _difference(value_bct, value_ontic):
    """Maximum absolute deviation between the two backends' results."""
    if isinstance(value_bct, (int, float, Fraction)):
        return abs(value_bct - value_ontic)
    if isinstance(value_bct, State):
        image = ontic.ontic_state(value_bct)
    elif isinstance(value_bct, Effect):
        image = ontic.ontic_effect(value_bct)
    elif isinstance(value_bct, Transformation):
        image = ontic.ontic_map(value_bct)
    else:
        raise TypeError(f"cannot diff {type(value_bct).__name__}")
    if not isinstance(value_ontic, ClassicalMap):
        return 1
    if image.entries.shape != value_ontic.entries.shape:
        return 1
    return max(
        (abs(a - b) for a, b in zip(image.entries.flat, value_ontic.entries.flat)),
        default=0,
    )


def cmd_eval(args) -> int:
    ast = _load_ast(args.file)
    if ast is None:
        return EXIT_INPUT
    names = [args.name] if args.name else [d.name for d in ast.evals]
    if not names:
        _err("nothing to evaluate: pass --name or add eval directives")
        return EXIT_INPUT
    disagreement = False
    for name in names:
        try:
            value_bct = dsl.eval_bct(ast, name)
            value_ontic = dsl.eval_ontic(ast, name)
        except KeyError as exc:
            _err(str(exc))
            return EXIT_INPUT
        diff = _difference(value_bct, value_ontic)
        if diff != 0:
            disagreement = True
        _dump(
            {
                "name": name,
                "bct": dsl.eval_to_json(value_bct),
                "ontic": dsl.eval_to_json(value_ontic),
                "diff": number_json(diff),
            }
        )
    return EXIT_DISAGREEMENT if disagreement else EXIT_OK


def cmd_verify(args) -> int:
    cfg = RunConfig(
        seed=args.seed,
        trials=args.trials,
        max_dim=args.max_dim,
        backend=args.backend,
        tol=args.tol,
        report_path=args.report,
        corrupt=args.corrupt,
    )
    try:
        reports = verify.run_suites(args.suite, cfg)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    payload = {
        "config": cfg.to_json(),
        "reports": [r.to_json() for r in reports],
    }
    text = json.dumps(payload, sort_keys=True)
    print(text)
    if args.report:
        try:
            Path(args.report).write_text(text + "\n")
        except OSError as exc:
            _err(f"cannot write report: {exc}")
            return EXIT_INPUT
    failures = sum(len(r.failures) for r in reports)
    if failures:
        _err(f"{failures} verification failure(s)")
        return EXIT_VERIFY
    return EXIT_OK


def cmd_embed(args) -> int:
    ast = _load_ast(args.file)
    if ast is None:
        return EXIT_INPUT
    if args.gate not in ast.gates:
        _err(f"unknown gate {args.gate!r}")
        return EXIT_INPUT
    gate = ast.gates[args.gate]
    image = ontic.ontic_map(gate)
    in_space = ontic.OnticSpace(gate.in_shape)
    out_space = ontic.OnticSpace(gate.out_shape)
    _dump(
        {
            "gate": args.gate,
            "in_wires": [list(p) for p in in_space.points()],
            "out_wires": [list(p) for p in out_space.points()],
            "map": image.to_json(),
        }
    )
    return EXIT_OK


def _instance_from_args(args) -> lct.LctInstance:
    kappa = None
    if args.kappa:
        kappa = tuple(parse_number(part) for part in args.kappa.split(","))
    return lct.make_instance(args.d1, args.d2, args.dl, kappa)


def cmd_lct(args) -> int:
    try:
        inst = _instance_from_args(args)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT
    if args.action == "demo":
        table = []
        worst = 0
        for i in range(1, inst.d1 + 1):
            sigma = tuple(1 if k == i - 1 else 0 for k in range(inst.d1))
            for j in range(1, inst.d2 + 1):
                tau = tuple(1 if k == j - 1 else 0 for k in range(inst.d2))
                value = lct.pairing_value(inst, lct.product_state(inst, sigma, tau))
                worst = max(worst, abs(value))
                table.append({"sigma": i, "tau": j, "value": number_json(value)})
        pairing = lct.pairing_value(inst, lct.beta_state(inst))
        _dump(
            {
                "instance": inst.to_json(),
                "annihilation_table": table,
                "max_violation": number_json(worst),
                "pairing": number_json(pairing),
            }
        )
        return EXIT_OK

    candidates: list[tuple[str, lct.CandidateModel]] = []
    if args.random:
        import random as _random

        for idx in range(args.random):
            rng = _random.Random(verify.derive_seed(args.seed, "lct", idx))
            candidates.append((f"random-{idx}", lct.random_candidate(rng, inst)))
    elif args.model:
        try:
            data = json.loads(Path(args.model).read_text())
            candidates.append((args.model, lct.CandidateModel.from_json(data)))
        except (OSError, ValueError, KeyError) as exc:
            _err(f"cannot load candidate: {exc}")
            return EXIT_INPUT
    else:
        spec = args.candidate or "builtin:bct-style"
        if spec == "builtin:bct-style":
            candidates.append((spec, lct.bct_style_candidate(inst)))
        else:
            try:
                data = json.loads(Path(spec).read_text())
                candidates.append((spec, lct.CandidateModel.from_json(data)))
            except (OSError, ValueError, KeyError) as exc:
                _err(f"cannot load candidate: {exc}")
                return EXIT_INPUT

    certificates = []
    fatal = 0
    violations = 0
    by_axiom: dict[str, int] = {}
    for name, cand in candidates:
        cert = lct.falsify(cand, inst)
        if cert.fatal:
            fatal += 1
        else:
            violations += 1
            by_axiom[cert.violation] = by_axiom.get(cert.violation, 0) + 1
        if len(certificates) < 10:
            certificates.append({"candidate": name, "certificate": cert.to_json()})
    _dump(
        {
            "instance": inst.to_json(),
            "candidates": len(candidates),
            "violations": violations,
            "violations_by_axiom": by_axiom,
            "fatal_inconsistencies": fatal,
            "certificates": certificates,
        }
    )
    if fatal:
        _err(f"{fatal} candidate(s) produced no violation: theorem inconsistency")
        return EXIT_INCONSISTENT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bctk",
        description="Evaluate process diagrams, verify the ontological model, "
        "and run the latent-classical falsifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a circuit under both backends")
    p_eval.add_argument("file")
    p_eval.add_argument("--name", help="circuit to evaluate (default: eval directives)")
    p_eval.set_defaults(func=cmd_eval)

    p_verify = sub.add_parser("verify", help="run consistency suites")
    p_verify.add_argument(
        "--suite", default="all", choices=list(verify.SUITE_NAMES) + ["all"]
    )
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--trials", type=int, default=200)
    p_verify.add_argument("--max-dim", type=int, default=4, dest="max_dim")
    p_verify.add_argument("--backend", choices=[RATIONAL, FLOAT], default=RATIONAL)
    p_verify.add_argument("--tol", type=float, default=1e-12)
    p_verify.add_argument("--report", help="also write the JSON report to this path")
    p_verify.add_argument(
        "--corrupt", choices=["swap"], help="inject a corrupted fixture (testing only)"
    )
    p_verify.set_defaults(func=cmd_verify)

    p_embed = sub.add_parser("embed", help="dump the classical image of a gate")
    p_embed.add_argument("file")
    p_embed.add_argument("--gate", required=True)
    p_embed.set_defaults(func=cmd_embed)

    p_lct = sub.add_parser("lct", help="latent-classical demo and falsifier")
    p_lct.add_argument("action", choices=["demo", "refute"])
    p_lct.add_argument("--d1", type=int, default=2)
    p_lct.add_argument("--d2", type=int, default=2)
    p_lct.add_argument("--dl", type=int, default=2)
    p_lct.add_argument("--kappa", help="latent state as comma-separated rationals")
    p_lct.add_argument(
        "--candidate", help="builtin:bct-style or a path to a candidate JSON file"
    )
    p_lct.add_argument("--model", help="path to a candidate JSON file")
    p_lct.add_argument("--random", type=int, help="refute N seeded random candidates")
    p_lct.add_argument("--seed", type=int, default=0)
    p_lct.set_defaults(func=cmd_lct)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
