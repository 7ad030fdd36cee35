"""Command-line interface.

Exit codes are shared by every subcommand: 0 when the check passes (or the
relation holds), 1 when it is violated (or does not hold), 2 on malformed
input or configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .fixtures import (
    FixtureError,
    form_from_json,
    load_json,
    to_jsonable,
    vector_from_json,
    vector_to_json,
)
from .forms import NotStrong, PreservationViolated, UnsupportedShape, factorize_pair, preservation_check
from .module import ToleranceConfig
from .orthogonality import (
    bj_orthogonal_minimize,
    bj_orthogonal_witness,
    ip_orthogonal,
    modulus_condition,
    reversed_action_condition,
    squared_modulus_condition,
    strong_bj_orthogonal,
)
from .suites import SUITES, example_2_1_data, run_suite

log = logging.getLogger("cstarmod")

EXIT_PASS, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2

RELATIONS = {
    "ip": lambda x, y, cfg, seed: ip_orthogonal(x, y, cfg),
    "bj": lambda x, y, cfg, seed: bj_orthogonal_minimize(x, y, cfg),
    "bj-state": lambda x, y, cfg, seed: bj_orthogonal_witness(x, y, cfg),
    "sbj": lambda x, y, cfg, seed: strong_bj_orthogonal(x, y, cfg),
    "reversed": lambda x, y, cfg, seed: reversed_action_condition(x, y, cfg, seed=seed),
    "mod": lambda x, y, cfg, seed: modulus_condition(x, y, cfg, seed=seed),
    "mod2": lambda x, y, cfg, seed: squared_modulus_condition(x, y, cfg, seed=seed),
}


class ConfigError(Exception):
    pass


def _shape_arg(values: list[str]) -> tuple[int, ...]:
    dims = []
    for v in values:
        for part in v.replace("(", "").replace(")", "").split(","):
            if part.strip():
                try:
                    dims.append(int(part))
                except ValueError:
                    raise ConfigError(f"--shape: {part!r} is not an integer") from None
    if not dims or any(d < 1 for d in dims):
        raise ConfigError("--shape needs positive block sizes, e.g. --shape 2 or --shape 1,1")
    return tuple(dims)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", type=Path, help="write JSON here instead of stdout")
    p.add_argument("--tol-eq", type=float, default=ToleranceConfig.eq_tol)
    p.add_argument("--tol-psd", type=float, default=ToleranceConfig.psd_tol)
    p.add_argument("--tol-opt", type=float, default=ToleranceConfig.opt_tol)
    p.add_argument("--tol-sing", type=float, default=ToleranceConfig.sing_tol)
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cstarmod", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-orth", help="decide one orthogonality relation for x, y")
    p.add_argument("--relation", required=True, choices=sorted(RELATIONS))
    p.add_argument("--x", required=True, type=Path)
    p.add_argument("--y", required=True, type=Path)
    _common(p)

    p = sub.add_parser("factorize", help="find c with F = cE")
    p.add_argument("--E", required=True, type=Path)
    p.add_argument("--F", required=True, type=Path)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--experimental", action="store_true",
                   help="allow arity-2 forms over non-abelian algebras")
    _common(p)

    p = sub.add_parser("preserve-check", help="test E(x)=0 => F(x)=0 on kernel tuples")
    p.add_argument("--E", required=True, type=Path)
    p.add_argument("--F", required=True, type=Path)
    p.add_argument("--trials", type=int, default=100)
    _common(p)

    p = sub.add_parser("run-suite", help="run a verification suite")
    p.add_argument("--id", required=True, choices=sorted(SUITES))
    p.add_argument("--shape", nargs="+")
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int, help="form arity (factorization, invertibility)")
    p.add_argument("--trials", type=int)
    _common(p)

    p = sub.add_parser("reproduce", help="reproduce a worked example")
    p.add_argument("--example", required=True, choices=["2.1"])
    _common(p)

    p = sub.add_parser("export-example", help="write the worked example's x and y as fixtures")
    p.add_argument("--example", required=True, choices=["2.1"])
    p.add_argument("--dir", required=True, type=Path)
    return parser


def _config(args) -> ToleranceConfig:
    try:
        return ToleranceConfig(args.tol_eq, args.tol_psd, args.tol_opt, args.tol_sing)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _emit(args, payload: dict):
    text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True)
    if args.out is not None:
        args.out.write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _check_orth(args, cfg) -> int:
    x = vector_from_json(load_json(args.x))
    y = vector_from_json(load_json(args.y))
    if x.shape != y.shape or x.k != y.k:
        raise ConfigError(f"x lives in A^{x.k} over {list(x.shape.block_dims)}, "
                          f"y in A^{y.k} over {list(y.shape.block_dims)}")
    verdict = RELATIONS[args.relation](x, y, cfg, args.seed)
    _emit(args, {"verdict": verdict, "seed": args.seed, "config": cfg.to_dict()})
    return EXIT_PASS if verdict.holds else EXIT_VIOLATION


def _load_pair(args):
    E = form_from_json(load_json(args.E))
    F = form_from_json(load_json(args.F))
    if (E.shape, E.k, E.n) != (F.shape, F.k, F.n):
        raise ConfigError("E and F must have the same shape, rank and arity")
    return E, F


def _factorize(args, cfg) -> int:
    E, F = _load_pair(args)
    try:
        res = factorize_pair(E, F, cfg, seed=args.seed, samples=args.samples,
                             experimental=args.experimental)
    except PreservationViolated as exc:
        _emit(args, {"status": "violated", "message": str(exc), "witness": list(exc.witness),
                     "value": exc.value, "seed": args.seed, "config": cfg.to_dict()})
        return EXIT_VIOLATION
    except (NotStrong, UnsupportedShape) as exc:
        raise ConfigError(str(exc)) from None
    _emit(args, {"status": "factorized", "result": res, "seed": args.seed,
                 "config": cfg.to_dict()})
    return EXIT_PASS


def _preserve_check(args, cfg) -> int:
    E, F = _load_pair(args)
    try:
        rep = preservation_check(E, F, args.trials, args.seed, cfg)
    except NotStrong as exc:
        raise ConfigError(str(exc)) from None
    _emit(args, rep.to_dict())
    return EXIT_PASS if rep.passed else EXIT_VIOLATION


def _run_suite(args, cfg) -> int:
    extra = {}
    if args.n is not None:
        if args.id not in ("factorization", "invertibility"):
            raise ConfigError(f"--n does not apply to suite {args.id}")
        extra["n"] = args.n
    shape = _shape_arg(args.shape) if args.shape else None
    if args.k is not None and args.k < 1 or args.trials is not None and args.trials < 1:
        raise ConfigError("--k and --trials must be positive")
    try:
        rep = run_suite(args.id, shape, args.k, args.trials, args.seed, cfg, **extra)
    except (ValueError, NotStrong) as exc:
        raise ConfigError(str(exc)) from None
    _emit(args, rep.to_dict())
    return EXIT_PASS if rep.passed else EXIT_VIOLATION


def _reproduce(args, cfg) -> int:
    rep = run_suite("example-2-1", seed=args.seed, cfg=cfg)
    _emit(args, rep.to_dict())
    return EXIT_PASS if rep.passed else EXIT_VIOLATION


def _export_example(args) -> int:
    x, y = example_2_1_data()
    args.dir.mkdir(parents=True, exist_ok=True)
    for name, v in (("x", x), ("y", y)):
        (args.dir / f"{name}.json").write_text(json.dumps(vector_to_json(v), indent=2) + "\n")
    return EXIT_PASS


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * getattr(args, "verbose", 0),
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        if args.command == "export-example":
            return _export_example(args)
        cfg = _config(args)
        log.info("running %s with seed %d", args.command, args.seed)
        handler = {"check-orth": _check_orth, "factorize": _factorize,
                   "preserve-check": _preserve_check, "run-suite": _run_suite,
                   "reproduce": _reproduce}[args.command]
        return handler(args, cfg)
    except (FixtureError, ConfigError) as exc:
        print(f"cstarmod: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
