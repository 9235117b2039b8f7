"""Command-line front end: point counts, transform checks and constant predictions."""

from __future__ import annotations

import argparse
import itertools
import logging
import math
import random
import sys
import time
from fractions import Fraction
from typing import Callable, Sequence

from . import analytic as an
from .arith import DomainError, factor, smallest_prime_factor
from .config import KEYS, ExperimentConfig, UsageError, parse_config
from .points import count_classes
from .report import CountReport, Row, absolute_row, emit_csv, relative_row, render_csv
from .torsors import count_fields, count_torsors

log = logging.getLogger("stackcount")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

S_GRID = (1.1, 1.5, 2.0, 3.0)


def _twist_product(cfg: ExperimentConfig) -> Fraction:
    out = Fraction(1)
    for c in cfg.twists.values():
        out *= c
    return out


def run_count_stack(cfg: ExperimentConfig) -> CountReport:
    cfg.require("weights", "degree", "bounds")
    a, d = cfg.weights, cfg.degree
    tol = 0.02 if cfg.tol is None else cfg.tol
    C = _twist_product(cfg)
    tau = an.toric_peyre_constant(a, an.FieldInvariants.rationals(cfg.prime_bound)).value
    rep = CountReport()
    for B in cfg.bounds:
        t0 = time.perf_counter()
        # A constant twist multiplies every height by C.
        N = count_classes(a, d, B / C, workers=cfg.threads)
        pred = tau * float(B / C) ** (a.total / d)
        log.info("count-stack a=%s d=%d B=%s: N=%d (%.2fs)", a, d, B, N, time.perf_counter() - t0)
        rep.add(relative_row("count-stack", B, N, pred, tol))
    return rep


def _torsor_rows(
    name: str,
    cfg: ExperimentConfig,
    counter: Callable[[int, Fraction], int],
    constant: float | None,
    fit_tol: float,
) -> CountReport:
    m = cfg.m
    r = smallest_prime_factor(m)
    theta = an.secondary_exponent(m) if r == 2 else None
    direct = r == 2 and theta is None
    rep = CountReport()
    counts = []
    for B in cfg.bounds:
        t0 = time.perf_counter()
        N = counter(m, B)
        counts.append(N)
        log.info("%s m=%d B=%s: N=%d (%.2fs)", name, m, B, N, time.perf_counter() - t0)
        pred = None if constant is None else constant * float(B) * math.log(B) ** (r - 2)
        tol = (0.02 if cfg.tol is None else cfg.tol) if direct and pred else None
        rep.add(relative_row(name, B, N, pred, tol))
    if direct or constant is None:
        return rep
    basis = an.count_basis(r, theta)
    need = 4 if r > 2 else len(basis)
    if len(cfg.bounds) < need:
        raise UsageError("bounds", f"fitting needs at least {need} ladder points")
    coef = an.fit_leading([float(b) for b in cfg.bounds], counts, basis)
    log.info("%s fit coefficients %s", name, coef)
    tol = fit_tol if cfg.tol is None else cfg.tol
    rep.add(relative_row(name + ":fit", cfg.bounds[-1], coef[0], constant, tol))
    return rep


def run_count_torsors(cfg: ExperimentConfig) -> CountReport:
    cfg.require("m", "bounds")
    c = an.torsor_leading_constant(cfg.m, cfg.prime_bound).value
    return _torsor_rows("count-torsors", cfg, count_torsors, c, 0.10)


def run_count_fields(cfg: ExperimentConfig) -> CountReport:
    cfg.require("m", "bounds")
    try:
        c = an.field_count_constant(cfg.m, cfg.prime_bound).value
    except DomainError as exc:
        log.warning("%s; reporting counts only", exc)
        c = None
    return _torsor_rows("count-fields", cfg, count_fields, c, 0.15)


def transform_grid_error(a, p: int, rng: random.Random, n_chars: int = 10, cutoff: int = 200) -> float:
    """Max |closed - brute| over the s grid and the trivial plus random characters."""
    chars = [an.StackCharacter.trivial(a)] + [an.StackCharacter.random(a, rng) for _ in range(n_chars)]
    worst = 0.0
    for s in itertools.product(S_GRID, repeat=len(a)):
        for chi in chars:
            err = abs(an.toric_transform_closed(a, p, s, chi) - an.toric_transform_brute(a, p, s, chi, cutoff))
            worst = max(worst, err)
    return worst


def disc_bound_worst(m: int, p: int) -> float:
    """Max over the s grid and characters of |transform / L-product| divided by its bound."""
    worst = 0.0
    for s in S_GRID:
        for k in range(m):
            chi = an.TorsorCharacter(m, k)
            lhs = abs(an.disc_transform_closed(m, p, s, chi) / an.lfactor_product(m, p, s, chi))
            worst = max(worst, lhs / an.lfactor_ratio_bound(m, s, p))
    return worst


def run_transform_check(cfg: ExperimentConfig) -> CountReport:
    if cfg.weights is None and cfg.m is None:
        raise UsageError("weights", "transform-check needs weights or m")
    primes = cfg.primes or [2, 3, 5, 7]
    for p in primes:
        if len(factor(p)) != 1 or factor(p).pairs[0][1] != 1:
            raise UsageError("primes", f"{p} is not prime")
    tol = 1e-9 if cfg.tol is None else cfg.tol
    rng = random.Random(cfg.seed)
    rep = CountReport()
    if cfg.weights is not None:
        for p in primes:
            err = transform_grid_error(cfg.weights, p, rng, cutoff=cfg.cutoff)
            log.info("transform-check a=%s p=%d: max error %.3g", cfg.weights, p, err)
            rep.add(absolute_row(f"transform-check:a={cfg.weights}:p={p}", None, err, 0.0, tol))
    if cfg.m is not None:
        for p in primes:
            if cfg.m % p == 0:
                continue
            worst = disc_bound_worst(cfg.m, p)
            rep.add(Row(f"transform-bound:m={cfg.m}:p={p}", None, worst, 1.0, 0.0, worst <= 1.0))
    return rep


def _prime_power(q: int) -> tuple[int, int]:
    f = factor(q).pairs
    if len(f) != 1:
        raise UsageError("condition", f"modulus {q} is not a prime power")
    return f[0]


def run_equidistribution(cfg: ExperimentConfig) -> CountReport:
    cfg.require("weights", "degree", "bounds", "condition")
    a, d, cond = cfg.weights, cfg.degree, cfg.condition
    if cond.index >= a.n:
        raise UsageError("condition", f"coordinate {cond.index + 1} out of range")
    p, k = _prime_power(cond.modulus)
    frac = an.local_volume_ratio(a, p, lambda c: c[cond.index] % cond.modulus in cond.residues, k)
    log.info("equidistribution: predicted fraction %s", frac)
    tol = 0.02 if cfg.tol is None else cfg.tol
    C = _twist_product(cfg)
    rep = CountReport()
    for B in cfg.bounds:
        # One pass, two counters.
        total, inside = count_classes(a, d, B / C, condition=cond, workers=cfg.threads)
        log.info("equidistribution B=%s: %d of %d", B, inside, total)
        rep.add(relative_row("equidistribution", B, inside, float(frac) * total, tol))
    return rep


def run_predict_constant(cfg: ExperimentConfig) -> CountReport:
    if cfg.weights is None and cfg.m is None:
        raise UsageError("weights", "predict-constant needs weights or m")
    rep = CountReport()
    out = []
    if cfg.weights is not None:
        c = an.toric_peyre_constant(cfg.weights, an.FieldInvariants.rationals(cfg.prime_bound), cfg.twists)
        out.append((f"toric:a={cfg.weights}", c))
    if cfg.m is not None:
        out.append((f"torsor:m={cfg.m}", an.torsor_leading_constant(cfg.m, cfg.prime_bound)))
        try:
            out.append((f"fields:m={cfg.m}", an.field_count_constant(cfg.m, cfg.prime_bound)))
        except DomainError as exc:
            log.warning("%s", exc)
    for name, c in out:
        print(f"{name} {c}")
        rep.add(Row("predict-constant:" + name, None, None, c.value, c.tail, None))
    return rep


def run_dirichlet(cfg: ExperimentConfig) -> CountReport:
    cfg.require("m", "bounds")
    tol = 1e-3 if cfg.tol is None else cfg.tol
    limit = an.dirichlet_euler_product(cfg.m, cfg.s, cfg.prime_bound).value
    rep = CountReport()
    for i, N in enumerate(cfg.bounds):
        if N.denominator != 1:
            raise UsageError("bounds", "dirichlet truncation points must be integers")
        partial = an.dirichlet_partial(cfg.m, cfg.s, int(N))
        last = i == len(cfg.bounds) - 1
        rep.add(absolute_row("dirichlet", N, partial, limit, tol if last else None))
    return rep


COMMANDS = {
    "count-stack": run_count_stack,
    "count-torsors": run_count_torsors,
    "count-fields": run_count_fields,
    "transform-check": run_transform_check,
    "equidistribution": run_equidistribution,
    "predict-constant": run_predict_constant,
    "dirichlet": run_dirichlet,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stackcount", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("-v", "--verbose", action="store_true", help="progress logging on stderr")
        sp.add_argument("--config", help="key=value file; flags override it")
        for key in KEYS:
            sp.add_argument("--" + key.replace("_", "-"), dest=key, default=None)
    return parser


def run(command: str, cfg: ExperimentConfig) -> tuple[int, CountReport]:
    rep = COMMANDS[command](cfg)
    for row in rep.failing():
        log.error("FAIL %s B=%s observed=%s predicted=%s", row.experiment, row.B, row.observed, row.predicted)
    return (EXIT_OK if rep.ok else EXIT_FAIL), rep


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    flags = {k: getattr(args, k) for k in KEYS}
    try:
        cfg = parse_config(flags, args.config)
        code, rep = run(args.command, cfg)
    except UsageError as exc:
        log.error("usage: %s", exc)
        return EXIT_USAGE
    except DomainError as exc:
        log.error("usage: %s", exc)
        return EXIT_USAGE
    except OSError as exc:
        log.error("I/O: %s", exc)
        return EXIT_IO
    try:
        if cfg.output:
            emit_csv(rep, cfg.output)
        elif args.command != "predict-constant":
            sys.stdout.write(render_csv(rep))
    except OSError as exc:
        log.error("I/O: %s", exc)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
