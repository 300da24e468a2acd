"""Command-line front end.

Every subcommand prints ``key=value`` lines (or CSV for the sweeps) to stdout
or to ``--out``. Domain errors exit with status 2 and a one-line reason on
stderr; ``loss-check`` exits with status 1 when the invariance check fails.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import analysis, classical_game as cg
from .config import RunConfig, load_config
from .equilibrium_solver import closed_form_nash, numeric_nash, transition_gamma
from .errors import ConvergenceError, DomainError, SecondOrderConditionError
from .quantum_payoff import (
    GamePoint,
    LossChannel,
    StrategyPair,
    apply_loss,
    compensate_loss,
    quantum_payoffs_closed,
    quantum_payoffs_mc,
    quantum_payoffs_series,
)

LOSS_TOLERANCE = 1e-10


class CheckFailed(Exception):
    pass


def _add_point_args(p):
    p.add_argument("--k", type=float, help="demand-minus-cost scale (>= 1)")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--gamma", type=float, help="beam-splitter angle in radians, [0, pi/4)")
    grp.add_argument("--gamma-frac", type=float, help="angle as a fraction of pi/4")


def _add_grid_args(p):
    p.add_argument("--k-min", type=float, default=1.0)
    p.add_argument("--k-max", type=float, default=20.0)
    p.add_argument("--k-steps", type=int, default=20)
    p.add_argument("--gamma-min", type=float, default=0.0)
    p.add_argument("--gamma-max", type=float, default=analysis.GAMMA_CAP)
    p.add_argument("--gamma-steps", type=int, default=21)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcournot",
        description="Asymmetric Cournot duopoly and its coherent-state simulation.",
    )
    parser.add_argument("--config", help="key=value defaults file")
    parser.add_argument("--out", help="write output here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("payoff", help="expected payoffs at given strategies")
    _add_point_args(p)
    p.add_argument("--x1-sq", type=float, required=True)
    p.add_argument("--x2-sq", type=float, required=True)
    p.add_argument("--method", choices=["closed", "series", "mc"], default="closed")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tail-tol", type=float)

    p = sub.add_parser("nash", help="equilibrium strategies and payoffs")
    _add_point_args(p)
    p.add_argument("--method", choices=["closed", "numeric"], default="closed")
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("sweep", help="CSV of equilibria over a (k, gamma) grid")
    _add_grid_args(p)
    p = sub.add_parser("regions", help="region labels over a (k, gamma) grid")
    _add_grid_args(p)

    p = sub.add_parser("loss-check", help="payoff invariance under compensated loss")
    _add_point_args(p)
    p.add_argument("--x1", type=float, required=True)
    p.add_argument("--x2", type=float, required=True)
    p.add_argument("--kappa-t", type=float, required=True, help="loss rate times exposure time")

    p = sub.add_parser("classical", help="classical asymmetric duopoly")
    p.add_argument("action", choices=["payoff", "mandel", "nash", "advantage", "poisson-eq"])
    p.add_argument("--k", type=float)
    p.add_argument("--dist", choices=["deterministic", "constant", "poisson"], default="poisson")
    p.add_argument("--sigma2", type=float, default=0.0, help="variance for --dist constant")
    p.add_argument("--q1", type=float)
    p.add_argument("--q2", type=float)
    return parser


def _point(args, cfg: RunConfig) -> GamePoint:
    k = cfg.default_k if args.k is None else args.k
    if args.gamma_frac is not None:
        gamma = args.gamma_frac * math.pi / 4
    elif args.gamma is not None:
        gamma = args.gamma
    else:
        gamma = cfg.default_gamma
    return GamePoint(k, gamma)


def _records(pairs, precision):
    lines = []
    for key, value in pairs:
        if isinstance(value, float):
            value = analysis.format_number(value, precision)
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


def cmd_payoff(args, cfg):
    g = _point(args, cfg)
    s = StrategyPair.from_squares(args.x1_sq, args.x2_sq)
    if args.method == "closed":
        u1, u2 = quantum_payoffs_closed(s, g)
        return [("u1", u1), ("u2", u2)]
    if args.method == "series":
        tol = cfg.series_tail_tol if args.tail_tol is None else args.tail_tol
        u1, u2 = quantum_payoffs_series(s, g, tol)
        return [("u1", u1), ("u2", u2)]
    n = cfg.mc_samples if args.samples is None else args.samples
    seed = cfg.mc_seed if args.seed is None else args.seed
    est = quantum_payoffs_mc(s, g, n, seed)
    return [("u1", est.u1), ("u2", est.u2), ("stderr2", est.stderr2)]


def cmd_nash(args, cfg):
    g = _point(args, cfg)
    eq = closed_form_nash(g) if args.method == "closed" else numeric_nash(g, args.tol)
    out = [
        ("x1_sq", eq.x1_sq),
        ("x2_sq", eq.x2_sq),
        ("U1", eq.U1),
        ("U2", eq.U2),
        ("branch", eq.branch.value),
    ]
    gc = transition_gamma(g.k)
    if gc is not None:
        out.append(("gamma_c", gc))
    return out


def _grid(args):
    return (
        analysis.GridSpec(args.k_min, args.k_max, args.k_steps),
        analysis.GridSpec(args.gamma_min, args.gamma_max, args.gamma_steps),
    )


def cmd_loss_check(args, cfg):
    g = _point(args, cfg)
    s = StrategyPair(args.x1, args.x2)
    if not args.kappa_t >= 0:
        raise DomainError(f"kappa-t must be nonnegative, got {args.kappa_t}")
    ch = LossChannel(args.kappa_t, 1.0)
    before = quantum_payoffs_closed(s, g)
    after = quantum_payoffs_closed(apply_loss(compensate_loss(s, ch), ch), g)
    dev = max(abs(a - b) for a, b in zip(before, after))
    out = [
        ("u1_before", before[0]),
        ("u2_before", before[1]),
        ("u1_after", after[0]),
        ("u2_after", after[1]),
        ("max_deviation", dev),
    ]
    return out, dev <= LOSS_TOLERANCE


def _distribution(args):
    if args.dist == "deterministic":
        return cg.CountDistribution.deterministic()
    if args.dist == "constant":
        return cg.CountDistribution.constant(args.sigma2)
    return cg.CountDistribution.poisson()


def _need(value, flag):
    if value is None:
        raise DomainError(f"{flag} is required for this action")
    return value


def cmd_classical(args, cfg):
    k = cfg.default_k if args.k is None else args.k
    dist = _distribution(args)
    if args.action == "payoff":
        q = cg.ClassicalQuantities(_need(args.q1, "--q1"), _need(args.q2, "--q2"), k)
        u1, u2 = cg.classical_payoffs(q, dist)
        return [("u1", u1), ("u2", u2)]
    if args.action == "mandel":
        Q, g2 = cg.mandel_q(dist, _need(args.q2, "--q2"))
        return [("Q", Q), ("g2", g2)]
    if args.action == "nash":
        q1, q2 = cg.general_nash(dist, k)
        u1, u2 = cg.classical_payoffs(cg.ClassicalQuantities(q1, q2, k), dist)
        return [("q1", q1), ("q2", q2), ("u1", u1), ("u2", u2)]
    if args.action == "advantage":
        return [("firm2_advantage", str(cg.firm2_advantage(dist, k)).lower())]
    q1, q2, u1, u2 = cg.poisson_case_equilibrium(k)
    return [("q1", q1), ("q2", q2), ("u1", u1), ("u2", u2)]


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        ok = True
        if args.command == "payoff":
            text = _records(cmd_payoff(args, cfg), cfg.output_precision)
        elif args.command == "nash":
            text = _records(cmd_nash(args, cfg), cfg.output_precision)
        elif args.command in ("sweep", "regions"):
            table = analysis.sweep(*_grid(args))
            if args.command == "sweep":
                text = table.to_csv(cfg.output_precision)
            else:
                text = table.to_region_csv(cfg.output_precision)
        elif args.command == "loss-check":
            pairs, ok = cmd_loss_check(args, cfg)
            text = _records(pairs, cfg.output_precision)
        else:
            text = _records(cmd_classical(args, cfg), cfg.output_precision)

        if args.out:
            try:
                Path(args.out).write_text(text)
            except OSError as exc:
                raise DomainError(f"cannot write {args.out}: {exc.strerror}") from None
        else:
            sys.stdout.write(text)
        if not ok:
            print(f"error: deviation exceeds {LOSS_TOLERANCE:g}", file=sys.stderr)
            return 1
        return 0
    except (DomainError, ConvergenceError, SecondOrderConditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run(argv))
