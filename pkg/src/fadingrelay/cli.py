"""Command-line entry point: ``fadingrelay report | sweep | validate``.

Exit codes: 0 success, 1 failed checks or a bound that failed at every grid
point, 2 configuration errors.
"""

import argparse
import logging
import math
import sys
import time

from .errors import ConfigError, FadingRelayError
from .fading_number import LOG2, classify_regime
from .qpsk_mi import McConfig, effective_snr, qpsk_mixture_mi
from .scenarios import load_scenario
from .search import SearchConfig
from .simlab import SimRun, empirical_prediction_error, generate_fading_path, qpsk_mi_quadrature
from .spectral import finite_memory_prediction_error, noisy_prediction_error
from .sweep import BOUND_NAMES, DEFAULT_SNR_DB, SWEEP_MC, SweepRequest, run_sweep, snr_grid, write_csv, render_svg

log = logging.getLogger("fadingrelay")


def _parse_snr_db(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected min:max:points, got {text!r}", "snr-db")
    try:
        lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"expected min:max:points, got {text!r}", "snr-db") from exc
    if points == 1 and lo == hi:
        return (lo,)
    return snr_grid(lo, hi, points)


def _parse_bounds(text):
    if text in (None, "all"):
        return BOUND_NAMES
    names = tuple(b.strip() for b in text.split(",") if b.strip())
    bad = [b for b in names if b not in BOUND_NAMES]
    if bad or not names:
        raise ConfigError(f"unknown bound(s) {', '.join(bad) or '(none)'}; choose from {', '.join(BOUND_NAMES)}", "bounds")
    return names


def _mc_config(args, default):
    try:
        return McConfig(
            seed=default.seed if args.seed is None else args.seed,
            samples=default.samples if args.samples is None else args.samples,
        )
    except FadingRelayError as exc:
        raise ConfigError(str(exc), "samples" if "samples" in str(exc) else "seed") from exc


def _units(x, bits_first):
    nats = f"{x:.4f} nats"
    bits = f"{x / LOG2:.4f} bits"
    return f"{bits} ({nats})" if bits_first else f"{nats} ({bits})"


def format_report(s, bits=False):
    r = classify_regime(s)
    lines = [f"scenario: {s.name}  (rho = {s.rho:g}, sigma_sq = {s.sigma_sq:g})"]
    for k, (e, chi) in enumerate(zip(r.eps_sq, (r.chi1, r.chi2, r.chi3)), start=1):
        lines.append(f"link{k}: eps^2 = {e:.6g}  chi{k} = {_units(chi, bits)}")
    lines.append(f"relay fading number upper bound: {_units(r.upper, bits)}")
    lines.append(f"relay fading number lower bound (decode-and-forward): {_units(r.lower, bits)}")
    lines.append(f"cooperative MISO fading number: {_units(r.miso, bits)}")
    lines.append(f"gap to MISO: {_units(r.gap_to_miso, bits)}")
    flags = sorted(f.value for f in r.flags)
    lines.append(f"regime: {r.regime.value}  (conditions met: {', '.join(flags) if flags else 'none'})")
    lines.append(f"optimal power split alpha: {r.optimal_alpha:.6g}")
    return "\n".join(lines)


def cmd_report(args):
    s = load_scenario(args.scenario)
    print(format_report(s, bits=args.bits))
    return 0


def cmd_sweep(args):
    s = load_scenario(args.scenario)
    grid = _parse_snr_db(args.snr_db) if args.snr_db else snr_grid(*DEFAULT_SNR_DB)
    req = SweepRequest(s, grid, _parse_bounds(args.bounds), SearchConfig(), _mc_config(args, SWEEP_MC))
    sweep = run_sweep(req, workers=args.workers)
    if args.csv in (None, "-"):
        write_csv(sweep, sys.stdout)
    else:
        with open(args.csv, "w", newline="", encoding="ascii") as fh:
            write_csv(sweep, fh)
    if args.svg:
        render_svg(sweep, args.svg)
    dead = [bid.value for bid, pts in sweep.points.items() if all(p is None for p in pts)]
    if dead:
        print(f"error: bound(s) failed at every grid point: {', '.join(dead)}", file=sys.stderr)
        return 1
    return 0


# -- validation -----------------------------------------------------------

_LEVELS = {
    "quick": dict(path_length=1 << 16, memories=(2, 8, 32), mc_samples=100_000, snr_db=(0.0, 10.0)),
    "full": dict(path_length=1 << 18, memories=(2, 8, 32, 64), mc_samples=1_000_000, snr_db=(-10.0, 0.0, 10.0, 20.0)),
}
PREDICTION_RTOL = 0.05
MI_SIGMAS = 3.0


def validation_checks(s, seed, level):
    """Yield (name, analytic, empirical, tolerance, passed) tuples."""
    cfg = _LEVELS[level]
    seen = {}
    for k, m in enumerate(s.links, start=1):
        key = m
        if key in seen:
            continue
        seen[key] = k
        run = SimRun(m, cfg["path_length"], seed)
        path = generate_fading_path(run)
        for kappa in cfg["memories"]:
            analytic = finite_memory_prediction_error(m, kappa)
            emp = empirical_prediction_error(run, kappa, path=path)
            tol = PREDICTION_RTOL * analytic
            yield (f"link{k} prediction error, memory {kappa}", analytic, emp, tol, abs(emp - analytic) <= tol)
    mc = McConfig(seed=seed, samples=cfg["mc_samples"])
    gain = 1.0 + s.rho**2
    for snr_db in cfg["snr_db"]:
        snr = 10.0 ** (snr_db / 10.0)
        for k in (1, 3):
            eps2 = noisy_prediction_error(s.links[k - 1], 1.0 / (gain * snr))
            params = (max(1.0 - eps2, 0.0), eps2, gain * snr * s.sigma_sq, s.sigma_sq)
            if effective_snr(*params) == 0.0:
                continue
            quad = qpsk_mi_quadrature(*params)
            est = qpsk_mixture_mi(*params, mc)
            tol = MI_SIGMAS * est.std_error
            name = f"link{k} QPSK mutual information at {snr_db:g} dB"
            yield (name, quad, est.value, tol, abs(est.value - quad) <= tol)


def cmd_validate(args):
    s = load_scenario(args.scenario)
    seed = 0 if args.seed is None else args.seed
    start = time.perf_counter()
    failed = 0
    total = 0
    print(f"validating scenario {s.name} (level {args.level}, seed {seed})")
    print(f"{'check':<44} {'analytic':>14} {'empirical':>14} {'tolerance':>11}  result")
    for name, analytic, emp, tol, ok in validation_checks(s, seed, args.level):
        total += 1
        failed += not ok
        print(f"{name:<44} {analytic:>14.8g} {emp:>14.8g} {tol:>11.3g}  {'ok' if ok else 'FAIL'}")
    elapsed = time.perf_counter() - start
    print(f"{total - failed}/{total} checks passed in {elapsed:.1f} s")
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(prog="fadingrelay", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", default="fig2-top", help="built-in name (fig2-top, fig2-bottom) or TOML file")
        p.add_argument("--seed", type=int, default=None, help="Monte-Carlo / simulation seed (u64)")

    p = sub.add_parser("report", help="fading numbers and regime of a scenario")
    common(p)
    p.add_argument("--bits", action="store_true", help="show bits first (nats are always shown)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", help="evaluate capacity bounds over an SNR grid")
    common(p)
    p.add_argument("--snr-db", default=None, help="min:max:points in dB (default -10:90:21)")
    p.add_argument("--bounds", default="all", help=f"comma list from {', '.join(BOUND_NAMES)}, or 'all'")
    p.add_argument("--samples", type=int, default=None, help=f"Monte-Carlo samples (default {SWEEP_MC.samples})")
    p.add_argument("--csv", default=None, help="CSV output path (default stdout)")
    p.add_argument("--svg", default=None, help="SVG plot output path")
    p.add_argument("--workers", type=int, default=1, help="parallel processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="check analytic formulas against simulation")
    common(p)
    p.add_argument("--level", choices=sorted(_LEVELS), default="quick")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="warning: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", None) is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("must be a 64-bit unsigned integer", "seed")
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FadingRelayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
