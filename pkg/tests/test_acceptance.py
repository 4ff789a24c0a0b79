"""Acceptance suite: one PASS/FAIL line per criterion.

Run on its own with ``pytest tests/test_acceptance.py -v -s`` or
``python tests/test_acceptance.py``.
"""

import io
import math
import subprocess
import sys
import time
from dataclasses import replace

import mpmath as mp
import numpy as np
import pytest

from fadingrelay.capacity_bounds import BoundId, c_iid_upper, df_lower, miso_beam_select_lower, relay_miso_upper
from fadingrelay.fading_number import (
    df_one_bit_form,
    p2p_fading_number,
    relay_lower_bound_df,
    relay_upper_bound,
)
from fadingrelay.qpsk_mi import McConfig, qpsk_mixture_mi
from fadingrelay.scenarios import builtin_scenario
from fadingrelay.simlab import SimRun, empirical_prediction_error, generate_fading_path, qpsk_mi_quadrature
from fadingrelay.specfun import ei_correction_term, expint_ei_neg, upper_incomplete_gamma
from fadingrelay.spectral import (
    SpectralModel,
    finite_memory_prediction_error,
    prediction_error,
    prediction_errors_upto,
)
from fadingrelay.sweep import BOUND_NAMES, DEFAULT_SNR_DB, SWEEP_MC, SweepRequest, run_sweep, snr_grid, sweep_table

LOG2 = math.log(2.0)
SCENARIOS = ("fig2-top", "fig2-bottom")


def verdict(capsys, n, ok, detail, elapsed=None, budget=None):
    timing = "" if elapsed is None else f" [{elapsed:.1f} s" + ("" if budget is None else f", budget {budget:g} s") + "]"
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}{timing}")
    assert ok, detail


@pytest.fixture(scope="module")
def sweeps():
    start = time.perf_counter()
    grid = snr_grid(*DEFAULT_SNR_DB)
    out = {name: run_sweep(SweepRequest(builtin_scenario(name), grid, BOUND_NAMES)) for name in SCENARIOS}
    return out, time.perf_counter() - start


def test_criterion_01_prediction_errors(capsys):
    start = time.perf_counter()
    top = builtin_scenario("fig2-top")
    e1 = prediction_error(top.link1)
    e3 = prediction_error(top.link3)
    ok = abs(e1 / 1e-4 - 1) <= 5e-3 and abs(e3 / 1e-2 - 1) <= 5e-3
    verdict(capsys, 1, ok, f"eps1^2 = {e1:.6g}, eps3^2 = {e3:.6g} (targets 1e-4, 1e-2, 0.5%)", time.perf_counter() - start)


def test_criterion_02_fading_numbers(capsys):
    start = time.perf_counter()
    vals = {
        "chi(1e-2)": (p2p_fading_number(1e-2), 3.0280),
        "chi(1e-4)": (p2p_fading_number(1e-4), 7.6331),
        "fig2-top lower": (relay_lower_bound_df(builtin_scenario("fig2-top")), 3.0180),
        "fig2-bottom lower": (relay_lower_bound_df(builtin_scenario("fig2-bottom")), 2.3348),
    }
    ok = all(abs(v - ref) <= 1e-3 for v, ref in vals.values())
    detail = ", ".join(f"{k} = {v:.4f}" for k, (v, _) in vals.items())
    verdict(capsys, 2, ok, detail, time.perf_counter() - start)


def test_criterion_03_regime_properties(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    worst_gap, worst_low, exact = 0.0, 0.0, True
    for _ in range(1000):
        e = 10 ** rng.uniform(-8, 0, 3)
        e1, e3 = sorted((e[0], e[2]))
        eps = (e1, e[1], e3)
        gap = max(p2p_fading_number(e[1]), p2p_fading_number(e3)) - relay_lower_bound_df(eps)
        worst_gap = max(worst_gap, gap)
        worst_low = min(worst_low, gap)
    for _ in range(1000):
        e = 10 ** rng.uniform(-8, 0, 3)
        e2, e3 = sorted((e[1], e[2]))
        eps = (e[0], e2, e3)
        exact &= relay_upper_bound(eps) == relay_lower_bound_df(eps)
    elapsed = time.perf_counter() - start
    ok = worst_low >= 0.0 and worst_gap <= LOG2 + 1e-12 and exact and elapsed < 1.0
    detail = f"gap to max(chi2, chi3) in [{worst_low:.3g}, {worst_gap:.12f}], direct-optimal upper == lower: {exact}"
    verdict(capsys, 3, ok, detail, elapsed, 1)


def test_criterion_04_one_bit_identity(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    chi = rng.uniform(-50, 50, (10_000, 2))
    far = rng.uniform(700, 2000, 2000) * rng.choice([-1, 1], 2000)
    chi[:2000, 1] = chi[:2000, 0] + far
    worst = 0.0
    for c1, c3 in chi:
        first = c3 - np.logaddexp(0.0, c3 - c1)
        second = c1 - np.logaddexp(0.0, c1 - c3)
        ours = df_one_bit_form(c1, c3)
        worst = max(worst, abs(first - second), abs(ours - first), abs(ours - second))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 1.0
    verdict(capsys, 4, ok, f"max disagreement {worst:.3g} over 10^4 pairs (2000 with |chi1 - chi3| > 700)", elapsed, 1)


def test_criterion_05_bound_ordering(capsys, sweeps):
    data, elapsed = sweeps
    violations = []
    for name, sw in data.items():
        upper = sw.values(BoundId.RELAY_MISO_UPPER)
        for bid in (BoundId.DF_LOWER, BoundId.DF_QPSK_LOWER, BoundId.MISO_BEAM_SELECT_LOWER, BoundId.MISO_QPSK_LOWER):
            vals = sw.values(bid)
            for snr_db, v, u in zip(sw.snr_grid_db, vals, upper):
                if not (np.isfinite(v) and np.isfinite(u) and v <= u):
                    violations.append(f"{name} {bid.value} at {snr_db:g} dB")
    top = builtin_scenario("fig2-top")
    white3 = replace(top, link3=SpectralModel.white())
    collapse = max(
        abs(relay_miso_upper(white3, 10 ** (d / 10)).value_nats - c_iid_upper(2 * 10 ** (d / 10)).value_nats)
        for d in snr_grid(*DEFAULT_SNR_DB)
    )
    ok = not violations and collapse <= 1e-12 and elapsed < 120
    detail = f"ordering violations: {violations or 'none'}; white-link collapse error {collapse:.3g}"
    verdict(capsys, 5, ok, detail, elapsed, 120)


def test_criterion_06_crossover(capsys, sweeps):
    data, _ = sweeps
    lines = []
    ok = True
    for name, sw in data.items():
        cols = sweep_table(sw)
        hi = cols["snr_db"] >= 50
        margin = np.min(cols["df_lower_combined"][hi] - cols["direct_upper"][hi])
        ok &= bool(margin > 0)
        lines.append(f"{name} min margin {margin:.4f} nats")
    verdict(capsys, 6, ok, "DF combined above direct-link upper bound at >= 50 dB: " + ", ".join(lines))


def test_criterion_07_special_functions(capsys):
    start = time.perf_counter()
    rec = 0.0
    for a in np.geomspace(0.1, 10.0, 15):
        for x in np.geomspace(0.01, 50.0, 25):
            lhs = upper_incomplete_gamma(a + 1.0, x)
            rec = max(rec, abs(lhs - a * upper_incomplete_gamma(a, x) - x**a * math.exp(-x)) / max(1.0, lhs))
    bracket = all(
        1.0 / (x + 1.0) < -ei_correction_term(x) < 1.0 / x for x in np.geomspace(1e-10, 1e5, 200)
    )
    mp.mp.dps = 30
    oracle = 0.0
    for a, x in [(0.3, 1.5), (1.0, 2.0), (2.5, 0.1), (7.0, 30.0), (0.01, 5.0)]:
        oracle = max(oracle, abs(upper_incomplete_gamma(a, x) / float(mp.gammainc(a, x)) - 1))
    for x in (0.01, 1.0, 7.5, 80.0):
        oracle = max(oracle, abs(expint_ei_neg(x) / float(mp.ei(-x)) - 1))
    oracle = max(oracle, abs(ei_correction_term(1.0) + 0.5963473623) / 0.5963473623)
    elapsed = time.perf_counter() - start
    ok = rec <= 1e-10 and bracket and oracle <= 1e-10 and elapsed < 1.0
    detail = f"recurrence error {rec:.3g}, Ei bracket holds: {bracket}, worst relative oracle error {oracle:.3g}"
    verdict(capsys, 7, ok, detail, elapsed, 1)


def test_criterion_08_mc_vs_quadrature(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(8)
    worst_z, worst_se = 0.0, 0.0
    for k in range(10):
        params = (rng.uniform(0.05, 1.0), rng.uniform(0.0, 1.0), 10 ** rng.uniform(-1, 2), rng.uniform(0.1, 2.0))
        est = qpsk_mixture_mi(*params, McConfig(seed=1000 + k, samples=1_000_000))
        worst_z = max(worst_z, abs(est.value - qpsk_mi_quadrature(*params)) / est.std_error)
        worst_se = max(worst_se, est.std_error)
    elapsed = time.perf_counter() - start
    ok = worst_z <= 3.0 and worst_se <= 0.005 and elapsed < 120
    verdict(capsys, 8, ok, f"worst |MC - quadrature| = {worst_z:.2f} SE, worst SE {worst_se:.4f} nats", elapsed, 120)


def test_criterion_09_simulation(capsys):
    start = time.perf_counter()
    top = builtin_scenario("fig2-top")
    worst = 0.0
    monotone = True
    for m in (top.link1, top.link3):
        run = SimRun(m, 1 << 18, 9)
        path = generate_fading_path(run)
        for kappa in (1, 2, 4, 8, 16, 32, 64):
            ref = finite_memory_prediction_error(m, kappa)
            worst = max(worst, abs(empirical_prediction_error(run, kappa, path=path) / ref - 1))
        errs = prediction_errors_upto(m, 64)
        monotone &= bool(np.all(np.diff(errs) <= 0) and np.all(errs >= prediction_error(m)))
    elapsed = time.perf_counter() - start
    ok = worst <= 0.05 and monotone and elapsed < 60
    detail = f"worst relative deviation {worst:.4f} (kappa <= 64, path 2^18), Levinson monotone and above eps^2: {monotone}"
    verdict(capsys, 9, ok, detail, elapsed, 60)


def test_criterion_10_asymptotics(capsys):
    start = time.perf_counter()
    top = builtin_scenario("fig2-top")
    snrs = (1e20, 1e30, 1e40)
    df = [df_lower(top, s).raw_value - math.log(math.log(s)) for s in snrs]
    beam = [miso_beam_select_lower(top, s).raw_value - math.log(math.log(s)) for s in snrs]
    df_gap, beam_gap = 3.0180 - df[-1], 3.0280 - beam[-1]
    df_ok = df[0] < df[1] < df[2] < 3.0180 and df_gap < 0.25
    beam_ok = beam[0] < beam[1] < beam[2] < 3.0280 and beam_gap < 0.25
    elapsed = time.perf_counter() - start
    detail = (
        f"DF {', '.join(f'{v:.4f}' for v in df)} (gap {df_gap:.4f}, {'ok' if df_ok else 'exceeds 0.25'}); "
        f"beam selection {', '.join(f'{v:.4f}' for v in beam)} (gap {beam_gap:.4f}, {'ok' if beam_ok else 'exceeds 0.25'})"
    )
    verdict(capsys, 10, df_ok and beam_ok and elapsed < 60, detail, elapsed, 60)


def test_criterion_11_end_to_end(capsys, tmp_path):
    outs = []
    times = []
    for k in range(2):
        csv = tmp_path / f"run{k}.csv"
        start = time.perf_counter()
        proc = subprocess.run(
            [sys.executable, "-m", "fadingrelay", "sweep", "--scenario", "fig2-top", "--csv", str(csv)],
            capture_output=True,
            text=True,
        )
        times.append(time.perf_counter() - start)
        assert proc.returncode == 0, proc.stderr
        outs.append(csv.read_bytes())
    same = outs[0] == outs[1]
    rows = len(outs[0].splitlines()) - 1
    ok = same and rows == DEFAULT_SNR_DB[2] and max(times) < 300
    detail = f"{rows} rows, byte-identical: {same}, runs took {times[0]:.1f} s and {times[1]:.1f} s"
    verdict(capsys, 11, ok, detail, max(times), 300)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
