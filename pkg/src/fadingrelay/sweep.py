"""SNR sweeps of every bound, CSV output and figure rendering."""

import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import capacity_bounds as cb
from .errors import ConfigError, FadingRelayError
from .fading_number import classify_regime
from .qpsk_mi import McConfig, df_qpsk_lower, miso_qpsk_lower
from .search import SearchConfig

log = logging.getLogger(__name__)

BOUND_NAMES = (
    "direct_upper",
    "relay_miso_upper",
    "df_lower",
    "df_qpsk_lower",
    "miso_beamselect_lower",
    "miso_qpsk_lower",
)
CSV_COLUMNS = (
    "snr_db",
    "direct_upper",
    "relay_miso_upper",
    "df_lower",
    "df_qpsk_lower",
    "df_lower_combined",
    "miso_beamselect_lower",
    "miso_qpsk_lower",
    "miso_lower_combined",
)
COMBINED = {
    "df_lower_combined": ("df_lower", "df_qpsk_lower"),
    "miso_lower_combined": ("miso_beamselect_lower", "miso_qpsk_lower"),
}
BOUND_IDS = {
    "direct_upper": cb.BoundId.DIRECT_UPPER,
    "relay_miso_upper": cb.BoundId.RELAY_MISO_UPPER,
    "df_lower": cb.BoundId.DF_LOWER,
    "df_qpsk_lower": cb.BoundId.DF_QPSK_LOWER,
    "miso_beamselect_lower": cb.BoundId.MISO_BEAM_SELECT_LOWER,
    "miso_qpsk_lower": cb.BoundId.MISO_QPSK_LOWER,
}

DEFAULT_SNR_DB = (-10.0, 90.0, 21)
SWEEP_MC = McConfig(samples=100_000)


def db_to_linear(snr_db):
    return 10.0 ** (snr_db / 10.0)


def linear_to_db(snr):
    return 10.0 * math.log10(snr)


def snr_grid(lo, hi, points):
    if not lo < hi:
        raise ConfigError(f"min {lo} must be below max {hi}", "snr-db")
    if points < 2:
        raise ConfigError(f"need at least 2 points, got {points}", "snr-db")
    return tuple(float(x) for x in np.linspace(lo, hi, points))


@dataclass(frozen=True)
class SweepRequest:
    scenario: object
    snr_db: tuple
    bounds: tuple = BOUND_NAMES
    search: SearchConfig = field(default_factory=SearchConfig)
    mc: McConfig = SWEEP_MC

    def __post_init__(self):
        if not self.bounds:
            raise ConfigError("select at least one bound", "bounds")
        bad = [b for b in self.bounds if b not in BOUND_NAMES]
        if bad:
            raise ConfigError(f"unknown bound(s) {', '.join(bad)}; choose from {', '.join(BOUND_NAMES)}", "bounds")
        grid = tuple(float(x) for x in self.snr_db)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("SNR grid must be strictly increasing", "snr-db")


def _mc_point(est, snr, bid):
    args = tuple((k, v) for k, v in est.args if k != "delta_grid")
    args += (("std_error", est.std_error), ("samples", est.samples_used), ("raw_value", est.value))
    return cb.BoundPoint(snr, max(0.0, est.value), args, bid)


def evaluate_point(s, snr, name, search, mc):
    """One bound at one linear SNR, as a BoundPoint."""
    if name == "direct_upper":
        return cb.c_iid_upper(snr, search)
    if name == "relay_miso_upper":
        return cb.relay_miso_upper(s, snr, search)
    if name == "df_lower":
        return cb.df_lower(s, snr, search)
    if name == "miso_beamselect_lower":
        return cb.miso_beam_select_lower(s, snr, search)
    if name == "df_qpsk_lower":
        return _mc_point(df_qpsk_lower(s, snr, mc), snr, cb.BoundId.DF_QPSK_LOWER)
    if name == "miso_qpsk_lower":
        return _mc_point(miso_qpsk_lower(s, snr, mc), snr, cb.BoundId.MISO_QPSK_LOWER)
    raise ConfigError(f"unknown bound {name!r}", "bounds")


def _task(args):
    s, name, snr_db, search, mc = args
    try:
        return evaluate_point(s, db_to_linear(snr_db), name, search, mc), None
    except FadingRelayError as exc:
        return None, str(exc)


def run_sweep(req, workers=1):
    """Evaluate the requested bounds on the grid.

    Failed points are stored as None with a warning; the returned
    :class:`~fadingrelay.capacity_bounds.BoundSweep` is keyed by BoundId.
    With ``workers > 1`` points run in a process pool; results are always
    assembled in grid order and every point is deterministic on its own.
    """
    tasks = [(req.scenario, name, snr_db, req.search, req.mc) for name in req.bounds for snr_db in req.snr_db]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]
    points = {}
    n = len(req.snr_db)
    for k, name in enumerate(req.bounds):
        row = []
        for (point, err), snr_db in zip(results[k * n : (k + 1) * n], req.snr_db):
            if err is not None:
                log.warning("%s failed at %.6g dB: %s", name, snr_db, err)
            row.append(point)
        points[BOUND_IDS[name]] = tuple(row)
    return cb.BoundSweep(req.scenario, req.snr_db, points)


def sweep_table(sweep):
    """Columns of the CSV as {name: array}; NaN marks missing values."""
    cols = {"snr_db": np.asarray(sweep.snr_grid_db)}
    for name, bid in BOUND_IDS.items():
        if bid in sweep.points:
            cols[name] = sweep.values(bid)
    for name, parts in COMBINED.items():
        present = [cols[p] for p in parts if p in cols]
        if present:
            # a combined value needs every selected part to be available
            stacked = np.vstack(present)
            cols[name] = np.where(np.isnan(stacked).any(axis=0), np.nan, stacked.max(axis=0))
    return cols


def _fmt(x):
    return "" if not np.isfinite(x) else f"{x:.9g}"


def write_csv(sweep, fileobj):
    """CSV in nats with the fixed header; unselected bounds and failures are empty cells."""
    cols = sweep_table(sweep)
    n = len(sweep.snr_grid_db)
    fileobj.write(",".join(CSV_COLUMNS) + "\n")
    for i in range(n):
        cells = [_fmt(cols[c][i]) if c in cols else "" for c in CSV_COLUMNS]
        fileobj.write(",".join(cells) + "\n")


def csv_text(sweep):
    buf = io.StringIO()
    write_csv(sweep, buf)
    return buf.getvalue()


_STYLE = {
    "relay_miso_upper": dict(color="black", linestyle="-", label="upper bound, relay and cooperative MISO"),
    "miso_lower_combined": dict(color="tab:blue", linestyle="--", label="lower bound, cooperative MISO"),
    "df_lower_combined": dict(color="tab:red", linestyle="-.", label="lower bound, relay (decode-and-forward)"),
    "direct_upper": dict(color="tab:green", linestyle=":", label="upper bound, direct link only"),
}


def render_svg(sweep, path):
    """Single-panel capacity-vs-SNR plot written as a self-contained SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rc = {"svg.fonttype": "path", "svg.hashsalt": "fadingrelay", "path.simplify": False}
    cols = sweep_table(sweep)
    report = classify_regime(sweep.scenario)
    with plt.rc_context(rc):
        fig, ax = plt.subplots(figsize=(7.0, 4.8))
        snr_db = cols["snr_db"]
        for name, style in _STYLE.items():
            if name in cols:
                ax.plot(snr_db, cols[name], **style)
        ax.axhline(report.miso, color="tab:blue", linewidth=0.8, label="fading number, cooperative MISO")
        ax.axhline(report.lower, color="tab:red", linewidth=0.8, label="fading number lower bound, relay")
        ax.set_xlabel("SNR [dB]")
        ax.set_ylabel("rate [nats per channel use]")
        ax.set_title(f"scenario {sweep.scenario.name}")
        ax.grid(True, linewidth=0.3)
        ax.legend(fontsize=8, loc="upper left")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
