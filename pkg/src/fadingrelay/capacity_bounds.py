"""Nonasymptotic capacity bounds for the peak-power-limited fading relay channel.

Each bound is available as an explicit objective of its free parameters and
as an optimized value (a :class:`BoundPoint`).  SNR is linear everywhere in
this module, values are in nats.

The objectives are written in the log domain so that SNRs up to 1e40 and
parameters down to 1e-40 neither overflow nor lose the leading terms.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError
from .search import Direction, Scale, SearchConfig, optimize_box
from .specfun import (
    EULER_GAMMA,
    ei_correction_term,
    ei_correction_term_array,
    log_upper_incomplete_gamma,
    log_upper_incomplete_gamma_array,
)

# open (0, 1) parameter domains are searched on [OPEN_EDGE, 1 - OPEN_EDGE]
OPEN_EDGE = 1e-6

C_IID_ALPHA_BOX = (1e-3, 5.0)
C_IID_DELTA_BOX = (1e-4, 50.0)


class BoundId(enum.Enum):
    DIRECT_UPPER = "DirectUpper"
    RELAY_MISO_UPPER = "RelayMisoUpper"
    DF_LOWER = "DfLower"
    MISO_BEAM_SELECT_LOWER = "MisoBeamSelectLower"
    MISO_QPSK_LOWER = "MisoQpskLower"
    DF_QPSK_LOWER = "DfQpskLower"

    @property
    def is_lower(self):
        return self not in (BoundId.DIRECT_UPPER, BoundId.RELAY_MISO_UPPER)


@dataclass(frozen=True)
class BoundPoint:
    """One optimized bound value.

    ``optimizer_args`` holds (name, value) pairs: the free parameters at the
    optimum followed by diagnostics such as ``raw_value`` (lower bounds are
    reported as max(0, raw)) and ``evals``.
    """

    snr: float
    value_nats: float
    optimizer_args: tuple
    bound_id: BoundId

    def __post_init__(self):
        if not math.isfinite(self.value_nats):
            raise DomainError(f"{self.bound_id.value} value is not finite")

    def arg(self, name):
        for key, value in self.optimizer_args:
            if key == name:
                return value
        raise KeyError(name)

    @property
    def raw_value(self):
        try:
            return self.arg("raw_value")
        except KeyError:
            return self.value_nats


@dataclass(frozen=True)
class BoundSweep:
    scenario: object
    snr_grid_db: tuple
    points: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = tuple(float(x) for x in self.snr_grid_db)
        object.__setattr__(self, "snr_grid_db", grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("snr_grid_db must be strictly increasing")
        for bid, pts in self.points.items():
            if len(pts) != len(grid):
                raise DomainError(f"{bid.value} has {len(pts)} points for {len(grid)} grid entries")

    def values(self, bid):
        return np.array([p.value_nats if p is not None else np.nan for p in self.points[bid]])


def _check_snr(snr):
    snr = float(snr)
    if not (snr > 0.0 and math.isfinite(snr)):
        raise DomainError(f"snr must be positive and finite, got {snr!r}")
    return snr


def _check_open_unit(name, x):
    x = float(x)
    if not 0.0 < x < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {x!r}")
    return x


def _require_white_link2(s):
    if not s.link2.is_white:
        raise PreconditionError("the transmitter-receiver link (link2) must be white (memoryless)")


def _log_integral(m, offset):
    """Vectorized integral of log(F'(lambda) + offset) over one period."""
    offset = np.asarray(offset, dtype=float)
    if m.is_white:
        return np.log1p(offset)
    two_theta = 2.0 * m.theta
    return two_theta * np.log(m.upsilon + offset) + (1.0 - two_theta) * np.log(m.lam + offset)


def _eic(u):
    """exp(u) Ei(-u) on arrays; NaN where u underflowed to 0, -1/u where u is huge."""
    u = np.asarray(u, dtype=float)
    out = np.full(u.shape, np.nan)
    ok = (u > 0.0) & (u < 1e300)
    out[ok] = ei_correction_term_array(u[ok])
    big = u >= 1e300
    out[big] = -1.0 / u[big]
    return out


def _best_lower(raw, args, evals, bid, snr):
    pairs = tuple(args) + (("raw_value", float(raw)), ("evals", int(evals)))
    return BoundPoint(snr, max(0.0, float(raw)), pairs, bid)


# -- direct link, i.i.d. fading -------------------------------------------


def _c_iid_terms(snr, alpha, beta, delta):
    alpha, beta, delta = np.broadcast_arrays(
        np.asarray(alpha, dtype=float), np.asarray(beta, dtype=float), np.asarray(delta, dtype=float)
    )
    return (
        -1.0
        + alpha * np.log(beta / delta)
        + log_upper_incomplete_gamma_array(alpha, delta / beta)
        + np.log(delta)
        - (1.0 - alpha) * ei_correction_term_array(delta)
        + (snr + 1.0) / beta
        + delta / beta
    )


def c_iid_upper_objective(snr, alpha, beta, delta):
    """Upper-bound objective for a memoryless Gaussian fading link, nats.

    Every positive (alpha, beta, delta) gives a valid upper bound on the
    capacity at ``snr``; the bound is the infimum over the triple.
    Requires alpha <= 50 (incomplete-gamma range).
    """
    snr = _check_snr(snr)
    for name, x in (("alpha", alpha), ("beta", beta), ("delta", delta)):
        if not (float(x) > 0.0 and math.isfinite(x)):
            raise DomainError(f"{name} must be positive and finite, got {x!r}")
    return (
        -1.0
        + alpha * math.log(beta / delta)
        + log_upper_incomplete_gamma(alpha, delta / beta)
        + math.log(delta)
        - (1.0 - alpha) * ei_correction_term(delta)
        + (snr + 1.0) / beta
        + delta / beta
    )


def c_iid_box(snr):
    return [C_IID_ALPHA_BOX, (1e-2, 1e4 * (snr + 1.0)), C_IID_DELTA_BOX]


def c_iid_upper(snr, search=None):
    """Optimized direct-link upper bound (infimum over alpha, beta, delta)."""
    snr = _check_snr(snr)
    cfg = search or SearchConfig()
    scales = tuple(cfg.scale) or (Scale.LOG,) * 3
    res = optimize_box(
        lambda a, b, d: _c_iid_terms(snr, a, b, d),
        c_iid_box(snr),
        Direction.MIN,
        cfg,
        scales=scales,
        vectorized=True,
    )
    args = tuple(zip(("alpha", "beta", "delta"), res.arg)) + (("evals", res.evals),)
    return BoundPoint(snr, res.value, args, BoundId.DIRECT_UPPER)


# -- relay / cooperative upper bound --------------------------------------


def relay_miso_upper(s, snr, search=None, direct=None):
    """Upper bound shared by the relay channel and its cooperative MISO version.

    The direct-link bound at power snr(1 + rho^2) plus a correction for the
    memory of the relay-receiver link.  ``direct`` may carry a precomputed
    :func:`c_iid_upper` result at that power.
    """
    _require_white_link2(s)
    snr = _check_snr(snr)
    gain = 1.0 + s.rho**2
    xi = 1.0 / (gain * snr)
    if direct is None:
        direct = c_iid_upper(snr * gain, search)
    correction = math.log1p(xi) - float(_log_integral(s.link3, xi))
    args = tuple(p for p in direct.optimizer_args) + (("memory_correction", correction),)
    return BoundPoint(snr, direct.value_nats + correction, args, BoundId.RELAY_MISO_UPPER)


# -- decode-and-forward lower bound ---------------------------------------


def _df_terms(s, snr, delta, alpha, delta_r):
    delta, alpha, delta_r = np.broadcast_arrays(
        np.asarray(delta, dtype=float), np.asarray(alpha, dtype=float), np.asarray(delta_r, dtype=float)
    )
    ls = math.log(snr)
    lsig = math.log(s.sigma_sq)
    lrho2 = 2.0 * math.log(s.rho)
    ld = np.log(delta)
    ldr = np.log(delta_r)

    # transmitter -> relay
    base = (1.0 - alpha) * lsig - alpha * ls
    r_tr = (
        base
        - alpha * ld
        - _log_integral(s.link1, np.exp(base - 2.0 * alpha * ld))
        - _eic(np.exp(base + 1.0 - np.log(alpha * -2.0 * ld) - alpha * ld))
    )

    # relay -> receiver; log of alpha log(1/delta^2) delta^alpha snr^alpha sigma^(2(alpha-1))
    log_k = np.log(alpha * -2.0 * ld) + alpha * ld + alpha * ls + (alpha - 1.0) * lsig
    tail = ldr + lrho2 + ls
    r_rr = (
        np.logaddexp(0.0, log_k - (EULER_GAMMA + 1.0))
        - tail
        - _log_integral(
            s.link3,
            np.exp((alpha - 1.0) * lsig - 2.0 * ldr - lrho2 - (1.0 - alpha) * ls) + np.exp(-2.0 * ldr - lrho2 - ls),
        )
        - _eic(np.exp(np.logaddexp(log_k - EULER_GAMMA, 1.0) - np.log(-2.0 * ldr) - tail))
    )
    return r_tr, r_rr


def df_lower_objective(s, snr, delta, alpha, delta_r):
    """The two decode-and-forward rate expressions (r_tr, r_rr) in nats.

    r_tr is the rate the relay can decode, r_rr the rate the receiver can
    decode with the relay's help.  Evaluated with the printed mix of
    delta^alpha and delta^(2 alpha) in the transmitter-relay term.
    """
    snr = _check_snr(snr)
    delta = _check_open_unit("delta", delta)
    alpha = _check_open_unit("alpha", alpha)
    delta_r = _check_open_unit("delta_r", delta_r)
    with np.errstate(over="ignore", divide="ignore"):
        r_tr, r_rr = _df_terms(s, snr, delta, alpha, delta_r)
    return float(r_tr), float(r_rr)


def _delta_box(snr):
    return (min(OPEN_EDGE, 1.0 / snr), 1.0 - OPEN_EDGE)


def df_lower(s, snr, search=None):
    """Optimized decode-and-forward lower bound, clamped at 0."""
    _require_white_link2(s)
    snr = _check_snr(snr)
    cfg = search or SearchConfig()
    scales = tuple(cfg.scale) or (Scale.LOG, Scale.LINEAR, Scale.LOG)
    dbox = _delta_box(snr)

    def objective(d, a, dr):
        r_tr, r_rr = _df_terms(s, snr, d, a, dr)
        return np.minimum(r_tr, r_rr)

    res = optimize_box(
        objective,
        [dbox, (OPEN_EDGE, 1.0 - OPEN_EDGE), dbox],
        Direction.MAX,
        cfg,
        scales=scales,
        vectorized=True,
    )
    return _best_lower(res.value, zip(("delta", "alpha", "delta_r"), res.arg), res.evals, BoundId.DF_LOWER, snr)


# -- beam selection on the cooperative channel ----------------------------


def _beam_term(m, q, delta):
    delta = np.asarray(delta, dtype=float)
    lq = math.log(q)
    ld = np.log(delta)
    return -ld - lq - _log_integral(m, np.exp(-2.0 * ld - lq)) - _eic(np.exp(1.0 - np.log(-2.0 * ld) - ld - lq))


def beam_select_objective(s, snr, delta):
    """(R_2, R_3): single-antenna rates from the transmitter and from the relay.

    Both use the relaxed sum peak power snr(1 + rho^2).
    """
    snr = _check_snr(snr)
    delta = _check_open_unit("delta", delta)
    q = snr * (1.0 + s.rho**2)
    with np.errstate(over="ignore", divide="ignore"):
        return float(_beam_term(s.link2, q, delta)), float(_beam_term(s.link3, q, delta))


def miso_beam_select_lower(s, snr, search=None):
    """Optimized beam-selection lower bound on the cooperative MISO channel, clamped at 0."""
    snr = _check_snr(snr)
    cfg = search or SearchConfig()
    scales = tuple(cfg.scale) or (Scale.LOG,)
    q = snr * (1.0 + s.rho**2)
    best = None
    for antenna, m in ((2, s.link2), (3, s.link3)):
        res = optimize_box(
            lambda d, m=m: _beam_term(m, q, d),
            [_delta_box(snr)],
            Direction.MAX,
            cfg,
            scales=scales,
            vectorized=True,
        )
        # ties keep the transmitter antenna
        if best is None or res.value > best[1].value:
            best = (antenna, res)
    antenna, res = best
    args = (("delta", res.arg[0]), ("antenna", antenna))
    return _best_lower(res.value, args, 2 * res.evals, BoundId.MISO_BEAM_SELECT_LOWER, snr)
