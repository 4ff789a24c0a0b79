"""Spectral models of the fading processes and the quantities derived from them.

A fading link is described by its spectral density F'(lambda) on
[-1/2, 1/2].  Two families are supported: white (memoryless) fading with
F' = 1, and a two-level piecewise-constant density

    F'(lambda) = upsilon   for |lambda| <= theta
                 lam       for theta < |lambda| <= 1/2

normalized to unit variance, 2*upsilon*theta + (1 - 2*theta)*lam = 1.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize

from .errors import DomainError, IllConditionedError, InfeasibleTargetError

UNIT_VARIANCE_TOL = 1e-9
MAX_CONDITION = 1e6


class SpectrumKind(enum.Enum):
    WHITE = "white"
    PIECEWISE = "piecewise"


@dataclass(frozen=True)
class SpectralModel:
    """Unit-variance spectral density of one fading link.

    Use :meth:`white` or :meth:`piecewise` rather than the constructor.
    """

    kind: SpectrumKind
    upsilon: float = 1.0
    lam: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        if self.kind is SpectrumKind.WHITE:
            return
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise DomainError(f"out-of-band level must be positive (regular fading), got {self.lam!r}")
        if not (self.upsilon > 0.0 and math.isfinite(self.upsilon)):
            raise DomainError(f"in-band level must be positive, got {self.upsilon!r}")
        if not 0.0 < self.theta < 0.5:
            raise DomainError(f"band edge must lie in (0, 1/2), got {self.theta!r}")

    @classmethod
    def white(cls):
        return cls(SpectrumKind.WHITE)

    @classmethod
    def piecewise(cls, upsilon, lam, theta, variance_tol=UNIT_VARIANCE_TOL):
        """Two-level density; rejects parameters whose total power is not 1."""
        model = cls(SpectrumKind.PIECEWISE, float(upsilon), float(lam), float(theta))
        total = model.total_power()
        if abs(total - 1.0) > variance_tol:
            raise DomainError(
                f"spectral density integrates to {total:.12g}, not 1 "
                f"(tolerance {variance_tol:g})"
            )
        return model

    @property
    def is_white(self):
        return self.kind is SpectrumKind.WHITE

    def total_power(self):
        if self.is_white:
            return 1.0
        return 2.0 * self.upsilon * self.theta + (1.0 - 2.0 * self.theta) * self.lam

    def density(self, freq):
        """F'(lambda) evaluated on an array of frequencies in [-1/2, 1/2]."""
        freq = np.asarray(freq, dtype=float)
        if self.is_white:
            return np.ones_like(freq)
        return np.where(np.abs(freq) <= self.theta, self.upsilon, self.lam)

    def breakpoints(self):
        """Discontinuities of the density inside (-1/2, 1/2)."""
        if self.is_white:
            return ()
        return (-self.theta, self.theta)

    def density_range(self):
        if self.is_white:
            return 1.0, 1.0
        return min(self.upsilon, self.lam), max(self.upsilon, self.lam)

    def log_integral(self, offset=0.0):
        """Closed form of the integral of log(F'(lambda) + offset) over [-1/2, 1/2]."""
        if self.is_white:
            return math.log1p(offset)
        two_theta = 2.0 * self.theta
        return two_theta * math.log(self.upsilon + offset) + (1.0 - two_theta) * math.log(self.lam + offset)


@dataclass(frozen=True)
class ChannelScenario:
    """One relay-channel instance.

    link1 is transmitter->relay, link2 transmitter->receiver and link3
    relay->receiver.  ``rho`` is the peak-amplitude ratio A/A_r and
    ``sigma_sq`` the additive noise variance.
    """

    link1: SpectralModel
    link2: SpectralModel
    link3: SpectralModel
    rho: float = 1.0
    sigma_sq: float = 1.0
    name: str = "custom"

    def __post_init__(self):
        for field in ("rho", "sigma_sq"):
            value = getattr(self, field)
            if not (value > 0.0 and math.isfinite(value)):
                raise DomainError(f"{field} must be positive and finite, got {value!r}")
        for field in ("link1", "link2", "link3"):
            if not isinstance(getattr(self, field), SpectralModel):
                raise DomainError(f"{field} must be a SpectralModel")

    @property
    def links(self):
        return (self.link1, self.link2, self.link3)

    def eps_sq(self):
        """Prediction errors of the three links."""
        return tuple(prediction_error(m) for m in self.links)


def make_piecewise(target_eps_sq, lam, theta):
    """Piecewise-constant model with a prescribed prediction error.

    With the out-of-band level fixed, unit variance and the prediction-error
    target pin both the in-band level and the band edge.  ``theta`` selects
    the root: the solution closest to it is returned.
    """
    target_eps_sq = float(target_eps_sq)
    lam = float(lam)
    theta = float(theta)
    if not 0.0 < target_eps_sq < 1.0:
        raise InfeasibleTargetError(
            f"target prediction error must lie in (0, 1) for a non-white density, got {target_eps_sq!r}"
        )
    if not 0.0 < lam < 1.0:
        raise InfeasibleTargetError(f"out-of-band level must lie in (0, 1), got {lam!r}")
    if not 0.0 < theta < 0.5:
        raise InfeasibleTargetError(f"band edge must lie in (0, 1/2), got {theta!r}")
    if lam >= target_eps_sq:
        # the geometric mean of the density always exceeds its minimum
        raise InfeasibleTargetError(
            f"out-of-band level {lam!r} must be below the target prediction error {target_eps_sq!r}"
        )

    log_target = math.log(target_eps_sq)
    log_lam = math.log(lam)

    def mismatch(th):
        ups = (1.0 - (1.0 - 2.0 * th) * lam) / (2.0 * th)
        return 2.0 * th * math.log(ups) + (1.0 - 2.0 * th) * log_lam - log_target

    grid = np.linspace(1e-9, 0.5 - 1e-12, 4001)
    values = np.array([mismatch(t) for t in grid])
    roots = []
    for i in np.nonzero(np.sign(values[:-1]) != np.sign(values[1:]))[0]:
        roots.append(optimize.brentq(mismatch, grid[i], grid[i + 1], xtol=1e-16, rtol=1e-15))
    if not roots:
        raise InfeasibleTargetError(
            f"no unit-variance piecewise density has prediction error {target_eps_sq!r} "
            f"with out-of-band level {lam!r}"
        )
    th = min(roots, key=lambda r: abs(r - theta))
    ups = (1.0 - (1.0 - 2.0 * th) * lam) / (2.0 * th)
    if ups <= lam:
        raise InfeasibleTargetError("solution has in-band level below the out-of-band level")
    return SpectralModel.piecewise(ups, lam, th)


def prediction_error(m):
    """Infinite-past one-step prediction MSE, exp of the log-spectrum integral."""
    if m.is_white:
        return 1.0
    return math.exp(m.log_integral(0.0))


def noisy_prediction_error(m, xi):
    """Prediction MSE when past observations carry additive noise of variance xi.

    exp(int log(F' + xi)) - xi; equals :func:`prediction_error` at xi = 0.
    """
    xi = float(xi)
    if not xi >= 0.0:
        raise DomainError(f"noise variance xi must be nonnegative, got {xi!r}")
    if m.is_white:
        return 1.0
    if xi == 0.0:
        return prediction_error(m)
    two_theta = 2.0 * m.theta
    # exp(2t log(U+xi) + (1-2t) log(L+xi)) - xi, written to avoid cancellation
    # when xi dominates: (L+xi) * [exp(2t log((U+xi)/(L+xi))) - 1] + L
    log_ratio = math.log1p((m.upsilon - m.lam) / (m.lam + xi))
    return (m.lam + xi) * math.expm1(two_theta * log_ratio) + m.lam


def autocovariance(m, lag):
    """E[H_{k+lag} conj(H_k)] as a complex number.

    For the piecewise density this is (upsilon - lam) sin(2 pi lag theta) / (pi lag)
    away from lag zero.
    """
    lag = int(lag)
    if abs(lag) > 10**6:
        raise DomainError(f"|lag| must not exceed 1e6, got {lag}")
    if lag == 0:
        return complex(m.total_power())
    if m.is_white:
        return 0j
    return complex((m.upsilon - m.lam) * math.sin(2.0 * math.pi * lag * m.theta) / (math.pi * lag))


def autocovariance_sequence(m, max_lag):
    """Real autocovariances r(0), ..., r(max_lag) as a numpy array."""
    lags = np.arange(max_lag + 1)
    if m.is_white:
        out = np.zeros(max_lag + 1)
        out[0] = 1.0
        return out
    out = np.empty(max_lag + 1)
    out[0] = m.total_power()
    k = lags[1:]
    out[1:] = (m.upsilon - m.lam) * np.sin(2.0 * np.pi * k * m.theta) / (np.pi * k)
    return out


def condition_estimate(m):
    """Upper bound on the 2-norm condition number of any Toeplitz section.

    Eigenvalues of finite sections lie between the essential infimum and
    supremum of the density.
    """
    lo, hi = m.density_range()
    return hi / lo


@dataclass(frozen=True)
class LevinsonResult:
    """Predictor of order ``memory`` plus the whole error sequence.

    ``errors[k]`` is the k-tap prediction MSE (errors[0] = r(0));
    ``coefficients[j]`` multiplies H_{-(j+1)} in the predictor of H_0.
    """

    coefficients: np.ndarray
    errors: np.ndarray
    reflection: np.ndarray
    used_fallback: bool = False


def levinson_durbin(r, order):
    """Levinson-Durbin recursion on a real symmetric Toeplitz autocovariance.

    Falls back to a dense solve for the final order if a reflection
    coefficient reaches magnitude 1 - 1e-12.
    """
    r = np.asarray(r, dtype=float)
    if order < 1 or len(r) < order + 1:
        raise DomainError(f"need r(0..{order}) for order {order}")
    a = np.zeros(order)
    errors = np.empty(order + 1)
    refl = np.zeros(order)
    errors[0] = r[0]
    err = r[0]
    for k in range(order):
        acc = r[k + 1] - np.dot(a[:k], r[k:0:-1])
        kk = acc / err
        if abs(kk) > 1.0 - 1e-12:
            return _dense_predictor(r, order)
        refl[k] = kk
        prev = a[:k].copy()
        a[:k] = prev - kk * prev[::-1]
        a[k] = kk
        err *= 1.0 - kk * kk
        errors[k + 1] = err
    return LevinsonResult(a, errors, refl)


def _dense_predictor(r, order):
    errors = np.empty(order + 1)
    errors[0] = r[0]
    coeffs = None
    for k in range(1, order + 1):
        mat = linalg.toeplitz(r[:k])
        coeffs = linalg.solve(mat, r[1 : k + 1], assume_a="pos")
        errors[k] = r[0] - np.dot(coeffs, r[1 : k + 1])
    return LevinsonResult(coeffs, errors, np.full(order, np.nan), used_fallback=True)


def prediction_errors_upto(m, memory):
    """Finite-memory prediction errors for every memory 0..``memory``."""
    return predictor(m, memory).errors


def predictor(m, memory):
    """Order-``memory`` linear MMSE predictor of H_0 from H_{-1}, ..., H_{-memory}."""
    memory = int(memory)
    if memory < 1:
        raise DomainError(f"memory must be at least 1, got {memory}")
    cond = condition_estimate(m)
    if cond > MAX_CONDITION:
        raise IllConditionedError(
            f"Toeplitz solve would lose {math.log10(cond):.1f} digits (condition <= {cond:.3g})",
            cond,
        )
    return levinson_durbin(autocovariance_sequence(m, memory), memory)


def finite_memory_prediction_error(m, memory):
    """MSE of predicting H_0 from the ``memory`` most recent past values.

    Nonincreasing in ``memory`` and bounded below by :func:`prediction_error`.
    """
    if m.is_white:
        if int(memory) < 1:
            raise DomainError(f"memory must be at least 1, got {memory}")
        return 1.0
    return float(predictor(m, memory).errors[-1])


def coherence_time(m, threshold=0.5, max_lag=10**6):
    """Smallest positive lag at which |r(lag)| drops below ``threshold``.

    Returns None when the autocovariance stays above the threshold up to
    ``max_lag``.
    """
    for lag in range(1, max_lag + 1):
        if abs(autocovariance(m, lag)) < threshold:
            return lag
    return None
