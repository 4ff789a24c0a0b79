"""Low-SNR lower bounds from QPSK inputs, via a Monte-Carlo mutual-information kernel.

The kernel evaluates I(X; (Hbar + Htilde) X + N | Hbar) for uniform QPSK X
with |X|^2 = a^2, Hbar ~ CN(0, sbar2), Htilde ~ CN(0, eps2), N ~ CN(0, v0).
Given Hbar and X the output is Gaussian with variance v = eps2 a^2 + v0 for
every symbol, so after scaling by sqrt(v) the mutual information depends
only on eta = sbar2 a^2 / v:

    I = log 4 - E[ log sum_j exp(|w|^2 - |w + g (u_i - u_j)|^2) ]

with g ~ CN(0, eta), w ~ CN(0, 1) and u_i the transmitted unit symbol.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, PreconditionError
from .spectral import noisy_prediction_error

LOG4 = math.log(4.0)
QPSK = np.exp(0.5j * np.pi * np.arange(4))
BLOCK_SIZE = 1 << 15
DEFAULT_DELTA_GRID = tuple(np.logspace(-3.0, 0.0, 16))
MISO_LINKS_AS_PRINTED = (1, 3)


@dataclass(frozen=True)
class McConfig:
    """Monte-Carlo settings.

    ``samples`` draws are always used.  If the standard error is still above
    ``target_se`` more blocks are added, up to ``max_samples`` (default
    ``samples``, i.e. no extension).  ``workers`` only affects speed: blocks
    are seeded by (seed, block index) and reduced in block order.
    """

    seed: int = 20240917
    samples: int = 200_000
    target_se: float = math.inf
    max_samples: int = 0
    workers: int = 1

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.samples < 10_000:
            raise DomainError("samples must be at least 10^4")
        if not self.target_se > 0.0:
            raise DomainError("target_se must be positive")
        if self.workers < 1:
            raise DomainError("workers must be at least 1")

    @property
    def sample_cap(self):
        return max(self.samples, self.max_samples)


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    samples_used: int
    args: tuple = ()

    def arg(self, name):
        return dict(self.args)[name]


_DIFF = QPSK[:, None] - QPSK[None, :]
_DIFF_SQ = np.abs(_DIFF) ** 2


def _block_values(seed, block, n, eta):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))
    z = rng.standard_normal((4, n))
    g = math.sqrt(0.5 * eta) * (z[0] + 1j * z[1])
    w = math.sqrt(0.5) * (z[2] + 1j * z[3])
    # |w|^2 - |w + g d|^2 = -|g|^2 |d|^2 - 2 Re(conj(w) g d)
    p = np.conj(w) * g
    gsq = np.abs(g) ** 2
    expo = -(_DIFF_SQ[:, :, None] * gsq) - 2.0 * (
        _DIFF.real[:, :, None] * p.real - _DIFF.imag[:, :, None] * p.imag
    )
    # expo[i, j, k]: transmitted symbol i, hypothesis j, sample k; every
    # sample averages over all four transmitted symbols
    top = expo.max(axis=1)
    lse = np.log(np.exp(expo - top[:, None, :]).sum(axis=1)) + top
    return LOG4 - lse.mean(axis=0)


def _run_blocks(mc, eta, first, count):
    sizes = [BLOCK_SIZE] * count
    if mc.workers == 1:
        return [_block_values(mc.seed, first + k, n, eta) for k, n in enumerate(sizes)]
    with ThreadPoolExecutor(mc.workers) as pool:
        futures = [pool.submit(_block_values, mc.seed, first + k, n, eta) for k, n in enumerate(sizes)]
        return [f.result() for f in futures]


@lru_cache(maxsize=4096)
def _mixture_mi_cached(eta, mc):
    return _mixture_mi(eta, mc)


def mixture_mi_eta(eta, mc):
    """Kernel value as a function of the effective SNR eta only (memoized)."""
    return _mixture_mi_cached(float(eta), mc)


def _mixture_mi(eta, mc):
    if not eta >= 0.0:
        raise DomainError(f"eta must be nonnegative, got {eta!r}")
    if eta == 0.0:
        return McEstimate(0.0, 0.0, 0)
    if math.isinf(eta):
        return McEstimate(LOG4, 0.0, 0)
    nblocks = -(-mc.samples // BLOCK_SIZE)
    parts = _run_blocks(mc, eta, 0, nblocks)
    values = np.concatenate(parts)[: mc.samples]
    se = values.std(ddof=1) / math.sqrt(values.size)
    while se > mc.target_se and values.size < mc.sample_cap:
        extra = min(mc.sample_cap - values.size, values.size)
        first = -(-values.size // BLOCK_SIZE)
        more = np.concatenate(_run_blocks(mc, eta, first, -(-extra // BLOCK_SIZE)))[:extra]
        values = np.concatenate([values, more])
        se = values.std(ddof=1) / math.sqrt(values.size)
    return McEstimate(float(values.mean()), float(se), int(values.size))


def effective_snr(coherent_gain_var, residual_var, amplitude_sq, extra_noise_var):
    """eta = sbar2 a^2 / (eps2 a^2 + v0), with the kernel's domain checks."""
    sbar2, eps2, a2, v0 = (float(x) for x in (coherent_gain_var, residual_var, amplitude_sq, extra_noise_var))
    if not a2 > 0.0:
        raise DomainError(f"amplitude_sq must be positive, got {a2!r}")
    for name, x in (("coherent_gain_var", sbar2), ("residual_var", eps2), ("extra_noise_var", v0)):
        if not (x >= 0.0 and math.isfinite(x)):
            raise DomainError(f"{name} must be nonnegative and finite, got {x!r}")
    if sbar2 == 0.0 and eps2 == 0.0 and v0 == 0.0:
        raise DomainError("coherent_gain_var, residual_var and extra_noise_var are all zero")
    if sbar2 == 0.0:
        return 0.0
    v = eps2 * a2 + v0
    if v == 0.0:
        return math.inf
    return sbar2 * a2 / v


def qpsk_mixture_mi(coherent_gain_var, residual_var, amplitude_sq, extra_noise_var, mc=None):
    """Mutual information (nats) of QPSK over a partially known Gaussian fading gain.

    Parameters
    ----------
    coherent_gain_var : float
        Variance of the known part Hbar of the gain.
    residual_var : float
        Variance of the unknown part Htilde.
    amplitude_sq : float
        Squared modulus of every QPSK point.
    extra_noise_var : float
        Variance of the additive Gaussian noise.
    mc : McConfig

    Returns
    -------
    McEstimate
        Exactly 0 when the known part vanishes and exactly log 4 when the
        output is noiseless.
    """
    eta = effective_snr(coherent_gain_var, residual_var, amplitude_sq, extra_noise_var)
    est = mixture_mi_eta(eta, mc or McConfig())
    return McEstimate(est.value, est.std_error, est.samples_used, (("eta", eta),))


def miso_qpsk_lower(s, snr, mc=None, links=MISO_LINKS_AS_PRINTED):
    """Beam-selection QPSK lower bound on the cooperative MISO capacity.

    ``links`` picks the two antennas' channels; the default follows the
    printed bound (links 1 and 3), ``(2, 3)`` uses the two links that
    actually reach the receiver.
    """
    snr = float(snr)
    if not snr > 0.0:
        raise DomainError(f"snr must be positive, got {snr!r}")
    mc = mc or McConfig()
    gain = 1.0 + s.rho**2
    xi = 1.0 / (gain * snr)
    a2 = gain * snr * s.sigma_sq
    best = None
    for ell in links:
        eps2 = noisy_prediction_error(s.links[ell - 1], xi)
        est = qpsk_mixture_mi(max(1.0 - eps2, 0.0), eps2, a2, s.sigma_sq, mc)
        if best is None or est.value > best[1].value:
            best = (ell, est)
    ell, est = best
    return McEstimate(est.value, est.std_error, est.samples_used, (("link", ell),) + est.args)


def df_qpsk_lower(s, snr, mc=None, delta_grid=DEFAULT_DELTA_GRID):
    """Decode-and-forward QPSK lower bound on the relay channel capacity.

    For each power fraction delta the relay-decoding and receiver-decoding
    kernels are evaluated with common random numbers; the bound is the
    largest min of the two point estimates over the grid.  The reported
    standard error combines the two terms at the chosen delta.  The relay
    transmits with squared amplitude rho^2 A^2.
    """
    if not s.link2.is_white:
        raise PreconditionError("the transmitter-receiver link (link2) must be white (memoryless)")
    snr = float(snr)
    if not snr > 0.0:
        raise DomainError(f"snr must be positive, got {snr!r}")
    grid = tuple(float(d) for d in delta_grid)
    if not grid or any(not 0.0 < d <= 1.0 for d in grid):
        raise DomainError("delta_grid must be a nonempty list of values in (0, 1]")
    mc = mc or McConfig()
    rho2 = s.rho**2
    a2 = snr * s.sigma_sq
    best = None
    for d in grid:
        eps1 = noisy_prediction_error(s.link1, 1.0 / (d * d * snr))
        first = qpsk_mixture_mi(max(1.0 - eps1, 0.0), eps1, d * d * a2, s.sigma_sq, mc)
        eps3 = noisy_prediction_error(s.link3, d * d / rho2 + 1.0 / (rho2 * snr))
        second = qpsk_mixture_mi(max(1.0 - eps3, 0.0), eps3, rho2 * a2, d * d * a2 + s.sigma_sq, mc)
        value = min(first.value, second.value)
        if best is None or value > best[0]:
            se = math.hypot(first.std_error, second.std_error)
            best = (value, se, max(first.samples_used, second.samples_used), d)
    value, se, used, d = best
    return McEstimate(value, se, used, (("delta", d), ("delta_grid", grid)))
