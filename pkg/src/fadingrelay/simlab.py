"""Validation oracles: simulated fading paths, empirical prediction errors and a
quadrature evaluation of the QPSK mutual-information kernel.

Paths come from circulant embedding of the autocovariance sequence.  When
the embedding has negative eigenvalues (possible for densities with jumps,
whose autocovariances decay slowly) generation falls back to spectral
synthesis: independent complex Gaussian amplitudes on a frequency grid with
variances proportional to F', inverse-transformed.  The fallback path is
exactly periodic with period twice the path length, which does not matter for
covariance checks over lags much shorter than the path.
"""

import math
import struct
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, EmbeddingError, InsufficientDataError, QuadratureError
from .qpsk_mi import LOG4, QPSK, effective_snr
from .spectral import SpectralModel, autocovariance_sequence, predictor

MAX_PATH_LENGTH = 1 << 20
# relative size of negative embedding eigenvalues that is treated as round-off
EMBEDDING_TOL = 1e-10

PATH_MAGIC = b"FRPATH\x00\x00"
PATH_VERSION = 1
_HEADER = struct.Struct("<8sIIQQ")  # magic, version, reserved, length, seed


@dataclass(frozen=True)
class SimRun:
    model: SpectralModel
    path_length: int
    seed: int
    realizations: int = 1

    def __post_init__(self):
        n = self.path_length
        if not (isinstance(n, (int, np.integer)) and 1 <= n <= MAX_PATH_LENGTH and n & (n - 1) == 0):
            raise DomainError(f"path_length must be a power of two <= 2^20, got {n!r}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.realizations < 1:
            raise DomainError("realizations must be at least 1")


def _rng(seed, realization):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(realization,))))


def _complex_normal(rng, n):
    z = rng.standard_normal((2, n))
    return math.sqrt(0.5) * (z[0] + 1j * z[1])


def embedding_eigenvalues(model, path_length):
    """Eigenvalues of the size-2N circulant extending the N x N covariance."""
    r = autocovariance_sequence(model, path_length)
    c = np.concatenate([r, r[-2:0:-1]])
    return np.fft.fft(c).real


def circulant_path(run, realization=0):
    """Exact-covariance path by circulant embedding; raises EmbeddingError if not PSD."""
    n = run.path_length
    lam = embedding_eigenvalues(run.model, n)
    lo = float(lam.min())
    if lo < -EMBEDDING_TOL * float(lam.max()):
        raise EmbeddingError(f"circulant embedding is not positive semidefinite, min eigenvalue {lo:.3g}", lo)
    lam = np.clip(lam, 0.0, None)
    z = _complex_normal(_rng(run.seed, realization), 2 * n)
    return (math.sqrt(2 * n) * np.fft.ifft(np.sqrt(lam) * z))[:n]


def spectral_synthesis_path(run, realization=0):
    """Approximate path from independent spectral amplitudes on a 2N-point grid."""
    n = run.path_length
    m = 2 * n
    freq = np.fft.fftfreq(m)
    weights = run.model.density(freq)
    weights = weights / weights.sum()
    z = _complex_normal(_rng(run.seed, realization), m)
    return (m * np.fft.ifft(np.sqrt(weights) * z))[:n]


def generate_fading_path(run, realization=0, method="auto"):
    """Zero-mean unit-variance circularly symmetric Gaussian path of the model.

    ``method`` is "circulant", "synthesis" or "auto" (circulant, falling
    back to synthesis).  The same (seed, realization) always gives the same
    path.
    """
    if method == "synthesis":
        return spectral_synthesis_path(run, realization)
    if method == "circulant":
        return circulant_path(run, realization)
    if method != "auto":
        raise DomainError(f"unknown method {method!r}")
    try:
        return circulant_path(run, realization)
    except EmbeddingError:
        return spectral_synthesis_path(run, realization)


def empirical_covariance(path, lag):
    """Sample estimate of E[H_{k+lag} conj(H_k)]."""
    path = np.asarray(path)
    if lag == 0:
        return complex(np.mean(np.abs(path) ** 2))
    return complex(np.mean(path[lag:] * np.conj(path[:-lag])))


def empirical_prediction_error(run, memory, path=None):
    """Mean-square error of the analytic memory-tap predictor applied along simulated paths.

    Averages over ``run.realizations`` paths unless ``path`` is given.
    """
    memory = int(memory)
    if memory < 1:
        raise DomainError(f"memory must be at least 1, got {memory}")
    if run.path_length < 100 * memory:
        raise InsufficientDataError(f"path_length {run.path_length} is below 100 * memory = {100 * memory}")
    if run.model.is_white:
        coeffs = np.zeros(memory)
    else:
        coeffs = predictor(run.model, memory).coefficients
    paths = [path] if path is not None else [generate_fading_path(run, k) for k in range(run.realizations)]
    total = 0.0
    count = 0
    for p in paths:
        p = np.asarray(p)
        # prediction of p[k] from p[k-1], ..., p[k-memory]
        pred = np.convolve(p, np.concatenate([[0.0], coeffs]))[memory : len(p)]
        err = p[memory:] - pred
        total += float(np.sum(np.abs(err) ** 2))
        count += err.size
    return total / count


def write_path(fileobj, path, seed):
    """Little-endian dump: header (magic, version, reserved, length, seed) then (re, im) float64 pairs."""
    path = np.asarray(path, dtype=np.complex128)
    fileobj.write(_HEADER.pack(PATH_MAGIC, PATH_VERSION, 0, path.size, int(seed)))
    fileobj.write(path.astype("<c16").tobytes())


def read_path(fileobj):
    head = fileobj.read(_HEADER.size)
    if len(head) != _HEADER.size:
        raise DomainError("truncated path header")
    magic, version, _, length, seed = _HEADER.unpack(head)
    if magic != PATH_MAGIC or version != PATH_VERSION:
        raise DomainError("not a fading path dump")
    data = fileobj.read(16 * length)
    if len(data) != 16 * length:
        raise DomainError("truncated path data")
    return np.frombuffer(data, dtype="<c16").astype(np.complex128), seed


# -- quadrature oracle for the QPSK kernel --------------------------------

_GH_CACHE = {}


def _gauss_hermite(n):
    if n not in _GH_CACHE:
        x, w = np.polynomial.hermite.hermgauss(n)
        _GH_CACHE[n] = (x, w / math.sqrt(math.pi))
    return _GH_CACHE[n]


def _inner(r, n):
    """E_w[log sum_j exp(|w|^2 - |w + r (1 - u_j)|^2)], w ~ CN(0, 1), by n x n Gauss-Hermite."""
    x, wt = _gauss_hermite(n)
    w = (x[:, None] + 1j * x[None, :]).ravel()
    weights = np.outer(wt, wt).ravel()
    c = 1.0 - QPSK
    expo = np.abs(w[None, :]) ** 2 - np.abs(w[None, :] + r * c[:, None]) ** 2
    top = expo.max(axis=0)
    lse = top + np.log(np.exp(expo - top).sum(axis=0))
    return float(np.dot(weights, lse))


def _inner_adaptive(r, tol):
    n = 16
    prev = _inner(r, n)
    # numpy's Gauss-Hermite nodes overflow beyond a few hundred points
    while n < 256:
        n *= 2
        cur = _inner(r, n)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    raise QuadratureError(f"inner Gauss-Hermite did not converge at |g| = {r:.6g}", abs(cur - prev))


def qpsk_mi_quadrature(coherent_gain_var, residual_var, amplitude_sq, extra_noise_var, tol=1e-5):
    """QPSK kernel mutual information by deterministic quadrature (nats).

    The transmitted symbol and the phase of the known gain are removed by
    symmetry, leaving an outer integral over t = |g|^2 / eta with weight
    exp(-t) and an inner Gaussian expectation over the output plane.
    """
    eta = effective_snr(coherent_gain_var, residual_var, amplitude_sq, extra_noise_var)
    if eta == 0.0:
        return 0.0
    if math.isinf(eta):
        return LOG4
    # the outer weight integrates to 1, so inner errors pass through unamplified
    inner_tol = max(0.1 * tol, 1e-10)

    def integrand(t):
        return _inner_adaptive(math.sqrt(eta * t), inner_tol) * math.exp(-t)

    # the integrand changes on the scale t ~ 1/eta; exp(-60) * log 4 is negligible
    edges = [0.0] + [e for e in (0.01 / eta) * np.logspace(0, 6, 7) if e < 60.0] + [60.0]
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges, edges[1:]):
        val, est = integrate.quad(integrand, lo, hi, epsabs=0.1 * tol, epsrel=1e-10, limit=200)
        total += val
        err += est
    if err > tol:
        raise QuadratureError(f"outer quadrature error estimate {err:.3g} exceeds {tol:.3g}", err)
    return LOG4 - total
