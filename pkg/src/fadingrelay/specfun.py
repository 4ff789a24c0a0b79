"""Real-argument special functions used by the capacity bounds.

Upper incomplete gamma, the exponential integral on the negative axis and
the composite ``exp(u) * Ei(-u)``.  Each routine uses a power series for
small arguments and a Lentz continued fraction for large ones.
"""

import math
from typing import NamedTuple

import numpy as np
from scipy import special

from .errors import DomainError, SpecialFunctionOverflow

EULER_GAMMA = 0.57721566490153286061

_EPS = 2.220446049250313e-16
_TINY = 1e-300
_MAX_ITER = 10_000


class SpecialValue(NamedTuple):
    value: float
    abs_err_estimate: float


def _zeta(k):
    # Euler-Maclaurin with N = 16; exact to double precision for k >= 2.
    n_terms = 16
    s = math.fsum(n ** -k for n in range(1, n_terms))
    big = float(n_terms)
    s += big ** (1 - k) / (k - 1) + 0.5 * big ** -k
    s += k * big ** (-k - 1) / 12.0
    s -= k * (k + 1) * (k + 2) * big ** (-k - 3) / 720.0
    s += k * (k + 1) * (k + 2) * (k + 3) * (k + 4) * big ** (-k - 5) / 30240.0
    return s


_ZETA = [0.0, 0.0] + [_zeta(k) for k in range(2, 48)]


def _gamma1pm1_over_a(a):
    """(Gamma(1 + a) - 1) / a for 0 < a < 1, free of cancellation."""
    if a < 0.2:
        # lgamma(1 + a) = -gamma*a + sum_{k>=2} (-1)^k zeta(k) a^k / k
        lg = -EULER_GAMMA * a
        term = -a
        for k in range(2, len(_ZETA)):
            term *= -a
            inc = _ZETA[k] * term / k
            lg += inc
            if abs(inc) < 1e-18 * abs(lg):
                break
        return math.expm1(lg) / a
    return math.expm1(math.lgamma(1.0 + a)) / a


def _gamma_small_a_series(a, x):
    """Gamma(a, x) for 0 < a < 1 and x < a + 1."""
    log_x = math.log(x)
    head = _gamma1pm1_over_a(a) - math.expm1(a * log_x) / a
    # x^a * sum_{n>=1} (-x)^n / (n! (a + n))
    tail = 0.0
    term = 1.0
    n = 0
    while True:
        n += 1
        term *= -x / n
        inc = term / (a + n)
        tail += inc
        if abs(inc) < _EPS * 1e-2 * max(abs(tail), _TINY) or n > _MAX_ITER:
            break
    xa = math.exp(a * log_x)
    value = head - xa * tail
    return value, 8 * _EPS * (abs(head) + abs(xa * tail))


def _lower_series_ratio(a, x):
    """Regularized lower incomplete gamma P(a, x) by its power series."""
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS * 1e-2:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * total


def _gamma_cf(a, x):
    """Lentz evaluation of h with Gamma(a, x) = exp(-x) x^a h, for x >= a + 1."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge at a={a}, x={x}")


def _check_positive(name, x):
    if not (x > 0.0) or math.isinf(x):
        raise DomainError(f"{name} must be a finite positive number, got {x!r}")


def _upper_gamma_positive(a, x):
    if x < a + 1.0:
        if a < 1.0:
            return _gamma_small_a_series(a, x)
        q = 1.0 - _lower_series_ratio(a, x)
        g = math.exp(math.lgamma(a))
        return g * q, 16 * _EPS * g
    h = _gamma_cf(a, x)
    value = math.exp(-x + a * math.log(x)) * h
    return value, 16 * _EPS * value


def upper_incomplete_gamma(a, x, full_output=False):
    """Upper incomplete gamma function Gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt.

    Parameters
    ----------
    a : float
        Shape, in [-50, 50].  Nonpositive shapes are reached by downward
        recurrence from the fractional part and carry reduced accuracy.
    x : float
        Lower limit, strictly positive.
    full_output : bool
        Return a :class:`SpecialValue` with an error estimate instead of a float.
    """
    a = float(a)
    x = float(x)
    _check_positive("x", x)
    if not (-50.0 <= a <= 50.0):
        raise DomainError(f"a must lie in [-50, 50], got {a!r}")

    if a > 0.0:
        value, err = _upper_gamma_positive(a, x)
    else:
        value, err = _upper_gamma_nonpositive(a, x)

    if not math.isfinite(value):
        raise SpecialFunctionOverflow(f"Gamma({a}, {x}) overflows double precision")
    if full_output:
        return SpecialValue(value, err)
    return value


def _upper_gamma_nonpositive(a, x):
    n = math.ceil(-a)
    if a == -n:
        s = 0.0
        value = -expint_ei_neg(x)
        err = 4 * _EPS * abs(value)
    else:
        s = a + n
        value, err = _upper_gamma_positive(s, x)
    log_x = math.log(x)
    try:
        # Gamma(s - 1, x) = (Gamma(s, x) - x^(s-1) e^(-x)) / (s - 1)
        while s > a + 0.5:
            s -= 1.0
            value = (value - math.exp(s * log_x - x)) / s
            err = abs(err / s) + 4 * _EPS * abs(value)
    except OverflowError as exc:
        raise SpecialFunctionOverflow(f"Gamma({a}, {x}) overflows double precision") from exc
    return value, err


def log_upper_incomplete_gamma(a, x):
    """Natural log of Gamma(a, x) for a > 0, valid where Gamma(a, x) underflows."""
    a = float(a)
    x = float(x)
    _check_positive("x", x)
    _check_positive("a", a)
    if a > 50.0:
        raise DomainError(f"a must lie in (0, 50], got {a!r}")
    if x < a + 1.0:
        if a < 1.0:
            return math.log(_gamma_small_a_series(a, x)[0])
        return math.lgamma(a) + math.log1p(-_lower_series_ratio(a, x))
    return -x + a * math.log(x) + math.log(_gamma_cf(a, x))


def _e1_cf(x):
    """h with E1(x) = exp(-x) h, continued fraction for x > 1."""
    b = x + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"E1 continued fraction did not converge at x={x}")


def _ei_neg_series(x):
    total = 0.0
    term = 1.0
    k = 0
    while True:
        k += 1
        term *= -x / k
        inc = term / k
        total += inc
        if abs(inc) < _EPS * 1e-2 * max(abs(total), _TINY) or k > 500:
            break
    return EULER_GAMMA + math.log(x) + total


def expint_ei_neg(x, full_output=False):
    """Ei(-x) = -int_x^inf e^(-t)/t dt for x > 0.

    Underflows cleanly to ``-0.0`` for x beyond roughly 745.
    """
    x = float(x)
    _check_positive("x", x)
    if x <= 1.0:
        value = _ei_neg_series(x)
        err = 8 * _EPS * (abs(value) + 1.0)
    else:
        value = -math.exp(-x) * _e1_cf(x)
        err = 8 * _EPS * abs(value)
    if full_output:
        return SpecialValue(value, err)
    return value


def ei_correction_term(u):
    """exp(u) * Ei(-u), evaluated without forming exp(u) for u > 1.

    The result lies strictly between -1/u and -1/(1 + u).
    """
    u = float(u)
    _check_positive("u", u)
    if u <= 1.0:
        return math.exp(u) * _ei_neg_series(u)
    return -_e1_cf(u)


# Array versions for the optimizer hot path.  Same algorithms as the scalar
# routines above, iterated elementwise until every entry has converged.


def _gamma1pm1_over_a_array(a):
    out = np.empty_like(a)
    small = a < 0.2
    if np.any(small):
        s = a[small]
        lg = -EULER_GAMMA * s
        term = -s
        for k in range(2, len(_ZETA)):
            term = term * -s
            lg = lg + _ZETA[k] * term / k
        out[small] = np.expm1(lg) / s
    big = ~small
    if np.any(big):
        out[big] = np.expm1(special.gammaln(1.0 + a[big])) / a[big]
    return out


def _log_gamma_small_a_array(a, x):
    log_x = np.log(x)
    head = _gamma1pm1_over_a_array(a) - np.expm1(a * log_x) / a
    tail = np.zeros_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    n = 0
    while np.any(active) and n < _MAX_ITER:
        n += 1
        term = term * (-x / n)
        inc = term / (a + n)
        tail = tail + np.where(active, inc, 0.0)
        active &= np.abs(inc) >= _EPS * 1e-2 * np.maximum(np.abs(tail), _TINY)
    return np.log(head - np.exp(a * log_x) * tail)


def _log_gamma_p_series_array(a, x):
    ap = a.copy()
    term = 1.0 / a
    total = term.copy()
    active = np.ones(x.shape, dtype=bool)
    n = 0
    while np.any(active) and n < _MAX_ITER:
        n += 1
        ap = ap + 1.0
        term = term * x / ap
        total = total + np.where(active, term, 0.0)
        active &= np.abs(term) >= np.abs(total) * _EPS * 1e-2
    lgam = special.gammaln(a)
    p = np.exp(-x + a * np.log(x) - lgam) * total
    return lgam + np.log1p(-p)


def _log_gamma_cf_array(a, x):
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    i = 0
    while np.any(active):
        i += 1
        if i >= _MAX_ITER:
            raise ArithmeticError("incomplete gamma continued fraction did not converge")
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= _EPS
    return -x + a * np.log(x) + np.log(h)


def log_upper_incomplete_gamma_array(a, x):
    """Elementwise :func:`log_upper_incomplete_gamma` on broadcast arrays."""
    a, x = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(x, dtype=float))
    if np.any(~(x > 0.0)) or np.any(~(a > 0.0)) or np.any(a > 50.0):
        raise DomainError("log_upper_incomplete_gamma_array needs 0 < a <= 50 and x > 0")
    out = np.empty(a.shape)
    series = x < a + 1.0
    small = series & (a < 1.0)
    pser = series & ~small
    cf = ~series
    if np.any(small):
        out[small] = _log_gamma_small_a_array(a[small], x[small])
    if np.any(pser):
        out[pser] = _log_gamma_p_series_array(a[pser], x[pser])
    if np.any(cf):
        out[cf] = _log_gamma_cf_array(a[cf], x[cf])
    return out


def _e1_cf_array(x):
    b = x + 1.0
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    i = 0
    while np.any(active):
        i += 1
        if i >= _MAX_ITER:
            raise ArithmeticError("E1 continued fraction did not converge")
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= _EPS
    return h


def _ei_neg_series_array(x):
    total = np.zeros_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    k = 0
    while np.any(active) and k < 500:
        k += 1
        term = term * (-x / k)
        inc = term / k
        total = total + np.where(active, inc, 0.0)
        active &= np.abs(inc) >= _EPS * 1e-2 * np.maximum(np.abs(total), _TINY)
    return EULER_GAMMA + np.log(x) + total


def ei_correction_term_array(u):
    """Elementwise :func:`ei_correction_term`."""
    u = np.asarray(u, dtype=float)
    if np.any(~(u > 0.0)) or np.any(np.isinf(u)):
        raise DomainError("ei_correction_term_array needs finite u > 0")
    out = np.empty(u.shape)
    lo = u <= 1.0
    if np.any(lo):
        out[lo] = np.exp(u[lo]) * _ei_neg_series_array(u[lo])
    if np.any(~lo):
        out[~lo] = -_e1_cf_array(u[~lo])
    return out
