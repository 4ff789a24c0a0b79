"""High-SNR quantities: fading numbers of the links and bounds on the relay fading number.

All values are in nats.
"""

import enum
import math
from dataclasses import dataclass

from .errors import DomainError
from .specfun import EULER_GAMMA
from .spectral import prediction_error

LOG2 = math.log(2.0)


class Regime(enum.Enum):
    DIRECT_OPTIMAL = "DirectOptimal"
    COOPERATION_STRICTLY_BETTER = "CooperationStrictlyBetter"
    ONE_BIT_GAP = "OneBitGap"
    INDETERMINATE = "Indeterminate"


# highest priority first
_PRIORITY = (Regime.DIRECT_OPTIMAL, Regime.COOPERATION_STRICTLY_BETTER, Regime.ONE_BIT_GAP)


@dataclass(frozen=True)
class FadingNumberReport:
    eps_sq: tuple
    chi1: float
    chi2: float
    chi3: float
    upper: float
    lower: float
    regime: Regime
    flags: frozenset
    gap_to_miso: float
    optimal_alpha: float

    @property
    def miso(self):
        """Fading number of the two-antenna cooperative (TRC-MISO) channel."""
        return max(self.chi2, self.chi3)


def _check_eps(name, eps_sq):
    if not 0.0 < eps_sq <= 1.0:
        raise DomainError(f"{name} must lie in (0, 1], got {eps_sq!r}")


def p2p_fading_number(eps_sq):
    """Fading number -1 - gamma + log(1/eps_sq) of a Gaussian point-to-point link."""
    eps_sq = float(eps_sq)
    _check_eps("eps_sq", eps_sq)
    return -1.0 - EULER_GAMMA - math.log(eps_sq)


def _eps_triple(s):
    if hasattr(s, "links"):
        return tuple(prediction_error(m) for m in s.links)
    eps = tuple(float(e) for e in s)
    if len(eps) != 3:
        raise DomainError("expected three prediction errors")
    for i, e in enumerate(eps, start=1):
        _check_eps(f"eps{i}_sq", e)
    return eps


def relay_upper_bound(s):
    """Max-flow min-cut upper bound on the relay fading number.

    ``s`` is a :class:`~fadingrelay.spectral.ChannelScenario` or a triple of
    prediction errors (eps1^2, eps2^2, eps3^2).  Does not depend on rho.
    """
    e1, e2, e3 = _eps_triple(s)
    broadcast = -2.0 * EULER_GAMMA - math.log(e1) - math.log(e2)
    return min(broadcast, max(p2p_fading_number(e2), p2p_fading_number(e3)))


def relay_lower_bound_df(s):
    """Decode-and-forward lower bound on the relay fading number."""
    e1, e2, e3 = _eps_triple(s)
    relayed = p2p_fading_number(e3) - math.log1p(e1 / e3)
    return max(p2p_fading_number(e2), relayed)


def df_one_bit_form(chi1, chi3):
    """chi3 - log(1 + exp(chi3 - chi1)), evaluated without overflow.

    Symmetric in its arguments: equals chi1 - log(1 + exp(chi1 - chi3)).
    """
    lo = min(chi1, chi3)
    return lo - math.log1p(math.exp(-abs(chi3 - chi1)))


def optimal_df_alpha(eps1_sq, eps3_sq):
    """Power split eps1^2 / (eps1^2 + eps3^2) balancing the two decode-and-forward cuts."""
    _check_eps("eps1_sq", eps1_sq)
    _check_eps("eps3_sq", eps3_sq)
    return eps1_sq / (eps1_sq + eps3_sq)


def regime_flags(s):
    e1, e2, e3 = _eps_triple(s)
    flags = set()
    if e2 <= e3:
        flags.add(Regime.DIRECT_OPTIMAL)
    if e2 > e1 + e3:
        flags.add(Regime.COOPERATION_STRICTLY_BETTER)
    if e1 <= e3:
        flags.add(Regime.ONE_BIT_GAP)
    return frozenset(flags)


def classify_regime(s):
    """Evaluate both bounds and classify the cooperation regime.

    Returns a :class:`FadingNumberReport`.  When several conditions hold the
    reported regime follows the order DirectOptimal, CooperationStrictlyBetter,
    OneBitGap; ``flags`` lists all of them.
    """
    eps = _eps_triple(s)
    e1, e2, e3 = eps
    flags = regime_flags(eps)
    regime = next((r for r in _PRIORITY if r in flags), Regime.INDETERMINATE)
    chi1, chi2, chi3 = (p2p_fading_number(e) for e in eps)
    lower = relay_lower_bound_df(eps)
    return FadingNumberReport(
        eps_sq=eps,
        chi1=chi1,
        chi2=chi2,
        chi3=chi3,
        upper=relay_upper_bound(eps),
        lower=lower,
        regime=regime,
        flags=flags,
        gap_to_miso=max(chi2, chi3) - lower,
        optimal_alpha=optimal_df_alpha(e1, e3),
    )
