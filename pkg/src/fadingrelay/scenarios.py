"""Scenario files and the two built-in benchmark scenarios.

A scenario file is TOML::

    name = "example"        # optional
    rho = 1.0               # peak-amplitude ratio A / A_r, default 1
    sigma_sq = 1.0          # noise variance, default 1

    [link1]                 # transmitter -> relay
    kind = "piecewise"
    target_eps_sq = 1e-4    # prediction error to hit ...
    lambda = 1e-5           # ... with this out-of-band level
    theta = 0.0868          # band-edge hint, picks the nearest solution

    [link2]                 # transmitter -> receiver
    kind = "white"

    [link3]                 # relay -> receiver
    kind = "piecewise"
    upsilon = 11.06         # explicit levels; must have unit variance
    lambda = 0.005
    theta = 0.045
    # variance_tol = 1e-9   # optional, relaxes the unit-variance check

``kind`` defaults to "piecewise" when piecewise keys are present.  A
piecewise link gives exactly one of ``target_eps_sq`` or ``upsilon``.
"""

import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, FadingRelayError
from .spectral import UNIT_VARIANCE_TOL, ChannelScenario, SpectralModel, make_piecewise

# band-edge hints; the levels follow from unit variance and the target
_HIGH_BAND = dict(target_eps_sq=1e-4, lam=1e-5, theta=0.08679)
_LOW_BAND = dict(target_eps_sq=1e-2, lam=0.005, theta=0.04503)

BUILTIN_NAMES = ("fig2-top", "fig2-bottom")

_LINK_KEYS = {"kind", "target_eps_sq", "upsilon", "lambda", "theta", "variance_tol"}
_TOP_KEYS = {"name", "rho", "sigma_sq", "link1", "link2", "link3"}


def builtin_scenario(name):
    """The strongly predictable (fig2-top) or equal-links (fig2-bottom) benchmark.

    Both use a white transmitter-receiver link, rho = 1 and sigma_sq = 1.
    """
    white = SpectralModel.white()
    low = make_piecewise(**_LOW_BAND)
    if name == "fig2-top":
        return ChannelScenario(make_piecewise(**_HIGH_BAND), white, low, 1.0, 1.0, name)
    if name == "fig2-bottom":
        return ChannelScenario(low, white, low, 1.0, 1.0, name)
    raise ConfigError(f"unknown built-in scenario {name!r}; choose from {', '.join(BUILTIN_NAMES)}", "scenario")


def _number(table, key, where, default=None):
    if key not in table:
        if default is None:
            raise ConfigError("missing required value", f"{where}{key}")
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", f"{where}{key}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {value!r}", f"{where}{key}")
    return value


def _parse_link(table, where):
    if not isinstance(table, dict):
        raise ConfigError("expected a table", where.rstrip("."))
    unknown = set(table) - _LINK_KEYS
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(sorted(unknown))}", where.rstrip("."))
    kind = table.get("kind", "white" if set(table) <= {"kind"} else "piecewise")
    if kind == "white":
        if set(table) - {"kind"}:
            raise ConfigError("a white link takes no parameters", f"{where}kind")
        return SpectralModel.white()
    if kind != "piecewise":
        raise ConfigError(f"expected 'white' or 'piecewise', got {kind!r}", f"{where}kind")
    has_target = "target_eps_sq" in table
    has_ups = "upsilon" in table
    if has_target == has_ups:
        raise ConfigError("give exactly one of target_eps_sq or upsilon", f"{where}target_eps_sq")
    lam = _number(table, "lambda", where)
    theta = _number(table, "theta", where)
    if not lam > 0.0:
        raise ConfigError(f"must be positive, got {lam!r}", f"{where}lambda")
    if not 0.0 < theta < 0.5:
        raise ConfigError(f"must lie in (0, 1/2), got {theta!r}", f"{where}theta")
    try:
        if has_target:
            return make_piecewise(_number(table, "target_eps_sq", where), lam, theta)
        tol = _number(table, "variance_tol", where, UNIT_VARIANCE_TOL)
        return SpectralModel.piecewise(_number(table, "upsilon", where), lam, theta, variance_tol=tol)
    except ConfigError:
        raise
    except FadingRelayError as exc:
        field = "target_eps_sq" if has_target else "upsilon"
        raise ConfigError(str(exc), f"{where}{field}") from exc


def scenario_from_dict(data, default_name="custom"):
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(sorted(unknown))}", sorted(unknown)[0])
    links = []
    for key in ("link1", "link2", "link3"):
        if key not in data:
            raise ConfigError("missing link table", key)
        links.append(_parse_link(data[key], f"{key}."))
    rho = _number(data, "rho", "", 1.0)
    sigma_sq = _number(data, "sigma_sq", "", 1.0)
    for key, value in (("rho", rho), ("sigma_sq", sigma_sq)):
        if not value > 0.0:
            raise ConfigError(f"must be positive, got {value!r}", key)
    name = data.get("name", default_name)
    if not isinstance(name, str):
        raise ConfigError("expected a string", "name")
    return ChannelScenario(*links, rho=rho, sigma_sq=sigma_sq, name=name)


def load_scenario(path_or_name):
    """Built-in scenario by name, otherwise a TOML scenario file."""
    if path_or_name in BUILTIN_NAMES:
        return builtin_scenario(path_or_name)
    try:
        with open(path_or_name, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"no such file or built-in name: {path_or_name}", "scenario") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}", "scenario") from exc
    return scenario_from_dict(data, default_name=str(path_or_name))
