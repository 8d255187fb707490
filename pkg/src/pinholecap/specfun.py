"""Special-function kernel used by the channel and capacity modules.

Provides log-gamma, the upper incomplete gamma function for arbitrary real
order (including negative order, which scipy does not cover), the modified
Bessel function of the second kind K_nu for real order (plain and
exponentially scaled), and adaptive quadrature on [a, inf) that can work on
a log-scale integrand so that tails as small as exp(-700) survive.

All functions are pure and thread-safe.
"""

import math
from dataclasses import dataclass

from scipy import special as _sp
from scipy.integrate import quad as _quad


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits for the semi-infinite quadrature.

    rel_tol / abs_tol map onto the adaptive integrator's relative and
    absolute targets.  tail_truncation_log is the log-scale drop below the
    integrand's running maximum at which the tail is cut; exp(-40) leaves
    truncation error far below the default rel_tol.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-300
    max_subdivisions: int = 2000
    tail_truncation_log: float = 40.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be nonnegative")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not self.tail_truncation_log > 0:
            raise ValueError("tail_truncation_log must be positive")


DEFAULT_QUADRATURE = QuadratureConfig()


def ln_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if x <= 0:
        raise ValueError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Upper incomplete gamma Gamma(s, x) = int_x^inf t^(s-1) e^-t dt.

    Supports any real order s.  For s > 0 the regularized routine is
    rescaled by Gamma(s); for s <= 0 the value is reached by the downward
    recurrence Gamma(s, x) = (Gamma(s+1, x) - x^s e^-x) / s starting from a
    positive-order base (or from Gamma(0, x) = E1(x) when s is a
    nonpositive integer).
    """
    if x <= 0:
        raise ValueError(f"upper_incomplete_gamma requires x > 0, got {x}")
    if s > 0:
        return float(_sp.gammaincc(s, x)) * math.exp(math.lgamma(s))

    floor_s = math.floor(s)
    if s == floor_s:
        # nonpositive integer order: Gamma(0, x) = E1(x)
        cur = 0.0
        g = float(_sp.exp1(x))
        steps = int(-floor_s)
    else:
        cur = s - floor_s  # in (0, 1)
        g = float(_sp.gammaincc(cur, x)) * math.exp(math.lgamma(cur))
        steps = int(-floor_s)

    for _ in range(steps):
        cur -= 1.0
        g = (g - math.exp(cur * math.log(x) - x)) / cur
    return g


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function of the second kind K_nu(x), real order.

    Symmetric in the sign of nu; integer orders (K_0 in particular) are
    limit-safe.
    """
    if x <= 0:
        raise ValueError(f"bessel_k requires x > 0, got {x}")
    return float(_sp.kv(nu, x))


def bessel_k_scaled(nu: float, x: float) -> float:
    """Exponentially scaled Bessel K: e^x * K_nu(x).

    Stays O(sqrt(pi/(2x))) for large x instead of underflowing, which is
    what the deep-tail channel integrands need.
    """
    if x <= 0:
        raise ValueError(f"bessel_k_scaled requires x > 0, got {x}")
    return float(_sp.kve(nu, x))


def _checked_quad(func, lo, hi, cfg):
    out = _quad(func, lo, hi, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                limit=cfg.max_subdivisions, full_output=1)
    if len(out) > 3:
        raise QuadratureError(f"quadrature on [{lo}, {hi}] failed: {out[3]}")
    return out[0]


def integrate_semi_infinite(f, a: float, cfg: QuadratureConfig | None = None,
                            log_f=None) -> float:
    """Integrate f over [a, inf) for an eventually decaying integrand.

    When log_f is given the integrand is handled on the log scale: a
    geometric scan from a locates the running maximum, the tail is cut
    once the log-integrand has dropped cfg.tail_truncation_log below it,
    and the remaining finite interval is integrated after rescaling by the
    peak.  log_f may return -inf where the integrand vanishes.

    Raises QuadratureError when the subdivision budget is exhausted before
    the tolerance is met, or when no decaying tail can be located.
    """
    if cfg is None:
        cfg = DEFAULT_QUADRATURE
    if log_f is None:
        if f is None:
            raise ValueError("either f or log_f is required")
        return _checked_quad(f, a, math.inf, cfg)

    step = max(abs(a), 1.0) * 1e-9
    peak = -math.inf
    cut = None
    t = a + step
    for _ in range(2000):
        v = log_f(t)
        if v > peak:
            peak = v
        elif math.isfinite(peak) and peak - v > cfg.tail_truncation_log:
            cut = t
            break
        if t > 1e290:
            break
        t = a + (t - a) * 2.0
    if cut is None or not math.isfinite(peak):
        raise QuadratureError(
            f"no decaying tail found for the log-scale integrand beyond a={a}")

    def scaled(x):
        v = log_f(x)
        return math.exp(v - peak) if v > -math.inf else 0.0

    val = _checked_quad(scaled, a, cut, cfg)
    if val <= 0.0:
        return 0.0
    return math.exp(peak + math.log(val))
