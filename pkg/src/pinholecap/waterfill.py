"""Exact full-CSI ergodic capacity under water-filling power control.

The optimal policy P(lam) = (1/cutoff - 1/lam)+ spends power only above a
gain cutoff; the cutoff is fixed by inverting the average-power constraint
and the capacity is the rate functional integrated against the gain law.
Both the dyadic and the single-hop channels run through one generic
"gain law" (a log-density plus a cutoff seed heuristic), so the solver and
the integrals are implemented once.
"""

import math
from dataclasses import dataclass
from typing import Callable

from .channel import (DyadicChannel, NakagamiParams, gain_log_pdf_dyadic,
                      gain_log_pdf_single)
from .specfun import QuadratureConfig, integrate_semi_infinite

SNR_MIN = 1e-9   # -90 dB; below this double precision tails are not trusted
SNR_MAX = 1e6

CUTOFF_REL_TOL = 1e-8
_MAX_EXPAND = 240
_MAX_BISECT = 400


class CutoffBracketError(RuntimeError):
    """The cutoff bracket could not be expanded to enclose the target SNR."""


class CutoffConvergenceError(RuntimeError):
    """Bisection exhausted its budget before meeting the residual tolerance."""


@dataclass(frozen=True)
class WaterfillSolution:
    """SNR, the solved gain cutoff, and the resulting capacity in nats."""

    snr: float
    cutoff: float
    capacity_nats: float
    converged: bool = True


@dataclass(frozen=True)
class GainLaw:
    """Gain distribution handle: log-density plus a cutoff seed heuristic."""

    log_pdf: Callable[[float], float]
    cutoff_seed: Callable[[float], float]


def dyadic_law(ch: DyadicChannel) -> GainLaw:
    b = ch.b_tr

    def seed(snr):
        # low-SNR cutoff grows like b_tr/4 * ln^2(1/snr)
        if snr < 1.0:
            return b * max(0.25 * math.log(1.0 / snr) ** 2, 1e-2)
        return b * 1e-2

    return GainLaw(lambda lam: gain_log_pdf_dyadic(ch, lam), seed)


def single_law(p: NakagamiParams) -> GainLaw:
    scale = p.omega / p.m

    def seed(snr):
        # exponential-type tail: cutoff grows like (omega/m) ln(1/snr)
        if snr < 1.0:
            return scale * max(math.log(1.0 / snr), 1e-2)
        return scale * 1e-2

    return GainLaw(lambda lam: gain_log_pdf_single(p, lam), seed)


def avg_power_law(law: GainLaw, cutoff: float,
                  cfg: QuadratureConfig | None = None) -> float:
    """Delivered average power for a given cutoff: E[(1/cutoff - 1/lam)+]."""
    if cutoff <= 0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")

    def log_f(lam):
        w = 1.0 / cutoff - 1.0 / lam
        if w <= 0.0:
            return -math.inf
        return math.log(w) + law.log_pdf(lam)

    return integrate_semi_infinite(None, cutoff, cfg, log_f=log_f)


def capacity_at_cutoff_law(law: GainLaw, cutoff: float,
                           cfg: QuadratureConfig | None = None) -> float:
    """Rate integral E[log(lam/cutoff)+] in nats at a given cutoff."""
    if cutoff <= 0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")

    def log_f(lam):
        r = math.log(lam / cutoff)
        if r <= 0.0:
            return -math.inf
        return math.log(r) + law.log_pdf(lam)

    return integrate_semi_infinite(None, cutoff, cfg, log_f=log_f)


def _check_snr(snr):
    if not snr > 0:
        raise ValueError(f"snr must be positive, got {snr}")
    if snr < SNR_MIN or snr > SNR_MAX:
        raise ValueError(
            f"snr {snr} outside the supported range [{SNR_MIN}, {SNR_MAX}]")


def solve_cutoff_law(law: GainLaw, snr: float,
                     cfg: QuadratureConfig | None = None) -> float:
    """Invert the average-power constraint for the cutoff.

    avg_power is a strictly decreasing bijection of the cutoff onto
    (0, inf), so an informed seed is expanded geometrically both ways into
    a bracket and then bisected on the log axis until the relative power
    residual drops below CUTOFF_REL_TOL.
    """
    _check_snr(snr)
    power = lambda c: avg_power_law(law, c, cfg)

    seed = law.cutoff_seed(snr)
    lo = hi = seed
    p_seed = power(seed)
    if p_seed > snr:
        # cutoff too small: expand upward until power falls below target
        for _ in range(_MAX_EXPAND):
            hi *= 4.0
            if power(hi) <= snr:
                break
        else:
            raise CutoffBracketError(
                f"could not bracket snr={snr} expanding upward from {seed}")
    else:
        for _ in range(_MAX_EXPAND):
            lo /= 4.0
            if power(lo) >= snr:
                break
        else:
            raise CutoffBracketError(
                f"could not bracket snr={snr} expanding downward from {seed}")

    for _ in range(_MAX_BISECT):
        mid = math.sqrt(lo * hi)
        p_mid = power(mid)
        if abs(p_mid - snr) <= CUTOFF_REL_TOL * snr:
            return mid
        if p_mid > snr:
            lo = mid
        else:
            hi = mid
    raise CutoffConvergenceError(
        f"cutoff bisection did not reach relative residual {CUTOFF_REL_TOL} "
        f"for snr={snr}")


def waterfill_law(law: GainLaw, snr: float,
                  cfg: QuadratureConfig | None = None) -> WaterfillSolution:
    cutoff = solve_cutoff_law(law, snr, cfg)
    cap = capacity_at_cutoff_law(law, cutoff, cfg)
    return WaterfillSolution(snr=snr, cutoff=cutoff, capacity_nats=cap)


# dyadic-channel surface

def avg_power(ch: DyadicChannel, cutoff: float,
              cfg: QuadratureConfig | None = None) -> float:
    return avg_power_law(dyadic_law(ch), cutoff, cfg)


def solve_cutoff(ch: DyadicChannel, snr: float,
                 cfg: QuadratureConfig | None = None) -> float:
    return solve_cutoff_law(dyadic_law(ch), snr, cfg)


def waterfill_dyadic(ch: DyadicChannel, snr: float,
                     cfg: QuadratureConfig | None = None) -> WaterfillSolution:
    return waterfill_law(dyadic_law(ch), snr, cfg)


def capacity_exact(ch: DyadicChannel, snr: float,
                   cfg: QuadratureConfig | None = None) -> float:
    """Exact water-filling capacity of the dyadic channel, nats per symbol."""
    return waterfill_dyadic(ch, snr, cfg).capacity_nats


# single-hop surface

def avg_power_single(p: NakagamiParams, cutoff: float,
                     cfg: QuadratureConfig | None = None) -> float:
    return avg_power_law(single_law(p), cutoff, cfg)


def waterfill_single(p: NakagamiParams, snr: float,
                     cfg: QuadratureConfig | None = None) -> WaterfillSolution:
    return waterfill_law(single_law(p), snr, cfg)


def capacity_exact_single(p: NakagamiParams, snr: float,
                          cfg: QuadratureConfig | None = None) -> float:
    """Exact water-filling capacity of one Nakagami hop, nats per symbol."""
    return waterfill_single(p, snr, cfg).capacity_nats
