"""Closed-form model of the memory-assisted swap experiment.

Retrieval decay, Stokes / anti-Stokes detection probabilities, the
signal-to-noise cross-correlation g, fringe visibility, the two-photon
suppression parameter h, the concurrence estimators built from them, the
g-threshold where entanglement appears, and the multiplexed generation rate.

Everything here is scalar math on ExperimentParams; the density-matrix engine
(fock.py) validates these forms, and the Monte Carlo layer (protocol.py)
samples from engine distributions and is compared back against both.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.optimize import bisect

from .params import ExperimentParams

__all__ = [
    "CorrelationPair",
    "ConcurrenceInputs",
    "MultiplexedRate",
    "ClampedVisibilityWarning",
    "retrieval_efficiency",
    "prob_stokes",
    "prob_antistokes",
    "cross_correlation",
    "correlation_pair",
    "visibility",
    "suppression",
    "concurrence",
    "coincidence_probability",
    "threshold_g",
    "single_mode_herald_probability",
    "multiplexed_eg_probability",
    "swap_pair_probability",
]


class ClampedVisibilityWarning(UserWarning):
    """Approximate visibility went negative and was clamped to zero."""


@dataclass(frozen=True)
class CorrelationPair:
    """Cross-correlations of the two readout stages of one swap attempt.

    g_b: swap-stage channels (read at t1, background z_b)
    g_ac: verification channels (read at t2, background z_ac)
    """

    g_b: float
    g_ac: float

    def __post_init__(self):
        if not (self.g_b > 1.0 and self.g_ac > 1.0):
            raise ValueError("cross-correlations must exceed 1 (classical floor)")


@dataclass(frozen=True)
class ConcurrenceInputs:
    """Measured ingredients of the concurrence estimators.

    p10/p01/p11/p00 are the conditional photon-count probabilities of the two
    verification channels, v the fringe visibility, p_c = p10 + p01 and
    h = p11 / (p10 * p01) the derived combinations.
    """

    p10: float
    p01: float
    p11: float
    p00: float
    v: float
    p_c: float
    h: float

    @classmethod
    def from_probabilities(cls, p10, p01, p11, p00, v) -> "ConcurrenceInputs":
        if min(p10, p01, p11, p00) < 0:
            raise ValueError("probabilities must be non-negative")
        denom = p10 * p01
        h = p11 / denom if denom > 0 else math.inf
        return cls(p10=p10, p01=p01, p11=p11, p00=p00, v=v, p_c=p10 + p01, h=h)

    @property
    def total(self) -> float:
        return self.p10 + self.p01 + self.p11 + self.p00


@dataclass(frozen=True)
class MultiplexedRate:
    """Per-pair generation probability per trial with m modes."""

    exact: float      # 1 - (1 - p1)^m
    linearized: float  # m * p1
    p1: float
    m: int


def retrieval_efficiency(t_us: float, params: ExperimentParams) -> float:
    """gamma(t) = gamma0 * exp(-t / tau0)."""
    if t_us < 0:
        raise ValueError("t_us must be >= 0")
    return params.gamma0 * math.exp(-t_us / params.tau0_us)


def prob_stokes(params: ExperimentParams) -> float:
    """Detected Stokes probability per write pulse: chi * eta."""
    return params.chi * params.eta


def prob_antistokes(t_us: float, z: float, params: ExperimentParams) -> float:
    """Detected anti-Stokes probability per read pulse.

    Retrieved signal + leaked spontaneous emission + background, all times
    detection efficiency:
    chi*gamma(t)*eta + chi*(1-gamma(t))*xi_se*f_cav*eta + z*eta
    """
    gamma_t = retrieval_efficiency(t_us, params)
    chi = params.chi
    return (
        chi * gamma_t * params.eta
        + chi * (1.0 - gamma_t) * params.xi_se * params.f_cav * params.eta
        + z * params.eta
    )


def noise_floor(t_us: float, z: float, params: ExperimentParams) -> float:
    """Uncorrelated photon probability per readout channel (before detection).

    This is prob_antistokes without the eta factor; the engine injects it as
    incoherent channel noise.
    """
    gamma_t = retrieval_efficiency(t_us, params)
    chi = params.chi
    return chi * gamma_t + chi * (1.0 - gamma_t) * params.xi_se * params.f_cav + z


def cross_correlation(t_us: float, z: float, params: ExperimentParams) -> float:
    """Signal/noise cross-correlation of one memory readout.

    g = 1 + gamma(t) / (chi*gamma(t) + z + chi*(1-gamma(t))*xi_se*f_cav)

    Detection efficiency cancels.  Returns math.inf in the noiseless limit
    (chi = 0 and z = 0 would zero the denominator); callers must use
    infinity-aware paths there.
    """
    gamma_t = retrieval_efficiency(t_us, params)
    denom = noise_floor(t_us, z, params)
    if denom == 0.0:
        return math.inf
    return 1.0 + gamma_t / denom


def correlation_pair(params: ExperimentParams) -> CorrelationPair:
    """g at the two readout stages: (t1, z_b) and (t2, z_ac)."""
    return CorrelationPair(
        g_b=cross_correlation(params.t1_us, params.z_b, params),
        g_ac=cross_correlation(params.t2_us, params.z_ac, params),
    )


def visibility(corr: CorrelationPair, form: str = "approx", clamp: bool = True) -> float:
    """Fringe visibility of the verification interference.

    form="approx": V = 1 - 4/g_b - 4/g_ac   (can go negative at low g;
    clamped to 0 with a ClampedVisibilityWarning unless clamp=False)
    form="exact":  V = 1 / (1 + 4/(g_ac - 1) + 4/(g_b - 1))
    """
    if form == "approx":
        v = 1.0 - 4.0 / corr.g_b - 4.0 / corr.g_ac
        if v < 0.0 and clamp:
            warnings.warn(
                f"approximate visibility {v:.4g} clamped to 0",
                ClampedVisibilityWarning, stacklevel=2,
            )
            return 0.0
        return v
    if form == "exact":
        if math.isinf(corr.g_b) and math.isinf(corr.g_ac):
            return 1.0
        a = 4.0 / (corr.g_ac - 1.0) if math.isfinite(corr.g_ac) else 0.0
        b = 4.0 / (corr.g_b - 1.0) if math.isfinite(corr.g_b) else 0.0
        return 1.0 / (1.0 + a + b)
    raise ValueError(f"unknown visibility form {form!r}")


def suppression(corr: CorrelationPair) -> float:
    """Two-photon suppression parameter h = 8 * (1/g_b + 1/g_ac).

    The product form: h = 1 exactly at g_b = g_ac = 16, h -> 0 as both
    correlations diverge.
    """
    gb = 0.0 if math.isinf(corr.g_b) else 1.0 / corr.g_b
    gac = 0.0 if math.isinf(corr.g_ac) else 1.0 / corr.g_ac
    return 8.0 * (gb + gac)


def concurrence(inputs: ConcurrenceInputs, form: str = "approx") -> float:
    """Concurrence estimators from count statistics.

    form="exact":  C = max{0, ((p10+p01)*V - 2*sqrt(p00*p11)) / P}
    form="approx": C = max{0, p_c * (V - sqrt(h))}
    """
    if form == "exact":
        total = inputs.total
        if total <= 0:
            raise ValueError("total probability must be positive")
        raw = ((inputs.p10 + inputs.p01) * inputs.v
               - 2.0 * math.sqrt(inputs.p00 * inputs.p11)) / total
        return max(0.0, raw)
    if form == "approx":
        if inputs.h < 0:
            raise ValueError("h must be >= 0")
        return max(0.0, inputs.p_c * (inputs.v - math.sqrt(inputs.h)))
    raise ValueError(f"unknown concurrence form {form!r}")


def coincidence_probability(theta: float, params: ExperimentParams) -> float:
    """Closed-form coincidence fringe of the swap-then-verify sequence.

    P(theta) = eta*gamma(t1) * eta*gamma(t2) * (1 + cos theta)/2
               + 2*eta*gamma(t2) * P_aS(t1, z_b)
               + 2*eta*gamma(t1) * P_aS(t2, z_ac)

    Convention: the closed form sums its four initial-state branches
    unweighted, which is 4x the physical joint probability per heralded
    attempt.  The fringe shape and visibility are unaffected; the engine
    reports the same convention for direct comparison.
    """
    eta = params.eta
    g1 = retrieval_efficiency(params.t1_us, params)
    g2 = retrieval_efficiency(params.t2_us, params)
    signal = eta * g1 * eta * g2 * 0.5 * (1.0 + math.cos(theta))
    noise = (
        2.0 * eta * g2 * prob_antistokes(params.t1_us, params.z_b, params)
        + 2.0 * eta * g1 * prob_antistokes(params.t2_us, params.z_ac, params)
    )
    return signal + noise


def _net_correlation(g_b: float, g_ac: float, form: str) -> float:
    corr = CorrelationPair(g_b=g_b, g_ac=g_ac)
    return visibility(corr, form=form, clamp=False) - math.sqrt(suppression(corr))


def threshold_g(form: str = "approx", fixed_g_b: float | None = None,
                bracket: tuple[float, float] = (8.0 + 1e-9, 1e4),
                tol: float = 1e-10) -> float:
    """Cross-correlation at which the concurrence estimator reaches zero.

    Solves V - sqrt(h) = 0 by bracketed bisection on g in (8, 1e4).  With
    fixed_g_b=None both correlations are set equal (symmetric threshold);
    otherwise g_b is held and the verification-stage g is solved for.

    The symmetric approx form has the closed solution g* = 16 + 8*sqrt(3).
    """
    if form not in ("approx", "exact"):
        raise ValueError(f"unknown threshold form {form!r}")
    if fixed_g_b is None:
        fun = lambda g: _net_correlation(g, g, form)
    else:
        fun = lambda g: _net_correlation(fixed_g_b, g, form)
    lo, hi = bracket
    flo, fhi = fun(lo), fun(hi)
    if flo * fhi > 0:
        raise ValueError(
            f"no sign change on bracket ({lo:g}, {hi:g}): f(lo)={flo:g}, f(hi)={fhi:g}"
        )
    return bisect(fun, lo, hi, xtol=tol)


def single_mode_herald_probability(params: ExperimentParams) -> float:
    """Per-mode, per-trial probability of heralding one memory pair.

    One Stokes photon emitted by either ensemble of the link (chi each, into
    orthogonal polarizations of one fiber), routed to the heralding detector
    with probability 1/2, detected with eta: p1 = chi * eta.  At eta = 1 the
    multiplexed linearized rate reduces to m * chi.
    """
    return params.chi * params.eta


def multiplexed_eg_probability(params: ExperimentParams) -> MultiplexedRate:
    """Per-pair generation probability per trial across m modes."""
    p1 = single_mode_herald_probability(params)
    m = params.m_modes
    return MultiplexedRate(
        exact=1.0 - (1.0 - p1) ** m,
        linearized=m * p1,
        p1=p1,
        m=m,
    )


def swap_pair_probability(params: ExperimentParams) -> float:
    """Probability that some mode index heralds BOTH pairs in one trial.

    The swap needs the two link heralds at the same mode index (the switch
    network routes one combined field per index): 1 - (1 - p1^2)^m, linear in
    m at small p1.
    """
    p1 = single_mode_herald_probability(params)
    return 1.0 - (1.0 - p1 * p1) ** params.m_modes
