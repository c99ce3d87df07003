"""Event-level Monte-Carlo simulation of the multiplexed swap protocol.

Each trial plays one repetition of the experiment: write pulses drive all
m mode pairs of both links, heralding detectors fire per mode, the switch
network routes the lowest common heralded index to the swap station, and the
swap/verification clicks are sampled from the conditional distributions the
Fock engine computes for the surviving quadruple.  Interference-bearing
stages are never sampled classically; only multiplexing, routing and the
cutoff policy are.

Randomness is counter-based (Philox) and sliced per trial index, so a batch
gives bit-identical outcomes for any chunking or worker decomposition.
Stream layout, per trial index i:

  herald stream        key (seed, stream_offset):   ticks [E*i, E*(i+1)),
                       E = ceil(2m/4); first 2m doubles used, writes of
                       link A-B1 first, then B2-C.
  interference stream  key (seed, stream_offset+1): tick i, four doubles
                       [u_swap, u_fringe, u_counting, spare].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import analytic, fock
from .params import ExperimentParams, ParamError, with_overrides
from .series import CurveSeries

__all__ = [
    "TrialOutcome",
    "TrialStream",
    "ConditionalTables",
    "SwapStatistics",
    "JOINT_ORDER",
    "CHUNK_TRIALS",
    "conditional_tables",
    "trial_stream",
    "run_trial",
    "run_batch",
    "sweep",
    "SWEEP_AXES",
    "SWEEP_OBSERVABLES",
    "apply_cutoff_policy",
    "cutoff_tradeoff",
]

# Maximum trials vectorized per chunk; chunk boundaries are tick-aligned so
# the decomposition never changes the sampled outcomes.
CHUNK_TRIALS = 1_000_000

# Fixed unpacking order of joint two-detector outcomes when inverting a
# uniform against the cumulative distribution.
JOINT_ORDER = ((True, True), (True, False), (False, True), (False, False))

_WORDS_PER_TICK = 4  # Philox4x64 emits four 64-bit words per counter tick


def _herald_ticks(m_modes: int) -> int:
    return -(-2 * m_modes // _WORDS_PER_TICK)


def _uniform_block(seed: int, stream: int, first_tick: int, n_ticks: int) -> np.ndarray:
    """Doubles for ticks [first_tick, first_tick + n_ticks) of one stream."""
    bg = np.random.Philox(key=[seed, stream])
    if first_tick:
        bg.advance(first_tick)
    return np.random.Generator(bg).random(n_ticks * _WORDS_PER_TICK)


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) < 2 ** 64:
        raise ParamError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


@dataclass(frozen=True)
class TrialOutcome:
    """Everything observable about a single protocol repetition.

    Mode indices are 1-based and refer to the lowest heralded mode of each
    link; routed_mode is the lowest index heralded by both links, which is
    the one the switch network feeds to the swap station.  A swap click
    implies both links heralded.
    """

    eg_mode_ab1: Optional[int]
    eg_mode_b2c: Optional[int]
    routed_mode: Optional[int]
    es_click: bool
    ev1_click: bool
    ev2_click: bool
    a_click: bool
    c_click: bool
    t1_us: float
    t2_us: float
    theta: float
    cutoff_aborted: bool = False

    def __post_init__(self):
        if self.es_click and (self.eg_mode_ab1 is None or self.eg_mode_b2c is None):
            raise ValueError("swap click without both link heralds")


@dataclass(frozen=True)
class TrialStream:
    """Uniform draws for one trial, sliced from the global counter streams."""

    herald: np.ndarray        # 2m doubles, link A-B1 modes first
    interference: np.ndarray  # 4 doubles: swap, fringe joint, counting joint, spare

    def __post_init__(self):
        if len(self.interference) != _WORDS_PER_TICK:
            raise ValueError("interference slice must hold 4 doubles")


def trial_stream(seed: int, index: int, m_modes: int, stream_offset: int = 0) -> TrialStream:
    """The exact uniforms trial `index` consumes inside run_batch."""
    seed = _check_seed(seed)
    if index < 0:
        raise ParamError("trial index must be >= 0")
    ticks = _herald_ticks(m_modes)
    herald = _uniform_block(seed, stream_offset, ticks * index, ticks)[: 2 * m_modes]
    interference = _uniform_block(seed, stream_offset + 1, index, 1)
    return TrialStream(herald=herald, interference=interference)


@dataclass(frozen=True)
class ConditionalTables:
    """Engine-computed click distributions for the heralded quadruple.

    p_swap1 is the designated swap-detector click probability given routing;
    fringe_cdf[j] and counting_cdf are cumulative joint distributions over
    JOINT_ORDER, conditioned on that click.
    """

    p_swap1: float
    thetas: tuple
    fringe_cdf: np.ndarray   # (n_theta, 4)
    counting_cdf: np.ndarray  # (4,)

    def theta_row(self, theta: float) -> np.ndarray:
        for j, t in enumerate(self.thetas):
            if t == theta:
                return self.fringe_cdf[j]
        raise KeyError(f"theta {theta} not tabulated")


def _joint_cdf(joint: dict) -> np.ndarray:
    probs = np.array([max(joint[key], 0.0) for key in JOINT_ORDER])
    total = probs.sum()
    if not math.isclose(total, 1.0, rel_tol=0, abs_tol=1e-6):
        raise RuntimeError(f"conditional joint not normalized: sum={total!r}")
    cdf = np.cumsum(probs / total)
    cdf[-1] = 1.0
    return cdf


@lru_cache(maxsize=16)
def _tables_cached(params: ExperimentParams, thetas: tuple, n_max: int,
                   conditioning: str) -> ConditionalTables:
    p_click, rho_ac = fock.swap_stage(params, n_max=n_max, conditioning=conditioning)
    gamma2 = analytic.retrieval_efficiency(params.t2_us, params)
    q2 = fock.in_mode_noise(params, params.t2_us, conditioning)
    extra2 = fock.detector_extra(params, params.t2_us, params.z_ac)
    rows = []
    for theta in thetas:
        joint = fock.verification_joint(rho_ac, gamma2, q2, params.eta, theta,
                                        p_extra=extra2)
        rows.append(_joint_cdf(joint))
    counting = fock.counting_joint(rho_ac, gamma2, q2, params.eta, p_extra=extra2)
    return ConditionalTables(
        p_swap1=p_click,
        thetas=thetas,
        fringe_cdf=np.array(rows) if rows else np.zeros((0, 4)),
        counting_cdf=_joint_cdf(counting),
    )


def conditional_tables(params: ExperimentParams, thetas: Sequence[float],
                       n_max: int = fock.DEFAULT_N_MAX,
                       conditioning: str = "heralded") -> ConditionalTables:
    """Build (or fetch cached) conditional click tables for a theta grid."""
    key = tuple(float(t) for t in thetas)
    return _tables_cached(params, key, int(n_max), conditioning)


def _sample_joint(cdf: np.ndarray, u: float) -> tuple:
    k = int(np.searchsorted(cdf, u, side="right"))
    return JOINT_ORDER[min(k, 3)]


def run_trial(params: ExperimentParams, stream: TrialStream, theta: float,
              tables: Optional[ConditionalTables] = None,
              n_max: int = fock.DEFAULT_N_MAX,
              conditioning: str = "heralded") -> TrialOutcome:
    """Play one repetition using the supplied per-trial uniforms.

    Heralds are Bernoulli per mode with the single-mode herald probability;
    the swap is attempted only when some index heralded in both links (the
    beam displacers combine readouts per index, so cross-index swaps cannot
    interfere).  Swap and verification outcomes come from the engine tables.
    Failures are data, not errors.
    """
    m = params.m_modes
    if len(stream.herald) != 2 * m:
        raise ParamError(f"herald slice holds {len(stream.herald)} doubles, need {2 * m}")
    theta = float(theta)
    p1 = analytic.single_mode_herald_probability(params)
    hits_ab1 = stream.herald[:m] < p1
    hits_b2c = stream.herald[m:] < p1
    eg_ab1 = int(np.argmax(hits_ab1)) + 1 if hits_ab1.any() else None
    eg_b2c = int(np.argmax(hits_b2c)) + 1 if hits_b2c.any() else None

    aborted = params.cutoff_us is not None and params.t2_us > params.cutoff_us
    common = hits_ab1 & hits_b2c
    routed = int(np.argmax(common)) + 1 if (common.any() and not aborted) else None

    es = ev1 = ev2 = a_click = c_click = False
    if routed is not None:
        # engine tables are only defined (and only needed) when a swap runs
        if tables is None or not any(t == theta for t in tables.thetas):
            tables = conditional_tables(params, (theta,), n_max, conditioning)
        es = bool(stream.interference[0] < tables.p_swap1)
        if es:
            ev1, ev2 = _sample_joint(tables.theta_row(theta), stream.interference[1])
            a_click, c_click = _sample_joint(tables.counting_cdf, stream.interference[2])

    return TrialOutcome(
        eg_mode_ab1=eg_ab1, eg_mode_b2c=eg_b2c, routed_mode=routed,
        es_click=bool(es), ev1_click=bool(ev1), ev2_click=bool(ev2),
        a_click=bool(a_click), c_click=bool(c_click),
        t1_us=params.t1_us, t2_us=params.t2_us, theta=theta,
        cutoff_aborted=bool(aborted),
    )


@dataclass(frozen=True)
class SwapStatistics:
    """Accumulated counts and derived estimates of one batch.

    Counters: n_eg_ab1 / n_eg_b2c count trials where the link heralded in
    any mode; n_eg needs both links (any indices); n_routed needs a common
    index and no cutoff abort; fourfold = swap click and verification
    detector 1 click, the coincidence the multiplexing figure counts.

    The counting arm gives p11/p10/p01/p00 conditioned on the swap click,
    h = p11/(p10*p01), p_c = p10+p01.  The fringe arm gives the visibility
    from a weighted least-squares fit of rate = A + B*cos(theta), reported
    as (max-min)/(max+min) of the fit, i.e. |B|/A.  Standard errors are
    binomial for counts, delta-method for derived quantities; the fringe
    and counting arms use independent uniforms, so their errors combine
    without covariance.  Concurrence uses the approximate estimator
    p_c*(V - sqrt(h)); concurrence_raw keeps the unclamped value so zero
    crossings stay visible.
    """

    n_trials: int
    n_aborted: int
    n_eg_ab1: int
    n_eg_b2c: int
    n_eg: int
    n_routed: int
    n_es: int
    fourfold: int
    thetas: tuple
    n_by_theta: np.ndarray          # trials assigned each theta
    fourfold_by_theta: np.ndarray   # swap & verification-1 clicks
    counting_counts: np.ndarray     # (4,) over JOINT_ORDER, swap-click trials
    p_es: float
    p_es_se: float
    p11: float
    p11_se: float
    p10: float
    p10_se: float
    p01: float
    p01_se: float
    p00: float
    p00_se: float
    p_c: float
    p_c_se: float
    h: float
    h_se: float
    v: float
    v_se: float
    fit_offset: float
    fit_amplitude: float
    concurrence: float
    concurrence_raw: float
    concurrence_se: float
    accepted_rate: float
    insufficient: bool
    flags: tuple
    seed: int
    stream_offset: int

    def as_dict(self) -> dict:
        out = {}
        for name in self.__dataclass_fields__:
            val = getattr(self, name)
            if isinstance(val, np.ndarray):
                val = val.tolist()
            elif isinstance(val, tuple):
                val = list(val)
            out[name] = val
        return out


def _binom_se(k: int, n: int) -> float:
    if n <= 0:
        return float("nan")
    p = k / n
    return math.sqrt(p * (1.0 - p) / n)


def _multinomial_cov(p: np.ndarray, n: int) -> np.ndarray:
    cov = -np.outer(p, p)
    np.fill_diagonal(cov, p * (1.0 - p))
    return cov / n


def _fringe_fit(thetas: np.ndarray, k: np.ndarray, n: np.ndarray):
    """WLS fit of k/n = A + B cos(theta); returns (A, B, cov, flags)."""
    flags = []
    good = n > 0
    if good.sum() < 2 or len(np.unique(np.cos(thetas[good]))) < 2:
        return float("nan"), float("nan"), None, ["fringe-underdetermined"]
    th, kk, nn = thetas[good], k[good], n[good]
    r = kk / nn
    # variance smoothing keeps zero-count bins from getting infinite weight
    p_s = (kk + 0.5) / (nn + 1.0)
    w = nn / (p_s * (1.0 - p_s))
    x = np.column_stack([np.ones_like(th), np.cos(th)])
    xtw = x.T * w
    try:
        cov = np.linalg.inv(xtw @ x)
    except np.linalg.LinAlgError:
        return float("nan"), float("nan"), None, ["fringe-singular"]
    a, b = cov @ (xtw @ r)
    return float(a), float(b), cov, flags


def run_batch(params: ExperimentParams, n_trials: int,
              theta_grid: Optional[Sequence[float]] = None, seed: int = 0,
              workers: int = 1, n_max: int = fock.DEFAULT_N_MAX,
              conditioning: str = "heralded",
              stream_offset: int = 0) -> SwapStatistics:
    """Run n_trials repetitions and accumulate SwapStatistics.

    Trial i is assigned theta_grid[i mod len(theta_grid)].  The trial
    index alone fixes every uniform the trial consumes, so the outcome
    sequence is bit-identical for any `workers` value; the parameter only
    sets the block decomposition used during accumulation (blocks are
    evaluated in order, in process: the vectorized inner loop is the fast
    path and merging is plain addition).
    """
    if n_trials < 1:
        raise ParamError("n_trials must be >= 1")
    if workers < 1:
        raise ParamError("workers must be >= 1")
    seed = _check_seed(seed)
    if theta_grid is None:
        theta_grid = fock.default_theta_grid()
    thetas = np.array([float(t) for t in theta_grid])
    if thetas.size == 0:
        raise ParamError("theta_grid must be non-empty")

    m = params.m_modes
    p1 = analytic.single_mode_herald_probability(params)
    ticks = _herald_ticks(m)
    words = ticks * _WORDS_PER_TICK
    aborted_all = params.cutoff_us is not None and params.t2_us > params.cutoff_us
    # no trial can reach the swap without heralds or past the cutoff, and
    # the heralded engine state is undefined at chi=0 anyway
    tables = None
    if p1 > 0 and not aborted_all:
        tables = conditional_tables(params, thetas, n_max, conditioning)

    n_th = len(thetas)
    counters = dict(n_aborted=0, n_eg_ab1=0, n_eg_b2c=0, n_eg=0, n_routed=0,
                    n_es=0, fourfold=0)
    n_by_theta = np.zeros(n_th, dtype=np.int64)
    ff_by_theta = np.zeros(n_th, dtype=np.int64)
    counting_counts = np.zeros(4, dtype=np.int64)
    if tables is not None:
        fringe_cut = tables.fringe_cdf[:, :3]  # outcome = #boundaries <= u
        p_swap1 = tables.p_swap1
    else:
        fringe_cut = np.zeros((n_th, 3))
        p_swap1 = 0.0

    # worker blocks, then CHUNK_TRIALS chunks inside each; all boundaries
    # are trial-index-aligned so the decomposition is invisible to the RNG
    block = -(-n_trials // workers)
    starts = []
    for w in range(workers):
        lo = w * block
        hi = min(n_trials, lo + block)
        s = lo
        while s < hi:
            e = min(hi, s + CHUNK_TRIALS)
            starts.append((s, e))
            s = e

    for lo, hi in starts:
        count = hi - lo
        eg = _uniform_block(seed, stream_offset, ticks * lo,
                            ticks * count).reshape(count, words)[:, : 2 * m]
        ui = _uniform_block(seed, stream_offset + 1, lo,
                            count).reshape(count, _WORDS_PER_TICK)

        hits1 = eg[:, :m] < p1
        hits2 = eg[:, m:] < p1
        any1 = hits1.any(axis=1)
        any2 = hits2.any(axis=1)
        common = (hits1 & hits2).any(axis=1)
        routed = common & (not aborted_all)

        es = routed & (ui[:, 0] < p_swap1)
        th_idx = (np.arange(lo, hi) % n_th).astype(np.int64)

        counters["n_aborted"] += int(count if aborted_all else 0)
        counters["n_eg_ab1"] += int(any1.sum())
        counters["n_eg_b2c"] += int(any2.sum())
        counters["n_eg"] += int((any1 & any2).sum())
        counters["n_routed"] += int(routed.sum())
        counters["n_es"] += int(es.sum())
        np.add.at(n_by_theta, th_idx, 1)

        if es.any():
            sel = np.flatnonzero(es)
            rows = fringe_cut[th_idx[sel]]
            k_ev = (ui[sel, 1][:, None] >= rows).sum(axis=1)
            ev1 = k_ev < 2  # JOINT_ORDER: first two outcomes click detector 1
            counters["fourfold"] += int(ev1.sum())
            np.add.at(ff_by_theta, th_idx[sel[ev1]], 1)
            k_c = (ui[sel, 2][:, None] >= tables.counting_cdf[None, :3]).sum(axis=1)
            np.add.at(counting_counts, k_c, 1)

    return _assemble(params, n_trials, counters, thetas, n_by_theta,
                     ff_by_theta, counting_counts, seed, stream_offset)


def _assemble(params, n_trials, counters, thetas, n_by_theta, ff_by_theta,
              counting_counts, seed, stream_offset) -> SwapStatistics:
    flags = []
    n_es = counters["n_es"]
    n_routed = counters["n_routed"]

    p_es = n_es / n_routed if n_routed else float("nan")
    p_es_se = _binom_se(n_es, n_routed)

    if n_es > 0:
        pj = counting_counts / n_es
        cov_c = _multinomial_cov(pj, n_es)
        se_j = np.sqrt(np.clip(np.diag(cov_c), 0.0, None))
    else:
        pj = np.full(4, float("nan"))
        cov_c = None
        se_j = np.full(4, float("nan"))
        flags.append("no-swap-clicks")
    p11, p10, p01, p00 = pj

    p_c = p10 + p01
    if cov_c is not None:
        g_pc = np.array([0.0, 1.0, 1.0, 0.0])
        p_c_se = math.sqrt(max(g_pc @ cov_c @ g_pc, 0.0))
    else:
        p_c_se = float("nan")

    if n_es > 0 and p10 > 0 and p01 > 0:
        h = p11 / (p10 * p01)
        g_h = np.array([1.0 / (p10 * p01), -h / p10, -h / p01, 0.0])
        h_se = math.sqrt(max(g_h @ cov_c @ g_h, 0.0))
    else:
        h = float("nan")
        h_se = float("nan")
        if n_es > 0:
            flags.append("h-zero-denominator")

    a, b, cov_fit, fit_flags = _fringe_fit(thetas, ff_by_theta.astype(float),
                                           n_by_theta.astype(float))
    flags.extend(fit_flags)
    if cov_fit is not None and a > 0:
        v = abs(b) / a
        sgn = 1.0 if b >= 0 else -1.0
        g_v = np.array([-abs(b) / a ** 2, sgn / a])
        v_se = math.sqrt(max(g_v @ cov_fit @ g_v, 0.0))
    else:
        v = float("nan")
        v_se = float("nan")
        if cov_fit is not None:
            flags.append("fringe-offset-nonpositive")

    # C ~ p_c*(V - sqrt(h)); fringe and counting arms are independent
    if not (math.isnan(v) or math.isnan(h)):
        root_h = math.sqrt(h)
        c_raw = p_c * (v - root_h)
        var_c = (p_c * v_se) ** 2
        if cov_c is not None:
            if h > 0:
                g = np.array([
                    -p_c / (2.0 * root_h) / (p10 * p01),
                    (v - root_h) + p_c * root_h / (2.0 * p10),
                    (v - root_h) + p_c * root_h / (2.0 * p01),
                    0.0,
                ])
            else:
                g = np.array([0.0, v, v, 0.0])
                flags.append("h-zero-gradient")
            var_c += max(g @ cov_c @ g, 0.0)
        c_se = math.sqrt(var_c)
    else:
        c_raw = float("nan")
        c_se = float("nan")

    insufficient = (n_es < 100 or math.isnan(h) or math.isnan(v))
    if insufficient and "insufficient-statistics" not in flags:
        flags.append("insufficient-statistics")

    return SwapStatistics(
        n_trials=n_trials,
        n_aborted=counters["n_aborted"],
        n_eg_ab1=counters["n_eg_ab1"],
        n_eg_b2c=counters["n_eg_b2c"],
        n_eg=counters["n_eg"],
        n_routed=n_routed,
        n_es=n_es,
        fourfold=counters["fourfold"],
        thetas=tuple(float(t) for t in thetas),
        n_by_theta=n_by_theta,
        fourfold_by_theta=ff_by_theta,
        counting_counts=counting_counts,
        p_es=p_es, p_es_se=p_es_se,
        p11=float(p11), p11_se=float(se_j[0]),
        p10=float(p10), p10_se=float(se_j[1]),
        p01=float(p01), p01_se=float(se_j[2]),
        p00=float(p00), p00_se=float(se_j[3]),
        p_c=float(p_c), p_c_se=p_c_se,
        h=h, h_se=h_se,
        v=v, v_se=v_se,
        fit_offset=a, fit_amplitude=b,
        concurrence=max(0.0, c_raw) if not math.isnan(c_raw) else float("nan"),
        concurrence_raw=c_raw,
        concurrence_se=c_se,
        accepted_rate=(n_trials - counters["n_aborted"]) / n_trials,
        insufficient=insufficient,
        flags=tuple(flags),
        seed=seed,
        stream_offset=stream_offset,
    )


SWEEP_AXES = ("t2", "m", "chi", "theta")

SWEEP_OBSERVABLES = ("concurrence", "concurrence_clamped", "visibility",
                     "suppression", "p11", "p_c", "fourfold", "es_rate",
                     "eg_rate")


def _observable(stats: SwapStatistics, name: str) -> tuple:
    if name == "concurrence":
        return stats.concurrence_raw, stats.concurrence_se
    if name == "concurrence_clamped":
        return stats.concurrence, stats.concurrence_se
    if name == "visibility":
        return stats.v, stats.v_se
    if name == "suppression":
        return stats.h, stats.h_se
    if name == "p11":
        return stats.p11, stats.p11_se
    if name == "p_c":
        return stats.p_c, stats.p_c_se
    if name == "fourfold":
        return stats.fourfold / stats.n_trials, _binom_se(stats.fourfold, stats.n_trials)
    if name == "es_rate":
        return stats.n_es / stats.n_trials, _binom_se(stats.n_es, stats.n_trials)
    if name == "eg_rate":
        return stats.n_eg_ab1 / stats.n_trials, _binom_se(stats.n_eg_ab1, stats.n_trials)
    raise ParamError(f"unknown observable {name!r}; choose from {SWEEP_OBSERVABLES}")


def _point_params(params: ExperimentParams, axis: str, value: float) -> ExperimentParams:
    if axis == "t2":
        dt = params.delta_t_us
        if value < dt:
            raise ParamError(f"t2={value} leaves t1 negative at fixed spacing {dt}")
        return with_overrides(params, t1_us=value - dt, t2_us=value)
    if axis == "m":
        iv = int(value)
        if iv != value or iv < 1:
            raise ParamError(f"mode count must be a positive integer, got {value}")
        return with_overrides(params, m_modes=iv)
    if axis == "chi":
        return with_overrides(params, chi=value)
    if axis == "theta":
        return params
    raise ParamError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")


def sweep(params: ExperimentParams, axis: str, values: Sequence[float],
          n_trials: int, theta_grid: Optional[Sequence[float]] = None,
          seed: int = 0, observable: str = "concurrence", workers: int = 1,
          n_max: int = fock.DEFAULT_N_MAX, conditioning: str = "heralded",
          name: Optional[str] = None,
          return_stats: bool = False):
    """One run_batch per value, emitted as CurveSeries rows (x, y, sigma).

    t2 sweeps keep the readout spacing fixed (t1 = t2 - delta_t).  Each
    point uses its own pair of streams, offset 2*i, so single points can be
    reproduced in isolation.  theta sweeps run each value as a one-point
    fringe and report the fourfold coincidence rate.
    """
    vals = [float(v) for v in values]
    if list(vals) != sorted(vals):
        raise ParamError("sweep values must be sorted ascending")
    if axis == "theta":
        observable = "fourfold"

    rows = []
    stats_list = []
    for i, value in enumerate(vals):
        p_i = _point_params(params, axis, value)
        grid_i = [value] if axis == "theta" else theta_grid
        stats = run_batch(p_i, n_trials, theta_grid=grid_i, seed=seed,
                          workers=workers, n_max=n_max, conditioning=conditioning,
                          stream_offset=2 * i)
        y, sig = _observable(stats, observable)
        rows.append((value, y, sig))
        stats_list.append(stats)

    series = CurveSeries(
        name=name or f"{observable}_vs_{axis}",
        columns=(axis, observable, "sigma"),
        rows=tuple(rows),
        metadata={
            "params": params.as_dict(),
            "provenance": params.provenance_dict(),
            "axis": axis,
            "observable": observable,
            "n_trials": n_trials,
            "seed": seed,
            "theta_grid": [float(t) for t in theta_grid] if theta_grid is not None else None,
            "conditioning": conditioning,
            "source": "monte-carlo",
        },
    )
    if return_stats:
        return series, stats_list
    return series


def apply_cutoff_policy(params: ExperimentParams, policy) -> ExperimentParams:
    """Return params with the storage-time cutoff set per policy.

    policy: None or "none" clears the cutoff; ("fixed", t_max) or a bare
    number sets it.  t_max must exceed t1, otherwise no trial could ever
    reach the swap.
    """
    if policy is None or policy == "none":
        return with_overrides(params, cutoff_us=None)
    if isinstance(policy, (tuple, list)):
        if len(policy) != 2 or policy[0] != "fixed":
            raise ParamError(f"unrecognized cutoff policy {policy!r}")
        t_max = float(policy[1])
    else:
        t_max = float(policy)
    if t_max <= params.t1_us:
        raise ParamError(f"cutoff {t_max} must exceed t1 = {params.t1_us}")
    return with_overrides(params, cutoff_us=t_max)


def cutoff_tradeoff(params: ExperimentParams, cutoff_values: Sequence[float],
                    t2_values: Sequence[float], n_trials: int,
                    theta_grid: Optional[Sequence[float]] = None, seed: int = 0,
                    workers: int = 1) -> tuple:
    """Rate-versus-quality pairs for a family of cutoff policies.

    Storage time is modeled as uniform over t2_values (each point one batch);
    a cutoff discards the points beyond it.  Returns two CurveSeries over
    t_max: mean concurrence of accepted trials, and the accepted-trial rate.
    """
    cvals = [float(c) for c in cutoff_values]
    if cvals != sorted(cvals):
        raise ParamError("cutoff values must be sorted ascending")

    base = apply_cutoff_policy(params, "none")
    series, stats = sweep(base, "t2", t2_values, n_trials, theta_grid=theta_grid,
                          seed=seed, observable="concurrence", workers=workers,
                          return_stats=True)
    t2s = np.array([r[0] for r in series.rows])
    c = np.array([r[1] for r in series.rows])
    sig = np.array([r[2] for r in series.rows])

    c_rows, rate_rows = [], []
    for t_max in cvals:
        apply_cutoff_policy(params, t_max)  # validates t_max against t1
        keep = t2s <= t_max
        k = int(keep.sum())
        if k:
            c_mean = float(np.mean(c[keep]))
            c_sig = float(np.sqrt(np.sum(sig[keep] ** 2)) / k)
        else:
            c_mean, c_sig = float("nan"), float("nan")
        c_rows.append((t_max, c_mean, c_sig))
        rate = k / len(t2s)
        rate_rows.append((t_max, rate, math.sqrt(rate * (1 - rate) / len(t2s))))

    meta = dict(series.metadata)
    meta["t2_values"] = [float(v) for v in t2_values]
    return (
        CurveSeries(name="cutoff_concurrence", columns=("t_max", "concurrence", "sigma"),
                    rows=tuple(c_rows), metadata=meta),
        CurveSeries(name="cutoff_accepted_rate", columns=("t_max", "accepted_rate", "sigma"),
                    rows=tuple(rate_rows), metadata=meta),
    )
