"""Truncated-Fock density-matrix engine for one heralded mode quadruple.

Four spin modes (two memory pairs) and up to two concurrent readout modes are
evolved exactly on a photon-number-truncated Hilbert space: pair sources,
beam splitters, retrieval as a partial spin-to-light transfer, incoherent
channel noise, and non-number-resolving click detection.  The swap pipeline
is staged so at most six modes are ever concurrent, which keeps the default
density-matrix entry cap sufficient; distinct multiplexed mode indices never
interfere, so one quadruple is the whole quantum problem and multiplexing is
combinatorial (protocol.py).

Operations are functional: each returns a new FockState.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import expm

from . import analytic
from .params import ExperimentParams

__all__ = [
    "DEFAULT_N_MAX",
    "DEFAULT_MAX_ENTRIES",
    "DimensionError",
    "ModeRegister",
    "FockState",
    "ClickOutcome",
    "SwapReport",
    "vacuum",
    "apply_pair_source",
    "apply_beam_splitter",
    "apply_retrieval",
    "inject_noise",
    "inject_leakage",
    "measure_click",
    "partial_trace",
    "wootters_concurrence",
    "heralded_spin_state",
    "swap_stage",
    "in_mode_noise",
    "detector_extra",
    "joint_clicks",
    "verification_joint",
    "counting_joint",
    "swap_pipeline",
    "default_theta_grid",
]

DEFAULT_N_MAX = 2
DEFAULT_MAX_ENTRIES = 1_000_000

# Swap-station beam-splitter phase.  Constant interferometer offsets are
# calibrated so the heralded verification fringe peaks at theta = 0,
# matching the closed-form (1 + cos theta)/2.
ES_PHASE = 0.0


class DimensionError(ValueError):
    """Register would exceed the configured density-matrix entry cap."""


@dataclass(frozen=True)
class ModeRegister:
    """Ordered set of bosonic modes, each truncated at n_max photons."""

    labels: tuple[str, ...]
    n_max: int = DEFAULT_N_MAX
    max_entries: int = DEFAULT_MAX_ENTRIES

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate mode labels in {self.labels}")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.entries > self.max_entries:
            raise DimensionError(
                f"register {self.labels} at n_max={self.n_max} needs "
                f"{self.entries} density-matrix entries > cap {self.max_entries}"
            )

    @property
    def dim_per_mode(self) -> int:
        return self.n_max + 1

    @property
    def n_modes(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.dim_per_mode ** self.n_modes

    @property
    def entries(self) -> int:
        return self.dim ** 2

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no mode {label!r} in register {self.labels}") from None


@dataclass(frozen=True)
class FockState:
    """Density matrix on a ModeRegister (flat index, C-order over modes)."""

    register: ModeRegister
    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.rho.shape != (self.register.dim, self.register.dim):
            raise ValueError(
                f"rho shape {self.rho.shape} does not match register dim {self.register.dim}"
            )

    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    def validate(self, atol: float = 1e-10) -> None:
        """Assert unit trace, hermiticity and positivity within atol."""
        tr = np.trace(self.rho)
        if abs(tr - 1.0) > atol:
            raise ValueError(f"trace {tr} deviates from 1 by more than {atol}")
        if not np.allclose(self.rho, self.rho.conj().T, atol=atol):
            raise ValueError("density matrix is not hermitian")
        eigs = np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))
        if eigs.min() < -atol:
            raise ValueError(f"negative eigenvalue {eigs.min()}")

    def occupation(self, label: str) -> np.ndarray:
        """Photon-number distribution of one mode (marginal)."""
        reduced = partial_trace(self, (label,))
        return np.real(np.diag(reduced.rho)).copy()

    def _tensor(self) -> np.ndarray:
        d, L = self.register.dim_per_mode, self.register.n_modes
        return self.rho.reshape((d,) * (2 * L))


@dataclass(frozen=True)
class ClickOutcome:
    """One branch of a click/no-click measurement."""

    clicked: bool
    probability: float
    state: FockState | None  # None when the branch has zero probability


def vacuum(register: ModeRegister) -> FockState:
    rho = np.zeros((register.dim, register.dim), dtype=np.complex128)
    rho[0, 0] = 1.0
    return FockState(register, rho)


def _lowering(d: int) -> np.ndarray:
    a = np.zeros((d, d), dtype=np.complex128)
    for n in range(1, d):
        a[n - 1, n] = math.sqrt(n)
    return a


def _apply_matrix(tensor: np.ndarray, m: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Contract matrix m onto the given tensor axes (joint, C-order)."""
    total = tensor.ndim
    axes = list(axes)
    dim = 1
    for a in axes:
        dim *= tensor.shape[a]
    rest = [a for a in range(total) if a not in axes]
    perm = axes + rest
    t = np.transpose(tensor, perm).reshape(dim, -1)
    t = m @ t
    t = t.reshape([tensor.shape[a] for a in perm])
    return np.transpose(t, np.argsort(perm))


def _apply_unitary(state: FockState, u: np.ndarray, labels: Sequence[str]) -> FockState:
    reg = state.register
    ket = [reg.axis(l) for l in labels]
    bra = [reg.n_modes + a for a in ket]
    t = state._tensor()
    t = _apply_matrix(t, u, ket)
    t = _apply_matrix(t, u.conj(), bra)
    return FockState(reg, t.reshape(reg.dim, reg.dim))


def _apply_kraus(state: FockState, kraus: Sequence[np.ndarray], labels: Sequence[str]) -> FockState:
    reg = state.register
    ket = [reg.axis(l) for l in labels]
    bra = [reg.n_modes + a for a in ket]
    t = state._tensor()
    out = np.zeros_like(t)
    for k in kraus:
        branch = _apply_matrix(t, k, ket)
        out += _apply_matrix(branch, k.conj(), bra)
    return FockState(reg, out.reshape(reg.dim, reg.dim))


@lru_cache(maxsize=None)
def _beam_splitter_unitary(d: int, phase: float, angle: float) -> np.ndarray:
    """Two-mode mixer: |10> -> cos(angle)|10> + e^{i phase} sin(angle)|01>.

    The generator is anti-hermitian, so the matrix is exactly unitary on the
    truncated space; blocks with total photon number above n_max are
    redistributed within the truncated basis (documented truncation artifact).
    """
    a = _lowering(d)
    ad = a.conj().T
    g = (np.exp(1j * phase) * np.kron(a, ad)
         - np.exp(-1j * phase) * np.kron(ad, a))
    return expm(angle * g)


def apply_beam_splitter(state: FockState, mode1: str, mode2: str,
                        phase: float = 0.0, angle: float = math.pi / 4) -> FockState:
    """50/50 (by default) beam splitter between two modes.

    Convention: a photon entering mode1 exits as
    (|mode1> + e^{i phase} |mode2>) / sqrt(2); mode1 plays the role of the
    first output port.
    """
    u = _beam_splitter_unitary(state.register.dim_per_mode, float(phase), float(angle))
    return _apply_unitary(state, u, (mode1, mode2))


@lru_cache(maxsize=None)
def _pair_source_unitary(d: int, chi: float) -> np.ndarray:
    """Unitary whose action on |00> is the truncated two-mode squeezer.

    First column: amplitudes proportional to chi^{n/2} on |n,n>, renormalized
    over n <= n_max; completed to a full unitary by a Householder reflection
    (only the vacuum column is ever used, see apply_pair_source precondition).
    """
    if chi == 0.0:
        return np.eye(d * d, dtype=np.complex128)
    target = np.zeros(d * d, dtype=np.complex128)
    weights = np.array([chi ** n for n in range(d)])
    amps = np.sqrt(weights / weights.sum())
    for n in range(d):
        target[n * d + n] = amps[n]
    e0 = np.zeros(d * d, dtype=np.complex128)
    e0[0] = 1.0
    w = e0 - target
    norm2 = np.real(np.vdot(w, w))
    if norm2 < 1e-30:
        return np.eye(d * d, dtype=np.complex128)
    return np.eye(d * d, dtype=np.complex128) - 2.0 * np.outer(w, w.conj()) / norm2


def apply_pair_source(state: FockState, spin: str, optical: str, chi: float) -> FockState:
    """Emit correlated spin-photon pairs into a vacuum mode pair.

    Joint amplitudes c_n on |n,n> proportional to chi^{n/2} up to n_max,
    renormalized.  Precondition: the (spin, optical) pair is in vacuum;
    sources on disjoint pairs therefore commute.
    """
    if not 0.0 <= chi < 1.0:
        raise ValueError("chi must be in [0, 1)")
    if chi == 0.0:
        return state
    for label in (spin, optical):
        occ = state.occupation(label)
        if abs(occ[0] - 1.0) > 1e-9:
            raise ValueError(f"pair source target mode {label!r} is not in vacuum")
    u = _pair_source_unitary(state.register.dim_per_mode, float(chi))
    return _apply_unitary(state, u, (spin, optical))


def apply_retrieval(state: FockState, spin: str, optical: str, gamma_t: float) -> FockState:
    """Transfer each spin excitation to the readout mode with probability gamma_t.

    Unitary partial swap (beam-splitter form, angle asin(sqrt(gamma))): a
    multi-excitation spin mode releases a Binomial(n, gamma) photon number;
    the unretrieved fraction stays in the spin mode and is traced out later.
    """
    if not 0.0 <= gamma_t <= 1.0:
        raise ValueError("gamma_t must be in [0, 1]")
    angle = math.asin(math.sqrt(gamma_t))
    u = _beam_splitter_unitary(state.register.dim_per_mode, 0.0, angle)
    return _apply_unitary(state, u, (spin, optical))


def inject_noise(state: FockState, optical: str, p_noise: float) -> FockState:
    """Mix in one uncorrelated photon with probability p_noise.

    rho <- (1 - p) rho + p * (photon-added rho, renormalized).  The addition
    is truncated at n_max: weight already at the cap cannot be promoted and
    is dropped from the added branch before renormalizing.
    """
    if not 0.0 <= p_noise <= 1.0:
        raise ValueError("p_noise must be in [0, 1]")
    if p_noise == 0.0:
        return state
    reg = state.register
    ad = _lowering(reg.dim_per_mode).conj().T
    ket = [reg.axis(optical)]
    bra = [reg.n_modes + ket[0]]
    t = state._tensor()
    added = _apply_matrix(t, ad, ket)
    added = _apply_matrix(added, ad.conj(), bra)
    added = added.reshape(reg.dim, reg.dim)
    norm = np.real(np.trace(added))
    if norm <= 0.0:
        raise ValueError(f"cannot add a photon to mode {optical!r}: no headroom below n_max")
    out = (1.0 - p_noise) * state.rho + (p_noise / norm) * added
    return FockState(reg, out)


def inject_leakage(state: FockState, spin: str, optical: str, gamma_t: float,
                   xi_se: float, f_cav: float) -> FockState:
    """Spontaneous emission of unretrieved spin excitations into the readout mode.

    Each remaining excitation independently emits one incoherent photon with
    probability min(xi_se * f_cav, 1); a product above 1 is an effective rate
    rather than a probability, so it is clamped to 1 with a warning.  Emitted
    photons above the n_max cap saturate at n_max (negligible for near-vacuum
    readout modes).  Call after apply_retrieval on the same pair.
    """
    q = xi_se * f_cav
    if q > 1.0:
        import warnings
        warnings.warn(
            f"leak rate xi_se*f_cav = {q:.3g} > 1 clamped to 1 (per-excitation probability)",
            stacklevel=2,
        )
        q = 1.0
    if q < 0.0:
        raise ValueError("xi_se * f_cav must be >= 0")
    if q == 0.0 or gamma_t == 1.0:
        return state
    reg = state.register
    d = reg.dim_per_mode
    kraus = []
    for j in range(d):
        m = np.zeros((d * d, d * d), dtype=np.complex128)
        for s in range(d):
            if s < j:
                continue
            amp = math.sqrt(math.comb(s, j) * (q ** j) * ((1.0 - q) ** (s - j)))
            if amp == 0.0:
                continue
            for o in range(d):
                o_out = min(o + j, d - 1)
                m[(s - j) * d + o_out, s * d + o] = amp
        if np.any(m):
            kraus.append(m)
    return _apply_kraus(state, kraus, (spin, optical))


def _click_kraus(d: int, eta: float) -> tuple[np.ndarray, list[np.ndarray]]:
    """No-click Kraus and the list of k-photons-detected Kraus operators."""
    no_click = np.zeros((d, d), dtype=np.complex128)
    for n in range(d):
        no_click[n, n] = (1.0 - eta) ** (n / 2.0)
    detected = []
    for k in range(1, d):
        m = np.zeros((d, d), dtype=np.complex128)
        for n in range(k, d):
            m[n - k, n] = math.sqrt(math.comb(n, k) * (eta ** k) * ((1.0 - eta) ** (n - k)))
        detected.append(m)
    return no_click, detected


def measure_click(state: FockState, optical: str, eta: float,
                  p_extra: float = 0.0) -> tuple[ClickOutcome, ClickOutcome]:
    """Non-number-resolving detection on one mode.

    POVM: no-click element diag((1-eta)^n); click is the complement.
    p_extra is the probability of a detection event from light that does not
    occupy the interfering mode (background counts plus spectrally
    distinguishable spontaneous-emission leakage): the no-click element is
    scaled by (1 - p_extra) and the click branch mixes in the unmeasured
    state with weight p_extra (the detector cannot tell the sources apart).
    Returns (click_branch, no_click_branch) with normalized conditional
    states; a zero-probability branch carries state=None.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must be in [0, 1]")
    if not 0.0 <= p_extra < 1.0:
        raise ValueError("p_extra must be in [0, 1)")
    reg = state.register
    no_click, detected = _click_kraus(reg.dim_per_mode, eta)
    nc_state = _apply_kraus(state, [no_click], (optical,))
    p_nc0 = float(np.real(np.trace(nc_state.rho)))
    total = float(np.real(np.trace(state.rho)))
    if detected:
        c_rho = _apply_kraus(state, detected, (optical,)).rho
    else:
        c_rho = np.zeros_like(state.rho)
    c_rho = (1.0 - p_extra) * c_rho + p_extra * state.rho
    p_c = (1.0 - p_extra) * (total - p_nc0) + p_extra * total
    p_nc = (1.0 - p_extra) * p_nc0
    click = ClickOutcome(
        clicked=True, probability=p_c,
        state=FockState(reg, c_rho / p_c) if p_c > 1e-300 else None,
    )
    noclick = ClickOutcome(
        clicked=False, probability=p_nc,
        state=FockState(reg, nc_state.rho / p_nc0) if p_nc > 1e-300 else None,
    )
    return click, noclick


def partial_trace(state: FockState, keep: Sequence[str]) -> FockState:
    """Trace out all modes not in ``keep`` (order of ``keep`` is preserved)."""
    reg = state.register
    keep = tuple(keep)
    for label in keep:
        reg.axis(label)
    drop = [l for l in reg.labels if l not in keep]
    t = state._tensor()
    L = reg.n_modes
    # trace one dropped mode at a time, tracking the shrinking axis layout
    labels = list(reg.labels)
    for label in drop:
        i = labels.index(label)
        n = len(labels)
        t = np.trace(t, axis1=i, axis2=n + i)
        labels.pop(i)
    # reorder remaining modes to the requested order
    perm_modes = [labels.index(l) for l in keep]
    n = len(labels)
    perm = perm_modes + [n + p for p in perm_modes]
    t = np.transpose(t, perm)
    new_reg = ModeRegister(keep, n_max=reg.n_max, max_entries=reg.max_entries)
    return FockState(new_reg, t.reshape(new_reg.dim, new_reg.dim))


def wootters_concurrence(rho4: np.ndarray) -> float:
    """Concurrence of a two-qubit density matrix (standard spin-flip recipe)."""
    if rho4.shape != (4, 4):
        raise ValueError("expected a 4x4 two-qubit density matrix")
    tr = np.real(np.trace(rho4))
    if abs(tr - 1.0) > 1e-8:
        raise ValueError("two-qubit density matrix must be normalized")
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    r = rho4 @ yy @ rho4.conj() @ yy
    eigs = np.linalg.eigvals(r)
    lam = np.sqrt(np.sort(np.abs(np.real(eigs)))[::-1])
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


# ---------------------------------------------------------------------------
# Swap pipeline: heralded spins -> swap click -> verification
# ---------------------------------------------------------------------------

SPIN_LABELS = ("mem_a", "mem_b1", "mem_b2", "mem_c")


def default_theta_grid(n: int = 16) -> tuple[float, ...]:
    return tuple(2.0 * math.pi * k / n for k in range(n))


def heralded_spin_state(params: ExperimentParams, n_max: int = DEFAULT_N_MAX,
                        conditioning: str = "heralded", bell_sign: int = 1,
                        max_entries: int = DEFAULT_MAX_ENTRIES) -> FockState:
    """Post-herald state of the four spin modes.

    conditioning="heralded" (default): each memory pair is built from
    truncated two-mode squeezers, the write photons mixed on a beam splitter
    and a heralding click conditioned with the detector model; multi-pair
    corrections (order chi and up) are retained in the state.

    conditioning="ideal": both pairs prepared directly in the
    single-excitation entangled state; the retrieved multi-pair photon
    population is injected downstream as in-mode noise instead.
    """
    if bell_sign not in (1, -1):
        raise ValueError("bell_sign must be +1 or -1")
    if conditioning == "ideal":
        reg = ModeRegister(SPIN_LABELS, n_max=n_max, max_entries=max_entries)
        d = reg.dim_per_mode
        psi = np.zeros(reg.dim, dtype=np.complex128)

        def flat(na, nb1, nb2, nc):
            return ((na * d + nb1) * d + nb2) * d + nc

        s = float(bell_sign)
        psi[flat(1, 0, 1, 0)] = 0.5
        psi[flat(1, 0, 0, 1)] = 0.5 * s
        psi[flat(0, 1, 1, 0)] = 0.5 * s
        psi[flat(0, 1, 0, 1)] = 0.5
        return FockState(reg, np.outer(psi, psi.conj()))
    if conditioning == "heralded":
        rho_left = _source_heralded_pair(params, ("mem_a", "mem_b1"), n_max, max_entries)
        rho_right = _source_heralded_pair(params, ("mem_b2", "mem_c"), n_max, max_entries)
        reg = ModeRegister(SPIN_LABELS, n_max=n_max, max_entries=max_entries)
        return FockState(reg, np.kron(rho_left.rho, rho_right.rho))
    raise ValueError(f"unknown conditioning {conditioning!r}")


def _source_heralded_pair(params: ExperimentParams, labels: tuple[str, str],
                          n_max: int, max_entries: int) -> FockState:
    """One memory pair conditioned on a write-photon herald click."""
    spin1, spin2 = labels
    reg = ModeRegister((spin1, spin2, "write_1", "write_2"),
                       n_max=n_max, max_entries=max_entries)
    state = vacuum(reg)
    state = apply_pair_source(state, spin1, "write_1", params.chi)
    state = apply_pair_source(state, spin2, "write_2", params.chi)
    state = apply_beam_splitter(state, "write_1", "write_2", phase=0.0)
    click, _ = measure_click(state, "write_1", params.eta)
    if click.state is None:
        raise ValueError("herald click has zero probability (chi too small?)")
    return partial_trace(click.state, labels)


def in_mode_noise(params: ExperimentParams, t_us: float, conditioning: str) -> float:
    """Retrieved multi-pair photon probability to inject into a readout mode.

    With conditioning="heralded" the extra pairs live in the spin state and
    come out through retrieval naturally; with "ideal" spins the same
    population chi*gamma(t) is injected as in-mode (interfering) noise.
    """
    if conditioning == "heralded":
        return 0.0
    return params.chi * analytic.retrieval_efficiency(t_us, params)


def detector_extra(params: ExperimentParams, t_us: float, z: float) -> float:
    """Detection probability from non-interfering light at one detector.

    Background counts (z) plus spontaneous-emission leakage of unretrieved
    excitations, chi*(1-gamma(t))*xi_se*f_cav: both are spectrally
    distinguishable from the retrieved collective mode, so they click the
    detector without entering the interference.
    """
    gamma_t = analytic.retrieval_efficiency(t_us, params)
    leak = params.chi * (1.0 - gamma_t) * params.xi_se * params.f_cav
    return min(params.eta * (z + leak), 1.0 - 1e-12)


def swap_stage(params: ExperimentParams, n_max: int = DEFAULT_N_MAX,
               conditioning: str = "heralded", bell_sign: int = 1,
               max_entries: int = DEFAULT_MAX_ENTRIES) -> tuple[float, FockState]:
    """Retrieval + interference + click of the swap measurement.

    Returns (p_click, rho_ac): the click probability of the designated swap
    detector given the heralded quadruple, and the conditional state of the
    two outer spin modes after the click.
    """
    spins = heralded_spin_state(params, n_max, conditioning, bell_sign, max_entries)
    labels = SPIN_LABELS + ("read_b1", "read_b2")
    reg = ModeRegister(labels, n_max=n_max, max_entries=max_entries)
    vac = np.zeros(reg.dim_per_mode ** 2, dtype=np.complex128)
    vac[0] = 1.0
    rho = np.kron(spins.rho, np.outer(vac, vac.conj()))
    state = FockState(reg, rho)

    gamma1 = analytic.retrieval_efficiency(params.t1_us, params)
    state = apply_retrieval(state, "mem_b1", "read_b1", gamma1)
    state = apply_retrieval(state, "mem_b2", "read_b2", gamma1)
    q1 = in_mode_noise(params, params.t1_us, conditioning)
    if q1 > 0.0:
        state = inject_noise(state, "read_b1", q1)
        state = inject_noise(state, "read_b2", q1)
    state = apply_beam_splitter(state, "read_b1", "read_b2", phase=ES_PHASE)
    extra1 = detector_extra(params, params.t1_us, params.z_b)
    click, _ = measure_click(state, "read_b1", params.eta, p_extra=extra1)
    if click.state is None:
        return 0.0, partial_trace(state, ("mem_a", "mem_c"))
    return click.probability, partial_trace(click.state, ("mem_a", "mem_c"))


def _verification_state(rho_ac: FockState, gamma: float, q: float) -> FockState:
    """Retrieve both outer memories and add in-mode noise (no mixing yet)."""
    reg_ac = rho_ac.register
    labels = ("mem_a", "mem_c", "read_a", "read_c")
    reg = ModeRegister(labels, n_max=reg_ac.n_max, max_entries=reg_ac.max_entries)
    vac = np.zeros(reg.dim_per_mode ** 2, dtype=np.complex128)
    vac[0] = 1.0
    state = FockState(reg, np.kron(rho_ac.rho, np.outer(vac, vac.conj())))
    state = apply_retrieval(state, "mem_a", "read_a", gamma)
    state = apply_retrieval(state, "mem_c", "read_c", gamma)
    if q > 0.0:
        state = inject_noise(state, "read_a", q)
        state = inject_noise(state, "read_c", q)
    return state


def joint_clicks(state: FockState, mode1: str, mode2: str, eta: float,
                 p_extra: float = 0.0) -> dict:
    """Joint click distribution over two modes: keys (bool, bool)."""
    out = {}
    c1, n1 = measure_click(state, mode1, eta, p_extra=p_extra)
    for first in (c1, n1):
        if first.state is None:
            out[(first.clicked, True)] = 0.0
            out[(first.clicked, False)] = 0.0
            continue
        c2, n2 = measure_click(first.state, mode2, eta, p_extra=p_extra)
        out[(first.clicked, True)] = first.probability * c2.probability
        out[(first.clicked, False)] = first.probability * n2.probability
    return out


def verification_joint(rho_ac: FockState, gamma: float, q: float, eta: float,
                       theta: float, p_extra: float = 0.0) -> dict:
    """Joint (port1, port2) click distribution after the verification mixer."""
    state = _verification_state(rho_ac, gamma, q)
    state = apply_beam_splitter(state, "read_a", "read_c", phase=theta)
    return joint_clicks(state, "read_a", "read_c", eta, p_extra=p_extra)


def counting_joint(rho_ac: FockState, gamma: float, q: float, eta: float,
                   p_extra: float = 0.0) -> dict:
    """Joint (a, c) click distribution with direct per-channel detection."""
    state = _verification_state(rho_ac, gamma, q)
    return joint_clicks(state, "read_a", "read_c", eta, p_extra=p_extra)


@dataclass(frozen=True)
class SwapReport:
    """Everything the engine extracts from one parameter point.

    p_coinc uses the closed-form convention (the four initial-state branches
    summed unweighted, i.e. 4x the physical joint probability per heralded
    attempt); p_coinc_joint is the physical joint probability.  Spin-level
    quantities (p_ij_spin, v_spin, both concurrences) describe rho_ac itself;
    p_ij_detected comes from the photon-counting verification arm and feeds
    the suppression parameter h.
    """

    p_es1: float
    rho_ac: FockState
    thetas: tuple[float, ...]
    p_coinc: Mapping[float, float]
    p_coinc_joint: Mapping[float, float]
    p_ev1_given_es1: Mapping[float, float]
    ev_joint_given_es1: Mapping[float, Mapping[tuple, float]]
    count_joint_given_es1: Mapping[tuple, float]
    p_ij_spin: Mapping[str, float]
    p_ij_detected: Mapping[str, float]
    block_total: float
    visibility_fringe: float
    v_spin: float
    h_detected: float
    p_c_spin: float
    p_c_detected: float
    concurrence_wootters: float
    concurrence_estimator: float


def _spin_block(rho_ac: FockState) -> tuple[np.ndarray, float]:
    """{0,1} x {0,1} occupation block of rho_ac and its total weight."""
    d = rho_ac.register.dim_per_mode
    idx = [0 * d + 0, 0 * d + 1, 1 * d + 0, 1 * d + 1]  # |n_a n_c>: 00,01,10,11
    block = rho_ac.rho[np.ix_(idx, idx)]
    total = float(np.real(np.trace(block)))
    return block, total


def swap_pipeline(params: ExperimentParams, thetas: Sequence[float] | None = None,
                  n_max: int = DEFAULT_N_MAX, conditioning: str = "heralded",
                  bell_sign: int = 1,
                  max_entries: int = DEFAULT_MAX_ENTRIES) -> SwapReport:
    """Full quantum simulation of one heralded swap-and-verify attempt."""
    if thetas is None:
        thetas = default_theta_grid()
    thetas = tuple(float(t) for t in thetas)
    p_es1, rho_ac = swap_stage(params, n_max, conditioning, bell_sign, max_entries)

    gamma2 = analytic.retrieval_efficiency(params.t2_us, params)
    q2 = in_mode_noise(params, params.t2_us, conditioning)
    extra2 = detector_extra(params, params.t2_us, params.z_ac)
    eta = params.eta

    p_coinc, p_joint, p_ev1, ev_joint = {}, {}, {}, {}
    for theta in thetas:
        joint = verification_joint(rho_ac, gamma2, q2, eta, theta, p_extra=extra2)
        pev1 = joint[(True, True)] + joint[(True, False)]
        p_ev1[theta] = pev1
        ev_joint[theta] = joint
        p_joint[theta] = p_es1 * pev1
        p_coinc[theta] = 4.0 * p_es1 * pev1

    counting = counting_joint(rho_ac, gamma2, q2, eta, p_extra=extra2)
    p11 = counting[(True, True)]
    p10 = counting[(True, False)]
    p01 = counting[(False, True)]
    p00 = counting[(False, False)]
    h_det = p11 / (p10 * p01) if p10 > 0 and p01 > 0 else math.inf

    values = np.array([p_coinc[t] for t in thetas])
    vis = float((values.max() - values.min()) / (values.max() + values.min())) \
        if values.max() + values.min() > 0 else 0.0

    # spin-level quantities of rho_ac itself
    block, block_total = _spin_block(rho_ac)
    sp = {
        "p00": float(np.real(block[0, 0])),
        "p01": float(np.real(block[1, 1])),
        "p10": float(np.real(block[2, 2])),
        "p11": float(np.real(block[3, 3])),
    }
    ideal_fringe = []
    for theta in thetas:
        joint = verification_joint(rho_ac, 1.0, 0.0, 1.0, theta)
        ideal_fringe.append(joint[(True, True)] + joint[(True, False)])
    ideal_fringe = np.array(ideal_fringe)
    v_spin = float((ideal_fringe.max() - ideal_fringe.min())
                   / (ideal_fringe.max() + ideal_fringe.min())) \
        if ideal_fringe.max() + ideal_fringe.min() > 0 else 0.0

    c_wootters = wootters_concurrence(block / block_total) if block_total > 0 else 0.0
    p_c_spin = sp["p10"] + sp["p01"]
    c_estimator = max(0.0, (p_c_spin * v_spin - 2.0 * math.sqrt(max(sp["p00"] * sp["p11"], 0.0)))
                / block_total) if block_total > 0 else 0.0

    return SwapReport(
        p_es1=p_es1,
        rho_ac=rho_ac,
        thetas=thetas,
        p_coinc=p_coinc,
        p_coinc_joint=p_joint,
        p_ev1_given_es1=p_ev1,
        ev_joint_given_es1=ev_joint,
        count_joint_given_es1=counting,
        p_ij_spin=sp,
        p_ij_detected={
            "p11": p11, "p10": p10, "p01": p01, "p00": p00,
        },
        block_total=block_total,
        visibility_fringe=vis,
        v_spin=v_spin,
        h_detected=h_det,
        p_c_spin=p_c_spin,
        p_c_detected=p10 + p01,
        concurrence_wootters=c_wootters,
        concurrence_estimator=c_estimator,
    )
