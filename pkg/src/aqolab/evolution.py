"""Schrodinger integration in the symmetric subspace and operator-bound checks.

The state obeys  i dpsi/ds = K'(s) H(s) psi  with H(s) the M x M restriction
s diag(E) - (1-s) v v^T.  A fixed-shape RK4 stepper advances s with the step
tied to the local rate: the phase advanced per step is capped at theta, and
theta itself is sized from the norm-drift budget (RK4 contracts the norm by
theta^6/144 per step, so drift ~ Phi * theta^5 / 144 over total phase Phi).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numba import njit

from .config import DEFAULT_CONFIG, RunConfig
from .errors import PreconditionError, StepSizeError
from .gap_bounds import certificate
from .schedule import SchedulePlan, synthesize
from .spectrum import (
    DegeneracySpectrum,
    dense_symmetric_matrix,
    spectral_params,
    symmetric_state_overlap,
)


@njit(cache=True, nogil=True, inline="always")
def _kprime(s, s_left, s_star, coef_left, window_value, coef_right, s0, p,
            rate_scale, uniform_rate):
    if uniform_rate > 0.0:
        return uniform_rate
    if s < s_left:
        g0 = coef_left * (s_star - s)
    elif s < s_star:
        g0 = window_value
    else:
        g0 = coef_right * (s - s0)
    return rate_scale / g0 ** p


@njit(cache=True, nogil=True, inline="always")
def _deriv(s, h_s, y, out, e, v, s_left, s_star, coef_left, window_value,
           coef_right, s0, p, rate_scale, uniform_rate):
    """out = -i K'(s) H(h_s) y  (h_s = s unless the Hamiltonian is frozen)."""
    kp = _kprime(s, s_left, s_star, coef_left, window_value, coef_right, s0, p,
                 rate_scale, uniform_rate)
    ip = 0.0 + 0.0j
    for i in range(y.shape[0]):
        ip += v[i] * y[i]
    for i in range(y.shape[0]):
        hy = h_s * e[i] * y[i] - (1.0 - h_s) * ip * v[i]
        out[i] = -1j * kp * hy


@njit(cache=True, nogil=True)
def _rk4_run(psi, e, v, s_left, s_star, coef_left, window_value, coef_right,
             s0, p, rate_scale, uniform_rate, frozen_s, h_cap, h_floor, theta,
             check_every, max_steps):
    M = psi.shape[0]
    k1 = np.empty(M, np.complex128)
    k2 = np.empty(M, np.complex128)
    k3 = np.empty(M, np.complex128)
    k4 = np.empty(M, np.complex128)
    tmp = np.empty(M, np.complex128)
    s = 0.0
    steps = 0
    max_drift = 0.0
    while s < 1.0 - 1e-15:
        kp = _kprime(s, s_left, s_star, coef_left, window_value, coef_right,
                     s0, p, rate_scale, uniform_rate)
        h = theta / kp
        if h > h_cap:
            h = h_cap
        look = s + h
        if look > 1.0:
            look = 1.0
        kp2 = _kprime(look, s_left, s_star, coef_left, window_value, coef_right,
                      s0, p, rate_scale, uniform_rate)
        if kp2 > kp:
            h2 = theta / kp2
            if h2 < h:
                h = h2
        if 1.0 - s < h:
            h = 1.0 - s
        if h < h_floor:
            return 1, steps, max_drift, s
        sa = s if frozen_s < 0.0 else frozen_s
        sb = s + 0.5 * h if frozen_s < 0.0 else frozen_s
        sc = s + h if frozen_s < 0.0 else frozen_s
        _deriv(s, sa, psi, k1, e, v, s_left, s_star, coef_left, window_value,
               coef_right, s0, p, rate_scale, uniform_rate)
        for i in range(M):
            tmp[i] = psi[i] + 0.5 * h * k1[i]
        _deriv(s + 0.5 * h, sb, tmp, k2, e, v, s_left, s_star, coef_left,
               window_value, coef_right, s0, p, rate_scale, uniform_rate)
        for i in range(M):
            tmp[i] = psi[i] + 0.5 * h * k2[i]
        _deriv(s + 0.5 * h, sb, tmp, k3, e, v, s_left, s_star, coef_left,
               window_value, coef_right, s0, p, rate_scale, uniform_rate)
        for i in range(M):
            tmp[i] = psi[i] + h * k3[i]
        _deriv(s + h, sc, tmp, k4, e, v, s_left, s_star, coef_left,
               window_value, coef_right, s0, p, rate_scale, uniform_rate)
        for i in range(M):
            psi[i] = psi[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        s += h
        steps += 1
        if steps % check_every == 0:
            nrm = 0.0
            for i in range(M):
                nrm += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
            drift = abs(np.sqrt(nrm) - 1.0)
            if drift > max_drift:
                max_drift = drift
        if steps > max_steps:
            return 2, steps, max_drift, s
    nrm = 0.0
    for i in range(M):
        nrm += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
    drift = abs(np.sqrt(nrm) - 1.0)
    if drift > max_drift:
        max_drift = drift
    return 0, steps, max_drift, s


@dataclass(frozen=True)
class EvolutionResult:
    final_state: np.ndarray
    fidelity: float
    steps: int
    T: float
    norm_drift: float
    theta: float

    @property
    def max_step_error_estimate(self) -> float:
        """A-priori local truncation estimate theta^5 / 120 per step."""
        return self.theta ** 5 / 120.0

    def summary(self) -> dict:
        return {
            "fidelity": self.fidelity,
            "steps": self.steps,
            "T": self.T,
            "norm_drift": self.norm_drift,
        }


def _theta_for(total_phase: float, drift_budget: float) -> float:
    return min(0.1, (144.0 * 0.25 * drift_budget / max(total_phase, 1e-9)) ** 0.2)


def _run_kernel(spec, piece_params, rate_scale, uniform_rate, total_time,
                frozen_s, initial, cfg: RunConfig) -> EvolutionResult:
    theta = _theta_for(total_time, cfg.norm_drift_tol)
    est_steps = total_time / theta + 1.2 / cfg.step_cap
    if est_steps > cfg.max_steps:
        raise StepSizeError(
            f"run needs ~{est_steps:.2g} steps (> max_steps={cfg.max_steps}); "
            "reduce the total time (time_factor) or raise the budget"
        )
    psi = initial.astype(np.complex128)
    e = spec.energies
    v = symmetric_state_overlap(spec)
    status, steps, drift, s_end = _rk4_run(
        psi, e, v, *piece_params, rate_scale, uniform_rate, frozen_s,
        cfg.step_cap, cfg.step_floor, theta, 1024, cfg.max_steps,
    )
    if status == 1:
        raise StepSizeError(
            f"step underflow at s={s_end:.6f}; raise step_floor budget or slow the rate"
        )
    if status == 2:
        raise StepSizeError(f"step budget exhausted at s={s_end:.6f}")
    if drift > cfg.norm_drift_tol:
        raise StepSizeError(
            f"norm drift {drift:.3e} exceeds budget {cfg.norm_drift_tol:.1e}; "
            f"suggested refinement: theta <= {theta * (cfg.norm_drift_tol / drift) ** 0.2:.3e}"
        )
    return EvolutionResult(
        final_state=psi,
        fidelity=float(abs(psi[0]) ** 2),
        steps=int(steps),
        T=total_time,
        norm_drift=float(drift),
        theta=theta,
    )


def _plan_piece_params(plan: SchedulePlan):
    cert = plan.cert
    return (
        cert.s_star - cert.delta_s,
        cert.s_star,
        cert.coef_left,
        cert.window_value,
        cert.coef_right,
        cert.s0,
        plan.p,
    )


def evolve(
    spec: DegeneracySpectrum,
    plan: SchedulePlan,
    time_factor: float = 1.0,
    cfg: RunConfig = DEFAULT_CONFIG,
) -> EvolutionResult:
    """Integrate the local schedule; time_factor rescales K' uniformly.

    time_factor > 1 runs slower (deeper adiabaticity), < 1 faster; the
    schedule shape is unchanged.  Initial state is the uniform superposition,
    target the ground-level coordinate.
    """
    if time_factor <= 0:
        raise PreconditionError("time_factor must be positive")
    prof = plan.cert.profile
    if (prof.N, prof.d0) != (spec.N, spec.d0):
        raise PreconditionError("schedule plan was synthesized for a different spectrum")
    rate = plan.rate_scale * time_factor
    return _run_kernel(
        spec,
        _plan_piece_params(plan),
        rate,
        uniform_rate=-1.0,
        total_time=plan.T * time_factor,
        frozen_s=-1.0,
        initial=symmetric_state_overlap(spec),
        cfg=cfg,
    )


def uniform_baseline(
    spec: DegeneracySpectrum,
    T: float,
    cfg: RunConfig = DEFAULT_CONFIG,
) -> EvolutionResult:
    """Control experiment: constant rate K' = T (linear schedule)."""
    if T < 0:
        raise PreconditionError("total time must be nonnegative")
    return _run_kernel(
        spec,
        (0.25, 0.5, 1.0, 1.0, 1.0, 0.0, 1.0),  # unused placeholders
        rate_scale=0.0,
        uniform_rate=max(T, 1e-300),
        total_time=T,
        frozen_s=-1.0,
        initial=symmetric_state_overlap(spec),
        cfg=cfg,
    )


def evolve_frozen(
    spec: DegeneracySpectrum,
    T: float,
    s_frozen: float,
    initial: np.ndarray,
    cfg: RunConfig = DEFAULT_CONFIG,
) -> EvolutionResult:
    """Constant-rate run with H pinned at H(s_frozen); stationary-state check."""
    return _run_kernel(
        spec,
        (0.25, 0.5, 1.0, 1.0, 1.0, 0.0, 1.0),
        rate_scale=0.0,
        uniform_rate=max(T, 1e-300),
        total_time=T,
        frozen_s=s_frozen,
        initial=np.asarray(initial, dtype=np.complex128),
        cfg=cfg,
    )


# ---------------------------------------------------------------------------
# Projector-derivative bound checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundCheckRow:
    s: float
    gap: float
    ratio_p_prime: float       # |P'| / (2 |H'| / g)
    ratio_commutator: float    # |[P', (H - lam0)^+]| / (4 |H'| / g^2)
    flagged: bool


@dataclass(frozen=True)
class BoundReport:
    rows: tuple[BoundCheckRow, ...]
    h_prime_norm: float

    @property
    def max_ratio(self) -> float:
        vals = [max(r.ratio_p_prime, r.ratio_commutator) for r in self.rows if not r.flagged]
        return max(vals) if vals else float("nan")

    @property
    def flagged_points(self) -> int:
        return sum(r.flagged for r in self.rows)


def _ground_projector(spec, s):
    w, V = np.linalg.eigh(dense_symmetric_matrix(spec, s))
    v0 = V[:, 0]
    return np.outer(v0, v0), w


def verify_projector_bounds(
    spec: DegeneracySpectrum,
    s_grid: Sequence[float],
    fd_rel: float = 1e-3,
    gap_floor: float = 1e-8,
    richardson_tol: float = 0.05,
) -> BoundReport:
    """Central-difference P'(s) with Richardson extrapolation versus the
    resolvent-circle bounds |P'| <= 2|H'|/g and |[P',(H-lam0)^+]| <= 4|H'|/g^2.

    The FD step follows the local gap (P varies on the s-scale ~ g/|H'|);
    points where halving the step moves the estimate too much are flagged
    and excluded rather than reported as violations.
    """
    v = symmetric_state_overlap(spec)
    h_prime = np.outer(v, v) + np.diag(spec.energies)
    h1 = float(np.linalg.norm(h_prime, 2))
    rows = []
    for s in np.asarray(s_grid, dtype=float):
        _, w = _ground_projector(spec, s)
        g = float(w[1] - w[0])
        if g <= gap_floor or not 0.0 < s < 1.0:
            continue
        h_fd = max(1e-9, min(1e-5, fd_rel * g / h1))
        if s - h_fd <= 0 or s + h_fd >= 1:
            continue
        samples = {}
        for ds in (-h_fd, -h_fd / 2, h_fd / 2, h_fd):
            samples[ds], _ = _ground_projector(spec, s + ds)
        d_h = (samples[h_fd] - samples[-h_fd]) / (2 * h_fd)
        d_h2 = (samples[h_fd / 2] - samples[-h_fd / 2]) / h_fd
        p_prime = (4.0 * d_h2 - d_h) / 3.0
        scale = max(np.linalg.norm(p_prime, 2), 1e-300)
        flagged = np.linalg.norm(d_h2 - d_h, 2) / scale > richardson_tol
        P, w = _ground_projector(spec, s)
        lam0 = w[0]
        Hm = dense_symmetric_matrix(spec, s) - lam0 * np.eye(spec.M)
        wH, VH = np.linalg.eigh(Hm)
        inv = np.where(np.abs(wH) > 0.5 * g, 1.0 / np.where(wH == 0, 1.0, wH), 0.0)
        h_plus = (VH * inv) @ VH.T
        comm = p_prime @ h_plus - h_plus @ p_prime
        rows.append(
            BoundCheckRow(
                s=float(s),
                gap=g,
                ratio_p_prime=float(np.linalg.norm(p_prime, 2) / (2.0 * h1 / g)),
                ratio_commutator=float(np.linalg.norm(comm, 2) / (4.0 * h1 / g ** 2)),
                flagged=bool(flagged),
            )
        )
    return BoundReport(rows=tuple(rows), h_prime_norm=h1)


# ---------------------------------------------------------------------------
# Scaling experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalingRow:
    n: int
    T: float
    T_run: float
    fidelity: float
    g_min: float
    error: str = ""


@dataclass(frozen=True)
class ScalingTable:
    rows: tuple[ScalingRow, ...]
    slope: float

    def csv_lines(self) -> list[str]:
        lines = ["n,T,fidelity,g_min"]
        for r in self.rows:
            lines.append(f"{r.n},{r.T!r},{r.fidelity!r},{r.g_min!r}")
        lines.append(f"# slope_log2T_vs_n,{self.slope!r}")
        return lines


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("AQOLAB_THREADS", "1")))
    except ValueError:
        return 1


def scaling_experiment(
    family: Callable[[int], DegeneracySpectrum],
    n_values: Sequence[int],
    eps: float = 0.2,
    p: float = 1.5,
    condition_c: float = 0.07,
    time_cap: float | None = None,
    cfg: RunConfig = DEFAULT_CONFIG,
) -> ScalingTable:
    """One row per n: plan time T, integrated fidelity, g_min.

    The integration runs at min(T, time_cap) via the K'-scaling knob; the
    slope fit always uses the untruncated plan time.
    """
    if time_cap is None:
        time_cap = cfg.evolve_time_cap

    def one(n: int) -> ScalingRow:
        spec = family(n)
        prof = spectral_params(spec, c=condition_c)
        plan = synthesize(certificate(prof), p=p, eps=eps)
        factor = min(1.0, time_cap / plan.T)
        try:
            res = evolve(spec, plan, time_factor=factor, cfg=cfg)
            return ScalingRow(n=n, T=plan.T, T_run=plan.T * factor,
                              fidelity=res.fidelity, g_min=prof.g_min)
        except StepSizeError as exc:
            return ScalingRow(n=n, T=plan.T, T_run=plan.T * factor,
                              fidelity=float("nan"), g_min=prof.g_min, error=str(exc))

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(one, n_values))
    else:
        rows = tuple(one(n) for n in n_values)
    good = [(r.n, r.T) for r in rows if not r.error]
    if len(good) >= 2:
        ns = np.array([g[0] for g in good], dtype=float)
        ts = np.log2([g[1] for g in good])
        slope = float(np.polyfit(ns, ts, 1)[0])
    else:
        slope = float("nan")
    return ScalingTable(rows=rows, slope=slope)
