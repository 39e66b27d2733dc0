"""Local adaptive schedule built on the certified gap lower bound.

The pacing rule is K'(s) = (1/eps) * c / (g0(s)^p * g_min^(2-p)) with the
rate constant

    c = 4 |H'| + 40 |H'|^2 B2 + 4 |H''| + 6 p sup|g0'| |H'| B2,

where B1 and B2 normalize the integrals of g0^-p and g0^(p-3).  K is stored
as exact per-piece antiderivatives; total time T = K(1) = (1/eps) c B1 / g_min.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np
from scipy.integrate import quad

from .errors import NumericalError, PreconditionError
from .gap_bounds import GapCertificate


@dataclass(frozen=True)
class HNorms:
    """Bounds on |H'(s)| and |H''(s)|; for the rank-one interpolation
    H' = |psi0><psi0| + H_z so sup|H'| <= 2 and H'' = 0."""

    sup_h1: float = 2.0
    sup_h2: float = 0.0

    def __post_init__(self):
        if self.sup_h1 <= 0 or self.sup_h2 < 0:
            raise PreconditionError("H-norm bounds must be nonnegative (|H'| positive)")


def _power_integral(u_lo: float, u_hi: float, q: float) -> float:
    """Integral of u^-q over [u_lo, u_hi], 0 < u_lo <= u_hi."""
    if u_hi <= u_lo:
        return 0.0
    if abs(q - 1.0) < 1e-14:
        return log(u_hi / u_lo)
    return (u_hi ** (1.0 - q) - u_lo ** (1.0 - q)) / (1.0 - q)


def _piece_integral(piece, s_lo: float, s_hi: float, q: float) -> float:
    """Integral of g0(s)^-q over [s_lo, s_hi] within one certificate piece."""
    lo, hi, kind, coef, pivot = piece
    s_lo, s_hi = max(s_lo, lo), min(s_hi, hi)
    if s_hi <= s_lo:
        return 0.0
    if kind == "const":
        return coef ** (-q) * (s_hi - s_lo)
    if kind == "dec":   # g0 = coef (pivot - s)
        return coef ** (-q) * _power_integral(pivot - s_hi, pivot - s_lo, q)
    if kind == "inc":   # g0 = coef (s - pivot)
        return coef ** (-q) * _power_integral(s_lo - pivot, s_hi - pivot, q)
    raise NumericalError(f"unknown certificate piece kind {kind!r}")


def g0_power_integral(cert: GapCertificate, q: float, s_hi: float = 1.0) -> float:
    """Exact integral of g0^-q from 0 to s_hi via per-piece antiderivatives."""
    return sum(_piece_integral(piece, 0.0, s_hi, q) for piece in cert.pieces())


def integral_bounds(
    cert: GapCertificate, p: float, cross_check_tol: float = 1e-6
) -> tuple[float, float]:
    """Tight constants B1, B2 with int g0^-p = B1 g_min^(p-1)... normalization.

    Closed forms are cross-checked against adaptive quadrature; a mismatch
    flags a broken piece decomposition.
    """
    if not 1.0 < p <= 2.0:
        raise PreconditionError("rate exponent p must lie in (1, 2]")
    g_min = cert.g_min
    int_b1 = g0_power_integral(cert, p)
    int_b2 = g0_power_integral(cert, 3.0 - p)
    b1 = int_b1 * g_min ** (p - 1.0)
    b2 = int_b2 * g_min ** (2.0 - p)
    seams = [cert.s_star - cert.delta_s, cert.s_star]
    for q, exact in ((p, int_b1), (3.0 - p, int_b2)):
        approx, _ = quad(lambda s: cert.g0(s) ** (-q), 0.0, 1.0, points=seams, limit=200)
        if abs(approx - exact) > cross_check_tol * abs(exact):
            raise NumericalError(
                f"closed-form integral {exact!r} disagrees with quadrature {approx!r}"
            )
    return b1, b2


def rate_constant(cert: GapCertificate, p: float, h_norms: HNorms = HNorms()) -> float:
    """Rate-law constant; epsilon-free by construction."""
    _, b2 = integral_bounds(cert, p)
    return (
        4.0 * h_norms.sup_h1
        + 40.0 * h_norms.sup_h1 ** 2 * b2
        + 4.0 * h_norms.sup_h2
        + 6.0 * p * cert.sup_slope * h_norms.sup_h1 * b2
    )


@dataclass(frozen=True)
class SchedulePlan:
    """Monotone map t = K(s) with rate K' tied to the certified gap bound."""

    p: float
    eps: float
    c_const: float
    B1: float
    B2: float
    g_min: float
    T: float
    cert: GapCertificate
    _offsets: tuple[float, ...]   # cumulative K at piece starts

    @property
    def rate_scale(self) -> float:
        """K'(s) = rate_scale / g0(s)^p."""
        return self.c_const / (self.eps * self.g_min ** (2.0 - self.p))

    def k_prime(self, s):
        g0 = self.cert.g0(np.asarray(s, dtype=float))
        out = self.rate_scale / g0 ** self.p
        return out if np.ndim(out) else float(out)

    def k_of_s(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty_like(s_arr)
        pieces = self.cert.pieces()
        for idx, val in np.ndenumerate(s_arr):
            val = min(max(val, 0.0), 1.0)
            acc = 0.0
            for offset, piece in zip(self._offsets, pieces):
                lo, hi, *_ = piece
                if val <= lo:
                    break
                acc = offset + self.rate_scale * _piece_integral(piece, lo, min(val, hi), self.p)
            out[idx] = acc
        return out if np.ndim(s) else float(out[0])

    def s_of_t(self, t: float, tol_s: float = 1e-15, tol_t: float | None = None) -> float:
        """Inverse lookup by monotone bisection; |K(s(t)) - t| <= 1e-9 T."""
        if tol_t is None:
            tol_t = 1e-9 * self.T
        if not 0.0 <= t <= self.T * (1.0 + 1e-12):
            raise PreconditionError("t outside [0, T]")
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            val = self.k_of_s(mid)
            if abs(val - t) <= tol_t or hi - lo < tol_s:
                return mid
            if val < t:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def summary(self) -> dict:
        return {
            "p": self.p,
            "eps": self.eps,
            "c": self.c_const,
            "B1": self.B1,
            "B2": self.B2,
            "T": self.T,
        }


def synthesize(
    cert: GapCertificate,
    p: float = 1.5,
    eps: float = 0.2,
    h_norms: HNorms = HNorms(),
) -> SchedulePlan:
    if not 0.0 < eps < 1.0:
        raise PreconditionError("target infidelity eps must lie in (0, 1)")
    if not 1.0 < p <= 2.0:
        raise PreconditionError("rate exponent p must lie in (1, 2]")
    b1, b2 = integral_bounds(cert, p)
    c_const = (
        4.0 * h_norms.sup_h1
        + 40.0 * h_norms.sup_h1 ** 2 * b2
        + 4.0 * h_norms.sup_h2
        + 6.0 * p * cert.sup_slope * h_norms.sup_h1 * b2
    )
    rate_scale = c_const / (eps * cert.g_min ** (2.0 - p))
    offsets = [0.0]
    for piece in cert.pieces():
        lo, hi, *_ = piece
        offsets.append(offsets[-1] + rate_scale * _piece_integral(piece, lo, hi, p))
    T = offsets[-1]
    return SchedulePlan(
        p=p,
        eps=eps,
        c_const=c_const,
        B1=b1,
        B2=b2,
        g_min=cert.g_min,
        T=T,
        cert=cert,
        _offsets=tuple(offsets[:-1]),
    )
