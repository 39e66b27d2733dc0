"""Certified piecewise lower bound on the spectral gap of H(s).

Three regions meet at s* - delta_s and s*:

    left    [0, s*-delta_s):  b * (A1/A2) * (s*-s)/(1-s*)     (variational route)
    window  [s*-delta_s, s*): b * g_min                        (crossing plateau)
    right   [s*, 1]:          pref * (s-s0)/(1-s0)             (resolvent route)

with b = k(1-8k^2)/(1+4k^2) and pref = a(1-8k^2)/(1+4k^2), a = 4k^2*Delta/3.
For the default k = 1/4 these give b = 1/10 and pref = Delta/30, and the
bound is exactly continuous at both seams.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
import numpy as np

from .errors import NumericalError, PreconditionError, SpectralConditionError
from .spectrum import DegeneracySpectrum, SpectralProfile, true_gap_grid

REGION_LEFT = "left"
REGION_WINDOW = "window"
REGION_RIGHT = "right"


@dataclass(frozen=True)
class GapCertificate:
    s_star: float
    delta_s: float
    g_min: float
    delta: float
    s0: float
    k: float
    a: float
    b: float
    coef_left: float      # g0 = coef_left * (s_star - s)
    window_value: float   # g0 = b * g_min
    coef_right: float     # g0 = coef_right * (s - s0)
    profile: SpectralProfile

    @property
    def boundaries(self) -> tuple[float, float, float, float]:
        return (0.0, self.s_star - self.delta_s, self.s_star, 1.0)

    @property
    def sup_slope(self) -> float:
        """sup_s |g0'(s)| over the three pieces."""
        return max(self.coef_left, self.coef_right)

    def g0(self, s):
        s = np.asarray(s, dtype=float)
        left = self.coef_left * (self.s_star - s)
        right = self.coef_right * (s - self.s0)
        out = np.where(
            s < self.s_star - self.delta_s,
            left,
            np.where(s < self.s_star, self.window_value, right),
        )
        return out if out.ndim else float(out)

    def region(self, s: float) -> str:
        if s < self.s_star - self.delta_s:
            return REGION_LEFT
        if s < self.s_star:
            return REGION_WINDOW
        return REGION_RIGHT

    def pieces(self):
        """(lo, hi, kind, coef, pivot) descriptors, in order, covering [0, 1]."""
        s_left = self.s_star - self.delta_s
        return (
            (0.0, s_left, "dec", self.coef_left, self.s_star),
            (s_left, self.s_star, "const", self.window_value, 0.0),
            (self.s_star, 1.0, "inc", self.coef_right, self.s0),
        )


def certificate(
    profile: SpectralProfile, k: float = 0.25, continuity_tol: float = 1e-9
) -> GapCertificate:
    """Build the three-region certificate; rejects profiles outside the regime."""
    if not profile.condition_ok:
        raise SpectralConditionError(
            f"gap condition value {profile.condition_value:.3e} is not below "
            f"threshold c={profile.c}"
        )
    if not 0.0 < k < sqrt(1.0 / 8.0):
        raise PreconditionError("offset constant k must satisfy 0 < 8k^2 < 1")
    delta = profile.delta
    g_min = profile.g_min
    a = 4.0 * k * k * delta / 3.0
    if a <= k * g_min:
        raise NumericalError(
            "degenerate geometry: slope constant a <= k*g_min, right-region line invalid"
        )
    s_star = profile.s_star
    s0 = s_star - k * g_min * (1.0 - s_star) / (a - k * g_min)
    shrink = (1.0 - 8.0 * k * k) / (1.0 + 4.0 * k * k)
    b = k * shrink
    coef_left = b * profile.a1 / (profile.a2 * (1.0 - s_star))
    window_value = b * g_min
    coef_right = a * shrink / (1.0 - s0)

    # seam continuity is exact algebraically; a mismatch means the profile is
    # outside the regime the construction assumes
    left_end = coef_left * profile.delta_s
    right_start = coef_right * (s_star - s0)
    for name, val in (("left", left_end), ("right", right_start)):
        if abs(val - window_value) > continuity_tol * window_value:
            raise NumericalError(
                f"certificate rejected: {name} seam discontinuity "
                f"{val:.17g} vs {window_value:.17g}"
            )
    return GapCertificate(
        s_star=s_star,
        delta_s=profile.delta_s,
        g_min=g_min,
        delta=delta,
        s0=s0,
        k=k,
        a=a,
        b=b,
        coef_left=coef_left,
        window_value=window_value,
        coef_right=coef_right,
        profile=profile,
    )


# ---------------------------------------------------------------------------
# Window brackets for the two crossing branches
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WindowBracket:
    """Closed-form root estimates delta0+- at one window point.

    The two lowest eigenvalues near the crossing are s E_0 + delta with
    delta bracketed by (1 -+ eta) delta0+- (ground branch is the negative
    root, first excited the positive one).
    """

    s: float
    delta0_plus: float
    delta0_minus: float
    eta: float = 0.1


def window_bracket(profile: SpectralProfile, s: float, eta: float = 0.1) -> WindowBracket:
    lo = profile.s_star - profile.delta_s
    hi = profile.s_star + profile.delta_s
    if not lo <= s <= hi:
        raise PreconditionError(f"s={s} outside the crossing window [{lo}, {hi}]")
    a1, a2 = profile.a1, profile.a2
    pref = s * (a1 + 1.0) / (2.0 * a2 * (1.0 - s))
    diff = s - profile.s_star
    disc = sqrt(diff * diff + 4.0 * a2 * profile.d0 * (1.0 - s) ** 2 / (profile.N * (a1 + 1.0) ** 2))
    return WindowBracket(
        s=s,
        delta0_plus=pref * (diff + disc),
        delta0_minus=pref * (diff - disc),
        eta=eta,
    )


@dataclass(frozen=True)
class SandwichReport:
    s_values: np.ndarray
    gaps: np.ndarray
    lower: float            # (1 - 2 eta) g_min
    upper: float            # kappa' g_min
    max_low_violation: float
    max_high_violation: float

    @property
    def violations(self) -> int:
        eps = 0.0
        low = np.count_nonzero(self.gaps < self.lower - eps)
        high = np.count_nonzero(self.gaps > self.upper + eps)
        return int(low + high)


def window_sandwich_check(
    profile: SpectralProfile,
    spec: DegeneracySpectrum,
    n_points: int = 101,
    eta: float = 0.1,
) -> SandwichReport:
    """Sample the window and compare the true gap with the two-sided bound."""
    if not profile.condition_ok:
        raise SpectralConditionError("sandwich check requires the gap condition")
    s_values = np.linspace(profile.s_star - profile.delta_s, profile.s_star + profile.delta_s, n_points)
    gaps = true_gap_grid(spec, s_values)
    lower = (1.0 - 2.0 * eta) * profile.g_min
    upper = profile.kappa_prime * profile.g_min
    return SandwichReport(
        s_values=s_values,
        gaps=gaps,
        lower=lower,
        upper=upper,
        max_low_violation=float(np.max(lower - gaps)),
        max_high_violation=float(np.max(gaps - upper)),
    )


# ---------------------------------------------------------------------------
# Right-region resolvent function
# ---------------------------------------------------------------------------


def right_region_f(profile: SpectralProfile, s: float, k: float = 0.25) -> float:
    """The correction factor f(s) in the right-region bound g >= 2 beta/(1+f).

    Monotonically nonincreasing on [s*, 1] for the default constants, with
    f(s*) = (1+16k^2)/(1-8k^2) and f(1) = 0 (limit: the pole term in the
    denominator diverges at s=1).
    """
    s_star = profile.s_star
    if not s_star <= s <= 1.0:
        raise PreconditionError("right_region_f requires s in [s*, 1]")
    delta = profile.delta
    g_min = profile.g_min
    a = 4.0 * k * k * delta / 3.0
    s0 = s_star - k * g_min * (1.0 - s_star) / (a - k * g_min)
    if s == 1.0:
        return 0.0
    beta = a * (s - s0) / (1.0 - s0)
    ratio = profile.N * beta * beta * profile.a2 / (s * s * profile.d0)
    pole = profile.N * beta / profile.d0 * (s - s_star) / (s * (1.0 - s) * (1.0 - s_star))
    denom = 1.0 + pole - 2.0 * ratio
    if denom <= 0.0:
        raise NumericalError(
            f"right-region denominator nonpositive at s={s}; offset/slope constants mis-tuned"
        )
    return (1.0 + 4.0 * ratio) / denom


def right_region_beta(profile: SpectralProfile, s: float, k: float = 0.25) -> float:
    delta = profile.delta
    a = 4.0 * k * k * delta / 3.0
    s0 = profile.s_star - k * profile.g_min * (1.0 - profile.s_star) / (a - k * profile.g_min)
    return a * (s - s0) / (1.0 - s0)


# ---------------------------------------------------------------------------
# Full-interval scan (CSV payload)
# ---------------------------------------------------------------------------


def gap_scan(
    spec: DegeneracySpectrum,
    profile: SpectralProfile,
    cert: GapCertificate,
    n_grid: int = 1000,
) -> list[tuple[float, float, float, str]]:
    """Rows (s, g_true, g_lower, region) over an interior grid of (0, 1]."""
    s_values = np.linspace(0.0, 1.0, n_grid + 1)[1:]
    gaps = true_gap_grid(spec, s_values)
    lows = cert.g0(s_values)
    return [
        (float(s), float(g), float(lo), cert.region(float(s)))
        for s, g, lo in zip(s_values, gaps, lows)
    ]


def variational_upper_bound(profile: SpectralProfile, s, e0: float = 0.0) -> np.ndarray:
    """Ansatz energy s E_0 + (A1/A2) (s - s*)/(1 - s*); upper-bounds lambda_0."""
    s = np.asarray(s, dtype=float)
    return s * e0 + profile.a1 / profile.a2 * (s - profile.s_star) / (1.0 - profile.s_star)
