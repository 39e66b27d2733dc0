"""Degeneracy spectra of diagonal Hamiltonians and the rank-one interpolation.

The interpolated Hamiltonian is H(s) = -(1-s) |psi0><psi0| + s H_z with
|psi0> the uniform superposition.  All analysis happens in the M-dimensional
invariant subspace spanned by the normalized level superpositions |k>, where
H(s) acts as  s diag(E_k) - (1-s) v v^T  with v_k = sqrt(d_k / N).

Eigenvalues in that subspace are the roots of the secular equation

    1/(1-s) = (1/N) sum_k d_k / (s E_k - lambda),

one root below s E_0 and one in each pole interval (s E_{k-1}, s E_k).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import sqrt
from typing import Sequence

import numpy as np

from .errors import BracketError, InputError, PreconditionError, SizeError

Level = tuple[Fraction, int]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise InputError(f"energies must be exact rationals, got {value!r}")


@dataclass(frozen=True)
class DegeneracySpectrum:
    """Distinct energies with multiplicities; the universal analysis input."""

    n: int
    levels: tuple[Level, ...]
    normalized: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise InputError("qubit count must be >= 1")
        levels = tuple((_as_fraction(e), int(d)) for e, d in self.levels)
        object.__setattr__(self, "levels", levels)
        if len(levels) < 2:
            raise InputError("spectrum must have at least two distinct levels")
        for (e0, d0), (e1, _) in zip(levels, levels[1:]):
            if not e0 < e1:
                raise InputError("energies must be strictly increasing")
        if any(d < 1 for _, d in levels):
            raise InputError("all degeneracies must be >= 1")
        if sum(d for _, d in levels) != 2 ** self.n:
            raise InputError("degeneracies must sum to 2^n")
        if self.normalized and (levels[0][0] < 0 or levels[-1][0] > 1):
            raise InputError("normalized spectrum must have energies in [0, 1]")

    # -- derived views -----------------------------------------------------

    @property
    def M(self) -> int:
        return len(self.levels)

    @property
    def N(self) -> int:
        return 2 ** self.n

    @property
    def d0(self) -> int:
        return self.levels[0][1]

    @property
    def delta(self) -> Fraction:
        """Spectral gap E_1 - E_0 of the diagonal Hamiltonian."""
        return self.levels[1][0] - self.levels[0][0]

    @cached_property
    def energies(self) -> np.ndarray:
        return np.array([float(e) for e, _ in self.levels])

    @cached_property
    def degeneracies(self) -> np.ndarray:
        return np.array([float(d) for _, d in self.levels])

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        obj = {
            "n": self.n,
            "levels": [
                {"energy": f"{e.numerator}/{e.denominator}", "degeneracy": d}
                for e, d in self.levels
            ],
            "normalized": self.normalized,
        }
        return json.dumps(obj, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DegeneracySpectrum":
        try:
            obj = json.loads(text)
            levels = tuple(
                (Fraction(lv["energy"]), int(lv["degeneracy"])) for lv in obj["levels"]
            )
            return cls(n=int(obj["n"]), levels=levels, normalized=bool(obj["normalized"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad spectrum JSON: {exc}") from exc


@dataclass(frozen=True)
class AffineMap:
    """Record of the normalization E_norm = (E - offset) / scale."""

    offset: Fraction
    scale: Fraction

    def forward(self, e: Fraction) -> Fraction:
        return (e - self.offset) / self.scale

    def backward(self, e: Fraction) -> Fraction:
        return self.offset + self.scale * e


def normalize(spec: DegeneracySpectrum) -> tuple[DegeneracySpectrum, AffineMap]:
    """Map energies affinely onto [0, 1] with E_0 = 0 and E_{M-1} = 1."""
    e0 = spec.levels[0][0]
    span = spec.levels[-1][0] - e0
    if span == 0:
        raise InputError("degenerate spectrum: all energies equal")
    amap = AffineMap(offset=e0, scale=span)
    levels = tuple((amap.forward(e), d) for e, d in spec.levels)
    return DegeneracySpectrum(n=spec.n, levels=levels, normalized=True), amap


# ---------------------------------------------------------------------------
# Ising models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IsingModel:
    """2-local classical spin model with bounded integer couplings and fields."""

    n: int
    couplings: tuple[tuple[int, int, int], ...]
    fields: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "couplings", tuple((int(i), int(j), int(J)) for i, j, J in self.couplings)
        )
        object.__setattr__(self, "fields", tuple(int(h) for h in self.fields))
        if len(self.fields) != self.n:
            raise InputError("need exactly one field per spin")
        for i, j, _ in self.couplings:
            if not 0 <= i < j < self.n:
                raise InputError("couplings must satisfy 0 <= i < j < n")

    @property
    def bound(self) -> int:
        vals = [abs(J) for *_, J in self.couplings] + [abs(h) for h in self.fields]
        return max(vals) if vals else 0

    def to_json(self) -> str:
        obj = {
            "n": self.n,
            "couplings": [[i, j, J] for i, j, J in self.couplings],
            "fields": list(self.fields),
        }
        return json.dumps(obj, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "IsingModel":
        try:
            obj = json.loads(text)
            return cls(
                n=int(obj["n"]),
                couplings=tuple(tuple(c) for c in obj["couplings"]),
                fields=tuple(obj["fields"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad Ising JSON: {exc}") from exc


def enumerate_ising(model: IsingModel, ceiling: int = 24) -> DegeneracySpectrum:
    """Exhaustive spectrum of an Ising model over all 2^n spin assignments.

    Spin convention: bit b -> spin 1 - 2b, so sigma_z has eigenvalue +1 on bit 0.
    Products sigma_i sigma_j are evaluated with the XOR parity trick, one vector
    pass per coupling.
    """
    if model.n > ceiling:
        raise SizeError(f"n={model.n} exceeds brute-force ceiling {ceiling}")
    z = np.arange(2 ** model.n, dtype=np.int64)
    energy = np.zeros(2 ** model.n, dtype=np.int64)
    for i, j, J in model.couplings:
        parity = ((z >> i) ^ (z >> j)) & 1
        energy += J * (1 - 2 * parity)
    for j, h in enumerate(model.fields):
        if h:
            energy += h * (1 - 2 * ((z >> j) & 1))
    values, counts = np.unique(energy, return_counts=True)
    if len(values) == 1:
        # single level: pad description so downstream invariants hold
        raise InputError("Ising model has a single energy level (constant Hamiltonian)")
    levels = tuple((Fraction(int(v)), int(c)) for v, c in zip(values, counts))
    return DegeneracySpectrum(n=model.n, levels=levels, normalized=False)


# ---------------------------------------------------------------------------
# Spectral parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralProfile:
    """Scalar summary of one normalized spectrum.

    a1, a2, a3 are the degeneracy-weighted inverse-gap power sums
    (1/N) sum_{k>=1} d_k / (E_k - E_0)^p; the remaining fields are the
    crossing position, window half-width, minimum-gap estimate, the window
    upper-bound factor and the gap condition value (1/Delta) sqrt(d0/(A2 N)).
    """

    n: int
    N: int
    d0: int
    a1: float
    a2: float
    a3: float
    delta: float
    s_star: float
    delta_s: float
    g_min: float
    kappa_prime: float
    condition_value: float
    condition_ok: bool
    c: float


def a_p_exact(spec: DegeneracySpectrum, p: int) -> Fraction:
    """Exact rational A_p = (1/N) sum_{k>=1} d_k / (E_k - E_0)^p."""
    e0 = spec.levels[0][0]
    total = Fraction(0)
    for e, d in spec.levels[1:]:
        total += Fraction(d) / (e - e0) ** p
    return total / spec.N


def spectral_params(spec: DegeneracySpectrum, c: float = 0.02) -> SpectralProfile:
    if not spec.normalized:
        raise PreconditionError("spectral_params requires a normalized spectrum")
    if not 0.0 < c < 0.5:
        raise PreconditionError(
            "condition threshold c must lie in (0, 1/2) (the window factor "
            "diverges at c = 1/2)"
        )
    e = spec.energies
    d = spec.degeneracies
    gaps = e[1:] - e[0]
    N = float(spec.N)
    a1, a2, a3 = (float(np.sum(d[1:] / gaps ** p)) / N for p in (1, 2, 3))
    delta = float(gaps[0])
    d0 = spec.d0
    s_star = a1 / (a1 + 1.0)
    delta_s = 2.0 / (a1 + 1.0) ** 2 * sqrt(d0 * a2 / N)
    g_min = 2.0 * a1 / (a1 + 1.0) * sqrt(d0 / (a2 * N))
    kappa_prime = (1 + 2 * c) / (1 - 2 * c) * sqrt(1.0 + (1 - 2 * c) ** 2)
    condition_value = sqrt(d0 / (a2 * N)) / delta
    return SpectralProfile(
        n=spec.n,
        N=spec.N,
        d0=d0,
        a1=a1,
        a2=a2,
        a3=a3,
        delta=delta,
        s_star=s_star,
        delta_s=delta_s,
        g_min=g_min,
        kappa_prime=kappa_prime,
        condition_value=condition_value,
        condition_ok=condition_value < c,
        c=c,
    )


def symmetric_state_overlap(spec: DegeneracySpectrum) -> np.ndarray:
    """Coordinates sqrt(d_k/N) of the uniform superposition in the level basis."""
    return np.sqrt(spec.degeneracies / spec.N)


def dense_symmetric_matrix(spec: DegeneracySpectrum, s: float) -> np.ndarray:
    """Explicit M x M restriction of H(s); the independent eigenvalue oracle."""
    v = symmetric_state_overlap(spec)
    return s * np.diag(spec.energies) - (1.0 - s) * np.outer(v, v)


# ---------------------------------------------------------------------------
# Secular equation solver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InterpolatedSpectrum:
    s: float
    eigenvalues: np.ndarray

    @property
    def gap(self) -> float:
        return float(self.eigenvalues[1] - self.eigenvalues[0])


def _secular_value(e, d, N, s, lam):
    """phi(lam) = (1/N) sum d_k/(s e_k - lam) - 1/(1-s); increasing between poles."""
    return np.sum(d[:, None] / (s * e[:, None] - lam[None, :]), axis=0) / N - 1.0 / (1.0 - s)


def _bisect_roots(e, d, N, s, lo, hi, tol, max_iter=200):
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    f_lo = _secular_value(e, d, N, s, lo)
    if np.any(f_lo >= 0):
        raise BracketError(
            f"secular bracket lost at s={s}: lower endpoint already nonnegative "
            "(pole proximity below tolerance)"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = _secular_value(e, d, N, s, mid)
        neg = f_mid < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
        if np.all(hi - lo < tol):
            break
    return 0.5 * (lo + hi)


def secular_eigenvalues(
    spec: DegeneracySpectrum, s: float, tol: float = 1e-12
) -> InterpolatedSpectrum:
    """All M symmetric-subspace eigenvalues of H(s), by bracketed bisection.

    The root below s E_0 is bracketed by [s E_0 - (1-s), s E_0); the k-th
    excited root lives in (s E_{k-1}, s E_k).  Brackets are shrunk by an
    ulp guard so the integrand stays finite at the endpoints.
    """
    if not spec.normalized:
        raise PreconditionError("secular_eigenvalues requires a normalized spectrum")
    if not 0.0 <= s <= 1.0:
        raise PreconditionError("schedule parameter s must lie in [0, 1]")
    e = spec.energies
    d = spec.degeneracies
    if s == 0.0:
        vals = np.zeros(spec.M)
        vals[0] = -1.0
        return InterpolatedSpectrum(s=0.0, eigenvalues=vals)
    if s == 1.0:
        return InterpolatedSpectrum(s=1.0, eigenvalues=e.copy())
    poles = s * e
    guard = 1e-15 * np.maximum(1.0, np.abs(poles))
    lo = np.empty(spec.M)
    hi = np.empty(spec.M)
    lo[0] = poles[0] - (1.0 - s)
    hi[0] = poles[0] - guard[0]
    lo[1:] = poles[:-1] + guard[:-1]
    hi[1:] = poles[1:] - guard[1:]
    roots = _bisect_roots(e, d, float(spec.N), s, lo, hi, tol)
    return InterpolatedSpectrum(s=s, eigenvalues=roots)


def lowest_two_on_grid(
    spec: DegeneracySpectrum, s_values: Sequence[float], tol: float = 1e-12
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized lambda_0(s), lambda_1(s) over a grid of interior s values."""
    s_values = np.asarray(s_values, dtype=float)
    if np.any((s_values <= 0) | (s_values >= 1)):
        raise PreconditionError("grid must consist of interior points 0 < s < 1")
    e = spec.energies
    d = spec.degeneracies
    N = float(spec.N)

    def phi(lam, s):
        return np.sum(d[:, None] / (np.outer(e, s) - lam[None, :]), axis=0) / N - 1.0 / (1.0 - s)

    p0 = s_values * e[0]
    p1 = s_values * e[1]
    guard0 = 1e-15 * np.maximum(1.0, np.abs(p0))
    guard1 = 1e-15 * np.maximum(1.0, np.abs(p1))
    out = []
    for lo, hi in (
        (p0 - (1.0 - s_values), p0 - guard0),
        (p0 + guard0, p1 - guard1),
    ):
        lo = lo.copy()
        hi = hi.copy()
        f_lo = phi(lo, s_values)
        if np.any(f_lo >= 0):
            raise BracketError("secular bracket lost on grid sweep")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            neg = phi(mid, s_values) < 0
            lo = np.where(neg, mid, lo)
            hi = np.where(neg, hi, mid)
            if np.all(hi - lo < tol):
                break
        out.append(0.5 * (lo + hi))
    return out[0], out[1]


def true_gap(spec: DegeneracySpectrum, s: float, tol: float = 1e-12) -> float:
    """lambda_1(s) - lambda_0(s); equals 1 at s=0 and Delta at s=1."""
    if s == 0.0:
        return 1.0
    if s == 1.0:
        return float(spec.delta)
    lam0, lam1 = lowest_two_on_grid(spec, np.array([s]), tol)
    return float(lam1[0] - lam0[0])


def true_gap_grid(
    spec: DegeneracySpectrum, s_values: Sequence[float], tol: float = 1e-12
) -> np.ndarray:
    s_values = np.asarray(s_values, dtype=float)
    gaps = np.empty_like(s_values)
    interior = (s_values > 0.0) & (s_values < 1.0)
    if np.any(interior):
        lam0, lam1 = lowest_two_on_grid(spec, s_values[interior], tol)
        gaps[interior] = lam1 - lam0
    gaps[s_values == 0.0] = 1.0
    gaps[s_values == 1.0] = float(spec.delta)
    return gaps
