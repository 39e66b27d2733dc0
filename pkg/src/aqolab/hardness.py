"""Hardness reductions built on spectral-parameter queries.

Two pipelines, both over exact rationals:

* two-call ground-energy disambiguation: couple a fresh spin so that the
  query difference A1(H) - 2 A1(H') is exactly zero when E_0 = 0 and
  bounded away from zero otherwise;

* degeneracy extraction: shift half of the doubled spectrum by -x/2, so
  f(x) = 2 A1(H'(x)) - A1(H) = (1/2^n) sum_k d_k/(Delta_k + x/2); then
  P(x) = prod_k (Delta_k + x/2) f(x) is a polynomial whose values at
  -2 Delta_k isolate single degeneracies.  Interpolation is exact; the
  noisy variant tracks worst-case rounding margins, and the probabilistic
  variant decodes through corrupted samples with an error locator.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DecodeFailureError,
    InconsistentOracleError,
    InputError,
    PreconditionError,
    PrecisionInsufficientError,
    SizeError,
)
from .rationalpoly import (
    DecodedPolynomial,
    berlekamp_welch,
    lagrange_basis_at,
    lagrange_interpolate,
    poly_eval,
)
from .spectrum import DegeneracySpectrum

Level = tuple[Fraction, int]


def _merge_levels(levels: Sequence[Level]) -> tuple[Level, ...]:
    merged: dict[Fraction, int] = {}
    for e, d in levels:
        merged[e] = merged.get(e, 0) + d
    return tuple(sorted(merged.items()))


def a1_of_levels(levels: Sequence[Level], n: int) -> Fraction:
    """A1 = (1/2^n) sum_{k>=1} d_k / (E_k - E_0), exact."""
    levels = _merge_levels(levels)
    e0 = levels[0][0]
    total = Fraction(0)
    for e, d in levels[1:]:
        total += Fraction(d) / (e - e0)
    return total / 2 ** n


def couple_ancilla_plus(spec: DegeneracySpectrum) -> DegeneracySpectrum:
    """Tensor on a fresh spin projected to its +1 branch: the (n+1)-qubit
    spectrum gains a level at 0 of degeneracy 2^n (merged if already present)."""
    levels = _merge_levels(list(spec.levels) + [(Fraction(0), spec.N)])
    return DegeneracySpectrum(n=spec.n + 1, levels=levels, normalized=False)


def shifted_levels(levels: Sequence[Level], n: int, x: Fraction) -> tuple[Level, ...]:
    """Levels of H'(x): a copy of every level shifted down by x/2, union the
    original copy (one extra qubit)."""
    if x <= 0:
        raise PreconditionError("shift parameter x must be positive")
    shifted = [(e - x / 2, d) for e, d in levels]
    return _merge_levels(shifted + list(levels))


# ---------------------------------------------------------------------------
# Oracle
# ---------------------------------------------------------------------------


@dataclass
class A1Oracle:
    """Query interface for the spectral parameter of a hidden spectrum.

    Modes: "exact" returns the exact rational; "noisy" perturbs each answer
    within +-eps via the perturb callback (call index -> offset), default a
    seeded rational jitter; "prob" answers correctly with probability q and
    arbitrarily otherwise.
    """

    n: int
    levels: tuple[Level, ...]
    mode: str = "exact"
    eps: Fraction = Fraction(0)
    q: float = 1.0
    perturb: Callable[[int], Fraction] | None = None
    seed: int = 0
    calls: int = field(default=0, init=False)

    def __post_init__(self):
        self.levels = _merge_levels(self.levels)
        if self.mode not in ("exact", "noisy", "prob"):
            raise InputError(f"unknown oracle mode {self.mode!r}")
        self.eps = Fraction(self.eps)
        if self.mode == "exact":
            self.eps = Fraction(0)
        if self.eps < 0:
            raise InputError("oracle accuracy eps must be nonnegative")
        self._rng = np.random.default_rng(self.seed)

    @classmethod
    def from_spectrum(cls, spec: DegeneracySpectrum, **kw) -> "A1Oracle":
        return cls(n=spec.n, levels=spec.levels, **kw)

    def _answer(self, exact: Fraction) -> Fraction:
        idx = self.calls
        self.calls += 1
        if self.mode == "exact":
            return exact
        if self.mode == "noisy":
            if self.perturb is not None:
                off = Fraction(self.perturb(idx))
                if abs(off) > self.eps:
                    raise InputError("perturbation exceeds the declared eps")
            else:
                num = int(self._rng.integers(-10 ** 6, 10 ** 6 + 1))
                off = self.eps * Fraction(num, 10 ** 6)
            return exact + off
        # probabilistic: correct draw returns the exact value (trivially
        # within +-eps); bad draw returns rational junk
        if self._rng.random() < self.q:
            return exact
        return exact + Fraction(1 + int(self._rng.integers(0, 100)), 7)

    def a1_base(self) -> Fraction:
        return self._answer(a1_of_levels(self.levels, self.n))

    def a1_coupled(self) -> Fraction:
        levels = _merge_levels(list(self.levels) + [(Fraction(0), 2 ** self.n)])
        return self._answer(a1_of_levels(levels, self.n + 1))

    def a1_shifted(self, x: Fraction) -> Fraction:
        levels = shifted_levels(self.levels, self.n, Fraction(x))
        return self._answer(a1_of_levels(levels, self.n + 1))


def f_of_x(oracle: A1Oracle, x: Fraction, base_value: Fraction | None = None) -> Fraction:
    """f(x) = 2 A1(H'(x)) - A1(H); exactly (1/2^n) sum_k d_k/(Delta_k + x/2)."""
    x = Fraction(x)
    if x <= 0:
        raise PreconditionError("f(x) requires x > 0")
    base = oracle.a1_base() if base_value is None else base_value
    return 2 * oracle.a1_shifted(x) - base


# ---------------------------------------------------------------------------
# Two-call disambiguation
# ---------------------------------------------------------------------------


def disambiguation_threshold(n: int, mu1: Fraction, mu2: Fraction,
                             d0_bound: int) -> Fraction:
    """Largest oracle accuracy for which two calls separate the promise cases:
    eps < mu1/(6(1-mu1)) - (d0/2^n)/(6 mu1 mu2)."""
    mu1, mu2 = Fraction(mu1), Fraction(mu2)
    if not (0 < mu1 < 1 and 0 < mu2 < 1):
        raise PreconditionError("promise margins must lie in (0, 1)")
    return mu1 / (6 * (1 - mu1)) - Fraction(d0_bound, 2 ** n) / (6 * mu1 * mu2)


def disambiguate(oracle: A1Oracle, mu1: Fraction, mu2: Fraction,
                 d0_bound: int) -> str:
    """Decide "zero" vs "bounded-away" for the promised ground energy.

    Queries the oracle on H and on the ancilla-coupled H'; answers "zero"
    iff the difference of estimates is <= 3 eps.  Refuses when the oracle
    accuracy is not strictly below the separation threshold.
    """
    threshold = disambiguation_threshold(oracle.n, mu1, mu2, d0_bound)
    if oracle.eps >= threshold:
        raise PrecisionInsufficientError(
            f"oracle accuracy {oracle.eps} is not below the separation "
            f"threshold {threshold}",
            required_eps=threshold,
        )
    diff = oracle.a1_base() - 2 * oracle.a1_coupled()
    return "zero" if diff <= 3 * oracle.eps else "bounded-away"


# ---------------------------------------------------------------------------
# Clause gadget
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SatInstance:
    """3-SAT formula; clause literals are 1-based and sign-encoded."""

    n: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if not self.clauses:
            raise InputError("formula needs at least one clause")
        for clause in self.clauses:
            if len(clause) != 3:
                raise InputError("every clause must have exactly 3 literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.n:
                    raise InputError(f"literal {lit} out of range")

    @classmethod
    def from_dimacs(cls, text: str) -> "SatInstance":
        n = None
        clauses = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith(("c", "%")):
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) != 4 or parts[1] != "cnf":
                    raise InputError(f"bad DIMACS header: {line!r}")
                n = int(parts[2])
                continue
            lits = [int(tok) for tok in line.split()]
            if lits and lits[-1] == 0:
                lits = lits[:-1]
            if not lits:
                continue
            if len(lits) != 3:
                raise InputError("only 3-literal clauses are supported")
            clauses.append(tuple(lits))
        if n is None:
            raise InputError("missing DIMACS problem line")
        return cls(n=n, clauses=tuple(clauses))

    def satisfying_count(self) -> int:
        count = 0
        for z in range(2 ** self.n):
            if all(self._clause_true(c, z) for c in self.clauses):
                count += 1
        return count

    def _clause_true(self, clause, z: int) -> bool:
        return any(
            ((z >> (abs(l) - 1)) & 1) == (1 if l > 0 else 0) for l in clause
        )


def _literal_value(lit: int, z: int) -> int:
    bit = (z >> (abs(lit) - 1)) & 1
    return bit if lit > 0 else 1 - bit


@dataclass(frozen=True)
class SatGadget:
    """Diagonal Hamiltonian on 2n + 2m qubits encoding a 3-SAT formula.

    Per clause k: the four one-body penalty terms, the three pairwise literal
    products and the three auxiliary couplings; clause value is 3 when the
    clause is satisfied (auxiliary optimized) and 4 otherwise.  The total adds
    a weak field on the padding block and recenters so energies lie in [0, 1]
    with E_0 = 0 iff the formula is satisfiable.
    """

    instance: SatInstance

    @property
    def qubits(self) -> int:
        return 2 * self.instance.n + 2 * len(self.instance.clauses)

    def clause_value(self, k: int, z: int) -> int:
        a, b, c = self.instance.clauses[k]
        alpha = _literal_value(a, z)
        beta = _literal_value(b, z)
        gamma = _literal_value(c, z)
        y = (z >> (self.instance.n + k)) & 1
        return (
            (1 - alpha) + (1 - beta) + (1 - gamma) + (1 - y)
            + alpha * beta + alpha * gamma + beta * gamma
            + ((1 - alpha) + (1 - beta) + (1 - gamma)) * y
        )

    def clause_min_over_aux(self, k: int, z: int) -> int:
        aux_bit = 1 << (self.instance.n + k)
        return min(self.clause_value(k, z & ~aux_bit), self.clause_value(k, z | aux_bit))

    def energy(self, z: int) -> Fraction:
        n, m = self.instance.n, len(self.instance.clauses)
        clause_sum = sum(self.clause_value(k, z) for k in range(m))
        padding = sum((z >> j) & 1 for j in range(n + m, 2 * n + 2 * m))
        return (
            Fraction(clause_sum, 6 * m)
            + Fraction(padding, 2 * n + 2 * m)
            - Fraction(1, 2)
        )

    def spectrum(self) -> DegeneracySpectrum:
        counts: dict[Fraction, int] = {}
        for z in range(2 ** self.qubits):
            e = self.energy(z)
            counts[e] = counts.get(e, 0) + 1
        levels = tuple(sorted(counts.items()))
        return DegeneracySpectrum(n=self.qubits, levels=levels, normalized=True)

    def min_energy(self) -> Fraction:
        n, m = self.instance.n, len(self.instance.clauses)
        best = min(
            sum(self.clause_min_over_aux(k, z) for k in range(m))
            for z in range(2 ** n)
        )
        return Fraction(best, 6 * m) - Fraction(1, 2)


def sat_gadget(instance: SatInstance, ceiling: int = 14) -> SatGadget:
    gadget = SatGadget(instance=instance)
    if gadget.qubits > ceiling:
        raise SizeError(
            f"gadget needs {gadget.qubits} qubits, above the ceiling {ceiling}"
        )
    return gadget


# ---------------------------------------------------------------------------
# Degeneracy extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtractionTranscript:
    n: int
    gaps: tuple[int, ...]
    samples: tuple[tuple[Fraction, Fraction], ...]     # (x_i, f~(x_i))
    coefficients: tuple[Fraction, ...]                 # interpolated P, low->high
    degeneracies: tuple[int, ...]
    margins: tuple[Fraction, ...]                      # guaranteed |d~ - d| bound
    rounding_offsets: tuple[Fraction, ...]             # realized |d~ - round(d~)|
    eps: Fraction
    eps_max: Fraction
    decode: str = "lagrange"
    error_locations: tuple[int, ...] = ()
    success_probability: float | None = None

    def to_json(self) -> str:
        def frac(f: Fraction) -> str:
            return f"{f.numerator}/{f.denominator}"

        obj = {
            "n": self.n,
            "gaps": list(self.gaps),
            "samples": [[frac(x), frac(y)] for x, y in self.samples],
            "coefficients": [frac(c) for c in self.coefficients],
            "degeneracies": list(self.degeneracies),
            "margins": [frac(m) for m in self.margins],
            "rounding_offsets": [frac(m) for m in self.rounding_offsets],
            "eps": frac(self.eps),
            "eps_max": frac(self.eps_max),
            "decode": self.decode,
            "error_locations": list(self.error_locations),
            "success_probability": self.success_probability,
        }
        return json.dumps(obj, indent=2, sort_keys=True)


def _validate_gaps(gaps) -> tuple[int, ...]:
    gaps = tuple(int(g) for g in gaps)
    if not gaps or gaps[0] != 0:
        raise PreconditionError("gap list must start with Delta_0 = 0")
    if any(b <= a for a, b in zip(gaps, gaps[1:])):
        raise PreconditionError("gaps must be strictly increasing integers")
    return gaps


def _sample_weight(gaps, x: Fraction) -> Fraction:
    """prod_k (Delta_k + x/2) = (x/2) * prod_{k>=1} (Delta_k + x/2)."""
    w = Fraction(1)
    for g in gaps:
        w *= g + x / 2
    return w


def extraction_eps_budget(n: int, gaps) -> Fraction:
    """Published worst-case accuracy budget for rounding to survive:
    (1/2) min_k prod_{l != k} |Delta_l - Delta_k|
    / (2^n * 3 * 2^(M-1) * max_i (x_i/2) prod_{k>=1}(Delta_k + x_i/2))."""
    gaps = _validate_gaps(gaps)
    M = len(gaps)
    xs = [Fraction(2 * i + 1) for i in range(M)]
    max_w = max(_sample_weight(gaps, x) for x in xs)
    min_prod = min(
        abs(_denominator_product(gaps, k)) for k in range(M)
    )
    return Fraction(1, 2) * min_prod / (2 ** n * 3 * 2 ** (M - 1) * max_w)


def _denominator_product(gaps, k: int) -> Fraction:
    prod = Fraction(1)
    for ell, g in enumerate(gaps):
        if ell != k:
            prod *= g - gaps[k]
    return prod


def _degeneracies_from_poly(poly_coeffs, n: int, gaps) -> list[Fraction]:
    out = []
    for k, g in enumerate(gaps):
        value = poly_eval(list(poly_coeffs), Fraction(-2 * g))
        out.append(2 ** n * value / _denominator_product(gaps, k))
    return out


def extract_degeneracies(oracle: A1Oracle, n: int, gaps) -> ExtractionTranscript:
    """Exact pipeline: sample f at the first M odd integers, interpolate P,
    read each degeneracy off P(-2 Delta_k)."""
    gaps = _validate_gaps(gaps)
    if oracle.mode != "exact":
        raise PreconditionError("exact extraction requires an exact-mode oracle")
    M = len(gaps)
    xs = [Fraction(2 * i + 1) for i in range(M)]
    base = oracle.a1_base()
    samples = [(x, f_of_x(oracle, x, base_value=base)) for x in xs]
    points = [(x, _sample_weight(gaps, x) * y) for x, y in samples]
    coeffs = lagrange_interpolate(points)
    raw = _degeneracies_from_poly(coeffs, n, gaps)
    degs = []
    for value in raw:
        if value.denominator != 1 or value < 0:
            raise InconsistentOracleError(
                f"recovered degeneracy {value} is not a nonnegative integer"
            )
        degs.append(int(value))
    if sum(degs) != 2 ** n:
        raise InconsistentOracleError(
            f"recovered degeneracies sum to {sum(degs)}, expected 2^{n}"
        )
    zero = Fraction(0)
    return ExtractionTranscript(
        n=n,
        gaps=gaps,
        samples=tuple(samples),
        coefficients=tuple(coeffs),
        degeneracies=tuple(degs),
        margins=(zero,) * M,
        rounding_offsets=(zero,) * M,
        eps=Fraction(0),
        eps_max=extraction_eps_budget(n, gaps),
    )


def extraction_margins(n: int, gaps, eps: Fraction) -> list[Fraction]:
    """Guaranteed |d~_k - d_k| bound under |f~ - f| <= 3 eps at every sample:
    the sample errors transfer through the Lagrange basis to -2 Delta_k."""
    gaps = _validate_gaps(gaps)
    M = len(gaps)
    xs = [Fraction(2 * i + 1) for i in range(M)]
    weights = [_sample_weight(gaps, x) for x in xs]
    out = []
    for k, g in enumerate(gaps):
        x0 = Fraction(-2 * g)
        transfer = sum(
            abs(lagrange_basis_at(xs, i, x0)) * w for i, w in enumerate(weights)
        )
        out.append(3 * Fraction(eps) * transfer * 2 ** n / abs(_denominator_product(gaps, k)))
    return out


def extract_degeneracies_noisy(oracle: A1Oracle, n: int, gaps) -> ExtractionTranscript:
    """Noise-tolerant pipeline: same interpolation, with worst-case margin
    tracking; rounds each degeneracy and refuses when a margin reaches 1/2."""
    gaps = _validate_gaps(gaps)
    M = len(gaps)
    eps_max = extraction_eps_budget(n, gaps)
    if oracle.eps > eps_max:
        raise PrecisionInsufficientError(
            f"oracle accuracy {oracle.eps} exceeds the rounding budget {eps_max}",
            required_eps=eps_max,
        )
    margins = extraction_margins(n, gaps, oracle.eps)
    bad = [m for m in margins if m >= Fraction(1, 2)]
    if bad:
        scale = max(margins) / Fraction(1, 2)
        raise PrecisionInsufficientError(
            "rounding margin reaches 1/2; oracle accuracy must shrink by "
            f"a factor {float(scale):.3g}",
            required_eps=oracle.eps / scale,
        )
    xs = [Fraction(2 * i + 1) for i in range(M)]
    base = oracle.a1_base()
    samples = [(x, f_of_x(oracle, x, base_value=base)) for x in xs]
    points = [(x, _sample_weight(gaps, x) * y) for x, y in samples]
    coeffs = lagrange_interpolate(points)
    raw = _degeneracies_from_poly(coeffs, n, gaps)
    degs = []
    offsets = []
    for value in raw:
        nearest = (2 * value + 1) // 2  # floor(value + 1/2)
        offsets.append(abs(value - nearest))
        degs.append(int(nearest))
    if any(d < 0 for d in degs) or sum(degs) != 2 ** n:
        raise InconsistentOracleError(
            "rounded degeneracies are inconsistent with a 2^n-state spectrum"
        )
    return ExtractionTranscript(
        n=n,
        gaps=gaps,
        samples=tuple(samples),
        coefficients=tuple(coeffs),
        degeneracies=tuple(degs),
        margins=tuple(margins),
        rounding_offsets=tuple(offsets),
        eps=oracle.eps,
        eps_max=eps_max,
    )


def probabilistic_extraction(
    oracle: A1Oracle, n: int, gaps, k_samples: int
) -> ExtractionTranscript:
    """Majority-style pipeline: oversample at k odd integers and decode the
    interpolation polynomial through corrupted answers.  Fails (retriably)
    when too many bad draws land in one transcript."""
    gaps = _validate_gaps(gaps)
    M = len(gaps)
    if k_samples < 4 * (M + 2):
        raise PreconditionError(
            f"need k >= 4 (M + 2) = {4 * (M + 2)} samples, got {k_samples}"
        )
    degree = M - 1
    t_budget = (k_samples - M + 1) // 2 - 1
    xs = [Fraction(2 * i + 1) for i in range(k_samples)]
    base = oracle.a1_base()
    samples = [(x, f_of_x(oracle, x, base_value=base)) for x in xs]
    points = [(x, _sample_weight(gaps, x) * y) for x, y in samples]
    decoded: DecodedPolynomial = berlekamp_welch(points, degree, t_budget)
    raw = _degeneracies_from_poly(decoded.coefficients, n, gaps)
    degs = []
    for value in raw:
        if value.denominator != 1 or value < 0:
            raise DecodeFailureError(
                "decoded polynomial yields non-integer degeneracies; retry with fresh queries"
            )
        degs.append(int(value))
    if sum(degs) != 2 ** n:
        raise DecodeFailureError("decoded degeneracies break the dimension count; retry")
    zero = Fraction(0)
    return ExtractionTranscript(
        n=n,
        gaps=gaps,
        samples=tuple(samples),
        coefficients=tuple(decoded.coefficients),
        degeneracies=tuple(degs),
        margins=(zero,) * M,
        rounding_offsets=(zero,) * M,
        eps=oracle.eps,
        eps_max=extraction_eps_budget(n, gaps),
        decode="berlekamp-welch",
        error_locations=decoded.error_locations,
        success_probability=1.0 - float(np.exp(-k_samples / 24.0)),
    )


# ---------------------------------------------------------------------------
# Commuting-circuit amplitude
# ---------------------------------------------------------------------------


def iqp_amplitude(spec, phase: float = 1.0) -> float:
    """|(1/2^n) sum_k d_k e^(i phase Delta_k)|^2 for integer gaps."""
    if isinstance(spec, DegeneracySpectrum):
        n, levels = spec.n, spec.levels
    else:
        levels = _merge_levels(spec)
        total = sum(d for _, d in levels)
        n = total.bit_length() - 1
        if 2 ** n != total:
            raise PreconditionError("degeneracies must sum to a power of two")
    e0 = levels[0][0]
    acc = 0j
    for e, d in levels:
        gap = e - e0
        if gap.denominator != 1:
            raise PreconditionError("amplitude formula requires integer gaps")
        acc += d * cmath.exp(1j * phase * int(gap))
    return abs(acc / 2 ** n) ** 2
