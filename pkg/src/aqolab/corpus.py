"""Spectrum families used by the experiments and the verification corpus."""

from __future__ import annotations

from fractions import Fraction
from math import exp

import numpy as np

from .errors import InputError
from .spectrum import DegeneracySpectrum, spectral_params


def grover(n: int, d0: int = 1) -> DegeneracySpectrum:
    """Two-level spectrum {0: d0, 1: N-d0}; the unstructured-search benchmark."""
    N = 2 ** n
    if not 1 <= d0 < N:
        raise InputError("need 1 <= d0 < 2^n")
    return DegeneracySpectrum(
        n=n, levels=((Fraction(0), d0), (Fraction(1), N - d0)), normalized=True
    )


def gaussian_levels(n: int, M: int = 11, sigma: float = 2.0, d0: int = 1,
                    center: float | None = None) -> DegeneracySpectrum:
    """M equally spaced levels on [0, 1]; excited degeneracies follow a Gaussian
    bump over the level index, ground degeneracy pinned to d0."""
    N = 2 ** n
    if M < 2 or d0 < 1 or d0 >= N - (M - 1):
        raise InputError("inconsistent gaussian family parameters")
    if center is None:
        center = (M - 1) / 2.0
    weights = [exp(-((k - center) ** 2) / (2.0 * sigma * sigma)) for k in range(1, M)]
    total = sum(weights)
    budget = N - d0
    degs = [max(1, int(budget * w / total)) for w in weights]
    # exact budget: dump the remainder on the heaviest level
    degs[int(np.argmax(degs))] += budget - sum(degs)
    if min(degs) < 1:
        raise InputError("gaussian family degeneracies collapsed below 1")
    energies = [Fraction(k, M - 1) for k in range(M)]
    levels = tuple([(energies[0], d0)] + list(zip(energies[1:], degs)))
    return DegeneracySpectrum(n=n, levels=levels, normalized=True)


def verification_corpus(c: float = 0.02, size: int = 25) -> list[DegeneracySpectrum]:
    """Deterministic condition-satisfying corpus: Grover + Gaussian families.

    Every member passes the gap condition at the given c and has a window wide
    enough (delta_s > 2e-4) for the 1e4-point argmin grid to resolve it.
    """
    members: list[DegeneracySpectrum] = []
    members += [grover(n) for n in range(12, 19)]
    members += [grover(n, d0=2) for n in (15, 16, 17)]
    members += [grover(n, d0=4) for n in (17, 18)]
    for n, M, sigma, d0 in [
        (18, 11, 2.0, 1),
        (19, 11, 2.0, 2),
        (20, 11, 2.5, 1),
        (20, 11, 1.5, 2),
        (21, 11, 2.0, 4),
        (22, 11, 2.5, 1),
        (18, 6, 1.2, 1),
        (19, 6, 1.5, 2),
        (20, 6, 1.2, 1),
        (21, 16, 3.0, 1),
        (22, 16, 3.5, 2),
        (20, 11, 2.0, 3),
        (19, 11, 2.5, 1),
    ]:
        members.append(gaussian_levels(n, M=M, sigma=sigma, d0=d0))
    members = members[:size]
    for spec in members:
        prof = spectral_params(spec, c=c)
        if not prof.condition_ok:
            raise InputError(
                f"corpus member n={spec.n} M={spec.M} fails the gap condition "
                f"({prof.condition_value:.3e} >= {c})"
            )
        if prof.delta_s <= 2e-4:
            raise InputError(f"corpus member n={spec.n} M={spec.M} window too narrow")
    return members


def random_spectrum(rng: np.random.Generator, max_m: int = 12, max_n: int = 20,
                    denominator: int = 720720) -> DegeneracySpectrum:
    """Random normalized spectrum with exact-rational interior energies."""
    M = int(rng.integers(2, max_m + 1))
    n_lo = max(4, int(np.ceil(np.log2(M))))
    n = int(rng.integers(n_lo, max_n + 1))
    N = 2 ** n
    cuts = np.sort(rng.choice(np.arange(1, N), size=M - 1, replace=False))
    degs = np.diff(np.concatenate([[0], cuts, [N]]))
    if M > 2:
        mids = np.sort(rng.choice(np.arange(1, denominator), size=M - 2, replace=False))
        interior = [Fraction(int(m), denominator) for m in mids]
    else:
        interior = []
    energies = [Fraction(0)] + interior + [Fraction(1)]
    levels = tuple((e, int(d)) for e, d in zip(energies, degs))
    return DegeneracySpectrum(n=n, levels=levels, normalized=True)


def random_ising(rng: np.random.Generator, n: int, bound: int = 2,
                 coupling_density: float = 0.5):
    """Random bounded-integer Ising instance with at least one nonzero term."""
    from .spectrum import IsingModel

    while True:
        couplings = []
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < coupling_density:
                    J = int(rng.integers(-bound, bound + 1))
                    if J:
                        couplings.append((i, j, J))
        fields = tuple(int(rng.integers(-bound, bound + 1)) for _ in range(n))
        if couplings or any(fields):
            return IsingModel(n=n, couplings=tuple(couplings), fields=fields)
