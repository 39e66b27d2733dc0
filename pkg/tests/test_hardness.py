import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aqolab.corpus import random_ising
from aqolab.errors import (
    DecodeFailureError,
    InputError,
    PreconditionError,
    PrecisionInsufficientError,
)
from aqolab.hardness import (
    A1Oracle,
    SatInstance,
    a1_of_levels,
    couple_ancilla_plus,
    disambiguate,
    disambiguation_threshold,
    extract_degeneracies,
    extract_degeneracies_noisy,
    extraction_eps_budget,
    extraction_margins,
    f_of_x,
    iqp_amplitude,
    probabilistic_extraction,
    sat_gadget,
    shifted_levels,
)
from aqolab.rationalpoly import (
    berlekamp_welch,
    lagrange_interpolate,
    poly_eval,
    poly_trim,
)
from aqolab.spectrum import DegeneracySpectrum, enumerate_ising

LEVELS_242 = ((F(0), 2), (F(1), 4), (F(2), 2))  # n = 3 workhorse spectrum


# ---------------------------------------------------------------------------
# ancilla transforms
# ---------------------------------------------------------------------------


def test_couple_merges_zero_level():
    spec = DegeneracySpectrum(n=2, levels=((F(0), 1), (F(1), 3)), normalized=True)
    assert couple_ancilla_plus(spec).levels == ((F(0), 5), (F(1), 3))


def test_couple_adds_zero_level():
    spec = DegeneracySpectrum(n=2, levels=((F(1, 4), 2), (F(1), 2)), normalized=True)
    assert couple_ancilla_plus(spec).levels == ((F(0), 4), (F(1, 4), 2), (F(1), 2))


@given(st.integers(0, 2 ** 32 - 1))
def test_transform_identity_zero_ground(seed):
    # A1(H) = 2 A1(H') exactly whenever E_0 = 0
    rng = np.random.default_rng(seed)
    from aqolab.corpus import random_spectrum

    spec = random_spectrum(rng, max_m=6, max_n=10)
    coupled = couple_ancilla_plus(spec)
    assert a1_of_levels(spec.levels, spec.n) == 2 * a1_of_levels(coupled.levels, coupled.n)


def test_shifted_levels_structure():
    levels = shifted_levels(LEVELS_242, 3, F(1))
    assert levels == (
        (F(-1, 2), 2), (F(0), 2), (F(1, 2), 4), (F(1), 4), (F(3, 2), 2), (F(2), 2),
    )
    assert sum(d for _, d in levels) == 2 ** 4


# ---------------------------------------------------------------------------
# two-call disambiguation
# ---------------------------------------------------------------------------


def test_zero_case_exact():
    spec = DegeneracySpectrum(
        n=4, levels=((F(0), 1), (F(1, 2), 5), (F(1), 10)), normalized=True
    )
    oracle = A1Oracle.from_spectrum(spec)
    assert disambiguate(oracle, F(1, 2), F(1, 2), d0_bound=1) == "zero"
    assert oracle.calls == 2


def test_bounded_case_exact():
    n = 4
    spec = DegeneracySpectrum(
        n=n, levels=((F(1, 2), 1), (F(1), 2 ** n - 1)), normalized=True
    )
    # direct evaluation on both spectra: difference is (N - 3)/N
    d = a1_of_levels(spec.levels, n) - 2 * a1_of_levels(
        couple_ancilla_plus(spec).levels, n + 1
    )
    assert d == F(2 ** n - 3, 2 ** n)
    assert disambiguate(A1Oracle.from_spectrum(spec), F(1, 2), F(1, 2), 1) == "bounded-away"


def test_noisy_disambiguation_all_corners():
    n = 4
    zero_spec = DegeneracySpectrum(
        n=n, levels=((F(0), 1), (F(1, 2), 5), (F(1), 10)), normalized=True
    )
    away_spec = DegeneracySpectrum(
        n=n, levels=((F(1, 2), 1), (F(1), 2 ** n - 1)), normalized=True
    )
    threshold = disambiguation_threshold(n, F(1, 2), F(1, 2), 1)
    eps = threshold * F(99, 100)
    for spec, expected in ((zero_spec, "zero"), (away_spec, "bounded-away")):
        for signs in itertools.product((1, -1), repeat=2):
            seq = [eps * s for s in signs]
            oracle = A1Oracle.from_spectrum(
                spec, mode="noisy", eps=eps, perturb=lambda i, seq=seq: seq[i]
            )
            assert disambiguate(oracle, F(1, 2), F(1, 2), 1) == expected


def test_refuses_above_threshold():
    spec = DegeneracySpectrum(
        n=4, levels=((F(1, 2), 1), (F(1), 15)), normalized=True
    )
    threshold = disambiguation_threshold(4, F(1, 2), F(1, 2), 1)
    oracle = A1Oracle.from_spectrum(spec, mode="noisy", eps=threshold * 2)
    with pytest.raises(PrecisionInsufficientError):
        disambiguate(oracle, F(1, 2), F(1, 2), 1)


# ---------------------------------------------------------------------------
# clause gadget
# ---------------------------------------------------------------------------


def test_clause_values():
    inst = SatInstance(n=3, clauses=((1, 2, 3),))
    g = sat_gadget(inst)
    assert g.clause_min_over_aux(0, 0b111) == 3
    assert g.clause_min_over_aux(0, 0b000) == 4
    assert g.clause_value(0, 0b000) == 4          # auxiliary off
    assert max(g.clause_value(0, z) for z in range(16)) <= 6


def test_clause_min_exhaustive():
    inst = SatInstance(n=3, clauses=((1, -2, 3),))
    g = sat_gadget(inst)
    for z in range(8):
        sat = inst._clause_true((1, -2, 3), z)
        assert g.clause_min_over_aux(0, z) == (3 if sat else 4)


def test_unsat_floor():
    gadget = sat_gadget(SatInstance(n=1, clauses=((1, 1, 1), (-1, -1, -1))))
    assert gadget.min_energy() >= F(1, 12)
    spec = gadget.spectrum()
    assert spec.levels[0][0] == gadget.min_energy()
    assert F(0) <= spec.levels[0][0] and spec.levels[-1][0] <= F(1)


def test_sat_reaches_zero():
    gadget = sat_gadget(SatInstance(n=2, clauses=((1, 2, 2), (-1, 2, 2))))
    assert gadget.min_energy() == 0
    assert gadget.spectrum().levels[0][0] == 0


def test_gadget_ceiling():
    from aqolab.errors import SizeError

    with pytest.raises(SizeError):
        sat_gadget(SatInstance(n=5, clauses=((1, 2, 3),) * 3))


def test_dimacs_reader():
    text = """c comment
p cnf 3 2
1 2 3 0
-1 -2 3 0
"""
    inst = SatInstance.from_dimacs(text)
    assert inst.n == 3 and inst.clauses == ((1, 2, 3), (-1, -2, 3))
    with pytest.raises(InputError):
        SatInstance.from_dimacs("p cnf 2 1\n1 2 0\n")


# ---------------------------------------------------------------------------
# extraction, exact
# ---------------------------------------------------------------------------


def test_f_of_x_worked_example():
    oracle = A1Oracle(n=3, levels=LEVELS_242)
    assert f_of_x(oracle, F(1)) == F(14, 15)
    # large-x decay and the single-level closed form
    assert f_of_x(A1Oracle(n=3, levels=LEVELS_242), F(10 ** 9)) < F(1, 10 ** 8)
    single = A1Oracle(n=3, levels=((F(0), 8),))
    assert f_of_x(single, F(5)) == F(2, 5)


def test_f_requires_positive_x():
    with pytest.raises(PreconditionError):
        f_of_x(A1Oracle(n=3, levels=LEVELS_242), F(0))


def test_extraction_worked_chain():
    transcript = extract_degeneracies(A1Oracle(n=3, levels=LEVELS_242), 3, (0, 1, 2))
    coeffs = list(transcript.coefficients)
    assert poly_eval(coeffs, F(1)) == F(7, 4)
    assert poly_eval(coeffs, F(0)) == F(1, 2)
    assert transcript.degeneracies == (2, 4, 2)
    assert transcript.margins == (F(0),) * 3


def test_extraction_grover():
    levels = ((F(0), 1), (F(1), 15))
    transcript = extract_degeneracies(A1Oracle(n=4, levels=levels), 4, (0, 1))
    assert transcript.degeneracies == (1, 15)


def test_extraction_single_level():
    transcript = extract_degeneracies(A1Oracle(n=3, levels=((F(0), 8),)), 3, (0,))
    assert transcript.degeneracies == (8,)
    assert len(transcript.coefficients) <= 1


def test_extraction_round_trip_ising(rng):
    for _ in range(6):
        model = random_ising(rng, 8)
        spec = enumerate_ising(model)
        e0 = spec.levels[0][0]
        gaps = tuple(int(e - e0) for e, _ in spec.levels)
        transcript = extract_degeneracies(A1Oracle.from_spectrum(spec), spec.n, gaps)
        assert transcript.degeneracies == tuple(d for _, d in spec.levels)
        assert sum(transcript.degeneracies) == 2 ** spec.n


def test_transcript_json_round_trip_strings():
    import json

    t = extract_degeneracies(A1Oracle(n=3, levels=LEVELS_242), 3, (0, 1, 2))
    obj = json.loads(t.to_json())
    assert obj["degeneracies"] == [2, 4, 2]
    assert obj["samples"][0] == ["1/1", "14/15"]


# ---------------------------------------------------------------------------
# extraction, noisy
# ---------------------------------------------------------------------------


def test_eps_budget_value():
    assert extraction_eps_budget(3, (0, 1, 2)) == F(1, 7560)


def test_noisy_extraction_adversarial_corners():
    eps_max = extraction_eps_budget(3, (0, 1, 2))
    eps = eps_max / 10
    # corner assignments: base call error and one error per shifted call
    for signs in itertools.product((1, -1), repeat=4):
        seq = [eps * s for s in signs]
        oracle = A1Oracle(
            n=3, levels=LEVELS_242, mode="noisy", eps=eps,
            perturb=lambda i, seq=seq: seq[i],
        )
        t = extract_degeneracies_noisy(oracle, 3, (0, 1, 2))
        assert t.degeneracies == (2, 4, 2)
        assert all(m < F(1, 2) for m in t.margins)
        assert all(off <= m for off, m in zip(t.rounding_offsets, t.margins))


def test_margins_never_violated_by_corners():
    # exhaustive +-eps corners stay within the published interval bounds
    gaps = (0, 1, 3)
    n = 3
    levels = ((F(0), 2), (F(1), 2), (F(3), 4))
    eps = extraction_eps_budget(n, gaps) / 3
    margins = extraction_margins(n, gaps, eps)
    true_degs = (2, 2, 4)
    for signs in itertools.product((1, -1), repeat=4):
        seq = [eps * s for s in signs]
        oracle = A1Oracle(
            n=n, levels=levels, mode="noisy", eps=eps,
            perturb=lambda i, seq=seq: seq[i],
        )
        t = extract_degeneracies_noisy(oracle, n, gaps)
        for real, claimed, margin in zip(t.degeneracies, true_degs, margins):
            assert real == claimed
        for off, margin in zip(t.rounding_offsets, margins):
            assert off <= margin


def test_zero_eps_noisy_equals_exact():
    exact = extract_degeneracies(A1Oracle(n=3, levels=LEVELS_242), 3, (0, 1, 2))
    noisy = extract_degeneracies_noisy(
        A1Oracle(n=3, levels=LEVELS_242, mode="noisy", eps=F(0)), 3, (0, 1, 2)
    )
    assert noisy.degeneracies == exact.degeneracies
    assert noisy.coefficients == exact.coefficients


def test_noisy_budget_exceeded():
    eps_max = extraction_eps_budget(3, (0, 1, 2))
    oracle = A1Oracle(n=3, levels=LEVELS_242, mode="noisy", eps=10 * eps_max)
    with pytest.raises(PrecisionInsufficientError) as err:
        extract_degeneracies_noisy(oracle, 3, (0, 1, 2))
    assert err.value.required_eps is not None


# ---------------------------------------------------------------------------
# error-tolerant decoding
# ---------------------------------------------------------------------------


def test_single_corruption_recovered():
    pts = [(F(1), F(1)), (F(2), F(2)), (F(3), F(3)), (F(4), F(10)), (F(5), F(5))]
    dec = berlekamp_welch(pts, 1, 1)
    assert dec.coefficients == (F(0), F(1))
    assert dec.error_locations == (3,)


def test_zero_corruptions_match_plain_interpolation():
    pts = [(F(i), F(3) * i ** 2 - 2) for i in range(1, 8)]
    clean = poly_trim(lagrange_interpolate(pts))
    dec = berlekamp_welch(pts, 2, 2)
    assert list(dec.coefficients) == clean
    assert dec.error_locations == ()


@given(st.integers(0, 2 ** 32 - 1))
def test_bw_seeded_recovery(seed):
    rng = np.random.default_rng(seed)
    M = int(rng.integers(2, 6))
    k = 2 * M + 3
    t_max = (k - M) // 2 - 1
    coeffs = [F(int(rng.integers(-9, 10)), int(rng.integers(1, 5))) for _ in range(M)]
    coeffs = poly_trim(coeffs)
    xs = [F(2 * i + 1) for i in range(k)]
    ys = [poly_eval(coeffs, x) for x in xs]
    t = int(rng.integers(0, t_max + 1))
    for i in rng.choice(k, size=t, replace=False):
        ys[i] += F(int(rng.integers(1, 50)), 3)
    dec = berlekamp_welch(list(zip(xs, ys)), M - 1, t_max)
    assert list(dec.coefficients) == coeffs
    assert len(dec.error_locations) == t


def test_bw_detects_overload():
    # four corruptions against a budget of two cannot decode consistently
    xs = [F(i) for i in range(1, 10)]
    ys = [x + (F(7) if i < 4 else 0) for i, x in enumerate(xs)]
    with pytest.raises((DecodeFailureError, PreconditionError)):
        dec = berlekamp_welch(list(zip(xs, ys)), 1, 2)
        if list(dec.coefficients) != [F(0), F(1)]:
            raise DecodeFailureError("decoded the corrupted branch")


def test_extraction_transcript_through_bw():
    # corrupt 2 of 9 samples of the M = 3 pipeline, decode, recover
    gaps = (0, 1, 2)
    oracle = A1Oracle(n=3, levels=LEVELS_242)
    base = oracle.a1_base()
    xs = [F(2 * i + 1) for i in range(9)]
    from aqolab.hardness import _sample_weight

    pts = []
    for i, x in enumerate(xs):
        y = _sample_weight(gaps, x) * f_of_x(oracle, x, base_value=base)
        if i in (2, 6):
            y += F(5, 3)
        pts.append((x, y))
    dec = berlekamp_welch(pts, 2, 3)
    from aqolab.hardness import _degeneracies_from_poly

    degs = _degeneracies_from_poly(dec.coefficients, 3, gaps)
    assert degs == [2, 4, 2]
    assert set(dec.error_locations) == {2, 6}


# ---------------------------------------------------------------------------
# probabilistic pipeline
# ---------------------------------------------------------------------------


def test_probabilistic_q1_matches_exact():
    oracle = A1Oracle(n=3, levels=LEVELS_242, mode="prob", q=1.0, seed=5)
    t = probabilistic_extraction(oracle, 3, (0, 1, 2), 24)
    assert t.degeneracies == (2, 4, 2)
    assert t.error_locations == ()


def test_probabilistic_seeded_recovery():
    oracle = A1Oracle(n=3, levels=LEVELS_242, mode="prob", q=0.75, seed=0)
    t = probabilistic_extraction(oracle, 3, (0, 1, 2), 24)
    assert t.degeneracies == (2, 4, 2)
    assert t.decode == "berlekamp-welch"
    assert t.success_probability == pytest.approx(1 - np.exp(-1.0))
    assert len(t.error_locations) > 0


def test_probabilistic_below_majority_fails():
    # q = 1/4 floods the samples with junk; decoding must refuse, not guess
    with pytest.raises(DecodeFailureError):
        probabilistic_extraction(
            A1Oracle(n=3, levels=LEVELS_242, mode="prob", q=0.25, seed=3), 3, (0, 1, 2), 24
        )


def test_probabilistic_needs_enough_samples():
    with pytest.raises(PreconditionError):
        probabilistic_extraction(
            A1Oracle(n=3, levels=LEVELS_242, mode="prob", q=0.75, seed=0), 3, (0, 1, 2), 8
        )


# ---------------------------------------------------------------------------
# commuting-circuit amplitude
# ---------------------------------------------------------------------------


def test_iqp_values():
    assert iqp_amplitude(((F(0), 8),)) == pytest.approx(1.0)
    assert iqp_amplitude(((F(0), 4), (F(3), 4))) == pytest.approx(
        0.005003751699777271, rel=1e-12
    )
    spec = DegeneracySpectrum(n=3, levels=LEVELS_242, normalized=False)
    assert iqp_amplitude(spec) == pytest.approx(0.5931327983656771, rel=1e-12)


def test_iqp_phase_prefactor_option():
    spec = DegeneracySpectrum(n=3, levels=LEVELS_242, normalized=False)
    direct = abs(
        (2 + 4 * np.exp(1j * np.pi / 8) + 2 * np.exp(2j * np.pi / 8)) / 8
    ) ** 2
    assert iqp_amplitude(spec, phase=np.pi / 8) == pytest.approx(direct, rel=1e-12)


def test_iqp_requires_integer_gaps():
    spec = DegeneracySpectrum(n=2, levels=((F(0), 1), (F(1, 2), 3)), normalized=True)
    with pytest.raises(PreconditionError):
        iqp_amplitude(spec)
