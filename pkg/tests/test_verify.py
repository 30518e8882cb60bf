import random
from fractions import Fraction

import pytest

from koszulforms.complexes import (
    ChainMap,
    ComplexError,
    GradedMatrix,
    TwistedFreeComplex,
    TwistedFreeModule,
    cone,
    single_term_complex,
)
from koszulforms.duality import DualityDatum, dualize_complex
from koszulforms.fields import QQ, PrimeField
from koszulforms.koszul import build_even_pair, build_koszul, build_odd_pair, build_phi
from koszulforms.polynomials import HomogPoly
from koszulforms.univariate import UPoly, smith_normal_form
from koszulforms.verify import (
    acyclic_probabilistic,
    battery_duality_identities,
    graded_window_homology,
    graded_window_verdict,
    homology_univariate,
    quasi_iso_check,
    quotient_vanishing,
    random_complex,
    reproduce_witness,
    semiorth_dual_class,
    snf_exact_verdict,
    stable_window,
)

FP = PrimeField(1000003)


# -- univariate Smith normal form ------------------------------------------------


def test_smith_normal_form_of_regular_column():
    # oracle: dehomogenized contraction matrices on the chart x0 = 1 are
    # (1  x1) and (-x1; 1); both have unit elementary divisors
    one = UPoly.const(Fraction(1), QQ)
    x = UPoly.x_power(1, QQ)
    div1, rank1 = smith_normal_form([[one, x]], QQ)
    assert rank1 == 1 and div1[0].is_unit()
    div2, rank2 = smith_normal_form([[-x], [one]], QQ)
    assert rank2 == 1 and div2[0].is_unit()


def test_smith_normal_form_detects_torsion():
    x = UPoly.x_power(1, QQ)
    div, rank = smith_normal_form([[x]], QQ)
    assert rank == 1
    assert not div[0].is_unit()
    assert div[0].degree == 1


def test_smith_divisor_chain():
    x = UPoly.x_power(1, QQ)
    one = UPoly.const(Fraction(1), QQ)
    m = [[x, UPoly.zero(QQ)], [UPoly.zero(QQ), one]]
    div, rank = smith_normal_form(m, QQ)
    assert rank == 2
    assert div[0].is_unit()
    _, rem = div[1].divmod(div[0])
    assert rem.is_zero()


# -- exact chart homology -----------------------------------------------------------


def test_koszul_p1_chart_homology_vanishes():
    K = build_koszul(1, QQ).complex
    assert homology_univariate(K) == {0: {}, 1: {}}
    assert snf_exact_verdict(K).verdict == "acyclic"


def test_single_term_homology_is_term_rank():
    A = single_term_complex(1, QQ, -1, 0)
    got = homology_univariate(A)
    assert got[0] == {0: {"free_rank": 1, "torsion": []}}
    assert got[1] == {0: {"free_rank": 1, "torsion": []}}
    assert snf_exact_verdict(A).verdict == "not-acyclic"


def test_odd_pair_cone_homology_zero_on_both_charts():
    pair = build_odd_pair(1, QQ)
    C = cone(pair.psi.form)
    assert homology_univariate(C) == {0: {}, 1: {}}


def test_univariate_oracle_needs_r1():
    with pytest.raises(ComplexError):
        homology_univariate(build_koszul(2, QQ).complex)


# -- sampled rank additivity ----------------------------------------------------------


def test_probabilistic_koszul_p2_acyclic():
    K = build_koszul(2, FP).complex
    v = acyclic_probabilistic(K, trials=100, prime=1000003, seed=11)
    assert v.verdict == "acyclic"
    assert v.evidence["total_bound"] < 1e-3


def test_probabilistic_zero_differential_witness():
    A = single_term_complex(2, FP, -1, 0)
    v = acyclic_probabilistic(A, trials=5, prime=1000003, seed=1)
    assert v.verdict == "not-acyclic"
    assert v.evidence["witness"]["degree"] == 0
    assert reproduce_witness(A, v.evidence["witness"])


def test_probabilistic_contractible_cone():
    A = single_term_complex(2, FP, 0, 0)
    C = cone(ChainMap.identity(A))
    v = acyclic_probabilistic(C, trials=10, prime=1000003, seed=2)
    assert v.verdict == "acyclic"


def test_probabilistic_rejects_small_prime_by_default():
    A = single_term_complex(2, PrimeField(7), 0, 0)
    with pytest.raises(ComplexError):
        acyclic_probabilistic(A, trials=5, prime=7)
    v = acyclic_probabilistic(cone(ChainMap.identity(A)), trials=5, prime=7, allow_small_prime=True)
    assert v.verdict == "acyclic"


def test_probabilistic_field_mismatch_rejected():
    A = single_term_complex(2, PrimeField(1000003), 0, 0)
    with pytest.raises(ComplexError):
        acyclic_probabilistic(A, trials=1, prime=1048583)


def test_probabilistic_deterministic_given_seed():
    K = build_koszul(2, FP).complex
    a = acyclic_probabilistic(K, trials=5, prime=1000003, seed=3)
    b = acyclic_probabilistic(K, trials=5, prime=1000003, seed=3)
    assert a.to_json_dict() == b.to_json_dict()


# -- graded windows ---------------------------------------------------------------------


def test_graded_window_koszul_p1_true_table():
    # oracle: chart homology is zero (Smith normal form), so the only graded
    # homology is the finite-length piece at the irrelevant ideal: dimension
    # one at internal degree 0, cohomological position 0, nothing else
    K = build_koszul(1, QQ).complex
    got = graded_window_homology(K, (-3, 3))
    assert got["table"] == {0: {0: 1}}
    assert got["threshold"] == 2
    assert got["flagged"] == []


def test_graded_window_detects_unbounded_homology():
    A = single_term_complex(1, QQ, -1, 0)
    got = graded_window_homology(A, (0, 4))
    # oracle: dim of degree-d piece of O(-1) is C(d - 1 + 1, 1) = d
    assert got["table"] == {d: {0: d} for d in range(1, 5)}
    assert got["flagged"] == [(d, 0, d) for d in range(2, 5)]
    assert graded_window_verdict(A).verdict == "not-acyclic"


def test_graded_window_stable_window_clean_for_even_pair():
    pair = build_even_pair(2, FP)
    C = cone(pair.psi.form)
    v = graded_window_verdict(C)
    assert v.verdict == "acyclic"
    w = stable_window(C)
    assert w[0] == 0 + 2 + 1


def test_graded_window_empty_window_rejected():
    with pytest.raises(ComplexError):
        graded_window_homology(build_koszul(1, QQ).complex, (2, 1))


# -- combined quasi-isomorphism checks ----------------------------------------------------


def test_quasi_iso_even_pair_r2():
    pair = build_even_pair(2, FP)
    overall, verdicts = quasi_iso_check(pair.psi, trials=50, seed=5)
    assert overall == "acyclic"
    assert {v.method for v in verdicts} == {"point-probabilistic", "graded-window"}


def test_quasi_iso_undesigned_truncation_fails():
    phi = build_phi(build_koszul(2, FP), -1)
    overall, verdicts = quasi_iso_check(phi, trials=50, seed=5)
    assert overall == "not-acyclic"
    probs = [v for v in verdicts if v.method == "point-probabilistic"]
    assert probs and probs[0].evidence.get("witness")


def test_quasi_iso_identity_form_contractible():
    A = single_term_complex(1, QQ, 0, 0)
    L = DualityDatum(0, 0)
    dual = dualize_complex(A, L)
    m = GradedMatrix(A.term(0), dual.term(0), 2, {(0, 0): HomogPoly.constant(Fraction(1), 2)})
    from koszulforms.duality import SymmetricFormData

    sf = SymmetricFormData(ChainMap(A, dual, {0: m}, 0), L, 1)
    overall, _ = quasi_iso_check(sf)
    assert overall == "acyclic"


def test_snf_and_sampling_agree_on_r1_instances():
    pair = build_odd_pair(1, QQ)
    C = cone(pair.psi.form)
    assert snf_exact_verdict(C).verdict == "acyclic"
    v = acyclic_probabilistic(C, trials=20, prime=1000003, seed=9)
    assert v.verdict == "acyclic"
    B = single_term_complex(1, QQ, -2, 1)
    assert snf_exact_verdict(B).verdict == "not-acyclic"
    v2 = acyclic_probabilistic(B, trials=20, prime=1000003, seed=9)
    assert v2.verdict == "not-acyclic"


# -- identity battery ------------------------------------------------------------------------


def test_battery_default_shape_and_no_failures():
    got = battery_duality_identities(count=25, seed=2)
    assert got["grid"] == 49
    assert got["checked"] == 25 * 49
    assert got["failures"] == []
    assert all(v == got["checked"] for v in got["passes"].values())


def test_battery_spot_check_odd_shift_can_components():
    from koszulforms.duality import canonical_id

    rng = random.Random(8)
    for _ in range(20):
        A = random_complex(rng, QQ, 1)
        can = canonical_id(A, DualityDatum(rng.randint(-3, 3), 1))
        for i in A.degrees():
            assert can.component(i) == GradedMatrix.identity(
                A.term(i), A.nvars, Fraction(1)
            )


def test_battery_hand_expanded_contravariance_degree_one():
    # hand case: single-summand complexes, f and g of degree 1 each, so the
    # composite picks up (-1)^{1*1} = -1
    A = single_term_complex(1, QQ, 0, 0)
    B = single_term_complex(1, QQ, 0, 1)
    C = single_term_complex(1, QQ, 0, 2)
    f = ChainMap(A, B, {0: GradedMatrix.identity(A.term(0), 2)}, 1)
    g = ChainMap(B, C, {1: GradedMatrix.identity(B.term(1), 2)}, 1)
    L = DualityDatum(0, 0)
    from koszulforms.duality import dualize_map

    lhs = dualize_map(g.compose(f), L)
    rhs = dualize_map(f, L).compose(dualize_map(g, L)).scale(-1)
    assert lhs == rhs


# -- twist bookkeeping --------------------------------------------------------------------------


def test_semiorth_examples():
    assert semiorth_dual_class(-1, -3, r=2) == -2
    assert semiorth_dual_class(0, 0, r=2) == 0


def test_semiorth_full_sweep_r3():
    m = -4
    for k in range(-4, 1):
        assert semiorth_dual_class(k, m, r=3) == m - k


def test_quotient_vanishing_r2():
    K = build_koszul(2, QQ)
    phi = build_phi(K, -2)
    ok, ends = quotient_vanishing(phi, 2, -2)
    assert ok
    assert ends["low"] == (-3, (-3,))
    assert ends["high"] == (0, (0,))


def test_quotient_vanishing_independent_of_level_r1():
    K = build_koszul(1, QQ)
    endpoint_sets = []
    for ell in (-2, -1):
        phi = build_phi(K, ell)
        ok, ends = quotient_vanishing(phi, 1, ell)
        assert ok
        endpoint_sets.append(ends)
    assert endpoint_sets[0] == endpoint_sets[1]


def test_quotient_vanishing_rejects_planted_unit_twist():
    K = build_koszul(2, QQ)
    phi = build_phi(K, -2)
    C = cone(phi.form)
    # plant an O(0) summand in a middle degree: the twist window must flag it
    terms = dict(C.terms)
    mid = -1
    terms[mid] = terms[mid].concat(TwistedFreeModule((0,)))
    planted = TwistedFreeComplex(C.r, C.field, terms, {})

    class FakePair:
        pass

    fake = FakePair()
    fake.form = ChainMap(
        TwistedFreeComplex(C.r, C.field, {}, {}), planted, {}, 0
    )
    # quotient_vanishing only reads the cone of .form; rebuild one whose cone
    # is the planted complex: a zero map out of the empty complex has cone
    # equal to its target
    ok, _ = quotient_vanishing(fake, 2, -2)
    assert not ok
