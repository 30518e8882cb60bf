import random
from fractions import Fraction

import pytest

from koszulforms.complexes import (
    ChainMap,
    ComplexError,
    GradedMatrix,
    TwistedFreeComplex,
    TwistedFreeModule,
    single_term_complex,
    tensor_complexes,
    tensor_maps,
)
from koszulforms.duality import (
    DualityDatum,
    SymmetricFormData,
    bilinear_to_form,
    calibrate_epsilon,
    canonical_id,
    check_symmetric,
    compose_duality,
    datum_complex,
    dualize_complex,
    dualize_map,
    form_to_bilinear,
    invert_scalar_chain_map,
    pairing_iso,
    square_twist,
    tensor_form,
    transmute,
    unit_shift_form,
)
from koszulforms.fields import QQ
from koszulforms.koszul import build_koszul, build_mu, build_phi, delta_datum
from koszulforms.polynomials import HomogPoly
from koszulforms.verify import (
    random_chain_map,
    random_complex,
    random_graded_map,
    random_symmetric_form,
)


def xvar(i, nvars=2):
    return HomogPoly.variable(i, nvars, Fraction(1))


def two_term_x0():
    src = TwistedFreeModule((-1,))
    tgt = TwistedFreeModule((0,))
    d = GradedMatrix(src, tgt, 2, {(0, 0): xvar(0)})
    return TwistedFreeComplex(1, QQ, {0: src, 1: tgt}, {0: d})


# -- datum composition -------------------------------------------------------


def test_compose_duality_unit():
    assert compose_duality(DualityDatum(0, 0), DualityDatum(-3, 2)) == DualityDatum(-3, 2)


def test_compose_duality_addition():
    assert compose_duality(DualityDatum(-3, 2), DualityDatum(-3, 2)) == DualityDatum(-6, 4)


def test_compose_delta_with_shift():
    assert compose_duality(delta_datum(2), DualityDatum(0, 1)) == DualityDatum(-3, 3)


# -- dual complexes ----------------------------------------------------------


def test_dualize_single_term():
    A = single_term_complex(2, QQ, 5, 0)
    D = dualize_complex(A, DualityDatum(-1, 3))
    assert list(D.terms) == [-3]
    assert D.terms[-3].twists == (-6,)


def test_dualize_two_term_differential_sign():
    A = two_term_x0()
    D = dualize_complex(A, DualityDatum(0, 0))
    assert D.terms[-1].twists == (0,)
    assert D.terms[0].twists == (1,)
    # (d*)_{-1} = (-1)^0 transpose d_0 = +x0
    assert D.diff(-1).entry(0, 0) == xvar(0)
    assert D.validate() == []


def test_dualize_koszul_against_top_datum():
    # oracle: the exterior ranks are symmetric, C(2, j) = C(2, 2 - j)
    K = build_koszul(1, QQ).complex
    D = dualize_complex(K, delta_datum(1, 2))
    assert {i: t.rank for i, t in D.terms.items()} == {-2: 1, -1: 2, 0: 1}
    assert sorted(a for t in D.terms.values() for a in t.twists) == sorted(
        a for t in K.terms.values() for a in t.twists
    )
    assert D.validate() == []


# -- dual maps ----------------------------------------------------------------


def test_dual_of_identity_is_identity():
    A = build_koszul(1, QQ).complex
    L = DualityDatum(1, 1)
    f = ChainMap.identity(A)
    assert dualize_map(f, L) == ChainMap.identity(dualize_complex(A, L))


def test_contravariance_with_degree_signs():
    rng = random.Random(31)
    done = 0
    while done < 50:
        A = random_complex(rng, QQ, 1)
        B = random_complex(rng, QQ, 1)
        ja, jb = rng.choice((0, 1, 2)), rng.choice((0, 1, 2))
        g1 = random_graded_map(rng, A, B, ja)
        g2 = random_graded_map(rng, B, A, jb)
        if g1.is_zero() or g2.is_zero():
            continue
        L = DualityDatum(rng.randint(-3, 3), rng.randint(-3, 3))
        lhs = dualize_map(g2.compose(g1), L)
        sign = -1 if (ja * jb) % 2 else 1
        rhs = dualize_map(g1, L).compose(dualize_map(g2, L)).scale(sign)
        assert lhs == rhs
        done += 1


def test_double_dual_naturality_random():
    rng = random.Random(37)
    for _ in range(50):
        A = random_complex(rng, QQ, 1)
        B = random_complex(rng, QQ, 1)
        f = random_chain_map(rng, A, B)
        L = DualityDatum(rng.randint(-3, 3), rng.randint(-3, 3))
        lhs = dualize_map(dualize_map(f, L), L).compose(canonical_id(A, L))
        rhs = canonical_id(B, L).compose(f)
        assert lhs == rhs


# -- canonical identification --------------------------------------------------


def test_can_components_odd_shift_all_plus():
    A = build_koszul(2, QQ).complex
    can = canonical_id(A, DualityDatum(0, 3))
    for i in A.degrees():
        assert can.component(i) == GradedMatrix.identity(A.term(i), A.nvars, Fraction(1))


def test_can_components_zero_shift_alternate():
    A = build_koszul(2, QQ).complex
    can = canonical_id(A, DualityDatum(0, 0))
    for i in A.degrees():
        sign = Fraction(-1 if i % 2 else 1)
        assert can.component(i) == GradedMatrix.identity(A.term(i), A.nvars, sign)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_can_is_chain_map_on_koszul(r):
    A = build_koszul(r, QQ).complex
    can = canonical_id(A, delta_datum(r, r + 1))
    assert can.is_chain_map()


# -- symmetry checking ----------------------------------------------------------


def _collapsed_symmetry_holds(form, L, eps):
    """Independent oracle: phi_i == eps * (-1)^(i(n+1)) * transpose(phi_{-i-n})."""
    n = L.n
    idxs = set(form.components) | {-i - n for i in form.components}
    for i in idxs:
        lhs = form.component(i)
        other = form.component(-i - n)
        sign = eps * (-1 if (i * (n + 1)) % 2 else 1)
        for p in range(lhs.target.rank):
            for q in range(lhs.source.rank):
                if lhs.entry(p, q) != other.entry(q, p).scale(sign):
                    return False
    return True


def test_mu_symmetric_r1_with_collapsed_oracle():
    mu = build_mu(build_koszul(1, QQ))
    assert mu.epsilon == 1
    assert _collapsed_symmetry_holds(mu.form, mu.datum, 1)
    assert check_symmetric(mu)
    assert not _collapsed_symmetry_holds(mu.form, mu.datum, -1)


def test_zero_form_symmetric_for_both_signs():
    A = single_term_complex(1, QQ, -1, 0)
    L = DualityDatum(0, 0)
    z = ChainMap.zero(A, dualize_complex(A, L))
    assert check_symmetric(SymmetricFormData(z, L, 1))
    assert check_symmetric(SymmetricFormData(z, L, -1))
    assert calibrate_epsilon(z, L) == 1


def test_phi_symmetric_r2():
    phi = build_phi(build_koszul(2, QQ), -2)
    assert phi.epsilon == 1
    assert check_symmetric(phi)
    assert _collapsed_symmetry_holds(phi.form, phi.datum, 1)


def test_check_symmetric_rejects_shape_mismatch():
    A = single_term_complex(1, QQ, 0, 0)
    g = ChainMap.identity(A)
    with pytest.raises(ComplexError):
        check_symmetric(SymmetricFormData(g, DualityDatum(1, 0), 1))


# -- bilinear <-> form ----------------------------------------------------------


def test_multiplication_pairing_gives_identity_form():
    A = single_term_complex(1, QQ, 0, 0)
    AA = tensor_complexes(A, A)
    L = DualityDatum(0, 0)
    target = datum_complex(1, QQ, L)
    m = GradedMatrix(
        AA.term(0), target.term(0), 2, {(0, 0): HomogPoly.constant(Fraction(1), 2)}
    )
    beta = ChainMap(AA, target, {0: m}, 0)
    sf = bilinear_to_form(A, beta, L)
    assert sf.epsilon == 1
    assert sf.form.component(0).entry(0, 0) == HomogPoly.constant(Fraction(1), 2)


def _merge_sign(I, J):
    # independent inversion-count oracle for the test
    inv = sum(1 for a in I for b in J if a > b)
    return -1 if inv % 2 else 1


def test_mu_components_are_signed_complement_permutations():
    K = build_koszul(1, QQ)
    mu = build_mu(K)
    comp = mu.form.component(-1)
    basis = K.basis[-1]
    for q, I in enumerate(basis):
        for p, J in enumerate(basis):
            entry = comp.entry(p, q)
            if set(I) | set(J) == {0, 1} and not set(I) & set(J):
                assert entry == HomogPoly.constant(Fraction(_merge_sign(I, J)), 2)
            else:
                assert entry.is_zero()


def test_zero_pairing_gives_zero_form():
    A = single_term_complex(1, QQ, 0, 0)
    AA = tensor_complexes(A, A)
    L = DualityDatum(0, 0)
    beta = ChainMap.zero(AA, datum_complex(1, QQ, L))
    sf = bilinear_to_form(A, beta, L, epsilon=1)
    assert sf.form.is_zero()


def test_bilinear_round_trip():
    K = build_koszul(2, QQ)
    mu = build_mu(K)
    beta = form_to_bilinear(mu)
    back = bilinear_to_form(K.complex, beta, mu.datum, epsilon=mu.epsilon)
    assert back.form == mu.form


# -- the pairing isomorphism -----------------------------------------------------


def test_pairing_iso_unit_case_is_identity():
    M = single_term_complex(1, QQ, 0, 0)
    L0 = DualityDatum(0, 0)
    theta = pairing_iso(M, M, L0, L0)
    assert theta.component(0).entry(0, 0) == HomogPoly.constant(Fraction(1), 2)
    assert theta.is_chain_map()


def test_pairing_iso_sign_on_predicted_entry():
    # hand expansion: x in degree 1 with |x| = 1 against g of hom degree -1
    # gives (-1)^{|x||g|} = -1 on the single entry; flipping N's shift to 0
    # kills the sign
    M = single_term_complex(1, QQ, 0, 1)  # one summand in degree 1
    N = single_term_complex(1, QQ, 0, 0)
    L1 = DualityDatum(0, 0)
    L2 = DualityDatum(0, 1)
    theta = pairing_iso(M, N, L1, L2)
    (i, comp) = next(iter(theta.components.items()))
    assert comp.entry(0, 0) == HomogPoly.constant(Fraction(-1), 2)
    theta2 = pairing_iso(M, N, L1, DualityDatum(0, 0))
    (i2, comp2) = next(iter(theta2.components.items()))
    assert comp2.entry(0, 0) == HomogPoly.constant(Fraction(1), 2)


def test_pairing_iso_is_chain_iso_and_natural():
    rng = random.Random(41)
    done = 0
    while done < 50:
        M = random_complex(rng, QQ, 1)
        N = random_complex(rng, QQ, 1)
        if M.total_rank() * N.total_rank() > 12 or M.is_empty() or N.is_empty():
            continue
        L1 = DualityDatum(rng.randint(-2, 2), rng.randint(-2, 2))
        L2 = DualityDatum(rng.randint(-2, 2), rng.randint(-2, 2))
        theta = pairing_iso(M, N, L1, L2)
        assert theta.is_chain_map()
        inv = invert_scalar_chain_map(theta)
        assert inv.compose(theta) == ChainMap.identity(theta.source)
        assert theta.compose(inv) == ChainMap.identity(theta.target)
        # naturality in the first slot: theta o (f* @ id) = (f @ id)* o theta'
        Mp = random_complex(rng, QQ, 1)
        if Mp.total_rank() * N.total_rank() > 12 or Mp.is_empty():
            continue
        f = random_chain_map(rng, M, Mp)
        theta_p = pairing_iso(Mp, N, L1, L2)
        f_dual = dualize_map(f, L1)
        lhs = theta.compose(
            tensor_maps(f_dual, ChainMap.identity(dualize_complex(N, L2)))
        )
        fg = tensor_maps(f, ChainMap.identity(N))
        fg = ChainMap(tensor_complexes(M, N), tensor_complexes(Mp, N), fg.components, 0)
        L12 = compose_duality(L1, L2)
        rhs = dualize_map(fg, L12).compose(theta_p)
        assert lhs == rhs
        done += 1


# -- form tensoring, transmutation, square twist ---------------------------------


def test_tensor_form_unit_acts_trivially():
    mu = build_mu(build_koszul(1, QQ))
    unit = unit_shift_form(1, QQ, 0)
    prod = tensor_form(unit, mu)
    # O[0] @ K has the same summand order as K; components must agree entrywise
    assert prod.epsilon == mu.epsilon
    for i in set(prod.form.components) | set(mu.form.components):
        assert prod.form.component(i).entries == mu.form.component(i).entries


def test_tensor_rank_one_forms_multiply_coefficients():
    def rank_one(c, a):
        A = single_term_complex(1, QQ, a, 0)
        L = DualityDatum(2 * a, 0)
        dual = dualize_complex(A, L)
        m = GradedMatrix(
            A.term(0), dual.term(0), 2, {(0, 0): HomogPoly.constant(c, 2)}
        )
        return SymmetricFormData(ChainMap(A, dual, {0: m}, 0), L, 1)

    f1 = rank_one(Fraction(3), 1)
    f2 = rank_one(Fraction(-5, 2), -2)
    prod = tensor_form(f1, f2)
    assert check_symmetric(prod)
    assert prod.form.component(0).entry(0, 0) == HomogPoly.constant(Fraction(-15, 2), 2)


def test_tensor_form_random_pairs_symmetric():
    rng = random.Random(43)
    for _ in range(100):
        L1 = DualityDatum(rng.randint(-2, 2), rng.randint(-2, 2))
        L2 = DualityDatum(rng.randint(-2, 2), rng.randint(-2, 2))
        e1, e2 = rng.choice((1, -1)), rng.choice((1, -1))
        sf1 = random_symmetric_form(rng, QQ, 1, L1, e1)
        sf2 = random_symmetric_form(rng, QQ, 1, L2, e2)
        prod = tensor_form(sf1, sf2)
        assert prod.epsilon == e1 * e2
        assert check_symmetric(prod)


def test_transmute_zero_is_identity():
    mu = build_mu(build_koszul(1, QQ))
    assert transmute(mu, 0) is mu


def test_shift_unit_form_is_skew():
    # the multiplication pairing on O[1] changes sign under the switch
    unit = unit_shift_form(1, QQ, 1)
    assert unit.epsilon == -1
    assert check_symmetric(unit)


def test_transmute_flips_sign_and_shifts_datum():
    mu = build_mu(build_koszul(1, QQ))
    out = transmute(mu, -1)
    assert out.datum == DualityDatum(-2, 0)
    assert out.epsilon == -1
    assert check_symmetric(out)


def test_transmute_matches_collapsed_component_formula():
    # oracle: psi_j = (-1)^(i(i+j)) phi_(i+j) for the tensor route
    mu = build_mu(build_koszul(2, QQ))
    for i in (-2, -1, 1, 2):
        out = transmute(mu, i)
        assert out.epsilon == mu.epsilon * (-1 if i % 2 else 1)
        assert check_symmetric(out)
        for j in set(out.form.components):
            comp = out.form.component(j)
            sign = -1 if (i * (i + j)) % 2 else 1
            want = mu.form.component(j + i)
            for (p, q), poly in comp.entries.items():
                assert poly == want.entry(p, q).scale(sign)


def test_square_twist_examples():
    mu = build_mu(build_koszul(1, QQ))
    out = square_twist(mu, DualityDatum(1, 0))
    assert out.datum == DualityDatum(0, 2)
    assert out.epsilon == mu.epsilon
    assert check_symmetric(out)
    # odd-parity twist move: (m, n) with m odd lands on (m + 2i, n)
    out2 = square_twist(mu, DualityDatum(-3, 0))
    assert out2.datum == DualityDatum(-8, 2)
    assert check_symmetric(out2)


def test_square_twist_on_complex():
    K = build_koszul(1, QQ).complex
    T = square_twist(K, DualityDatum(2, 1))
    assert T.twist_support() == {a + 2 for a in K.twist_support()}
