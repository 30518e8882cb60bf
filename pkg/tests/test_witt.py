import itertools
import random

import pytest

from koszulforms import linalg
from koszulforms.fields import QQ, PrimeField
from koszulforms.koszul import middle_split_trivial, wedge_gram_nu
from koszulforms.witt import (
    EpsForm,
    FormError,
    Subspace,
    diagonalize,
    find_lagrangian,
    is_lagrangian,
    max_isotropic_dim_bruteforce,
    split_sequence,
    symplectic_basis,
    witt_index_fp,
)


def q(n, d=1):
    from fractions import Fraction

    return Fraction(n, d)


def qmat(rows):
    return [[q(v) for v in row] for row in rows]


def fmat(rows, field):
    return [[field.from_int(v) for v in row] for row in rows]


HYPERBOLIC_Q = lambda: EpsForm(qmat([[0, 1], [1, 0]]), 1, QQ)


def test_eps_form_validates_transpose():
    with pytest.raises(FormError):
        EpsForm(qmat([[0, 1], [2, 0]]), 1, QQ)
    with pytest.raises(FormError):
        EpsForm(qmat([[1, 0], [0, 1]]), -1, QQ)
    EpsForm(qmat([[0, 1], [-1, 0]]), -1, QQ)


# -- Lagrangian certification ---------------------------------------------------


def test_hyperbolic_plane_has_axis_lagrangian():
    W = Subspace(qmat([[1], [0]]))
    assert is_lagrangian(HYPERBOLIC_Q(), W)


def test_anisotropic_plane_f3_has_no_lagrangian_line():
    # oracle: enumerate the four lines of F_3^2
    f3 = PrimeField(3)
    form = EpsForm(fmat([[1, 0], [0, 1]], f3), 1, f3)
    reps = [[1, 0], [0, 1], [1, 1], [1, 2]]
    for rep in reps:
        W = Subspace([[f3.from_int(rep[0])], [f3.from_int(rep[1])]])
        assert not is_lagrangian(form, W)


def test_wedge_r3_index_zero_span_is_lagrangian():
    nu = wedge_gram_nu(3, QQ)
    split = middle_split_trivial(3, QQ)
    assert is_lagrangian(nu, Subspace(split.p_basis))


def test_lagrangian_odd_dimension_rejected():
    form = EpsForm(qmat([[1]]), 1, QQ)
    with pytest.raises(FormError):
        is_lagrangian(form, Subspace(qmat([[1]])))


def test_lagrangian_degenerate_rejected():
    form = EpsForm(qmat([[0, 0], [0, 0]]), 1, QQ)
    with pytest.raises(FormError):
        is_lagrangian(form, Subspace(qmat([[1], [0]])))


# -- symplectic reduction ---------------------------------------------------------


def test_symplectic_standard_block_fixed():
    form = EpsForm(qmat([[0, 1], [-1, 0]]), -1, QQ)
    B = symplectic_basis(form)
    assert B == linalg.identity(2, QQ)


def test_symplectic_rescales():
    form = EpsForm(qmat([[0, 2], [-2, 0]]), -1, QQ)
    B = symplectic_basis(form)
    got = linalg.mat_mul(linalg.mat_mul(linalg.transpose(B), form.gram, QQ), B, QQ)
    assert got == qmat([[0, 1], [-1, 0]])


def test_symplectic_random_4x4_f7():
    f7 = PrimeField(7)
    rng = random.Random(17)
    for _ in range(10):
        while True:
            g = [[f7.zero()] * 4 for _ in range(4)]
            for i in range(4):
                for j in range(i + 1, 4):
                    v = f7.random(rng)
                    g[i][j] = v
                    g[j][i] = -v
            form = EpsForm(g, -1, f7)
            if form.is_nondegenerate():
                break
        B = symplectic_basis(form)
        got = linalg.mat_mul(linalg.mat_mul(linalg.transpose(B), g, f7), B, f7)
        want = linalg.zeros(4, 4, f7)
        want[0][1] = f7.one()
        want[1][0] = -f7.one()
        want[2][3] = f7.one()
        want[3][2] = -f7.one()
        assert linalg.mat_eq(got, want)


def test_symplectic_rejects_degenerate_and_symmetric():
    with pytest.raises(FormError):
        symplectic_basis(EpsForm(qmat([[0, 0], [0, 0]]), -1, QQ))
    with pytest.raises(FormError):
        symplectic_basis(HYPERBOLIC_Q())


# -- diagonalization ---------------------------------------------------------------


def test_diagonalize_hyperbolic_plane():
    form = HYPERBOLIC_Q()
    B = diagonalize(form)
    got = linalg.mat_mul(linalg.mat_mul(linalg.transpose(B), form.gram, QQ), B, QQ)
    # oracle via explicit congruence: (e0 + e1, e0 - e1) has Gram diag(2, -2),
    # which matches diag(2, -1/2) up to squares; either way the rank-2
    # diagonal has entries of opposite sign
    assert got[0][1] == 0 and got[1][0] == 0
    assert got[0][0] * got[1][1] < 0


def test_diagonalize_fixes_diagonal_input():
    form = EpsForm(qmat([[3, 0], [0, -5]]), 1, QQ)
    assert diagonalize(form) == linalg.identity(2, QQ)


def test_diagonalize_preserves_rank_with_zeros():
    form = EpsForm(qmat([[1, 1], [1, 1]]), 1, QQ)
    B = diagonalize(form)
    got = linalg.mat_mul(linalg.mat_mul(linalg.transpose(B), form.gram, QQ), B, QQ)
    diag = [got[i][i] for i in range(2)]
    assert got[0][1] == 0 and got[1][0] == 0
    assert sum(1 for d in diag if not d) == 1
    assert linalg.rank(got, QQ) == 1


# -- Witt index over prime fields ----------------------------------------------------


def test_witt_index_hyperbolic_f3():
    f3 = PrimeField(3)
    form = EpsForm(fmat([[0, 1], [1, 0]], f3), 1, f3)
    assert witt_index_fp(form) == 1


def test_witt_index_unit_diag():
    # -1 is not a square mod 3; 1^2 + 2^2 = 0 mod 5 (oracles: enumerate the
    # 8 and 24 nonzero vectors)
    for p, want in ((3, 0), (5, 1)):
        fp = PrimeField(p)
        form = EpsForm(fmat([[1, 0], [0, 1]], fp), 1, fp)
        assert witt_index_fp(form) == want
        iso = [
            v
            for v in itertools.product(range(p), repeat=2)
            if any(v) and (v[0] ** 2 + v[1] ** 2) % p == 0
        ]
        assert (len(iso) > 0) == (want == 1)


def test_witt_index_skew_is_half_dimension():
    f5 = PrimeField(5)
    form = EpsForm(fmat([[0, 2], [-2, 0]], f5), -1, f5)
    assert witt_index_fp(form) == 1
    g = [[f5.zero()] * 4 for _ in range(4)]
    g[0][1], g[1][0] = f5.from_int(1), f5.from_int(-1)
    g[2][3], g[3][2] = f5.from_int(3), f5.from_int(-3)
    assert witt_index_fp(EpsForm(g, -1, f5)) == 2


def test_witt_index_rejects_rationals_and_degenerate():
    with pytest.raises(FormError):
        witt_index_fp(HYPERBOLIC_Q())
    f3 = PrimeField(3)
    with pytest.raises(FormError):
        witt_index_fp(EpsForm(fmat([[0, 0], [0, 0]], f3), 1, f3))


def test_witt_index_dimension_bound():
    f3 = PrimeField(3)
    g = fmat([[1 if i == j else 0 for j in range(13)] for i in range(13)], f3)
    with pytest.raises(FormError):
        witt_index_fp(EpsForm(g, 1, f3))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_witt_index_matches_bruteforce(p):
    fp = PrimeField(p)
    rng = random.Random(100 + p)
    for dim in (2, 3, 4):
        done = 0
        while done < 4:
            g = [[fp.zero()] * dim for _ in range(dim)]
            for i in range(dim):
                g[i][i] = fp.random(rng)
                for j in range(i + 1, dim):
                    v = fp.random(rng)
                    g[i][j] = v
                    g[j][i] = v
            form = EpsForm(g, 1, fp)
            if not form.is_nondegenerate():
                continue
            assert witt_index_fp(form, seed=5) == max_isotropic_dim_bruteforce(form)
            done += 1


# -- split sequences -------------------------------------------------------------------


def test_split_sequence_hyperbolic_plane():
    form = HYPERBOLIC_Q()
    W = Subspace(qmat([[1], [0]]))
    seq = split_sequence(form, W)
    assert linalg.mat_mul(seq.pr, seq.iota, QQ) == linalg.identity(1, QQ)
    q1 = linalg.mat_mul(seq.iota, seq.pr, QQ)
    q2 = linalg.mat_mul(seq.section, seq.surjection, QQ)
    assert linalg.mat_eq(linalg.mat_add(q1, q2), linalg.identity(2, QQ))


def test_split_sequence_wedge_r3():
    nu = wedge_gram_nu(3, QQ)
    split = middle_split_trivial(3, QQ)
    seq = split_sequence(nu, Subspace(split.p_basis))
    q1 = linalg.mat_mul(seq.iota, seq.pr, QQ)
    q2 = linalg.mat_mul(seq.section, seq.surjection, QQ)
    assert linalg.mat_eq(linalg.mat_add(q1, q2), linalg.identity(6, QQ))


def test_split_sequence_random_symmetric_f7():
    f7 = PrimeField(7)
    rng = random.Random(23)
    done = 0
    while done < 5:
        g = [[f7.zero()] * 4 for _ in range(4)]
        for i in range(4):
            g[i][i] = f7.random(rng)
            for j in range(i + 1, 4):
                v = f7.random(rng)
                g[i][j] = v
                g[j][i] = v
        form = EpsForm(g, 1, f7)
        if not form.is_nondegenerate() or witt_index_fp(form, seed=1) != 2:
            continue
        W = Subspace(find_lagrangian(form, seed=1))
        seq = split_sequence(form, W)
        q1 = linalg.mat_mul(seq.iota, seq.pr, f7)
        q2 = linalg.mat_mul(seq.section, seq.surjection, f7)
        assert linalg.mat_eq(linalg.mat_add(q1, q2), linalg.identity(4, f7))
        done += 1


def test_split_sequence_rejects_non_lagrangian():
    form = EpsForm(qmat([[1, 0], [0, 1]]), 1, QQ)
    with pytest.raises(FormError):
        split_sequence(form, Subspace(qmat([[1], [0]])))


def test_find_lagrangian_skew_over_q():
    form = EpsForm(qmat([[0, 3], [-3, 0]]), -1, QQ)
    W = Subspace(find_lagrangian(form))
    assert is_lagrangian(form, W)


def test_find_lagrangian_symmetric_over_q_needs_explicit_basis():
    with pytest.raises(FormError):
        find_lagrangian(HYPERBOLIC_Q())
