"""The Koszul complex on P^r, its wedge self-duality, and the half-complex
symmetric pairs for both parities of r.

The complex K has K_{-i} = O(-i)^C(r+1, i) in cohomological degree -i with
basis e_I indexed by i-element subsets I of {0..r}, and contraction
differential

    d(e_I) = sum_k (-1)^{pos(i_k, I)} x_{i_k} e_{I \\ i_k}

(0-based position sign).  Pairing against the top exterior power makes K
self-dual over O(-r-1)[r+1]; truncating at level ell and pairing x, y
through d(x) ^ y gives a skew pairing that transmutes (shift by -1) into a
symmetric form over O(-r-1)[r].  For even r the truncation at -s-1 is half
of K; for odd r the middle term is split by a Lagrangian of the wedge form
and the half-complex is surgically completed so that its cone is K (plus a
split acyclic piece when extra metabolic summands are injected).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import linalg
from .complexes import (
    ChainMap,
    ComplexError,
    GradedMatrix,
    TwistedFreeComplex,
    TwistedFreeModule,
    tensor_complexes,
    tensor_summand_order,
)
from .duality import (
    DualityDatum,
    SymmetricFormData,
    bilinear_to_form,
    calibrate_epsilon,
    datum_complex,
    dualize_complex,
    transmute,
)
from .polynomials import HomogPoly
from .witt import EpsForm, Subspace, split_sequence


def ext_basis(r, k):
    """The size-k subsets of {0..r} in lexicographic order."""
    return [tuple(c) for c in itertools.combinations(range(r + 1), k)]


def wedge_multiply(I, J):
    """e_I ^ e_J: None if the subsets meet, else (merge sign, union)."""
    if set(I) & set(J):
        return None
    inversions = sum(1 for a in I for b in J if a > b)
    sign = -1 if inversions % 2 else 1
    return sign, tuple(sorted(I + J))


def wedge_sign(I, J, full):
    """Coefficient of the top basis vector in e_I ^ e_J, 0 unless J = I^c."""
    w = wedge_multiply(I, J)
    if w is None or w[1] != full:
        return 0
    return w[0]


def _subset_label(I):
    return "e{%s}" % ",".join(str(i) for i in I)


@dataclass
class KoszulData:
    r: int
    field: object
    complex: TwistedFreeComplex
    basis: dict  # degree -> tuple of index subsets

    @property
    def s(self):
        return (self.r + 1) // 2 if self.r % 2 else self.r // 2


def build_koszul(r, field):
    """The contraction complex of (x_0, ..., x_r) on P^r."""
    if r < 1:
        raise ComplexError("r must be at least 1, got %d" % r)
    nvars = r + 1
    terms = {}
    basis = {}
    for i in range(r + 2):
        subs = ext_basis(r, i)
        basis[-i] = tuple(subs)
        terms[-i] = TwistedFreeModule(
            tuple(-i for _ in subs), tuple(_subset_label(I) for I in subs)
        )
    diffs = {}
    for i in range(r + 1, 0, -1):
        src = terms[-i]
        tgt = terms[-i + 1]
        pos = {I: n for n, I in enumerate(basis[-i + 1])}
        m = GradedMatrix(src, tgt, nvars)
        for q, I in enumerate(basis[-i]):
            for k, v in enumerate(I):
                rest = I[:k] + I[k + 1 :]
                coeff = field.from_int(-1 if k % 2 else 1)
                m.set_entry(
                    pos[rest],
                    q,
                    m.entry(pos[rest], q) + HomogPoly.variable(v, nvars, coeff),
                )
        diffs[-i] = m
    return KoszulData(r, field, TwistedFreeComplex(r, field, terms, diffs), basis)


def delta_datum(r, shift=None):
    """O(-r-1)[shift]; the default shift r is the half-pair duality."""
    return DualityDatum(-(r + 1), r if shift is None else shift)


def build_mu(K):
    """The top-wedge pairing form on K over O(-r-1)[r+1].

    Every component is a signed permutation matrix pairing e_I with the
    complementary e_{I^c}; the sign epsilon is calibrated, not assumed.
    """
    r = K.r
    field = K.field
    L = delta_datum(r, r + 1)
    A = K.complex
    dual = dualize_complex(A, L)
    full = tuple(range(r + 1))
    comps = {}
    for i in A.degrees():
        left = K.basis[i]
        right = K.basis[-i - (r + 1)]
        m = GradedMatrix(A.term(i), dual.term(i), A.nvars)
        for q, I in enumerate(left):
            for p, J in enumerate(right):
                sgn = wedge_sign(I, J, full)
                if sgn:
                    m.set_entry(p, q, HomogPoly.constant(field.from_int(sgn), A.nvars))
        comps[i] = m
    form = ChainMap(A, dual, comps, 0)
    eps = calibrate_epsilon(form, L)
    if eps is None:
        raise ComplexError("wedge pairing failed both symmetry calibrations")
    return SymmetricFormData(form, L, eps)


def naive_truncation(A, ell):
    """The subcomplex of terms in degrees <= ell (zero elsewhere)."""
    terms = {i: t for i, t in A.terms.items() if i <= ell}
    diffs = {i: d for i, d in A.diffs.items() if i + 1 <= ell}
    return TwistedFreeComplex(A.r, A.field, terms, diffs)


def contraction_pairing(K, ell):
    """The pairing (x, y) -> top(d(x) ^ y) on M = K_{<= ell}, supported on
    |x| + |y| = -r-2, as a chain map M x M -> O(-r-1)[r+2]."""
    r = K.r
    field = K.field
    if not -r - 1 <= ell <= -1:
        raise ComplexError("truncation level %d outside [-%d, -1]" % (ell, r + 1))
    nvars = r + 1
    M = naive_truncation(K.complex, ell)
    MM = tensor_complexes(M, M)
    L = delta_datum(r, r + 2)
    target = datum_complex(r, field, L)
    full = tuple(range(r + 1))
    src_deg = -(r + 2)
    order = tensor_summand_order(M, M, src_deg)
    m = GradedMatrix(MM.term(src_deg), target.term(src_deg), nvars)
    for col, (i, q, p) in enumerate(order):
        I = K.basis[i][q]
        J = K.basis[src_deg - i][p]
        poly = HomogPoly.zero(nvars, 1)
        for k, v in enumerate(I):
            rest = I[:k] + I[k + 1 :]
            sgn = wedge_sign(rest, J, full)
            if sgn:
                dsgn = -1 if k % 2 else 1
                poly = poly + HomogPoly.variable(v, nvars, field.from_int(dsgn * sgn))
        if not poly.is_zero():
            m.set_entry(0, col, poly)
    comps = {src_deg: m} if not m.is_zero() else {}
    return M, ChainMap(MM, target, comps, 0)


def pairing_switch_defect(A, beta, epsilon):
    """beta o tau - epsilon . beta on every basis pair; [] iff beta tau = epsilon beta."""
    bad = []
    comp = beta.components.get(min(beta.components)) if beta.components else None
    if comp is None:
        return bad
    deg = min(beta.components)
    order = tensor_summand_order(A, A, deg)
    pos = {key: idx for idx, key in enumerate(order)}
    for col, (i, q, p) in enumerate(order):
        j = deg - i
        swapped = pos[(j, p, q)]
        tau_sign = -1 if (i * j) % 2 else 1
        lhs = comp.entry(0, swapped).scale(tau_sign)
        rhs = comp.entry(0, col).scale(epsilon)
        if lhs != rhs:
            bad.append(((i, q), (j, p)))
    return bad


def build_phi(K, ell):
    """The symmetric form on (K_{<= ell})[-1] over O(-r-1)[r].

    The raw pairing is skew (checked exhaustively); tensoring with the
    shift form O[-1] makes it symmetric with epsilon +1.
    """
    M, beta = contraction_pairing(K, ell)
    bad = pairing_switch_defect(M, beta, -1)
    if bad:
        raise ComplexError("contraction pairing is not skew at %s" % (bad[:3],))
    raw = bilinear_to_form(M, beta, delta_datum(K.r, K.r + 2), epsilon=-1)
    return transmute(raw, -1)


@dataclass
class HalfKoszulPair:
    r: int
    field: object
    ell: object  # truncation level for even r, None for odd r
    H: TwistedFreeComplex
    psi: SymmetricFormData
    split: object = None  # MiddleSplit for odd r


def build_even_pair(r, field, ell=None):
    """The half pair (H, psi) for even r; H = (K_{<= ell})[-1].

    The default truncation ell = -s-1 makes the cone of psi carry exactly
    the full complex's terms; ell = -s-2 is accepted so the resulting
    failure is demonstrable.
    """
    if r % 2:
        raise ComplexError("r must be even, got %d" % r)
    s = r // 2
    if ell is None:
        ell = -s - 1
    K = build_koszul(r, field)
    phi = build_phi(K, ell)
    return HalfKoszulPair(r, field, ell, phi.source, phi, None)


# -- the odd case: middle splits -------------------------------------------


def wedge_gram_nu(r, field):
    """Gram matrix of the wedge pairing on the middle exterior power
    (odd r, r + 1 = 2s); a (-1)^s-symmetric nondegenerate form."""
    if r % 2 == 0:
        raise ComplexError("r must be odd, got %d" % r)
    s = (r + 1) // 2
    basis = ext_basis(r, s)
    full = tuple(range(r + 1))
    gram = [
        [field.from_int(wedge_sign(I, J, full)) for J in basis] for I in basis
    ]
    eps = -1 if s % 2 else 1
    return EpsForm(gram, eps, field)


@dataclass
class MiddleSplit:
    """The split (P, N, S, iota, pr, alpha, sigma) of the middle term.

    All modules sit at twist -s.  iota embeds the Lagrangian P into
    K_{-s} + N, pr retracts it, alpha embeds S into N with
    S -> N -> S-dual exact, and sigma is the (-1)^s-form on N.
    """

    r: int
    field: object
    p_basis: list  # (k + n) x p columns over the field
    pr: list  # p x (k + n)
    alpha: list  # n x s_rank
    sigma: EpsForm  # on N
    nu: EpsForm  # wedge form on the middle exterior power
    n_rank: int = 0
    s_rank: int = 0

    @property
    def s(self):
        return (self.r + 1) // 2

    @property
    def p_rank(self):
        return len(self.p_basis[0]) if self.p_basis else 0

    @property
    def middle_rank(self):
        return len(self.p_basis)

    def form_map(self):
        """(nu + sigma) as a duality map: block transpose of the Grams."""
        f = self.field
        k = len(self.nu.gram)
        n = self.n_rank
        out = linalg.zeros(k + n, k + n, f)
        nt = linalg.transpose(self.nu.gram)
        st = linalg.transpose(self.sigma.gram) if n else []
        for i in range(k):
            for j in range(k):
                out[i][j] = nt[i][j]
        for i in range(n):
            for j in range(n):
                out[k + i][k + j] = st[i][j]
        return out

    def validate(self):
        """Exact checks: isotropy, retraction, and the idempotent identity."""
        errors = []
        f = self.field
        G = self.form_map()
        iota = self.p_basis
        k = self.p_rank
        if 2 * k != self.middle_rank:
            errors.append("Lagrangian rank %d is not half of %d" % (k, self.middle_rank))
        bt_g_b = linalg.mat_mul(linalg.mat_mul(linalg.transpose(iota), G, f), iota, f)
        if not linalg.is_zero_matrix(bt_g_b):
            errors.append("P is not isotropic for nu + sigma")
        pr_iota = linalg.mat_mul(self.pr, iota, f)
        if not linalg.mat_eq(pr_iota, linalg.identity(k, f)):
            errors.append("pr o iota is not the identity")
        ginv = linalg.inverse(G, f)
        q1 = linalg.mat_mul(iota, self.pr, f)
        q2 = linalg.mat_mul(
            linalg.mat_mul(
                linalg.mat_mul(ginv, linalg.transpose(self.pr), f),
                linalg.transpose(iota),
                f,
            ),
            G,
            f,
        )
        if not linalg.mat_eq(linalg.mat_add(q1, q2), linalg.identity(self.middle_rank, f)):
            errors.append("iota pr + (nu+sigma)^-1 pr^T iota^T (nu+sigma) != id")
        if self.n_rank:
            if self.sigma.gram_transpose_defect():
                errors.append("sigma is not (-1)^s-symmetric")
            if linalg.rank(self.sigma.gram, f) != self.n_rank:
                errors.append("sigma is degenerate")
            amap = linalg.mat_mul(
                linalg.transpose(self.alpha), linalg.transpose(self.sigma.gram), f
            )
            comp = linalg.mat_mul(amap, self.alpha, f)
            if not linalg.is_zero_matrix(comp):
                errors.append("S -> N -> S-dual does not compose to zero")
            if linalg.rank(self.alpha, f) != self.s_rank:
                errors.append("alpha is not injective")
            if linalg.rank(amap, f) != self.s_rank:
                errors.append("N -> S-dual is not surjective")
            if 2 * self.s_rank != self.n_rank:
                errors.append("middle of S -> N -> S-dual is not exact by rank count")
        return errors


def middle_split_trivial(r, field):
    """The explicit Lagrangian span{e_I : 0 in I} with N = S = 0."""
    if r % 2 == 0:
        raise ComplexError("r must be odd, got %d" % r)
    s = (r + 1) // 2
    basis = ext_basis(r, s)
    nu = wedge_gram_nu(r, field)
    chosen = [n for n, I in enumerate(basis) if 0 in I]
    k = len(basis)
    z, o = field.zero(), field.one()
    iota = [[o if n == chosen[j] else z for j in range(len(chosen))] for n in range(k)]
    pr = [[o if chosen[i] == n else z for n in range(k)] for i in range(len(chosen))]
    return MiddleSplit(
        r, field, iota, pr, [], EpsForm([], nu.epsilon, field), nu, 0, 0
    )


def middle_split_injected(r, field, sigma_gram, alpha, p_basis=None):
    """A split with a nontrivial metabolic summand (N, sigma) and S -> N.

    If no Lagrangian basis is supplied one is found for skew forms via the
    symplectic machinery; symmetric injected splits over Q must supply one.
    """
    if r % 2 == 0:
        raise ComplexError("r must be odd, got %d" % r)
    s = (r + 1) // 2
    eps = -1 if s % 2 else 1
    nu = wedge_gram_nu(r, field)
    n_rank = len(sigma_gram)
    s_rank = len(alpha[0]) if alpha and alpha[0] else 0
    sigma = EpsForm(sigma_gram, eps, field)
    k = len(nu.gram)
    total = linalg.zeros(k + n_rank, k + n_rank, field)
    for i in range(k):
        for j in range(k):
            total[i][j] = nu.gram[i][j]
    for i in range(n_rank):
        for j in range(n_rank):
            total[k + i][k + j] = sigma_gram[i][j]
    big = EpsForm(total, eps, field)
    if p_basis is None:
        from .witt import find_lagrangian

        p_basis = find_lagrangian(big)
    seq = split_sequence(big, Subspace(p_basis))
    return MiddleSplit(
        r, field, p_basis, seq.pr, alpha, sigma, nu, n_rank, s_rank
    )


def central_square_path_sum(split, d_rows_polys, nvars):
    """(d+a)^T (nu+sigma) iota pr (d+a) + (d+a)^T pr^T iota^T (nu+sigma) (d+a).

    d_rows_polys is the polynomial block matrix (d + alpha); the sum of the
    two path composites of the central square must vanish identically.
    """
    f = split.field
    G = split.form_map()
    iota, pr = split.p_basis, split.pr
    B = d_rows_polys
    mid1 = linalg.mat_mul(linalg.mat_mul(G, iota, f), pr, f)
    mid2 = linalg.mat_mul(
        linalg.mat_mul(linalg.transpose(pr), linalg.transpose(iota), f), G, f
    )
    mid = linalg.mat_add(mid1, mid2)
    # upper = mid . B (scalar times polynomial rows)
    upper = []
    for i in range(len(mid)):
        row = []
        for j in range(len(B[0])):
            acc = HomogPoly.zero(nvars, 0)
            for t in range(len(B)):
                if mid[i][t] and not B[t][j].is_zero():
                    term = B[t][j].scale(mid[i][t])
                    acc = term if acc.is_zero() else acc + term
            row.append(acc)
        upper.append(row)
    # out = B^T . upper (polynomial product)
    out = []
    for i in range(len(B[0])):
        row = []
        for j in range(len(upper[0])):
            acc = HomogPoly.zero(nvars, 0)
            for t in range(len(B)):
                a = B[t][i]
                b = upper[t][j]
                if not a.is_zero() and not b.is_zero():
                    term = a * b
                    acc = term if acc.is_zero() else acc + term
            row.append(acc)
        out.append(row)
    return out


def build_odd_pair(r, field, split=None):
    """The half pair (H, psi) for odd r with a middle split.

    H runs from the top exterior term down to K_{-s-1} + S and ends in the
    Lagrangian P; psi hits only the two middle degrees, via the composites
    iota^T (nu+sigma) (d+alpha) and (-1)^s (d+alpha)^T (nu+sigma) iota.
    """
    if r % 2 == 0:
        raise ComplexError("r must be odd, got %d" % r)
    s = (r + 1) // 2
    if split is None:
        split = middle_split_trivial(r, field)
    errs = split.validate()
    if errs:
        raise ComplexError("invalid middle split: %s" % "; ".join(errs))
    K = build_koszul(r, field)
    A = K.complex
    nvars = r + 1
    f = field

    s_mod = TwistedFreeModule(tuple(-s for _ in range(split.s_rank)))
    n_mod = TwistedFreeModule(tuple(-s for _ in range(split.n_rank)))
    p_mod = TwistedFreeModule(tuple(-s for _ in range(split.p_rank)))
    mid_mod = A.term(-s - 1).concat(s_mod)

    terms = {}
    for j in range(-r, -s):
        terms[j] = A.term(j - 1)
    terms[-s] = mid_mod
    terms[-s + 1] = p_mod

    diffs = {}
    for j in range(-r, -s - 1):
        diffs[j] = GradedMatrix(terms[j], terms[j + 1], nvars, dict(A.diff(j - 1).entries))
    if r >= 3:
        # K_{-s-2} -> K_{-s-1} + S is the contraction followed by inclusion
        d_prev = A.diff(-s - 2)
        m = GradedMatrix(terms[-s - 1], terms[-s], nvars)
        for (p, q), poly in d_prev.entries.items():
            m.set_entry(p, q, poly)
        diffs[-s - 1] = m

    # the block map (d + alpha): K_{-s-1} + S -> K_{-s} + N, polynomial rows
    d_mid = A.diff(-s - 1)
    k_rank = A.term(-s).rank
    da_rows = []
    for p in range(k_rank):
        row = []
        for q in range(mid_mod.rank):
            if q < A.term(-s - 1).rank:
                e = d_mid.entries.get((p, q))
                row.append(e if e is not None else HomogPoly.zero(nvars, 1))
            else:
                row.append(HomogPoly.zero(nvars, 0))
        da_rows.append(row)
    for p in range(split.n_rank):
        row = []
        for q in range(mid_mod.rank):
            if q < A.term(-s - 1).rank:
                row.append(HomogPoly.zero(nvars, 1))
            else:
                c = split.alpha[p][q - A.term(-s - 1).rank]
                row.append(HomogPoly.constant(c, nvars) if c else HomogPoly.zero(nvars, 0))
        da_rows.append(row)

    def scalar_times_polyrows(S, rows, src_mod, tgt_mod):
        out = GradedMatrix(src_mod, tgt_mod, nvars)
        for i in range(len(S)):
            for j in range(src_mod.rank):
                acc = None
                for t in range(len(rows)):
                    c = S[i][t]
                    poly = rows[t][j]
                    if c and not poly.is_zero():
                        term = poly.scale(c)
                        acc = term if acc is None else acc + term
                if acc is not None and not acc.is_zero():
                    out.set_entry(i, j, acc)
        return out

    # H differential into P: pr o (d + alpha)
    diffs[-s] = scalar_times_polyrows(split.pr, da_rows, mid_mod, p_mod)

    H = TwistedFreeComplex(r, field, terms, diffs)
    dual = dualize_complex(H, delta_datum(r))

    G = split.form_map()
    it_g = linalg.mat_mul(linalg.transpose(split.p_basis), G, f)
    psi_lo = scalar_times_polyrows(it_g, da_rows, mid_mod, dual.term(-s))

    # (-1)^s (d+alpha)^T (nu+sigma) iota, a polynomial matrix P -> dual middle
    g_iota = linalg.mat_mul(G, split.p_basis, f)
    sgn = -1 if s % 2 else 1
    hi = GradedMatrix(p_mod, dual.term(-s + 1), nvars)
    for i in range(mid_mod.rank):
        for j in range(split.p_rank):
            acc = None
            for t in range(len(da_rows)):
                poly = da_rows[t][i]
                c = g_iota[t][j]
                if c and not poly.is_zero():
                    term = poly.scale(c)
                    acc = term if acc is None else acc + term
            if acc is not None and not acc.is_zero():
                hi.set_entry(i, j, acc.scale(sgn))
    psi_hi = hi

    form = ChainMap(H, dual, {-s: psi_lo, -s + 1: psi_hi}, 0)
    sf = SymmetricFormData(form, delta_datum(r), 1)
    errs = sf.structure_errors()
    if errs:
        raise ComplexError("half pair is not a chain map: %s" % "; ".join(errs))
    return HalfKoszulPair(r, field, None, H, sf, split)


def middle_acyclic_complex(split):
    """S -> N -> S-dual in degrees [-s-1, -s+1]; split acyclic by construction."""
    r, f = split.r, split.field
    s = split.s
    nvars = r + 1
    s_mod = TwistedFreeModule(tuple(-s for _ in range(split.s_rank)))
    n_mod = TwistedFreeModule(tuple(-s for _ in range(split.n_rank)))
    sd_mod = TwistedFreeModule(tuple(-(r + 1) + s for _ in range(split.s_rank)))
    terms = {-s - 1: s_mod, -s: n_mod, -s + 1: sd_mod}
    amap = linalg.mat_mul(
        linalg.transpose(split.alpha), linalg.transpose(split.sigma.gram), f
    )
    diffs = {
        -s - 1: GradedMatrix.from_scalar_rows(s_mod, n_mod, nvars, split.alpha),
        -s: GradedMatrix.from_scalar_rows(n_mod, sd_mod, nvars, amap),
    }
    return TwistedFreeComplex(r, f, terms, diffs)


def contraction_transpose_pairing_vanishes(r, field):
    """d^T nu d = 0 on the term below the middle: the polynomial identity
    behind the central square (wedging two contractions of the same top
    form kills the top degree)."""
    if r % 2 == 0:
        raise ComplexError("r must be odd, got %d" % r)
    K = build_koszul(r, field)
    s = (r + 1) // 2
    nu = wedge_gram_nu(r, field)
    d = K.complex.diff(-s - 1)
    nu_map = linalg.transpose(nu.gram)
    rows = [
        [d.entry(p, q) for q in range(d.source.rank)] for p in range(d.target.rank)
    ]
    nvars = r + 1
    mid = []
    for i in range(len(nu_map)):
        row = []
        for j in range(d.source.rank):
            acc = HomogPoly.zero(nvars, 1)
            for t in range(len(rows)):
                c = nu_map[i][t]
                if c and not rows[t][j].is_zero():
                    acc = acc + rows[t][j].scale(c)
            row.append(acc)
        mid.append(row)
    for i in range(d.source.rank):
        for j in range(d.source.rank):
            acc = HomogPoly.zero(nvars, 2)
            for t in range(len(mid)):
                if not rows[t][i].is_zero() and not mid[t][j].is_zero():
                    acc = acc + rows[t][i] * mid[t][j]
            if not acc.is_zero():
                return False
    return True


def koszul_multisets(r, field=None):
    """Per-degree twist multisets of the full contraction complex."""
    out = {}
    for i in range(r + 2):
        out[-i] = tuple(sorted([-i] * _binom(r + 1, i)))
    return {k: v for k, v in out.items() if v}


def _binom(n, k):
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out
