"""The shifted duality [-, O(t)[n]] on twisted free complexes.

For an invertible datum L = O(t)[n] the duality acts, in a fixed basis and
its identically-ordered dual basis, by

    (A*)_i       twists  { t - a : a in A_{-i-n} }
    (d*)_i     = (-1)^(i+1) transpose d_{-i-1-n}
    (f*)_i     = (-1)^(ij)  transpose f_{-i-j-n}     for f of degree j
    (can_A)_i  = (-1)^(i(n+1)) identity

so the double dual is literally the original module and every sign is a
scalar.  Symmetric forms store their intended sign epsilon and are always
re-checked against phi = epsilon . dual(phi) o can, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (
    ChainMap,
    ComplexError,
    GradedMatrix,
    TwistedFreeComplex,
    TwistedFreeModule,
    tensor_complexes,
    tensor_maps,
    tensor_summand_order,
)
from .polynomials import HomogPoly


@dataclass(frozen=True)
class DualityDatum:
    """The invertible object O(t)[n]: a twist t and a shift n."""

    t: int
    n: int

    def compose(self, other):
        return DualityDatum(self.t + other.t, self.n + other.n)

    def square(self):
        return DualityDatum(2 * self.t, 2 * self.n)


def compose_duality(L1, L2):
    return L1.compose(L2)


def datum_complex(r, field, L, label=None):
    """The one-term complex O(t) sitting in degree -n."""
    labels = (label,) if label is not None else None
    return TwistedFreeComplex(
        r, field, {-L.n: TwistedFreeModule((L.t,), labels)}
    )


def _dual_module(module, t):
    labels = None
    if module.labels is not None:
        labels = tuple(lbl + "^" for lbl in module.labels)
    return TwistedFreeModule(tuple(t - a for a in module.twists), labels)


def dualize_complex(A, L):
    """[A, O(t)[n]] with the dual-basis conventions above."""
    t, n = L.t, L.n
    terms = {}
    for j, mod in A.terms.items():
        terms[-j - n] = _dual_module(mod, t)
    diffs = {}
    for i in list(terms):
        j = -i - 1 - n
        d = A.diffs.get(j)
        if d is None:
            continue
        sign = -1 if (i + 1) % 2 else 1
        diffs[i] = d.transposed_into(terms[i], terms[i + 1], sign)
    return TwistedFreeComplex(A.r, A.field, terms, diffs)


def dualize_map(f, L, dual_source=None, dual_target=None):
    """Dual of a degree-j map: (f*)_i = (-1)^(ij) transpose f_{-i-j-n}."""
    t, n = L.t, L.n
    j = f.degree
    src = dual_source if dual_source is not None else dualize_complex(f.target, L)
    tgt = dual_target if dual_target is not None else dualize_complex(f.source, L)
    comps = {}
    for k, m in f.components.items():
        i = -k - j - n
        sign = -1 if (i * j) % 2 else 1
        comps[i] = m.transposed_into(src.term(i), tgt.term(i + j), sign)
    return ChainMap(src, tgt, comps, j)


def canonical_id(A, L):
    """can_A : A -> [[A, L], L], the identity matrix times (-1)^(i(n+1))."""
    ddual = dualize_complex(dualize_complex(A, L), L)
    comps = {}
    for i, mod in A.terms.items():
        if ddual.term(i).twists != mod.twists:
            raise ComplexError("double dual does not return the original twists")
        sign = -1 if (i * (L.n + 1)) % 2 else 1
        comps[i] = GradedMatrix.identity(mod, A.nvars, A.field.from_int(sign))
    return ChainMap(A, ddual, comps, 0)


@dataclass
class SymmetricFormData:
    """A chain map phi : A -> [A, L] with a declared sign epsilon."""

    form: ChainMap
    datum: DualityDatum
    epsilon: int

    @property
    def source(self):
        return self.form.source

    def structure_errors(self):
        errors = list(self.form.validate_typing())
        if self.form.degree != 0:
            errors.append("form has degree %d, expected 0" % self.form.degree)
        if not self.form.is_cycle():
            errors.append("form is not a chain map")
        dual = dualize_complex(self.form.source, self.datum)
        if self.form.target.term_twists() != dual.term_twists():
            errors.append("form target is not the dual of its source")
        if self.epsilon not in (1, -1):
            errors.append("epsilon must be +1 or -1")
        return errors


def symmetry_defect(form, L, epsilon):
    """dual(phi) o can - epsilon . phi, which vanishes iff phi is epsilon-symmetric."""
    phi_dual = dualize_map(form, L, dual_source=None, dual_target=form.target)
    can = canonical_id(form.source, L)
    lhs = phi_dual.compose(can)
    return lhs.add(form.scale(-epsilon))


def check_symmetric(sf):
    """True iff sf.form equals epsilon . dual(sf.form) o can exactly."""
    dual = dualize_complex(sf.form.source, sf.datum)
    if sf.form.target.term_twists() != dual.term_twists():
        raise ComplexError("form target is not the dual of its source")
    return symmetry_defect(sf.form, sf.datum, sf.epsilon).is_zero()


def calibrate_epsilon(form, L):
    """The sign for which the form is symmetric, or None if neither works."""
    for eps in (1, -1):
        if symmetry_defect(form, L, eps).is_zero():
            return eps
    return None


# -- bilinear forms <-> forms ----------------------------------------------


def bilinear_to_form(A, beta, L, epsilon=None):
    """Turn a pairing beta : A x A -> O(t)[n] into phi : A -> [A, L].

    beta is a degree-0 chain map out of ``tensor_complexes(A, A)`` into the
    one-term datum complex; phi sends the q-th basis vector of A_i to the
    functional pairing it against A_{-i-n}, so phi_i[p][q] is beta on
    (A_i summand q) @ (A_{-i-n} summand p).
    """
    t, n = L.t, L.n
    bcomp = beta.components.get(-n)
    dual = dualize_complex(A, L)
    comps = {}
    if bcomp is not None:
        order = tensor_summand_order(A, A, -n)
        pos = {key: idx for idx, key in enumerate(order)}
        for i in A.degrees():
            left = A.term(i)
            right = A.term(-i - n)
            if left.rank == 0 or right.rank == 0:
                continue
            m = GradedMatrix(left, dual.term(i), A.nvars)
            for q in range(left.rank):
                for p in range(right.rank):
                    col = pos.get((i, q, p))
                    if col is None:
                        continue
                    poly = bcomp.entries.get((0, col))
                    if poly is not None:
                        m.set_entry(p, q, poly)
            if not m.is_zero():
                comps[i] = m
    form = ChainMap(A, dual, comps, 0)
    if epsilon is None:
        epsilon = calibrate_epsilon(form, L)
        if epsilon is None:
            raise ComplexError("pairing induces a form that is neither symmetric nor skew")
    return SymmetricFormData(form, L, epsilon)


def form_to_bilinear(sf):
    """Adjoint pairing of a form; inverse of bilinear_to_form up to typing."""
    A = sf.source
    L = sf.datum
    n = L.n
    AA = tensor_complexes(A, A)
    target = datum_complex(A.r, A.field, L)
    order = tensor_summand_order(A, A, -n)
    m = GradedMatrix(AA.term(-n), target.term(-n), A.nvars)
    for col, (i, q, p) in enumerate(order):
        comp = sf.form.components.get(i)
        if comp is None:
            continue
        poly = comp.entries.get((p, q))
        if poly is not None:
            m.set_entry(0, col, poly)
    comps = {-n: m} if not m.is_zero() else {}
    return ChainMap(AA, target, comps, 0)


# -- the pairing isomorphism and form tensor -------------------------------


def pairing_iso(M, N, L1, L2):
    """[M, L1] x [N, L2] -> [M x N, L1 L2], (f, g) |-> (x, y |-> (-1)^{|x||g|} f(x) g(y)).

    On the (p, q) source block the map lands in the dual block indexed by
    (a, b) = (-p - m, -q - n) with sign (-1)^{(p+m) q}; it is a signed
    permutation of summands in every degree.
    """
    m_shift, n_shift = L1.n, L2.n
    DM = dualize_complex(M, L1)
    DN = dualize_complex(N, L2)
    S = tensor_complexes(DM, DN)
    MN = tensor_complexes(M, N)
    L12 = L1.compose(L2)
    T = dualize_complex(MN, L12)
    comps = {}
    for i in S.degrees():
        src_order = tensor_summand_order(DM, DN, i)
        if not src_order:
            continue
        tgt_order = tensor_summand_order(M, N, -i - L12.n)
        tgt_pos = {key: idx for idx, key in enumerate(tgt_order)}
        mat = GradedMatrix(S.term(i), T.term(i), S.nvars)
        one = M.field.one()
        for col, (p, ai, bi) in enumerate(src_order):
            q = i - p
            a = -p - m_shift
            b = -q - n_shift
            row = tgt_pos.get((a, ai, bi))
            if row is None:
                continue
            sign = -1 if ((p + m_shift) * q) % 2 else 1
            mat.set_entry(row, col, HomogPoly.constant(one * sign, S.nvars))
        if not mat.is_zero():
            comps[i] = mat
    return ChainMap(S, T, comps, 0)


def invert_scalar_chain_map(f):
    """Invert a degree-0 chain map whose components are scalar square matrices."""
    from . import linalg

    field = f.source.field
    comps = {}
    for i in f.source.degrees():
        m = f.component(i)
        if m.source.rank != m.target.rank:
            raise ComplexError("component %d is not square" % i)
        rows = [
            [
                (m.entries.get((p, q)).terms.get((0,) * m.nvars, field.zero())
                 if (p, q) in m.entries else field.zero())
                for q in range(m.source.rank)
            ]
            for p in range(m.target.rank)
        ]
        inv = linalg.inverse(rows, field)
        comps[i] = GradedMatrix.from_scalar_rows(m.target, m.source, m.nvars, inv)
    return ChainMap(f.target, f.source, comps, 0)


def tensor_form(sf1, sf2):
    """Product form on M x N; signs multiply (a skew times a skew is symmetric)."""
    theta = pairing_iso(sf1.source, sf2.source, sf1.datum, sf2.datum)
    raw = tensor_maps(sf1.form, sf2.form, CD=theta.source)
    form = theta.compose(raw)
    datum = sf1.datum.compose(sf2.datum)
    eps = sf1.epsilon * sf2.epsilon
    out = SymmetricFormData(form, datum, eps)
    if not check_symmetric(out):
        raise ComplexError("tensor of symmetric forms failed its symmetry check")
    return out


def unit_shift_form(r, field, i):
    """The multiplication form on O[i], whose sign is (-1)^i."""
    L = DualityDatum(0, 2 * i)
    C = datum_complex(r, field, DualityDatum(0, i))
    dual = dualize_complex(C, L)
    mod = C.term(-i)
    comp = GradedMatrix.identity(mod, r + 1, field.one())
    form = ChainMap(C, dual, {-i: comp}, 0)
    eps = -1 if i % 2 else 1
    return SymmetricFormData(form, L, eps)


def unit_form_on_datum(r, field, L):
    """The trivial form on O(t)[n] over the squared datum (2t, 2n)."""
    C = datum_complex(r, field, L)
    sq = L.square()
    dual = dualize_complex(C, sq)
    mod = C.term(-L.n)
    comp = GradedMatrix.identity(mod, r + 1, field.one())
    form = ChainMap(C, dual, {-L.n: comp}, 0)
    eps = -1 if L.n % 2 else 1
    return SymmetricFormData(form, sq, eps)


def transmute(sf, i):
    """Tensor with (O[i], multiplication): shifts the datum by (0, 2i) and
    multiplies epsilon by (-1)^i, turning skew forms into symmetric ones for
    odd i."""
    if i == 0:
        return sf
    field = sf.source.field
    unit = unit_shift_form(sf.source.r, field, i)
    return tensor_form(unit, sf)


def square_twist(obj, L):
    """Tensor with (O(t)[n], trivial form); the datum moves by (2t, 2n)."""
    if isinstance(obj, TwistedFreeComplex):
        return tensor_complexes(datum_complex(obj.r, obj.field, L), obj)
    field = obj.source.field
    unit = unit_form_on_datum(obj.source.r, field, L)
    return tensor_form(unit, obj)
