"""Bounded complexes of twisted free sheaves on P^r and their chain maps.

A term is an ordered list of twists (a_1, ..., a_m), one per free summand
O(a_j).  A map O(b) -> O(a) is a homogeneous polynomial of degree a - b, so
a graded matrix is degree-typed entrywise; entries whose twist difference
is negative are identically zero.  Complexes are cohomologically graded
with differentials d_i : A_i -> A_{i+1}.

Sign conventions, fixed once here and relied on everywhere else:
  * shift       A[n]_i = A_{i+n},  d[n]_i = (-1)^n d_{i+n}
  * cone        C(f)_i = B_i + A_{i+1},  d = [[d_B, f], [0, -d_A]]
  * tensor      d(x@y) = dx@y + (-1)^{|x|} x@dy, summands ordered by
                (left degree ascending, left index, right index)
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .polynomials import HomogPoly


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class TwistedFreeModule:
    """A finite direct sum of twists O(a_j), in a fixed summand order."""

    twists: tuple
    labels: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "twists", tuple(self.twists))
        if self.labels is not None:
            if len(self.labels) != len(self.twists):
                raise ComplexError("labels/twists length mismatch")
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def rank(self):
        return len(self.twists)

    def concat(self, other):
        labels = None
        if self.labels is not None and other.labels is not None:
            labels = self.labels + other.labels
        return TwistedFreeModule(self.twists + other.twists, labels)

    def same_twists(self, other):
        return self.twists == other.twists


EMPTY_MODULE = TwistedFreeModule(())


class GradedMatrix:
    """A degree-typed matrix of homogeneous polynomials.

    Rows index target summands, columns index source summands; a nonzero
    entry at (p, q) must have degree target.twists[p] - source.twists[q].
    Only nonzero entries are stored.
    """

    __slots__ = ("source", "target", "nvars", "entries")

    def __init__(self, source, target, nvars, entries=None):
        self.source = source
        self.target = target
        self.nvars = nvars
        self.entries = {}
        for (p, q), poly in (entries or {}).items():
            self.set_entry(p, q, poly)

    @classmethod
    def zero(cls, source, target, nvars):
        return cls(source, target, nvars)

    @classmethod
    def identity(cls, module, nvars, scalar=1):
        m = cls(module, module, nvars)
        for i in range(module.rank):
            m.set_entry(i, i, HomogPoly.constant(scalar, nvars))
        return m

    @classmethod
    def from_rows(cls, source, target, nvars, rows):
        m = cls(source, target, nvars)
        for p, row in enumerate(rows):
            for q, poly in enumerate(row):
                if poly is not None and not poly.is_zero():
                    m.set_entry(p, q, poly)
        return m

    @classmethod
    def from_scalar_rows(cls, source, target, nvars, rows):
        """Build from a matrix of field scalars (degree-0 entries only)."""
        m = cls(source, target, nvars)
        for p, row in enumerate(rows):
            for q, c in enumerate(row):
                if c:
                    m.set_entry(p, q, HomogPoly.constant(c, nvars))
        return m

    def set_entry(self, p, q, poly):
        if not (0 <= p < self.target.rank and 0 <= q < self.source.rank):
            raise ComplexError("entry (%d, %d) out of shape" % (p, q))
        if poly.is_zero():
            self.entries.pop((p, q), None)
            return
        want = self.target.twists[p] - self.source.twists[q]
        if poly.degree != want:
            raise ComplexError(
                "entry (%d, %d) has degree %d, twist difference is %d"
                % (p, q, poly.degree, want)
            )
        self.entries[(p, q)] = poly

    def entry(self, p, q):
        got = self.entries.get((p, q))
        if got is not None:
            return got
        return HomogPoly.zero(self.nvars, max(self.target.twists[p] - self.source.twists[q], 0))

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, GradedMatrix):
            return NotImplemented
        return (
            self.source.twists == other.source.twists
            and self.target.twists == other.target.twists
            and self.entries == other.entries
        )

    def compose(self, other):
        """self o other, where other: A -> B and self: B -> C."""
        if other.target.twists != self.source.twists:
            raise ComplexError("compose: middle modules disagree")
        out = GradedMatrix(other.source, self.target, self.nvars)
        by_col = {}
        for (p, q), poly in other.entries.items():
            by_col.setdefault(p, []).append((q, poly))
        acc = {}
        for (p, t), left in self.entries.items():
            for q, right in by_col.get(t, ()):
                key = (p, q)
                prod = left * right
                if key in acc:
                    acc[key] = acc[key] + prod
                else:
                    acc[key] = prod
        for key, poly in acc.items():
            if not poly.is_zero():
                out.set_entry(key[0], key[1], poly)
        return out

    def add(self, other):
        if (
            other.source.twists != self.source.twists
            or other.target.twists != self.target.twists
        ):
            raise ComplexError("add: shapes disagree")
        out = GradedMatrix(self.source, self.target, self.nvars, dict(self.entries))
        for (p, q), poly in other.entries.items():
            out.set_entry(p, q, out.entry(p, q) + poly)
        return out

    def scale(self, c):
        out = GradedMatrix(self.source, self.target, self.nvars)
        for (p, q), poly in self.entries.items():
            s = poly.scale(c)
            if not s.is_zero():
                out.set_entry(p, q, s)
        return out

    def neg(self):
        return self.scale(-1)

    def transposed_into(self, new_source, new_target, sign=1):
        """Transpose the entry array into given dual modules, with a sign."""
        out = GradedMatrix(new_source, new_target, self.nvars)
        for (p, q), poly in self.entries.items():
            out.set_entry(q, p, poly.scale(sign))
        return out

    @classmethod
    def from_blocks(cls, nvars, blocks, sources, targets):
        """Assemble [[B_00, B_01], ...]; None blocks are zero."""
        src = EMPTY_MODULE
        for s in sources:
            src = src.concat(s)
        tgt = EMPTY_MODULE
        for t in targets:
            tgt = tgt.concat(t)
        out = cls(src, tgt, nvars)
        roff = 0
        for bi, trow in enumerate(targets):
            coff = 0
            for bj, scol in enumerate(sources):
                blk = blocks[bi][bj]
                if blk is not None:
                    if blk.source.twists != scol.twists or blk.target.twists != trow.twists:
                        raise ComplexError("block (%d, %d) has wrong shape" % (bi, bj))
                    for (p, q), poly in blk.entries.items():
                        out.set_entry(roff + p, coff + q, poly)
                coff += scol.rank
            roff += trow.rank
        return out

    def eval_at(self, point, field):
        """Evaluate all entries at a point, returning a scalar matrix."""
        rows = []
        for p in range(self.target.rank):
            row = []
            for q in range(self.source.rank):
                poly = self.entries.get((p, q))
                if poly is None:
                    row.append(field.zero())
                else:
                    row.append(field.coerce(poly.eval(point)))
            rows.append(row)
        return rows

    def validate(self):
        errors = []
        for (p, q), poly in self.entries.items():
            want = self.target.twists[p] - self.source.twists[q]
            if poly.degree != want:
                errors.append(
                    "entry (%d, %d): degree %d != twist difference %d"
                    % (p, q, poly.degree, want)
                )
            if want < 0:
                errors.append("entry (%d, %d): negative twist difference %d" % (p, q, want))
        return errors


class TwistedFreeComplex:
    """A bounded complex of twisted free modules with d_{i+1} d_i = 0."""

    def __init__(self, r, field, terms, diffs=None):
        self.r = r
        self.field = field
        self.terms = {i: t for i, t in terms.items() if t.rank > 0}
        self.diffs = {}
        for i, d in (diffs or {}).items():
            if d is not None and not d.is_zero():
                self.diffs[i] = d

    @property
    def nvars(self):
        return self.r + 1

    def term(self, i):
        return self.terms.get(i, EMPTY_MODULE)

    def diff(self, i):
        got = self.diffs.get(i)
        if got is not None:
            return got
        return GradedMatrix.zero(self.term(i), self.term(i + 1), self.nvars)

    def degrees(self):
        return sorted(self.terms)

    def support(self):
        ds = self.degrees()
        return (ds[0], ds[-1]) if ds else None

    def is_empty(self):
        return not self.terms

    def total_rank(self):
        return sum(t.rank for t in self.terms.values())

    def term_multisets(self):
        """Per-degree sorted twist tuples; the shape invariant used in tests."""
        return {i: tuple(sorted(t.twists)) for i, t in self.terms.items()}

    def term_twists(self):
        """Per-degree twist tuples in summand order (strict typing checks)."""
        return {i: t.twists for i, t in self.terms.items()}

    def twist_support(self):
        out = set()
        for t in self.terms.values():
            out.update(t.twists)
        return out

    def validate(self):
        """All invariant violations: shape, degree typing, and d^2 = 0."""
        errors = []
        for i, d in self.diffs.items():
            if d.source.twists != self.term(i).twists:
                errors.append("diff %d: source does not match term" % i)
            if d.target.twists != self.term(i + 1).twists:
                errors.append("diff %d: target does not match term" % i)
            for e in d.validate():
                errors.append("diff %d: %s" % (i, e))
        lo_hi = self.support()
        if lo_hi:
            for i in range(lo_hi[0] - 1, lo_hi[1] + 1):
                if i in self.diffs or (i + 1) in self.diffs:
                    try:
                        comp = self.diff(i + 1).compose(self.diff(i))
                    except ComplexError as exc:
                        errors.append("d^2 at %d: %s" % (i, exc))
                        continue
                    for (p, q), poly in comp.entries.items():
                        errors.append(
                            "d^2 != 0 at degree %d, cell (%d, %d): %s"
                            % (i, p, q, poly.to_str())
                        )
        return errors

    def shifted(self, n):
        """A[n]_i = A_{i+n} with differentials scaled by (-1)^n."""
        terms = {i - n: t for i, t in self.terms.items()}
        sign = -1 if n % 2 else 1
        diffs = {i - n: d.scale(sign) for i, d in self.diffs.items()}
        return TwistedFreeComplex(self.r, self.field, terms, diffs)

    def __eq__(self, other):
        if not isinstance(other, TwistedFreeComplex):
            return NotImplemented
        if self.r != other.r or set(self.terms) != set(other.terms):
            return False
        for i, t in self.terms.items():
            if t.twists != other.terms[i].twists:
                return False
        keys = set(self.diffs) | set(other.diffs)
        return all(self.diff(i) == other.diff(i) for i in keys)

    # -- serialization (schema: {"r", "terms", "diff"}) ---------------------

    def to_json_dict(self):
        terms = {str(i): list(t.twists) for i, t in sorted(self.terms.items())}
        diff = {}
        for i in sorted(self.diffs):
            d = self.diffs[i]
            diff[str(i)] = [
                [d.entry(p, q).to_str() for q in range(d.source.rank)]
                for p in range(d.target.rank)
            ]
        return {"r": self.r, "terms": terms, "diff": diff}

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, data, field):
        r = data["r"]
        nvars = r + 1
        terms = {int(i): TwistedFreeModule(tuple(tw)) for i, tw in data["terms"].items()}
        diffs = {}
        for i_s, rows in data.get("diff", {}).items():
            i = int(i_s)
            src = terms.get(i, EMPTY_MODULE)
            tgt = terms.get(i + 1, EMPTY_MODULE)
            m = GradedMatrix(src, tgt, nvars)
            for p, row in enumerate(rows):
                for q, s in enumerate(row):
                    deg = max(tgt.twists[p] - src.twists[q], 0)
                    poly = HomogPoly.from_str(s, nvars, deg, field)
                    if not poly.is_zero():
                        m.set_entry(p, q, poly)
            diffs[i] = m
        return cls(r, field, terms, diffs)

    @classmethod
    def from_json(cls, s, field):
        return cls.from_json_dict(json.loads(s), field)


def single_term_complex(r, field, twist, degree=0, label=None):
    labels = (label,) if label is not None else None
    return TwistedFreeComplex(
        r, field, {degree: TwistedFreeModule((twist,), labels)}
    )


def direct_sum(A, B):
    if A.r != B.r:
        raise ComplexError("direct sum across different projective spaces")
    terms = {}
    diffs = {}
    for i in set(A.terms) | set(B.terms):
        terms[i] = A.term(i).concat(B.term(i))
    for i in set(A.diffs) | set(B.diffs):
        diffs[i] = GradedMatrix.from_blocks(
            A.nvars,
            [[A.diffs.get(i) or GradedMatrix.zero(A.term(i), A.term(i + 1), A.nvars), None],
             [None, B.diffs.get(i) or GradedMatrix.zero(B.term(i), B.term(i + 1), B.nvars)]],
            [A.term(i), B.term(i)],
            [A.term(i + 1), B.term(i + 1)],
        )
    return TwistedFreeComplex(A.r, A.field, terms, diffs)


class ChainMap:
    """A homogeneous map of complexes; degree 0 plus the cycle condition
    is an honest chain map, higher degrees are used by the duality and the
    sign batteries."""

    def __init__(self, source, target, components, degree=0):
        self.source = source
        self.target = target
        self.degree = degree
        self.components = {}
        for i, m in (components or {}).items():
            if m is not None and not m.is_zero():
                self.components[i] = m

    @classmethod
    def zero(cls, source, target, degree=0):
        return cls(source, target, {}, degree)

    @classmethod
    def identity(cls, A):
        comps = {
            i: GradedMatrix.identity(t, A.nvars) for i, t in A.terms.items()
        }
        return cls(A, A, comps)

    def component(self, i):
        got = self.components.get(i)
        if got is not None:
            return got
        return GradedMatrix.zero(
            self.source.term(i), self.target.term(i + self.degree), self.source.nvars
        )

    def is_zero(self):
        return not self.components

    def validate_typing(self):
        errors = []
        for i, m in self.components.items():
            if m.source.twists != self.source.term(i).twists:
                errors.append("component %d: source mismatch" % i)
            if m.target.twists != self.target.term(i + self.degree).twists:
                errors.append("component %d: target mismatch" % i)
            errors.extend("component %d: %s" % (i, e) for e in m.validate())
        return errors

    def is_cycle(self):
        """d_B f = (-1)^{|f|} f d_A, the closedness condition for degree |f|."""
        sgn = -1 if self.degree % 2 else 1
        idxs = set(self.components)
        idxs.update(j - 1 for j in self.components)
        for i in sorted(idxs):
            left = self.target.diff(i + self.degree).compose(self.component(i))
            right = self.component(i + 1).compose(self.source.diff(i)).scale(sgn)
            if left != right:
                return False
        return True

    def is_chain_map(self):
        return self.degree == 0 and not self.validate_typing() and self.is_cycle()

    def compose(self, other):
        """self o other (other first)."""
        if other.target is not self.source and other.target.term_twists() != self.source.term_twists():
            raise ComplexError("compose: inner complexes disagree")
        comps = {}
        for i in set(other.components) | {
            j - other.degree for j in self.components
        }:
            m = self.component(i + other.degree).compose(other.component(i))
            if not m.is_zero():
                comps[i] = m
        return ChainMap(other.source, self.target, comps, self.degree + other.degree)

    def add(self, other):
        comps = {}
        for i in set(self.components) | set(other.components):
            m = self.component(i).add(other.component(i))
            if not m.is_zero():
                comps[i] = m
        return ChainMap(self.source, self.target, comps, self.degree)

    def scale(self, c):
        return ChainMap(
            self.source,
            self.target,
            {i: m.scale(c) for i, m in self.components.items()},
            self.degree,
        )

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        if self.degree != other.degree:
            return False
        for i in set(self.components) | set(other.components):
            if self.component(i) != other.component(i):
                return False
        return True


def cone(f):
    """Mapping cone C(f) = target + source[1] with d = [[d_B, f], [0, -d_A]]."""
    if f.degree != 0:
        raise ComplexError("cone of a map of nonzero degree")
    errs = f.validate_typing()
    if errs or not f.is_cycle():
        raise ComplexError("cone of an invalid chain map: %s" % (errs or "not a cycle"))
    A, B = f.source, f.target
    nvars = A.nvars
    terms = {}
    for i in set(B.terms) | {i - 1 for i in A.terms}:
        terms[i] = B.term(i).concat(A.term(i + 1))
    diffs = {}
    for i in sorted(set(terms)):
        if i + 1 not in terms and i not in terms:
            continue
        blk = GradedMatrix.from_blocks(
            nvars,
            [
                [B.diffs.get(i), f.components.get(i + 1)],
                [None, A.diff(i + 1).scale(-1) if (i + 1) in A.diffs else None],
            ],
            [B.term(i), A.term(i + 1)],
            [B.term(i + 1), A.term(i + 2)],
        )
        diffs[i] = blk
    return TwistedFreeComplex(A.r, A.field, terms, diffs)


def tensor_summand_order(A, B, i):
    """Ordered (p, a_idx, b_idx) index triples of (A x B)_i."""
    out = []
    for p in sorted(A.terms):
        q = i - p
        tb = B.term(q)
        ta = A.term(p)
        for ai in range(ta.rank):
            for bi in range(tb.rank):
                out.append((p, ai, bi))
    return out


def tensor_module(A, B, i):
    twists = []
    for p, ai, bi in tensor_summand_order(A, B, i):
        twists.append(A.term(p).twists[ai] + B.term(i - p).twists[bi])
    return TwistedFreeModule(tuple(twists))


def tensor_complexes(A, B):
    """Tensor product with d(x@y) = dx@y + (-1)^{|x|} x@dy."""
    if A.r != B.r:
        raise ComplexError("tensor across different projective spaces")
    nvars = A.nvars
    degset = set()
    for p in A.terms:
        for q in B.terms:
            degset.add(p + q)
    terms = {i: tensor_module(A, B, i) for i in degset}
    diffs = {}
    for i in sorted(degset):
        src_order = tensor_summand_order(A, B, i)
        tgt_order = tensor_summand_order(A, B, i + 1)
        if not src_order or not tgt_order:
            continue
        tgt_pos = {key: n for n, key in enumerate(tgt_order)}
        m = GradedMatrix(terms[i], terms.get(i + 1, tensor_module(A, B, i + 1)), nvars)
        for col, (p, ai, bi) in enumerate(src_order):
            q = i - p
            dA = A.diffs.get(p)
            if dA is not None:
                for (tp, sp), poly in dA.entries.items():
                    if sp == ai:
                        row = tgt_pos.get((p + 1, tp, bi))
                        if row is not None:
                            m.set_entry(row, col, m.entry(row, col) + poly)
            dB = B.diffs.get(q)
            if dB is not None:
                sign = -1 if p % 2 else 1
                for (tp, sp), poly in dB.entries.items():
                    if sp == bi:
                        row = tgt_pos.get((p, ai, tp))
                        if row is not None:
                            m.set_entry(row, col, m.entry(row, col) + poly.scale(sign))
        diffs[i] = m
    return TwistedFreeComplex(A.r, A.field, terms, diffs)


def tensor_maps(f, g, AB=None, CD=None):
    """f @ g on tensor complexes, with the sign (-1)^{|g| p} on the A_p block."""
    A, C = f.source, f.target
    B, D = g.source, g.target
    src = AB if AB is not None else tensor_complexes(A, B)
    tgt = CD if CD is not None else tensor_complexes(C, D)
    deg = f.degree + g.degree
    comps = {}
    for i in src.degrees():
        src_order = tensor_summand_order(A, B, i)
        tgt_order = tensor_summand_order(C, D, i + deg)
        if not src_order or not tgt_order:
            continue
        tgt_pos = {key: n for n, key in enumerate(tgt_order)}
        m = GradedMatrix(src.term(i), tgt.term(i + deg), src.nvars)
        for col, (p, ai, bi) in enumerate(src_order):
            q = i - p
            fm = f.components.get(p)
            gm = g.components.get(q)
            if fm is None or gm is None:
                continue
            sign = -1 if (g.degree * p) % 2 else 1
            for (fp, fq), fpoly in fm.entries.items():
                if fq != ai:
                    continue
                for (gp, gq), gpoly in gm.entries.items():
                    if gq != bi:
                        continue
                    row = tgt_pos.get((p + f.degree, fp, gp))
                    if row is not None:
                        m.set_entry(
                            row, col, m.entry(row, col) + (fpoly * gpoly).scale(sign)
                        )
        if not m.is_zero():
            comps[i] = m
    return ChainMap(src, tgt, comps, deg)
