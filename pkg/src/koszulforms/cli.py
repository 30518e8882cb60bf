"""Batch verification driver.

Subcommands run named check batteries and emit a deterministic report:

  signs     randomized duality identity battery
  koszul    contraction complex build, self-duality, truncation skewness
  pair      half-complex symmetric pairs: symmetry, cone shape, acyclicity
  witt      Lagrangian/index toolkit checks over small prime fields
  semiorth  dual twist-class sweep and quotient endpoint bookkeeping
  all       every battery above

Exit codes: 0 all pass, 1 any failure, 2 inconclusive or empty battery,
64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import verify as ver
from .complexes import ComplexError, cone, direct_sum
from .duality import check_symmetric
from .fields import QQ, FieldError, PrimeField, parse_field_spec
from .koszul import (
    build_even_pair,
    build_koszul,
    build_mu,
    build_odd_pair,
    build_phi,
    contraction_pairing,
    contraction_transpose_pairing_vanishes,
    koszul_multisets,
    middle_acyclic_complex,
    middle_split_injected,
    middle_split_trivial,
    pairing_switch_defect,
    _binom,
)
from .polynomials import PolynomialError
from .report import (
    EXIT_USAGE,
    CheckRecord,
    Report,
    RunConfig,
    emit,
)
from .witt import (
    EpsForm,
    FormError,
    Subspace,
    diagonalize,
    is_lagrangian,
    max_isotropic_dim_bruteforce,
    split_sequence,
    symplectic_basis,
    witt_index_fp,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        sys.exit(EXIT_USAGE)


def _parse_r(text):
    if ":" in text:
        a, b = text.split(":", 1)
        lo, hi = int(a), int(b)
        if lo > hi or lo < 1:
            raise ValueError("bad r range %s" % text)
        return list(range(lo, hi + 1))
    v = int(text)
    if v < 1:
        raise ValueError("r must be >= 1")
    return [v]


def _load_split_spec(text, field):
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = json.loads(text)
    sigma = [[field.from_str(v) for v in row] for row in data["sigma"]]
    alpha = [[field.from_str(v) for v in row] for row in data["alpha"]]
    p_basis = None
    if data.get("p_basis") is not None:
        p_basis = [[field.from_str(v) for v in row] for row in data["p_basis"]]
    return {"sigma": sigma, "alpha": alpha, "p_basis": p_basis, "raw": data}


# -- batteries ---------------------------------------------------------------


def battery_signs(cfg, field):
    records = []
    if cfg.count <= 0:
        return records
    got = ver.battery_duality_identities(
        count=cfg.count, seed=cfg.seed, span=3, field=field, r=1
    )
    claims = {
        "dual_valid": "the dual of a valid complex against O(t)[n] is again a valid complex",
        "can_signed_identity": "the double-dual identification is a chain isomorphism "
        "with components (-1)^(i(n+1)) times the identity",
        "double_dual_natural": "dual(dual(f)) o can = can o f for degree-0 chain maps",
        "contravariance_sign": "dual(g o f) = (-1)^(|f||g|) dual(f) o dual(g) on homogeneous maps",
    }
    fail_by_check = {}
    for flr in got["failures"]:
        fail_by_check.setdefault(flr["check"], []).append(flr)
    for key, claim in claims.items():
        fails = fail_by_check.get(key, [])
        records.append(
            CheckRecord(
                name="signs-%s" % key.replace("_", "-"),
                claim=claim,
                status="fail" if fails else "pass",
                evidence={
                    "passes": got["passes"][key],
                    "checked": got["checked"],
                    "failures": fails[:3],
                },
            )
        )
    return records


def battery_koszul(cfg, field):
    records = []
    for r in cfg.r_values:
        K = build_koszul(r, field)
        errs = K.complex.validate()
        records.append(
            CheckRecord(
                name="koszul-d-squared-r%d" % r,
                claim="the contraction differential on P^%d squares to zero exactly "
                "and every entry is twist-typed" % r,
                status="pass" if not errs else "fail",
                evidence={"violations": errs[:5]},
            )
        )
        mu = build_mu(K)
        perm_ok = True
        for i, comp in mu.form.components.items():
            seen_rows, seen_cols = set(), set()
            for (p, q), poly in comp.entries.items():
                const = list(poly.terms.values())
                if poly.degree != 0 or len(const) != 1 or const[0] * const[0] != field.one():
                    perm_ok = False
                seen_rows.add(p)
                seen_cols.add(q)
            if len(seen_rows) != comp.source.rank or len(seen_cols) != comp.source.rank:
                perm_ok = False
        records.append(
            CheckRecord(
                name="koszul-mu-signed-permutation-r%d" % r,
                claim="every component of the top-wedge pairing form is a signed "
                "permutation matrix, hence an isomorphism",
                status="pass" if perm_ok else "fail",
                evidence={},
            )
        )
        sym = check_symmetric(mu)
        records.append(
            CheckRecord(
                name="koszul-mu-symmetric-r%d" % r,
                claim="the top-wedge pairing form passes the symmetry check; the sign "
                "is calibrated empirically, not hard-coded",
                status="pass" if sym else "fail",
                evidence={"calibrated_epsilon": mu.epsilon},
            )
        )
        if r <= 4:
            bad_levels = []
            for ell in range(-r - 1, 0):
                M, beta = contraction_pairing(K, ell)
                if pairing_switch_defect(M, beta, -1):
                    bad_levels.append(ell)
            records.append(
                CheckRecord(
                    name="koszul-phi-skew-r%d" % r,
                    claim="the truncated contraction pairing is skew (beta o switch "
                    "= -beta) on every basis pair, for every truncation level",
                    status="pass" if not bad_levels else "fail",
                    evidence={"failing_levels": bad_levels},
                )
            )
    return records


def _acyclicity_records(name_prefix, claim_prefix, C, cfg):
    records = []
    if C.r == 1:
        v = ver.snf_exact_verdict(C)
        records.append(
            CheckRecord(
                name="%s-acyclic-snf" % name_prefix,
                claim="%s: certified exactly by univariate Smith-normal-form homology "
                "on both charts" % claim_prefix,
                status="pass" if v.verdict == "acyclic" else "fail",
                evidence=v.to_json_dict(),
            )
        )
        if not isinstance(C.field, PrimeField) or C.field.p == cfg.prime:
            v2 = ver.acyclic_probabilistic(
                C, trials=min(cfg.trials, 20), prime=cfg.prime, seed=cfg.seed
            )
            records.append(
                CheckRecord(
                    name="%s-acyclic-sampled" % name_prefix,
                    claim="%s: the sampling oracle agrees with the exact one" % claim_prefix,
                    status="pass" if v2.verdict == "acyclic" else "fail",
                    evidence=v2.to_json_dict(),
                )
            )
    else:
        v = ver.acyclic_probabilistic(C, trials=cfg.trials, prime=cfg.prime, seed=cfg.seed)
        records.append(
            CheckRecord(
                name="%s-acyclic-sampled" % name_prefix,
                claim="%s: rank additivity holds at every sampled chart point, with "
                "the quantified per-trial failure bound" % claim_prefix,
                status="pass" if v.verdict == "acyclic" else "fail",
                evidence=v.to_json_dict(),
            )
        )
        w = ver.graded_window_verdict(C)
        records.append(
            CheckRecord(
                name="%s-graded-window" % name_prefix,
                claim="%s: graded-piece homology vanishes identically on the stable "
                "window at and above the twist threshold" % claim_prefix,
                status="pass" if w.verdict == "acyclic" else (
                    "fail" if w.verdict == "not-acyclic" else "inconclusive"
                ),
                evidence=w.to_json_dict(),
            )
        )
    return records


def battery_pair(cfg, field):
    records = []
    for r in cfg.r_values:
        if r % 2 == 0:
            try:
                pair = build_even_pair(r, field, ell=cfg.ell)
            except (ComplexError, PolynomialError) as exc:
                raise UsageError(str(exc))
            tag = "pair-even-r%d" % r
            records.append(
                CheckRecord(
                    name="%s-symmetric" % tag,
                    claim="the half-complex form is symmetric with sign +1 after the "
                    "shift transmutation",
                    status="pass" if check_symmetric(pair.psi) else "fail",
                    evidence={"ell": pair.ell, "epsilon": pair.psi.epsilon},
                )
            )
            C = cone(pair.psi.form)
            want = koszul_multisets(r)
            got = C.term_multisets()
            records.append(
                CheckRecord(
                    name="%s-cone-multiset" % tag,
                    claim="the cone of the half-complex form carries exactly the "
                    "per-degree twist multisets of the full contraction complex",
                    status="pass" if got == want else "fail",
                    evidence={"expected": {str(k): v for k, v in sorted(want.items())},
                              "got": {str(k): v for k, v in sorted(got.items())}},
                )
            )
            records.extend(
                _acyclicity_records(tag, "the cone of the half-complex form is acyclic", C, cfg)
            )
        else:
            split_data = None
            if cfg.split_spec is not None:
                parsed = _load_split_spec(cfg.split_spec, field)
                split_data = middle_split_injected(
                    r, field, parsed["sigma"], parsed["alpha"], parsed["p_basis"]
                )
            else:
                split_data = middle_split_trivial(r, field)
            tag = "pair-odd-r%d" % r
            s = (r + 1) // 2
            split_errs = split_data.validate()
            records.append(
                CheckRecord(
                    name="%s-split-valid" % tag,
                    claim="the middle split is exact: retraction, isotropy, and the "
                    "idempotent decomposition all hold",
                    status="pass" if not split_errs else "fail",
                    evidence={"errors": split_errs},
                )
            )
            want_rank = _binom(2 * s - 1, s - 1) + split_data.n_rank // 2
            records.append(
                CheckRecord(
                    name="%s-lagrangian-rank" % tag,
                    claim="the Lagrangian rank is half the middle rank "
                    "(C(2s-1, s-1) = C(2s, s)/2 in the untwisted case)",
                    status="pass" if split_data.p_rank == want_rank else "fail",
                    evidence={"p_rank": split_data.p_rank, "expected": want_rank},
                )
            )
            pair = build_odd_pair(r, field, split_data)
            K = build_koszul(r, field)
            da_rows = _odd_da_rows(K, split_data)
            from .koszul import central_square_path_sum

            ps = central_square_path_sum(split_data, da_rows, r + 1)
            ps_zero = all(p.is_zero() for row in ps for p in row)
            records.append(
                CheckRecord(
                    name="%s-central-square" % tag,
                    claim="the two path composites through the middle split sum to "
                    "the zero matrix exactly",
                    status="pass" if ps_zero else "fail",
                    evidence={},
                )
            )
            records.append(
                CheckRecord(
                    name="%s-dTnud" % tag,
                    claim="contraction into the middle wedge form and back vanishes "
                    "identically (d^T nu d = 0)",
                    status="pass" if contraction_transpose_pairing_vanishes(r, field) else "fail",
                    evidence={},
                )
            )
            records.append(
                CheckRecord(
                    name="%s-symmetric" % tag,
                    claim="the surgically completed half-complex form is symmetric "
                    "with sign +1",
                    status="pass" if check_symmetric(pair.psi) else "fail",
                    evidence={"epsilon": pair.psi.epsilon},
                )
            )
            C = cone(pair.psi.form)
            want_complex = K.complex
            if split_data.n_rank:
                want_complex = direct_sum(K.complex, middle_acyclic_complex(split_data))
            want = want_complex.term_multisets()
            got = C.term_multisets()
            records.append(
                CheckRecord(
                    name="%s-cone-multiset" % tag,
                    claim="the cone matches the contraction complex (plus the split "
                    "acyclic middle piece when one is injected) degreewise",
                    status="pass" if got == want else "fail",
                    evidence={"expected": {str(k): v for k, v in sorted(want.items())},
                              "got": {str(k): v for k, v in sorted(got.items())}},
                )
            )
            records.extend(
                _acyclicity_records(tag, "the cone of the completed half pair is acyclic", C, cfg)
            )
    return records


def _odd_da_rows(K, split):
    from .polynomials import HomogPoly

    A = K.complex
    r = K.r
    s = (r + 1) // 2
    nvars = r + 1
    d_mid = A.diff(-s - 1)
    src_rank = A.term(-s - 1).rank + split.s_rank
    rows = []
    for p in range(A.term(-s).rank):
        row = []
        for q in range(src_rank):
            if q < A.term(-s - 1).rank:
                e = d_mid.entries.get((p, q))
                row.append(e if e is not None else HomogPoly.zero(nvars, 1))
            else:
                row.append(HomogPoly.zero(nvars, 0))
        rows.append(row)
    for p in range(split.n_rank):
        row = []
        for q in range(src_rank):
            if q < A.term(-s - 1).rank:
                row.append(HomogPoly.zero(nvars, 1))
            else:
                c = split.alpha[p][q - A.term(-s - 1).rank]
                row.append(HomogPoly.constant(c, nvars) if c else HomogPoly.zero(nvars, 0))
        rows.append(row)
    return rows


def battery_witt(cfg, field):
    import random as _random

    records = []
    ok_idx = True
    evidence_idx = []
    for p in (3, 5, 7):
        fp = PrimeField(p)
        rng = _random.Random(cfg.seed + p)
        for dim in (2, 3, 4):
            for _ in range(3):
                while True:
                    g = [[fp.zero()] * dim for _ in range(dim)]
                    for i in range(dim):
                        g[i][i] = fp.random(rng)
                        for j in range(i + 1, dim):
                            v = fp.random(rng)
                            g[i][j] = v
                            g[j][i] = v
                    form = EpsForm(g, 1, fp)
                    if form.is_nondegenerate():
                        break
                got = witt_index_fp(form, seed=cfg.seed)
                brute = max_isotropic_dim_bruteforce(form)
                if got != brute:
                    ok_idx = False
                    evidence_idx.append(
                        {"p": p, "gram": [[str(v) for v in row] for row in g],
                         "got": got, "brute": brute}
                    )
    diag11 = lambda fp: EpsForm([[fp.one(), fp.zero()], [fp.zero(), fp.one()]], 1, fp)
    spot = (
        witt_index_fp(diag11(PrimeField(3))) == 0
        and witt_index_fp(diag11(PrimeField(5))) == 1
    )
    records.append(
        CheckRecord(
            name="witt-index-vs-bruteforce",
            claim="the computed Witt index matches exhaustive maximal-isotropic "
            "search over F_3, F_5, F_7 up to dimension 4, including the "
            "unit diagonal plane (index 0 over F_3, 1 over F_5)",
            status="pass" if (ok_idx and spot) else "fail",
            evidence={"mismatches": evidence_idx[:3]},
        )
    )
    import random as _r

    rng = _r.Random(cfg.seed)
    fp7 = PrimeField(7)
    ok_sympl = True
    for _ in range(5):
        while True:
            g = [[fp7.zero()] * 4 for _ in range(4)]
            for i in range(4):
                for j in range(i + 1, 4):
                    v = fp7.random(rng)
                    g[i][j] = v
                    g[j][i] = -v
            form = EpsForm(g, -1, fp7)
            if form.is_nondegenerate():
                break
        try:
            symplectic_basis(form)
        except FormError:
            ok_sympl = False
    records.append(
        CheckRecord(
            name="witt-symplectic-basis",
            claim="every nondegenerate skew form reduces to hyperbolic 2x2 blocks, "
            "verified by recomputing the Gram matrix in the new basis",
            status="pass" if ok_sympl else "fail",
            evidence={},
        )
    )
    hyper = EpsForm([[QQ.zero(), QQ.one()], [QQ.one(), QQ.zero()]], 1, QQ)
    W = Subspace([[QQ.one()], [QQ.zero()]])
    ok_split = is_lagrangian(hyper, W)
    try:
        split_sequence(hyper, W)
    except FormError:
        ok_split = False
    records.append(
        CheckRecord(
            name="witt-split-sequence",
            claim="a Lagrangian yields a split exact sequence whose two idempotents "
            "sum to the identity, verified exactly",
            status="pass" if ok_split else "fail",
            evidence={},
        )
    )
    return records


def battery_semiorth(cfg, field):
    records = []
    for r in cfg.r_values:
        m = cfg.m if cfg.m is not None else -(r + 1)
        sweep_ok = True
        sweep = {}
        for k in range(-r - 1, 1):
            try:
                got = ver.semiorth_dual_class(k, m, r=r, field=field)
            except ComplexError:
                sweep_ok = False
                got = None
            sweep[str(k)] = got
            if got != m - k:
                sweep_ok = False
        records.append(
            CheckRecord(
                name="semiorth-dual-class-r%d" % r,
                claim="the duality with twist m sends the single-twist class k to "
                "m - k, verified by dualizing one-term complexes",
                status="pass" if sweep_ok else "fail",
                evidence={"m": m, "classes": sweep},
            )
        )
        K = build_koszul(r, field)
        endpoints = []
        ok_quot = True
        for ell in range(-r - 1, 0):
            phi = build_phi(K, ell)
            good, ends = ver.quotient_vanishing(phi, r, ell)
            if not good:
                ok_quot = False
            endpoints.append((ell, ends))
        base = endpoints[0][1] if endpoints else None
        if any(e != base for _, e in endpoints):
            ok_quot = False
        records.append(
            CheckRecord(
                name="semiorth-quotient-vanishing-r%d" % r,
                claim="every interior cone term has twist in [-r, -1] (so it dies in "
                "the middle-class quotient) and the surviving endpoint terms, "
                "of twists -(r+1) and 0, are independent of the truncation level",
                status="pass" if ok_quot else "fail",
                evidence={"endpoints": {str(ell): {k: list(v) for k, v in e.items()} for ell, e in endpoints}},
            )
        )
    return records


class UsageError(Exception):
    pass


BATTERIES = {
    "signs": battery_signs,
    "koszul": battery_koszul,
    "pair": battery_pair,
    "witt": battery_witt,
    "semiorth": battery_semiorth,
}

DEFAULT_R = {
    "signs": "1",
    "koszul": "1:4",
    "pair": "2",
    "witt": "1",
    "semiorth": "1:3",
    "all": "1:3",
}

DEFAULT_FIELD = {
    "signs": "q",
    "koszul": "q",
    "pair": "fp:1000003",
    "witt": "q",
    "semiorth": "q",
    "all": "fp:1000003",
}


def build_parser():
    parser = _Parser(prog="koszulforms", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("signs", "koszul", "pair", "witt", "semiorth", "all"):
        p = sub.add_parser(name)
        p.add_argument("--r", default=None, help="projective dimension, N or LO:HI")
        p.add_argument("--field", default=None, help="q or fp:P")
        p.add_argument("--ell", type=int, default=None, help="truncation level override")
        p.add_argument("--m", type=int, default=None, help="duality twist parameter")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--prime", type=int, default=1000003)
        p.add_argument("--count", type=int, default=200, help="battery size for signs")
        p.add_argument("--split-spec", default=None, help="JSON or @file middle-split data")
        p.add_argument("--format", dest="fmt", choices=("json", "md"), default="json")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")
    return parser


def run(config):
    field = parse_field_spec(config.field_spec)
    if config.trials < 1:
        raise UsageError("trials must be >= 1")
    records = []
    if config.command == "all":
        for name in ("signs", "koszul", "pair", "witt", "semiorth"):
            records.extend(BATTERIES[name](config, field))
    else:
        records.extend(BATTERIES[config.command](config, field))
    return Report(config, records)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        r_values = _parse_r(args.r if args.r is not None else DEFAULT_R[args.command])
        field_spec = args.field if args.field is not None else DEFAULT_FIELD[args.command]
        parse_field_spec(field_spec)
        config = RunConfig(
            command=args.command,
            r_values=r_values,
            field_spec=field_spec,
            ell=args.ell,
            m=args.m,
            seed=args.seed,
            trials=args.trials,
            prime=args.prime,
            count=args.count,
            fmt=args.fmt,
            split_spec=args.split_spec,
        )
        report = run(config)
    except (UsageError, FieldError, ValueError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    payload = emit(report, config.fmt)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
