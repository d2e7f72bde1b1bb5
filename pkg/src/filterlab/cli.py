"""Command line: one subcommand per module, plain text or ``--json`` reports.

Exit codes: 0 proved/success, 1 refuted, 2 unknown, 3 usage or parse error.
The default horizon comes from FILTERLAB_HORIZON (else 10000).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Optional, Sequence

from . import __version__
from . import convergence as cv
from . import cpgame as cg
from . import filters as fl
from . import measure as ms
from . import oracle as orc
from . import pseudo as ps
from . import sets as st
from .expr import ParseError, parse_filter, parse_partition, parse_set
from .verdict import Verdict, jsonable

REPORT_SCHEMA = "filterlab.report/1"
EXIT = {"proved": 0, "success": 0, "refuted": 1, "unknown": 2}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def default_horizon() -> int:
    try:
        return int(os.environ.get("FILTERLAB_HORIZON", "10000"))
    except ValueError:
        raise UsageError("FILTERLAB_HORIZON must be an integer")


def _sizes(text: str):
    try:
        return parse_partition(text)
    except ValueError as e:
        raise UsageError(str(e))


# -- handlers: each returns (status, inputs, result) ---------------------------
def _verdict(v: Verdict):
    return v.status.value, v.to_json()


def cmd_sets(a):
    A = parse_set(a.expr)
    inputs = {"set": A.render()}
    if a.op == "member":
        r = st.member(A, a.n)
        return ("proved" if r else "refuted"), {**inputs, "n": a.n}, {"member": r}
    if a.op == "count":
        P = _sizes(a.sizes)
        return "success", {**inputs, "sizes": P.render(), "block": a.block}, {
            "count": st.block_count(A, P, a.block)}
    v = st.is_cofinite(A) if a.op == "cofinite" else st.is_infinite(A)
    s, r = _verdict(v)
    return s, inputs, r


def cmd_filters(a):
    F = parse_filter(a.filter)
    inputs = {"filter": F.render()}
    if a.op in ("member", "coideal"):
        A = parse_set(a.set)
        inputs["set"] = A.render()
        v = (fl.filter_member if a.op == "member" else fl.coideal_member)(F, A)
        s, r = _verdict(v)
        return s, inputs, r
    if a.op == "restrict":
        A = parse_set(a.set)
        inputs["set"] = A.render()
        try:
            G = fl.restrict(F, A)
        except fl.NotInCoideal as e:
            return e.verdict.status.value, inputs, {"error": "not in the co-ideal", **e.verdict.to_json()}
        return "success", inputs, {"restriction": G.render()}
    if a.op == "push":
        P = _sizes(a.sizes)
        inputs["sizes"] = P.render()
        return "success", inputs, {"pushforward": fl.pushforward(F, P).render()}
    # witness
    h = a.horizon or default_horizon()
    inputs["horizon"] = h
    v = fl.find_meagerness_witness(F, h)
    s, r = _verdict(v)
    return s, inputs, r


def cmd_pseudo(a):
    if a.op == "lemma1":
        P = _sizes(a.sizes)
        gens = tuple(parse_set(g) for g in a.gen)
        index = parse_set(a.index)
        bound = a.bound or max(P.prefix + (P.c,))
        inst = ps.BoundedBlockInstance(index, P, bound, gens)
        inputs = {"sizes": P.render(), "index": index.render(), "bound": bound,
                  "generators": [g.render() for g in gens]}
        try:
            cert = ps.lemma1_pseudointersection(inst)
        except ps.InvalidInstance as e:
            return "refuted", inputs, {"error": str(e), **jsonable(e.detail)}
        v = ps.verify_pseudointersection(cert, gens, a.horizon or default_horizon())
        return v.status.value, inputs, {**cert.to_json(), "verification": v.to_json()}
    if a.op == "laf":
        chain = [parse_set(x) for x in a.chain]
        inputs = {"weights": a.weights, "chain": [c.render() for c in chain],
                  "require": "coideal" if a.coideal else "filter"}
        try:
            cert = ps.laf_pseudointersection(a.weights, chain, require=inputs["require"])
        except ps.SegmentSearchExhausted as e:
            return "unknown", inputs, {"partial": e.partial}
        except ValueError as e:
            return "refuted", inputs, {"error": str(e)}
        return "proved", inputs, cert.to_json()
    # fubini
    D = parse_set(a.candidate)
    inputs = {"candidate": D.render()}
    try:
        r = ps.fubini_refute(D)
    except ps.PreconditionFailed as e:
        return "refuted", inputs, {"error": str(e), "violated_k": e.k}
    return "success", inputs, {**r.to_json(), "verified": ps.verify_fubini_refutation(r)}


def cmd_measure(a):
    P = _sizes(a.sizes)
    inputs = {"sizes": P.render()}
    if a.op == "exact":
        inputs.update({"from": a.from_, "factors": a.factors})
        if a.factors < 1 or a.from_ < 0:
            raise UsageError("--factors must be >= 1 and --from >= 0")
        pp = ms.partial_product(P, a.from_, a.factors) if P.size(a.from_ + a.factors - 1) <= ms.EXACT_SIZE_CAP else None
        return "success", inputs, {"partial_product": None if pp is None else str(pp),
                                   **ms.block_family_measure(P, a.from_, a.factors).to_json()}
    if a.op == "null-cert":
        s, r = _verdict(ms.is_null_certificate(P))
        return s, inputs, r
    if a.samples < 1 or a.factors < 1 or a.from_ < 0:
        raise UsageError("--samples and --factors must be >= 1, --from >= 0")
    inputs.update({"from": a.from_, "factors": a.factors, "samples": a.samples})
    est = ms.monte_carlo_measure(P, a.from_, a.factors, a.samples, a.seed)
    exact = ms.partial_product(P, a.from_, a.factors)
    return "success", inputs, {**est.to_json(), "exact_partial_product": str(exact),
                               "deviation_in_stderr": (abs(est.estimate - float(exact)) / est.stderr
                                                       if est.stderr else None)}


def cmd_converge(a):
    if a.op == "refute-network":
        return cmd_refute_network(a)
    if a.op == "build":
        P = _sizes(a.sizes)
        net = cv.INetworkPresentation(tuple(parse_set(x) for x in a.network))
        space = cv.FilterSpace(parse_filter(a.space))
        h = a.horizon or default_horizon()
        rep = cv.theorem1_sequence(net, P, h, space)
        inputs = {"network": [x.render() for x in net.sets], "sizes": P.render(), "horizon": h,
                  "space": space.neighborhood_filter.render()}
        out = rep.to_json()
        if rep.verdict.proved_:
            conv = cv.f_converges(rep.sequence, "inf", rep.filter, space, len(net.sets) or 1)
            out["f_converges"] = conv.to_json()
        return rep.verdict.status.value, inputs, out
    seq = cv.parse_sequence(a.seq)
    if not (a.space or a.filter):
        raise UsageError("give --filter, --space or both")
    space = cv.FilterSpace(parse_filter(a.space or a.filter))
    F = parse_filter(a.filter) if a.filter else space.neighborhood_filter
    if a.op == "check":
        limit = "inf" if a.limit == "inf" else int(a.limit)
        inputs = {"filter": F.render(), "seq": seq.render(), "space": space.neighborhood_filter.render(),
                  "limit": limit, "budget": a.budget}
        s, r = _verdict(cv.f_converges(seq, limit, F, space, a.budget))
        return s, inputs, r
    if a.op == "subseq":
        P = _sizes(a.sizes)
        inputs = {"filter": F.render(), "seq": seq.render(), "sizes": P.render(), "budget": a.budget}
        try:
            rep = cv.convergent_subsequence(seq, F, P, space, budget=a.budget,
                                            horizon=a.horizon or default_horizon())
        except cv.NotApplicable as e:
            return "refuted", inputs, {"error": str(e)}
        return rep.verdict.status.value, inputs, rep.to_json()
    raise UsageError(a.op)


def cmd_refute_network(a):
    cands = [parse_set(x) for x in a.candidate]
    rep = cv.density_diagonal_refuter(cands, a.budget)
    return rep.verdict.status.value, {"candidates": [c.render() for c in cands]}, rep.to_json()


def cmd_cpgame(a):
    if a.op == "verify":
        with open(a.transcript) as fh:
            text = fh.read()
        s, r = _verdict(cg.verify_transcript(text))
        return s, {"transcript": a.transcript}, r
    P = _sizes(a.sizes)
    T = cg.play_game(cg.seeded_adversary(a.seed), a.rounds, P, cv.Identity(), a.seed)
    text = T.dumps()
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text)
    ok = all(x == "refuted" for x in T.final_checks)
    return ("success" if ok else "refuted"), {"rounds": a.rounds, "sizes": P.render()}, T.to_json()


def cmd_oracle(a):
    if a.op == "measure":
        sizes = [int(x) for x in a.sizes.replace("/", ",").split(",") if x]
        return "success", {"sizes": sizes}, {"measure": str(orc.oracle_measure(sizes))}
    if a.op == "cn":
        sizes = [int(x) for x in a.blocks.split(",") if x]
        vals = [int(c) for c in a.values]
        r = orc.oracle_cn(vals, a.tail, a.limit, a.n, sizes)
        return ("proved" if r else "refuted"), {"values": a.values, "tail": a.tail, "limit": a.limit,
                                                "n": a.n, "blocks": sizes}, {"member": r}
    gens = [orc.TruncSet(tuple(c == "1" for c in g)) for g in a.gens]
    blocks = [[int(x) for x in b.split("-")] for b in a.blocks]
    blocks = [list(range(b[0], b[-1] + 1)) for b in blocks]
    r = orc.oracle_pseudointersection(gens, blocks, a.N)
    return ("success" if r.hypotheses_hold else "refuted"), {"gens": a.gens, "blocks": blocks, "N": a.N}, {
        "hypotheses_hold": r.hypotheses_hold, "points": list(r.points),
        "valid": [[r.points[j] for j in range(len(r.points)) if m >> j & 1] for m in r.valid_masks.tolist()]}


# -- parser -------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="filterlab", description="Experiments with filters on omega.")
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.add_argument("--version", action="version", version=f"filterlab {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("sets", help="membership, block counts, cofiniteness")
    ss = s.add_subparsers(dest="op", required=True, parser_class=_Parser)
    x = ss.add_parser("member"); x.add_argument("expr"); x.add_argument("n", type=int)
    x = ss.add_parser("count"); x.add_argument("expr"); x.add_argument("--sizes", required=True)
    x.add_argument("--block", type=int, required=True)
    for name in ("cofinite", "infinite"):
        ss.add_parser(name).add_argument("expr")
    s.set_defaults(fn=cmd_sets)

    f = sub.add_parser("filters", help="filter membership, co-ideal, witnesses")
    fs = f.add_subparsers(dest="op", required=True, parser_class=_Parser)
    for name in ("member", "coideal", "restrict"):
        x = fs.add_parser(name); x.add_argument("--filter", required=True); x.add_argument("--set", required=True)
    x = fs.add_parser("push"); x.add_argument("--filter", required=True); x.add_argument("--sizes", required=True)
    x = fs.add_parser("witness"); x.add_argument("--filter", required=True); x.add_argument("--horizon", type=int)
    f.set_defaults(fn=cmd_filters)

    q = sub.add_parser("pseudo", help="pseudointersections")
    qs = q.add_subparsers(dest="op", required=True, parser_class=_Parser)
    x = qs.add_parser("lemma1"); x.add_argument("--sizes", required=True)
    x.add_argument("--gen", action="append", default=[]); x.add_argument("--index", default="omega")
    x.add_argument("--bound", type=int); x.add_argument("--horizon", type=int)
    x = qs.add_parser("laf"); x.add_argument("--weights", default="harmonic", choices=["harmonic", "counting"])
    x.add_argument("--chain", action="append", required=True)
    x.add_argument("--coideal", action="store_true", help="only require the chain in the co-ideal")
    x = qs.add_parser("fubini"); x.add_argument("--candidate", required=True)
    q.set_defaults(fn=cmd_pseudo)

    m = sub.add_parser("measure", help="Haar measure of block-hitting families")
    msub = m.add_subparsers(dest="op", required=True, parser_class=_Parser)
    for name in ("exact", "null-cert", "mc"):
        x = msub.add_parser(name); x.add_argument("--sizes", required=True)
        if name != "null-cert":
            x.add_argument("--from", dest="from_", type=int, default=0)
            x.add_argument("--factors", type=int, default=10)
        if name == "mc":
            x.add_argument("--samples", type=int, default=100_000)
            x.add_argument("--seed", type=int, default=0)
    m.set_defaults(fn=cmd_measure)

    c = sub.add_parser("converge", help="filter convergence")
    cs = c.add_subparsers(dest="op", required=True, parser_class=_Parser)
    x = cs.add_parser("build"); x.add_argument("--network", action="append", required=True)
    x.add_argument("--sizes", default="n+1"); x.add_argument("--horizon", type=int)
    x.add_argument("--space", default="frechet")
    x = cs.add_parser("check"); x.add_argument("--filter"); x.add_argument("--seq", default="identity")
    x.add_argument("--space", help="neighborhood filter of inf (default: --filter)"); x.add_argument("--limit", default="inf")
    x.add_argument("--budget", type=int, default=20)
    x = cs.add_parser("subseq"); x.add_argument("--filter"); x.add_argument("--seq", default="identity")
    x.add_argument("--space", help="neighborhood filter of inf (default: --filter)"); x.add_argument("--sizes", default="const:2")
    x.add_argument("--budget", type=int, default=20); x.add_argument("--horizon", type=int)
    x = cs.add_parser("refute-network"); x.add_argument("--candidate", action="append", default=[])
    x.add_argument("--budget", type=int, default=10 ** 6)
    c.set_defaults(fn=cmd_converge)

    g = sub.add_parser("cpgame", help="the nowhere-density game")
    gs = g.add_subparsers(dest="op", required=True, parser_class=_Parser)
    x = gs.add_parser("play"); x.add_argument("--rounds", type=int, default=5)
    x.add_argument("--seed", type=int, default=0); x.add_argument("--sizes", default="n+1")
    x.add_argument("--out")
    x = gs.add_parser("verify"); x.add_argument("transcript")
    g.set_defaults(fn=cmd_cpgame)

    o = sub.add_parser("oracle", help="brute-force checks")
    osub = o.add_subparsers(dest="op", required=True, parser_class=_Parser)
    x = osub.add_parser("measure"); x.add_argument("--sizes", required=True)
    x = osub.add_parser("cn"); x.add_argument("--values", required=True)
    x.add_argument("--tail", type=int, required=True); x.add_argument("--limit", type=int, required=True)
    x.add_argument("--n", type=int, default=0); x.add_argument("--blocks", required=True)
    x = osub.add_parser("pseudo"); x.add_argument("--gens", nargs="*", default=[])
    x.add_argument("--blocks", nargs="+", required=True); x.add_argument("--N", type=int, required=True)
    o.set_defaults(fn=cmd_oracle)
    return p


def _summary(status: str, result) -> str:
    lines = [f"status: {status}"]
    if isinstance(result, dict):
        for k, v in result.items():
            if k in ("status",):
                continue
            text = json.dumps(jsonable(v), sort_keys=True)
            lines.append(f"{k}: {text if len(text) <= 160 else text[:157] + '...'}")
    return "\n".join(lines)


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    t0 = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        status, inputs, result = args.fn(args)
    except (UsageError, ParseError) as e:
        print(f"filterlab: {e}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as e:
        # unreadable files and inputs that break an operation's precondition
        print(f"filterlab: {e}", file=sys.stderr)
        return 3
    report = {
        "schema": REPORT_SCHEMA, "tool_version": __version__, "command": argv,
        "inputs": jsonable(inputs), "status": status, "result": jsonable(result),
        "seed": getattr(args, "seed", None),
        "timing": {"seconds": round(time.perf_counter() - t0, 6)},
    }
    if args.json:
        out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    else:
        out.write(_summary(status, result) + "\n")
    return EXIT[status]


def main() -> None:
    sys.exit(run())
