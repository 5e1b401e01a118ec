"""Command line front end.

    stratkit COMMAND -i FILE [--json] [--order lex|grevlex] [--budget N] [--seed N]

Exit codes: 0 success, 1 a verification reported a violation, 2 error
(bad input or the reduction-step budget ran out).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from typing import Callable

from . import csets, mapanalysis as ma, thomstrat as ts
from .corpus import FIXTURES, fixture_text
from .ideals import ResourceLimitError, step_budget
from .parsing import MapParseError, parse_map, render_map
from .polycore import GREVLEX, LEX, PolyMap, determinant, jacobian

COMMANDS = ("jacobian", "singular-locus", "critical-values", "asymptotic-set", "dominant",
            "proper", "leading-forms", "thom-partition", "stratify", "verify", "conjecture",
            "corpus")


class Violation(Exception):
    pass


def _ideal_text(I) -> str:
    if I.is_unit():
        return "<1>"
    return "<" + ", ".join(I.strings()) + ">" if I.generators else "<0>"


def _cset_lines(c) -> list[str]:
    if not c.pieces:
        return ["  (empty)"]
    return [f"  dim {p.dim()}: {p}" for p in c.pieces]


# Each command returns (results dict, human text lines, violation flag).

def cmd_jacobian(F: PolyMap, args, out: dict):
    J = jacobian(F)
    out["jacobian"] = [[str(e) for e in row] for row in J.to_rows()]
    lines = ["jacobian:"] + ["  [" + ", ".join(r) + "]" for r in out["jacobian"]]
    if F.is_square():
        out["determinant"] = str(determinant(J))
        lines.append(f"determinant: {out['determinant']}")
    return lines, False


def cmd_singular_locus(F, args, out):
    I = ma.singular_locus(F)
    out["sing"] = I.strings()
    return [f"singular locus: V{_ideal_text(I)}"], False


def cmd_critical_values(F, args, out):
    closure, k0 = ma.critical_values(F)
    out["k0_closure"] = closure.strings()
    out["k0_pieces"] = k0.to_json()
    return [f"closure of K0: V{_ideal_text(closure)}", "K0 pieces:"] + _cset_lines(k0), False


def cmd_asymptotic_set(F, args, out):
    sf = ma.asymptotic_set(F)
    out["sf"] = sf.strings()
    out["sf_dim"] = ma.dimension(sf)
    return [f"S_F: V{_ideal_text(sf)}", f"dim S_F: {out['sf_dim']}"], False


def cmd_dominant(F, args, out):
    out["dominant"] = ma.is_dominant(F)
    return [f"dominant: {str(out['dominant']).lower()}"], False


def cmd_proper(F, args, out):
    jel = ma.check_jelonek(F)
    out["proper"] = jel.proper
    out["jelonek"] = jel.to_json()
    return [f"proper: {str(jel.proper).lower()}", f"dim S_F: {jel.sf_dim}",
            f"jelonek dichotomy: {'ok' if jel.ok else 'VIOLATED'}"], False


def cmd_leading_forms(F, args, out):
    lead = ma.leading_form_data(F)
    out["leading"] = lead.to_json()
    lines = ["leading forms:"] + [f"  {f}" for f in lead.forms]
    lines.append(f"generic rank of D F^: {lead.generic_rank} (>= n-1: {lead.rank_condition_ok})")
    lines.append(f"dim V(F^): {lead.v_dim} (<= 1: {lead.v_dim_ok})")
    lines.append(f"corank {lead.corank} {'agrees with' if lead.corank_agrees else 'differs from'} dim V(F^)")
    return lines, False


def cmd_thom_partition(F, args, out):
    table = ts.thom_partition(F)
    out["thom"] = [w.to_json() for w in table]
    lines = []
    for w in table:
        i, k, j = w.labels
        lines.append(f"W^{{{i},{k}}}_{j}: closure V{_ideal_text(w.image_closure)}"
                     f"  from {w.source.piece}")
    return lines or ["no critical points"], False


def cmd_stratify(F, args, out):
    st = ts.stratify_union(F)
    out.update(ts.stratification_json(F, st))
    lines = [f"{s.id} [{s.origin}] dim {s.dim}: {s.piece}" for s in st.strata] or ["(empty)"]
    lines.append("filtration: " + " > ".join("V" + _ideal_text(I) for I in st.filtration))
    lines.append(f"frontier condition: {'ok' if st.frontier.ok else 'VIOLATED'}")
    return lines, False


def _coherence(F: PolyMap, seed: int, count: int = 20) -> list[str]:
    """Exact K0 membership against fiber tests at sampled target points."""
    rng = random.Random(seed)
    _, k0 = ma.critical_values(F)
    sing = ma.singular_locus(F)
    pts = []
    for p in csets.CSet.closed(sing).pieces:
        pts += [F.evaluate(x) for x in csets.sample_points(p, count // 2, seed=seed)]
    while len(pts) < count:
        pts.append(tuple(rng.randint(-3, 3) for _ in F.targets))
    bad = []
    for a in pts:
        if k0.contains_point(a) != ma.point_in_image(F, sing, a):
            bad.append(f"K0 membership disagrees with the fiber test at {tuple(str(v) for v in a)}")
    return bad


def cmd_verify(F, args, out):
    closed = ts.verify_closedness(F)
    st = ts.stratify_union(F)
    jel = ma.check_jelonek(F)
    coherence = _coherence(F, args.seed)
    out["closedness"] = closed.to_json()
    out["frontier"] = st.frontier.to_json()
    out["jelonek"] = jel.to_json()
    out["transversality"] = [t.to_json() for t in st.transversality]
    out["k0_coherence"] = {"ok": not coherence, "violations": coherence}
    bad = (not closed.ok) or (not st.frontier.ok) or (not jel.ok) or bool(coherence)
    out["ok"] = not bad
    statuses = {}
    for t in st.transversality:
        statuses[t.status] = statuses.get(t.status, 0) + 1
    lines = [
        f"closedness: {'ok' if closed.ok else 'VIOLATED'}",
        f"frontier condition: {'ok' if st.frontier.ok else 'VIOLATED'}",
        f"jelonek dichotomy: {'ok' if jel.ok else 'VIOLATED'}",
        f"K0 membership vs fiber tests: {'ok' if not coherence else 'VIOLATED'}",
        "transversality (reported only): " + (", ".join(f"{k} {v}" for k, v in sorted(statuses.items())) or "no pairs"),
    ]
    lines += [f"  {w}" for w in closed.witnesses + st.frontier.violations] + [f"  {c}" for c in coherence]
    return lines, bad


def cmd_conjecture(F, args, out):
    rep = ts.check_conjecture(F)
    out["conjecture"] = rep.to_json()
    out["purity"] = rep.purity.to_json()
    return [f"dominant: {str(rep.dominant).lower()}",
            f"K0 u S_F pure dimensional: {str(rep.pure).lower()} (dim {rep.dim}, piece dims {list(rep.dims)})",
            f"K0 alone pure dimensional: {str(rep.k0_pure).lower()} (piece dims {list(rep.k0_dims)})"], False


HANDLERS: dict[str, Callable] = {
    "jacobian": cmd_jacobian,
    "singular-locus": cmd_singular_locus,
    "critical-values": cmd_critical_values,
    "asymptotic-set": cmd_asymptotic_set,
    "dominant": cmd_dominant,
    "proper": cmd_proper,
    "leading-forms": cmd_leading_forms,
    "thom-partition": cmd_thom_partition,
    "stratify": cmd_stratify,
    "verify": cmd_verify,
    "conjecture": cmd_conjecture,
}

NEEDS_SQUARE = set(HANDLERS) - {"jacobian"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stratkit", description=__doc__.splitlines()[0] if __doc__ else None)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("-i", "--input", help="map file ('-' for standard input)")
    ap.add_argument("--json", action="store_true", help="emit a JSON report")
    ap.add_argument("--order", choices=("grevlex", "lex"), default="grevlex")
    ap.add_argument("--budget", type=int, default=None, help="reduction-step cap")
    ap.add_argument("--seed", type=int, default=0, help="seed for point sampling")
    ap.add_argument("--rectangular", action="store_true",
                    help="allow component count != variable count (jacobian only)")
    ap.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    return ap


def _read_input(path: str | None) -> str:
    if path is None:
        raise ValueError("an input map is required (-i FILE)")
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _run_one(command: str, text: str, args) -> tuple[dict, list[str], int]:
    report = {"command": command, "input_digest": hashlib.sha256(text.encode()).hexdigest(),
              "results": {}, "limits_hit": []}
    order = LEX if args.order == "lex" else GREVLEX
    t0 = time.perf_counter()
    try:
        F = parse_map(text, rectangular=args.rectangular, order=order)
        report["map"] = render_map(F)
        if command in NEEDS_SQUARE:
            F.require_square()
        with step_budget(args.budget) as budget:
            lines, bad = HANDLERS[command](F, args, report["results"])
            report["reduction_steps"] = budget.used
        code = 1 if bad else 0
    except ResourceLimitError as err:
        report["limits_hit"].append(str(err))
        report["error"] = str(err)
        lines, code = [f"error: {err}"], 2
    except (MapParseError, ValueError) as err:
        report["error"] = str(err)
        lines, code = [f"error: {err}"], 2
    if args.timings:
        report["timings"] = {"total_s": round(time.perf_counter() - t0, 3)}
    report["exit_code"] = code
    return report, lines, code


def run_corpus(args) -> tuple[dict, list[str], int]:
    results, lines, worst = {}, [], 0
    for name in FIXTURES:
        rep, _, code = _run_one("verify", fixture_text(name), args)
        strat, _, scode = _run_one("stratify", fixture_text(name), args)
        conj, _, ccode = _run_one("conjecture", fixture_text(name), args)
        rep["stratification"] = strat["results"]
        rep["conjecture"] = conj["results"].get("conjecture")
        results[name] = rep
        code = max(code, scode, ccode)
        worst = max(worst, code)
        counts = {}
        for s in strat["results"].get("strata", []):
            counts[s["dim"]] = counts.get(s["dim"], 0) + 1
        status = {0: "ok", 1: "VIOLATION", 2: "ERROR"}[code]
        lines.append(f"{name:20s} {status:9s} strata by dim {dict(sorted(counts.items(), reverse=True))}")
    return {"command": "corpus", "fixtures": results, "exit_code": worst}, lines, worst


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "corpus":
        report, lines, code = run_corpus(args)
    else:
        try:
            text = _read_input(args.input)
        except (OSError, ValueError) as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
        report, lines, code = _run_one(args.command, text, args)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
