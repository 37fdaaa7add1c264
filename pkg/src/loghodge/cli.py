"""Batch front door: parse instances, dispatch computations, emit reports.

Output is a single JSON document on stdout (or a plain-text table with
--format text).  Exit codes: 0 success, 1 a checker verb found a violated
property, 2 bad input.  Identical input bytes produce identical output bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import decomposition as dec
from . import complexes as cx
from .errors import LogHodgeError, ParseError
from .model import canonical_json, imhs_check, load_model, validate

CHECKER_VERBS = {"validate", "imhs", "purity", "decompose", "duality", "link",
                 "corpus", "intersect"}


def _parse_z(text, model):
    if not text:
        return frozenset()
    try:
        idx = [int(t) for t in text.split(",") if t]
    except ValueError as exc:
        raise ParseError(f"--z must be comma-separated integers: {exc}") from exc
    for j in idx:
        if not 1 <= j <= model.branches:
            raise ParseError(f"branch index {j} out of range 1..{model.branches}")
    return frozenset(j - 1 for j in idx)


def _complex_for(model, kind, z):
    if kind == "omega":
        return cx.build_omega(model)
    if kind == "ic":
        return cx.build_ic(model)
    if kind == "iclog":
        return cx.build_ic_log(model, z)
    raise ParseError(f"unknown complex kind {kind!r}")


def _purity_complex(model, mode, z):
    if mode == "closed":
        return cx.i_star(model, z)
    if mode == "support":
        return cx.i_shriek(model, z)
    if mode == "open":
        return cx.build_ic_log(model, z)
    if mode == "compact":
        return cx.dualize(cx.build_ic_log(model, z), a=model.base_weight,
                          top=model.branches, pairing=model.pairing)
    if mode == "link":
        return cx.link_complex(model, z)
    raise ParseError(f"unknown purity mode {mode!r}")


def run_validate(model, args):
    rep = validate(model)
    return rep.to_json()["checks"], rep.passed


def run_imhs(model, args):
    rep = imhs_check(model, seed=args.seed)
    return rep.to_json()["checks"], rep.passed


def run_cohomology(model, args):
    z = _parse_z(args.z, model)
    c = _complex_for(model, args.complex, z)
    return cohomology_json(c), None


def cohomology_json(c):
    return cx.cohomology(c).to_json()


def run_filtration(model, args):
    return {"W": model.weight.to_json(),
            "graded_dims": {str(k): d
                            for k, d in model.weight.graded_dims().items()}}, None


def run_star(model, args):
    from .filtrations import star

    j = args.branch - 1
    if not 0 <= j < model.branches:
        raise ParseError(f"--branch {args.branch} out of range")
    out = star(model.nilpotent(j), model.weight)
    return {"star": out.to_json()}, None


def run_relmono(model, args):
    from .filtrations import relative_monodromy_filtration

    z = _parse_z(args.z or "", model) or frozenset(range(model.branches))
    n = model.nilpotent_sum(sorted(z))
    out = relative_monodromy_filtration(n, model.weight)
    return {"branches": sorted(j + 1 for j in z),
            "relative_monodromy": out.to_json()}, None


def run_decompose(model, args):
    z = _parse_z(args.z, model)
    which = args.complex
    if args.k is not None:
        weights = [args.k]
    else:
        om = cx.build_omega(model)
        labels = set()
        for k in om.degrees():
            if om.term_dim(k):
                labels.update(om.weight_at(k).jumps())
        weights = sorted(labels)
    results = []
    ok = True
    for k in weights:
        rep = dec.check_graded_decomposition(model, k, which, z)
        results.append({"k": k, **rep.to_json()})
        ok = ok and rep.passed
    return results, ok


def run_intersect(model, args):
    z = _parse_z(args.z, model)
    if not z:
        raise ParseError("intersect needs a nonempty --z")
    results = []
    ok = True
    for i in range(0, model.branches + 2):
        rep = dec.intersection_image(model, z, i)
        if rep.dim or not rep.passed:
            results.append(rep.to_json())
            ok = ok and rep.passed
    return results, ok


def run_purity(model, args):
    z = _parse_z(args.z, model) or frozenset(range(model.branches))
    shift = args.shift if args.shift is not None else model.perverse_shift
    c = _purity_complex(model, args.mode, z)
    verdict = dec.purity_check(cx.cohomology(c), model.base_weight, shift,
                               args.mode)
    return verdict.to_json(), verdict.passed


def run_link(model, args):
    z = _parse_z(args.z, model) or frozenset(range(model.branches))
    shift = args.shift if args.shift is not None else model.perverse_shift
    link = cx.link_complex(model, z)
    rep = cx.cohomology(link)
    verdict = dec.purity_check(rep, model.base_weight, shift, "link")
    return {"cohomology": rep.to_json(), "purity": verdict.to_json()}, \
        verdict.passed


def run_duality(model, args):
    z = _parse_z(args.z, model) or frozenset(range(model.branches))
    a = model.base_weight
    results = []
    ok = True
    for kind in ("omega", "ic"):
        c = _complex_for(model, kind, z)
        base = cx.cohomology(c).profile()
        double = cx.cohomology(
            cx.dualize(cx.dualize(c, a=a), a=a)).profile()
        good = base == double
        ok = ok and good
        results.append({"check": f"double_dual[{kind}]",
                        "status": "pass" if good else "fail"})
    if model.pairing is not None and model.branches == 1:
        # self-duality of the link reflection needs a compact stratum, which
        # the local germ provides only for a single branch
        link = cx.link_complex(model, z)
        rep = cx.cohomology(link)
        m = model.perverse_shift
        good = True
        for k in rep.nonzero_degrees():
            k2 = 2 * m - 1 - k
            prof = rep.degrees[k].weight_profile()
            other = rep.degrees[k2].weight_profile() if k2 in rep.degrees else {}
            reflected = {}
            for w, d in other.items():
                reflected[2 * a + 1 - w] = d
            if prof != reflected:
                good = False
        ok = ok and good
        results.append({"check": "link_self_duality",
                        "status": "pass" if good else "fail"})
    elif model.pairing is not None:
        results.append({"check": "link_self_duality", "status": "skip"})
    return results, ok


def run_corpus(args):
    root = Path(args.input)
    if not root.is_dir():
        raise ParseError(f"corpus path {root} is not a directory")
    paths = sorted(p for p in root.glob("*.json")
                   if not p.name.endswith(".expected.json"))
    if not paths:
        raise ParseError(f"no instances found in {root}")

    def one(path):
        return path, corpus_entry(str(path), args.seed)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            produced = dict(pool.map(one, paths))
    else:
        produced = dict(one(p) for p in paths)
    results = []
    ok = True
    for path in paths:
        entry = produced[path]
        expected_path = path.parent / (path.stem + ".expected.json")
        row = {"instance": str(path)}
        if not expected_path.exists():
            row["status"] = "fail"
            row["detail"] = "missing expected report"
            ok = False
        else:
            want = json.loads(expected_path.read_text())
            if want == entry:
                row["status"] = "pass"
            else:
                row["status"] = "fail"
                row["detail"] = "report differs from committed expectation"
                ok = False
        results.append(row)
    return results, ok


def corpus_entry(path: str, seed: int = 0) -> dict:
    """The standard battery replayed by the corpus verb."""
    model = load_model(path)
    entry = {"validate": validate(model).to_json()}
    entry["cohomology"] = {
        "omega": cohomology_json(cx.build_omega(model)),
        "ic": cohomology_json(cx.build_ic(model)),
    }
    if model.hodge is not None:
        entry["imhs"] = imhs_check(model, seed=seed).to_json()
    if model.pairing is not None and model.branches:
        z = frozenset(range(model.branches))
        entry["purity"] = {}
        for mode in ("closed", "support", "open", "compact"):
            c = _purity_complex(model, mode, z)
            entry["purity"][mode] = dec.purity_check(
                cx.cohomology(c), model.base_weight, model.perverse_shift,
                mode).to_json()
        link = cx.link_complex(model, z)
        entry["link"] = cohomology_json(link)
    return entry


VERBS = {
    "validate": run_validate,
    "imhs": run_imhs,
    "cohomology": run_cohomology,
    "filtration": run_filtration,
    "star": run_star,
    "relmono": run_relmono,
    "decompose": run_decompose,
    "intersect": run_intersect,
    "purity": run_purity,
    "link": run_link,
    "duality": run_duality,
}


def build_parser():
    ap = argparse.ArgumentParser(
        prog="loghodge",
        description="Exact checks for local weight/purity structure near a "
                    "normal crossing point.")
    sub = ap.add_subparsers(dest="verb", required=True)
    for verb in list(VERBS) + ["corpus"]:
        p = sub.add_parser(verb)
        p.add_argument("input", help="instance file (directory for corpus)")
        p.add_argument("--z", default="",
                       help="comma-separated 1-based branch indices")
        p.add_argument("--complex", default="omega",
                       choices=["omega", "ic", "iclog"])
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--mode", default="closed",
                       choices=["open", "support", "closed", "compact", "link"])
        p.add_argument("--shift", type=int, default=None)
        p.add_argument("--branch", type=int, default=1)
        p.add_argument("--format", default="json", choices=["json", "text"])
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1)
    return ap


def _render_text(doc, out):
    def walk(prefix, node):
        if isinstance(node, dict):
            for key in node:
                walk(f"{prefix}{key}.", node[key])
        elif isinstance(node, list):
            for i, item in enumerate(node):
                walk(f"{prefix}{i}.", item)
        else:
            out.write(f"{prefix[:-1]:<48} {node}\n")

    walk("", doc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    doc = {"instance": args.input, "verb": args.verb}
    try:
        if args.verb == "corpus":
            results, passed = run_corpus(args)
        else:
            model = load_model(args.input)
            results, passed = VERBS[args.verb](model, args)
        doc["results"] = results
        doc["verdict"] = "pass" if passed in (True, None) else "fail"
    except ParseError as exc:
        doc["error"] = str(exc)
        doc["verdict"] = "error"
        _emit(doc, args)
        return 2
    except LogHodgeError as exc:
        doc["error"] = f"{type(exc).__module__}.{type(exc).__name__}: {exc}"
        doc["verdict"] = "error"
        _emit(doc, args)
        return 2
    _emit(doc, args)
    if args.verb in CHECKER_VERBS and passed is False:
        return 1
    return 0


def _emit(doc, args):
    if args.format == "text":
        _render_text(doc, sys.stdout)
    else:
        sys.stdout.write(canonical_json(doc))


if __name__ == "__main__":
    sys.exit(main())
