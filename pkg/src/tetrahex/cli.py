"""Command-line frontend.

Commands: search, verify, classify, iso, aut, canon,
catalog {list,verify,export}.  Exit codes are a stable contract:
0 ok, 1 negative verdict, 2 input error, 3 enumeration capped.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import catalog
from .canon import (automorphism_group, canonical_certificate, iso_reduce)
from .classify import classify
from .designs import SetSystem, admissible_v, verify_twbd
from .kmsearch import SearchConfig, run_search, search_designs
from .perms import PermGroup

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_CAPPED = 3


def _load_design(path: str) -> SetSystem:
    return SetSystem.from_file(path)


def _print_json(doc) -> None:
    print(json.dumps(doc, separators=(",", ":")))


def _resolve_group(args) -> PermGroup:
    if args.catalog_group:
        return catalog.base_group(args.catalog_group)
    return PermGroup.from_file(args.group)


def cmd_search(args) -> int:
    try:
        group = _resolve_group(args)
    except Exception as exc:
        print(f"error: cannot load group: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.v is not None and args.v != group.degree:
        print(f"error: --v {args.v} does not match group degree {group.degree}",
              file=sys.stderr)
        return EXIT_INPUT
    if not admissible_v(group.degree):
        print(f"error: v={group.degree} is inadmissible "
              "(need v congruent to 2 or 4 mod 6 and v >= 16)", file=sys.stderr)
        return EXIT_INPUT
    if not group.is_transitive():
        print("error: the prescribed group must be transitive", file=sys.stderr)
        return EXIT_INPUT
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = SearchConfig(
        two_class_only=args.two_class_only,
        solution_limit=args.limit,
        candidate_limit=args.candidates,
        libexact_dir=str(out) if args.libexact_format else None,
    )
    if args.jobs == 1:
        search = search_designs(group, config)
        designs = []
        with open(out / "designs.jsonl", "w", encoding="utf-8") as fh:
            for design in search:
                fh.write(design.dumps() + "\n")
                designs.append(design)
        stats = search.stats
    else:
        designs, stats = run_search(group, config, jobs=args.jobs)
        with open(out / "designs.jsonl", "w", encoding="utf-8") as fh:
            for design in designs:
                fh.write(design.dumps() + "\n")
    cert_cache: dict[str, int] = {}
    cache_path = out / "certificates.json"
    if cache_path.exists():
        cert_cache.update(json.loads(cache_path.read_text(encoding="utf-8")))
    classes = iso_reduce(designs, cache=cert_cache)
    cache_path.write_text(json.dumps(cert_cache, indent=0, sort_keys=True) + "\n",
                          encoding="utf-8")
    with open(out / "classes.jsonl", "w", encoding="utf-8") as fh:
        for cls in classes:
            doc = cls.representative.to_json_dict()
            doc["count"] = cls.count
            doc["certificate"] = cls.certificate.hex()
            fh.write(json.dumps(doc, separators=(",", ":")) + "\n")
    summary = {
        "v": group.degree,
        "generators": [repr(g) for g in group.generators],
        "seed": args.seed,
        "classes": len(classes),
        **stats.to_json_dict(),
    }
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"candidates: {stats.candidates_valid} "
          f"(of {stats.candidates_considered} size-matched)")
    print(f"solutions:  {stats.solutions}")
    print(f"designs:    {stats.emitted}")
    print(f"classes:    {len(classes)}")
    if stats.truncated:
        print("warning: enumeration capped; results are partial", file=sys.stderr)
        return EXIT_CAPPED
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        design = _load_design(args.design)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    v = design.v
    hexads = design.blocks_of_size(6)
    balance = verify_twbd(design, 3, {4, 6}, 1)
    homogeneous = bool(balance) and len(hexads) == v
    doc = {
        "v": v,
        "blocks": len(design.blocks),
        "hexads": len(hexads),
        "tetrads": len(design.blocks_of_size(4)),
        "balanced": bool(balance),
        "homogeneous": homogeneous,
    }
    if not balance:
        doc["witness"] = list(balance.witness) if balance.witness else None
        doc["witness_count"] = balance.count
        doc["reason"] = balance.reason
    _print_json(doc)
    if balance and homogeneous:
        print(f"valid homogeneous 3-({v},{{4,6}},1) design")
        return EXIT_OK
    print("verification FAILED:",
          balance.reason if not balance else "hexad count differs from v")
    return EXIT_NEGATIVE


def cmd_classify(args) -> int:
    try:
        design = _load_design(args.design)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    hexads = design.blocks_of_size(6)
    target = design if not hexads or len(hexads) == len(design.blocks) \
        else SetSystem(design.v, hexads)
    verdict = classify(target)
    _print_json(verdict.to_json_dict())
    tag = verdict.tag()
    if tag == "sbp":
        k = len(target.blocks[0])
        print(f"semi-biplane sbp({verdict.v},{k})")
    elif tag == "biplane":
        print(f"biplane 2-({verdict.v},{len(target.blocks[0])},2)")
    else:
        print(tag)
    return EXIT_OK


def cmd_iso(args) -> int:
    try:
        a = _load_design(args.design_a)
        b = _load_design(args.design_b)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    from .canon import are_isomorphic

    same = are_isomorphic(a, b)
    _print_json({"isomorphic": same})
    print("isomorphic" if same else "non-isomorphic")
    return EXIT_OK if same else EXIT_NEGATIVE


def cmd_aut(args) -> int:
    try:
        design = _load_design(args.design)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    group, order = automorphism_group(design)
    _print_json({"order": order,
                 "generators": [repr(g) for g in group.generators]})
    print(f"automorphism group order {order}")
    return EXIT_OK


def cmd_canon(args) -> int:
    try:
        design = _load_design(args.design)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(canonical_certificate(design).hex())
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.catalog_cmd == "list":
        for eid in catalog.entry_ids():
            entry = catalog.get(eid)
            aut = "?" if entry.aut_order is None else entry.aut_order
            print(f"{eid:<8} v={entry.v:<3} aut={aut:<6} {entry.hexad_tag}")
        return EXIT_OK
    if args.catalog_cmd == "verify":
        report = catalog.verify_all(include_automorphisms=not args.no_aut)
        print("\n".join(report.summary_lines()))
        return EXIT_OK if report.ok else EXIT_NEGATIVE
    if args.catalog_cmd == "export":
        try:
            entry = catalog.get(args.id)
        except KeyError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        design = catalog.materialize(entry)
        doc = design.to_json_dict(group=catalog.base_group(entry))
        text = json.dumps(doc, separators=(",", ":"))
        if args.out:
            Path(args.out).write_text(text + "\n", encoding="utf-8")
        else:
            print(text)
        return EXIT_OK
    raise AssertionError(args.catalog_cmd)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tetrahex",
        description="search, verify and classify homogeneous 3-(v,{4,6},1) designs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="run the orbit/exact-cover search for a group")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--group", help="group file (line 1 'degree v', then cycles)")
    src.add_argument("--catalog-group", metavar="ID",
                     help="use the base group of a catalog entry")
    p.add_argument("--v", type=int, help="expected point count (validated)")
    p.add_argument("--two-class-only", action="store_true",
                   help="keep only candidates whose hexads are 2-class symmetric")
    p.add_argument("--limit", type=int, help="stop after this many exact-cover solutions")
    p.add_argument("--candidates", type=int, help="examine at most this many hexad candidates")
    p.add_argument("--jobs", type=int, default=0,
                   help="worker processes for candidate solving (0 = all cores)")
    p.add_argument("--out", default="tetrahex-out", help="output directory")
    p.add_argument("--seed", type=int, default=0, help="seed recorded in the summary")
    p.add_argument("--libexact-format", action="store_true",
                   help="also dump each cover matrix in libexact text format")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", help="verify a design file as a homogeneous 3-(v,{4,6},1)")
    p.add_argument("design")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="classify a design's hexads")
    p.add_argument("design")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("iso", help="test two design files for isomorphism")
    p.add_argument("design_a")
    p.add_argument("design_b")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("aut", help="full automorphism group of a design file")
    p.add_argument("design")
    p.set_defaults(func=cmd_aut)

    p = sub.add_parser("canon", help="print the canonical certificate (hex)")
    p.add_argument("design")
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("catalog", help="embedded catalog operations")
    csub = p.add_subparsers(dest="catalog_cmd", required=True)
    csub.add_parser("list", help="list catalog entries")
    pv = csub.add_parser("verify", help="verify every catalog entry")
    pv.add_argument("--no-aut", action="store_true",
                    help="skip the automorphism-order checks")
    pe = csub.add_parser("export", help="export one entry as design JSON")
    pe.add_argument("--id", required=True)
    pe.add_argument("--format", choices=["json"], default="json")
    pe.add_argument("--out", help="write to file instead of stdout")
    p.set_defaults(func=cmd_catalog)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
