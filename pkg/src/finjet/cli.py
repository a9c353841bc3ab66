"""Command-line surface: workspace computations and the property-suite runner.

Exit codes: 0 success, 1 check failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from typing import IO, Optional

from . import fibdual, jets, polyfun, relations
from .errors import FinjetError, WorkspaceError
from .finset import compose, element, pullback
from .suites import SUITES, run_suites
from .workspace import Workspace, parse_workspace


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finjet",
        description="Finite-set stage semantics and section-jet bundles.",
    )
    parser.add_argument("-w", "--workspace", help="workspace file to load")
    parser.add_argument(
        "--format",
        choices=("text", "records"),
        default="text",
        help="output mode (records: tab-separated lines)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cmd = sub.add_parser("pullback", help="canonical pullback of two maps")
    cmd.add_argument("--left", required=True, help="map A -> C")
    cmd.add_argument("--right", required=True, help="map B -> C")

    cmd = sub.add_parser("monad", help="neighborhood of an element under a relation")
    cmd.add_argument("--relation", required=True)
    group = cmd.add_mutually_exclusive_group(required=True)
    group.add_argument("--at", help="named map X -> destination")
    group.add_argument("--point", help="element of the destination")

    cmd = sub.add_parser("jets", help="enumerate section jets at a point")
    cmd.add_argument("--relation", required=True)
    cmd.add_argument("--bundle", required=True)
    cmd.add_argument("--point", required=True)

    cmd = sub.add_parser("jetbundle", help="the full jet bundle of a bundle")
    cmd.add_argument("--relation", required=True)
    cmd.add_argument("--bundle", required=True)

    cmd = sub.add_parser("classify", help="classifying map of an enumerated jet")
    cmd.add_argument("--relation", required=True)
    cmd.add_argument("--bundle", required=True)
    cmd.add_argument("--point", required=True)
    cmd.add_argument("--index", type=int, required=True)

    cmd = sub.add_parser("phi", help="transport a jet along a relation morphism")
    cmd.add_argument("--relation-src", required=True)
    cmd.add_argument("--relation-dst", required=True)
    cmd.add_argument("--map", required=True, help="f between the sources")
    cmd.add_argument("--map0", required=True, help="f0 between the destinations")
    cmd.add_argument("--bundle", required=True, help="bundle over the target source")
    cmd.add_argument("--point", required=True, help="element of the source destination")
    cmd.add_argument("--index", type=int, required=True)

    cmd = sub.add_parser("polyjet", help="jet bundle via pullback and dependent product")
    cmd.add_argument("--relation", required=True)
    cmd.add_argument("--bundle", required=True)

    cmd = sub.add_parser("dualjet", help="jet functor on a comorphism")
    cmd.add_argument("--relation-src", required=True)
    cmd.add_argument("--relation-dst", required=True)
    cmd.add_argument("--map", required=True, help="base map of the comorphism")
    cmd.add_argument("--bundle", required=True, help="codomain bundle")
    cmd.add_argument(
        "--vertical",
        help="named map giving the vertical part (default: Cartesian comorphism)",
    )
    cmd.add_argument("--src-bundle", help="source bundle when --vertical is given")

    cmd = sub.add_parser("check", help="run the property suites")
    cmd.add_argument("--suite", default="all", help="suite name or 'all'")
    cmd.add_argument("--seed", type=int, default=42)
    cmd.add_argument("--max-obj", type=int, default=3)
    cmd.add_argument("--max-fiber", type=int, default=3)
    cmd.add_argument("--trials", type=int, default=200)
    cmd.add_argument("--jobs", type=int, default=1)
    return parser


def _load_workspace(args) -> Workspace:
    if not args.workspace:
        raise WorkspaceError("this command needs --workspace")
    with open(args.workspace, "r", encoding="utf-8") as handle:
        return parse_workspace(handle.read())


def _emit(out: IO[str], format_: str, records: list[tuple[str, ...]], text: list[str]):
    if format_ == "records":
        for record in records:
            print("\t".join(record), file=out)
    else:
        for line in text:
            print(line, file=out)


def _cmd_pullback(ws: Workspace, args, out) -> int:
    left = ws.map(args.left)
    right = ws.map(args.right)
    pb = pullback(left, right)
    text = [f"pullback of {args.left} and {args.right}: {len(pb.apex)} elements"]
    records = []
    for m in pb.apex:
        records.append(("element", m, pb.to_left(m), pb.to_right(m)))
        text.append(f"  {m} -> ({pb.to_left(m)}, {pb.to_right(m)})")
    _emit(out, args.format, records, text)
    return 0


def _point(carrier, name: str):
    if name not in carrier:
        raise WorkspaceError(f"{name!r} is not an element of {carrier.name!r}")
    return element(carrier, name)


def _monad_element(ws: Workspace, args):
    rel = ws.relation(args.relation)
    if args.at:
        return rel, ws.map(args.at)
    return rel, _point(rel.dst, args.point)


def _cmd_monad(ws: Workspace, args, out) -> int:
    rel, belem = _monad_element(ws, args)
    sub = relations.monad(rel, belem)
    text = [f"monad over {sub.over.name} at stage {sub.stage.name}: {len(sub)} pairs"]
    records = []
    for a, x in sub.pairs:
        records.append(("pair", a, x))
        text.append(f"  ({a},{x})")
    _emit(out, args.format, records, text)
    return 0


def _jet_records(j: jets.SectionJet) -> str:
    return " ".join(f"({a},{x})->{e}" for (a, x), e in sorted(j.table.items()))


def _cmd_jets(ws: Workspace, args, out) -> int:
    rel = ws.relation(args.relation)
    bundle = ws.bundle(args.bundle)
    base = _point(rel.dst, args.point)
    found = jets.enumerate_jets(rel, base, bundle.map)
    text = [f"jets at {args.point}: {len(found)}"]
    records = []
    for i, j in enumerate(found):
        table = _jet_records(j)
        records.append(("jet", str(i), table))
        text.append(f"  [{i}] {table}")
    _emit(out, args.format, records, text)
    return 0


def _cmd_jetbundle(ws: Workspace, args, out) -> int:
    rel = ws.relation(args.relation)
    bundle = ws.bundle(args.bundle)
    jb = jets.jet_bundle(rel, bundle.map)
    sizes = "/".join(str(len(jb.fiber(a0))) for a0 in rel.dst)
    text = [f"jet bundle over {rel.dst.name}: {len(jb.total)} elements, fibers {sizes}"]
    records = []
    for t in jb.total:
        table = " ".join(f"{a}->{e}" for a, e in sorted(jb.table_of(t).items()))
        records.append(("element", t, jb.projection(t), table))
        text.append(f"  {t} over {jb.projection(t)}: {table}")
    _emit(out, args.format, records, text)
    return 0


def _cmd_classify(ws: Workspace, args, out) -> int:
    rel = ws.relation(args.relation)
    bundle = ws.bundle(args.bundle)
    base = _point(rel.dst, args.point)
    found = jets.enumerate_jets(rel, base, bundle.map)
    if not 0 <= args.index < len(found):
        raise WorkspaceError(
            f"index {args.index} out of range; {len(found)} jets at {args.point}"
        )
    jb = jets.jet_bundle(rel, bundle.map)
    cl = jets.classify(jb, found[args.index])
    target = cl("*")
    _emit(
        out,
        args.format,
        [("classified", str(args.index), target)],
        [f"jet [{args.index}] at {args.point} classifies as {target}"],
    )
    return 0


def _cmd_phi(ws: Workspace, args, out) -> int:
    rel_src = ws.relation(args.relation_src)
    rel_dst = ws.relation(args.relation_dst)
    f = ws.map(args.map)
    f0 = ws.map(args.map0)
    bundle = ws.bundle(args.bundle)
    morphism = relations.check_preserves(f, f0, rel_src, rel_dst)
    if morphism is None:
        raise WorkspaceError("the maps do not preserve the relations")
    ctx = jets.PhiContext.of(morphism, bundle.map)
    a0 = _point(rel_src.dst, args.point)
    found = jets.enumerate_jets(rel_dst, compose(f0, a0), bundle.map)
    if not 0 <= args.index < len(found):
        raise WorkspaceError(
            f"index {args.index} out of range; {len(found)} jets at the image point"
        )
    moved = jets.phi(ctx, a0, found[args.index])
    table = _jet_records(moved)
    _emit(
        out,
        args.format,
        [("jet", str(args.index), table)],
        [f"transported jet [{args.index}]: {table}"],
    )
    return 0


def _cmd_polyjet(ws: Workspace, args, out) -> int:
    rel = ws.relation(args.relation)
    bundle = ws.bundle(args.bundle)
    legs = rel.span
    dp = polyfun.polynomial_product(legs.left, legs.right, bundle)
    sizes = "/".join(
        str(sum(1 for el in dp.result.total if dp.result.map(el) == b))
        for b in rel.dst
    )
    text = [
        f"polynomial jet bundle over {rel.dst.name}: "
        f"{len(dp.result.total)} elements, fibers {sizes}"
    ]
    records = []
    for el, b, tab in dp.entries:
        flat = " ".join(f"{m}->{v}" for m, v in tab)
        records.append(("element", el, b, flat))
        text.append(f"  {el} over {b}: {flat}")
    _emit(out, args.format, records, text)
    return 0


def _cmd_dualjet(ws: Workspace, args, out) -> int:
    rel_src = ws.relation(args.relation_src)
    rel_dst = ws.relation(args.relation_dst)
    f = ws.map(args.map)
    bundle = ws.bundle(args.bundle)
    rels = {
        rel_src.src: relations.EndoRelation.of(rel_src),
        rel_dst.src: relations.EndoRelation.of(rel_dst),
    }
    if args.vertical:
        if not args.src_bundle:
            raise WorkspaceError("--vertical needs --src-bundle")
        src_bundle = ws.bundle(args.src_bundle)
        vertical = polyfun.SliceMorphism(
            polyfun.pullback_bundle(f, bundle), src_bundle, ws.map(args.vertical)
        )
        com = fibdual.Comorphism(f, src_bundle, bundle, vertical)
    else:
        com = fibdual.cartesian_comorphism(f, bundle)
    moved = fibdual.global_jet(com, rels)
    text = [
        f"jet comorphism over {moved.over.dom.name} -> {moved.over.cod.name}: "
        f"{len(moved.vertical.arrow.dom)} -> {len(moved.vertical.arrow.cod)} vertical"
    ]
    records = []
    for e in moved.vertical.arrow.dom:
        records.append(("vertical", e, moved.vertical.arrow(e)))
        text.append(f"  {e} -> {moved.vertical.arrow(e)}")
    _emit(out, args.format, records, text)
    return 0


def _cmd_check(args, out) -> int:
    if args.suite == "all":
        names = list(SUITES)
    elif args.suite in SUITES:
        names = [args.suite]
    else:
        raise WorkspaceError(
            f"unknown suite {args.suite!r}; known: {', '.join(SUITES)} or 'all'"
        )
    reports = run_suites(
        names,
        seed=args.seed,
        max_obj=args.max_obj,
        max_fiber=args.max_fiber,
        trials=args.trials,
        jobs=args.jobs,
    )
    for report in reports:
        if args.format == "records":
            print(report.render_records(), file=out)
        else:
            print(report.render_text(), file=out)
    return 0 if all(r.ok for r in reports) else 1


_WORKSPACE_COMMANDS = {
    "pullback": _cmd_pullback,
    "monad": _cmd_monad,
    "jets": _cmd_jets,
    "jetbundle": _cmd_jetbundle,
    "classify": _cmd_classify,
    "phi": _cmd_phi,
    "polyjet": _cmd_polyjet,
    "dualjet": _cmd_dualjet,
}


def main(argv: Optional[list[str]] = None, out: Optional[IO[str]] = None) -> int:
    out = out if out is not None else sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "check":
            return _cmd_check(args, out)
        ws = _load_workspace(args)
        return _WORKSPACE_COMMANDS[args.command](ws, args, out)
    except WorkspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FinjetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
