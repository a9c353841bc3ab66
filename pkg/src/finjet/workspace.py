"""Workspace files: named objects, maps, relations and bundles.

Line-oriented grammar, one declaration per line, '#' comments:

    object <name> { <id> <id> ... }
    map <name> : <obj> -> <obj> { <id> -> <id> ; ... }
    relation <name> : <obj> ~ <obj> { (<id>,<id>) ... }
    bundle <name> = <mapname>
    graph <name> on <obj> { <id> -- <id> ... }

Identifiers are whitespace-free and may contain parentheses and commas (the
canonical pair names do); relation pairs are split at the top-level comma.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DuplicateName,
    NonTotalMap,
    UnknownReference,
    WorkspaceSyntaxError,
)
from .finset import FinMap, FinSet
from .polyfun import Bundle
from .relations import Relation


@dataclass
class Workspace:
    objects: dict[str, FinSet] = field(default_factory=dict)
    maps: dict[str, FinMap] = field(default_factory=dict)
    relations: dict[str, Relation] = field(default_factory=dict)
    bundles: dict[str, Bundle] = field(default_factory=dict)

    def object(self, name: str) -> FinSet:
        return self._get(self.objects, name, "object")

    def map(self, name: str) -> FinMap:
        return self._get(self.maps, name, "map")

    def relation(self, name: str) -> Relation:
        return self._get(self.relations, name, "relation")

    def bundle(self, name: str) -> Bundle:
        return self._get(self.bundles, name, "bundle")

    @staticmethod
    def _get(table, name, kind):
        if name not in table:
            raise UnknownReference(f"unknown {kind} {name!r}")
        return table[name]


def _brace_body(rest: str, line_no: int) -> tuple[str, str]:
    """Split "head { body }" into (head, body)."""
    if "{" not in rest or not rest.rstrip().endswith("}"):
        raise WorkspaceSyntaxError("expected a brace-delimited body", line_no)
    head, _, tail = rest.partition("{")
    body = tail.rstrip()
    body = body[: body.rindex("}")]
    return head.strip(), body.strip()


def _split_pair(token: str, line_no: int) -> tuple[str, str]:
    if not (token.startswith("(") and token.endswith(")")):
        raise WorkspaceSyntaxError(f"expected a pair, got {token!r}", line_no)
    inner = token[1:-1]
    depth = 0
    for i, ch in enumerate(inner):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return inner[:i], inner[i + 1 :]
    raise WorkspaceSyntaxError(f"pair {token!r} has no top-level comma", line_no)


def parse_workspace(text: str) -> Workspace:
    ws = Workspace()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        if keyword == "object":
            _parse_object(ws, rest, line_no)
        elif keyword == "map":
            _parse_map(ws, rest, line_no)
        elif keyword == "relation":
            _parse_relation(ws, rest, line_no)
        elif keyword == "graph":
            _parse_graph(ws, rest, line_no)
        elif keyword == "bundle":
            _parse_bundle(ws, rest, line_no)
        else:
            raise WorkspaceSyntaxError(f"unknown declaration {keyword!r}", line_no)
    return ws


def _declare(table: dict, name: str, value, kind: str, line_no: int) -> None:
    if not name:
        raise WorkspaceSyntaxError(f"missing {kind} name", line_no)
    if name in table:
        raise DuplicateName(f"{kind} {name!r} declared twice", line_no)
    table[name] = value


def _resolve(ws: Workspace, table: dict, name: str, kind: str, line_no: int):
    if name not in table:
        raise UnknownReference(f"unknown {kind} {name!r}", line_no)
    return table[name]


def _parse_object(ws: Workspace, rest: str, line_no: int) -> None:
    head, body = _brace_body(rest, line_no)
    elements = tuple(body.split())
    if len(set(elements)) != len(elements):
        raise WorkspaceSyntaxError("duplicate element in object", line_no)
    _declare(ws.objects, head, FinSet(head, elements), "object", line_no)


def _parse_map(ws: Workspace, rest: str, line_no: int) -> None:
    head, body = _brace_body(rest, line_no)
    name, _, ends = head.partition(":")
    name = name.strip()
    if "->" not in ends:
        raise WorkspaceSyntaxError("map header needs '<obj> -> <obj>'", line_no)
    dom_name, _, cod_name = ends.partition("->")
    dom = _resolve(ws, ws.objects, dom_name.strip(), "object", line_no)
    cod = _resolve(ws, ws.objects, cod_name.strip(), "object", line_no)
    table: dict[str, str] = {}
    for entry in filter(None, (e.strip() for e in body.split(";"))):
        if "->" not in entry:
            raise WorkspaceSyntaxError(f"map entry {entry!r} needs '->'", line_no)
        src, _, dst = entry.partition("->")
        src, dst = src.strip(), dst.strip()
        if src not in dom:
            raise UnknownReference(f"{src!r} is not in object {dom.name!r}", line_no)
        if dst not in cod:
            raise UnknownReference(f"{dst!r} is not in object {cod.name!r}", line_no)
        if src in table:
            raise NonTotalMap(f"element {src!r} assigned twice", line_no)
        table[src] = dst
    missing = [e for e in dom if e not in table]
    if missing:
        raise NonTotalMap(f"element {missing[0]!r} has no assignment", line_no)
    _declare(ws.maps, name, FinMap.from_table(dom, cod, table), "map", line_no)


def _parse_relation(ws: Workspace, rest: str, line_no: int) -> None:
    head, body = _brace_body(rest, line_no)
    name, _, ends = head.partition(":")
    name = name.strip()
    if "~" not in ends:
        raise WorkspaceSyntaxError("relation header needs '<obj> ~ <obj>'", line_no)
    src_name, _, dst_name = ends.partition("~")
    src = _resolve(ws, ws.objects, src_name.strip(), "object", line_no)
    dst = _resolve(ws, ws.objects, dst_name.strip(), "object", line_no)
    pairs = []
    for token in body.split():
        a, b = _split_pair(token, line_no)
        if a not in src:
            raise UnknownReference(f"{a!r} is not in object {src.name!r}", line_no)
        if b not in dst:
            raise UnknownReference(f"{b!r} is not in object {dst.name!r}", line_no)
        pairs.append((a, b))
    _declare(
        ws.relations, name, Relation.from_pairs(src, dst, pairs), "relation", line_no
    )


def _parse_graph(ws: Workspace, rest: str, line_no: int) -> None:
    head, body = _brace_body(rest, line_no)
    name, _, obj_name = head.partition(" on ")
    if not obj_name:
        raise WorkspaceSyntaxError("graph header needs 'on <obj>'", line_no)
    carrier = _resolve(ws, ws.objects, obj_name.strip(), "object", line_no)
    tokens = body.split()
    if len(tokens) % 3 != 0:
        raise WorkspaceSyntaxError("graph body must be '<id> -- <id>' edges", line_no)
    pairs = []
    for i in range(0, len(tokens), 3):
        a, dashes, b = tokens[i : i + 3]
        if dashes != "--":
            raise WorkspaceSyntaxError(f"expected '--', got {dashes!r}", line_no)
        for v in (a, b):
            if v not in carrier:
                raise UnknownReference(
                    f"{v!r} is not in object {carrier.name!r}", line_no
                )
        pairs.append((a, b))
        pairs.append((b, a))
    _declare(
        ws.relations,
        name.strip(),
        Relation.from_pairs(carrier, carrier, pairs),
        "relation",
        line_no,
    )


def _parse_bundle(ws: Workspace, rest: str, line_no: int) -> None:
    name, eq, map_name = rest.partition("=")
    if not eq:
        raise WorkspaceSyntaxError("bundle declaration needs '= <mapname>'", line_no)
    target = _resolve(ws, ws.maps, map_name.strip(), "map", line_no)
    _declare(ws.bundles, name.strip(), Bundle(target), "bundle", line_no)


def serialize_workspace(ws: Workspace) -> str:
    lines = []
    for name, obj in ws.objects.items():
        lines.append(f"object {name} {{ {' '.join(obj.elements)} }}".replace("{  }", "{ }"))
    for name, fmap in ws.maps.items():
        entries = " ; ".join(f"{k} -> {v}" for k, v in zip(fmap.dom.elements, fmap.values))
        lines.append(f"map {name} : {fmap.dom.name} -> {fmap.cod.name} {{ {entries} }}".replace("{  }", "{ }"))
    for name, rel in ws.relations.items():
        pairs = " ".join(f"({a},{b})" for a, b in rel.pairs)
        lines.append(f"relation {name} : {rel.src.name} ~ {rel.dst.name} {{ {pairs} }}".replace("{  }", "{ }"))
    for name, bundle in ws.bundles.items():
        map_name = next(
            (n for n, m in ws.maps.items() if m == bundle.map), None
        )
        if map_name is None:
            map_name = f"__bundle_{name}"
            entries = " ; ".join(
                f"{k} -> {v}" for k, v in zip(bundle.map.dom.elements, bundle.map.values)
            )
            lines.append(
                f"map {map_name} : {bundle.map.dom.name} -> {bundle.map.cod.name} {{ {entries} }}".replace("{  }", "{ }")
            )
        lines.append(f"bundle {name} = {map_name}")
    return "\n".join(lines) + "\n"
