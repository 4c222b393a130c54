"""Network serialization (GEXF 1.3, GraphML, DOT, JSON) and injection files."""
from __future__ import annotations

import json
import os
import tempfile
import xml.etree.ElementTree as ET
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from charnet.artifacts import any_network_to_json, check_artifact
from charnet.graph_extraction import CharacterNetwork, DynamicNetwork, Edge, NetworkSlice, Vertex
from charnet.ner import EntityMention
from charnet.pipeline import ArtifactKey, MalformedArtifact, as_key
from charnet.quotes import Quote
from charnet.unification import CorefChain

FORMATS = ("gexf", "graphml", "dot", "json")
JSON_SCHEMA = "charnet.network/1"

GEXF_NS = "http://gexf.net/1.3"
VIZ_NS = "http://gexf.net/1.3/viz"
XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"
GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


class UnsupportedFormat(ValueError):
    pass


class SerializationError(RuntimeError):
    pass


# --- styling --------------------------------------------------------------------

MIN_SIZE, MAX_SIZE = 5.0, 50.0
MIN_THICKNESS, MAX_THICKNESS = 1.0, 10.0
# color ramp from pale yellow (low) to dark red (high)
RAMP_LOW = (255, 237, 160)
RAMP_HIGH = (189, 0, 38)


def _ramp(value: float, lo: float, hi: float) -> float:
    return 0.0 if hi == lo else (value - lo) / (hi - lo)


def ramp_color(t: float) -> tuple[int, int, int]:
    return tuple(round(a + (b - a) * t) for a, b in zip(RAMP_LOW, RAMP_HIGH))  # type: ignore[return-value]


@dataclass(frozen=True)
class StyledNetwork:
    """Visual encodings: vertex size and color follow degree, edge thickness and color follow weight."""

    network: CharacterNetwork
    vertex_size: dict[int, float]
    vertex_color: dict[int, float]
    edge_thickness: dict[tuple[int, int], float]
    edge_color: dict[tuple[int, int], float]

    @classmethod
    def from_network(cls, network: CharacterNetwork, degree_range=None, weight_range=None) -> "StyledNetwork":
        degrees = [v.degree for v in network.vertices]
        weights = [e.weight for e in network.edges]
        dlo, dhi = degree_range or ((min(degrees), max(degrees)) if degrees else (0, 0))
        wlo, whi = weight_range or ((min(weights), max(weights)) if weights else (0, 0))
        vcolor = {v.id: _ramp(v.degree, dlo, dhi) for v in network.vertices}
        ecolor = {(e.a, e.b): _ramp(e.weight, wlo, whi) for e in network.edges}
        return cls(
            network,
            {vid: MIN_SIZE + (MAX_SIZE - MIN_SIZE) * t for vid, t in vcolor.items()},
            vcolor,
            {k: MIN_THICKNESS + (MAX_THICKNESS - MIN_THICKNESS) * t for k, t in ecolor.items()},
            ecolor,
        )


# --- GEXF ---------------------------------------------------------------------------

_NODE_ATTRS = (("canonical", "string"), ("names", "liststring"), ("mention_count", "integer"), ("degree", "integer"))


def _fmt(x: float) -> str:
    return repr(round(float(x), 6))


def _names_value(names: Sequence[str]) -> str:
    return "|".join(names)


def _gexf_root(mode: str, description: str | None) -> tuple[ET.Element, ET.Element]:
    root = ET.Element("gexf", {
        "xmlns": GEXF_NS,
        "xmlns:viz": VIZ_NS,
        "xmlns:xsi": XSI_NS,
        "xsi:schemaLocation": f"{GEXF_NS} {GEXF_NS}/gexf.xsd",
        "version": "1.3",
    })
    meta = ET.SubElement(root, "meta")
    ET.SubElement(meta, "creator").text = "charnet"
    if description:
        ET.SubElement(meta, "description").text = description
    graph_attrs = {"defaultedgetype": "undirected", "mode": mode}
    if mode == "dynamic":
        graph_attrs.update({"timeformat": "integer", "timerepresentation": "interval"})
    graph = ET.SubElement(root, "graph", graph_attrs)
    return root, graph


def _declare(graph: ET.Element, cls: str, mode: str, attrs) -> None:
    decl = ET.SubElement(graph, "attributes", {"class": cls, "mode": mode})
    for name, typ in attrs:
        ET.SubElement(decl, "attribute", {"id": name, "title": name, "type": typ})


def _viz_node(node: ET.Element, size: float, t: float) -> None:
    r, g, b = ramp_color(t)
    ET.SubElement(node, "viz:color", {"r": str(r), "g": str(g), "b": str(b)})
    ET.SubElement(node, "viz:size", {"value": _fmt(size)})


def _viz_edge(edge: ET.Element, thickness: float, t: float) -> None:
    r, g, b = ramp_color(t)
    ET.SubElement(edge, "viz:color", {"r": str(r), "g": str(g), "b": str(b)})
    ET.SubElement(edge, "viz:thickness", {"value": _fmt(thickness)})


def _gexf_static(network: CharacterNetwork, styled: bool) -> ET.Element:
    root, graph = _gexf_root("static", None)
    _declare(graph, "node", "static", _NODE_ATTRS)
    style = StyledNetwork.from_network(network) if styled else None
    nodes = ET.SubElement(graph, "nodes")
    for v in network.vertices:
        node = ET.SubElement(nodes, "node", {"id": str(v.id), "label": v.canonical})
        values = ET.SubElement(node, "attvalues")
        for name, value in (("canonical", v.canonical), ("names", _names_value(v.names)),
                            ("mention_count", v.mention_count), ("degree", v.degree)):
            ET.SubElement(values, "attvalue", {"for": name, "value": str(value)})
        if style:
            _viz_node(node, style.vertex_size[v.id], style.vertex_color[v.id])
    edges = ET.SubElement(graph, "edges")
    for i, e in enumerate(network.edges):
        edge = ET.SubElement(edges, "edge", {"id": str(i), "source": str(e.a), "target": str(e.b),
                                             "weight": str(e.weight)})
        if style:
            _viz_edge(edge, style.edge_thickness[(e.a, e.b)], style.edge_color[(e.a, e.b)])
    return root


def _slices_description(dynamic: DynamicNetwork) -> str:
    return "slices: " + " ".join(f"[{s.start},{s.end})" for s in dynamic.slices)


def _gexf_dynamic(dynamic: DynamicNetwork, styled: bool) -> ET.Element:
    root, graph = _gexf_root("dynamic", _slices_description(dynamic))
    _declare(graph, "node", "static", _NODE_ATTRS[:2])
    _declare(graph, "node", "dynamic", _NODE_ATTRS[2:])
    _declare(graph, "edge", "dynamic", (("slice_weight", "integer"),))

    # node and edge presence per slice
    node_info: dict[int, Vertex] = {}
    node_slices: dict[int, list[tuple[NetworkSlice, Vertex]]] = defaultdict(list)
    edge_slices: dict[tuple[int, int], list[tuple[NetworkSlice, Edge]]] = defaultdict(list)
    all_degrees, all_weights = [], []
    for s in dynamic.slices:
        for v in s.network.vertices:
            first = node_info.setdefault(v.id, v)
            if (first.canonical, first.names) != (v.canonical, v.names):
                raise SerializationError(f"character {v.id} changes its names between slices")
            node_slices[v.id].append((s, v))
            all_degrees.append(v.degree)
        for e in s.network.edges:
            edge_slices[(e.a, e.b)].append((s, e))
            all_weights.append(e.weight)

    def spell(parent: ET.Element, s: NetworkSlice) -> None:
        ET.SubElement(parent, "spell", {"start": str(s.start), "endopen": str(s.end)})

    nodes = ET.SubElement(graph, "nodes")
    for vid in sorted(node_info):
        v = node_info[vid]
        node = ET.SubElement(nodes, "node", {"id": str(vid), "label": v.canonical})
        values = ET.SubElement(node, "attvalues")
        ET.SubElement(values, "attvalue", {"for": "canonical", "value": v.canonical})
        ET.SubElement(values, "attvalue", {"for": "names", "value": _names_value(v.names)})
        for s, sv in node_slices[vid]:
            for name, value in (("mention_count", sv.mention_count), ("degree", sv.degree)):
                ET.SubElement(values, "attvalue", {"for": name, "value": str(value),
                                                   "start": str(s.start), "endopen": str(s.end)})
        spells = ET.SubElement(node, "spells")
        for s, _ in node_slices[vid]:
            spell(spells, s)
        if styled:
            degree = max(sv.degree for _, sv in node_slices[vid])
            lo, hi = min(all_degrees), max(all_degrees)
            t = _ramp(degree, lo, hi)
            _viz_node(node, MIN_SIZE + (MAX_SIZE - MIN_SIZE) * t, t)

    edges = ET.SubElement(graph, "edges")
    for i, (a, b) in enumerate(sorted(edge_slices)):
        present = edge_slices[(a, b)]
        total = sum(e.weight for _, e in present)
        edge = ET.SubElement(edges, "edge", {"id": str(i), "source": str(a), "target": str(b),
                                             "weight": str(total)})
        values = ET.SubElement(edge, "attvalues")
        for s, e in present:
            ET.SubElement(values, "attvalue", {"for": "slice_weight", "value": str(e.weight),
                                               "start": str(s.start), "endopen": str(s.end)})
        spells = ET.SubElement(edge, "spells")
        for s, _ in present:
            spell(spells, s)
        if styled:
            peak = max(e.weight for _, e in present)
            lo, hi = min(all_weights), max(all_weights)
            t = _ramp(peak, lo, hi)
            _viz_edge(edge, MIN_THICKNESS + (MAX_THICKNESS - MIN_THICKNESS) * t, t)
    return root


def _to_bytes(root: ET.Element) -> bytes:
    ET.indent(root)
    return ET.tostring(root, encoding="UTF-8", xml_declaration=True) + b"\n"


def to_gexf(network: CharacterNetwork | DynamicNetwork, styled: bool = False) -> bytes:
    if isinstance(network, DynamicNetwork):
        return _to_bytes(_gexf_dynamic(network, styled))
    return _to_bytes(_gexf_static(network, styled))


def _q(tag: str, ns: str = GEXF_NS) -> str:
    return f"{{{ns}}}{tag}"


def _attvalues(elem: ET.Element) -> list[ET.Element]:
    block = elem.find(_q("attvalues"))
    return [] if block is None else block.findall(_q("attvalue"))


def read_gexf(data: bytes | str) -> CharacterNetwork | DynamicNetwork:
    """Parse GEXF written by :func:`to_gexf` back into a network."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise SerializationError(f"invalid XML: {exc}") from exc
    graph = root.find(_q("graph"))
    if graph is None:
        raise SerializationError("GEXF document has no graph element")
    nodes = graph.find(_q("nodes"))
    edges = graph.find(_q("edges"))
    node_elems = [] if nodes is None else nodes.findall(_q("node"))
    edge_elems = [] if edges is None else edges.findall(_q("edge"))

    if graph.get("mode") != "dynamic":
        vertices = []
        for node in node_elems:
            vals = {av.get("for"): av.get("value") for av in _attvalues(node)}
            names = tuple(n for n in (vals.get("names") or "").split("|") if n)
            vertices.append(Vertex(int(node.get("id")), vals.get("canonical", node.get("label", "")),
                                   int(vals.get("mention_count", 0)), int(vals.get("degree", 0)), names))
        out_edges = [Edge(int(e.get("source")), int(e.get("target")), int(float(e.get("weight", 1))))
                     for e in edge_elems]
        return CharacterNetwork(tuple(sorted(vertices)), tuple(sorted(out_edges)))

    desc = root.find(f"{_q('meta')}/{_q('description')}")
    if desc is None or not (desc.text or "").startswith("slices:"):
        raise SerializationError("dynamic GEXF lacks the slice list")
    windows = []
    for item in desc.text.split()[1:]:
        start, end = item.strip("[)").split(",")
        windows.append((int(start), int(end)))
    slice_vertices: dict[tuple[int, int], list[Vertex]] = defaultdict(list)
    slice_edges: dict[tuple[int, int], list[Edge]] = defaultdict(list)
    for node in node_elems:
        vid = int(node.get("id"))
        static = {}
        per_slice: dict[tuple[int, int], dict[str, str]] = defaultdict(dict)
        for av in _attvalues(node):
            if av.get("start") is None:
                static[av.get("for")] = av.get("value")
            else:
                per_slice[(int(av.get("start")), int(av.get("endopen")))][av.get("for")] = av.get("value")
        names = tuple(n for n in (static.get("names") or "").split("|") if n)
        for window, vals in per_slice.items():
            slice_vertices[window].append(Vertex(vid, static.get("canonical", node.get("label", "")),
                                                 int(vals["mention_count"]), int(vals["degree"]), names))
    for edge in edge_elems:
        a, b = int(edge.get("source")), int(edge.get("target"))
        for av in _attvalues(edge):
            window = (int(av.get("start")), int(av.get("endopen")))
            slice_edges[window].append(Edge(a, b, int(av.get("value"))))
    slices = tuple(
        NetworkSlice(s, e, CharacterNetwork(tuple(sorted(slice_vertices[(s, e)])), tuple(sorted(slice_edges[(s, e)]))))
        for s, e in windows
    )
    return DynamicNetwork(slices)


# --- GEXF structural check --------------------------------------------------------

_ATTR_TYPES = {"integer", "long", "double", "float", "boolean", "liststring", "listinteger", "listlong",
               "listfloat", "listdouble", "listboolean", "string", "anyURI", "date", "bigdecimal",
               "biginteger", "char", "byte", "short", "listbyte", "listshort", "listchar", "listbigdecimal",
               "listbiginteger", "liststring"}
_TIMEFORMATS = {"integer", "double", "date", "dateTime"}


def check_gexf(data: bytes | str) -> list[str]:
    """Check a document against the GEXF 1.3 schema rules this package relies on.

    Returns a list of problems; an empty list means the document conforms.
    Covered: root namespace and version, graph enumerations, attribute
    declarations and typed values, unique node/edge ids, edge endpoints,
    numeric weights, spell bounds, and viz element attributes.
    """
    problems: list[str] = []
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        return [f"not well-formed XML: {exc}"]
    if root.tag != _q("gexf"):
        return [f"root element is {root.tag}, expected {{{GEXF_NS}}}gexf"]
    if root.get("version") != "1.3":
        problems.append("gexf/@version must be 1.3")
    allowed_root = {_q("meta"), _q("graph")}
    for child in root:
        if child.tag not in allowed_root:
            problems.append(f"unexpected element {child.tag} under gexf")
    graphs = root.findall(_q("graph"))
    if len(graphs) != 1:
        problems.append("gexf must contain exactly one graph")
        return problems
    graph = graphs[0]
    if graph.get("defaultedgetype", "undirected") not in {"directed", "undirected", "mutual"}:
        problems.append("graph/@defaultedgetype invalid")
    mode = graph.get("mode", "static")
    if mode not in {"static", "dynamic"}:
        problems.append("graph/@mode invalid")
    if graph.get("timeformat") is not None and graph.get("timeformat") not in _TIMEFORMATS:
        problems.append("graph/@timeformat invalid")
    if graph.get("timerepresentation", "interval") not in {"interval", "timestamp"}:
        problems.append("graph/@timerepresentation invalid")

    declared: dict[str, dict[str, str]] = {"node": {}, "edge": {}}
    for decl in graph.findall(_q("attributes")):
        cls = decl.get("class")
        if cls not in declared:
            problems.append(f"attributes/@class invalid: {cls!r}")
            continue
        if decl.get("mode", "static") not in {"static", "dynamic"}:
            problems.append("attributes/@mode invalid")
        for att in decl.findall(_q("attribute")):
            if att.get("id") is None or att.get("title") is None:
                problems.append("attribute requires id and title")
            if att.get("type") not in _ATTR_TYPES:
                problems.append(f"attribute {att.get('id')!r} has invalid type {att.get('type')!r}")
            declared[cls][att.get("id")] = att.get("type")

    def check_number(value: str | None, what: str, integer: bool = False) -> None:
        try:
            int(value) if integer else float(value)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            problems.append(f"{what}: {value!r} is not a valid {'integer' if integer else 'number'}")

    def check_time(elem: ET.Element, what: str) -> None:
        bounds = {}
        for attr in ("start", "startopen", "end", "endopen"):
            if elem.get(attr) is not None:
                check_number(elem.get(attr), f"{what}/@{attr}", integer=graph.get("timeformat") == "integer")
                try:
                    bounds[attr] = float(elem.get(attr))
                except ValueError:
                    pass
        if "start" in bounds and "startopen" in bounds:
            problems.append(f"{what}: start and startopen are exclusive")
        if "end" in bounds and "endopen" in bounds:
            problems.append(f"{what}: end and endopen are exclusive")
        lo = bounds.get("start", bounds.get("startopen"))
        hi = bounds.get("end", bounds.get("endopen"))
        if lo is not None and hi is not None and lo > hi:
            problems.append(f"{what}: interval start after end")

    def check_item(elem: ET.Element, cls: str, what: str) -> None:
        for av in _attvalues(elem):
            key = av.get("for")
            if key not in declared[cls]:
                problems.append(f"{what}: attvalue for undeclared attribute {key!r}")
            elif av.get("value") is None:
                problems.append(f"{what}: attvalue without value")
            elif declared[cls][key] in {"integer", "long"}:
                check_number(av.get("value"), f"{what} attvalue {key}", integer=True)
            elif declared[cls][key] in {"float", "double"}:
                check_number(av.get("value"), f"{what} attvalue {key}")
            check_time(av, f"{what} attvalue")
        spells = elem.find(_q("spells"))
        if spells is not None:
            for sp in spells:
                if sp.tag != _q("spell"):
                    problems.append(f"{what}: unexpected {sp.tag} in spells")
                check_time(sp, f"{what} spell")
        color = elem.find(_q("color", VIZ_NS))
        if color is not None:
            for ch in "rgb":
                v = color.get(ch)
                if v is None or not v.isdigit() or not 0 <= int(v) <= 255:
                    problems.append(f"{what}: viz:color/@{ch} must be 0..255")
        for tag in ("size", "thickness"):
            el = elem.find(_q(tag, VIZ_NS))
            if el is not None:
                check_number(el.get("value"), f"{what} viz:{tag}")
                if el.get("value") is not None and float(el.get("value")) < 0:
                    problems.append(f"{what}: viz:{tag} must be non-negative")

    node_ids = set()
    nodes = graph.find(_q("nodes"))
    for node in [] if nodes is None else nodes:
        if node.tag != _q("node"):
            problems.append(f"unexpected {node.tag} in nodes")
            continue
        nid = node.get("id")
        if nid is None:
            problems.append("node without id")
        elif nid in node_ids:
            problems.append(f"duplicate node id {nid}")
        node_ids.add(nid)
        check_time(node, f"node {nid}")
        check_item(node, "node", f"node {nid}")
    edge_ids = set()
    edges = graph.find(_q("edges"))
    for edge in [] if edges is None else edges:
        if edge.tag != _q("edge"):
            problems.append(f"unexpected {edge.tag} in edges")
            continue
        eid = edge.get("id")
        if eid is None:
            problems.append("edge without id")
        elif eid in edge_ids:
            problems.append(f"duplicate edge id {eid}")
        edge_ids.add(eid)
        for end in ("source", "target"):
            if edge.get(end) not in node_ids:
                problems.append(f"edge {eid}: {end} {edge.get(end)!r} is not a node")
        if edge.get("type", "undirected") not in {"directed", "undirected", "mutual"}:
            problems.append(f"edge {eid}: invalid type")
        if edge.get("weight") is not None:
            check_number(edge.get("weight"), f"edge {eid} weight")
        check_time(edge, f"edge {eid}")
        check_item(edge, "edge", f"edge {eid}")
    return problems


# --- GraphML / DOT / JSON ---------------------------------------------------------------


def _graphml_graph(parent: ET.Element, network: CharacterNetwork, gid: str, window=None) -> None:
    attrs = {"id": gid, "edgedefault": "undirected"}
    graph = ET.SubElement(parent, "graph", attrs)
    if window is not None:
        for key, value in (("window_start", window[0]), ("window_end", window[1])):
            ET.SubElement(graph, "data", {"key": key}).text = str(value)
    for v in network.vertices:
        node = ET.SubElement(graph, "node", {"id": f"{gid}:{v.id}" if window else str(v.id)})
        for key, value in (("canonical", v.canonical), ("names", _names_value(v.names)),
                           ("mention_count", v.mention_count), ("degree", v.degree)):
            ET.SubElement(node, "data", {"key": key}).text = str(value)
    for e in network.edges:
        src, dst = (f"{gid}:{e.a}", f"{gid}:{e.b}") if window else (str(e.a), str(e.b))
        edge = ET.SubElement(graph, "edge", {"source": src, "target": dst})
        ET.SubElement(edge, "data", {"key": "weight"}).text = str(e.weight)


def to_graphml(network: CharacterNetwork | DynamicNetwork, styled: bool = False) -> bytes:
    root = ET.Element("graphml", {"xmlns": GRAPHML_NS})
    keys = [("canonical", "node", "string"), ("names", "node", "string"), ("mention_count", "node", "int"),
            ("degree", "node", "int"), ("weight", "edge", "int")]
    if styled:
        keys += [("size", "node", "double"), ("color", "node", "string"),
                 ("thickness", "edge", "double"), ("color_e", "edge", "string")]
    if isinstance(network, DynamicNetwork):
        keys += [("window_start", "graph", "int"), ("window_end", "graph", "int")]
    for name, domain, typ in keys:
        attr_name = "color" if name == "color_e" else name
        ET.SubElement(root, "key", {"id": name, "for": domain, "attr.name": attr_name, "attr.type": typ})
    if isinstance(network, DynamicNetwork):
        for i, s in enumerate(network.slices):
            _graphml_graph(root, s.network, f"slice{i}", (s.start, s.end))
    else:
        _graphml_graph(root, network, "G")
    if styled:
        _style_graphml(root, network)
    return _to_bytes(root)


def _hex(t: float) -> str:
    return "#%02x%02x%02x" % ramp_color(t)


def _style_graphml(root: ET.Element, network) -> None:
    graphs = root.findall("graph")
    nets = [s.network for s in network.slices] if isinstance(network, DynamicNetwork) else [network]
    for graph, net in zip(graphs, nets):
        style = StyledNetwork.from_network(net)
        for node, v in zip(graph.findall("node"), net.vertices):
            ET.SubElement(node, "data", {"key": "size"}).text = _fmt(style.vertex_size[v.id])
            ET.SubElement(node, "data", {"key": "color"}).text = _hex(style.vertex_color[v.id])
        for edge, e in zip(graph.findall("edge"), net.edges):
            ET.SubElement(edge, "data", {"key": "thickness"}).text = _fmt(style.edge_thickness[(e.a, e.b)])
            ET.SubElement(edge, "data", {"key": "color_e"}).text = _hex(style.edge_color[(e.a, e.b)])


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot_graph(network: CharacterNetwork, name: str, styled: bool, window=None) -> list[str]:
    lines = [f"graph {_dot_quote(name)} {{"]
    if window is not None:
        lines.append(f"  window_start={window[0]};")
        lines.append(f"  window_end={window[1]};")
    style = StyledNetwork.from_network(network) if styled else None
    for v in network.vertices:
        attrs = [f"label={_dot_quote(v.canonical)}", f"canonical={_dot_quote(v.canonical)}",
                 f"names={_dot_quote(_names_value(v.names))}",
                 f"mention_count={v.mention_count}", f"degree={v.degree}"]
        if style:
            attrs += [f"width={_fmt(style.vertex_size[v.id] / 10)}", "style=filled",
                      f"fillcolor={_dot_quote(_hex(style.vertex_color[v.id]))}"]
        lines.append(f"  {v.id} [{', '.join(attrs)}];")
    for e in network.edges:
        attrs = [f"weight={e.weight}"]
        if style:
            attrs += [f"penwidth={_fmt(style.edge_thickness[(e.a, e.b)])}",
                      f"color={_dot_quote(_hex(style.edge_color[(e.a, e.b)]))}"]
        lines.append(f"  {e.a} -- {e.b} [{', '.join(attrs)}];")
    lines.append("}")
    return lines


def to_dot(network: CharacterNetwork | DynamicNetwork, styled: bool = False) -> bytes:
    if isinstance(network, DynamicNetwork):
        lines = []
        for i, s in enumerate(network.slices):
            lines += _dot_graph(s.network, f"slice{i}", styled, (s.start, s.end))
    else:
        lines = _dot_graph(network, "character_network", styled)
    return ("\n".join(lines) + "\n").encode("utf-8")


def to_json(network: CharacterNetwork | DynamicNetwork, styled: bool = False) -> bytes:
    """Stable JSON layout::

        {"schema": "charnet.network/1", "kind": "static",
         "vertices": [{"id", "canonical", "names", "mention_count", "degree"}...],
         "edges": [{"source", "target", "weight"}...]}

    Dynamic networks use ``"kind": "dynamic"`` and a ``"slices"`` list whose
    items carry ``start``/``end`` token bounds plus ``vertices`` and ``edges``.
    Styled output adds ``size``/``color`` to vertices and ``thickness``/``color``
    to edges.
    """
    doc = {"schema": JSON_SCHEMA, **any_network_to_json(network)}
    if styled:
        parts = doc["slices"] if doc["kind"] == "dynamic" else [doc]
        nets = [s.network for s in network.slices] if isinstance(network, DynamicNetwork) else [network]
        for part, net in zip(parts, nets):
            style = StyledNetwork.from_network(net)
            for v in part["vertices"]:
                v["size"] = round(style.vertex_size[v["id"]], 6)
                v["color"] = _hex(style.vertex_color[v["id"]])
            for e in part["edges"]:
                key = (e["source"], e["target"])
                e["thickness"] = round(style.edge_thickness[key], 6)
                e["color"] = _hex(style.edge_color[key])
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


_WRITERS = {"gexf": to_gexf, "graphml": to_graphml, "dot": to_dot, "json": to_json}


def export_network(network: CharacterNetwork | DynamicNetwork, format: str = "gexf", styled: bool = False) -> bytes:
    try:
        writer = _WRITERS[format]
    except KeyError:
        raise UnsupportedFormat(f"unsupported format {format!r}; choose from {', '.join(FORMATS)}") from None
    if not isinstance(network, (CharacterNetwork, DynamicNetwork)):
        raise SerializationError(f"cannot serialize {type(network).__name__}")
    try:
        return writer(network, styled)
    except (TypeError, ValueError, KeyError) as exc:
        raise SerializationError(str(exc)) from exc


def write_atomic(path: str | os.PathLike, data: bytes) -> None:
    """Write ``data`` to a temporary file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- injection files ------------------------------------------------------------------


def _fields(path, min_fields: int, max_fields: int):
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if not min_fields <= len(parts) <= max_fields:
                raise MalformedArtifact(f"expected {min_fields} to {max_fields} tab-separated fields", lineno)
            yield lineno, parts


def _int(value: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise MalformedArtifact(f"{value!r} is not a token index", lineno) from None


def _span(a: str, b: str, lineno: int, n_tokens: int | None) -> tuple[int, int]:
    first, last = _int(a, lineno), _int(b, lineno)
    if first < 0 or first > last:
        raise MalformedArtifact(f"invalid span ({first}, {last})", lineno)
    if n_tokens is not None and last >= n_tokens:
        raise MalformedArtifact(f"span ({first}, {last}) beyond last token {n_tokens - 1}", lineno)
    return first, last


def read_injection_file(path: str | os.PathLike, key: ArtifactKey | str, tokens: Sequence | None = None):
    """Read a line-delimited, tab-separated injection file.

    Record layouts (token indices, inclusive)::

        entities  first<TAB>last<TAB>label         (only PER records are kept)
        corefs    chain_id<TAB>first<TAB>last
        quotes    first<TAB>last[<TAB>open_mark<TAB>close_mark]

    Blank lines and lines starting with ``#`` are ignored. With ``tokens``
    spans are range-checked and surfaces filled in.
    """
    key = as_key(key)
    n = len(tokens) if tokens is not None else None
    if key is ArtifactKey.ENTITIES:
        mentions = []
        prev_last, prev_line = -1, 0
        for lineno, (a, b, label) in _fields(path, 3, 3):
            first, last = _span(a, b, lineno, n)
            label = label.strip()
            if label.upper() not in ("PER", "B-PER", "PERSON"):
                continue
            if first <= prev_last:
                raise MalformedArtifact(f"span ({first}, {last}) overlaps or precedes line {prev_line}", lineno)
            prev_last, prev_line = last, lineno
            mentions.append(EntityMention(first, last, "", "PER"))
        return check_artifact(key, mentions, tokens)
    if key is ArtifactKey.COREFS:
        chains: dict[str, list[tuple[int, int]]] = {}
        for lineno, (cid, a, b) in _fields(path, 3, 3):
            chains.setdefault(cid, []).append(_span(a, b, lineno, n))
        return tuple(CorefChain(tuple(spans)) for spans in chains.values())
    if key is ArtifactKey.QUOTES:
        quotes = []
        prev_last, prev_line = -1, 0
        for lineno, parts in _fields(path, 2, 4):
            first, last = _span(parts[0], parts[1], lineno, n)
            if first <= prev_last:
                raise MalformedArtifact(f"quote overlaps or precedes line {prev_line}", lineno)
            prev_last, prev_line = last, lineno
            open_mark = parts[2] if len(parts) > 2 else ""
            close_mark = parts[3] if len(parts) > 3 else ""
            quotes.append(Quote(first, last, open_mark, close_mark))
        return check_artifact(key, quotes, tokens)
    raise MalformedArtifact(f"no injection file format for {key.value}")
