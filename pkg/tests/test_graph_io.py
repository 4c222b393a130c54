import json
import random
import re

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from charnet.graph_extraction import CharacterNetwork, DynamicNetwork, NetworkSlice
from charnet.graph_io import (
    SerializationError,
    StyledNetwork,
    UnsupportedFormat,
    check_gexf,
    export_network,
    read_gexf,
    read_injection_file,
    to_gexf,
    to_graphml,
    write_atomic,
)
from charnet.ner import EntityMention
from charnet.pipeline import MalformedArtifact
from charnet.preprocessing import tokenize
from conftest import random_dynamic, random_network

PAIR = CharacterNetwork.build([(0, "Elizabeth", 12, ["Elizabeth", "Liz"]), (1, "Darcy", 11, ["Darcy"])],
                              {(0, 1): 3})


class TestGexf:
    def test_empty(self):
        data = to_gexf(CharacterNetwork())
        assert check_gexf(data) == []
        assert b"<node " not in data
        assert read_gexf(data) == CharacterNetwork()

    def test_pair_round_trip(self):
        data = to_gexf(PAIR)
        assert check_gexf(data) == []
        assert re.search(rb'<edge [^>]*weight="3(\.0)?"', data)
        assert read_gexf(data) == PAIR

    def test_styled_round_trip(self):
        data = to_gexf(PAIR, styled=True)
        assert check_gexf(data) == []
        assert b"viz:size" in data and b"viz:color" in data and b"viz:thickness" in data
        assert read_gexf(data) == PAIR

    def test_dynamic_intervals(self):
        dyn = DynamicNetwork(tuple(NetworkSlice(k * 10, k * 10 + 10, PAIR) for k in range(3)))
        data = to_gexf(dyn)
        assert check_gexf(data) == []
        assert b'mode="dynamic"' in data
        back = read_gexf(data)
        assert [(s.start, s.end) for s in back.slices] == [(0, 10), (10, 20), (20, 30)]
        assert back == dyn

    def test_dynamic_with_empty_slice(self):
        dyn = DynamicNetwork((NetworkSlice(0, 5, PAIR), NetworkSlice(5, 10, CharacterNetwork())))
        data = to_gexf(dyn, styled=True)
        assert check_gexf(data) == []
        assert read_gexf(data) == dyn

    def test_checker_flags_broken_documents(self):
        assert check_gexf(b"<gexf>") != []
        good = to_gexf(PAIR).decode()
        assert check_gexf(good.replace('version="1.3"', 'version="9"')) != []
        assert check_gexf(good.replace('target="1"', 'target="7"')) != []

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32), st.booleans())
    def test_round_trip_random(self, seed, styled):
        rng = random.Random(seed)
        net = random_dynamic(rng) if seed % 4 == 0 else random_network(rng)
        data = to_gexf(net, styled=styled)
        assert check_gexf(data) == []
        assert read_gexf(data) == net


class TestGraphml:
    def test_networkx_reads_static(self):
        g = nx.read_graphml(__import__("io").BytesIO(to_graphml(PAIR, styled=True)))
        assert g.number_of_nodes() == 2
        assert g.nodes["0"]["canonical"] == "Elizabeth"
        assert g.edges["0", "1"]["weight"] == 3

    def test_matches_to_networkx(self):
        net = random_network(random.Random(3))
        g = nx.read_graphml(__import__("io").BytesIO(to_graphml(net)))
        h = net.to_networkx()
        assert sorted(g.nodes) == sorted(str(n) for n in h.nodes)
        assert {(min(a, b), max(a, b)): d["weight"] for a, b, d in g.edges(data=True)} == {
            (min(str(a), str(b)), max(str(a), str(b))): d["weight"] for a, b, d in h.edges(data=True)}

    def test_dynamic_has_one_graph_per_slice(self):
        dyn = DynamicNetwork((NetworkSlice(0, 5, PAIR), NetworkSlice(5, 10, PAIR)))
        assert to_graphml(dyn).count(b"<graph ") == 2


class TestOtherFormats:
    def test_dot(self):
        text = export_network(PAIR, "dot").decode()
        assert text.startswith("graph ")
        assert '0 -- 1 [weight=3' in text
        assert 'canonical="Elizabeth"' in text

    def test_json_schema(self):
        doc = json.loads(export_network(PAIR, "json"))
        assert doc["schema"] == "charnet.network/1" and doc["kind"] == "static"
        assert doc["edges"] == [{"source": 0, "target": 1, "weight": 3}]

    def test_json_deterministic(self):
        net = random_dynamic(random.Random(11))
        assert export_network(net, "json", True) == export_network(net, "json", True)

    def test_unsupported_format(self):
        with pytest.raises(UnsupportedFormat):
            export_network(PAIR, "png")

    def test_not_a_network(self):
        with pytest.raises(SerializationError):
            export_network({"nodes": []}, "json")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_style_monotone(seed):
    net = random_network(random.Random(seed))
    style = StyledNetwork.from_network(net)
    for u in net.vertices:
        for v in net.vertices:
            if u.degree > v.degree:
                assert style.vertex_size[u.id] > style.vertex_size[v.id]
    for e in net.edges:
        for f in net.edges:
            if e.weight > f.weight:
                assert style.edge_thickness[(e.a, e.b)] > style.edge_thickness[(f.a, f.b)]
    if net.vertices:
        low = min(v.degree for v in net.vertices)
        assert all(style.vertex_size[v.id] == 5.0 for v in net.vertices if v.degree == low)


class TestInjectionFiles:
    def test_entities(self, tmp_path):
        path = tmp_path / "e.tsv"
        path.write_text("# first\tlast\tlabel\n0\t1\tPER\n3\t3\tLOC\n", encoding="utf-8")
        tokens, _ = tokenize("Mr. Darcy smiled at Longbourn.")
        assert read_injection_file(path, "entities", tokens) == (EntityMention(0, 1, "Mr. Darcy"),)

    def test_empty(self, tmp_path):
        path = tmp_path / "e.tsv"
        path.write_text("", encoding="utf-8")
        assert read_injection_file(path, "entities") == ()

    def test_inverted_span(self, tmp_path):
        path = tmp_path / "e.tsv"
        path.write_text("0\t0\tPER\n\n5\t2\tPER\n", encoding="utf-8")
        with pytest.raises(MalformedArtifact) as info:
            read_injection_file(path, "entities")
        assert info.value.line == 3

    def test_out_of_range(self, tmp_path):
        path = tmp_path / "q.tsv"
        path.write_text("0\t99\n", encoding="utf-8")
        with pytest.raises(MalformedArtifact):
            read_injection_file(path, "quotes", tokenize("a b c")[0])

    def test_corefs(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("a\t0\t1\nb\t4\t4\na\t7\t7\n", encoding="utf-8")
        chains = read_injection_file(path, "corefs")
        assert [c.mentions for c in chains] == [((0, 1), (7, 7)), ((4, 4),)]

    def test_bad_field_count(self, tmp_path):
        path = tmp_path / "e.tsv"
        path.write_text("0\t1\n", encoding="utf-8")
        with pytest.raises(MalformedArtifact):
            read_injection_file(path, "entities")

    def test_no_format_for_key(self, tmp_path):
        path = tmp_path / "x.tsv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(MalformedArtifact):
            read_injection_file(path, "tokens")


def test_write_atomic(tmp_path):
    target = tmp_path / "sub" / "out.gexf"
    write_atomic(target, b"one")
    write_atomic(target, b"two")
    assert target.read_bytes() == b"two"
    assert [p.name for p in target.parent.iterdir()] == ["out.gexf"]


def test_dynamic_rejects_inconsistent_names():
    other = CharacterNetwork.build([(0, "Lizzy", 3, ["Lizzy"])], {})
    dyn = DynamicNetwork((NetworkSlice(0, 5, PAIR), NetworkSlice(5, 10, other)))
    with pytest.raises(SerializationError):
        export_network(dyn, "gexf")
