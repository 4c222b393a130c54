import random

import pytest
from hypothesis import given, settings, strategies as st

from charnet.graph_extraction import (
    CoOccurrencesGraphExtractor,
    ExtractionConfig,
    dynamic_windows,
    extract_conversational,
    extract_cooccurrence_dynamic,
    extract_cooccurrence_static,
)
from charnet.ner import EntityMention
from charnet.quotes import Quote, SpeakerAttribution
from conftest import make_characters, random_layout
from oracles import consecutive_speaker_oracle, cooccurrence_oracle

layouts = st.builds(lambda seed: random_layout(random.Random(seed)), st.integers(0, 2**32))


def static(layout, dist=10):
    return extract_cooccurrence_static(make_characters(layout), ExtractionConfig(dist))


class TestStatic:
    def test_close_pair(self):
        net = static({0: [(0, 0)], 1: [(5, 5)]})
        assert net.weights() == {(0, 1): 1}

    def test_far_pair(self):
        net = static({0: [(0, 0)], 1: [(20, 20)]})
        assert net.edges == () and [v.id for v in net.vertices] == [0, 1]
        assert all(v.degree == 0 for v in net.vertices)

    def test_two_pairs(self):
        assert static({0: [(0, 0), (8, 8)], 1: [(5, 5)]}).weights() == {(0, 1): 2}

    def test_gap_measured_between_boundaries(self):
        # gap = 12 - 2 = 10
        assert static({0: [(0, 2)], 1: [(12, 13)]}, dist=10).weights() == {(0, 1): 1}
        assert static({0: [(0, 2)], 1: [(13, 13)]}, dist=10).weights() == {}

    def test_empty(self):
        net = extract_cooccurrence_static([])
        assert net.vertices == () and net.edges == ()

    def test_vertex_attributes(self):
        net = static({0: [(0, 0), (3, 3)], 1: [(5, 5)], 2: [(90, 90)]})
        v = net.vertex(0)
        assert (v.canonical, v.mention_count, v.degree) == ("C0", 2, 1)
        assert net.vertex(2).degree == 0

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            ExtractionConfig(co_occurrences_dist=0)
        with pytest.raises(ValueError):
            ExtractionConfig(dynamic=True, dynamic_window=None)
        with pytest.raises(ValueError):
            ExtractionConfig(dynamic=True, dynamic_window=5, dynamic_overlap=5)


@settings(max_examples=200, deadline=None)
@given(layouts, st.sampled_from([1, 5, 10]))
def test_oracle_equivalence(layout_and_count, dist):
    layout, _ = layout_and_count
    net = static(layout, dist)
    assert net.weights() == cooccurrence_oracle(layout, dist)
    for e in net.edges:
        assert e.a < e.b and e.weight >= 1
    assert net.weight(1, 0) == net.weight(0, 1)


@settings(max_examples=100, deadline=None)
@given(layouts, st.integers(1, 9), st.integers(1, 9))
def test_dist_monotone(layout_and_count, d1, d2):
    layout, _ = layout_and_count
    lo, hi = static(layout, min(d1, d2)).weights(), static(layout, max(d1, d2)).weights()
    assert all(hi.get(k, 0) >= w for k, w in lo.items())


class TestDynamic:
    def test_windows_partition(self):
        assert dynamic_windows(10, 4) == [(0, 4), (4, 8), (8, 10)]
        assert dynamic_windows(8, 4) == [(0, 4), (4, 8)]

    def test_windows_overlap(self):
        assert dynamic_windows(10, 4, 2) == [(0, 4), (2, 6), (4, 8), (6, 10)]

    def test_single_window(self):
        layout = {0: [(0, 0), (8, 8)], 1: [(5, 5)]}
        dyn = extract_cooccurrence_dynamic(make_characters(layout), ExtractionConfig(10, True, 100), token_count=20)
        assert len(dyn) == 1
        assert dyn.slices[0].network == static(layout)

    def test_empty_window(self):
        layout = {0: [(0, 0)], 1: [(2, 2)]}
        dyn = extract_cooccurrence_dynamic(make_characters(layout), ExtractionConfig(10, True, 10), token_count=20)
        assert len(dyn) == 2
        assert dyn.slices[1].network.vertices == ()

    def test_straddling_pair(self):
        layout = {0: [(8, 8)], 1: [(11, 11)]}
        chars = make_characters(layout)
        dyn = extract_cooccurrence_dynamic(chars, ExtractionConfig(10, True, 10), token_count=20)
        assert all(s.network.edges == () for s in dyn.slices)
        assert static(layout).weights() == {(0, 1): 1}

    def test_straddling_mention_excluded(self):
        dyn = extract_cooccurrence_dynamic(make_characters({0: [(9, 10)]}), ExtractionConfig(10, True, 10), 20)
        assert all(s.network.vertices == () for s in dyn.slices)

    def test_step_uses_token_count(self):
        step = CoOccurrencesGraphExtractor(dynamic=True, dynamic_window=5)
        out = step(language="eng", characters=make_characters({0: [(0, 0)]}), tokens=list(range(12)))
        assert [(s.start, s.end) for s in out["character_network"].slices] == [(0, 5), (5, 10), (10, 12)]


@settings(max_examples=100, deadline=None)
@given(layouts, st.integers(1, 30), st.sampled_from([1, 5, 10]))
def test_partition_windows_diff(layout_and_count, window, dist):
    layout, count = layout_and_count
    chars = make_characters(layout)
    dyn = extract_cooccurrence_dynamic(chars, ExtractionConfig(dist, True, window), token_count=count)
    union = {}
    for s in dyn.slices:
        for k, w in s.network.weights().items():
            union[k] = union.get(k, 0) + w
    # recount static pairs split by whether both mentions share a window
    windows = dynamic_windows(count, window)

    def window_of(span):
        for i, (a, b) in enumerate(windows):
            if a <= span[0] and span[1] < b:
                return i
        return None

    inside, straddle = {}, {}
    flat = [(cid, span) for cid, spans in layout.items() for span in spans]
    for i, (ca, sa) in enumerate(flat):
        for cb, sb in flat[i + 1:]:
            if ca == cb:
                continue
            m1, m2 = (sa, sb) if sa[0] <= sb[0] else (sb, sa)
            if not 0 <= m2[0] - m1[1] <= dist:
                continue
            key = (min(ca, cb), max(ca, cb))
            wa, wb = window_of(sa), window_of(sb)
            bucket = inside if wa is not None and wa == wb else straddle
            bucket[key] = bucket.get(key, 0) + 1
    assert union == inside
    total = static(layout, dist).weights()
    for k in set(total) | set(union):
        assert total.get(k, 0) - union.get(k, 0) == straddle.get(k, 0)


@settings(max_examples=100, deadline=None)
@given(layouts, st.integers(1, 30), st.integers(0, 2**32))
def test_slice_locality(layout_and_count, window, seed):
    layout, count = layout_and_count
    config = ExtractionConfig(5, True, window)
    base = extract_cooccurrence_dynamic(make_characters(layout), config, count)
    # move mentions of one window elsewhere and check the other slices stay put
    target = random.Random(seed).randrange(len(base.slices))
    a, b = base.slices[target].start, base.slices[target].end
    perturbed = {cid: [s for s in spans if not (a <= s[0] and s[1] < b)] for cid, spans in layout.items()}
    after = extract_cooccurrence_dynamic(make_characters(perturbed), config, count)
    for i, (s1, s2) in enumerate(zip(base.slices, after.slices)):
        if i != target and not (s1.start < b and a < s1.end):
            assert s1.network.weights() == s2.network.weights()


def _conversation(speaker_ids, gap_after=None, spacing=3):
    """Quotes every ``spacing`` tokens with speakers given as character ids (None = unattributed)."""
    quotes, atts, layout = [], [], {}
    pos = 0
    for qi, sid in enumerate(speaker_ids):
        quotes.append(Quote(pos, pos + 1, '"', '"'))
        if sid is not None:
            mention = (pos + 2, pos + 2)
            layout.setdefault(sid, []).append(mention)
            atts.append(SpeakerAttribution(qi, EntityMention(*mention, f"C{sid}"), "trailing-said"))
        else:
            atts.append(SpeakerAttribution(qi, None, "none"))
        pos += spacing
        if gap_after is not None and qi == gap_after:
            pos += 500
    return quotes, atts, make_characters(layout)


class TestConversational:
    def test_alternating(self):
        net = extract_conversational(*_conversation([0, 1, 0, 1]))
        assert net.weights() == {(0, 1): 3}

    def test_unattributed(self):
        quotes, atts, _ = _conversation([None, None])
        net = extract_conversational(quotes, atts, make_characters({0: [(90, 90)]}))
        assert net.edges == ()

    def test_gap_splits_conversations(self):
        net = extract_conversational(*_conversation([0, 1], gap_after=0), conversation_gap=100)
        assert net.edges == ()

    def test_unattributed_does_not_break(self):
        net = extract_conversational(*_conversation([0, None, 1]))
        assert net.weights() == {(0, 1): 1}

    def test_all_pairs(self):
        net = extract_conversational(*_conversation([0, 1, 2]), pairing="all")
        assert net.weights() == {(0, 1): 1, (0, 2): 1, (1, 2): 1}


@settings(max_examples=100, deadline=None)
@given(st.lists(st.one_of(st.none(), st.integers(0, 4)), max_size=30))
def test_conversational_oracle(speaker_ids):
    net = extract_conversational(*_conversation(speaker_ids))
    assert net.weights() == consecutive_speaker_oracle(speaker_ids)
