import random

import pytest

from charnet.ner import EntityMention
from charnet.unification import Character


def make_characters(layout):
    """Characters from ``{id: [(first, last), ...]}``."""
    chars = []
    for cid, spans in sorted(layout.items()):
        mentions = tuple(EntityMention(a, b, f"C{cid}") for a, b in sorted(spans))
        chars.append(Character(cid, frozenset({f"C{cid}"}), f"C{cid}", mentions))
    return chars


def random_layout(rng: random.Random, max_mentions=50, max_characters=6, span_max=3, spread=4):
    """Non-overlapping mention spans assigned to random characters."""
    n_chars = rng.randint(1, max_characters)
    n_mentions = rng.randint(0, max_mentions)
    layout = {c: [] for c in range(n_chars)}
    pos = 0
    for _ in range(n_mentions):
        pos += rng.randint(0, spread)
        length = rng.randint(1, span_max)
        layout[rng.randrange(n_chars)].append((pos, pos + length - 1))
        pos += length
    return layout, pos


@pytest.fixture
def rng():
    return random.Random(1813)


_NAME_PARTS = ["Elizabeth", "Darcy", "Jane", "Mr.", "Mrs.", "Bennet", "Élise", "O'Brien", "Lydia", "Kitty", "Ann"]


def _random_rows(rng, ids):
    rows = []
    for vid in ids:
        names = sorted({" ".join(rng.sample(_NAME_PARTS, rng.randint(1, 2))) for _ in range(rng.randint(1, 3))})
        rows.append((vid, rng.choice(names), rng.randint(1, 40), names))
    return rows


def _random_weights(rng, ids):
    weights = {}
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if rng.random() < 0.4:
                weights[(a, b)] = rng.randint(1, 25)
    return weights


def random_network(rng: random.Random, max_vertices=8):
    """Random valid CharacterNetwork with consistent degrees."""
    from charnet.graph_extraction import CharacterNetwork

    ids = sorted(rng.sample(range(3 * max_vertices), rng.randint(0, max_vertices)))
    return CharacterNetwork.build(_random_rows(rng, ids), _random_weights(rng, ids))


def random_dynamic(rng: random.Random, max_slices=5, max_vertices=8):
    """Slices over one shared character table, each slice holding a random subset."""
    from charnet.graph_extraction import CharacterNetwork, DynamicNetwork, NetworkSlice

    table = _random_rows(rng, list(range(max_vertices)))
    window = rng.randint(5, 200)
    slices = []
    for k in range(rng.randint(1, max_slices)):
        rows = [(vid, canon, rng.randint(1, 20), names) for vid, canon, _, names in table if rng.random() < 0.6]
        weights = _random_weights(rng, [r[0] for r in rows])
        slices.append(NetworkSlice(k * window, (k + 1) * window, CharacterNetwork.build(rows, weights)))
    return DynamicNetwork(tuple(slices))


def known_steps():
    """One instance of every shipped step."""
    from charnet.graph_extraction import CoOccurrencesGraphExtractor, ConversationalGraphExtractor
    from charnet.ner import NamedEntityRecognizer
    from charnet.preprocessing import CustomSubstitutionPreprocessor, Tokenizer
    from charnet.quotes import QuoteDetector, SpeakerDetector
    from charnet.unification import GraphRulesCharacterUnifier, NaiveCharacterUnifier

    return [
        CustomSubstitutionPreprocessor([]), Tokenizer(), QuoteDetector(), NamedEntityRecognizer(),
        NaiveCharacterUnifier(), GraphRulesCharacterUnifier(), SpeakerDetector(),
        CoOccurrencesGraphExtractor(), ConversationalGraphExtractor(),
    ]


PRIDE_FIXTURE = (
    "Mr. Darcy smiled at Elizabeth. Elizabeth laughed at Mr. Darcy, and Jane watched them.\n\n"
    "Jane said nothing to Mr. Darcy."
)


# acceptance results, printed once at the end of the session
ACCEPTANCE_RESULTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[number])
