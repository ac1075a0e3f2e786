import pytest
from hypothesis import strategies as st

from infoprop.network import Network, PropagationEvent

PARAMS = (0.1, 0.2, 0.5, 0.8)

# Filled by test_acceptance; printed at the end of the session.
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k[2:])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {key}: {detail}")


@st.composite
def networks(draw, max_agents=8, max_out_degree=4, min_first_layer=2, distinct_times=False):
    """Arbitrary sponsor-rooted digraphs, cycles and skip edges included."""
    n = draw(st.integers(min_value=min_first_layer, max_value=max_agents))
    names = [chr(ord("A") + k) for k in range(n)]
    first = draw(st.lists(st.sampled_from(names), min_size=min_first_layer, max_size=min(4, n), unique=True))
    pairs = [("S", a) for a in first]
    for a in names:
        targets = draw(st.lists(st.sampled_from(["S"] + names), max_size=max_out_degree, unique=True))
        pairs += [(a, b) for b in targets if b != a]
    pairs = draw(st.permutations(pairs))
    if distinct_times:
        times = [float(k) for k in range(len(pairs))]
    else:
        times = draw(st.lists(st.integers(0, 6).map(float), min_size=len(pairs), max_size=len(pairs)))
    edges = tuple(PropagationEvent(t, a, b) for t, (a, b) in zip(times, pairs))
    return Network("S", frozenset(names), edges)


@pytest.fixture
def example2():
    from infoprop.generators import paper_fixture

    return paper_fixture("example2")


@pytest.fixture
def figure3():
    from infoprop.generators import paper_fixture

    return paper_fixture("figure3")


@pytest.fixture
def example1():
    from infoprop.generators import paper_fixture

    return paper_fixture("example1")
