import random

import pytest

from simultaneity.clocknet import ClockModel, Link, Message, Node, Scenario, SyncSession, Tick


def random_scenario(
    rng: random.Random,
    *,
    max_nodes: int = 4,
    max_events: int = 50,
    positioned: bool = True,
    noise: bool = False,
    seed: int | None = None,
) -> Scenario:
    """A small connected network with mixed traffic; at most ``max_events`` trace events."""
    n = rng.randint(2, max_nodes)
    ids = [f"N{i}" for i in range(n)]
    positions = sorted(rng.sample(range(0, 5000), n)) if positioned else [None] * n
    nodes = [
        Node(
            ids[i],
            ClockModel(
                rng.randint(-5000, 5000),
                rng.randint(-2000, 2000),
                rng.randint(0, 30) if noise else 0,
            ),
            positions[i],
        )
        for i in range(n)
    ]
    links = []
    pairs = [(i, i + 1) for i in range(n - 1)]
    if n > 2 and rng.random() < 0.5:
        pairs.append((0, n - 1))
    for i, j in pairs:
        light = abs(positions[i] - positions[j]) if positioned else 0
        links.append(
            Link(
                ids[i],
                ids[j],
                max(1, light + rng.randint(0, 800)),
                max(1, light + rng.randint(0, 800)),
                rng.randint(0, 50) if noise else 0,
            )
        )
    traffic = []
    budget = max_events
    k = 0
    while budget >= 2:
        kind = rng.random()
        i, j = pairs[rng.randrange(len(pairs))]
        if rng.random() < 0.5:
            i, j = j, i
        at = rng.randint(0, 20_000)
        if kind < 0.5:
            traffic.append(Message(f"m{k}", ids[i], ids[j], at))
            budget -= 2
        elif kind < 0.8:
            traffic.append(Tick(f"t{k}", ids[rng.randrange(n)], at))
            budget -= 1
        elif budget >= 4:
            traffic.append(SyncSession(f"s{k}", ids[i], ids[j], at, 1, 0, rng.randint(0, 300)))
            budget -= 4
        k += 1
        if rng.random() < 0.1:
            break
    return Scenario(tuple(nodes), tuple(links), tuple(traffic), (), rng.getrandbits(64) if seed is None else seed)


@pytest.fixture
def rng():
    return random.Random(20261018)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion; printed at session end."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number: str, title: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}" + (f" ({detail})" if detail else "")
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split("criterion ")[1]):
            terminalreporter.write_line(line)
