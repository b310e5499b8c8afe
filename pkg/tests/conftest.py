import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cliquehom.complex import CliqueComplex, WeightedGraph

settings.register_profile("default", max_examples=30, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_complex(seed: int, n: int | None = None, p: float = 0.5, dmax: int = 3,
                   weighted: bool = True, oriented: bool = True) -> CliqueComplex:
    """Clique complex of a G(n, p) graph with random weights and orientations."""
    rng = np.random.default_rng(seed)
    n = n if n is not None else int(rng.integers(3, 13))
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    w = {v: float(rng.uniform(0.3, 2.0)) if weighted else 1.0 for v in range(n)}
    X = CliqueComplex(WeightedGraph.build(w, edges), dmax)
    if oriented:
        for d in range(1, dmax + 1):
            for vs in X.simplices_vertices(d):
                if rng.random() < 0.5:
                    X.set_sign(vs, -1)
    return X


@st.composite
def complexes(draw, max_vertices: int = 12, dmax: int = 3):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(3, max_vertices))
    p = draw(st.sampled_from([0.3, 0.5, 0.7]))
    return random_complex(seed, n, p, dmax)


@pytest.fixture
def glued_squares():
    from cliquehom.gadgets import generalized_octahedron, thicken
    return thicken(generalized_octahedron(2))


# acceptance criteria report one line each in the terminal summary
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
