import pytest

from pronorm.group import overgroups_of, sylow_p, symmetric_group
from pronorm.wreath import WreathGroup, build_product, wreath_product

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def full_top(G, H) -> bool:
    if isinstance(G, WreathGroup):
        return all(G.components[i].bar(G.project(i, H)).order == G.components[i].nfact for i in range(G.k))
    return G.bar(H).order == G.nfact


def sylow2_corpus(G):
    """(all overgroups of a Sylow 2-subgroup, those with full top image)."""
    S = sylow_p(G, 2)
    overs = overgroups_of(S, G)
    return S, overs, [H for H in overs if full_top(G, H)]


@pytest.fixture(scope="session")
def z3s3():
    return wreath_product(3, 3)


@pytest.fixture(scope="session")
def z3s2():
    return wreath_product(3, 2)


@pytest.fixture(scope="session")
def sym4():
    return symmetric_group(4)


@pytest.fixture(scope="session")
def z3s3_corpus(z3s3):
    return sylow2_corpus(z3s3)


@pytest.fixture(scope="session")
def two_factor():
    return build_product([(3, 2), (3, 3)])


@pytest.fixture(scope="session")
def sp2_wr():
    from pronorm.matgrp import sp2_3_wr_sym3

    return sp2_3_wr_sym3()


@pytest.fixture(scope="session")
def epi(sp2_wr):
    from pronorm.matgrp import o2_epimorphism

    return o2_epimorphism(sp2_wr)


@pytest.fixture(scope="session")
def sp2_corpus(sp2_wr):
    import numpy as np

    S = sylow_p(sp2_wr, 2)
    overs = overgroups_of(S, sp2_wr)
    tops = [H for H in overs if len(np.unique(sp2_wr.bar_index(H.indices))) == sp2_wr.nfact]
    return S, overs, tops


@pytest.fixture(scope="session")
def two_factor_corpus(two_factor):
    return sylow2_corpus(two_factor)
