import itertools

import pytest
from hypothesis import given, settings, strategies as st

from dertype.forms import (BOXES, BoxSpec, diagram_type, find_negative_vector, is_dynkin, is_euclidean,
                           is_wild_hereditary, separated_quiver, tits_form)
from dertype.quiver import Quiver


def quiver(n, edges):
    verts = [str(i) for i in range(1, n + 1)]
    return Quiver.from_spec(verts, [(f"e{k}", str(s), str(t)) for k, (s, t) in enumerate(edges)])


def oracle_form(box, d):
    idx = {v: i for i, v in enumerate(box.vertices)}
    q = sum(x * x for x in d)
    q -= sum(d[idx[s]] * d[idx[t]] for _, s, t in box.solid)
    q += sum(d[idx[s]] * d[idx[t]] for _, s, t in box.dashed)
    return q


def oracle_search(box, bound):
    for d in itertools.product(range(bound + 1), repeat=len(box.vertices)):
        if oracle_form(box, d) <= -1:
            return d
    return None


DYNKIN = {
    "A1": quiver(1, []), "A2": quiver(2, [(1, 2)]), "A3": quiver(3, [(1, 2), (3, 2)]),
    "A4": quiver(4, [(1, 2), (2, 3), (3, 4)]), "A5": quiver(5, [(2, 1), (2, 3), (4, 3), (4, 5)]),
    "D4": quiver(4, [(1, 2), (3, 2), (4, 2)]), "D5": quiver(5, [(1, 2), (3, 2), (2, 4), (4, 5)]),
}
KRONECKER = quiver(2, [(1, 2), (1, 2)])


def test_published_values():
    assert tits_form(BOXES["W5"], (2, 2, 2, 4, 4, 2, 2, 2, 1)) == -1
    assert tits_form(BOXES["W6"], (2, 2, 2, 4, 2, 2, 2, 1)) == -1


@pytest.mark.parametrize("name", sorted(BOXES))
def test_unit_vectors(name):
    b = BOXES[name]
    for i in range(len(b.vertices)):
        d = [0] * len(b.vertices)
        d[i] = 1
        assert tits_form(b, d) == 1


@pytest.mark.parametrize("name", ["W1", "W2", "W3", "W4"])
def test_wild_shapes(name):
    b = BOXES[name]
    assert is_wild_hereditary(b.to_quiver())
    d = find_negative_vector(b, 5)
    assert d is not None and tits_form(b, d) <= -1


def test_W1_first_negative_vector():
    # lexicographically first in the bound-5 cube
    assert find_negative_vector(BOXES["W1"], 5) == oracle_search(BOXES["W1"], 5) == (2, 2, 1)
    assert tits_form(BOXES["W1"], (2, 3, 1)) == -1


@pytest.mark.parametrize("name", ["W1", "W2", "W3"])
def test_search_matches_oracle(name):
    assert find_negative_vector(BOXES[name], 3) == oracle_search(BOXES[name], 3)


@pytest.mark.parametrize("name", ["W5", "W6"])
def test_box_search(name):
    d = find_negative_vector(BOXES[name], 4)
    assert d is not None and tits_form(BOXES[name], d) <= -1


@pytest.mark.parametrize("name", sorted(DYNKIN))
def test_dynkin(name):
    q = DYNKIN[name]
    assert diagram_type(q) == name
    assert is_dynkin(q) and not is_wild_hereditary(q)
    assert find_negative_vector(BoxSpec.from_quiver(q), 6) is None


def test_euclidean():
    assert diagram_type(KRONECKER) == "~A1"
    assert is_euclidean(KRONECKER) and not is_wild_hereditary(KRONECKER)
    assert diagram_type(quiver(5, [(1, 3), (2, 3), (3, 4), (5, 4), (4, 5)])) == "wild"
    assert diagram_type(quiver(5, [(1, 5), (2, 5), (3, 5), (4, 5)])) == "~D4"
    assert diagram_type(quiver(3, [(1, 2), (2, 3), (3, 1)])) == "~A2"


def test_separated_quiver_doubles_vertices():
    q = quiver(2, [(1, 2), (2, 1)])
    sq = separated_quiver(q)
    assert len(sq.vertices) == 4 and len(sq.arrows) == 2


# --- properties ----------------------------------------------------------------------

vectors = st.integers(min_value=0, max_value=4)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(sorted(BOXES)), st.data())
def test_form_is_quadratic_and_matches_oracle(name, data):
    b = BOXES[name]
    d = data.draw(st.lists(vectors, min_size=len(b.vertices), max_size=len(b.vertices)))
    assert tits_form(b, d) == oracle_form(b, d)
    assert tits_form(b, [2 * x for x in d]) == 4 * tits_form(b, d)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["W5", "W6"]), st.data())
def test_monotonicity(name, data):
    b = BOXES[name]
    d = data.draw(st.lists(vectors, min_size=len(b.vertices), max_size=len(b.vertices)))
    fewer_dashed = BoxSpec(b.vertices, b.solid, b.dashed[1:])
    assert tits_form(fewer_dashed, d) <= tits_form(b, d)
    s, t = data.draw(st.sampled_from(b.vertices)), data.draw(st.sampled_from(b.vertices))
    more_solid = BoxSpec(b.vertices, b.solid + (("extra", s, t),), b.dashed)
    assert tits_form(more_solid, d) <= tits_form(b, d)
