import random

import pytest
from hypothesis import given, settings, strategies as st

from dertype.complexes import check_complex, vector_rank
from dertype.dsl import parse_presentation
from dertype.fields import QQ, PrimeField
from dertype.forms import BoxSpec, tits_form
from dertype.truncated import TruncatedAlgebra
from dertype.wildness import (GATE_FIELD, ModulePair, WitnessTemplate, _LinearModel, complex_iso,
                              get_bimodule, get_template, instantiate_witness, load_bimodules,
                              load_templates, module_iso, random_module, representation_gate,
                              strict_wildness_gate, verify_zero_composition)

F = PrimeField(101)
TEMPLATES = sorted(load_templates())
MODULES = [ModulePair([[0]], [[0]]), ModulePair([[1, 2], [0, 3]], [[0, 1], [1, 0]]),
           ModulePair([[0, 1], [0, 0]], [[2, 0], [5, -1]])]


def case_algebra(T, field=QQ):
    p = T.presentation(field)
    return TruncatedAlgebra(p, verify_zero_composition(T, p).truncation, field)


# --- module isomorphism ---------------------------------------------------------------

def test_zero_modules_isomorphic():
    assert module_iso(ModulePair([[0]], [[0]]), ModulePair([[0]], [[0]]))


def test_nilpotent_rank_distinguishes():
    N = [[0, 1], [0, 0]]
    Z = [[0, 0], [0, 0]]
    assert not module_iso(ModulePair(N, Z), ModulePair(Z, N))
    assert not module_iso(ModulePair(N, Z, F), ModulePair(Z, N, F))


def test_conjugate_recovered():
    L = ModulePair([[1, 2], [3, 4]], [[0, 1], [5, 0]])
    S = [[2, 1], [1, 1]]
    assert module_iso(L, L.conjugate(S))
    Lp = ModulePair(L.X, L.Y, F)
    assert module_iso(Lp, Lp.conjugate(S))


def test_different_sizes_not_isomorphic():
    assert not module_iso(ModulePair([[0]], [[0]]), MODULES[1])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2))
def test_module_iso_is_an_equivalence(seed, n):
    rng = random.Random(seed)
    L = random_module(n, F, rng)
    S = [[rng.randrange(1, 101) if i == j else rng.randrange(101) for j in range(n)] for i in range(n)]
    if n == 2 and (S[0][0] * S[1][1] - S[0][1] * S[1][0]) % 101 == 0:
        S[0][1] = (S[0][1] + 1) % 101
    M = L.conjugate(S)
    R = M.conjugate([[1] * n if i == 0 else [int(i == j) for j in range(n)] for i in range(n)])
    assert module_iso(L, L)
    assert module_iso(L, M) and module_iso(M, L)
    assert module_iso(L, R)


# --- templates and certificates ------------------------------------------------------------

@pytest.mark.parametrize("tid", TEMPLATES)
def test_template_certificate(tid):
    T = get_template(tid)
    rep = verify_zero_composition(T)
    assert rep.ok, rep.failures
    assert rep.composites and all(c["normal_form"] == "0" for c in rep.composites)


def test_template_json_round_trip():
    for tid in TEMPLATES:
        data = get_template(tid).to_json()
        data.pop("degrees")  # derived from the box
        data["params"] = tuple(data["params"])
        assert WitnessTemplate(**data).to_json() == get_template(tid).to_json()


def test_sabotage_detected():
    # drop y*x from the case algebra: the composite of w = x*y with b = y survives
    T = get_template("lemma3.2")
    p = parse_presentation("quiver { v 1; x:1->1, y:1->1 } rel { x*x; y*y }")
    rep = verify_zero_composition(T, p)
    assert not rep.ok
    assert rep.failures == [{"kind": "nonzero_composite", "path": ["q", "s"], "labels": ["b", "w"],
                             "value": "y*x*y"}]


def test_endpoint_failure_reported():
    T = get_template("case3a")
    p = parse_presentation("quiver { v 1 2; a:1->2, b:2->1 } rel { a*b*a }")
    swapped = {k: v for k, v in T.binding.items()}
    swapped["a"], swapped["b"] = T.binding.get("b", "b"), T.binding.get("a", "a")
    rep = verify_zero_composition(T, p, binding=swapped)
    assert not rep.ok


def test_ladder_over_cubic_loop():
    T = get_template("thmA-ladder")
    p = parse_presentation("quiver { v 1; x:1->1 } rel { x*x*x }")
    assert verify_zero_composition(T, p)
    p4 = parse_presentation("quiver { v 1; x:1->1 } rel { x*x*x*x }")
    rep = verify_zero_composition(T, p4, binding={"P": "x^3", "Q": "x^2"})
    assert rep.ok and not rep.warnings


# --- instantiation ------------------------------------------------------------------------

@pytest.mark.parametrize("tid", TEMPLATES)
def test_instantiations_are_minimal_complexes(tid):
    T = get_template(tid)
    alg = case_algebra(T)
    B = get_bimodule(T.shape)
    for L in MODULES:
        C = instantiate_witness(T, B, L, alg)
        assert check_complex(C, alg), tid
        # each node contributes rank_i * n copies of its projective
        total = sum(sum(r) for r in C.ranks.values())
        assert total == L.n * sum(B.ranks.values())


@pytest.mark.parametrize("tid", ["lemma3.2", "case3a", "thmA-ladder", "case8b"])
def test_rank_arithmetic(tid):
    T = get_template(tid)
    alg = case_algebra(T)
    B = get_bimodule(T.shape)
    one = vector_rank(instantiate_witness(T, B, MODULES[0], alg))
    two = vector_rank(instantiate_witness(T, B, MODULES[1], alg))
    assert two == one.scaled(2)


def test_direct_sum_of_modules():
    T = get_template("lemma3.2")
    alg = case_algebra(T, F)
    B = get_bimodule(T.shape)
    rng = random.Random(3)
    L1, L2 = random_module(1, F, rng), random_module(2, F, rng)
    C = instantiate_witness(T, B, L1.direct_sum(L2), alg)
    D = instantiate_witness(T, B, L1, alg).direct_sum(instantiate_witness(T, B, L2, alg))
    model = _LinearModel(alg)
    assert complex_iso(C, D, model, rng)[0]
    assert not complex_iso(C, instantiate_witness(T, B, random_module(3, F, rng), alg), model, rng)[0]


def test_field_mismatch_rejected():
    T = get_template("lemma3.2")
    with pytest.raises(ValueError):
        instantiate_witness(T, get_bimodule("W1"), ModulePair([[0]], [[0]], F), case_algebra(T))


# --- bimodules and the gate -------------------------------------------------------------

def test_box_bricks_are_real_roots():
    # the part glued to the terminal vertex is a brick of the box minus that vertex
    for name in ("W5", "W6"):
        B = get_bimodule(name)
        box, last = B.box, B.box.vertices[-1]
        sub = BoxSpec(box.vertices[:-1], tuple(a for a in box.solid if last not in a[1:]), box.dashed)
        assert tits_form(sub, [B.ranks[v] for v in sub.vertices]) == 1


@pytest.mark.parametrize("shape", ["W1", "W2", "W3", "W4", "W5", "W6", "W1op", "W5op"])
def test_representation_gate(shape):
    rep = representation_gate(get_bimodule(shape), count=6, seed=2)
    assert rep["ok"], rep["failures"]


@pytest.mark.parametrize("tid", ["lemma3.2", "lemma3.2-dual", "case8b"])
def test_small_gate(tid):
    rep = strict_wildness_gate(get_template(tid), count=6, seed=4)
    assert rep["ok"] and rep["collisions"] == 0, rep["failures"]


def test_gate_rejects_broken_certificate():
    p = parse_presentation("quiver { v 1; x:1->1, y:1->1 } rel { x*x; y*y }", GATE_FIELD)
    rep = strict_wildness_gate(get_template("lemma3.2"), alg=p, count=4)
    assert not rep["ok"] and not rep["certificate"]


def test_degenerate_ladder_collides():
    # over x^3 every label of the literal ladder vanishes, so all complexes split alike
    T = get_template("thmA-ladder")
    p = parse_presentation("quiver { v 1; x:1->1 } rel { x*x*x }", GATE_FIELD)
    rep = strict_wildness_gate(T, alg=p, count=4, seed=1)
    assert rep["certificate"] and rep["collisions"] > 0
