import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soc import schema
from soc.errors import EmptyGraph
from soc.operad import (
    ColoredOperad,
    Digraph,
    Edge,
    OperationSpace,
    Signature,
    _build,
    cycle_signature,
    matrix_block_operad,
    network_operad,
    operad_from_json,
    operad_to_json,
    trivial_operad,
    validate_operad,
)

from gen import rand_digraph

seeds = st.integers(0, 2**32 - 1)


def three_element_operad(b_after_a="a"):
    """One color with P(*;*) spanned by id, a, b and a chosen multiplication table.

    With ``b_after_a="a"`` the table is not associative: (a.a).a = b.a = a but a.(a.a) = a.b = id.
    """
    table = {("a", ("a",)): {"b": 1}, ("a", ("b",)): {"id": 1}, ("b", ("a",)): {b_after_a: 1},
             ("b", ("b",)): {"a": 1}}
    return _build(["*"], [(["*"], "*", ["id", "a", "b"])], "z3", table)


def test_trivial_operad():
    p = trivial_operad()
    assert p.colors == ("*",) and p.endo_dim("*") == 1
    assert p.compose({"id": 1}, [{"id": 1}]) == {"id": 1}
    assert validate_operad(p).ok


def test_matrix_block_operad_shape():
    p = matrix_block_operad()
    assert [p.endo_dim(c) for c in p.colors] == [1, 1]
    assert p.signature_of("alpha") == Signature(("2",), "1")
    assert p.signature_of("theta12").arity == 2
    rep = validate_operad(p)
    assert rep.ok and rep.checked["unit_pairs"] > 0


def test_cyclic_group_is_valid_and_corruption_is_caught():
    # Z/3: a.a = b, a.b = id, b.a = id, b.b = a
    assert validate_operad(three_element_operad("id")).ok
    rep = validate_operad(three_element_operad("a"))
    assert not rep.ok
    assert {v.kind for v in rep.violations} == {"associativity"}


def test_scaled_unit_is_caught():
    p = trivial_operad()
    bad = ColoredOperad(p.colors, p.spaces, p.composition, {"*": {"id": 2}}, {}, "bad")
    rep = validate_operad(bad)
    assert not rep.ok and all(v.kind == "unit" for v in rep.violations)
    assert rep.violations[0].discrepancy == pytest.approx(1.0)


def test_missing_unit_and_unknown_colors():
    sp = (OperationSpace(Signature(("x",), "x"), ("e",)), OperationSpace(Signature(("x",), "y"), ("f",)))
    rep = validate_operad(ColoredOperad(("x",), sp, {}, {}, {}))
    kinds = [v.kind for v in rep.violations]
    assert "unit" in kinds and "structure" in kinds


def test_structural_errors_on_construction():
    with pytest.raises(ValueError):
        ColoredOperad(("a", "a"), ())
    s = Signature(("a",), "a")
    with pytest.raises(ValueError):
        ColoredOperad(("a",), (OperationSpace(s, ("u",)), OperationSpace(Signature(("a", "a"), "a"), ("u",))))


def test_composite_signature_checks_colors():
    p = matrix_block_operad()
    assert p.composite_signature("theta12", ["alpha", "id2"]) == Signature(("2", "2"), "1")
    with pytest.raises(ValueError):
        p.composite_signature("theta12", ["beta", "id2"])
    assert cycle_signature(p, ["beta", "alpha"]) == Signature(("1",), "1")
    with pytest.raises(ValueError):
        cycle_signature(p, ["beta", "beta"])


def test_underived_composites_are_none():
    p = matrix_block_operad()
    assert p.compose_basis("alpha", ["beta"]) is None
    assert p.compose({"alpha": 1}, [{"beta": 1}]) is None
    assert p.compose({"alpha": 2}, [{"id2": 3}]) == {"alpha": 6}


def _swap_operad(identity_scale=1.0):
    sig = Signature(("c", "c"), "c")
    spaces = [(["c"], "c", ["e"]), (["c", "c"], "c", ["m", "n"])]
    p = _build(["c"], spaces, "swap")
    acts = {(sig, (1, 0)): np.array([[0, 1], [1, 0]]), (sig, (0, 1)): identity_scale * np.eye(2)}
    return ColoredOperad(p.colors, p.spaces, p.composition, p.units, acts, "swap")


def test_symmetric_actions():
    assert validate_operad(_swap_operad()).ok
    rep = validate_operad(_swap_operad(2.0))
    assert not rep.ok and {v.kind for v in rep.violations} == {"equivariance"}


def test_network_operad_two_cycle():
    g = Digraph(("1", "2"), (Edge("1", "2", 2, "alpha"), Edge("2", "1", 3, "beta")))
    p = network_operad(g)
    assert p.signature_of("alpha") == Signature(("1",), "2")
    assert p.endo_dim("1") == p.endo_dim("2") == 1
    assert validate_operad(p).ok


def test_network_operad_pairs_and_loops():
    g = Digraph(("a", "b", "c"), (Edge("a", "c", 1, "x"), Edge("b", "c", 1, "y"), Edge("c", "c", 5, "s")))
    p = network_operad(g)
    assert p.signature_of("theta_x_y") == Signature(("a", "b"), "c")
    assert p.meta["self_loops"] == {"c": "s"}
    assert not p.has_label("s")
    with pytest.raises(EmptyGraph):
        network_operad(Digraph(()))
    with pytest.raises(ValueError):
        network_operad(Digraph(("a",), (Edge("a", "a", 1, "p"), Edge("a", "a", 2, "q"))))
    with pytest.raises(ValueError):
        Digraph(("a",), (Edge("a", "z", 1),))


@pytest.mark.parametrize("make", [trivial_operad, matrix_block_operad, three_element_operad, _swap_operad])
def test_operad_json_round_trip(make):
    p = make()
    d = json.loads(json.dumps(operad_to_json(p)))
    schema.check(d, schema.OPERAD)
    q = operad_from_json(d)
    assert operad_to_json(q) == operad_to_json(p)
    assert validate_operad(q).ok == validate_operad(p).ok


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_random_network_operads_are_valid_and_round_trip(seed):
    g = rand_digraph(np.random.default_rng(seed))
    p = network_operad(g)
    assert validate_operad(p).ok
    d = json.loads(json.dumps(g.to_json()))
    schema.check(d, schema.DIGRAPH)
    assert Digraph.from_json(d).to_json() == g.to_json()
    assert operad_to_json(operad_from_json(operad_to_json(p))) == operad_to_json(p)
    # every non-loop edge is one unary basis operation
    assert sum(1 for lab, s in p.basis_ops() if s.arity == 1 and not s.is_endo) == \
        sum(1 for e in g.edges if not e.is_loop)
