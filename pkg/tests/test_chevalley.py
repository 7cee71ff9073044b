import json
from pathlib import Path

import numpy as np
import pytest

import oracles
from extremal_lie.algebra import Algebra, center, ideal_closure, quotient, simplicity_probe
from extremal_lie.chevalley import (SpanningSet, StructureError, build_chevalley_algebra,
                                    build_structure_constants, canonical_spanning_set, circle_closure,
                                    integral_algebra, normalize_spanning_set, recognize_chevalley,
                                    spanning_set_constants, spanning_set_table, verify_h_identities,
                                    verify_structure_table)
from extremal_lie.fields import Field
from extremal_lie.roots import RootSystem

GOLDEN = Path(__file__).parent / "golden"


def _oracle_table(family, n):
    rs = RootSystem(f"{family}{n}")
    A, _ = oracles.matrix_structure_constants(family, n, rs.roots, rs.defining_pairs())
    return rs, A


@pytest.mark.parametrize("family, n", [("A", 2), ("A", 3), ("A", 4), ("D", 4), ("D", 5)])
def test_constants_match_matrix_realization(family, n):
    rs, A = _oracle_table(family, n)
    assert build_structure_constants(rs).A == A


@pytest.mark.parametrize("name, family, n", [("A2", "A", 2), ("A3", "A", 3), ("D4", "D", 4)])
def test_golden_tables_match_matrix_realization_and_builder(name, family, n):
    data = json.loads((GOLDEN / f"structure_{name}.json").read_text())
    rs, A = _oracle_table(family, n)
    roots = [tuple(r) for r in data["roots"]]
    assert roots == rs.roots
    frozen = {(roots[i], roots[j]): v for i, j, v in data["constants"]}
    assert frozen == A
    assert build_structure_constants(rs).to_json() == data


@pytest.mark.parametrize("t", ["A2", "A3", "D4", "E6"])
def test_table_is_independent_of_build_order(t):
    rs = RootSystem(t)
    assert build_structure_constants(rs) == build_structure_constants(rs, verify=False)
    for v in build_structure_constants(rs).A.values():
        assert v in (1, -1)


def test_circle_closure_example():
    rs = RootSystem("A2")
    T = build_structure_constants(rs)
    a, b = rs.simple
    assert circle_closure(T, a, b) == [1, 1, 1, -1, -1, -1]
    with pytest.raises(ValueError):
        circle_closure(T, a, rs.add(a, b))


def test_sign_flip_is_rejected():
    rs = RootSystem("A3")
    T = build_structure_constants(rs)
    a, b = (1, 0, 0), (0, 1, 1)
    bad = T.with_flipped(a, b)
    with pytest.raises(StructureError):
        verify_structure_table(bad, jacobi=False)
    with pytest.raises(StructureError, match="circle identity"):
        circle_closure(bad, a, b)


def test_defining_pair_violation_is_rejected():
    rs = RootSystem("A2")
    T = build_structure_constants(rs)
    A = {k: -v for k, v in T.A.items()}
    bad = type(T)(rs, T.pairs, A)
    with pytest.raises(StructureError, match="defining pair"):
        verify_structure_table(bad)


@pytest.mark.parametrize("t, dim", [("A2", 8), ("A3", 15), ("D4", 28), ("E6", 78)])
def test_algebra_dimension_and_jacobi_over_Z(t, dim):
    L = integral_algebra(build_structure_constants(RootSystem(t)))
    assert L.dim == dim
    assert L.jacobi_witness() is None


@pytest.mark.parametrize("p", [2, 3, 5])
def test_cartan_acts_by_inner_products(p):
    rs = RootSystem("D4")
    L = build_chevalley_algebra(build_structure_constants(rs), p)
    f = L.field
    N = len(rs.roots)
    for t in range(rs.n):
        h = L.basis_vector(N + t)
        for i, b in enumerate(rs.roots):
            x = L.basis_vector(i)
            assert f.equal(L.bracket(h, x), f.scale(x, rs.inner(rs.simple[t], b)))


@pytest.mark.parametrize("t, p", [("A3", 2), ("D4", 3), ("E6", 5)])
def test_h_identities(t, p):
    rs = RootSystem(t)
    L = build_chevalley_algebra(build_structure_constants(rs), p)
    verify_h_identities(canonical_spanning_set(L, rs))


@pytest.mark.parametrize("t, p, dim", [("A2", 2, 0), ("A2", 3, 1), ("A3", 2, 1), ("A3", 3, 0),
                                       ("D4", 2, 2), ("D4", 3, 0), ("E6", 3, 1), ("E7", 2, 1)])
def test_center_dimensions(t, p, dim):
    L = build_chevalley_algebra(build_structure_constants(RootSystem(t)), p, verify=False)
    assert center(L).dim == dim


def test_center_of_sl3_mod_3_is_spanned_by_h1_plus_2h2():
    L = build_chevalley_algebra(build_structure_constants(RootSystem("A2")), 3)
    Z = center(L)
    assert Z.dim == 1 and Z.basis.tolist() == [[0, 0, 0, 0, 0, 0, 1, 2]]


@pytest.mark.parametrize("t, p, dim", [("A2", 3, 7), ("A3", 2, 14), ("D4", 2, 26)])
def test_quotient_by_center(t, p, dim):
    L = build_chevalley_algebra(build_structure_constants(RootSystem(t)), p)
    Q = quotient(L, center(L))
    assert Q.algebra.dim == dim
    assert Q.algebra.jacobi_witness() is None
    assert center(Q.algebra).dim == 0
    assert simplicity_probe(Q.algebra).certified


def test_ideal_closure_and_simplicity_probe():
    rs = RootSystem("A2")
    L = build_chevalley_algebra(build_structure_constants(rs), 3)
    assert ideal_closure(L, [L.basis_vector(0)]).dim == 8
    rep = simplicity_probe(L)
    assert not rep.certified and rep.reason == "nonzero center"
    assert simplicity_probe(build_chevalley_algebra(build_structure_constants(rs), 5)).certified
    ab = oracles.abelian(Field.prime(3), 2)
    assert simplicity_probe(ab).reason == "abelian"
    heis = oracles.heisenberg(Field.prime(3))
    assert ideal_closure(heis, [heis.basis_vector(0)]).dim == 2
    assert not simplicity_probe(heis).certified
    with pytest.raises(ValueError):
        simplicity_probe(L, trials=0)


def _rescaled(L, rs, root, c):
    S = canonical_spanning_set(L, rs)
    f = L.field
    x = dict(S.x)
    x[root] = f.scale(x[root], c)
    x[rs.neg(root)] = f.scale(x[rs.neg(root)], f.inv(c))
    return SpanningSet(L, rs, x, {a: L.bracket(x[a], x[rs.neg(a)]) for a in rs.roots})


def test_normalize_spanning_set_undoes_rescaling():
    rs = RootSystem("A2")
    L = build_chevalley_algebra(build_structure_constants(rs), 5)
    S = _rescaled(L, rs, (1, 1), 2)
    assert spanning_set_constants(S)[((1, 0), (0, 1))] == 3
    N = normalize_spanning_set(S)
    assert spanning_set_constants(N)[((1, 0), (0, 1))] == 1
    assert spanning_set_table(N) == build_structure_constants(rs)


def test_spanning_set_failing_bracket_condition_is_rejected():
    rs = RootSystem("A2")
    L = build_chevalley_algebra(build_structure_constants(rs), 5)
    S = canonical_spanning_set(L, rs)
    x = dict(S.x)
    x[(1, 1)] = L.basis_vector(rs.index[(1, 0)])
    bad = SpanningSet(L, rs, x, {a: L.bracket(x[a], x[rs.neg(a)]) for a in rs.roots})
    with pytest.raises(StructureError):
        spanning_set_constants(bad)


def test_recognition_of_chevalley_basis_is_identity():
    rs = RootSystem("A3")
    L = build_chevalley_algebra(build_structure_constants(rs), 3)
    rec = recognize_chevalley(rs, L, canonical_spanning_set(L, rs))
    assert rec.surjective and rec.kernel.dim == 0
    assert np.array_equal(rec.matrix, np.eye(L.dim, dtype=rec.matrix.dtype))


def test_recognition_onto_quotient_has_kernel_the_center():
    rs = RootSystem("D4")
    G = build_chevalley_algebra(build_structure_constants(rs), 2)
    Q = quotient(G, center(G))
    S = canonical_spanning_set(G, rs)
    P = Q.projection
    f = G.field
    x = {a: f.reduce(f.matmul(P, v)) for a, v in S.x.items()}
    h = {a: f.reduce(f.matmul(P, v)) for a, v in S.h.items()}
    rec = recognize_chevalley(rs, Q.algebra, SpanningSet(Q.algebra, rs, x, h))
    assert rec.surjective and rec.kernel.dim == 2 == center(G).dim


@pytest.mark.parametrize("field", ["5", "Q"])
def test_algebra_json_round_trip(field):
    L = build_chevalley_algebra(build_structure_constants(RootSystem("A2")), field)
    back = Algebra.from_json(json.loads(json.dumps(L.to_json())))
    assert back.labels == L.labels and back.field == L.field
    assert L.field.equal(back.dense, L.dense)
