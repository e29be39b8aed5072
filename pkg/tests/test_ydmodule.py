"""YD modules: induced construction, braiding, sums, duals, fingerprints."""

import pytest

from nichols.cyclotomic import CycloField
from nichols.errors import ModuleSpecError
from nichols.groups import build_dihedral, conjugacy_class, symmetric_group
from nichols.linalg import Matrix
from nichols.ydmodule import (
    Representation,
    YDModule,
    build_M_O_rho,
    diagonal_modules,
    direct_sum,
    fingerprint,
    module_from_spec,
    one_dim_rep,
    zero_module,
)

Q = CycloField(1)


def s3_sgn_module(field=Q, name="x"):
    # even coset reps make every braiding scalar equal to -1
    g = symmetric_group(3)
    s = (2, 1, 3)
    cls = conjugacy_class(
        g, s, numeration={"members": [[2, 1, 3], [1, 3, 2], [3, 2, 1]],
                          "reps": [[1, 2, 3], [2, 3, 1], [3, 1, 2]]})
    rho = one_dim_rep(g, cls.centralizer, {s: field.rational(-1)})
    return g, cls, build_M_O_rho(g, cls, rho, name=name)


def s4_class_module(values, kind="transpositions", field=Q, name="x"):
    g = symmetric_group(4)
    s = (2, 1, 3, 4) if kind == "transpositions" else (2, 3, 4, 1)
    cls = conjugacy_class(g, s)
    vals = {g.parse_element(k): field.rational(v) for k, v in values.items()}
    rho = one_dim_rep(g, cls.centralizer, vals)
    return g, cls, build_M_O_rho(g, cls, rho, name=name)


def chi_minus_module(field=Q):
    # centralizer of (1234) is generated by it; character -1 on the 4-cycle
    return s4_class_module({"2,3,4,1": -1}, kind="four_cycles", field=field, name="u")


def test_s3_sgn_shape_and_braiding():
    g, cls, m = s3_sgn_module()
    assert m.dim == 3
    # default numeration here is (12), (13)... sorted: (12),(23),(13) order
    assert m.coaction == [(2, 1, 3), (1, 3, 2), (3, 2, 1)]
    assert m.basis_labels == ["x1", "x2", "x3"]
    br = m.braiding()
    for a in range(3):
        for b in range(3):
            k = cls.rack_index(m.coaction[a], b)
            assert br.columns[a, b] == [((k, a), Q.rational(-1))]
    br.check()


def test_trivial_class_module():
    g = symmetric_group(3)
    cls = conjugacy_class(g, g.identity)
    rho = one_dim_rep(g, cls.centralizer,
                      {e: Q.one() for e in g.generators})
    m = build_M_O_rho(g, cls, rho)
    assert m.dim == 1
    assert m.braiding().columns[0, 0] == [((0, 0), Q.one())]


def test_braiding_checks_pass():
    _, _, m = s3_sgn_module()
    w = direct_sum([m, s3_sgn_module(name="y")[2]])
    w.check_axioms()
    w.braiding().check()
    _, _, u = chi_minus_module()
    u.braiding().check()


def test_braiding_at_larger_conductor_matches():
    _, _, m1 = chi_minus_module(field=Q)
    _, _, m12 = chi_minus_module(field=CycloField(12))
    m12.braiding().check()
    cols1 = {k: [(t, str(s)) for t, s in v] for k, v in m1.braiding().columns.items()}
    cols12 = {k: [(t, str(s)) for t, s in v] for k, v in m12.braiding().columns.items()}
    assert cols1 == cols12


def test_dense_braiding_matrix_inverse():
    _, _, m = s3_sgn_module()
    br = m.braiding()
    prod = br.matrix * br.inverse_matrix
    assert prod.entries == Matrix.identity(Q, 9).entries


def test_direct_sum_blocks_and_grading():
    _, cls, mx = s3_sgn_module(name="x")
    _, _, my = s3_sgn_module(name="y")
    w = direct_sum([mx, my])
    assert w.dim == 6
    assert w.theta == 2
    assert w.basis_labels == ["x1", "x2", "x3", "y1", "y2", "y3"]
    assert [w.multidegree(i) for i in (0, 3)] == [(1, 0), (0, 1)]
    br = w.braiding()
    minus = Q.rational(-1)
    # all four block formulas: c(e_a (x) e_b) = -e_b' (x) e_a with b' in the
    # block of b at the conjugated class position
    for a in range(6):
        for b in range(6):
            blk, i, _ = w.triples[b]
            k = cls.rack_index(w.coaction[a], i)
            assert br.columns[a, b] == [((3 * blk + k, a), minus)]


def test_zero_summand_is_dropped():
    g, _, m = s3_sgn_module()
    w = direct_sum([m, zero_module(g, Q)])
    assert w.dim == m.dim
    assert w.theta == 1
    assert w.basis_labels == m.basis_labels
    assert w.coaction == m.coaction
    for gen in g.generators:
        assert w.action_of(gen).entries == m.action_of(gen).entries


def test_diagonal_realization():
    group, field, blocks = diagonal_modules([["z3^1", "1"], ["z3^2", "z3^1"]])
    assert group.order == 9
    w = direct_sum(blocks)
    assert w.basis_labels == ["v1", "v2"]
    q = [[field.parse("z3^1"), field.one()],
         [field.parse("z3^2"), field.parse("z3^1")]]
    br = w.braiding()
    for i in range(2):
        for j in range(2):
            assert br.columns[i, j] == [((j, i), q[i][j])]
    br.check()
    w.check_axioms()


def test_diagonal_rational_entries():
    group, field, blocks = diagonal_modules([["-1", "-1"], ["-1", "-1"]])
    assert field.conductor == 1
    assert group.order == 4
    w = direct_sum(blocks)
    assert w.braiding().columns[0, 1] == [((1, 0), field.rational(-1))]


def test_diagonal_rejects_non_root():
    with pytest.raises(ModuleSpecError):
        diagonal_modules([["2"]])


def test_dual_one_dimensional():
    group, field, blocks = diagonal_modules([["z3^1"]])
    m = blocks[0]
    d = m.dual()
    g1 = (1,)
    assert d.coaction == [(2,)]
    assert d.action_of(g1).entries[0][0] == field.parse("z3^2")
    dd = d.dual()
    assert dd.coaction == m.coaction
    assert dd.action_of(g1).entries == m.action_of(g1).entries
    assert fingerprint(dd) == fingerprint(m)
    assert d.basis_labels == ["v1*"]


def test_dual_axioms_and_braiding():
    _, _, u = chi_minus_module()
    d = u.dual()
    d.check_axioms()
    d.braiding().check()
    w = direct_sum([s3_sgn_module(name="x")[2], s3_sgn_module(name="y")[2]])
    wd = w.dual()
    wd.check_axioms()
    assert [wd.multidegree(i) for i in (0, 3)] == [(1, 0), (0, 1)]


def test_duality_pairing_adjunction():
    # <c_{M*}(f_a (x) f_b), v_c (x) v_d> = <f_a (x) f_b, c_M(v_c (x) v_d)>
    # with <f (x) g, v (x) w> = <f, w><g, v>
    for m in (chi_minus_module()[2],
              direct_sum([s3_sgn_module(name="x")[2], s3_sgn_module(name="y")[2]])):
        cm = m.braiding()
        cd = m.dual().braiding()
        n = m.dim
        for a in range(n):
            for b in range(n):
                lhs = dict(cd.columns[a, b])
                for c in range(n):
                    for d in range(n):
                        rhs = dict(cm.columns[c, d])
                        assert lhs.get((d, c), Q.zero()) == rhs.get((b, a), Q.zero())


def test_fingerprint_numeration_independent():
    g, _, m1 = s3_sgn_module()
    members = [[3, 2, 1], [2, 1, 3], [1, 3, 2]]
    reps = [[1, 2, 3], [1, 3, 2], [2, 1, 3]]
    cls = conjugacy_class(g, (3, 2, 1),
                          numeration={"members": members, "reps": reps})
    rho = one_dim_rep(g, cls.centralizer, {(3, 2, 1): Q.rational(-1)})
    m2 = build_M_O_rho(g, cls, rho)
    assert fingerprint(m1) == fingerprint(m2)


def test_fingerprint_separates_characters():
    _, _, sgn = s4_class_module({"2,1,3,4": -1, "1,2,4,3": -1})
    _, _, sgn_eps = s4_class_module({"2,1,3,4": -1, "1,2,4,3": 1})
    assert fingerprint(sgn) != fingerprint(sgn_eps)
    assert fingerprint(sgn) == fingerprint(s4_class_module(
        {"2,1,3,4": -1, "1,2,4,3": -1}, name="z")[2])


def test_fingerprint_chi_minus_self_dual():
    _, _, u = chi_minus_module()
    d = u.dual()
    assert d.coaction != u.coaction
    assert fingerprint(d) == fingerprint(u)


def test_fingerprint_conductor_independent():
    _, _, m1 = s3_sgn_module(field=Q)
    _, _, m2 = s3_sgn_module(field=CycloField(12))
    assert fingerprint(m1) == fingerprint(m2)


def test_fingerprint_rejects_reducible():
    g = symmetric_group(3)
    cls = conjugacy_class(g, g.identity)
    i2 = Matrix.identity(Q, 2)
    rho = Representation(g, cls.centralizer, {e: i2 for e in g.generators})
    m = build_M_O_rho(g, cls, rho)
    with pytest.raises(ModuleSpecError):
        fingerprint(m)


def test_two_dim_centralizer_representation():
    # standard two-dimensional representation of S3 on the trivial class
    g = symmetric_group(3)
    cls = conjugacy_class(g, g.identity)
    b = Matrix.from_lists(Q, [["-1", "1"], ["0", "1"]])
    a = Matrix.from_lists(Q, [["0", "-1"], ["1", "-1"]])
    rho = Representation(g, cls.centralizer, {(2, 1, 3): b, (2, 3, 1): a})
    assert rho.carrier_dim == 2
    assert str(rho.character[g.identity]) == "2"
    assert str(rho.character[(2, 1, 3)]) == "0"
    m = build_M_O_rho(g, cls, rho)
    assert m.dim == 2
    assert m.basis_labels == ["x1_0", "x1_1"]
    m.braiding().check()
    assert fingerprint(m) is not None


def test_representation_relation_violation():
    g = symmetric_group(3)
    cls = conjugacy_class(g, g.identity)
    with pytest.raises(ModuleSpecError):
        Representation(g, cls.centralizer,
                       {(2, 1, 3): Matrix.from_lists(Q, [["-1"]]),
                        (2, 3, 1): Matrix.from_lists(Q, [["-1"]])})


def test_representation_needs_generating_set():
    g = symmetric_group(3)
    cls = conjugacy_class(g, (2, 1, 3))
    with pytest.raises(ModuleSpecError):
        one_dim_rep(g, cls.centralizer, {g.identity: Q.one()})


def test_build_requires_matching_centralizer():
    g = symmetric_group(3)
    cls = conjugacy_class(g, (2, 1, 3))
    other = conjugacy_class(g, g.identity)
    rho = one_dim_rep(g, other.centralizer, {e: Q.one() for e in g.generators})
    with pytest.raises(ModuleSpecError):
        build_M_O_rho(g, cls, rho)


def test_broken_action_is_rejected():
    g, cls, m = s3_sgn_module()
    with pytest.raises(ModuleSpecError):
        YDModule(g, Q, list(reversed(m.coaction)), m.action_of,
                 m.basis_labels, m.triples, m.blocks)


def test_module_from_spec_json():
    g = symmetric_group(3)
    spec = {"class_rep": [2, 1, 3],
            "rho": {"dim": 1, "values": {"2,1,3": "-1"}}}
    m = module_from_spec(g, spec, Q)
    assert m.dim == 3
    assert fingerprint(m) == fingerprint(s3_sgn_module()[2])
    with pytest.raises(ModuleSpecError):
        module_from_spec(g, {"rho": {}}, Q)


def test_chi_minus_action_values():
    g, cls, u = chi_minus_module()
    tau1 = (2, 3, 4, 1)
    minus = Q.rational(-1)
    # central element tau_1 fixes index 0 and scales by -1
    assert u.action_column(tau1, 0) == [(0, minus)]
    # reflections move every index with scalar -1 (chi_- is odd on tau_1^{+-1})
    sigma1 = (2, 1, 3, 4)
    col = u.action_column(sigma1, 0)
    assert len(col) == 1 and col[0][1] == minus
    assert col[0][0] == cls.rack_index(sigma1, 0)


def test_dihedral_sgn_module():
    g = build_dihedral(9)
    x = (1, 0)
    inv2 = pow(2, -1, 9)
    cls = conjugacy_class(
        g, x, numeration={"members": [[1, i] for i in range(9)],
                          "reps": [[0, (-i * inv2) % 9] for i in range(9)]})
    rho = one_dim_rep(g, cls.centralizer, {x: Q.rational(-1)})
    m = build_M_O_rho(g, cls, rho, name="v", index_base=0)
    assert m.dim == 9
    assert m.basis_labels[0] == "v0"
    # t . v_i = sgn(t) v_{t |> i} for reflections t
    for j in range(9):
        col = m.action_column((1, j), 2)
        assert col == [((2 * j - 2) % 9, Q.rational(-1))]
    m.braiding().check()
