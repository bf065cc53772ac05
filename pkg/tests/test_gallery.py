import itertools
from dataclasses import replace
from fractions import Fraction

import pytest

from relcore.atoms import DLO, Atom, labeled_dlo, make_sample
from relcore.definable import Point, sample
from relcore.errors import KernelViolation, TooSmall
from relcore.finstruct import (
    FinStructure,
    Hom,
    compute_core,
    find_hom,
    hom_violations,
    is_core,
)
from relcore import gallery


def x_pid(xs, a, b, m):
    """Id of the oriented pair (a, b) with tag m in a tagged-pair sample."""
    orient = 0 if a < b else 1
    u, v = sorted((a, b))
    return xs.points.index(Point(orient * gallery.TAGS + m, (Atom(Fraction(u)), Atom(Fraction(v)))))


def y_pid(ys, a, b, m):
    return ys.points.index(Point(m, (Atom(Fraction(a)), Atom(Fraction(b)))))


def test_tagged_pair_sample_relations():
    atoms = make_sample(DLO, 4)
    xs = sample(gallery.tagged_pair_structure(), atoms)
    assert xs.structure.size == 4 * 3 * 4
    r = xs.structure.rel("R")
    e = xs.structure.rel("E")
    n = xs.structure.rel("N")
    assert (x_pid(xs, 0, 1, 0), x_pid(xs, 0, 1, 1)) in r
    assert (x_pid(xs, 0, 1, 3), x_pid(xs, 0, 1, 0)) in r
    assert (x_pid(xs, 0, 1, 0), x_pid(xs, 0, 1, 2)) not in r
    assert (x_pid(xs, 0, 1, 0), x_pid(xs, 2, 3, 0)) in n
    assert (x_pid(xs, 0, 1, 0), x_pid(xs, 0, 2, 0)) not in n
    # tag-selected coordinates must match: (0,1) tag 0 selects 0, (0,2) tag 0 selects 0
    assert (x_pid(xs, 0, 1, 0), x_pid(xs, 0, 2, 0)) in e
    # (0,1) tag 1 selects 1, (0,2) tag 0 selects 0: no shared selection
    assert (x_pid(xs, 0, 1, 1), x_pid(xs, 0, 2, 0)) not in e
    # reversed pair (1,0) with tag 1 selects 0 again
    assert (x_pid(xs, 1, 0, 1), x_pid(xs, 0, 2, 0)) in e


def test_cover_sample_edge_parity():
    cs = gallery.pair_cover().sample(make_sample(DLO, 3))
    ys = cs.total
    e = ys.structure.rel("E")
    over_01 = [y_pid(ys, 0, 1, m) for m in range(4)]
    over_02 = [y_pid(ys, 0, 2, m) for m in range(4)]
    linked = {
        (m, n)
        for m in range(4)
        for n in range(4)
        if (over_01[m], over_02[n]) in e
    }
    # shared atom 0 is selected exactly at even tags on both sides
    assert linked == {(m, n) for m in (0, 2) for n in (0, 2)}
    for m in range(4):
        assert cs.projection[over_01[m]] == cs.projection[over_01[0]]


def test_fold_orientation_pointwise():
    a = Atom(Fraction(0))
    b = Atom(Fraction(1))
    asc = Point(0 * gallery.TAGS + 2, (a, b))
    assert gallery.fold_orientation(asc) == Point(2, (a, b))
    desc = Point(1 * gallery.TAGS + 0, (a, b))
    assert gallery.fold_orientation(desc) == Point(1, (a, b))


def test_fold_hom_validates_and_matches_seeded_search():
    atoms = make_sample(DLO, 3)
    h = gallery.fold_orientation_hom(atoms)
    assert not hom_violations(h.source, h.target, h.mapping)
    xs = sample(gallery.tagged_pair_structure(), atoms)
    seed = {
        pid: h.mapping[pid]
        for pid, p in enumerate(xs.points)
        if p.sort < gallery.TAGS and [a.value for a in p.atoms] == [0, 1]
    }
    witness = find_hom(h.source, h.target, "hom", partial=seed)
    assert witness is not None
    assert witness.mapping == h.mapping


def test_kernel_check():
    for k in (2, 4):
        cs = gallery.pair_cover().sample(make_sample(DLO, k))
        assert gallery.kernel_check(cs)
    # deleting one R-step breaks the two-step reachability inside a fiber
    cs = gallery.pair_cover().sample(make_sample(DLO, 2))
    r = sorted(cs.total.structure.rel("R"))
    broken = FinStructure(
        cs.total.structure.signature,
        cs.total.structure.size,
        {
            "R": frozenset(r[1:]),
            "E": cs.total.structure.rel("E"),
            "N": cs.total.structure.rel("N"),
        },
    )
    mutated = replace(cs, total=replace(cs.total, structure=broken))
    assert not gallery.kernel_check(mutated)


def test_induced_base_map_cases():
    cs = gallery.pair_cover().sample(make_sample(DLO, 3))
    n = cs.total.structure.size
    identity = tuple(range(n))
    base_id = tuple(range(cs.base.structure.size))
    assert gallery.induced_base_map(cs, identity) == base_id
    rot = gallery.fiber_rotation(cs, [0, 2], 2)
    assert gallery.induced_base_map(cs, rot) == base_id
    for alpha in itertools.permutations(range(3)):
        lift = gallery.lift_atom_permutation(cs, alpha)
        assert gallery.induced_base_map(cs, lift) == gallery.pair_action(cs, alpha)
    # a map splitting one fiber must be refused
    split = list(identity)
    fiber = cs.fibers()[0]
    other = cs.fibers()[1]
    split[fiber[0]] = other[0]
    with pytest.raises(KernelViolation):
        gallery.induced_base_map(cs, tuple(split))


def test_fiber_rotations_form_elementary_abelian_group():
    cs = gallery.pair_cover().sample(make_sample(DLO, 4))
    n = cs.total.structure.size
    identity = tuple(range(n))
    assert gallery.fiber_rotation(cs, [], 1) == identity
    vertices = range(cs.base.structure.size)
    rotations = [
        gallery.fiber_rotation(cs, s, 2)
        for r in range(len(list(vertices)) + 1)
        for s in itertools.combinations(range(cs.base.structure.size), r)
    ]
    for rot in rotations:
        assert gallery._compose(rot, rot) == identity
        assert gallery.is_sample_automorphism(cs.total.structure, rot)
    for r1, r2 in itertools.combinations(rotations[:16], 2):
        assert gallery._compose(r1, r2) == gallery._compose(r2, r1)


def test_lift_examples():
    cs = gallery.pair_cover().sample(make_sample(DLO, 3))
    n = cs.total.structure.size
    assert gallery.lift_atom_permutation(cs, (0, 1, 2)) == tuple(range(n))
    swap = gallery.lift_atom_permutation(cs, (1, 0, 2))
    assert gallery.is_sample_automorphism(cs.total.structure, swap)


def test_cover_needs_the_order_but_oriented_pairs_do_not():
    # relabelling atoms without touching tags is an automorphism of the
    # oriented-pair sample, but breaks E on the cover sample
    atoms = make_sample(DLO, 3)
    xs = sample(gallery.tagged_pair_structure(), atoms)
    swap = (1, 0, 2)
    action = gallery.oriented_atom_action(xs, atoms, swap)
    assert gallery.is_sample_automorphism(xs.structure, action)

    cs = gallery.pair_cover().sample(atoms)
    pool = atoms.atoms
    naive = []
    for p in cs.total.points:
        u, v = p.atoms
        iu, iv = swap[pool.index(u)], swap[pool.index(v)]
        stored = tuple(sorted((pool[iu], pool[iv]), key=lambda a: a.value))
        naive.append(cs.total.points.index(Point(p.sort, stored)))
    assert not gallery.is_sample_automorphism(cs.total.structure, tuple(naive))


def test_spider_shape():
    for n in (2, 3, 5):
        s = gallery.spider(n)
        assert s.size == 3 * n
        collapse = gallery.spider_collapse_hom(n)
        assert set(collapse.mapping) == {0} | {x for x in range(3 * n) if x % 3 != 0}
    with pytest.raises(TooSmall):
        gallery.spider(1)


def test_spider_core_size():
    res = compute_core(gallery.spider(3))
    assert res.core.size == 7
    assert is_core(res.core)


def test_partitioned_dlo_sample():
    qst = gallery.partitioned_dlo()
    s = sample(qst, make_sample(labeled_dlo(2), 4, [0, 1, 0, 1]))
    assert len(s.structure.rel("S")) == 2
    assert len(s.structure.rel("T")) == 2
    assert len(s.structure.rel("lt")) == 6


def test_partition_companion_sample():
    comp = gallery.partitioned_dlo_companion()
    s = sample(comp, make_sample(DLO, 3))
    assert s.structure.size == 6
    lt = s.structure.rel("lt")
    for i in range(6):
        for j in range(6):
            if i != j:
                assert ((i, j) in lt) != ((j, i) in lt)
    assert len(s.structure.rel("S")) == 3 and len(s.structure.rel("T")) == 3


def test_partition_companion_embedding_map():
    qst = sample(gallery.partitioned_dlo(), make_sample(labeled_dlo(2), 4, [0, 1, 1, 0]))
    comp = sample(gallery.partitioned_dlo_companion(), make_sample(DLO, 4))
    mapping = []
    for p in qst.points:
        atom = p.atoms[0]
        mapping.append(comp.points.index(Point(atom.label, (Atom(atom.value),))))
    h = Hom(qst.structure, comp.structure, tuple(mapping))
    assert h.is_embedding()


def test_local_order_two_points():
    s2 = gallery.dense_local_order()
    s = sample(s2, make_sample(labeled_dlo(2), 2, [0, 1]))
    prec = s.structure.rel("prec")
    # split classes reverse the value order
    assert (1, 0) in prec and (0, 1) not in prec


def test_local_order_samples_are_tournaments():
    s2 = gallery.dense_local_order()
    for labels in itertools.product((0, 1), repeat=3):
        s = sample(s2, make_sample(labeled_dlo(2), 3, list(labels)))
        prec = s.structure.rel("prec")
        for i in range(3):
            assert (i, i) not in prec
            for j in range(i + 1, 3):
                assert ((i, j) in prec) != ((j, i) in prec)


def test_betweenness_matches_chain_definition():
    betw = gallery.betweenness_reduct()
    s2 = gallery.dense_local_order()
    atoms = make_sample(labeled_dlo(2), 4)
    b = sample(betw, atoms).structure.rel("betw")
    prec = sample(s2, atoms).structure.rel("prec")
    for t in itertools.product(range(4), repeat=3):
        expected = ((t[0], t[1]) in prec and (t[1], t[2]) in prec) or (
            (t[2], t[1]) in prec and (t[1], t[0]) in prec
        )
        assert (t in b) == expected


def test_cut_roundtrip():
    s2 = gallery.dense_local_order()
    s = sample(s2, make_sample(labeled_dlo(2), 5)).structure
    for c in range(s.size):
        assert gallery.s2_cut_roundtrip(s, c)
    cyclic = sample(s2, make_sample(labeled_dlo(2), 3, [0, 1, 0])).structure
    # labels S,T,S produce a 3-cycle
    prec = cyclic.rel("prec")
    assert (0, 2) in prec and (2, 1) in prec and (1, 0) in prec
    for c in range(3):
        assert gallery.s2_cut_roundtrip(cyclic, c)


def test_cut_roundtrip_rejects_corruption():
    s2 = gallery.dense_local_order()
    s = sample(s2, make_sample(labeled_dlo(2), 5)).structure
    prec = set(s.rel("prec"))
    edge = sorted(prec)[0]
    mutated = FinStructure(
        s.signature, s.size, {"prec": frozenset((prec - {edge}) | {edge[::-1]})}
    )
    assert any(not gallery.s2_cut_roundtrip(mutated, c) for c in range(s.size))


def test_perm_companion_orders_are_total():
    comp = gallery.generic_permutation_companion()
    s = sample(comp, make_sample(DLO, 4))
    for name in ("prec1", "prec2"):
        rel = s.structure.rel(name)
        for i in range(s.structure.size):
            assert (i, i) not in rel
            for j in range(i + 1, s.structure.size):
                assert ((i, j) in rel) != ((j, i) in rel)
        for i, j, k in itertools.product(range(s.structure.size), repeat=3):
            if (i, j) in rel and (j, k) in rel:
                assert (i, k) in rel


def test_perm_companion_age_on_three_points():
    comp = sample(gallery.generic_permutation_companion(), make_sample(DLO, 6))
    from relcore.finstruct import Signature

    sig = Signature((("prec1", 2), ("prec2", 2)))
    for pi in itertools.permutations(range(3)):
        r1 = frozenset((i, j) for i in range(3) for j in range(3) if i < j)
        r2 = frozenset((i, j) for i in range(3) for j in range(3) if pi[i] < pi[j])
        pattern = FinStructure(sig, 3, {"prec1": r1, "prec2": r2})
        assert find_hom(pattern, comp.structure, "embedding") is not None


def test_perm_companion_interprets_partitioned_order():
    # realize the derived order-with-classes on the first-order-ascending
    # element pairs: compare lexicographically in the first order, classify
    # a pair by the second order between its members
    comp = sample(gallery.generic_permutation_companion(), make_sample(DLO, 4))
    st = comp.structure
    prec1 = st.rel("prec1")
    prec2 = st.rel("prec2")
    domain = [(i, j) for (i, j) in prec1]
    cls_s = {(i, j) for (i, j) in domain if (i, j) in prec2}
    cls_t = {(i, j) for (i, j) in domain if (j, i) in prec2}
    assert cls_s | cls_t == set(domain) and not cls_s & cls_t
    assert cls_s and cls_t
    derived = set()
    for a in domain:
        for b in domain:
            if a == b:
                continue
            if (a[0], b[0]) in prec1 or (a[0] == b[0] and (a[1], b[1]) in prec1):
                derived.add((a, b))
    for a in domain:
        for b in domain:
            if a != b:
                assert ((a, b) in derived) != ((b, a) in derived)
    count = 0
    for a in domain:
        for b in domain:
            if (a, b) not in derived:
                continue
            for c in domain:
                if (b, c) in derived:
                    assert (a, c) in derived
                    count += 1
    assert count > 0


def test_johnson_samples_core_measurements():
    # measured: the pair-graph samples are already cores at every size from
    # one vertex up
    for k in (2, 3, 4):
        cs = gallery.pair_cover().sample(make_sample(DLO, k))
        assert is_core(cs.base.structure)


def test_manifest_lists_gallery():
    entries = gallery.manifest()
    names = {e["name"] for e in entries}
    assert {"X", "Y", "QST", "S2", "Jord2"} <= names
    assert all(e["description"] for e in entries)


def test_lookup():
    assert gallery.lookup_definable("Jord2") is not None
    assert gallery.lookup_definable("qst") is not None
    assert gallery.lookup_definable("nothing") is None
    assert gallery.lookup_finite("spider3").size == 9
    assert gallery.lookup_finite("spider:4").size == 12
