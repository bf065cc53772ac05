"""Concrete library of named structures and their special maps.

Contents: the tagged ordered-pair structure and its folding onto the tagged
increasing-pair cover of the Johnson pair graph, fiber rotations and lifted
atom permutations with the induced maps downstairs, the spider structure
whose core drops a whole part, the partitioned dense order and its
two-copy companion, the dense local order and its betweenness reduct, and
the two-order companion of the generic permutation.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional, Sequence

from .atoms import DLO, Atom, AtomSample, labeled_dlo, make_sample
from .definable import (
    DefStructure,
    Point,
    RelationClause,
    SampleResult,
    Sort,
    increasing_tuple_structure,
    reduct,
    sample,
)
from .errors import (
    HomValidationError,
    InvalidElement,
    KernelViolation,
    TooLarge,
    TooSmall,
)
from .finstruct import FinStructure, Hom, Signature, hom_violations
from . import formulas as fm

TAGS = 4

# On two stored increasing pairs occupying positions (0,1) and (2,3):
_SOME_COMMON = fm.Or(fm.Eq(0, 2), fm.Eq(0, 3), fm.Eq(1, 2), fm.Eq(1, 3))
_BOTH_COMMON = fm.And(fm.Eq(0, 2), fm.Eq(1, 3))
_EXACTLY_ONE_COMMON = fm.And(_SOME_COMMON, fm.Not(_BOTH_COMMON))
_NO_COMMON = fm.And(
    fm.Not(fm.Eq(0, 2)), fm.Not(fm.Eq(0, 3)), fm.Not(fm.Eq(1, 2)), fm.Not(fm.Eq(1, 3))
)


def _sel(orient: int, tag: int) -> int:
    """Stored position of the tag-selected coordinate of an oriented pair."""
    return (tag % 2) ^ orient


def tagged_pair_structure() -> DefStructure:
    """All injective ordered pairs of atoms carrying a tag mod 4.

    A pair with first coordinate below the second sits in an "a" sort, the
    reverse orientation in a "d" sort, always stored as the increasing pair.
    R steps the tag, E links pairs sharing exactly the selected coordinate,
    N links pairs with disjoint supports.  Every defining formula is
    order-free.
    """
    sorts = tuple(
        Sort(f"{o}{m}", 2) for o in ("a", "d") for m in range(TAGS)
    )
    clauses = []
    for o in ("a", "d"):
        for m in range(TAGS):
            clauses.append(
                RelationClause(
                    "R", 2, (f"{o}{m}", f"{o}{(m + 1) % TAGS}"), fm.And(fm.Eq(0, 2), fm.Eq(1, 3))
                )
            )
    for oi, o in enumerate(("a", "d")):
        for m in range(TAGS):
            for pj, p in enumerate(("a", "d")):
                for n in range(TAGS):
                    guard = (f"{o}{m}", f"{p}{n}")
                    body = fm.And(fm.Eq(_sel(oi, m), 2 + _sel(pj, n)), _EXACTLY_ONE_COMMON)
                    clauses.append(RelationClause("E", 2, guard, body))
    clauses.append(RelationClause("N", 2, ("*", "*"), _NO_COMMON))
    return DefStructure(DLO, sorts, tuple(clauses))


def johnson_graph_def() -> DefStructure:
    """The Johnson pair graph: increasing pairs, adjacent iff they share an atom."""
    sorts = (Sort("v", 2),)
    clauses = (
        RelationClause("E", 2, ("*", "*"), _EXACTLY_ONE_COMMON),
        RelationClause("N", 2, ("*", "*"), _NO_COMMON),
    )
    return DefStructure(DLO, sorts, clauses)


@dataclass(frozen=True)
class CoverSample:
    """Matched samples of the tagged cover and the pair graph underneath."""

    atoms: AtomSample
    total: SampleResult
    base: SampleResult
    projection: tuple[int, ...]

    def fibers(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {b: [] for b in range(self.base.structure.size)}
        for x, b in enumerate(self.projection):
            out[b].append(x)
        return {b: tuple(xs) for b, xs in out.items()}


@dataclass(frozen=True)
class CoverData:
    """The tagged increasing-pair structure over the pair graph, with the
    tag-forgetting projection."""

    total: DefStructure
    basestruct: DefStructure

    def project_point(self, point: Point) -> Point:
        return Point(0, point.atoms)

    def sample(self, atoms: AtomSample) -> CoverSample:
        total = sample(self.total, atoms)
        base = sample(self.basestruct, atoms)
        base_index = {p: i for i, p in enumerate(base.points)}
        projection = tuple(base_index[self.project_point(p)] for p in total.points)
        return CoverSample(atoms, total, base, projection)


def pair_cover() -> CoverData:
    """Increasing pairs with a tag mod 4, over the Johnson pair graph."""
    sorts = tuple(Sort(f"m{m}", 2) for m in range(TAGS))
    clauses = []
    for m in range(TAGS):
        clauses.append(
            RelationClause(
                "R", 2, (f"m{m}", f"m{(m + 1) % TAGS}"), fm.And(fm.Eq(0, 2), fm.Eq(1, 3))
            )
        )
    for m in range(TAGS):
        for n in range(TAGS):
            body = fm.And(fm.Eq(m % 2, 2 + (n % 2)), _EXACTLY_ONE_COMMON)
            clauses.append(RelationClause("E", 2, (f"m{m}", f"m{n}"), body))
    clauses.append(RelationClause("N", 2, ("*", "*"), _NO_COMMON))
    total = DefStructure(DLO, sorts, tuple(clauses))
    return CoverData(total, johnson_graph_def())


def fold_orientation(point: Point) -> Point:
    """Send an oriented tagged pair to its increasing-pair form.

    Ascending pairs keep their tag; descending pairs step the tag by one.
    """
    orient, tag = divmod(point.sort, TAGS)
    if orient == 0:
        return Point(tag, point.atoms)
    return Point((tag + 1) % TAGS, point.atoms)


def fold_orientation_hom(atoms: AtomSample) -> Hom:
    """The folding map, validated on matched samples."""
    src = sample(tagged_pair_structure(), atoms)
    dst = sample(pair_cover().total, atoms)
    dst_index = {p: i for i, p in enumerate(dst.points)}
    mapping = tuple(dst_index[fold_orientation(p)] for p in src.points)
    return Hom(src.structure, dst.structure, mapping)


def kernel_check(cs: CoverSample) -> bool:
    """Fiber equality must coincide with reachability along at most two R-steps."""
    struct = cs.total.structure
    rel_r = struct.rel("R")
    n = struct.size
    succ = {x: {y for y in range(n) if (x, y) in rel_r} for x in range(n)}
    for x in range(n):
        for y in range(n):
            same_fiber = cs.projection[x] == cs.projection[y]
            linked = (
                x == y
                or (x, y) in rel_r
                or (y, x) in rel_r
                or any((z, y) in rel_r for z in succ[x])
            )
            if same_fiber != linked:
                return False
    return True


def induced_base_map(cs: CoverSample, endo: Sequence[int]) -> tuple[int, ...]:
    """Map on pair-graph vertices induced by a fiber-respecting map upstairs.

    Raises KernelViolation when the input merges fibers inconsistently, and
    refuses maps whose induced action breaks an E or N tuple.
    """
    result: dict[int, int] = {}
    for x, b in enumerate(cs.projection):
        image = cs.projection[endo[x]]
        if b in result and result[b] != image:
            raise KernelViolation(f"fiber over vertex {b} is split by the map")
        result[b] = image
    mapped = tuple(result[b] for b in range(cs.base.structure.size))
    problems = hom_violations(cs.base.structure, cs.base.structure, mapped)
    if problems:
        raise HomValidationError("induced map is not an (E,N)-endomorphism: " + problems[0])
    return mapped


def fiber_rotation(cs: CoverSample, vertices: Iterable[int], k: int) -> tuple[int, ...]:
    """Rotate the tag on every fiber over the chosen pair-graph vertices."""
    chosen = set(vertices)
    for b in chosen:
        if not 0 <= b < cs.base.structure.size:
            raise InvalidElement(f"vertex {b} outside the pair-graph sample")
    total_index = {p: i for i, p in enumerate(cs.total.points)}
    out = []
    for x, p in enumerate(cs.total.points):
        if cs.projection[x] in chosen:
            out.append(total_index[Point((p.sort + k) % TAGS, p.atoms)])
        else:
            out.append(x)
    return tuple(out)


def lift_atom_permutation(cs: CoverSample, alpha: Sequence[int]) -> tuple[int, ...]:
    """Permutation upstairs induced by a permutation of the sample atoms.

    When the image pair comes out reversed the tag steps by one; the result
    is an automorphism of the tagged sample.
    """
    atoms = cs.atoms.atoms
    if sorted(alpha) != list(range(len(atoms))):
        raise InvalidElement(f"{alpha!r} is not a permutation of {len(atoms)} atoms")
    atom_index = {a.value: i for i, a in enumerate(atoms)}
    total_index = {p: i for i, p in enumerate(cs.total.points)}
    out = []
    for p in cs.total.points:
        u, v = p.atoms
        iu, iv = alpha[atom_index[u.value]], alpha[atom_index[v.value]]
        a1, a2 = atoms[iu], atoms[iv]
        if a1.value < a2.value:
            image = Point(p.sort, (a1, a2))
        else:
            image = Point((p.sort + 1) % TAGS, (a2, a1))
        out.append(total_index[image])
    return tuple(out)


def pair_action(cs: CoverSample, alpha: Sequence[int]) -> tuple[int, ...]:
    """Action of an atom permutation on the pair-graph sample."""
    atoms = cs.atoms.atoms
    atom_index = {a.value: i for i, a in enumerate(atoms)}
    base_index = {p: i for i, p in enumerate(cs.base.points)}
    out = []
    for p in cs.base.points:
        u, v = p.atoms
        pair = sorted((atoms[alpha[atom_index[u.value]]], atoms[alpha[atom_index[v.value]]]))
        out.append(base_index[Point(0, tuple(pair))])
    return tuple(out)


def is_sample_automorphism(structure: FinStructure, perm: Sequence[int]) -> bool:
    """Bijection preserving every relation in both directions."""
    if sorted(perm) != list(range(structure.size)):
        return False
    if hom_violations(structure, structure, perm):
        return False
    inverse = [0] * structure.size
    for x, y in enumerate(perm):
        inverse[y] = x
    return not hom_violations(structure, structure, inverse)


def _compose(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """Apply q first, then p."""
    return tuple(p[x] for x in q)


def generate_group(
    generators: Iterable[Sequence[int]], element_budget: int = 200_000
) -> set[tuple[int, ...]]:
    gens = [tuple(g) for g in generators]
    if not gens:
        return set()
    group = set(gens)
    frontier = list(group)
    while frontier:
        new = []
        for g in gens:
            for h in frontier:
                c = _compose(g, h)
                if c not in group:
                    group.add(c)
                    new.append(c)
                    if len(group) > element_budget:
                        raise TooLarge(f"group generation exceeded {element_budget} elements")
        frontier = new
    return group


def involution_report(atom_count: int, element_budget: int = 200_000) -> dict:
    """Generate the lift-and-rotation group on a tagged cover sample and
    inspect its involutions.

    Reports whether all involutions pairwise commute and whether they are
    exactly the exponent-2 fiber rotations.
    """
    if atom_count > 5:
        raise TooLarge("involution analysis is intended for at most 5 atoms")
    cs = pair_cover().sample(make_sample(DLO, atom_count))
    base_ids = list(range(cs.base.structure.size))
    gens = [lift_atom_permutation(cs, alpha) for alpha in itertools.permutations(range(atom_count))]
    rotations = {}
    for r in range(len(base_ids) + 1):
        for subset in itertools.combinations(base_ids, r):
            rotations[subset] = fiber_rotation(cs, subset, 2)
    gens.extend(rotations.values())
    group = generate_group(gens, element_budget)
    identity = tuple(range(cs.total.structure.size))
    involutions = sorted(
        g for g in group if g != identity and _compose(g, g) == identity
    )
    all_commute = all(
        _compose(g, h) == _compose(h, g)
        for g, h in itertools.combinations(involutions, 2)
    )
    rotation_set = set(rotations.values()) - {identity}
    return {
        "atoms": atom_count,
        "group_order": len(group),
        "involution_count": len(involutions),
        "all_commute": all_commute,
        "involutions_are_fiber_rotations": set(involutions) == rotation_set,
    }


def oriented_atom_action(xs: SampleResult, atoms: AtomSample, alpha: Sequence[int]) -> tuple[int, ...]:
    """Action of an atom permutation on a tagged ordered-pair sample.

    The tag never moves; only the orientation sort flips when the image
    pair comes out reversed.
    """
    pool = atoms.atoms
    atom_index = {a.value: i for i, a in enumerate(pool)}
    index = {p: i for i, p in enumerate(xs.points)}
    out = []
    for p in xs.points:
        orient, tag = divmod(p.sort, TAGS)
        u, v = p.atoms
        first, second = (u, v) if orient == 0 else (v, u)
        img1 = pool[alpha[atom_index[first.value]]]
        img2 = pool[alpha[atom_index[second.value]]]
        new_orient = 0 if img1.value < img2.value else 1
        stored = (img1, img2) if new_orient == 0 else (img2, img1)
        out.append(index[Point(new_orient * TAGS + tag, stored)])
    return tuple(out)


def orientation_control_report(atom_count: int = 3) -> dict:
    """Same involution scan over the oriented-pair structure.

    Here atom transpositions act with the tag untouched, so they are
    involutions, and overlapping transpositions fail to commute.
    """
    atoms = make_sample(DLO, atom_count)
    xs = sample(tagged_pair_structure(), atoms)
    gens = [
        oriented_atom_action(xs, atoms, alpha)
        for alpha in itertools.permutations(range(atom_count))
    ]
    group = generate_group(gens)
    identity = tuple(range(xs.structure.size))
    involutions = sorted(g for g in group if g != identity and _compose(g, g) == identity)
    witness = None
    for g, h in itertools.combinations(involutions, 2):
        if _compose(g, h) != _compose(h, g):
            witness = (g, h)
            break
    return {
        "atoms": atom_count,
        "group_order": len(group),
        "involution_count": len(involutions),
        "noncommuting_involutions_found": witness is not None,
    }


def spider(n: int) -> FinStructure:
    """Three parts of size n; one bijection spine from part 0 to each other
    part, plus a hub in part 0 linked to everything; inequality inside parts
    1 and 2.  Element (k, i) has id 3*k + i."""
    if n < 2:
        raise TooSmall(f"spider needs at least 2 rows, got {n}")
    sig = Signature((("U0", 1), ("U1", 1), ("U2", 1), ("N", 2), ("R", 2)))

    def elem(k: int, i: int) -> int:
        return 3 * k + i

    u0 = frozenset((elem(k, 0),) for k in range(n))
    u1 = frozenset((elem(k, 1),) for k in range(n))
    u2 = frozenset((elem(k, 2),) for k in range(n))
    neq = set()
    for i in (1, 2):
        for k in range(n):
            for l in range(n):
                if k != l:
                    neq.add((elem(k, i), elem(l, i)))
    spine = set()
    for k in range(n):
        spine.add((elem(k, 0), elem(k, 1)))
        spine.add((elem(k, 0), elem(k, 2)))
        spine.add((elem(0, 0), elem(k, 1)))
        spine.add((elem(0, 0), elem(k, 2)))
    return FinStructure(
        sig,
        3 * n,
        {"U0": u0, "U1": u1, "U2": u2, "N": frozenset(neq), "R": frozenset(spine)},
    )


def spider_collapse_hom(n: int) -> Hom:
    """Fix parts 1 and 2, send all of part 0 to the hub."""
    s = spider(n)
    mapping = []
    for k in range(n):
        for i in range(3):
            mapping.append(0 if i == 0 else 3 * k + i)
    return Hom(s, s, tuple(mapping))


def partitioned_dlo() -> DefStructure:
    """The dense order with a generic two-class labelling."""
    base = labeled_dlo(2)
    sorts = (Sort("q", 1),)
    clauses = (
        RelationClause("lt", 2, ("*", "*"), fm.Less(0, 1)),
        RelationClause("S", 1, ("*",), fm.Label(0, 0)),
        RelationClause("T", 1, ("*",), fm.Label(0, 1)),
    )
    return DefStructure(base, sorts, clauses)


def partitioned_dlo_companion() -> DefStructure:
    """Two copies of the dense order, interleaved lexicographically; the
    copy index decides the class."""
    sorts = (Sort("c1", 1), Sort("c2", 1))
    clauses = (
        RelationClause("lt", 2, ("c1", "c1"), fm.Less(0, 1)),
        RelationClause("lt", 2, ("c2", "c2"), fm.Less(0, 1)),
        RelationClause("lt", 2, ("c1", "c2"), fm.Or(fm.Less(0, 1), fm.Eq(0, 1))),
        RelationClause("lt", 2, ("c2", "c1"), fm.Less(0, 1)),
        RelationClause("S", 1, ("c1",), fm.TRUE),
        RelationClause("T", 1, ("c2",), fm.TRUE),
    )
    return DefStructure(DLO, sorts, clauses)


def local_order_formula(i: int, j: int) -> fm.Formula:
    """Tournament on labelled ordered atoms: same class follows the order,
    different classes reverse it."""
    same = fm.Or(
        fm.And(fm.Label(i, 0), fm.Label(j, 0)), fm.And(fm.Label(i, 1), fm.Label(j, 1))
    )
    return fm.Or(fm.And(fm.Less(i, j), same), fm.And(fm.Less(j, i), fm.Not(same)))


def dense_local_order() -> DefStructure:
    """The dense local order presented over the partitioned dense order."""
    return reduct(
        partitioned_dlo(),
        (RelationClause("prec", 2, ("*", "*"), local_order_formula(0, 1)),),
    )


def betweenness_reduct() -> DefStructure:
    """Ternary betweenness of the dense local order."""
    body = fm.Or(
        fm.And(local_order_formula(0, 1), local_order_formula(1, 2)),
        fm.And(local_order_formula(2, 1), local_order_formula(1, 0)),
    )
    return reduct(
        partitioned_dlo(),
        (RelationClause("betw", 3, ("*", "*", "*"), body),),
    )


def s2_cut_roundtrip(sample_struct: FinStructure, c: int) -> bool:
    """Cut a local-order sample at one element and rebuild it.

    Splits the remaining elements by their relation to c, derives a linear
    order from the two classes, checks it is a strict total order, and
    checks that the tournament reconstructed from the order and the classes
    is exactly the original one off c.
    """
    if not 0 <= c < sample_struct.size:
        raise InvalidElement(f"no element {c} in a domain of size {sample_struct.size}")
    prec = sample_struct.rel("prec")
    dom = [x for x in range(sample_struct.size) if x != c]
    cls_s = {a for a in dom if (c, a) in prec}
    cls_t = {a for a in dom if (a, c) in prec}
    if cls_s & cls_t or cls_s | cls_t != set(dom):
        return False

    def same_class(a, b):
        return (a in cls_s) == (b in cls_s)

    less = set()
    for a in dom:
        for b in dom:
            if a == b:
                continue
            if same_class(a, b):
                if (a, b) in prec:
                    less.add((a, b))
            else:
                if (b, a) in prec:
                    less.add((a, b))
    for a in dom:
        for b in dom:
            if a == b:
                continue
            if ((a, b) in less) == ((b, a) in less):
                return False
    for a in dom:
        for b in dom:
            for d in dom:
                if (a, b) in less and (b, d) in less and (a, d) not in less:
                    return False
    rebuilt = set()
    for a in dom:
        for b in dom:
            if a == b:
                continue
            if same_class(a, b):
                if (a, b) in less:
                    rebuilt.add((a, b))
            else:
                if (b, a) in less:
                    rebuilt.add((a, b))
    original = {(a, b) for (a, b) in prec if a != c and b != c}
    return rebuilt == original


def generic_permutation_companion() -> DefStructure:
    """Pairs of atoms carrying two interleaved linear orders.

    The domain is the off-diagonal plane, stored as an increasing pair with
    an orientation sort; each order compares one coordinate first and
    breaks ties with the other.
    """
    sorts = (Sort("pa", 2), Sort("pd", 2))
    clauses = []
    for o1, s1 in enumerate(("pa", "pd")):
        for o2, s2 in enumerate(("pa", "pd")):
            c1x, c2x = (0, 1) if o1 == 0 else (1, 0)
            c1y, c2y = (2, 3) if o2 == 0 else (3, 2)
            prec1 = fm.Or(
                fm.Less(c1x, c1y), fm.And(fm.Eq(c1x, c1y), fm.Less(c2x, c2y))
            )
            prec2 = fm.Or(
                fm.Less(c2x, c2y), fm.And(fm.Eq(c2x, c2y), fm.Less(c1x, c1y))
            )
            clauses.append(RelationClause("prec1", 2, (s1, s2), prec1))
            clauses.append(RelationClause("prec2", 2, (s1, s2), prec2))
    return DefStructure(DLO, sorts, tuple(clauses))


def _definable_registry() -> dict:
    return {
        "x": tagged_pair_structure,
        "y": lambda: pair_cover().total,
        "johnson": johnson_graph_def,
        "jord1": lambda: increasing_tuple_structure(1),
        "jord2": lambda: increasing_tuple_structure(2),
        "jord3": lambda: increasing_tuple_structure(3),
        "dlo": lambda: increasing_tuple_structure(1),
        "qst": partitioned_dlo,
        "qst-companion": partitioned_dlo_companion,
        "s2": dense_local_order,
        "betw": betweenness_reduct,
        "perm-companion": generic_permutation_companion,
    }


def lookup_definable(name: str) -> Optional[DefStructure]:
    builder = _definable_registry().get(name.lower())
    return builder() if builder else None


def lookup_finite(name: str) -> Optional[FinStructure]:
    key = name.lower()
    if key.startswith("spider"):
        tail = key[len("spider"):].lstrip(":")
        if tail.isdigit():
            return spider(int(tail))
    return None


def manifest() -> list[dict]:
    with resources.files(__package__).joinpath("gallery.json").open("r") as fh:
        return json.load(fh)
