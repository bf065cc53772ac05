"""Orbit-finite structures over an atom base.

A definable structure consists of sorts (each a dimension: its points are
strictly increasing atom tuples of that length) and relation clauses, each
guarding a tuple of sorts and carrying a quantifier-free formula over the
concatenated coordinates.  Sampling on a finite atom sample produces an
explicit finite structure; orbit and growth counting enumerate abstract
support patterns instead of concrete samples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .atoms import DLO, Atom, AtomBase, AtomSample, make_sample
from .errors import (
    ArityMismatch,
    BaseMismatch,
    InvalidDimension,
    SignatureMismatch,
    TooLarge,
    Unsupported,
)
from .finstruct import FinStructure, Signature, canonical_form
from . import formulas as fm

GUARD_ANY = "*"

ORBIT_WORK_BUDGET = 2_000_000
ORDER_SEARCH_BUDGET = 50_000_000


@dataclass(frozen=True)
class Sort:
    name: str
    dim: int

    def __post_init__(self):
        if self.dim < 0:
            raise InvalidDimension(f"sort {self.name!r} has dimension {self.dim}")


@dataclass(frozen=True)
class Point:
    """An element of a definable structure: a sort index plus its atom tuple."""

    sort: int
    atoms: tuple[Atom, ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        for i in range(1, len(self.atoms)):
            if not self.atoms[i - 1].value < self.atoms[i].value:
                raise InvalidDimension("point atoms must be strictly increasing")


@dataclass(frozen=True)
class RelationClause:
    """One defining clause of a relation.

    guard entries are a sort name, a frozenset of sort names, or "*";
    clauses sharing a name contribute the union of their tuple sets.
    """

    name: str
    arity: int
    guard: tuple
    formula: fm.Formula

    def __post_init__(self):
        guard = tuple(
            frozenset(g) if isinstance(g, (set, frozenset, list)) else g for g in self.guard
        )
        object.__setattr__(self, "guard", guard)
        if len(guard) != self.arity:
            raise ArityMismatch(
                f"clause {self.name!r}: guard length {len(guard)} != arity {self.arity}"
            )


def _guard_matches(entry, sort_name: str) -> bool:
    if entry == GUARD_ANY:
        return True
    if isinstance(entry, frozenset):
        return sort_name in entry
    return entry == sort_name


@dataclass(frozen=True)
class DefStructure:
    base: AtomBase
    sorts: tuple[Sort, ...]
    clauses: tuple[RelationClause, ...]

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "clauses", tuple(self.clauses))
        names = [s.name for s in self.sorts]
        if len(set(names)) != len(names):
            raise SignatureMismatch(f"duplicate sort names in {names}")
        sort_names = set(names)
        arities: dict[str, int] = {}
        for clause in self.clauses:
            prev = arities.setdefault(clause.name, clause.arity)
            if prev != clause.arity:
                raise SignatureMismatch(
                    f"relation {clause.name!r} used with arities {prev} and {clause.arity}"
                )
            for entry in clause.guard:
                mentioned = (
                    set() if entry == GUARD_ANY
                    else set(entry) if isinstance(entry, frozenset)
                    else {entry}
                )
                unknown = mentioned - sort_names
                if unknown:
                    raise SignatureMismatch(
                        f"clause {clause.name!r} guards unknown sorts {sorted(unknown)}"
                    )
            for combo in self._matching_sort_combos(clause):
                total = sum(s.dim for s in combo)
                if fm.max_position(clause.formula) >= total:
                    raise ArityMismatch(
                        f"clause {clause.name!r} uses position "
                        f"{fm.max_position(clause.formula)} on sorts totalling {total} coordinates"
                    )

    def _matching_sort_combos(self, clause: RelationClause):
        groups = []
        for entry in clause.guard:
            matching = [s for s in self.sorts if _guard_matches(entry, s.name)]
            groups.append(matching)
        return itertools.product(*groups)

    def sort_index(self, name: str) -> int:
        for i, s in enumerate(self.sorts):
            if s.name == name:
                return i
        raise SignatureMismatch(f"unknown sort {name!r}")

    def max_dim(self) -> int:
        return max((s.dim for s in self.sorts), default=0)

    def signature(self) -> Signature:
        seen: dict[str, int] = {}
        for clause in self.clauses:
            seen.setdefault(clause.name, clause.arity)
        return Signature(tuple(seen.items()))

    def to_json(self) -> dict:
        def guard_json(entry):
            if isinstance(entry, frozenset):
                return sorted(entry)
            return entry

        return {
            "base": self.base.to_json(),
            "sorts": [{"name": s.name, "dim": s.dim} for s in self.sorts],
            "relations": [
                {
                    "name": c.name,
                    "arity": c.arity,
                    "guard": [guard_json(g) for g in c.guard],
                    "formula": fm.to_json(c.formula),
                }
                for c in self.clauses
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "DefStructure":
        base = AtomBase.from_json(data["base"])
        sorts = tuple(Sort(d["name"], int(d["dim"])) for d in data["sorts"])
        clauses = tuple(
            RelationClause(
                c["name"],
                int(c["arity"]),
                tuple(frozenset(g) if isinstance(g, list) else g for g in c["guard"]),
                fm.from_json(c["formula"]),
            )
            for c in data["relations"]
        )
        return DefStructure(base, sorts, clauses)


@dataclass(frozen=True)
class SampleResult:
    structure: FinStructure
    points: tuple[Point, ...]

    def index_of(self, point: Point) -> int:
        return self.points.index(point)


def _relations_on(D: DefStructure, points: Sequence[Point]) -> dict[str, set[tuple[int, ...]]]:
    by_sort: dict[int, list[int]] = {}
    for pid, p in enumerate(points):
        by_sort.setdefault(p.sort, []).append(pid)
    rels: dict[str, set[tuple[int, ...]]] = {c.name: set() for c in D.clauses}
    for clause in D.clauses:
        groups = []
        for entry in clause.guard:
            ids = []
            for si, sort in enumerate(D.sorts):
                if _guard_matches(entry, sort.name):
                    ids.extend(by_sort.get(si, ()))
            groups.append(sorted(ids))
        for combo in itertools.product(*groups):
            env = tuple(a for pid in combo for a in points[pid].atoms)
            if fm.evaluate(clause.formula, env, D.base):
                rels[clause.name].add(combo)
    return rels


def sample(D: DefStructure, A: AtomSample) -> SampleResult:
    """Explicit finite structure on all points supported inside A."""
    if A.base != D.base:
        raise BaseMismatch(f"sample base {A.base} differs from structure base {D.base}")
    points = []
    for si, sort in enumerate(D.sorts):
        for combo in itertools.combinations(A.atoms, sort.dim):
            points.append(Point(si, combo))
    rels = _relations_on(D, points)
    structure = FinStructure(D.signature(), len(points), {k: frozenset(v) for k, v in rels.items()})
    return SampleResult(structure, tuple(points))


def induce_on_points(D: DefStructure, points: Sequence[Point]) -> FinStructure:
    """Structure induced on an explicit list of points, in the given order."""
    rels = _relations_on(D, points)
    return FinStructure(D.signature(), len(points), {k: frozenset(v) for k, v in rels.items()})


def reduct(D: DefStructure, clauses: Iterable[RelationClause]) -> DefStructure:
    return DefStructure(D.base, D.sorts, tuple(clauses))


def disjoint_union_def(left: DefStructure, right: DefStructure) -> DefStructure:
    """Union of sorts; every clause re-guarded to its originating sorts."""
    if left.base != right.base:
        raise BaseMismatch("disjoint union requires a common base")
    taken = {s.name for s in left.sorts}
    rename: dict[str, str] = {}
    new_right_sorts = []
    for s in right.sorts:
        name = s.name
        while name in taken:
            name = name + "'"
        taken.add(name)
        rename[s.name] = name
        new_right_sorts.append(Sort(name, s.dim))

    def scope(clause: RelationClause, own_sorts, mapping) -> RelationClause:
        own_names = frozenset(s.name for s in own_sorts)
        guard = []
        for entry in clause.guard:
            if entry == GUARD_ANY:
                guard.append(own_names)
            elif isinstance(entry, frozenset):
                guard.append(frozenset(mapping.get(g, g) for g in entry))
            else:
                guard.append(mapping.get(entry, entry))
        return RelationClause(clause.name, clause.arity, tuple(guard), clause.formula)

    clauses = [scope(c, left.sorts, {}) for c in left.clauses]
    clauses += [scope(c, new_right_sorts, rename) for c in right.clauses]
    return DefStructure(left.base, left.sorts + tuple(new_right_sorts), tuple(clauses))


def _power_patterns(m: int, d: int) -> list[tuple[tuple[int, ...], ...]]:
    """All ways d increasing m-tuples can share a support, covering it."""
    if m == 0:
        return [((),) * d]
    out = []
    for s in range(m, d * m + 1):
        for rows in itertools.product(itertools.combinations(range(s), m), repeat=d):
            if set().union(*[set(r) for r in rows]) == set(range(s)):
                out.append(rows)
    return sorted(out, key=lambda rows: (len(set().union(*[set(r) for r in rows])), rows))


def _pattern_name(rows) -> str:
    return "p[" + "|".join(",".join(map(str, r)) for r in rows) + "]"


def full_power_def(D: DefStructure, d: int) -> DefStructure:
    """Power structure on d-tuples of points, in support-pattern normal form.

    Each sort of the result is a sharing pattern of d increasing tuples; a
    point is the (increasing) union of the component supports.  Relations
    are the projection-instantiated relations of D plus component equality,
    named exactly as in the finite full power so that samples line up.
    """
    if d < 1:
        raise InvalidDimension(f"power dimension must be >= 1, got {d}")
    if len(D.sorts) != 1:
        raise Unsupported("full power is only defined for single-sort structures")
    m = D.sorts[0].dim
    patterns = _power_patterns(m, d)
    support = {_pattern_name(rows): len(set().union(*[set(r) for r in rows])) if m else 0 for rows in patterns}
    sorts = tuple(Sort(_pattern_name(rows), support[_pattern_name(rows)]) for rows in patterns)
    named = {s.name: rows for s, rows in zip(sorts, patterns)}

    merged: dict[str, tuple[int, fm.Formula]] = {}
    for clause in D.clauses:
        arity, parts = merged.get(clause.name, (clause.arity, None))
        phi = clause.formula
        merged[clause.name] = (clause.arity, phi if parts is None else fm.Or(parts, phi))

    atoms_rels = list(merged.items()) + [("=", (2, None))]
    clauses = []
    for name, (k, phi) in atoms_rels:
        for js in itertools.product(range(d), repeat=k):
            rel_name = f"{name}@{','.join(str(j + 1) for j in js)}"
            for combo in itertools.product(sorts, repeat=k):
                offsets = []
                start = 0
                for s in combo:
                    offsets.append(start)
                    start += s.dim
                if name == "=":
                    if m == 0:
                        body: fm.Formula = fm.TRUE
                    else:
                        rows1 = named[combo[0].name][js[0]]
                        rows2 = named[combo[1].name][js[1]]
                        body = fm.And(
                            tuple(
                                fm.Eq(offsets[0] + rows1[c], offsets[1] + rows2[c])
                                for c in range(m)
                            )
                        )
                else:
                    mapping = {}
                    for l in range(k):
                        rows = named[combo[l].name][js[l]]
                        for c in range(m):
                            mapping[l * m + c] = offsets[l] + rows[c]
                    body = fm.shift_positions(phi, mapping)
                clauses.append(
                    RelationClause(rel_name, k, tuple(s.name for s in combo), body)
                )
    return DefStructure(D.base, sorts, tuple(clauses))


def _support_of(points: Iterable[Point]) -> list[Atom]:
    by_value = {}
    for p in points:
        for a in p.atoms:
            by_value[a.value] = a
    return [by_value[v] for v in sorted(by_value)]


def tuple_type(points: Sequence[Point], base: AtomBase) -> str:
    """Canonical descriptor of a tuple of points under base automorphisms."""
    support = _support_of(points)
    rank = {a.value: i for i, a in enumerate(support)}
    word = tuple(a.label for a in support)
    shape = tuple((p.sort, tuple(rank[a.value] for a in p.atoms)) for p in points)
    if base.ordered:
        return repr((len(support), word, shape))
    return repr(_min_under_slot_perms(len(support), word, shape))


def subset_type(points: Iterable[Point], base: AtomBase) -> str:
    """Canonical descriptor of a set of points under base automorphisms."""
    pts = list(points)
    support = _support_of(pts)
    rank = {a.value: i for i, a in enumerate(support)}
    word = tuple(a.label for a in support)
    shape = tuple(sorted((p.sort, tuple(rank[a.value] for a in p.atoms)) for p in pts))
    if base.ordered:
        return repr((len(support), word, shape))
    return repr(_min_under_slot_perms(len(support), word, shape, resort=True))


def _min_under_slot_perms(s, word, shape, resort=False):
    best = None
    for perm in itertools.permutations(range(s)):
        if any(word[perm[i]] != word[i] for i in range(s)):
            continue
        relabeled = []
        for sort, slots in shape:
            new_slots = tuple(sorted(perm[k] for k in slots))
            relabeled.append((sort, new_slots))
        if resort:
            relabeled.sort()
        cand = (s, word, tuple(relabeled))
        if best is None or cand < best:
            best = cand
    return best


def _abstract_points(D: DefStructure, s: int) -> list[tuple[int, tuple[int, ...]]]:
    out = []
    for si, sort in enumerate(D.sorts):
        for combo in itertools.combinations(range(s), sort.dim):
            out.append((si, combo))
    return out


def _realize(word: tuple[int, ...], assignment) -> tuple[Point, ...]:
    atoms = tuple(Atom(Fraction(i), word[i]) for i in range(len(word)))
    return tuple(Point(si, tuple(atoms[k] for k in slots)) for si, slots in assignment)


def _support_words(D: DefStructure, s: int):
    if D.base.ordered:
        return itertools.product(range(D.base.alphabet), repeat=s)
    return [(0,) * s]


def point_orbits(
    D: DefStructure, n: int, atom_budget: int = 12, work_budget: int = ORBIT_WORK_BUDGET
) -> list[str]:
    """Descriptors of all orbits of n-tuples of points.

    Enumerates abstract supports (size and label word) together with all
    assignments of n points using every support atom; the count of returned
    descriptors equals the number of base-automorphism orbits of n-tuples.
    """
    if n < 1:
        raise InvalidDimension(f"need n >= 1, got {n}")
    smax = n * D.max_dim()
    if smax > atom_budget:
        raise TooLarge(f"would need supports of size {smax} > budget {atom_budget}")
    work = 0
    descriptors = set()
    for s in range(smax + 1):
        abstract = _abstract_points(D, s)
        if not abstract:
            continue
        full = set(range(s))
        for word in _support_words(D, s):
            for assignment in itertools.product(abstract, repeat=n):
                work += 1
                if work > work_budget:
                    raise TooLarge(f"orbit enumeration exceeded work budget {work_budget}")
                used = set()
                for _, slots in assignment:
                    used.update(slots)
                if used != full:
                    continue
                descriptors.add(tuple_type(_realize(word, assignment), D.base))
    return sorted(descriptors)


def _subset_reps(D: DefStructure, n: int, atom_budget: int, work_budget: int):
    """One concrete representative per orbit of n-element point sets."""
    smax = n * D.max_dim()
    if smax > atom_budget:
        raise TooLarge(f"would need supports of size {smax} > budget {atom_budget}")
    work = 0
    reps: dict[str, tuple[Point, ...]] = {}
    for s in range(smax + 1):
        abstract = _abstract_points(D, s)
        if len(abstract) < n:
            continue
        full = set(range(s))
        for word in _support_words(D, s):
            for assignment in itertools.combinations(abstract, n):
                work += 1
                if work > work_budget:
                    raise TooLarge(f"orbit enumeration exceeded work budget {work_budget}")
                used = set()
                for _, slots in assignment:
                    used.update(slots)
                if used != full:
                    continue
                points = _realize(word, assignment)
                desc = subset_type(points, D.base)
                if desc not in reps:
                    reps[desc] = points
    return reps


def unlabelled_growth(
    D: DefStructure,
    n: int,
    mode: str = "base",
    max_n: int = 8,
    atom_budget: int = 16,
    work_budget: int = ORBIT_WORK_BUDGET,
) -> int:
    """Number of classes of n-element subsets of D's points.

    mode="base" counts orbits under base automorphisms (support-pattern
    classes).  mode="homogeneous" counts isomorphism classes of the induced
    n-point structures, which equals the orbit count of the full
    automorphism group exactly when D is homogeneous in its listed
    relations; asserting that is the caller's responsibility.
    """
    if n < 1 or n > max_n:
        raise TooLarge(f"n={n} outside supported range 1..{max_n}")
    if mode not in ("base", "homogeneous"):
        raise Unsupported(f"unknown growth mode {mode!r}")
    reps = _subset_reps(D, n, atom_budget, work_budget)
    if mode == "base":
        return len(reps)
    forms = {canonical_form(induce_on_points(D, points)) for points in reps.values()}
    return len(forms)


def _reverse_binary(structure: FinStructure) -> FinStructure:
    rels = {
        name: frozenset(t[::-1] for t in structure.relations[name])
        for name, _ in structure.signature.relations
    }
    return FinStructure(structure.signature, structure.size, rels)


def growth_up_to_reversal(
    D: DefStructure,
    n: int,
    max_n: int = 8,
    atom_budget: int = 16,
    work_budget: int = ORBIT_WORK_BUDGET,
) -> int:
    """Isomorphism classes of induced n-point structures, a class and its
    relation-reversed class identified.  Requires a single binary relation."""
    sig = D.signature()
    if len(sig.relations) != 1 or sig.relations[0][1] != 2:
        raise Unsupported("reversal counting needs exactly one binary relation")
    if n < 1 or n > max_n:
        raise TooLarge(f"n={n} outside supported range 1..{max_n}")
    reps = _subset_reps(D, n, atom_budget, work_budget)
    forms = set()
    for points in reps.values():
        induced = induce_on_points(D, points)
        forms.add(min(canonical_form(induced), canonical_form(_reverse_binary(induced))))
    return len(forms)


def increasing_tuple_structure(d: int) -> DefStructure:
    """The canonical ordered base in dimension d: strictly increasing
    d-tuples with all coordinatewise order and equality relations."""
    if d < 1:
        raise InvalidDimension(f"need dimension >= 1, got {d}")
    clauses = []
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            clauses.append(
                RelationClause(f"lt{i}{j}", 2, (GUARD_ANY, GUARD_ANY), fm.Less(i - 1, d + j - 1))
            )
            clauses.append(
                RelationClause(f"eq{i}{j}", 2, (GUARD_ANY, GUARD_ANY), fm.Eq(i - 1, d + j - 1))
            )
    return DefStructure(DLO, (Sort("t", d),), tuple(clauses))


def pair_descriptor(p: Point, q: Point, base: AtomBase = DLO) -> str:
    return tuple_type((p, q), base)


def pair_orbit_reps(d: int) -> dict[str, tuple[Point, Point]]:
    """Representative concrete point pairs, one per orbit of ordered pairs."""
    reps: dict[str, tuple[Point, Point]] = {}
    for s in range(d, 2 * d + 1):
        atoms = tuple(Atom(Fraction(i)) for i in range(s))
        for c1 in itertools.combinations(range(s), d):
            for c2 in itertools.combinations(range(s), d):
                if set(c1) | set(c2) != set(range(s)):
                    continue
                p = Point(0, tuple(atoms[k] for k in c1))
                q = Point(0, tuple(atoms[k] for k in c2))
                desc = pair_descriptor(p, q)
                if desc not in reps:
                    reps[desc] = (p, q)
    return reps


def enumerate_invariant_orders(
    D: DefStructure, budget: int = ORDER_SEARCH_BUDGET
) -> list[tuple[str, ...]]:
    """All invariant strict total orders on D's points, each given as the
    set of pair-orbit descriptors it contains.

    Every candidate must be irreflexive, total, antisymmetric and
    transitive on a sample with 3*d atoms; since three points involve at
    most 3*d atoms and every 3-point type is realized at that size,
    invariance makes the check conclusive.
    """
    if len(D.sorts) != 1:
        raise Unsupported("invariant order enumeration needs a single sort")
    if D.base != DLO:
        raise Unsupported("invariant order enumeration is defined over the dense order")
    d = D.sorts[0].dim
    if d < 1 or d > 3:
        raise TooLarge(f"dimension {d} outside supported range 1..3")

    reps = pair_orbit_reps(d)
    diag = None
    swap_of = {}
    for desc, (p, q) in reps.items():
        if p == q:
            diag = desc
        swap_of[desc] = pair_descriptor(q, p)

    pairs = []
    seen = set()
    for desc in sorted(reps):
        if desc == diag or desc in seen:
            continue
        other = swap_of[desc]
        seen.add(desc)
        seen.add(other)
        pairs.append((desc, other))

    witness_atoms = make_sample(DLO, 3 * d)
    points = [Point(0, combo) for combo in itertools.combinations(witness_atoms.atoms, d)]
    m = len(points)
    classes = [[pair_descriptor(points[i], points[j]) for j in range(m)] for i in range(m)]

    # Composition table: descriptor triples realizable by sample triples.
    comp = set()
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            for k in range(m):
                if k == j:
                    continue
                comp.add((classes[i][j], classes[j][k], classes[i][k]))
    comp_list = sorted(comp)

    results = []
    status: dict[str, bool] = {}
    work = 0

    def violated() -> bool:
        for o1, o2, o3 in comp_list:
            if status.get(o1) and status.get(o2) and status.get(o3) is False:
                return True
        return False

    def descend(idx: int):
        nonlocal work
        work += len(comp_list)
        if work > budget:
            raise TooLarge(f"invariant order search exceeded budget {budget}")
        if violated():
            return
        if idx == len(pairs):
            results.append(tuple(sorted(o for o, v in status.items() if v)))
            return
        a, b = pairs[idx]
        for chosen, dropped in ((a, b), (b, a)):
            status[chosen] = True
            status[dropped] = False
            descend(idx + 1)
            del status[chosen]
            del status[dropped]

    if diag is not None:
        status[diag] = False
    descend(0)
    return sorted(results)


@dataclass(frozen=True)
class SignedLex:
    """A signed lexicographic order: compare coordinates in the order given
    by sigma, each read ascending or descending."""

    sigma: tuple[int, ...]
    directions: tuple[str, ...]

    def __post_init__(self):
        if sorted(self.sigma) != list(range(len(self.sigma))):
            raise InvalidDimension(f"sigma {self.sigma} is not a permutation")
        if len(self.directions) != len(self.sigma):
            raise InvalidDimension("one direction per coordinate is required")
        for r in self.directions:
            if r not in ("asc", "desc"):
                raise Unsupported(f"unknown direction {r!r}")

    def less(self, a: Sequence, b: Sequence) -> bool:
        for pos, direction in zip(self.sigma, self.directions):
            if a[pos] != b[pos]:
                return a[pos] < b[pos] if direction == "asc" else a[pos] > b[pos]
        return False

    def to_json(self) -> dict:
        return {"sigma": list(self.sigma), "directions": list(self.directions)}


def classify_signed_lex(order: Iterable[str], d: int) -> Optional[SignedLex]:
    """The unique signed lexicographic order agreeing with the given
    pair-orbit union on every orbit, or None when no candidate agrees."""
    chosen = set(order)
    reps = pair_orbit_reps(d)
    for sigma in itertools.permutations(range(d)):
        for dirs in itertools.product(("asc", "desc"), repeat=d):
            candidate = SignedLex(sigma, dirs)
            ok = True
            for desc, (p, q) in reps.items():
                if p == q:
                    continue
                truth = candidate.less([a.value for a in p.atoms], [a.value for a in q.atoms])
                if truth != (desc in chosen):
                    ok = False
                    break
            if ok:
                return candidate
    return None
