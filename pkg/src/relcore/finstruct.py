"""Explicit finite relational structures.

Provides homomorphism / embedding / isomorphism search by backtracking with
forward pruning, endomorphism enumeration, core computation by iterated
image shrinking, and a brute-force canonical form for isomorphism testing
on small structures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    HomValidationError,
    InvalidDimension,
    InvalidElement,
    SignatureMismatch,
    TooLarge,
)


@dataclass(frozen=True)
class Signature:
    """Relation names with arities; stored sorted by name, names unique."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        rels = tuple(sorted((str(n), int(a)) for n, a in self.relations))
        names = [n for n, _ in rels]
        if len(set(names)) != len(names):
            raise SignatureMismatch(f"duplicate relation names in {names}")
        for name, arity in rels:
            if arity < 1:
                raise SignatureMismatch(f"relation {name!r} has arity {arity}")
        object.__setattr__(self, "relations", rels)

    def arity(self, name: str) -> int:
        for n, a in self.relations:
            if n == name:
                return a
        raise SignatureMismatch(f"unknown relation {name!r}")

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.relations)

    def to_json(self) -> list:
        return [{"name": n, "arity": a} for n, a in self.relations]

    @staticmethod
    def from_json(data: list) -> "Signature":
        return Signature(tuple((d["name"], d["arity"]) for d in data))


@dataclass(frozen=True, eq=True)
class FinStructure:
    """A finite relational structure on domain 0..size-1."""

    signature: Signature
    size: int
    relations: dict[str, frozenset[tuple[int, ...]]] = field(default_factory=dict)

    def __post_init__(self):
        rels = {}
        for name, arity in self.signature.relations:
            tuples = frozenset(tuple(t) for t in self.relations.get(name, ()))
            for t in tuples:
                if len(t) != arity:
                    raise SignatureMismatch(f"{name!r} expects arity {arity}, got {t}")
                for x in t:
                    if not 0 <= x < self.size:
                        raise InvalidElement(f"element {x} outside domain of size {self.size}")
            rels[name] = tuples
        extra = set(self.relations) - set(rels)
        if extra:
            raise SignatureMismatch(f"relations {sorted(extra)} not in signature")
        object.__setattr__(self, "relations", rels)

    def rel(self, name: str) -> frozenset[tuple[int, ...]]:
        return self.relations[name]

    def to_json(self) -> dict:
        return {
            "signature": self.signature.to_json(),
            "size": self.size,
            "relations": {
                name: sorted(list(t) for t in self.relations[name])
                for name in self.signature.names()
            },
        }

    @staticmethod
    def from_json(data: dict) -> "FinStructure":
        sig = Signature.from_json(data["signature"])
        rels = {name: frozenset(tuple(t) for t in ts) for name, ts in data["relations"].items()}
        return FinStructure(sig, int(data["size"]), rels)


def hom_violations(source: FinStructure, target: FinStructure, mapping: Sequence[int]) -> list[str]:
    """All ways a map fails to be a homomorphism (empty list means valid)."""
    out = []
    if len(mapping) != source.size:
        return [f"map has length {len(mapping)}, domain has size {source.size}"]
    for x in mapping:
        if not 0 <= x < target.size:
            return [f"image {x} outside target domain of size {target.size}"]
    for name, _ in source.signature.relations:
        for t in source.relations[name]:
            image = tuple(mapping[x] for x in t)
            if image not in target.relations[name]:
                out.append(f"{name}{t} maps to {name}{image} which is absent")
    return out


@dataclass(frozen=True)
class Hom:
    """A validated homomorphism between two structures with equal signature."""

    source: FinStructure
    target: FinStructure
    mapping: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))
        if self.source.signature != self.target.signature:
            raise SignatureMismatch("source and target signatures differ")
        problems = hom_violations(self.source, self.target, self.mapping)
        if problems:
            raise HomValidationError("; ".join(problems[:3]))

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def is_injective(self) -> bool:
        return len(set(self.mapping)) == len(self.mapping)

    def is_embedding(self) -> bool:
        if not self.is_injective():
            return False
        image = set(self.mapping)
        inv = {w: v for v, w in enumerate(self.mapping)}
        for name, _ in self.source.signature.relations:
            src = self.source.relations[name]
            for t in self.target.relations[name]:
                if all(x in image for x in t):
                    if tuple(inv[x] for x in t) not in src:
                        return False
        return True

    def is_isomorphism(self) -> bool:
        return (
            self.source.size == self.target.size
            and self.is_embedding()
            and len(set(self.mapping)) == self.target.size
        )

    def then(self, other: "Hom") -> "Hom":
        """Composite self;other (apply self first)."""
        if other.source is not self.target and other.source != self.target:
            raise SignatureMismatch("composition targets do not line up")
        return Hom(self.source, other.target, tuple(other.mapping[x] for x in self.mapping))

    def to_json(self) -> dict:
        return {"map": list(self.mapping)}


def induced_substructure(
    structure: FinStructure, subset: Iterable[int]
) -> tuple[FinStructure, tuple[int, ...]]:
    """Substructure on a subset of the domain, re-indexed.

    Returns the new structure together with the translation table old_ids,
    where old_ids[new_id] is the original element.
    """
    old_ids = tuple(sorted(set(subset)))
    for x in old_ids:
        if not 0 <= x < structure.size:
            raise InvalidElement(f"element {x} outside domain of size {structure.size}")
    new_of = {old: new for new, old in enumerate(old_ids)}
    keep = set(old_ids)
    rels = {}
    for name, _ in structure.signature.relations:
        rels[name] = frozenset(
            tuple(new_of[x] for x in t)
            for t in structure.relations[name]
            if all(x in keep for x in t)
        )
    return FinStructure(structure.signature, len(old_ids), rels), old_ids


def disjoint_union(left: FinStructure, right: FinStructure) -> FinStructure:
    if left.signature != right.signature:
        raise SignatureMismatch("disjoint union requires equal signatures")
    shift = left.size
    rels = {}
    for name, _ in left.signature.relations:
        rels[name] = left.relations[name] | frozenset(
            tuple(x + shift for x in t) for t in right.relations[name]
        )
    return FinStructure(left.signature, left.size + right.size, rels)


def full_power(structure: FinStructure, d: int) -> FinStructure:
    """Structure on d-tuples carrying every projection-instantiated atomic relation.

    For each relation R of arity k (and for equality) and each projection
    pattern (j_1,...,j_k) in [d]^k there is a relation named "R@j_1,...,j_k"
    holding on (t_1,...,t_k) iff R(t_1[j_1],...,t_k[j_k]).
    """
    if d < 1:
        raise InvalidDimension(f"power dimension must be >= 1, got {d}")
    domain = list(itertools.product(range(structure.size), repeat=d))
    index = {t: i for i, t in enumerate(domain)}
    atoms = list(structure.signature.relations) + [("=", 2)]
    names = []
    rels = {}
    for name, arity in atoms:
        base = structure.relations[name] if name != "=" else None
        for js in itertools.product(range(d), repeat=arity):
            rel_name = f"{name}@{','.join(str(j + 1) for j in js)}"
            names.append((rel_name, arity))
            tuples = set()
            for combo in itertools.product(domain, repeat=arity):
                projected = tuple(combo[l][js[l]] for l in range(arity))
                if name == "=":
                    ok = projected[0] == projected[1]
                else:
                    ok = projected in base
                if ok:
                    tuples.add(tuple(index[t] for t in combo))
            rels[rel_name] = frozenset(tuples)
    return FinStructure(Signature(tuple(names)), len(domain), rels)


def _binary_names(structure: FinStructure) -> list[str]:
    return [n for n, a in structure.signature.relations if a == 2]


def _tuples_by_var(structure: FinStructure) -> dict[int, list[tuple[str, tuple[int, ...]]]]:
    out: dict[int, list] = {v: [] for v in range(structure.size)}
    for name, _ in structure.signature.relations:
        for t in structure.relations[name]:
            for v in set(t):
                out[v].append((name, t))
    return out


def _search(
    source: FinStructure,
    target: FinStructure,
    mode: str,
    partial: Optional[dict[int, int]],
    lexicographic: bool,
    limit: Optional[int],
) -> list[tuple[int, ...]]:
    """Backtracking search for structure maps.

    mode is one of "hom", "embedding", "iso".  With lexicographic=True the
    variable order is 0,1,2,... and solutions come out sorted as tuples;
    otherwise the smallest-candidate-set variable is assigned first (ties by
    lowest id).  Candidate values are always tried in ascending order.
    """
    if source.signature != target.signature:
        raise SignatureMismatch("hom search requires equal signatures")
    if mode not in ("hom", "embedding", "iso"):
        raise ValueError(f"unknown mode {mode!r}")
    strong = mode in ("embedding", "iso")
    if mode == "iso" and source.size != target.size:
        return []
    if strong and source.size > target.size:
        return []

    n = source.size
    binaries = _binary_names(source)
    src_by_var = _tuples_by_var(source)
    tgt_by_elem = _tuples_by_var(target)
    tgt_pairs = {name: target.relations[name] for name in binaries}
    src_pairs = {name: source.relations[name] for name in binaries}

    # Unary constraints fix the initial candidate sets.
    unaries = [n0 for n0, a in source.signature.relations if a == 1]
    cands: list[list[int]] = []
    for v in range(n):
        opts = []
        for w in range(target.size):
            ok = True
            for name in unaries:
                in_s = (v,) in source.relations[name]
                in_t = (w,) in target.relations[name]
                if (in_s and not in_t) or (strong and in_s != in_t):
                    ok = False
                    break
            if ok:
                opts.append(w)
        cands.append(opts)

    assignment: list[Optional[int]] = [None] * n
    inverse: dict[int, int] = {}
    solutions: list[tuple[int, ...]] = []

    def consistent_assign(v: int, w: int) -> bool:
        for name, t in src_by_var[v]:
            image = []
            for x in t:
                y = w if x == v else assignment[x]
                if y is None:
                    break
                image.append(y)
            else:
                if tuple(image) not in target.relations[name]:
                    return False
        if strong:
            for name, t in tgt_by_elem.get(w, ()):
                pre = []
                for y in t:
                    x = v if y == w else inverse.get(y)
                    if x is None:
                        break
                    pre.append(x)
                else:
                    if tuple(pre) not in source.relations[name]:
                        return False
        return True

    def prune(v: int, w: int, current: list[list[int]]) -> Optional[list[list[int]]]:
        updated = current
        for u in range(n):
            if assignment[u] is not None or u == v:
                continue
            opts = updated[u]
            filtered = []
            for x in opts:
                if strong and x == w:
                    continue
                ok = True
                for name in binaries:
                    fwd_s = (v, u) in src_pairs[name]
                    bwd_s = (u, v) in src_pairs[name]
                    fwd_t = (w, x) in tgt_pairs[name]
                    bwd_t = (x, w) in tgt_pairs[name]
                    if strong:
                        if fwd_s != fwd_t or bwd_s != bwd_t:
                            ok = False
                            break
                    else:
                        if (fwd_s and not fwd_t) or (bwd_s and not bwd_t):
                            ok = False
                            break
                if ok:
                    filtered.append(x)
            if len(filtered) < len(opts):
                if not filtered:
                    return None
                if updated is current:
                    updated = list(current)
                updated[u] = filtered
        return updated

    if partial:
        for v, w in sorted(partial.items()):
            if not 0 <= v < n or not 0 <= w < target.size:
                return []
            if w not in cands[v]:
                return []
            if strong and w in inverse:
                return []
            if not consistent_assign(v, w):
                return []
            assignment[v] = w
            if strong:
                inverse[w] = v
            pruned = prune(v, w, cands)
            if pruned is None:
                return []
            cands = pruned

    def pick(current: list[list[int]]) -> int:
        if lexicographic:
            for v in range(n):
                if assignment[v] is None:
                    return v
            raise AssertionError("pick on full assignment")
        best, best_len = -1, None
        for v in range(n):
            if assignment[v] is None:
                l = len(current[v])
                if best_len is None or l < best_len:
                    best, best_len = v, l
        return best

    def backtrack(current: list[list[int]]) -> bool:
        """Returns True when the solution limit has been reached."""
        if all(a is not None for a in assignment):
            solutions.append(tuple(assignment))  # type: ignore[arg-type]
            return limit is not None and len(solutions) >= limit
        v = pick(current)
        for w in current[v]:
            if strong and w in inverse:
                continue
            if not consistent_assign(v, w):
                continue
            pruned = prune(v, w, current)
            if pruned is None:
                continue
            assignment[v] = w
            if strong:
                inverse[w] = v
            done = backtrack(pruned)
            assignment[v] = None
            if strong:
                del inverse[w]
            if done:
                return True
        return False

    backtrack(cands)
    if mode == "iso":
        solutions = [s for s in solutions if len(set(s)) == target.size]
    return solutions


def find_hom(
    source: FinStructure,
    target: FinStructure,
    mode: str = "hom",
    partial: Optional[dict[int, int]] = None,
) -> Optional[Hom]:
    """First map found by the deterministic search, or None if exhausted."""
    found = _search(source, target, mode, partial, lexicographic=False, limit=1)
    if not found:
        return None
    return Hom(source, target, found[0])


def enumerate_endos(structure: FinStructure, limit: Optional[int] = None) -> list[Hom]:
    """All endomorphisms in lexicographic order of the map, up to limit."""
    found = _search(structure, structure, "hom", None, lexicographic=True, limit=limit)
    return [Hom(structure, structure, m) for m in sorted(found)]


def _quotient(structure: FinStructure, u: int, v: int) -> tuple[FinStructure, list[int]]:
    """Identify v with u; returns the quotient and the projection map."""
    proj = []
    new_id = 0
    for x in range(structure.size):
        if x == v:
            proj.append(-1)
        else:
            proj.append(new_id)
            new_id += 1
    proj[v] = proj[u]
    rels = {
        name: frozenset(tuple(proj[x] for x in t) for t in structure.relations[name])
        for name, _ in structure.signature.relations
    }
    return FinStructure(structure.signature, structure.size - 1, rels), proj


def find_noninjective_endo(structure: FinStructure) -> Optional[Hom]:
    """An endomorphism merging two elements, or None if the structure is a core.

    Scans collapsing pairs in lexicographic order, so the result is
    deterministic.
    """
    for u in range(structure.size):
        for v in range(u + 1, structure.size):
            quotient, proj = _quotient(structure, u, v)
            g = find_hom(quotient, structure, "hom")
            if g is not None:
                return Hom(structure, structure, tuple(g.mapping[proj[x]] for x in range(structure.size)))
    return None


def is_core(structure: FinStructure) -> bool:
    """True iff every endomorphism is injective (hence an automorphism)."""
    return find_noninjective_endo(structure) is None


@dataclass(frozen=True)
class CoreResult:
    core: FinStructure
    retraction: Hom
    old_ids: tuple[int, ...]
    was_core: bool


def compute_core(structure: FinStructure) -> CoreResult:
    """Core by iterated image shrinking.

    Repeatedly finds a non-injective endomorphism and restricts to its
    image.  The returned retraction restricts to the identity on the core
    (as a subset of the original domain) and the core admits only injective
    endomorphisms.
    """
    n = structure.size
    f = list(range(n))
    current_old = tuple(range(n))
    was_core = True
    while True:
        part, old_ids = induced_substructure(structure, current_old)
        e = find_noninjective_endo(part)
        if e is None:
            break
        was_core = False
        e_orig = {old_ids[i]: old_ids[e.mapping[i]] for i in range(len(old_ids))}
        f = [e_orig[f[x]] for x in range(n)]
        current_old = tuple(sorted(set(e_orig.values())))
    core, old_ids = induced_substructure(structure, current_old)
    new_of = {old: new for new, old in enumerate(old_ids)}
    # f restricted to the core is an injective endo of a core, so a
    # permutation whose inverse is again an endomorphism; composing with the
    # inverse makes the retraction fix the core pointwise.
    g = {c: f[c] for c in old_ids}
    g_inv = {w: c for c, w in g.items()}
    retraction = Hom(structure, core, tuple(new_of[g_inv[f[x]]] for x in range(n)))
    return CoreResult(core, retraction, old_ids, was_core)


def _vertex_invariants(structure: FinStructure) -> list[tuple]:
    inv = [[] for _ in range(structure.size)]
    for name, arity in structure.signature.relations:
        counts = [[0] * arity for _ in range(structure.size)]
        for t in structure.relations[name]:
            for pos, x in enumerate(t):
                counts[x][pos] += 1
        for v in range(structure.size):
            inv[v].extend(counts[v])
    return [tuple(x) for x in inv]


def canonical_form(structure: FinStructure, bound: int = 10) -> bytes:
    """Canonical byte encoding: equal exactly for isomorphic structures.

    Minimizes a deterministic encoding over all domain permutations that
    respect the vertex invariant partition (any isomorphism preserves the
    invariants, so restricting to these permutations is sound).
    """
    n = structure.size
    if n > bound:
        raise TooLarge(f"canonical form limited to {bound} elements, got {n}")
    inv = _vertex_invariants(structure)
    blocks: dict[tuple, list[int]] = {}
    for v in range(n):
        blocks.setdefault(inv[v], []).append(v)
    ordered_blocks = sorted(blocks.items())
    profile = tuple((key, len(vs)) for key, vs in ordered_blocks)

    offsets = []
    start = 0
    for _, vs in ordered_blocks:
        offsets.append((vs, start))
        start += len(vs)

    names = structure.signature.names()
    best = None
    for arrangement in itertools.product(
        *[itertools.permutations(vs) for vs, _ in offsets]
    ):
        perm = [0] * n
        for (vs, off), arranged in zip(offsets, arrangement):
            for k, v in enumerate(arranged):
                perm[v] = off + k
        encoded = tuple(
            tuple(sorted(tuple(perm[x] for x in t) for t in structure.relations[name]))
            for name in names
        )
        if best is None or encoded < best:
            best = encoded
    payload = (tuple(structure.signature.relations), n, profile, best)
    return repr(payload).encode("utf-8")
