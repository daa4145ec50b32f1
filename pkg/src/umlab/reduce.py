"""The finitary reduction constructions, with brute-force counterparts.

Every transformation here turns a combinatorial object (rooted tree,
graph, list of spaces, distance subset) into a finite metric space, and
is paired by the verification campaigns with the preserve/reflect law
it must satisfy against brute-force oracles.

Fresh points added by a construction get identifiers starting with "*";
that prefix is reserved and rejected for user-supplied point ids.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .balltree import (
    BallTree,
    canonical_code,
    canonical_space,
    canonicalize,
    embeds,
    from_ball_tree,
    internal,
    leaf,
    leaves,
    realized_of_tree,
    to_ball_tree,
)
from .errors import InputError
from .metric import DistanceSet, FiniteMetric
from .rationals import format_rational


@dataclass(frozen=True)
class RootedTree:
    """Rooted tree as a parent array: parents[0] is None, parents[i] < i."""

    parents: tuple[int | None, ...]

    def __post_init__(self) -> None:
        if not self.parents or self.parents[0] is not None:
            raise InputError("node 0 must be the root (parent null)")
        for i, p in enumerate(self.parents[1:], start=1):
            if not isinstance(p, int) or not 0 <= p < i:
                raise InputError(f"parent of node {i} must be an earlier node, got {p!r}")

    @property
    def n(self) -> int:
        return len(self.parents)

    def children(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for i, p in enumerate(self.parents[1:], start=1):
            out[p].append(i)
        return out

    def depths(self) -> list[int]:
        d = [0] * self.n
        for i, p in enumerate(self.parents[1:], start=1):
            d[i] = d[p] + 1
        return d

    def depth(self) -> int:
        return max(self.depths())

    def ranks(self) -> list[int]:
        """Well-founded rank of every node: leaves 0, parents 1 + max child."""
        kids = self.children()
        rk = [0] * self.n
        for i in range(self.n - 1, -1, -1):
            rk[i] = 1 + max((rk[c] for c in kids[i]), default=-1)
        return rk

    def rank(self) -> int:
        return self.ranks()[0]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: no loops, edges stored with i < j."""

    n: int
    edges: frozenset[tuple[int, int]]

    @classmethod
    def from_edges(cls, n: int, pairs) -> "Graph":
        if n < 1:
            raise InputError("graph needs at least one vertex")
        edges = set()
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise InputError(f"edge ({a},{b}) out of range for {n} vertices")
            if a == b:
                raise InputError(f"loop at vertex {a}")
            edges.add((min(a, b), max(a, b)))
        return cls(n, frozenset(edges))

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges


def check_decreasing(radii) -> tuple[Fraction, ...]:
    radii = tuple(Fraction(r) for r in radii)
    if not radii or any(r <= 0 for r in radii):
        raise InputError("need a nonempty sequence of positive distances")
    if any(nxt >= cur for cur, nxt in zip(radii, radii[1:])):
        raise InputError("distance sequence must be strictly decreasing")
    return radii


# ---------------------------------------------------------------------------
# Rooted tree isomorphism / embeddability, canonical and brute force.
# ---------------------------------------------------------------------------

def _ahu(t: RootedTree) -> tuple:
    kids = t.children()

    def code(i: int) -> tuple:
        return tuple(sorted(code(c) for c in kids[i]))

    return code(0)


def rooted_tree_iso(g: RootedTree, h: RootedTree) -> bool:
    """Root-preserving isomorphism, decided by canonical codes."""
    return _ahu(g) == _ahu(h)


def rooted_tree_embeds(g: RootedTree, h: RootedTree) -> bool:
    """Root-preserving, parent-preserving injective map from g into h.

    Decided by recursive bipartite matching of children.
    """
    gk, hk = g.children(), h.children()
    memo: dict[tuple[int, int], bool] = {}

    def can(u: int, v: int) -> bool:
        key = (u, v)
        if key in memo:
            return memo[key]
        cu, cv = gk[u], hk[v]
        if len(cu) > len(cv):
            memo[key] = False
            return False
        match_of: list[int | None] = [None] * len(cv)

        def augment(xi: int, seen: list[bool]) -> bool:
            for wi in range(len(cv)):
                if seen[wi] or not can(cu[xi], cv[wi]):
                    continue
                seen[wi] = True
                if match_of[wi] is None or augment(match_of[wi], seen):
                    match_of[wi] = xi
                    return True
            return False

        ok = all(augment(xi, [False] * len(cv)) for xi in range(len(cu)))
        memo[key] = ok
        return ok

    return can(0, 0)


def brute_rooted_iso(g: RootedTree, h: RootedTree) -> bool:
    """Oracle: search all root-preserving bijections.

    A total injective parent-preserving map between equal-sized trees is
    automatically an isomorphism.
    """
    return g.n == h.n and _brute_tree_injection(g, h)


def brute_rooted_embeds(g: RootedTree, h: RootedTree) -> bool:
    """Oracle: search all root-preserving parent-preserving injections."""
    return g.n <= h.n and _brute_tree_injection(g, h)


def _brute_tree_injection(g: RootedTree, h: RootedTree) -> bool:
    hk = h.children()
    image: dict[int, int] = {0: 0}
    used = [False] * h.n
    used[0] = True

    def extend(u: int) -> bool:
        # node indices are ordered parents-first, so image[parent] exists
        if u == g.n:
            return True
        pu = image[g.parents[u]]
        for v in hk[pu]:
            if not used[v]:
                used[v] = True
                image[u] = v
                if extend(u + 1):
                    return True
                del image[u]
                used[v] = False
        return False

    return extend(1) if g.n > 1 else True


# ---------------------------------------------------------------------------
# Tree-to-space constructions.
# ---------------------------------------------------------------------------

def tree_ultrametric(t: RootedTree, radii) -> BallTree:
    """The space on the nodes of t with d(s, u) = radii[depth of their
    deepest common ancestor]; radii must be strictly decreasing.

    A node is a strict ancestor of another exactly when their distance
    equals the radius at its own depth.
    """
    radii = check_decreasing(radii)
    depths = t.depths()
    if len(radii) < t.depth() + 1:
        raise InputError(
            f"need at least {t.depth() + 1} radii for a tree of depth {t.depth()}"
        )
    if t.n == 1:
        return leaf("0")
    anc = _ancestor_table(t)

    def lca_depth(i: int, j: int) -> int:
        common = anc[i] & anc[j]
        return max(depths[k] for k in common)

    rows = [
        [Fraction(0) if i == j else radii[lca_depth(i, j)] for j in range(t.n)]
        for i in range(t.n)
    ]
    return to_ball_tree(FiniteMetric(t.n, tuple(tuple(r) for r in rows)),
                        [str(i) for i in range(t.n)])


def _ancestor_table(t: RootedTree) -> list[set[int]]:
    anc: list[set[int]] = [set() for _ in range(t.n)]
    anc[0] = {0}
    for i in range(1, t.n):
        anc[i] = anc[t.parents[i]] | {i}
    return anc


def rank_extend(t: RootedTree) -> tuple[RootedTree, list[int]]:
    """Append one fresh child under each leaf; return (tree, node ranks).

    The appended nodes come last; every original node's rank goes up by
    exactly one.
    """
    kids = t.children()
    parents = list(t.parents)
    added = []
    for i in range(t.n):
        if not kids[i]:
            added.append(i)
            parents.append(i)
    extended = RootedTree(tuple(parents))
    return extended, extended.ranks()


def rank_ultrametric(t: RootedTree, radii) -> BallTree:
    """Encode tree ranks as distances: extend t with one child per leaf,
    then d(s, u) = radii[rank of their deepest common ancestor].

    radii must be strictly increasing from radii[0] = 0, with more
    entries than rank(t) + 1.  The smallest positive distance radii[1]
    occurs exactly between an original leaf and its appended child.
    """
    radii = tuple(Fraction(r) for r in radii)
    if not radii or radii[0] != 0:
        raise InputError("rank radii must start at 0")
    if any(lo >= hi for lo, hi in zip(radii, radii[1:])):
        raise InputError("rank radii must be strictly increasing")
    if len(radii) <= t.rank() + 1:
        raise InputError(
            f"need more than {t.rank() + 1} radii for a tree of rank {t.rank()}"
        )
    extended, ranks = rank_extend(t)
    anc = _ancestor_table(extended)
    depths = extended.depths()

    def lca(i: int, j: int) -> int:
        common = anc[i] & anc[j]
        return max(common, key=lambda k: depths[k])

    n = extended.n
    rows = [
        [Fraction(0) if i == j else radii[ranks[lca(i, j)]] for j in range(n)]
        for i in range(n)
    ]
    ids = [str(i) if i < t.n else f"*{i}" for i in range(n)]
    return to_ball_tree(FiniteMetric(n, tuple(tuple(r) for r in rows)), ids)


# ---------------------------------------------------------------------------
# Space surgery: gluing, tails, unions, decompositions.
# ---------------------------------------------------------------------------

def _tree_matrix_ids(t: BallTree) -> tuple[FiniteMetric, list[str]]:
    return from_ball_tree(t), leaves(t)


def glue_canonical(u: BallTree, ds: DistanceSet, rbar: Fraction) -> BallTree:
    """Glue u to the canonical space on ds minus its least positive value,
    with cross distances max(rbar, value).

    Requires rbar in ds and rbar above every distance of u, and the
    distances of u drawn from ds.  The result realizes every value of
    ds except possibly the removed one (which u itself may realize).
    """
    rbar = Fraction(rbar)
    if len(ds) < 2:
        raise InputError("glue needs a distance set with at least 2 values")
    if rbar not in ds:
        raise InputError("rbar must belong to the distance set")
    realized = realized_of_tree(u)
    if any(v not in ds for v in realized):
        raise InputError("distances of the space must lie in the distance set")
    if realized.positive and max(realized.positive) >= rbar:
        raise InputError("rbar must exceed every distance of the space")
    removed = ds.positive[0]
    tail_values = [v for v in ds.values if v != removed]
    m, ids = _tree_matrix_ids(u)
    n = m.n + len(tail_values)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(m.n):
        for j in range(m.n):
            rows[i][j] = m.rows[i][j]
    for ti, v in enumerate(tail_values):
        for tj, w in enumerate(tail_values):
            if v != w:
                rows[m.n + ti][m.n + tj] = max(v, w)
        for i in range(m.n):
            rows[i][m.n + ti] = rows[m.n + ti][i] = max(rbar, v)
    all_ids = ids + [f"*{format_rational(v)}" for v in tail_values]
    return to_ball_tree(FiniteMetric(n, tuple(tuple(r) for r in rows)), all_ids)


def add_tail(x: BallTree, ds: DistanceSet) -> BallTree:
    """Disjoint union of x with the canonical space on ds minus its
    maximum, all cross distances equal to that maximum.

    The output realizes every value of ds.
    """
    if len(ds) < 2:
        raise InputError("tail needs a distance set with at least 2 values")
    top = ds.positive[-1]
    realized = realized_of_tree(x)
    if any(v not in ds for v in realized):
        raise InputError("distances of the space must lie in the distance set")
    tail_values = list(ds.values[:-1])
    m, ids = _tree_matrix_ids(x)
    n = m.n + len(tail_values)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(m.n):
        for j in range(m.n):
            rows[i][j] = m.rows[i][j]
    for ti, v in enumerate(tail_values):
        for tj, w in enumerate(tail_values):
            if v != w:
                rows[m.n + ti][m.n + tj] = max(v, w)
        for i in range(m.n):
            rows[i][m.n + ti] = rows[m.n + ti][i] = top
    all_ids = ids + [f"*{format_rational(v)}" for v in tail_values]
    return to_ball_tree(FiniteMetric(n, tuple(tuple(r) for r in rows)), all_ids)


def union_at_distance(spaces, r: Fraction) -> BallTree:
    """Disjoint union with all cross distances r; a singleton list is
    returned unchanged.  Every distance inside a component must be < r.
    """
    spaces = list(spaces)
    r = Fraction(r)
    if not spaces:
        raise InputError("need at least one space")
    if r <= 0:
        raise InputError("cross distance must be positive")
    for k, s in enumerate(spaces):
        realized = realized_of_tree(s)
        if realized.positive and max(realized.positive) >= r:
            raise InputError(f"component {k} realizes a distance >= {format_rational(r)}")
    if len(spaces) == 1:
        return canonicalize(spaces[0])
    kids = []
    for k, s in enumerate(spaces):
        prefixed = _prefix_points(s, f"{k}:")
        kids.append(prefixed)
    return canonicalize(internal(r, kids))


def _prefix_points(t: BallTree, prefix: str) -> BallTree:
    if t.is_leaf:
        return leaf(prefix + (t.point or ""))
    return BallTree(t.label, None, tuple(_prefix_points(c, prefix) for c in t.children))


def decompose_space(x: BallTree, ds: DistanceSet) -> list[BallTree]:
    """Split x into its maximal balls of diameter below the top distance
    and mark each with a fresh point at the second-largest distance.

    Inverse direction of the union construction: embeddability (resp.
    isometry) of spaces corresponds to injective (resp. perfect)
    matching of the decomposed lists.
    """
    if len(ds) < 3:
        raise InputError("decompose needs a distance set with at least 3 values")
    top = ds.positive[-1]
    second = ds.positive[-2]
    realized = realized_of_tree(x)
    if any(v not in ds for v in realized):
        raise InputError("distances of the space must lie in the distance set")
    if not x.is_leaf and x.label == top:
        classes = list(x.children)
    else:
        classes = [x]
    out = []
    for k, cls in enumerate(classes):
        m, ids = _tree_matrix_ids(cls)
        n = m.n + 1
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(m.n):
            for j in range(m.n):
                rows[i][j] = m.rows[i][j]
        for i in range(m.n):
            rows[i][m.n] = rows[m.n][i] = second
        out.append(
            to_ball_tree(FiniteMetric(n, tuple(tuple(r) for r in rows)), ids + [f"*{k}"])
        )
    return out


# ---------------------------------------------------------------------------
# Graphs and subsets.
# ---------------------------------------------------------------------------

def is_trivial_graph(g: Graph) -> bool:
    """Trivial for the metric encoding: a single vertex, no edges at all,
    or a complete clique."""
    if g.n < 2:
        return True
    return len(g.edges) in (0, g.n * (g.n - 1) // 2)


def graph_metric(g: Graph, r: Fraction, rp: Fraction) -> FiniteMetric:
    """Distance r between adjacent vertices, rp between non-adjacent ones.

    Requires 0 < r < rp <= 2r, which makes the result a metric (though
    generally not an ultrametric).
    """
    r, rp = Fraction(r), Fraction(rp)
    if not 0 < r < rp or rp > 2 * r:
        raise InputError("need 0 < r < rp <= 2r")
    rows = [
        [
            Fraction(0) if i == j else (r if g.adjacent(i, j) else rp)
            for j in range(g.n)
        ]
        for i in range(g.n)
    ]
    return FiniteMetric(g.n, tuple(tuple(row) for row in rows))


def brute_graph_iso(g: Graph, h: Graph) -> bool:
    """Oracle: search all vertex bijections preserving adjacency."""
    if g.n != h.n or len(g.edges) != len(h.edges):
        return False
    if sorted(_degrees(g)) != sorted(_degrees(h)):
        return False
    for perm in itertools.permutations(range(h.n)):
        if all(
            g.adjacent(i, j) == h.adjacent(perm[i], perm[j])
            for i in range(g.n)
            for j in range(i + 1, g.n)
        ):
            return True
    return False


def _degrees(g: Graph) -> list[int]:
    deg = [0] * g.n
    for a, b in g.edges:
        deg[a] += 1
        deg[b] += 1
    return deg


def brute_graph_embeds(g: Graph, h: Graph) -> bool:
    """Oracle: search all injections realizing g as an induced subgraph."""
    if g.n > h.n:
        return False
    for image in itertools.permutations(range(h.n), g.n):
        if all(
            g.adjacent(i, j) == h.adjacent(image[i], image[j])
            for i in range(g.n)
            for j in range(i + 1, g.n)
        ):
            return True
    return False


def subset_space(values) -> BallTree:
    """The canonical space on a set of positive distances (plus 0).

    Set inclusion corresponds exactly to isometric embeddability of the
    resulting spaces.
    """
    vals = [Fraction(v) for v in values]
    if any(v <= 0 for v in vals):
        raise InputError("subset values must be positive")
    return canonical_space(DistanceSet.from_values(vals))


# ---------------------------------------------------------------------------
# List-level matchers used by the preserve/reflect laws.
# ---------------------------------------------------------------------------

def list_embeds(xs, ys) -> bool:
    """Injective matching of xs into ys where each pair must embed."""
    xs, ys = list(xs), list(ys)
    if len(xs) > len(ys):
        return False
    edges = [[embeds(x, y) for y in ys] for x in xs]
    match_of: list[int | None] = [None] * len(ys)

    def augment(xi: int, seen: list[bool]) -> bool:
        for yi in range(len(ys)):
            if seen[yi] or not edges[xi][yi]:
                continue
            seen[yi] = True
            if match_of[yi] is None or augment(match_of[yi], seen):
                match_of[yi] = xi
                return True
        return False

    return all(augment(xi, [False] * len(ys)) for xi in range(len(xs)))


def list_isometric(xs, ys) -> bool:
    """Perfect matching under isometry: equal multisets of canonical codes."""
    xs, ys = list(xs), list(ys)
    return sorted(canonical_code(x) for x in xs) == sorted(
        canonical_code(y) for y in ys
    )
