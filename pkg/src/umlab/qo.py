"""Finite quasi-orders and jump relations on omega-multisets.

An omega-multiset assigns each carrier element a multiplicity in
{1, 2, 3, ...} or omega; it stands in for an infinite sequence over the
carrier, listed up to reordering (legitimate because the two jump
relations below quantify over positions symmetrically).

Omega arithmetic, stated once and used everywhere:
  * finite + omega = omega;
  * an omega demand can only be met by an omega capacity;
  * an omega capacity absorbs any number of omega demands as well as
    any finite flow (an infinite set splits into infinitely many
    disjoint infinite subsets).

`cf_le` ignores multiplicities entirely (support-only).  `inj_le`
decides injective matchability by a small max-flow plus the omega rule
above, and returns an explicit witness.  `einj_equivalent`,
`wqo_inj_le` and `equiv_inj_le` are independently derived procedures
that must agree with the flow decision; the agreement is what the test
campaigns verify.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Union

from .errors import BaseMismatchError, InputError


class Omega:
    """The multiplicity omega; a singleton, larger than every integer."""

    _instance: "Omega | None" = None

    def __new__(cls) -> "Omega":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "omega"

    def __eq__(self, other) -> bool:
        return isinstance(other, Omega)

    def __hash__(self) -> int:
        return hash("omega")

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return isinstance(other, Omega)

    def __gt__(self, other) -> bool:
        return not isinstance(other, Omega)

    def __ge__(self, other) -> bool:
        return True

    def __add__(self, other):
        return self

    def __radd__(self, other):
        return self


OMEGA = Omega()
Mult = Union[int, Omega]


def check_mult(m: Mult) -> Mult:
    if isinstance(m, Omega):
        return m
    if isinstance(m, int) and not isinstance(m, bool) and m >= 1:
        return m
    raise InputError(f"multiplicity must be a positive integer or omega, got {m!r}")


@dataclass(frozen=True)
class QuasiOrder:
    """A reflexive-transitive boolean relation on {0, ..., n-1}."""

    n: int
    le: tuple[tuple[bool, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 1 or len(self.le) != self.n or any(len(r) != self.n for r in self.le):
            raise InputError("relation matrix must be n x n with n >= 1")
        for i in range(self.n):
            if not self.le[i][i]:
                raise InputError(f"relation is not reflexive at {i}")
        for i in range(self.n):
            for j in range(self.n):
                if self.le[i][j]:
                    for k in range(self.n):
                        if self.le[j][k] and not self.le[i][k]:
                            raise InputError(
                                f"relation is not transitive at ({i},{j},{k})"
                            )

    def is_symmetric(self) -> bool:
        return all(
            self.le[i][j] == self.le[j][i] for i in range(self.n) for j in range(self.n)
        )


def closure(n: int, pairs) -> QuasiOrder:
    """Reflexive-transitive closure of the given ordered pairs."""
    if n < 1:
        raise InputError("carrier size must be >= 1")
    le = [[i == j for j in range(n)] for i in range(n)]
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"pair ({i},{j}) out of range for carrier {n}")
        le[i][j] = True
    for k in range(n):
        for i in range(n):
            if le[i][k]:
                row_k = le[k]
                row_i = le[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return QuasiOrder(n, tuple(tuple(row) for row in le))


def es_classes(s: QuasiOrder) -> tuple[tuple[int, ...], ...]:
    """Partition into classes of mutual comparability, ordered by least member."""
    seen = [False] * s.n
    classes: list[tuple[int, ...]] = []
    for i in range(s.n):
        if seen[i]:
            continue
        cls = [j for j in range(s.n) if s.le[i][j] and s.le[j][i]]
        for j in cls:
            seen[j] = True
        classes.append(tuple(cls))
    return tuple(classes)


def has_incomparable_pair(s: QuasiOrder) -> tuple[bool, tuple[int, int] | None]:
    """The least pair (x, y) with neither x <= y nor y <= x, if any."""
    for i in range(s.n):
        for j in range(i + 1, s.n):
            if not s.le[i][j] and not s.le[j][i]:
                return True, (i, j)
    return False, None


@dataclass(frozen=True)
class OmegaMultiset:
    """Finite-support multiset over a quasi-order's carrier."""

    base: QuasiOrder
    entries: tuple[tuple[int, Mult], ...]  # sorted by element, no repeats

    @classmethod
    def of(cls, base: QuasiOrder, mults) -> "OmegaMultiset":
        items = dict(mults)
        entries = []
        for x in sorted(items):
            if not (0 <= x < base.n):
                raise InputError(f"element {x} out of range for carrier {base.n}")
            entries.append((x, check_mult(items[x])))
        return cls(base, tuple(entries))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(x for x, _ in self.entries)

    def mult(self, x: int) -> Mult | None:
        for y, m in self.entries:
            if y == x:
                return m
        return None

    def omega_elements(self) -> tuple[int, ...]:
        return tuple(x for x, m in self.entries if isinstance(m, Omega))

    def finite_entries(self) -> tuple[tuple[int, int], ...]:
        return tuple((x, m) for x, m in self.entries if not isinstance(m, Omega))

    def restrict(self, keep) -> "OmegaMultiset":
        keep = set(keep)
        return OmegaMultiset(self.base, tuple(e for e in self.entries if e[0] in keep))

    def class_mass(self, element: int) -> Mult:
        """Total multiplicity of the mutual-comparability class of `element`.

        The class is taken in the base order; elements of the class
        missing from the support contribute nothing.  Returns 0 when
        nothing of the class is present.
        """
        le = self.base.le
        total: Mult = 0
        for x, m in self.entries:
            if le[x][element] and le[element][x]:
                total = total + m  # omega absorbs
        return total


def _check_pair(a: OmegaMultiset, b: OmegaMultiset) -> None:
    if a.base is not b.base and a.base != b.base:
        raise BaseMismatchError("multisets are over different base quasi-orders")
    if not a.entries or not b.entries:
        raise InputError("jump operations need nonempty support")


def cf_le(a: OmegaMultiset, b: OmegaMultiset) -> bool:
    """Every support element of a is below some support element of b.

    Multiplicities are deliberately ignored: repeating entries (even
    infinitely often) never changes this relation.
    """
    _check_pair(a, b)
    le = a.base.le
    return all(any(le[x][y] for y in b.support) for x in a.support)


@dataclass(frozen=True)
class Witness:
    """An explicit injective assignment: (source, target, amount) triples."""

    entries: tuple[tuple[int, int, Mult], ...]


def verify_witness(a: OmegaMultiset, b: OmegaMultiset, w: Witness) -> bool:
    """Row sums match source multiplicities; columns stay within capacity;
    every used pair respects the base order.  Omega capacity absorbs any
    combination; omega demand must be covered by omega assignments."""
    le = a.base.le
    if any(not le[x][y] for x, y, _ in w.entries):
        return False
    if any(x not in a.support or y not in b.support for x, y, _ in w.entries):
        return False
    for x, m in a.entries:
        parts = [amt for (src, _, amt) in w.entries if src == x]
        if isinstance(m, Omega):
            if not any(isinstance(p, Omega) for p in parts):
                return False
        else:
            if any(isinstance(p, Omega) for p in parts) or sum(parts) != m:
                return False
    for y, m in b.entries:
        parts = [amt for (_, dst, amt) in w.entries if dst == y]
        if isinstance(m, Omega):
            continue
        if any(isinstance(p, Omega) for p in parts) or sum(parts) > m:
            return False
    return all(amt == OMEGA or amt >= 1 for _, _, amt in w.entries)


def _max_flow(demands, caps: dict[int, int], allowed) -> tuple[int, dict[tuple[int, int], int]]:
    """Max flow from multiset sources into capacitated targets.

    `demands` is a sequence of (source element, finite demand); `caps`
    maps target elements to finite capacities; `allowed(x, y)` tells
    whether x may flow into y.  Plain BFS augmenting-path flow on an
    explicit residual graph; instances are tiny, so asymptotics are
    irrelevant.
    """
    src, snk = ("s",), ("t",)
    residual: dict[tuple, dict[tuple, int]] = {src: {}, snk: {}}

    def arc(u: tuple, v: tuple, cap: int) -> None:
        residual.setdefault(u, {})[v] = cap
        residual.setdefault(v, {}).setdefault(u, 0)

    for x, d in demands:
        arc(src, ("x", x), d)
    for y, c in caps.items():
        arc(("y", y), snk, c)
    for x, _ in demands:
        for y in caps:
            if allowed(x, y):
                arc(("x", x), ("y", y), sum(d for _, d in demands))

    total = 0
    while True:
        parent: dict[tuple, tuple] = {src: src}
        queue = deque([src])
        while queue and snk not in parent:
            u = queue.popleft()
            for v, cap in residual[u].items():
                if cap > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if snk not in parent:
            break
        path = [snk]
        while path[-1] != src:
            path.append(parent[path[-1]])
        path.reverse()
        bottleneck = min(residual[u][v] for u, v in zip(path, path[1:]))
        for u, v in zip(path, path[1:]):
            residual[u][v] -= bottleneck
            residual[v][u] += bottleneck
        total += bottleneck
    flow = {}
    for x, _ in demands:
        for y in caps:
            sent = residual.get(("y", y), {}).get(("x", x), 0)
            if allowed(x, y) and sent > 0:
                flow[(x, y)] = sent
    return total, flow


def inj_le(a: OmegaMultiset, b: OmegaMultiset) -> tuple[bool, Witness | None]:
    """Injective matchability of positions, with an explicit witness.

    Omega-multiplicity sources each need some omega-multiplicity target
    above them (targets are shareable); the finite part must saturate a
    max flow into the capacities of b, where omega capacities are
    unbounded for finite flow.
    """
    _check_pair(a, b)
    le = a.base.le
    omega_targets = b.omega_elements()
    witness_entries: list[tuple[int, int, Mult]] = []
    for x in a.omega_elements():
        target = next((y for y in omega_targets if le[x][y]), None)
        if target is None:
            return False, None
        witness_entries.append((x, target, OMEGA))
    finite = list(a.finite_entries())
    total_demand = sum(m for _, m in finite)
    caps = {
        y: (total_demand if isinstance(m, Omega) else m) for y, m in b.entries
    }
    value, flow = _max_flow(finite, caps, lambda x, y: le[x][y])
    if value < total_demand:
        return False, None
    witness_entries.extend((x, y, amt) for (x, y), amt in sorted(flow.items()))
    return True, Witness(tuple(witness_entries))


@dataclass(frozen=True)
class IterationTrace:
    """The decreasing level sets of the jump iteration.

    `levels` holds the distinct sets only; the next iterate would repeat
    the last entry.  `stabilized_at` is the first index whose successor
    equals it; `core` is the stable value.
    """

    levels: tuple[frozenset[int], ...]
    stabilized_at: int
    core: frozenset[int]


def iterate_levels(a: OmegaMultiset) -> IterationTrace:
    """Iteratively discard elements with only finitely many successors.

    A support element survives a step iff some element above it (within
    the current level) carries multiplicity omega: over finite support,
    infinitely many successors force an omega multiplicity.
    """
    le = a.base.le
    omegas = set(a.omega_elements())
    levels = [frozenset(a.support)]
    while True:
        cur = levels[-1]
        nxt = frozenset(
            x for x in cur if any(y in omegas and le[x][y] for y in cur)
        )
        if nxt == cur:
            break
        levels.append(nxt)
    return IterationTrace(tuple(levels), len(levels) - 1, levels[-1])


def einj_equivalent(a: OmegaMultiset, b: OmegaMultiset) -> bool:
    """Mutual injective matchability, decided by the level characterization.

    Four conditions: equal stabilization indices; for every element
    outside either core, equal class masses on both sides; and mutual
    cofinality of the cores.
    """
    _check_pair(a, b)
    le = a.base.le
    ta = iterate_levels(a)
    tb = iterate_levels(b)
    if ta.stabilized_at != tb.stabilized_at:
        return False
    for x in a.support:
        if x not in ta.core and a.class_mass(x) != b.class_mass(x):
            return False
    for y in b.support:
        if y not in tb.core and b.class_mass(y) != a.class_mass(y):
            return False
    if not all(any(le[x][y] for y in tb.core) for x in ta.core):
        return False
    if not all(any(le[y][x] for x in ta.core) for y in tb.core):
        return False
    return True


def wqo_inj_le(a: OmegaMultiset, b: OmegaMultiset) -> bool:
    """Injective matchability via the finite/infinite upper-cone split.

    Elements of b with no omega multiplicity above them form the finite
    fringe F; everything of a dominated by the complement K is
    absorbable there, and what remains must match injectively into F.
    Every finite quasi-order is a wqo, so the split always applies.
    """
    _check_pair(a, b)
    le = a.base.le
    omegas_b = set(b.omega_elements())
    fringe = [
        y for y in b.support if not any(z in omegas_b and le[y][z] for z in b.support)
    ]
    k_part = [y for y in b.support if y not in fringe]
    absorbed = {x for x in a.support if any(le[x][y] for y in k_part)}
    if any(x not in absorbed for x in a.omega_elements()):
        return False
    remaining = [(x, m) for x, m in a.finite_entries() if x not in absorbed]
    demand = sum(m for _, m in remaining)
    caps = {y: m for y, m in b.entries if y in fringe}
    assert all(not isinstance(c, Omega) for c in caps.values())
    value, _ = _max_flow(remaining, caps, lambda x, y: le[x][y])
    return value == demand


def equiv_inj_le(a: OmegaMultiset, b: OmegaMultiset) -> bool:
    """Classwise counting decision, valid only over equivalence relations."""
    _check_pair(a, b)
    if not a.base.is_symmetric():
        raise InputError("equiv_inj_le needs a symmetric (equivalence) base")
    for x in a.support:
        mass_a = a.class_mass(x)
        mass_b = b.class_mass(x)
        if isinstance(mass_a, Omega):
            if not isinstance(mass_b, Omega):
                return False
        elif not isinstance(mass_b, Omega) and mass_a > mass_b:
            return False
    return True


def level_respecting_witness(a: OmegaMultiset, b: OmegaMultiset) -> Witness | None:
    """For mutually matchable multisets, a witness that maps each level
    stratum of a into the same stratum of b and core to core.

    Built stratum by stratum with separate flows; returns None when the
    multisets are not mutually matchable (or some stratum flow fails,
    which the campaigns treat as a falsification).
    """
    _check_pair(a, b)
    ok_ab, _ = inj_le(a, b)
    ok_ba, _ = inj_le(b, a)
    if not (ok_ab and ok_ba):
        return None
    ta = iterate_levels(a)
    tb = iterate_levels(b)
    if ta.stabilized_at != tb.stabilized_at:
        return None
    entries: list[tuple[int, int, Mult]] = []
    # Strata below the stabilization index are nonempty on both sides
    # (the levels decrease strictly until they stabilize).
    for k in range(ta.stabilized_at):
        stratum_a = ta.levels[k] - ta.levels[k + 1]
        stratum_b = tb.levels[k] - tb.levels[k + 1]
        ok, witness = inj_le(a.restrict(stratum_a), b.restrict(stratum_b))
        if not ok:
            return None
        entries.extend(witness.entries)
    if ta.core:
        if not tb.core:
            return None
        ok, witness = inj_le(a.restrict(ta.core), b.restrict(tb.core))
        if not ok:
            return None
        entries.extend(witness.entries)
    return Witness(tuple(entries))
