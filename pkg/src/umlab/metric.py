"""Finite metric and ultrametric spaces with exact rational distances.

A space is a square matrix of Fractions.  `validate` checks the metric
and ultrametric axioms and reports every violated inequality;
`brute_isometric` / `brute_embeds` are the permutation-search oracles
that everything else is verified against.  Both oracles carry a hard
size bound and refuse larger inputs instead of hanging.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, SizeBoundError
from .rationals import format_rational

DEFAULT_BRUTE_BOUND = 8


@dataclass(frozen=True)
class DistanceSet:
    """A strictly increasing tuple of distances, always starting at 0."""

    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.values or self.values[0] != 0:
            raise InputError("distance set must start at 0")
        for lo, hi in zip(self.values, self.values[1:]):
            if lo >= hi:
                raise InputError("distance set must be strictly increasing")

    @classmethod
    def from_values(cls, values) -> "DistanceSet":
        """Build a distance set from arbitrary values, adding 0."""
        vals = set(Fraction(v) for v in values)
        vals.add(Fraction(0))
        if any(v < 0 for v in vals):
            raise InputError("distances must be nonnegative")
        return cls(tuple(sorted(vals)))

    @property
    def positive(self) -> tuple[Fraction, ...]:
        return self.values[1:]

    def __contains__(self, value) -> bool:
        return value in self.values

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __str__(self) -> str:
        return "{" + ", ".join(format_rational(v) for v in self.values) + "}"


@dataclass(frozen=True)
class Violation:
    """One failed axiom instance: indices plus the two compared sides."""

    kind: str  # "symmetry" | "diagonal" | "positivity" | "triangle" | "ultrametric"
    indices: tuple[int, ...]
    lhs: Fraction
    rhs: Fraction

    def describe(self) -> str:
        ix = ",".join(str(i) for i in self.indices)
        return (
            f"{self.kind} violated at ({ix}): "
            f"{format_rational(self.lhs)} > {format_rational(self.rhs)}"
            if self.kind in ("triangle", "ultrametric")
            else f"{self.kind} violated at ({ix})"
        )


@dataclass(frozen=True)
class ValidationReport:
    is_metric: bool
    is_ultrametric: bool
    violations: tuple[Violation, ...]
    realized: DistanceSet

    def ultrametric_witness(self) -> tuple[int, int, int] | None:
        for v in self.violations:
            if v.kind == "ultrametric" and len(v.indices) == 3:
                return v.indices  # type: ignore[return-value]
        return None


@dataclass(frozen=True)
class FiniteMetric:
    """A validated finite metric space (n points, symmetric exact matrix)."""

    n: int
    rows: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_rows(cls, rows, *, require_metric: bool = True) -> "FiniteMetric":
        rows = _coerce_matrix(rows)
        if require_metric:
            report = validate(rows)
            if not report.is_metric:
                raise InputError(
                    "not a metric: " + report.violations[0].describe()
                )
        return cls(len(rows), rows)

    def distance(self, i: int, j: int) -> Fraction:
        return self.rows[i][j]


def _coerce_matrix(rows) -> tuple[tuple[Fraction, ...], ...]:
    """Check shape and entry types; negative entries are an input error."""
    rows = tuple(tuple(Fraction(v) for v in row) for row in rows)
    n = len(rows)
    if n == 0:
        raise InputError("matrix must have at least one point")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise InputError(f"matrix row {i} has length {len(row)}, expected {n}")
        for j, v in enumerate(row):
            if v < 0:
                raise InputError(f"matrix[{i}][{j}] is negative")
    return rows


def validate(rows) -> ValidationReport:
    """Check the metric and ultrametric axioms on a candidate matrix.

    Reports symmetry / zero-diagonal / positivity / triangle failures
    (any of which make `is_metric` false) and strong-triangle failures
    (which only affect `is_ultrametric`).  `realized` is the set of
    entries together with 0 regardless of validity.
    """
    rows = _coerce_matrix(rows)
    n = len(rows)
    violations: list[Violation] = []
    for i in range(n):
        if rows[i][i] != 0:
            violations.append(Violation("diagonal", (i, i), rows[i][i], Fraction(0)))
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                violations.append(Violation("symmetry", (i, j), rows[i][j], rows[j][i]))
            elif rows[i][j] == 0:
                violations.append(Violation("positivity", (i, j), rows[i][j], Fraction(0)))
    metric_ok = not violations
    if metric_ok:
        for i, j, k in itertools.permutations(range(n), 3):
            if i < k and rows[i][k] > rows[i][j] + rows[j][k]:
                violations.append(
                    Violation("triangle", (i, j, k), rows[i][k], rows[i][j] + rows[j][k])
                )
        metric_ok = not violations
    ultra_ok = metric_ok
    if metric_ok:
        for i, j, k in itertools.permutations(range(n), 3):
            if i < k and rows[i][k] > max(rows[i][j], rows[j][k]):
                violations.append(
                    Violation(
                        "ultrametric", (i, j, k), rows[i][k], max(rows[i][j], rows[j][k])
                    )
                )
        ultra_ok = not any(v.kind == "ultrametric" for v in violations)
    realized = DistanceSet.from_values(v for row in rows for v in row)
    return ValidationReport(metric_ok, ultra_ok, tuple(violations), realized)


def realized_distances(m: FiniteMetric) -> DistanceSet:
    """The set of distances realized by the space, always containing 0."""
    return DistanceSet.from_values(v for row in m.rows for v in row)


def _point_signature(m: FiniteMetric, i: int) -> tuple[Fraction, ...]:
    return tuple(sorted(m.rows[i]))


def brute_isometric(a: FiniteMetric, b: FiniteMetric, *, bound: int = DEFAULT_BRUTE_BOUND) -> bool:
    """Exhaustive search for a distance-preserving bijection.

    Works for arbitrary metrics, not only ultrametrics.  Refuses inputs
    with more than `bound` points.
    """
    if a.n > bound or b.n > bound:
        raise SizeBoundError(f"brute_isometric refuses spaces above {bound} points")
    if a.n != b.n:
        return False
    if sorted(_point_signature(a, i) for i in range(a.n)) != sorted(
        _point_signature(b, j) for j in range(b.n)
    ):
        return False
    return _search_injection(a, b, surjective=True)


def brute_embeds(a: FiniteMetric, b: FiniteMetric, *, bound: int = DEFAULT_BRUTE_BOUND) -> bool:
    """Exhaustive search for a distance-preserving injection of a into b."""
    if a.n > bound or b.n > bound:
        raise SizeBoundError(f"brute_embeds refuses spaces above {bound} points")
    if a.n > b.n:
        return False
    return _search_injection(a, b, surjective=False)


def _search_injection(a: FiniteMetric, b: FiniteMetric, *, surjective: bool) -> bool:
    image: list[int] = []
    used = [False] * b.n

    def extend(i: int) -> bool:
        if i == a.n:
            return True
        for j in range(b.n):
            if used[j]:
                continue
            if all(a.rows[i][k] == b.rows[j][image[k]] for k in range(i)):
                used[j] = True
                image.append(j)
                if extend(i + 1):
                    return True
                image.pop()
                used[j] = False
        return False

    if surjective and a.n != b.n:
        return False
    return extend(0)


def is_well_spaced(ds: DistanceSet) -> bool:
    """Whether every consecutive pair r < r' of positive values has 2r < r'."""
    pos = ds.positive
    return all(2 * lo < hi for lo, hi in zip(pos, pos[1:]))


@dataclass(frozen=True)
class TriangleAudit:
    all_isosceles: bool
    witness: tuple[Fraction, Fraction, Fraction] | None


def triangle_audit(ds: DistanceSet) -> TriangleAudit:
    """Check whether every triangle buildable from the set is isosceles.

    Enumerates all multisets {r1 <= r2 <= r3} of positive values
    satisfying the triangle inequality r3 <= r1 + r2 and demands
    r2 = r3 (the two largest sides coincide).  Returns the
    lexicographically least violating triple otherwise.
    """
    if len(ds) < 2:
        raise InputError("triangle audit needs at least one positive distance")
    pos = ds.positive
    witness: tuple[Fraction, Fraction, Fraction] | None = None
    for r1, r2, r3 in itertools.combinations_with_replacement(pos, 3):
        if r3 <= r1 + r2 and r2 != r3:
            witness = (r1, r2, r3)
            break
    return TriangleAudit(witness is None, witness)
