import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from umlab.errors import BaseMismatchError, InputError
from umlab.genlab import gen_equivalence, gen_multiset, gen_qo
from umlab.qo import (
    OMEGA,
    Omega,
    OmegaMultiset,
    QuasiOrder,
    cf_le,
    closure,
    einj_equivalent,
    equiv_inj_le,
    es_classes,
    has_incomparable_pair,
    inj_le,
    iterate_levels,
    level_respecting_witness,
    verify_witness,
    wqo_inj_le,
)

EQ1 = closure(1, [])
EQ2 = closure(2, [])
CHAIN3 = closure(3, [(0, 1), (1, 2)])


def ms(base, mults):
    return OmegaMultiset.of(base, mults)


# ---------------------------------------------------------------------------
# Quasi-order construction.
# ---------------------------------------------------------------------------

def test_closure_examples():
    assert EQ2.le == ((True, False), (False, True))
    assert CHAIN3.le[0][2]
    with pytest.raises(InputError):
        closure(2, [(0, 5)])


@settings(max_examples=60)
@given(
    st.integers(min_value=1, max_value=5),
    st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=10),
)
def test_closure_idempotent(n, pairs):
    pairs = [(i % n, j % n) for i, j in pairs]
    once = closure(n, pairs)
    le_pairs = [(i, j) for i in range(n) for j in range(n) if once.le[i][j]]
    assert closure(n, le_pairs) == once


def test_quasiorder_rejects_broken_relations():
    with pytest.raises(InputError):
        QuasiOrder(2, ((False, False), (False, True)))  # not reflexive
    with pytest.raises(InputError):
        QuasiOrder(3, ((True, True, False), (False, True, True), (False, False, True)))


def test_es_classes():
    assert es_classes(closure(3, [])) == ((0,), (1,), (2,))
    total = closure(3, [(i, j) for i in range(3) for j in range(3)])
    assert es_classes(total) == ((0, 1, 2),)
    collapsed = closure(3, [(0, 1), (1, 2), (2, 1)])
    assert es_classes(collapsed) == ((0,), (1, 2))


def test_has_incomparable_pair():
    assert has_incomparable_pair(CHAIN3) == (False, None)
    assert has_incomparable_pair(EQ2) == (True, (0, 1))


def test_incomparable_agrees_with_complement_scan():
    # independent oracle: scan the complement of the comparability relation
    rng = random.Random(4)
    for trial in range(300):
        base = gen_qo(rng.getrandbits(64), rng.randint(1, 6), F(rng.randint(0, 4), 10))
        found, pair = has_incomparable_pair(base)
        comparable = {
            (i, j)
            for i in range(base.n)
            for j in range(base.n)
            if base.le[i][j] or base.le[j][i]
        }
        complement = [
            (i, j)
            for i in range(base.n)
            for j in range(i + 1, base.n)
            if (i, j) not in comparable
        ]
        assert found == bool(complement)
        if found:
            assert pair == min(complement)


# ---------------------------------------------------------------------------
# cf / inj examples from first principles.
# ---------------------------------------------------------------------------

def test_cf_examples():
    a = ms(CHAIN3, {2: OMEGA})
    b = ms(CHAIN3, {1: OMEGA})
    assert cf_le(a, a)
    assert not cf_le(a, b)
    assert cf_le(ms(CHAIN3, {0: OMEGA, 1: 3}), b)
    x = ms(EQ2, {0: 1})
    y = ms(EQ2, {1: 1})
    assert not cf_le(x, y)


def test_cf_base_mismatch():
    with pytest.raises(BaseMismatchError):
        cf_le(ms(EQ1, {0: 1}), ms(EQ2, {0: 1}))
    with pytest.raises(InputError):
        cf_le(OmegaMultiset.of(EQ1, {}), ms(EQ1, {0: 1}))


def test_inj_pigeonhole_and_omega():
    ok, witness = inj_le(ms(EQ1, {0: 2}), ms(EQ1, {0: 1}))
    assert not ok and witness is None
    ok, witness = inj_le(ms(EQ1, {0: 3}), ms(EQ1, {0: OMEGA}))
    assert ok and verify_witness(ms(EQ1, {0: 3}), ms(EQ1, {0: OMEGA}), witness)
    ok, _ = inj_le(ms(EQ1, {0: OMEGA}), ms(EQ1, {0: 5}))
    assert not ok


def test_inj_witness_respects_order():
    a = ms(CHAIN3, {0: 2, 1: 1})
    b = ms(CHAIN3, {1: 2, 2: OMEGA})
    ok, witness = inj_le(a, b)
    assert ok
    assert verify_witness(a, b, witness)
    assert all(CHAIN3.le[x][y] for x, y, _ in witness.entries)


# ---------------------------------------------------------------------------
# The truncation oracle for inj_le (finite-total left side): replace every
# omega capacity by (total demand + support size) and exhaustively search
# distributions of each source over its allowed targets.
# ---------------------------------------------------------------------------

def truncation_inj_le(a: OmegaMultiset, b: OmegaMultiset) -> bool:
    assert not a.omega_elements(), "oracle is sound for finite-total left sides"
    bound = sum(m for _, m in a.finite_entries()) + len(a.support)
    sources = list(a.finite_entries())
    targets = [y for y, _ in b.entries]
    caps0 = tuple(
        bound if isinstance(m, Omega) else m for _, m in b.entries
    )
    le = a.base.le
    memo: dict[tuple[int, tuple[int, ...]], bool] = {}

    def search(i: int, caps: tuple[int, ...]) -> bool:
        if i == len(sources):
            return True
        key = (i, caps)
        if key in memo:
            return memo[key]
        x, demand = sources[i]
        slots = [t for t, y in enumerate(targets) if le[x][y]]

        def place(j: int, remaining: int, caps_now: tuple[int, ...]) -> bool:
            if remaining == 0:
                return search(i + 1, caps_now)
            if j == len(slots):
                return False
            t = slots[j]
            for take in range(min(remaining, caps_now[t]), -1, -1):
                nxt = caps_now[:t] + (caps_now[t] - take,) + caps_now[t + 1:]
                if place(j + 1, remaining - take, nxt):
                    return True
            return False

        result = place(0, demand, caps)
        memo[key] = result
        return result

    return search(0, caps0)


def test_inj_flow_agrees_with_truncation_oracle():
    rng = random.Random(20260810)
    checked = 0
    while checked < 2000:
        n = rng.randint(1, 6)
        base = gen_qo(rng.getrandbits(64), n, F(rng.randint(0, 5), 10))
        a = gen_multiset(rng.getrandbits(64), base, 6, F(0))
        b = gen_multiset(rng.getrandbits(64), base, 6, F(3, 10))
        assert inj_le(a, b)[0] == truncation_inj_le(a, b)
        checked += 1


# ---------------------------------------------------------------------------
# Level iteration.
# ---------------------------------------------------------------------------

def test_iterate_examples():
    trace = iterate_levels(ms(EQ1, {0: OMEGA}))
    assert trace.levels == (frozenset({0}),)
    assert trace.stabilized_at == 0 and trace.core == {0}

    trace = iterate_levels(ms(EQ1, {0: 3}))
    assert trace.levels == (frozenset({0}), frozenset())
    assert trace.stabilized_at == 1 and trace.core == frozenset()

    trace = iterate_levels(ms(CHAIN3, {0: 2, 1: OMEGA, 2: 5}))
    assert trace.levels == (frozenset({0, 1, 2}), frozenset({0, 1}))
    assert trace.stabilized_at == 1 and trace.core == {0, 1}


def test_einj_examples():
    a = ms(EQ2, {0: OMEGA})
    assert einj_equivalent(a, a)
    b = ms(EQ2, {0: OMEGA, 1: 1})
    assert not einj_equivalent(a, b)


def test_einj_matches_flow_on_mixed_instances():
    rng = random.Random(5)
    for trial in range(600):
        n = rng.randint(1, 6)
        base = gen_qo(rng.getrandbits(64), n, F(rng.randint(0, 5), 10))
        a = gen_multiset(rng.getrandbits(64), base, 6, F(35, 100),
                         require_omega=trial % 2 == 0)
        b = gen_multiset(rng.getrandbits(64), base, 6, F(35, 100))
        assert einj_equivalent(a, b) == (inj_le(a, b)[0] and inj_le(b, a)[0])


def test_wqo_examples():
    assert wqo_inj_le(ms(EQ1, {0: OMEGA}), ms(EQ1, {0: OMEGA}))
    assert not wqo_inj_le(ms(EQ2, {0: 1, 1: 1}), ms(EQ2, {0: OMEGA}))


def test_equiv_counting():
    a = ms(EQ2, {0: 2, 1: OMEGA})
    b = ms(EQ2, {0: 2, 1: OMEGA})
    assert equiv_inj_le(a, b) and equiv_inj_le(b, a)
    assert not equiv_inj_le(ms(EQ1, {0: 3}), ms(EQ1, {0: 2}))
    with pytest.raises(InputError):
        equiv_inj_le(ms(CHAIN3, {0: 1}), ms(CHAIN3, {0: 1}))


def test_equiv_matches_flow_on_random_equivalences():
    rng = random.Random(6)
    for _ in range(400):
        n = rng.randint(1, 6)
        base = gen_equivalence(rng.getrandbits(64), n, max_blocks=max(1, n - 1))
        a = gen_multiset(rng.getrandbits(64), base, 6, F(3, 10))
        b = gen_multiset(rng.getrandbits(64), base, 6, F(3, 10))
        assert equiv_inj_le(a, b) == inj_le(a, b)[0]


def test_inj_implies_cf_monotonicity():
    rng = random.Random(8)
    for trial in range(500):
        n = rng.randint(1, 6)
        base = gen_qo(rng.getrandbits(64), n, F(rng.randint(0, 5), 10))
        a = gen_multiset(rng.getrandbits(64), base, 6, F(35, 100))
        b = gen_multiset(rng.getrandbits(64), base, 6, F(35, 100))
        if inj_le(a, b)[0]:
            assert cf_le(a, b)


def test_level_respecting_witness_mutual_pair():
    base = closure(4, [(0, 1), (1, 0), (2, 3)])
    a = ms(base, {0: 2, 2: 1, 3: OMEGA})
    b = ms(base, {1: 2, 2: 1, 3: OMEGA})
    assert inj_le(a, b)[0] and inj_le(b, a)[0]
    witness = level_respecting_witness(a, b)
    assert witness is not None
    assert verify_witness(a, b, witness)
    trace_a, trace_b = iterate_levels(a), iterate_levels(b)
    for x, y, _ in witness.entries:
        assert (x in trace_a.core) == (y in trace_b.core)


def test_omega_arithmetic():
    assert OMEGA == OMEGA and not OMEGA < OMEGA
    assert 5 < OMEGA and OMEGA > 5 and OMEGA >= OMEGA
    assert OMEGA + 3 is OMEGA and 3 + OMEGA is OMEGA
    assert not isinstance(3, Omega)
