import random
from fractions import Fraction as F

import pytest

from umlab.balltree import (
    canonical_code,
    canonical_space,
    canonicalize,
    embeds,
    from_ball_tree,
    internal,
    isometric,
    leaf,
    realized_of_tree,
    to_ball_tree,
)
from umlab.errors import InputError, NotUltrametricError
from umlab.genlab import gen_ball_tree, mutate_pair
from umlab.metric import DistanceSet, FiniteMetric, brute_embeds, brute_isometric


def test_single_point_round_trip():
    t = to_ball_tree(FiniteMetric.from_rows([[F(0)]]))
    assert t.is_leaf
    assert from_ball_tree(t).rows == ((F(0),),)


def test_two_point_tree_is_forced():
    t = to_ball_tree(FiniteMetric.from_rows([[F(0), F(1)], [F(1), F(0)]]))
    assert not t.is_leaf and t.label == F(1)
    assert all(c.is_leaf for c in t.children)
    assert from_ball_tree(t).rows == ((F(0), F(1)), (F(1), F(0)))


def test_three_point_comb():
    rows = [[F(0), F(1), F(2)], [F(1), F(0), F(2)], [F(2), F(2), F(0)]]
    t = to_ball_tree(FiniteMetric.from_rows(rows))
    expected = canonical_space(DistanceSet.from_values([F(1), F(2)]))
    assert canonical_code(t) == canonical_code(expected)


def test_to_ball_tree_rejects_non_ultrametric_with_witness():
    rows = [[F(0), F(1), F(2)], [F(1), F(0), F(1)], [F(2), F(1), F(0)]]
    with pytest.raises(NotUltrametricError) as err:
        to_ball_tree(FiniteMetric.from_rows(rows))
    assert err.value.witness == (0, 1, 2)


def test_internal_node_invariants():
    with pytest.raises(InputError):
        internal(F(1), [leaf("a")])  # needs two children
    with pytest.raises(InputError):
        internal(F(1), [internal(F(1), [leaf(), leaf()]), leaf()])  # label order
    with pytest.raises(InputError):
        internal(F(0), [leaf(), leaf()])


def test_code_invariant_under_relabeling_and_reordering():
    inner = internal(F(1), [leaf("a"), leaf("b")])
    t1 = internal(F(2), [inner, leaf("c")])
    t2 = internal(F(2), [leaf("z"), internal(F(1), [leaf("y"), leaf("x")])])
    assert canonical_code(t1) == canonical_code(t2)
    assert isometric(t1, t2)


def test_codes_distinguish_labels():
    a = internal(F(1), [leaf(), leaf()])
    b = internal(F(2), [leaf(), leaf()])
    assert canonical_code(a) != canonical_code(b)
    assert not isometric(a, b)
    # different realized distances are an isometry invariant
    assert realized_of_tree(a) != realized_of_tree(b)


def test_canonical_space_examples():
    assert canonical_space(DistanceSet.from_values([])).is_leaf
    two = canonical_space(DistanceSet.from_values([F(1)]))
    assert canonical_code(two) == canonical_code(internal(F(1), [leaf(), leaf()]))
    comb = canonical_space(DistanceSet.from_values([F(1), F(2)]))
    assert realized_of_tree(comb).values == (F(0), F(1), F(2))


def test_embeds_examples():
    assert embeds(leaf("x"), internal(F(3), [leaf(), leaf()]))
    assert not embeds(
        internal(F(1), [leaf(), leaf()]), internal(F(2), [leaf(), leaf()])
    )
    nested = internal(F(2), [internal(F(1), [leaf(), leaf()]), leaf()])
    assert embeds(internal(F(1), [leaf(), leaf()]), nested)
    assert embeds(internal(F(2), [leaf(), leaf()]), nested)
    assert not embeds(internal(F(2), [leaf(), leaf(), leaf()]), nested)


def test_round_trip_preserves_code_randomized():
    rng = random.Random(99)
    ds = DistanceSet.from_values([F(1, 2), F(1), F(3)])
    for _ in range(200):
        t = gen_ball_tree(rng.getrandbits(64), ds, 7)
        again = to_ball_tree(from_ball_tree(t))
        assert canonical_code(again) == canonical_code(t)
        assert canonicalize(t) == again or canonical_code(canonicalize(t)) == canonical_code(again)


def test_code_equality_matches_brute_force_randomized():
    rng = random.Random(7)
    ds = DistanceSet.from_values([F(1), F(2), F(7, 2)])
    for _ in range(300):
        a = gen_ball_tree(rng.getrandbits(64), ds, 6)
        a, b = mutate_pair(rng.getrandbits(64), a)
        fast = canonical_code(a) == canonical_code(b)
        assert fast == brute_isometric(from_ball_tree(a), from_ball_tree(b))


def test_embeds_matches_brute_force_randomized():
    rng = random.Random(13)
    ds = DistanceSet.from_values([F(1), F(2), F(5)])
    for _ in range(300):
        a = gen_ball_tree(rng.getrandbits(64), ds, 5)
        b = gen_ball_tree(rng.getrandbits(64), ds, 7)
        assert embeds(a, b) == brute_embeds(from_ball_tree(a), from_ball_tree(b))
