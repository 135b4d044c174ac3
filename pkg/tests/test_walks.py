import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sawsle import walks


def test_validate_shortest_legal_walk():
    assert walks.validate_walk([(0, 0), (0, 1), (1, 1)])


def test_validate_rejects_real_axis_after_origin():
    assert not walks.validate_walk([(0, 0), (1, 0)])


def test_validate_rejects_revisit():
    assert not walks.validate_walk([(0, 0), (0, 1), (0, 0)])


def test_validate_rejects_wrong_start_and_bad_steps():
    assert not walks.validate_walk([(1, 1), (1, 2)])
    assert not walks.validate_walk([(0, 0), (1, 2)])
    assert not walks.validate_walk([(0, 0), (1, 1)])


def test_validate_rejects_malformed_input():
    assert not walks.validate_walk([])
    assert not walks.validate_walk([[0, 0, 0]])
    assert not walks.validate_walk("nonsense")
    assert not walks.validate_walk([(0.0, 0.0), (0.0, 0.5)])


def test_validate_accepts_origin_only():
    assert walks.validate_walk([(0, 0)])


# Independent re-statement of the four invariants, kept deliberately naive.
def _reference_valid(sites) -> bool:
    if len(sites) < 1 or tuple(sites[0]) != (0, 0):
        return False
    seen = set()
    for i, (x, y) in enumerate(sites):
        if (x, y) in seen:
            return False
        seen.add((x, y))
        if i > 0:
            px, py = sites[i - 1]
            if abs(x - px) + abs(y - py) != 1:
                return False
            if y < 1:
                return False
    return True


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(list(walks.STEPS)), max_size=12))
def test_validate_matches_reference_on_step_strings(steps):
    sites = [(0, 0)]
    for dx, dy in steps:
        sites.append((sites[-1][0] + dx, sites[-1][1] + dy))
    assert walks.validate_walk(sites) == _reference_valid(sites)


def test_enumeration_counts_small():
    assert len(walks.enumerate_half_plane_saws(1)) == 1
    assert len(walks.enumerate_half_plane_saws(2)) == 3
    assert len(walks.enumerate_half_plane_saws(3)) == 7


def test_enumeration_counts_frozen():
    # regression values produced by this exhaustive enumerator
    assert [len(walks.enumerate_half_plane_saws(n)) for n in (4, 5, 6)] == [19, 49, 131]


def test_enumeration_single_step_walk():
    (only,) = walks.enumerate_half_plane_saws(1)
    assert np.array_equal(only, [[0, 0], [0, 1]])


def test_enumeration_rejects_above_cap_and_negative():
    with pytest.raises(ValueError):
        walks.enumerate_half_plane_saws(walks.ENUMERATION_CAP + 1)
    with pytest.raises(ValueError):
        walks.enumerate_half_plane_saws(-1)


@pytest.mark.parametrize("n", range(1, 8))
def test_enumeration_walks_all_validate(n):
    for w in walks.enumerate_half_plane_saws(n):
        assert walks.validate_walk(w)


def test_enumeration_monotone_counts():
    counts = [len(walks.enumerate_half_plane_saws(n)) for n in range(1, 9)]
    assert all(b > a for a, b in zip(counts, counts[1:]))


@pytest.mark.parametrize("n", range(1, 8))
def test_enumeration_reflection_symmetry(n):
    saws = walks.enumerate_half_plane_saws(n)
    keys = {walks.walk_key(w) for w in saws}
    for w in saws:
        mirrored = w.copy()
        mirrored[:, 0] *= -1
        assert walks.walk_key(mirrored) in keys


def test_walk_uniqueness():
    saws = walks.enumerate_half_plane_saws(6)
    assert len({walks.walk_key(w) for w in saws}) == len(saws)


def test_occupancy_index():
    w = [(0, 0), (0, 1), (1, 1)]
    idx = walks.occupancy_index(w)
    assert idx == {(0, 0): 0, (0, 1): 1, (1, 1): 2}


def test_walk_format_round_trip():
    for w in walks.enumerate_half_plane_saws(5):
        text = walks.format_walk(w)
        assert text.splitlines()[0] == "sawsle-walk v1 N=5"
        back = walks.parse_walk(text)
        assert np.array_equal(w, back)
        assert walks.format_walk(back) == text


def test_walk_format_negative_coordinates():
    w = np.array([[0, 0], [0, 1], [-1, 1]])
    assert np.array_equal(walks.parse_walk(walks.format_walk(w)), w)


def test_parse_walk_errors():
    with pytest.raises(ValueError):
        walks.parse_walk("bogus header\n0 0\n")
    with pytest.raises(ValueError):
        walks.parse_walk("sawsle-walk v1 N=2\n0 0\n0 1\n")  # truncated
    with pytest.raises(ValueError):
        walks.parse_walk("sawsle-walk v1 N=1\n0 0\n0 1 7\n")
