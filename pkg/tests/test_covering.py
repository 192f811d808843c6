import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holderkit.core import BallSpec, Point
from holderkit.covering import (
    BallFamily,
    Selection,
    dump_family,
    load_family,
    random_family,
    select_balls,
    verify_selection,
)


def brute_check(family, chosen, eps):
    """Pure-Python disjointness / enlarged-cover check with math.dist."""
    C, R = family.centers.tolist(), family.radii.tolist()
    disjoint = all(math.dist(C[a], C[b]) > R[a] + R[b] for i, a in enumerate(chosen) for b in chosen[i + 1:])
    covered = all(any(math.dist(C[y], C[k]) <= (2 + eps) * R[k] for k in chosen) for y in range(len(R)))
    return disjoint, covered


@pytest.fixture
def line_family():
    return BallFamily.from_balls([BallSpec(Point((0.0,)), 1.0), BallSpec(Point((1.5,)), 1.0),
                                  BallSpec(Point((10.0,)), 0.5)])


def test_select_line_example(line_family):
    sel = select_balls(line_family, 0.1)
    # [0.5, 2.5] meets [-1, 1]; [9.5, 10.5] is clear of it
    assert sel.chosen == (0, 2)
    rep = verify_selection(line_family, sel)
    assert rep.disjoint and rep.covered and rep.violations == []
    assert abs(1.5 - 0.0) <= (2 + 0.1) * 1.0


def test_single_and_identical_balls():
    assert select_balls(BallFamily([[0.0, 0.0]], [1.0]), 0.5).chosen == (0,)
    assert select_balls(BallFamily([[1.0], [1.0]], [0.3, 0.3]), 0.5).chosen == (0,)


def test_tampered_selection_reports_pair(line_family):
    rep = verify_selection(line_family, Selection((0, 1), 0.1))
    assert not rep.disjoint
    assert {"kind": "overlap", "pair": [0, 1]} in rep.violations


def test_incomplete_selection_is_uncovered(line_family):
    rep = verify_selection(line_family, Selection((0,), 0.1))
    assert rep.disjoint and not rep.covered
    assert {"kind": "uncovered", "index": 2} in rep.violations


def test_bad_indices_and_repeats(line_family):
    assert not verify_selection(line_family, Selection((0, 7), 0.1)).ok
    rep = verify_selection(line_family, Selection((0, 0, 2), 0.1))
    assert not rep.disjoint and rep.violations[0]["kind"] == "repeat"


def test_empty_family_vacuous():
    fam = BallFamily(np.zeros((0, 2)), np.zeros(0))
    sel = select_balls(fam, 0.1)
    assert sel.chosen == ()
    rep = verify_selection(fam, sel)
    assert rep.disjoint and rep.covered


def test_family_validation():
    with pytest.raises(ValueError):
        BallFamily([[0.0]], [0.0])
    with pytest.raises(ValueError):
        BallFamily([[0.0], [1.0]], [1.0])
    with pytest.raises(ValueError):
        BallFamily.from_balls([BallSpec((0.0,), 1.0), BallSpec((0.0, 1.0), 1.0)])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 120), st.sampled_from([0.01, 0.1, 1.0]))
def test_selection_matches_brute_force(seed, dim, size, eps):
    fam = random_family(np.random.default_rng(seed), size, dim)
    sel = select_balls(fam, eps)
    rep = verify_selection(fam, sel)
    assert (rep.disjoint, rep.covered) == (True, True)
    assert brute_check(fam, list(sel.chosen), eps) == (True, True)
    assert len(sel.chosen) == len(set(sel.chosen)) <= len(fam)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.sampled_from([0.01, 0.1, 1.0]))
def test_near_maximality_audit(seed, dim, eps):
    fam = random_family(np.random.default_rng(seed), 80, dim)
    sel = select_balls(fam, eps, audit=True)
    assert len(sel.audit) == len(sel.chosen) <= len(fam)
    chosen_so_far = []
    for step in sel.audit:
        # the audited candidate set is exactly the balls missing every earlier choice
        expected = [y for y in range(len(fam))
                    if all(math.dist(fam.centers[y], fam.centers[k]) > fam.radii[y] + fam.radii[k]
                           for k in chosen_so_far)]
        assert list(step.candidates) == expected
        assert fam.radii[step.chosen] * (1 + eps) >= fam.radii[list(step.candidates)].max()
        chosen_so_far.append(step.chosen)


def test_family_csv_round_trip(rng):
    fam = random_family(rng, 30, 3)
    back = load_family(dump_family(fam))
    assert np.array_equal(back.centers, fam.centers) and np.array_equal(back.radii, fam.radii)
    assert load_family(b"0,1\n2,0.5\n").ambient_dim == 1
    with pytest.raises(ValueError, match="row arity"):
        load_family(b"c0,r\n0,1\n1,2,3\n")


def test_selection_json_round_trip():
    sel = Selection((3, 1, 4), 0.25)
    assert Selection.from_json(sel.to_json()) == sel
    assert sel.to_dict() == {"epsilon": 0.25, "chosen": [3, 1, 4]}
