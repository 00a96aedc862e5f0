from fractions import Fraction

import pytest

from orbigenus.genus import cone_supertrace_series, sector_supertrace_series
from orbigenus.oracle import (
    StateCapError,
    free_state_series,
    modes_for_charges,
    zero_level_group_average,
)
from orbigenus.qseries import Windows
from orbigenus.symmetry import PhaseVector, grading_subgroup

from helpers import CUBIC, QUINTIC, TWO_SQUARES

F = Fraction


def test_mode_table():
    modes = modes_for_charges((F(1, 5),), 1)
    table = {(m.family, m.level): (m.charge, m.weight, m.bosonic) for m in modes}
    assert table[("b", 0)] == (F(1, 5), 0, True)
    assert table[("a", 1)] == (F(-1, 5), 1, True)
    assert table[("phi", 1)] == (F(-4, 5), 1, False)
    assert table[("psi", 0)] == (F(4, 5), 0, False)
    assert ("a", 0) not in table
    assert ("phi", 0) not in table


def test_free_states_single_half_charge():
    # q = 1/2, level 0: states are b-tower times optional psi; the q^0 slice
    # telescopes to 1 within any window
    s = free_state_series([F(1, 2)], 0, (-2, 2))
    assert s.rational_terms() == {(F(0), F(0)): F(1)}


def test_free_states_single_fifth_charge():
    s = free_state_series([F(1, 5)], 0, (0, Fraction(99, 100)))
    assert s.rational_terms() == {
        (F(0), F(0)): F(1),
        (F(0), F(1, 5)): F(1),
        (F(0), F(2, 5)): F(1),
        (F(0), F(3, 5)): F(1),
    }


def test_free_states_empty_potential():
    s = free_state_series([], 2, (-1, 1))
    assert s.rational_terms() == {(F(0), F(0)): F(1)}


@pytest.mark.parametrize(
    "charges", [(F(1, 2),), (F(1, 5),), (F(1, 4), F(1, 4))]
)
def test_free_states_match_cone_product(charges):
    windows = Windows.make(2, -3, 3)
    oracle = free_state_series(list(charges), 2, (-3, 3))
    product = cone_supertrace_series(charges, windows)
    assert oracle.rational_terms() == product.rational_terms()


def test_state_cap():
    with pytest.raises(StateCapError):
        free_state_series([F(1, 5)] * 5, 3, (-40, 40), cap=1000)


def test_zero_level_two_squares_parity_filter():
    g = grading_subgroup(TWO_SQUARES)
    s = zero_level_group_average(TWO_SQUARES, g, (0, 2))
    terms = s.rational_terms()
    # only even total occupancy survives; odd y-levels cancel
    assert terms[(F(0), F(0))] == 1
    assert (F(0), F(1, 2)) not in terms
    assert (F(0), F(1)) not in terms  # +4 bosonic/fermion-pair states, -4 mixed


def test_zero_level_quintic_single_mode_filtered():
    g = grading_subgroup(QUINTIC)
    s = zero_level_group_average(QUINTIC, g, (0, 1))
    terms = s.rational_terms()
    assert (F(0), F(1, 5)) not in terms  # single mode pairs to 1/5, filtered out
    assert terms[(F(0), F(1))] == 101


def test_zero_level_trivial_group_matches_free_states():
    from orbigenus.symmetry import SymmetryGroup

    # lattice membership is unconstrained for the trivial group
    g = SymmetryGroup.trivial(2)
    s = zero_level_group_average(TWO_SQUARES, g, (0, 3))
    free = free_state_series([F(1, 2), F(1, 2)], 0, (0, 3))
    assert s.rational_terms() == free.rational_terms()


@pytest.mark.parametrize(
    "potential,name",
    [(TWO_SQUARES, "two_squares"), (CUBIC, "cubic"), (QUINTIC, "quintic")],
)
def test_zero_level_matches_untwisted_sector(potential, name):
    group = grading_subgroup(potential)
    ymax = 3
    zero = PhaseVector.canonical([0] * potential.dimension)
    sector = sector_supertrace_series(potential, group, zero, Windows.make(1, 0, ymax))
    oracle = zero_level_group_average(potential, group, (0, ymax))
    sector_q0 = {
        key: val for key, val in sector.rational_terms().items() if key[0] == 0
    }
    assert sector_q0 == oracle.rational_terms()
