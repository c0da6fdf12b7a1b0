from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigmafield.measures import (AtomicMeasure, CantorMeasure, DensityMeasure, LebesgueMeasure,
                                 MeasureDomainError, Partition, Region, common_refinement, cumulative,
                                 intersection_measure, measure_from_config, measure_of, refine)

L = LebesgueMeasure()


def iv(a, b):
    return Region.interval(a, b)


def test_lebesgue_half():
    assert measure_of(L, iv(0, 0.5)) == 0.5


@pytest.mark.parametrize("r, expected", [((0, Fraction(1, 3)), 0.5), ((Fraction(1, 3), Fraction(2, 3)), 0.0)])
def test_cantor_thirds(r, expected):
    assert measure_of(CantorMeasure(20), iv(*r)) == expected


def test_intersection_examples():
    assert intersection_measure(L, iv(0, 0.5), iv(0.25, 0.75)) == 0.25
    a = iv(0.1, 0.6)
    assert intersection_measure(L, a, a) == measure_of(L, a)
    comb = AtomicMeasure.dirac_comb(-10, 10)
    assert intersection_measure(comb, Region.from_atoms([0, 1, 2]), Region.from_atoms([2, 3])) == 1.0


@pytest.mark.parametrize("m, x, expected", [(CantorMeasure(), 1, 1.0), (CantorMeasure(), 0.5, 0.5),
                                            (L, 0.3, 0.3)])
def test_cumulative_examples(m, x, expected):
    assert cumulative(m, x) == pytest.approx(expected, abs=1e-15)


def test_cantor_staircase_values():
    m = CantorMeasure(30)
    # 1/4 = 0.020202..._3 maps to 0.010101..._2 = 1/3
    assert m.cumulative(Fraction(1, 4)) == pytest.approx(1 / 3, abs=1e-9)
    assert m.cumulative(Fraction(2, 9)) == 0.25
    assert m.cumulative(Fraction(7, 9)) == 0.75
    # float inputs snap to the nearest triadic-friendly rational
    assert m.cumulative(0.25) == pytest.approx(1 / 3, abs=1e-9)


def test_refine_uniform():
    p = refine(Partition.uniform(0, 1, 2), 2)
    assert len(p) == 4
    assert np.allclose(p.masses(L), 0.25)
    assert p.mesh(L) <= Partition.uniform(0, 1, 2).mesh(L)


def test_refine_cantor_splits_at_inverse_cumulative():
    m = CantorMeasure(30)
    p = refine(Partition.uniform(0, 1, 1), 2, m)
    assert np.allclose(p.masses(m), 0.5, atol=1e-12)
    cut = p.cells[0].bounds[1]
    # any point of the middle gap [1/3, 2/3] is a valid inverse of 0.5
    assert 1 / 3 - 1e-9 <= float(cut) <= 2 / 3 + 1e-9


def test_partition_rejects_overlap_and_gaps():
    with pytest.raises(ValueError):
        Partition((iv(0, 0.6), iv(0.5, 1)), iv(0, 1))
    with pytest.raises(ValueError):
        Partition((iv(0, 0.4), iv(0.5, 1)), iv(0, 1))


def test_outside_domain_raises():
    with pytest.raises(MeasureDomainError):
        measure_of(L, iv(0.5, 2))


def test_common_refinement_membership():
    cells, member = common_refinement([iv(0, 0.5), iv(0.25, 0.75)])
    total = [sum(measure_of(L, c) for k, c in enumerate(cells) if member[j, k]) for j in range(2)]
    assert total == pytest.approx([0.5, 0.5])
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            assert cells[i].isdisjoint(cells[j])


def test_density_measure_and_config():
    m = measure_from_config({"kind": "density", "density": "power:1"})
    # unnormalized density x
    assert measure_of(m, iv(0, 0.5)) == pytest.approx(0.125, abs=1e-12)
    d = DensityMeasure(lambda x: 3 * x**2, (0, 1))
    assert measure_of(d, iv(0, 0.5)) == pytest.approx(0.125, abs=1e-10)
    with pytest.raises(ValueError, match="measure.kind"):
        measure_from_config({"kind": "nope"})


def test_region_algebra():
    u = iv(0, 0.3) | iv(0.2, 0.5)
    assert u == iv(0, 0.5)
    assert (iv(0, 1).difference(iv(0.25, 0.5))).length() == pytest.approx(0.75)
    assert iv(0, 0.5).isdisjoint(iv(0.5, 1))


intervals = st.tuples(st.floats(0, 1), st.floats(0, 1)).map(lambda p: iv(min(p), max(p)))


@given(intervals, intervals)
def test_inclusion_exclusion(a, b):
    lhs = measure_of(L, a | b)
    rhs = measure_of(L, a) + measure_of(L, b) - measure_of(L, a & b)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@given(intervals, intervals)
def test_monotone_and_symmetric(a, b):
    assert measure_of(L, a & b) <= min(measure_of(L, a), measure_of(L, b)) + 1e-15
    assert intersection_measure(L, a, b) == intersection_measure(L, b, a)


@given(st.integers(1, 5), st.integers(2, 4))
def test_refine_preserves_total_cantor(n, k):
    m = CantorMeasure(30)
    p = refine(Partition.uniform(0, 1, n), k, m)
    assert p.masses(m).sum() == pytest.approx(1.0, abs=1e-9)
