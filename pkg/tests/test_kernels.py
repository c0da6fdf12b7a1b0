import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigmafield.fbm import HurstModel, fbm_kernel
from sigmafield.kernels import (KernelEvaluationError, NotRepresentableError, SignedMeasureElement, beta_kernel,
                                check_pd, gram, membership_bound, rkhs_norm_sq, signed_measure_eval,
                                signed_measure_norm_sq)
from sigmafield.measures import CantorMeasure, LebesgueMeasure, Region
from sigmafield.shannon import SINC

L = LebesgueMeasure()
TWO = [Region.interval(0, 0.5), Region.interval(0.25, 0.75)]


def test_beta_gram_two_regions():
    G = gram(beta_kernel(L), TWO)
    assert np.array_equal(G.entries, [[0.5, 0.25], [0.25, 0.5]])


def test_sinc_and_fbm_grams():
    assert np.array_equal(gram(SINC, [0, 1, 2]).entries, np.eye(3))
    assert np.allclose(gram(fbm_kernel(HurstModel(0.5)), [1, 2]).entries, [[1, 1], [1, 2]], atol=0)


def test_gram_csv_has_labels():
    text = gram(beta_kernel(L), TWO).to_csv()
    assert text.splitlines()[0] == "item,[0,0.5),[0.25,0.75)"
    assert "\r" not in text


def test_check_pd_examples():
    r = check_pd(np.eye(3))
    assert r.is_pd and r.min_eigenvalue == pytest.approx(1.0)
    r = check_pd(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert not r.is_pd and r.min_eigenvalue == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        check_pd(np.array([[1.0, np.nan], [np.nan, 1.0]]))


def test_rkhs_norm_examples():
    assert rkhs_norm_sq(np.eye(2), [1, 1]) == 2
    assert rkhs_norm_sq(np.eye(2), [0, 0]) == 0
    assert rkhs_norm_sq(gram(beta_kernel(L), TWO), [1, -1]) == pytest.approx(0.5)


def test_membership_examples():
    G = gram(beta_kernel(L), TWO + [Region.interval(0.5, 1)])
    assert membership_bound(G, G.entries[1]) == pytest.approx(G.entries[1, 1])
    assert membership_bound(G, [0, 0, 0]) == 0
    assert membership_bound(gram(SINC, [0, 1, 2]), [1, 1, 0]) == pytest.approx(2.0)


def test_membership_not_representable():
    G = np.array([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(NotRepresentableError) as info:
        membership_bound(G, [1.0, 0.0])
    assert info.value.residual > 0


def test_gram_reports_failing_pair():
    def bad(a, b):
        if a == 2 or b == 2:
            raise ZeroDivisionError("boom")
        return 1.0
    with pytest.raises(KernelEvaluationError, match="2"):
        gram(bad, [0, 1, 2])


def test_signed_measure_examples():
    one = SignedMeasureElement(lambda x: np.ones_like(x), L)
    assert signed_measure_eval(one, Region.interval(0, 0.5)) == pytest.approx(0.5, abs=1e-12)
    assert signed_measure_norm_sq(one) == pytest.approx(1.0, abs=1e-12)
    ident = SignedMeasureElement(lambda x: x, L)
    assert signed_measure_eval(ident, Region.interval(0, 1)) == pytest.approx(0.5, abs=1e-9)
    assert signed_measure_norm_sq(ident) == pytest.approx(1 / 3, abs=1e-7)


def test_cantor_staircase_unit_density():
    e = SignedMeasureElement(lambda x: np.ones_like(x), CantorMeasure(30))
    assert signed_measure_eval(e, Region.interval(0, 1)) == pytest.approx(1.0, abs=1e-12)
    assert signed_measure_norm_sq(e) == pytest.approx(1.0, abs=1e-6)


regions = st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=12).map(
    lambda ps: [Region.interval(min(p), max(p)) for p in ps])


@given(regions)
def test_beta_gram_is_psd(regs):
    r = check_pd(gram(beta_kernel(L), regs))
    assert r.min_eigenvalue >= -1e-10 * max(r.scale, 1.0)


@given(regions, st.lists(st.floats(-3, 3), min_size=12, max_size=12))
def test_norm_nonnegative(regs, coeffs):
    G = gram(beta_kernel(L), regs)
    assert rkhs_norm_sq(G, coeffs[:G.n]) >= -1e-10


@given(regions)
def test_membership_bound_grows_with_sample(regs):
    e = SignedMeasureElement(lambda x: x, L)
    vals = np.array([e.evaluate(r) for r in regs])
    G = gram(beta_kernel(L), regs)
    full = membership_bound(G, vals, tol=1e-6)
    k = max(1, G.n // 2)
    part = membership_bound(G.entries[:k, :k], vals[:k], tol=1e-6)
    assert part <= full * (1 + 1e-8) + 1e-10
    assert full <= e.norm_sq() * (1 + 1e-6) + 1e-10
