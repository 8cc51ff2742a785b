import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from dtnoise.covariance import (CovField2D, NoiseModel, SeparableNoise, coarse_convergence,
                                coarse_limit, cov_1d, cov_2d, load_noise_table,
                                post_transform_cov, verify_cov_decay)
from dtnoise.errors import (InvalidParam, InvalidSubband, NotIntegrable, NotSeparable)
from dtnoise.spectra import WaveletFamily, dual_spectrum, make_spectrum
from dtnoise.xcorr import gamma_pair_quad, gamma_provider

SH = WaveletFamily.shannon(2)
MEY3 = WaveletFamily.meyer(3)
WHITE = NoiseModel.white(1.0)
EXP = NoiseModel.exponential(1.0, 1.0)

# Shannon band 1, exponential noise A = alpha = 1, lags 1..3, from
# oracles.shannon_exp_cov_ref (frequency-domain route).
SH_EXP_COV = {
    0: (-0.058207978167476374, 0.01893573512697674, -0.023764931328826552),
    2: (-0.5417350380273576, 0.10407187174923593, -0.19133452144721122),
    6: (-1.2662332586562846, 0.0022751656428930895, -0.421899518376624),
}

def _id(v):
    return v.label if hasattr(v, "label") else str(v).replace(" ", "")



def test_frozen_exp_oracle():
    for j, vals in SH_EXP_COV.items():
        got = [oracles.shannon_exp_cov_ref(j, l) for l in (1, 2, 3)]
        np.testing.assert_allclose(got, vals, atol=1e-12)


@pytest.mark.parametrize("j", sorted(SH_EXP_COV))
def test_colored_matches_oracle(j):
    seq = cov_1d(EXP, gamma_provider(SH, 1, 1), j, 1, 1, [1, 2, 3])
    np.testing.assert_allclose(seq.values, SH_EXP_COV[j], atol=1e-7)
    assert np.all(np.asarray(seq.abs_err) <= 1e-7)


def test_white_examples():
    p = gamma_provider(SH, 1, 1)
    seq = cov_1d(WHITE, p, 1, 1, 1, [-1, 0, 1])
    # Gamma[l] = sigma2 * gamma(-l)
    assert seq.values[0] == pytest.approx(2 / math.pi, abs=1e-12)
    assert seq.values[1] == 0
    assert seq.values[2] == pytest.approx(-2 / math.pi, abs=1e-12)
    s2 = cov_1d(NoiseModel.white(2.5), p, 7, 1, 1, [-1]).values[0]
    assert s2 == pytest.approx(2.5 * 2 / math.pi)
    pp = cov_1d(NoiseModel.white(3.0), p, 1, 1, 1, [0, 1, 2], kind="primal_primal")
    assert list(pp.values) == [3.0, 0.0, 0.0]
    cross = cov_1d(WHITE, gamma_provider(SH, 1, 0), 1, 1, 0, [0, 1], kind="primal_primal")
    assert np.all(cross.values == 0)


def test_coarse_example():
    seq = cov_1d(EXP, gamma_provider(SH, 1, 1), 6, 1, 1, [1])
    lim = coarse_limit(EXP, gamma_provider(SH, 1, 1), 1, 1, [1])
    assert lim[0] == pytest.approx(-2 * 2 / math.pi)
    assert seq.values[0] == pytest.approx(lim[0], rel=0.05)


def test_coarse_limit_values():
    assert NoiseModel.exponential(1.0, 2.0).spectral_density_zero() == 1.0
    assert coarse_limit(EXP, gamma_provider(SH, 1, 1), 1, 1, [0])[0] == 0
    v = coarse_limit(EXP, gamma_provider(SH, 0, 0), 0, 0, [0])[0]
    assert v == pytest.approx(1.27324, abs=5e-6)
    with pytest.raises(InvalidParam):
        coarse_limit(WHITE, gamma_provider(SH, 1, 1), 1, 1, [0])


def test_coarse_convergence_monotone():
    fam = WaveletFamily.meyer(2, 1 / 3)
    err = coarse_convergence(EXP, gamma_provider(fam, 1, 1), 1, 1, np.arange(-3, 4), [2, 4, 6])
    assert np.all(np.diff(err) < 0)
    assert err[-1] < 0.02


def test_cov_validation():
    p = gamma_provider(SH, 1, 1)
    with pytest.raises(InvalidParam):
        cov_1d(WHITE, p, 1, 1, 1, [0.5])
    with pytest.raises(InvalidParam):
        cov_1d(WHITE, p, 1, 1, 1, [0], kind="nope")
    with pytest.raises(InvalidParam):
        cov_1d(EXP, p, 1, 1, 1, [0], kind="primal_primal")
    with pytest.raises(InvalidParam):
        NoiseModel.white(0)
    with pytest.raises(InvalidParam):
        NoiseModel.exponential(1.0, -1.0)


# ---- noise models

SH_GAUSS_COV_J1 = (-0.12583910943972582, 0.10086645427594909)


def test_tabulated_models():
    tau = np.arange(0, 40.0 + 1e-9, 0.05)
    tab = NoiseModel.tabulated(tau, np.exp(-tau))
    x = np.linspace(-5, 5, 41)
    np.testing.assert_allclose(tab.autocov(x), np.exp(-np.abs(x)), atol=1e-6)
    assert tab.spectral_density_zero() == pytest.approx(2.0, abs=1e-3)
    # smooth table: spline error is fourth order
    tau = np.arange(0, 12.0 + 1e-9, 0.05)
    tab = NoiseModel.tabulated(tau, np.exp(-tau ** 2 / 2))
    assert tab.spectral_density_zero() == pytest.approx(math.sqrt(2 * math.pi), abs=1e-9)
    a = cov_1d(tab, gamma_provider(SH, 1, 1), 1, 1, 1, [1, 2]).values
    np.testing.assert_allclose(a, SH_GAUSS_COV_J1, atol=1e-6)
    for l, v in zip((1, 2), SH_GAUSS_COV_J1):
        assert oracles.shannon_gauss_cov_ref(1, l) == pytest.approx(v, abs=1e-12)


def test_tabulated_validation(tmp_path):
    with pytest.raises(InvalidParam):
        NoiseModel.tabulated([0, 1, 3, 4], [1, 0.5, 0.2, 0.1])
    with pytest.raises(InvalidParam):
        NoiseModel.tabulated([0, 1, 2, 3], [1, 2, 0.2, 0.0])
    with pytest.warns(UserWarning):
        t = NoiseModel.tabulated([0, 1, 2, 3], [1, 0.8, 0.6, 0.4])
    with pytest.raises(NotIntegrable):
        t.spectral_density_zero()
    assert t.autocov(np.array([10.0]))[0] == 0
    f = tmp_path / "n.csv"
    f.write_text("tau,gamma_n\n0,1\n1,0.5\n2,0.1\n3,0\n")
    m = load_noise_table(f)
    assert m.kind == "tabulated" and m.variance == 1
    f.write_text("tau,gamma_n\n0,1\n1,x\n")
    with pytest.raises(InvalidParam):
        load_noise_table(f)


@given(tau=st.floats(-50, 50, allow_nan=False))
def test_noise_even_and_dominated(tau):
    for nm in (EXP, NoiseModel.exponential(2.0, 0.3)):
        a, b = nm.autocov(np.array([tau, -tau]))
        assert a == b and abs(a) <= nm.variance


# ---- symmetries

def _pp_provider(spec_a, spec_b):
    return lambda t: gamma_pair_quad(spec_a, spec_b, np.ravel(t))[0].reshape(np.shape(t))


@pytest.mark.parametrize("fam,m", [(WaveletFamily.meyer(2, 1 / 3), 1),
                                   (WaveletFamily.battle_lemarie(3), 1),
                                   (WaveletFamily.meyer(2, 1 / 3), 0)], ids=_id)
def test_primal_equals_dual_colored(fam, m):
    s = make_spectrum(fam, m)
    h = dual_spectrum(s)
    lags = [0, 1, 2]
    pp = cov_1d(EXP, None, 1, m, m, lags, "primal_primal", M=2, primal_provider=_pp_provider(s, s))
    dd = cov_1d(EXP, None, 1, m, m, lags, "dual_dual", M=2, primal_provider=_pp_provider(h, h))
    tol = np.asarray(pp.abs_err) + np.asarray(dd.abs_err) + 1e-9
    assert np.all(np.abs(pp.values - dd.values) <= tol)


@pytest.mark.parametrize("j", [0, 2])
def test_cross_swap_colored(j):
    fam = WaveletFamily.meyer(4, phase_slopes=(0, -0.5, -0.25, -0.75))
    lags = np.arange(-3, 4)
    a = cov_1d(EXP, gamma_provider(fam, 1, 2, method="quadrature"), j, 1, 2, lags)
    b = cov_1d(EXP, gamma_provider(fam, 2, 1, method="quadrature"), j, 2, 1, -lags)
    np.testing.assert_allclose(a.values, -b.values, atol=1e-6)


@pytest.mark.parametrize("d", [0, 1])
def test_scaling_symmetry_colored(d):
    fam = WaveletFamily.meyer(2, 1 / 3)
    lags = np.arange(-3, 5)
    p = gamma_provider(fam, 0, 0, d)
    a = cov_1d(EXP, p, 1, 0, 0, lags).values
    b = cov_1d(EXP, p, 1, 0, 0, -lags + 2 * d + 1).values
    np.testing.assert_allclose(a, b, atol=1e-7)


@given(l=st.integers(-40, 40), j=st.integers(-3, 8))
def test_white_scaling_symmetry(l, j):
    p = gamma_provider(SH, 0, 0)
    a = cov_1d(WHITE, p, j, 0, 0, [l]).values[0]
    b = cov_1d(WHITE, p, j, 0, 0, [-l + 1]).values[0]
    assert a == pytest.approx(b, abs=1e-12)


# ---- 2D

def test_cov2d_examples():
    provs = (gamma_provider(MEY3, 1, 1), gamma_provider(MEY3, 1, 1))
    f = cov_2d(WHITE, provs, 1, (1, 1), (1, 1), [0], np.arange(-3, 4))
    assert np.all(f.values == 0)
    f = cov_2d(NoiseModel.white(2.0), provs, 1, (1, 1), (1, 1), [0], [0], "primal_primal")
    assert f.values[0, 0] == 2.0
    sp = (gamma_provider(SH, 1, 1),) * 2
    f = cov_2d(WHITE, sp, 1, (1, 1), (1, 1), [1], [3])
    g1 = oracles.shannon_gamma_ref(1, -1)
    g3 = oracles.shannon_gamma_ref(1, -3)
    assert f.values[0, 0] == pytest.approx(g1 * g3, abs=1e-12)


@given(l1=st.lists(st.integers(-20, 20), min_size=1, max_size=5),
       l2=st.lists(st.integers(-20, 20), min_size=1, max_size=5))
def test_cov2d_separable_exact(l1, l2):
    pa, pb = gamma_provider(MEY3, 1, 1), gamma_provider(MEY3, 2, 2)
    f = cov_2d(WHITE, (pa, pb), 1, (1, 2), (1, 2), l1, l2)
    a = cov_1d(WHITE, pa, 1, 1, 1, l1).values
    b = cov_1d(WHITE, pb, 1, 2, 2, l2).values
    assert np.array_equal(f.values, np.multiply.outer(a, b))


def test_cov2d_colored_product():
    p = gamma_provider(SH, 1, 1)
    noise = SeparableNoise((EXP, EXP))
    f = cov_2d(noise, (p, p), 2, (1, 1), (1, 1), [1, 2], [1, 3])
    col = np.array(SH_EXP_COV[2])
    np.testing.assert_allclose(f.values, np.outer(col[[0, 1]], col[[0, 2]]), atol=1e-7)
    with pytest.raises(NotSeparable):
        cov_2d(EXP, (p, p), 2, (1, 1), (1, 1), [0], [0])
    with pytest.raises(NotSeparable):
        cov_2d(SeparableNoise((EXP, WHITE)), (p, p), 2, (1, 1), (1, 1), [0], [0])
    with pytest.raises(NotSeparable):
        cov_2d("bad", (p, p), 2, (1, 1), (1, 1), [0], [0])
    with pytest.raises(InvalidParam):
        SeparableNoise((EXP,))


def _field(values, kind="primal_dual", m=(1, 1)):
    l = np.arange(values.shape[0]) - values.shape[0] // 2
    return CovField2D(1, m, m, kind, l, l, values)


def test_post_transform_examples():
    delta = np.zeros((3, 3))
    delta[1, 1] = 1.0
    rho = np.arange(9.0).reshape(3, 3) / 10
    out = post_transform_cov(_field(delta, "primal_primal"), _field(rho))
    np.testing.assert_array_equal(out.ww.values, delta + rho)
    np.testing.assert_array_equal(out.whwh.values, delta - rho)
    assert np.all(out.wwh.values == 0)
    out = post_transform_cov(_field(delta, "primal_primal"), _field(np.zeros((3, 3))))
    np.testing.assert_array_equal(out.ww.values, delta)
    np.testing.assert_array_equal(out.whwh.values, delta)
    with pytest.raises(InvalidSubband):
        post_transform_cov(_field(delta, m=(0, 1)), _field(rho, m=(0, 1)))


def test_post_transform_shannon():
    sp = (gamma_provider(SH, 1, 1),) * 2
    lags = [-1, 0, 1]
    nn = cov_2d(WHITE, sp, 1, (1, 1), (1, 1), lags, lags, "primal_primal")
    nh = cov_2d(WHITE, sp, 1, (1, 1), (1, 1), lags, lags)
    out = post_transform_cov(nn, nh)
    assert out.ww.values[2, 2] == pytest.approx(4 / math.pi ** 2, abs=1e-12)
    assert out.ww.values[1, 1] == 1.0


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=9, max_size=9),
       st.lists(st.floats(-1, 1, allow_nan=False), min_size=9, max_size=9))
def test_post_transform_properties(a, b):
    nn, nh = np.reshape(a, (3, 3)), np.reshape(b, (3, 3))
    out = post_transform_cov(_field(nn, "primal_primal"), _field(nh))
    assert np.all(out.wwh.values == 0)
    np.testing.assert_allclose(out.ww.values + out.whwh.values, 2 * nn, atol=1e-15)


# ---- decay reports

def test_verify_decay():
    lags = np.arange(1, 65)
    haar = gamma_provider(WaveletFamily.haar(2), 1, 1)
    rep = verify_cov_decay(cov_1d(WHITE, haar, 1, 1, 1, lags).values, lags, 1)
    assert rep["passed"] and np.isfinite(rep["sup"])
    # the tail tends to 1/(8 pi) times the weight ratio
    assert 0.5 / (8 * math.pi) < rep["sup"] < 2.0
    assert verify_cov_decay(np.zeros(64), lags, 1) == {"sup": 0.0, "slope": 0.0, "passed": True}
    sh = gamma_provider(SH, 1, 1)
    rep = verify_cov_decay(cov_1d(WHITE, sh, 1, 1, 1, lags).values, lags, 1)
    assert not rep["passed"]


def test_verify_decay_2d():
    lags = np.arange(1, 33)
    p = gamma_provider(WaveletFamily.haar(2), 1, 1)
    f = cov_2d(WHITE, (p, p), 1, (1, 1), (1, 1), lags, lags)
    rep = verify_cov_decay(f.values, (lags, lags), (1, 1))
    assert rep["passed"]
