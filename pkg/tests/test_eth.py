import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eth_gamma.errors import (AllBinsSparse, DegenerateAbscissa, DomainError, EmptyWindow,
                              EnergyOutOfRange, TooFewBins, WindowTooLarge, ZeroColumn)
from eth_gamma.eth import (ETHConfig, FOmegaTable, check_bound, chaos_report, diagonal_profile,
                           extract_f_omega, fit_gamma, gamma_from_lambda, ipr, ipr_all,
                           lambda_from_gamma, window_pairs)
from eth_gamma.hilbert import enumerate_sector
from eth_gamma.linalg import GaussianStream, eigh, to_eigenbasis
from eth_gamma.models import occupation
from eth_gamma.synthetic import jittered_spectrum, planted_operator
from eth_gamma.thermo import entropy_at_energy


def make_table(omega, f, count=None, omega_max=None):
    omega = np.asarray(omega, float)
    f = np.asarray(f, float)
    count = np.full(len(omega), 100) if count is None else np.asarray(count)
    return FOmegaTable(E_target=0.0, beta_eff=0.0, S=0.0, window_width=1.0,
                       omega_max=float(omega.max() if omega_max is None else omega_max),
                       n_pairs=int(count.sum()), omega_center=omega, count=count,
                       mean_abs2=f**2, f=f, f_stderr=0 * f, bin_index=np.arange(len(omega)))


@pytest.fixture(scope="module")
def spectrum():
    return jittered_spectrum(600, seed=3)


def test_window_pairs_brute_force(spectrum):
    e = spectrum[::5]
    i, j = window_pairs(e, -0.1, 0.15)
    ref = [(a, b) for a in range(len(e)) for b in range(a + 1, len(e))
           if -0.1 <= (e[a] + e[b]) / 2 <= 0.15]
    assert list(zip(i.tolist(), j.tolist())) == ref


def test_constant_elements_give_flat_f(spectrum):
    c = 3e-4
    A = np.full((600, 600), math.sqrt(c), dtype=complex)
    t = extract_f_omega(spectrum, A, 0.1)
    _, S = entropy_at_energy(spectrum, 0.1)
    assert t.S == pytest.approx(S)
    np.testing.assert_allclose(t.f, math.sqrt(c * math.exp(S)), rtol=1e-12)
    assert np.all(t.count >= 20)
    assert np.all(np.diff(t.omega_center) > 0)
    assert t.omega_max == pytest.approx(0.75 * 4.0)


def test_planted_noiseless_recovery(spectrum):
    _, S = entropy_at_energy(spectrum, 0.0)
    A = planted_operator(spectrum, 0.4, S)
    t = extract_f_omega(spectrum, A, 0.0)
    np.testing.assert_allclose(t.f, np.exp(-0.4 * t.omega_center), rtol=0.02)
    fit = fit_gamma(t)
    assert fit.gamma == pytest.approx(0.4, abs=1e-3)


def test_extract_errors(spectrum):
    A = np.ones((600, 600))
    with pytest.raises(EnergyOutOfRange):
        extract_f_omega(spectrum, A, -2.5)
    with pytest.raises(EmptyWindow):
        extract_f_omega([0.0, 1.0, 10.0], np.ones((3, 3)), 2.0, ETHConfig(window_frac=0.01))
    with pytest.raises(AllBinsSparse):
        extract_f_omega(spectrum[::10], A[::10, ::10], 0.0, ETHConfig(n_min=10_000))


def test_sparse_window_warning(spectrum):
    t = extract_f_omega(spectrum[::4], np.ones((150, 150)), 0.0, ETHConfig(n_min=1))
    assert t.n_pairs < 1000 and t.warnings


def test_hermiticity_fold(spectrum):
    _, S = entropy_at_energy(spectrum, 0.2)
    A = planted_operator(spectrum, 0.3, S, seed=5)
    t1 = extract_f_omega(spectrum, A, 0.2)
    t2 = extract_f_omega(spectrum, A.T, 0.2)
    for name in ("omega_center", "count", "mean_abs2", "f", "f_stderr"):
        np.testing.assert_array_equal(getattr(t1, name), getattr(t2, name))


def test_fit_perfect_line():
    w = np.linspace(1, 5, 12)
    fit = fit_gamma(make_table(w, np.exp(-(0.7 + 0.25 * w))), lo_frac=0.0)
    assert fit.gamma == pytest.approx(0.25, abs=1e-13)
    assert fit.intercept == pytest.approx(0.7, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.stderr_gamma < 1e-12
    assert fit.n_bins_used == 12


def test_fit_matches_weighted_polyfit():
    rng = np.random.default_rng(1)
    w = np.linspace(0.5, 4, 20)
    counts = rng.integers(20, 500, size=20)
    y = 0.3 + 0.6 * w + rng.normal(scale=0.05, size=20)
    fit = fit_gamma(make_table(w, np.exp(-y), counts), lo_frac=0.0)
    slope, intercept = np.polyfit(w, y, 1, w=np.sqrt(counts))
    assert fit.gamma == pytest.approx(slope, rel=1e-12)
    assert fit.intercept == pytest.approx(intercept, rel=1e-12)
    _, cov = np.polyfit(w, y, 1, w=np.sqrt(counts), cov="unscaled")
    resid = y - (intercept + slope * w)
    sigma2 = np.sum(counts * resid**2) / (20 - 2)
    assert fit.stderr_gamma == pytest.approx(math.sqrt(sigma2 * cov[0, 0]), rel=1e-10)


def test_fit_window_selection():
    w = np.linspace(0.1, 10, 40)
    t = make_table(w, np.exp(-w))
    fit = fit_gamma(t, lo_frac=0.5)
    assert fit.fit_window == (pytest.approx(5.0), pytest.approx(10.0))
    assert fit.n_bins_used == int(np.sum(w >= 5.0))


def test_fit_errors():
    with pytest.raises(TooFewBins):
        fit_gamma(make_table(np.arange(1, 6), np.ones(5)), lo_frac=0.0)
    with pytest.raises(DegenerateAbscissa):
        fit_gamma(make_table(np.ones(9), np.ones(9)), lo_frac=0.0)


def test_scale_covariance(spectrum):
    _, S = entropy_at_energy(spectrum, 0.0)
    t = extract_f_omega(spectrum, planted_operator(spectrum, 0.5, S, seed=2), 0.0)
    base = fit_gamma(t)
    for c in (1e-3, 7.0):
        scaled = fit_gamma(t.scaled(c))
        assert abs(scaled.gamma - base.gamma) < 1e-12
        assert scaled.intercept == pytest.approx(base.intercept - math.log(c) / 2, abs=1e-12)
        np.testing.assert_allclose(t.scaled(c).f, t.f * math.sqrt(c))


@settings(max_examples=12, deadline=None, derandomize=True)
@given(st.floats(0.1, 1.0), st.integers(0, 2**32))
def test_planted_consistency(gamma0, seed):
    e = jittered_spectrum(500, seed=1)
    _, S = entropy_at_energy(e, 0.0)
    fit = fit_gamma(extract_f_omega(e, planted_operator(e, gamma0, S, seed=seed), 0.0))
    assert abs(fit.gamma - gamma0) <= 3 * fit.stderr_gamma


@pytest.mark.parametrize("gamma,beta,ratio,ok", [(0.25, 1.0, 0.25, True), (0.2, 1.0, 0.2, False)])
def test_check_bound_examples(gamma, beta, ratio, ok):
    b = check_bound(gamma, beta)
    assert b.ratio == pytest.approx(ratio) and b.satisfied is ok


def test_check_bound_infinite_temperature():
    b = check_bound(0.3, 0.0)
    assert math.isnan(b.ratio) and b.satisfied
    assert not check_bound(-0.1, 0.0).satisfied
    assert check_bound(0.2, 1.0, tol_abs=0.06).satisfied


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(1e-3, 1e3))
def test_check_bound_scale_invariant(gamma, beta, c):
    # keep clear of the knife edge where rounding could flip the verdict
    if abs(gamma - beta / 4) > 1e-9 * (1 + abs(gamma) + abs(beta)):
        assert check_bound(gamma, beta).satisfied == check_bound(c * gamma, c * beta).satisfied


@pytest.mark.parametrize("beta", [0.1, 1.0, 10.0])
def test_lambda_saturates_at_bound(beta):
    assert lambda_from_gamma(beta / 4, beta) == pytest.approx(2 * math.pi / beta, rel=1e-15)


def test_lambda_round_trip_and_domain():
    g = 3 * math.pi / 4 - 1 / 8
    assert lambda_from_gamma(g, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert gamma_from_lambda(lambda_from_gamma(0.37, 2.0), 2.0) == pytest.approx(0.37, abs=1e-12)
    assert lambda_from_gamma(0.5, 1.0) < lambda_from_gamma(0.4, 1.0)
    with pytest.raises(DomainError):
        lambda_from_gamma(-1 / 8, 1.0)


def test_chaos_report_uses_statistical_tolerance(spectrum):
    _, S = entropy_at_energy(spectrum, 0.0)
    t = extract_f_omega(spectrum, planted_operator(spectrum, 0.3, S, seed=9), 0.0)
    fit = fit_gamma(t)
    r = chaos_report(t, fit)
    assert r.bound_tolerance == pytest.approx(2 * fit.stderr_gamma)
    assert r.lambda_implied == pytest.approx(lambda_from_gamma(fit.gamma, t.beta_eff))


def test_ipr_limits():
    a = np.zeros((5, 5))
    a[2, 0] = 3.0
    a[:, 1] = 1.0
    assert ipr(a, 0) == (1.0, 3.0)
    assert ipr(a, 1)[0] == pytest.approx(5.0)
    with pytest.raises(ZeroColumn):
        ipr(a, 2)
    np.testing.assert_allclose(ipr_all(a)[:2], [1.0, 5.0])
    assert np.isnan(ipr_all(a)[2])


def test_ipr_scalar_invariance():
    col = GaussianStream(3).normal(64) + 0j
    a = np.column_stack([col, (2.5 - 1j) * col])
    assert ipr(a, 0)[0] == pytest.approx(ipr(a, 1)[0], rel=1e-12)


def test_ipr_gaussian_column():
    # E|C|^4 = 2 (E|C|^2)^2 for complex Gaussians, so IPR -> D/2
    d = 1000
    z = GaussianStream(77).normal(2 * d * 21)
    cols = (z[0::2] + 1j * z[1::2]).reshape(d, 21)
    values = ipr_all(cols)
    assert abs(np.median(values) - d / 2) <= 0.1 * d / 2


def test_diagonal_profile():
    e = np.linspace(0, 1, 9)
    E, diag, run = diagonal_profile(e, np.eye(9), 3)
    np.testing.assert_array_equal(diag, 1.0)
    np.testing.assert_allclose(run, 1.0)
    _, _, run = diagonal_profile(e, np.diag(np.arange(9.0)), 5)
    np.testing.assert_allclose(run, np.arange(9.0))
    with pytest.raises(WindowTooLarge):
        diagonal_profile(e, np.eye(9), 11)


def test_diagonal_profile_occupation_mean():
    from eth_gamma.models import build_syk_hamiltonian, sample_syk_couplings
    b = enumerate_sector(8, 3)
    dec = eigh(build_syk_hamiltonian(sample_syk_couplings(8, 2), b))
    A = to_eigenbasis(occupation(b, 0), dec.eigenvectors)
    _, diag, _ = diagonal_profile(dec, A, 7)
    assert diag.mean() == pytest.approx(3 / 8, abs=1e-12)
