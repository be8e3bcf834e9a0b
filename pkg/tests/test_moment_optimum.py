"""Moment-constrained optimum: closed forms, inversion, verification."""

import numpy as np
import pytest

from bandgap import moment_optimum as mo
from bandgap.bandsolver import band_edges_fourier, node_count
from bandgap.elliptic import complete_elliptic, jacobi_sn_cn_dn
from bandgap.potential import moments

L = 2.0

# (0.8 K(0.8))^2 from 30-digit arithmetic
GAP_08 = 2.5479892317162140901


def test_degenerate_member():
    opt = mo.optimum_from_modulus(0.0, L)
    assert opt.gap_scaled == 0.0
    assert opt.sigma_scaled == 0.0
    assert opt.amplitude == pytest.approx(np.sqrt(2.0 / L), rel=1e-14)


def test_gap_formula_frozen_value():
    assert mo.gap_scaled_of(0.8) == pytest.approx(GAP_08, rel=1e-13)
    opt = mo.optimum_from_modulus(0.8, L)
    assert opt.gap_scaled == pytest.approx(GAP_08, rel=1e-13)


def test_small_modulus_sigma_series():
    k = 0.05
    ratio = mo.sigma_scaled_of(k) / (np.pi ** 2 * k ** 2 / np.sqrt(2.0))
    assert 0.99 <= ratio <= 1.01


@pytest.mark.parametrize("k", [0.05, 0.1, 0.3, 0.5, 0.7, 0.9])
def test_sigma_matches_profile_variance(k):
    quad = moments(mo.profile(mo.optimum_from_modulus(k, L), 4096)).sigma * L ** 2
    assert quad == pytest.approx(mo.sigma_scaled_of(k), rel=1e-8)


def test_sigma_gauge_invariance():
    # the additive constant of v does not move sigma
    k = 0.6
    opt = mo.optimum_from_modulus(k, L)
    with_gauge = moments(mo.profile(opt, 2048, symmetric_gauge=True)).sigma
    without = moments(mo.profile(opt, 2048, symmetric_gauge=False)).sigma
    assert with_gauge == pytest.approx(without, rel=1e-12)


def test_both_maps_increase_with_modulus():
    ks = np.linspace(0.01, 0.99, 99)
    gaps = np.array([mo.gap_scaled_of(k) for k in ks])
    sigmas = np.array([mo.sigma_scaled_of(k) for k in ks])
    assert np.all(np.diff(gaps) > 0)
    assert np.all(np.diff(sigmas) > 0)


def test_sigma_inversion_round_trip():
    target = mo.sigma_scaled_of(0.6)
    opt = mo.modulus_from_sigma(target, L)
    assert opt.k == pytest.approx(0.6, abs=1e-10)
    assert mo.modulus_from_sigma(0.0, L).k == 0.0


def test_sigma_inversion_out_of_range():
    with pytest.raises(ValueError) as err:
        mo.modulus_from_sigma(1e6, L)
    assert "achievable" in str(err.value)
    with pytest.raises(ValueError):
        mo.modulus_from_sigma(-1.0, L)


def test_dominates_sinusoid_at_equal_sigma():
    rows = mo.gap_vs_sigma_rows(np.linspace(0.2, 0.9, 6), L)
    for sigma, gap_ell, gap_sin, gap_sw in rows:
        assert gap_ell >= gap_sin - 1e-12
        if np.isfinite(gap_sw):
            assert gap_ell >= gap_sw


@pytest.mark.parametrize("k", [0.3, 0.5, 0.8])
def test_verification_report(k):
    rep = mo.verify_optimum(mo.optimum_from_modulus(k, L))
    assert rep.gap_rel_err <= 1e-6
    assert rep.affine_rel_resid <= 1e-10
    assert rep.nls_resid <= 1e-9
    assert rep.passed


def test_verification_requires_positive_modulus():
    with pytest.raises(ValueError):
        mo.verify_optimum(mo.optimum_from_modulus(0.0, L))


def test_wavefunctions_are_band_edges():
    opt = mo.optimum_from_modulus(0.6, L)
    n = 2048
    x, psi1, psi2 = mo.wavefunctions(opt, n)
    half = n // 2
    # antiperiodic over L, one node per period
    assert np.abs(psi1[half:] + psi1[:half]).max() <= 1e-12
    assert np.abs(psi2[half:] + psi2[:half]).max() <= 1e-12
    assert node_count(psi1) == 2
    assert node_count(psi2) == 2
    # psi2 carries unit norm; psi1 shares its amplitude and does not
    dx = 2 * L / n
    norm2 = (psi2[:half] ** 2).sum() * dx
    norm1 = (psi1[:half] ** 2).sum() * dx
    assert norm2 == pytest.approx(1.0, rel=1e-6)
    assert abs(norm1 - 1.0) > 1e-3
    # closed-form lower-edge norm: (E/K - k'^2) / (1 - E/K)
    pair = complete_elliptic(0.6)
    ek = pair.big_e / pair.big_k
    expect = (ek - (1 - 0.6 ** 2)) / (1 - ek)
    assert norm1 == pytest.approx(expect, rel=1e-6)


def test_renormalized_shapes_match_band_solver():
    opt = mo.optimum_from_modulus(0.6, L)
    n = 512
    prof = mo.profile(opt, n)
    pair = band_edges_fourier(prof, n // 4)
    x, psi1, psi2 = mo.wavefunctions(opt, 2 * n)
    dx = L / n
    for mine, solved in ((psi1, pair.psi1), (psi2, pair.psi2)):
        mine = mine / np.sqrt((mine[:n] ** 2).sum() * dx)
        big = np.abs(mine) > 0.1 * np.abs(mine).max()
        if mine[np.argmax(big)] < 0:
            mine = -mine
        assert np.abs(mine - solved).max() <= 1e-6


def test_affine_relation_with_lagrange_slope():
    # psi2^2 - psi1^2 = alpha_lagrange * v in the symmetric gauge
    opt = mo.optimum_from_modulus(0.7, L)
    n = 1024
    x, psi1, psi2 = mo.wavefunctions(opt, 2 * n)
    v = np.tile(mo.profile(opt, n).samples, 2)
    g = psi2 ** 2 - psi1 ** 2
    assert np.abs(g - opt.alpha_lagrange * v).max() <= 1e-12 * np.abs(g).max() + 1e-14


def test_two_branches_share_one_potential():
    for k in (0.3, 0.6, 0.9):
        assert mo.branch_potential_difference(mo.optimum_from_modulus(k, L)) <= 1e-10


def test_dn_branch_is_periodic_not_antiperiodic():
    # the third solution family has period L: it repeats rather than flips,
    # so it is not an edge at Bloch wavevector pi/L
    k = 0.6
    big_k = complete_elliptic(k).big_k
    n = 1024
    x = (np.arange(n) + 0.5) * (2 * L / n)
    _, _, dn = jacobi_sn_cn_dn(2 * big_k * x / L, k)
    half = n // 2
    assert np.abs(dn[half:] - dn[:half]).max() <= 1e-12   # periodic over L
    assert np.abs(dn[half:] + dn[:half]).max() > 0.5      # far from antiperiodic


def test_gap_vs_sigma_csv(tmp_path):
    path = tmp_path / "fig6.csv"
    mo.write_gap_vs_sigma_csv(path, k_max=0.9, rows=6)
    lines = path.read_text().splitlines()
    assert lines[1] == "sigma_scaled,sigma_scaled_quarter,gap_elliptic,gap_sinusoid,gap_squarewell"
    data = np.genfromtxt(path, delimiter=",", skip_header=2)
    assert data.shape == (6, 5)
    assert np.all(np.diff(data[:, 0]) > 0)
    # the quarter-scaling column is exactly sigma/4
    assert np.allclose(data[:, 1], data[:, 0] / 4, rtol=1e-14)
