"""Band-edge solver checks: discriminant closed forms, root isolation,
wavefunction structure, and cross-backend agreement."""

import numpy as np
import pytest

from bandgap.bandsolver import (
    assemble_bloch_hamiltonian,
    band_edges_fourier,
    band_edges_segments,
    monodromy_discriminant,
    monodromy_matrix,
    node_count,
    write_edges_csv,
)
from bandgap.linalg import jacobi_eigh
from bandgap.moment_optimum import gap_scaled_of
from bandgap.potential import (
    PotentialProfile,
    elliptic_profile,
    sinusoidal_profile,
    square_well_profile,
)
from bandgap import squarewell

L = 2.0
FREE = PotentialProfile(period=L, segments=((L, 0.0),))


def test_free_particle_discriminant_closed_form():
    for eps in np.linspace(0.05, 30.0, 40):
        d = monodromy_discriminant(FREE, eps)
        assert d == pytest.approx(2.0 * np.cos(np.sqrt(eps) * L), abs=1e-12)


def test_below_minimum_is_forbidden():
    prof = square_well_profile(4.0, 0.4, L)
    for eps in (-3.0, -1.0, -0.2):
        assert monodromy_discriminant(prof, eps) > 2.0


def test_symplecticity_for_random_profiles():
    rng = np.random.default_rng(3)
    for _ in range(20):
        widths = rng.random(4) + 0.1
        widths *= L / widths.sum()
        values = 6.0 * rng.random(4)
        prof = PotentialProfile(period=L, segments=tuple(zip(widths, values)))
        for eps in rng.random(5) * 10.0:
            m = monodromy_matrix(prof, eps)
            det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            assert abs(det - 1.0) <= 1e-10


def test_rejects_samples_profile():
    prof = sinusoidal_profile(1.0, L, 64)
    with pytest.raises(ValueError):
        monodromy_discriminant(prof, 1.0)
    with pytest.raises(ValueError):
        band_edges_segments(prof)
    with pytest.raises(ValueError):
        band_edges_fourier(square_well_profile(1.0, 0.5, L), 16)


def test_free_particle_degenerate_pair():
    pair = band_edges_segments(FREE, grid_n=256)
    assert pair.eps1 == pytest.approx((np.pi / L) ** 2, rel=1e-12)
    assert pair.eps2 == pair.eps1
    assert pair.gap == 0.0
    # any orthonormal real pair is acceptable
    overlap = (pair.psi1 * pair.psi2).sum() * (2 * L / 256)
    assert abs(overlap) <= 1e-10


def test_square_well_edges_match_closed_form():
    sol = squarewell.solve_at(5.0, 3.136)
    pair = band_edges_segments(squarewell.profile(sol, L), grid_n=512)
    # L = 2: eps L^2/4 is the raw eigenvalue
    assert pair.eps1 == pytest.approx(sol.eps1_scaled, rel=1e-10)
    assert pair.eps2 == pytest.approx(sol.eps2_scaled, rel=1e-10)
    assert pair.gap == pytest.approx(sol.gap_scaled, rel=1e-10)


def test_deep_well_trend():
    # fixed half-width A: edges approach the isolated-well levels
    # (pi/2A)^2 {1, 4} from below as the barrier deepens
    half_width = L / 6
    e1_limit = (np.pi / (2 * half_width)) ** 2
    prev1, prev2 = -np.inf, -np.inf
    for v0 in (30.0, 100.0, 400.0, 2000.0):
        pair = band_edges_segments(square_well_profile(v0, half_width, L), grid_n=128)
        assert pair.eps1 > prev1 and pair.eps2 > prev2
        assert pair.eps1 < e1_limit
        assert pair.eps2 < 4.0 * e1_limit
        prev1, prev2 = pair.eps1, pair.eps2
    assert prev1 > 0.8 * e1_limit
    assert prev2 > 0.8 * 4.0 * e1_limit


def test_wavefunction_structure_segments():
    sol = squarewell.solve_at(5.0, 3.136)
    pair = band_edges_segments(squarewell.profile(sol, L), grid_n=1024)
    half = 512
    # antiperiodic over L, normalized over one period, one node per period
    assert np.abs(pair.psi1[half:] + pair.psi1[:half]).max() <= 1e-9
    assert np.abs(pair.psi2[half:] + pair.psi2[:half]).max() <= 1e-9
    dx = 2 * L / 1024
    assert (pair.psi1[:half] ** 2).sum() * dx == pytest.approx(1.0, rel=1e-4)
    assert node_count(pair.psi1) == 2
    assert node_count(pair.psi2) == 2


def test_fourier_free_particle():
    prof = PotentialProfile(period=L, samples=np.zeros(64))
    pair = band_edges_fourier(prof, 16)
    assert pair.eps1 == pytest.approx((np.pi / L) ** 2, abs=1e-10)
    assert pair.eps2 == pytest.approx((np.pi / L) ** 2, abs=1e-10)


def test_weak_sinusoid_perturbative_gap():
    # first harmonic amplitude v0/4 opens a gap of twice that: v0/2
    v0 = 1e-4
    prof = sinusoidal_profile(v0, L, 128)
    pair = band_edges_fourier(prof, 32)
    assert pair.gap == pytest.approx(v0 / 2, rel=1e-3)


@pytest.mark.parametrize("k", [0.5, 0.9])
def test_elliptic_profile_gap_formula(k):
    prof = elliptic_profile(k, L, 512)
    pair = band_edges_fourier(prof, 64)
    assert pair.gap == pytest.approx(gap_scaled_of(k) * 4 / L ** 2, rel=1e-6)


def test_backend_agreement_for_discontinuous_profiles():
    # Fourier truncation limits the match for a discontinuous potential
    prof = square_well_profile(25.0, L / (2 * 3.136), L)
    seg = band_edges_segments(prof, grid_n=128)
    four = band_edges_fourier(prof.to_samples(512), 64)
    assert four.gap == pytest.approx(seg.gap, rel=2e-3)


def test_fourier_eigen_residual():
    prof = elliptic_profile(0.5, L, 512)
    h = assemble_bloch_hamiltonian(prof, 64)
    w, v = jacobi_eigh(h)
    for col in range(2):
        assert np.linalg.norm(h @ v[:, col] - w[col] * v[:, col]) <= 1e-9


def test_fourier_wavefunction_structure():
    prof = elliptic_profile(0.7, L, 256)
    pair = band_edges_fourier(prof, 32)
    n = 256
    assert np.abs(pair.psi1[n:] + pair.psi1[:n]).max() <= 1e-12
    assert node_count(pair.psi1) == 2
    assert node_count(pair.psi2) == 2
    dx = L / n
    assert (pair.psi1[:n] ** 2).sum() * dx == pytest.approx(1.0, rel=1e-6)
    assert (pair.psi2[:n] ** 2).sum() * dx == pytest.approx(1.0, rel=1e-6)
    # deterministic sign: first clearly nonzero sample is positive
    for psi in (pair.psi1, pair.psi2):
        big = np.abs(psi) > 0.1 * np.abs(psi).max()
        assert psi[np.argmax(big)] > 0


def test_basis_needs_enough_samples():
    prof = sinusoidal_profile(1.0, L, 32)
    with pytest.raises(ValueError):
        band_edges_fourier(prof, 64)
    with pytest.raises(ValueError):
        band_edges_fourier(prof, 8)  # below the minimum truncation


def test_edges_csv(tmp_path):
    pair = band_edges_fourier(sinusoidal_profile(2.0, L, 64), 16)
    path = tmp_path / "edges.csv"
    write_edges_csv(pair, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# eps1 =")
    assert lines[1] == "x,psi1,psi2"
    assert len(lines) == 2 + pair.grid_n
