"""Profile construction, moments, and serialization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bandgap.elliptic import complete_elliptic
from bandgap.moment_optimum import sigma_scaled_of
from bandgap.potential import (
    PotentialProfile,
    elliptic_profile,
    moments,
    sinusoidal_profile,
    square_well_profile,
    write_profile_csv,
)

L = 2.0


def test_zero_height_collapses_to_constant():
    prof = square_well_profile(0.0, L / 4, L)
    assert prof.segments == ((L, 0.0),)


def test_zero_barrier_width_collapses_to_constant():
    prof = square_well_profile(1.0, L / 2, L)
    assert prof.segments == ((L, 0.0),)


def test_square_well_geometry_errors():
    with pytest.raises(ValueError):
        square_well_profile(1.0, 0.6 * L, L)
    with pytest.raises(ValueError):
        square_well_profile(-1.0, L / 4, L)
    with pytest.raises(ValueError):
        square_well_profile(1.0, 0.0, L)


def test_reported_optimum_geometry():
    # v0 L^2/4 = 25 with barrier fraction 1 - 1/alpha at alpha = 3.136
    alpha = 3.136
    prof = square_well_profile(25.0 * 4 / L ** 2, L / (2 * alpha), L)
    widths = [w for w, _ in prof.segments]
    values = [v for _, v in prof.segments]
    assert values == [0.0, 25.0, 0.0]
    assert widths[1] / L == pytest.approx(1.0 - 1.0 / alpha, rel=1e-14)


def test_sinusoid_zero_amplitude():
    prof = sinusoidal_profile(0.0, L, 32)
    assert np.all(prof.samples == 0.0)


def test_sinusoid_moments_exact():
    v0 = 3.7
    m = moments(sinusoidal_profile(v0, L, 256))
    assert m.mean == pytest.approx(v0 / 2, rel=1e-13)
    assert m.variance == pytest.approx(v0 ** 2 / 8, rel=1e-12)


def test_sinusoid_has_only_two_harmonics():
    # v0 cos^2 = v0/2 + (v0/2) cos(2 pi x / L): cos coefficients beyond p = 1
    # vanish; the half-cell grid offset must be compensated before reading
    # the FFT.
    n, v0 = 64, 4.0
    prof = sinusoidal_profile(v0, L, n)
    spec = np.fft.rfft(prof.samples)
    spec = spec * np.exp(-1j * np.pi * np.arange(spec.size) / n) / n
    a = 2 * spec.real
    a[0] = spec[0].real
    b = -2 * spec.imag
    assert a[0] == pytest.approx(v0 / 2, abs=1e-12)
    assert a[1] == pytest.approx(v0 / 2, abs=1e-12)
    assert np.abs(a[2:]).max() <= 1e-12
    assert np.abs(b).max() <= 1e-12


def test_elliptic_profile_small_modulus_vanishes():
    offset = 0.3
    prof = elliptic_profile(1e-4, L, 64, offset=offset)
    assert np.abs(prof.samples - offset).max() <= 1e-6
    prof0 = elliptic_profile(0.0, L, 64, offset=offset)
    assert np.all(prof0.samples == offset)


def test_elliptic_profile_range():
    k, offset = 0.8, -0.25
    big_k = complete_elliptic(k).big_k
    amp = 2 * k * k * (2 * big_k / L) ** 2
    prof = elliptic_profile(k, L, 512, offset=offset)
    shifted = prof.samples - offset
    assert shifted.min() >= 0.0
    assert shifted.min() <= amp * 1e-3          # zero attained at x = 0, L
    assert shifted.max() == pytest.approx(amp, rel=1e-4)
    assert shifted.max() <= amp * (1 + 1e-12)


def test_constant_profile_moments():
    m = moments(PotentialProfile(period=L, segments=((L, 2.5),)))
    assert (m.mean, m.variance, m.sigma) == (2.5, 0.0, 0.0)


def test_bang_bang_two_point_variance():
    v0, alpha = 7.0, 2.6
    prof = square_well_profile(v0, L / (2 * alpha), L)
    frac = 1.0 - 1.0 / alpha
    m = moments(prof)
    assert m.mean == pytest.approx(v0 * frac, rel=1e-14)
    assert m.variance == pytest.approx(v0 ** 2 * frac * (1 - frac), rel=1e-13)


@pytest.mark.parametrize("k", [0.3, 0.6])
def test_elliptic_sigma_against_closed_form(k):
    m = moments(elliptic_profile(k, L, 4096))
    assert m.sigma * L ** 2 == pytest.approx(sigma_scaled_of(k), rel=1e-8)


@given(st.floats(min_value=-5.0, max_value=5.0))
@settings(max_examples=40, deadline=None)
def test_constant_shift_moves_mean_only(c):
    base = sinusoidal_profile(2.0, L, 128)
    shifted = PotentialProfile(period=L, samples=base.samples + c)
    m0, m1 = moments(base), moments(shifted)
    assert m1.mean == pytest.approx(m0.mean + c, abs=1e-12)
    assert m1.variance == pytest.approx(m0.variance, abs=1e-12)


def test_constant_shift_exact_for_segments():
    prof = square_well_profile(4.0, 0.3, L)
    shifted = PotentialProfile(
        period=L, segments=tuple((w, v + 1.25) for w, v in prof.segments))
    m0, m1 = moments(prof), moments(shifted)
    assert m1.mean == m0.mean + 1.25
    assert m1.variance == pytest.approx(m0.variance, rel=1e-15)


@given(st.integers(min_value=0, max_value=127))
@settings(max_examples=30, deadline=None)
def test_cyclic_shift_invariance_samples(shift):
    base = sinusoidal_profile(3.0, L, 128)
    rolled = PotentialProfile(period=L, samples=np.roll(base.samples, shift))
    m0, m1 = moments(base), moments(rolled)
    assert m1.mean == pytest.approx(m0.mean, abs=1e-14)
    assert m1.variance == pytest.approx(m0.variance, abs=1e-14)


def test_cyclic_shift_invariance_segments():
    segs = ((0.5, 1.0), (0.7, -2.0), (0.8, 0.3))
    rotated = (segs[1], segs[2], segs[0])
    m0 = moments(PotentialProfile(period=L, segments=segs))
    m1 = moments(PotentialProfile(period=L, segments=rotated))
    assert m1.mean == m0.mean
    assert m1.variance == pytest.approx(m0.variance, rel=1e-15)


def test_sampling_refinement_consistency():
    # moments of the sampled staircase converge to the exact segment
    # moments as the grid refines
    prof = square_well_profile(5.0, 0.37, L)
    exact = moments(prof)
    errs = []
    for n in (64, 256, 1024):
        m = moments(prof.to_samples(n))
        errs.append(abs(m.variance - exact.variance))
    assert errs[2] <= errs[0]
    assert errs[2] <= exact.variance * 1e-2


def test_validation_rules():
    with pytest.raises(ValueError):
        PotentialProfile(period=L)  # neither representation
    with pytest.raises(ValueError):
        PotentialProfile(period=L, segments=((1.0, 0.0),))  # widths != L
    with pytest.raises(ValueError):
        PotentialProfile(period=L, samples=np.ones(4))  # too few samples
    with pytest.raises(ValueError):
        PotentialProfile(period=-1.0, samples=np.ones(16))
    with pytest.raises(ValueError):
        PotentialProfile(period=L, samples=np.array([np.nan] * 16))


def test_samples_are_immutable():
    prof = sinusoidal_profile(1.0, L, 16)
    with pytest.raises(ValueError):
        prof.samples[0] = 99.0


def test_csv_staircase_and_samples(tmp_path):
    prof = square_well_profile(2.0, 0.5, L)
    path = tmp_path / "well.csv"
    write_profile_csv(prof, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#")
    assert lines[1] == "x,v"
    assert len(lines) == 2 + 2 * len(prof.segments)

    path2 = tmp_path / "well_flat.csv"
    write_profile_csv(prof, path2, n_flatten=16)
    lines2 = path2.read_text().splitlines()
    assert len(lines2) == 2 + 16
