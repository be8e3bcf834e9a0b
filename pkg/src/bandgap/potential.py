"""Periodic potential profiles over one period and their statistical moments.

Units: hbar^2/2m = 1, so -psi'' + v psi = eps psi.  The default period is
L = 2, which makes the plotting unit L^2/4 equal to 1 (energies quoted as
eps * L^2/4 are then raw energies).

Two representations:

* Segments -- an ordered list of (width, value) pieces covering [0, L).
  Exact; this is what the transfer-matrix solver consumes.  The square well
  is stored as [well-half, barrier, well-half], i.e. x = 0 sits at the well
  center and the barrier occupies (A, L - A).
* Samples -- n values on the cell-centered grid x_j = (j + 1/2) L / n.
  Cell centers keep piecewise-constant profiles sampled away from their
  jumps, and the equal-weight quadrature on this grid is spectrally
  accurate for smooth periodic integrands.

Conversion is one-way (Segments -> Samples); sampling loses exactness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elliptic import check_modulus, complete_elliptic, jacobi_sn_cn_dn

__all__ = [
    "PotentialProfile",
    "MomentSummary",
    "square_well_profile",
    "sinusoidal_profile",
    "elliptic_profile",
    "moments",
    "write_profile_csv",
]

_WIDTH_TOL = 1e-12


@dataclass(frozen=True)
class PotentialProfile:
    """One period of a real periodic potential.

    Exactly one of `segments` / `samples` is set.  Immutable after
    construction; the samples array is read-only.
    """

    period: float
    segments: tuple[tuple[float, float], ...] | None = None
    samples: np.ndarray | None = None

    def __post_init__(self):
        if self.period <= 0 or not np.isfinite(self.period):
            raise ValueError(f"period must be positive and finite, got {self.period}")
        if (self.segments is None) == (self.samples is None):
            raise ValueError("exactly one of segments/samples must be given")
        if self.segments is not None:
            widths = np.array([w for w, _ in self.segments], dtype=float)
            values = np.array([v for _, v in self.segments], dtype=float)
            if len(widths) == 0 or np.any(widths <= 0):
                raise ValueError("segment widths must be positive")
            if abs(widths.sum() - self.period) > _WIDTH_TOL * self.period:
                raise ValueError("segment widths must sum to the period")
            if not np.all(np.isfinite(values)):
                raise ValueError("segment values must be finite")
        else:
            s = np.asarray(self.samples, dtype=float)
            if s.ndim != 1 or s.size < 8:
                raise ValueError("need a 1-d array of at least 8 samples")
            if not np.all(np.isfinite(s)):
                raise ValueError("samples must be finite")
            s = s.copy()
            s.setflags(write=False)
            object.__setattr__(self, "samples", s)

    # -- representation helpers -------------------------------------------

    @property
    def is_segments(self) -> bool:
        return self.segments is not None

    @property
    def n(self) -> int:
        if self.samples is None:
            raise ValueError("segments profile has no sample count")
        return self.samples.size

    def sample_grid(self) -> np.ndarray:
        """Cell-centered grid x_j = (j + 1/2) L / n."""
        return (np.arange(self.n) + 0.5) * (self.period / self.n)

    def value_at(self, x) -> np.ndarray:
        """Potential value at positions x (segments only; exact staircase)."""
        if self.segments is None:
            raise ValueError("value_at is defined for the Segments representation")
        xr = np.mod(np.asarray(x, dtype=float), self.period)
        edges = np.cumsum([w for w, _ in self.segments])
        idx = np.searchsorted(edges, xr, side="right")
        idx = np.clip(idx, 0, len(self.segments) - 1)
        vals = np.array([v for _, v in self.segments])
        return vals[idx]

    def to_samples(self, n: int) -> "PotentialProfile":
        """Piecewise-constant sampling at cell centers (Segments -> Samples)."""
        if self.segments is None:
            raise ValueError("already a Samples profile")
        if n < 8:
            raise ValueError("need n >= 8")
        x = (np.arange(n) + 0.5) * (self.period / n)
        return PotentialProfile(period=self.period, samples=self.value_at(x))

    def min_value(self) -> float:
        if self.segments is not None:
            return min(v for _, v in self.segments)
        return float(self.samples.min())

    def max_value(self) -> float:
        if self.segments is not None:
            return max(v for _, v in self.segments)
        return float(self.samples.max())


@dataclass(frozen=True)
class MomentSummary:
    """Period-averaged mean, variance and sigma = sqrt(variance) of v."""

    mean: float
    variance: float
    sigma: float


def square_well_profile(v0: float, half_width: float, period: float) -> PotentialProfile:
    """Periodic square well: v = 0 on (-A, A), v = v0 on (A, L - A).

    `half_width` is A, with 0 < 2A <= L; the period window starts at the
    well center, so the stored segments are [(A, 0), (L - 2A, v0), (A, 0)].
    Degenerate inputs (v0 = 0 or 2A = L) collapse to the constant-zero
    profile.
    """
    if v0 < 0 or not np.isfinite(v0):
        raise ValueError(f"barrier height must be >= 0, got {v0}")
    if half_width <= 0 or 2 * half_width > period * (1 + 1e-15):
        raise ValueError(f"need 0 < 2A <= L, got A={half_width}, L={period}")
    if v0 == 0.0 or abs(2 * half_width - period) <= _WIDTH_TOL * period:
        return PotentialProfile(period=period, segments=((period, 0.0),))
    return PotentialProfile(
        period=period,
        segments=(
            (half_width, 0.0),
            (period - 2 * half_width, v0),
            (half_width, 0.0),
        ),
    )


def sinusoidal_profile(v0: float, period: float, n: int) -> PotentialProfile:
    """Sampled v0 * cos^2(pi x / L)."""
    if n < 8:
        raise ValueError("need n >= 8")
    x = (np.arange(n) + 0.5) * (period / n)
    return PotentialProfile(period=period, samples=v0 * np.cos(np.pi * x / period) ** 2)


def elliptic_profile(k: float, period: float, n: int, offset: float = 0.0) -> PotentialProfile:
    """Sampled v(x) = 2 k^2 (2K/L)^2 sn^2(2Kx/L, k) + offset.

    sn^2 has period 2K in its argument, so v has period L.  This is the
    potential whose two lowest antiperiodic band edges are the sn/cn pair.
    """
    k = check_modulus(k)
    if n < 8:
        raise ValueError("need n >= 8")
    x = (np.arange(n) + 0.5) * (period / n)
    if k == 0.0:
        return PotentialProfile(period=period, samples=np.full(n, offset, dtype=float))
    big_k = complete_elliptic(k).big_k
    sn, _, _ = jacobi_sn_cn_dn(2.0 * big_k * x / period, k)
    amp = 2.0 * k * k * (2.0 * big_k / period) ** 2
    return PotentialProfile(period=period, samples=amp * sn ** 2 + offset)


def moments(profile: PotentialProfile) -> MomentSummary:
    """Mean and variance of v over one period.

    Segments: exact closed form from the (width, value) list.  Samples:
    equal-weight quadrature on the periodic cell-centered grid.
    """
    if profile.segments is not None:
        widths = np.array([w for w, _ in profile.segments])
        values = np.array([v for _, v in profile.segments])
        mean = float(np.dot(widths, values) / profile.period)
        var = float(np.dot(widths, values ** 2) / profile.period - mean ** 2)
    else:
        mean = float(profile.samples.mean())
        var = float((profile.samples ** 2).mean() - mean ** 2)
    var = max(var, 0.0)
    return MomentSummary(mean=mean, variance=var, sigma=float(np.sqrt(var)))


def write_profile_csv(profile: PotentialProfile, path, n_flatten: int | None = None) -> None:
    """Write a profile as CSV with header `x,v`.

    Samples: one row per grid point.  Segments: one (x_start, v), (x_end, v)
    row pair per segment, drawing the exact staircase; pass `n_flatten` to
    emit cell-centered samples instead.
    """
    with open(path, "w") as fh:
        fh.write(f"# period L = {profile.period:.15g}\n")
        fh.write("x,v\n")
        if profile.segments is not None and n_flatten is None:
            x0 = 0.0
            for width, value in profile.segments:
                fh.write(f"{x0:.15g},{value:.15g}\n")
                fh.write(f"{x0 + width:.15g},{value:.15g}\n")
                x0 += width
        else:
            p = profile if profile.samples is not None else profile.to_samples(n_flatten)
            for x, v in zip(p.sample_grid(), p.samples):
                fh.write(f"{x:.15g},{v:.15g}\n")
