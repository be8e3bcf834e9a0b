"""Bandgap-maximizing potential at fixed first and second moments.

Stationarity of the gap under moment-preserving variations forces the edge
density difference to be affine in v, which closes into a cubic nonlinear
Schrodinger problem.  Its periodic solutions are elliptic:

    psi2(x) = A sn(2Kx/L, k),   psi1(x) = A cn(2Kx/L, k),
    A = k / sqrt(L (1 - E/K)),  (eps2 - eps1) L^2/4 = (k K)^2,

sharing the single potential v(x) = 2 k^2 (2K/L)^2 sn^2(2Kx/L) + const.
Both are antiperiodic over L (period 2L) with one node per period, i.e.
the two band edges at Bloch wavevector pi/L.  The whole family is
parametrized by the modulus k; the potential strength enters through

    sigma L^2 = 8 K^2 sqrt([2 (1+k^2) s - k^2 - 3 s^2] / 3),  s = 1 - E/K,

with sigma^2 the period variance of v (gauge invariant).  The additive
constant of v is a free gauge; the symmetric choice v = 2k^2(2K/L)^2
(sn^2 - 1/2) makes psi2^2 - psi1^2 = alpha v exact with
alpha = L / (4 K^2 (1 - E/K)).

psi1 deliberately carries the same amplitude A as psi2 (the constraint
equation fixes their relative amplitude); it is therefore not
unit-normalized.  Comparisons against normalized band-solver output must
renormalize first.

The dn-branch of the cubic equation is periodic over L, not antiperiodic,
so it is not a pi/L band edge; it is excluded (and covered by a negative
test).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bandsolver import band_edges_fourier
from .elliptic import check_modulus, complete_elliptic, jacobi_sn_cn_dn
from .potential import PotentialProfile, elliptic_profile
from .rootfind import bisect_root
from . import squarewell

__all__ = [
    "EllipticOptimum",
    "VerificationReport",
    "gap_scaled_of",
    "sigma_scaled_of",
    "optimum_from_modulus",
    "modulus_from_sigma",
    "wavefunctions",
    "profile",
    "verify_optimum",
    "branch_potential_difference",
    "gap_vs_sigma_rows",
    "write_gap_vs_sigma_csv",
]

_K_MAX = 0.999999


def gap_scaled_of(k: float) -> float:
    """(eps2 - eps1) L^2/4 = (k K(k))^2."""
    k = check_modulus(k)
    if k == 0.0:
        return 0.0
    return (k * complete_elliptic(k).big_k) ** 2


def sigma_scaled_of(k: float) -> float:
    """sigma L^2 of the optimal potential (zero iff k = 0)."""
    k = check_modulus(k)
    if k == 0.0:
        return 0.0
    pair = complete_elliptic(k)
    s = 1.0 - pair.big_e / pair.big_k
    bracket = 2.0 * (1.0 + k * k) * s - k * k - 3.0 * s * s
    return 8.0 * pair.big_k ** 2 * np.sqrt(max(bracket, 0.0) / 3.0)


@dataclass(frozen=True)
class EllipticOptimum:
    """Moment-constrained optimum at modulus k, period L."""

    k: float
    big_k: float
    big_e: float
    gap_scaled: float       # (eps2 - eps1) L^2/4 = (k K)^2
    sigma_scaled: float     # sigma L^2
    amplitude: float        # shared wavefunction amplitude A
    alpha_lagrange: float   # psi2^2 - psi1^2 = alpha_lagrange * v (symmetric gauge)
    period: float


def optimum_from_modulus(k: float, period: float = 2.0) -> EllipticOptimum:
    """Construct the optimum for a given modulus.

    k = 0 is the degenerate member: constant potential, zero gap, the
    amplitude limits to sqrt(2/L) and the Lagrange slope diverges.
    """
    k = check_modulus(k)
    pair = complete_elliptic(k)
    if k == 0.0:
        return EllipticOptimum(
            k=0.0, big_k=pair.big_k, big_e=pair.big_e,
            gap_scaled=0.0, sigma_scaled=0.0,
            amplitude=np.sqrt(2.0 / period), alpha_lagrange=np.inf, period=period,
        )
    s = 1.0 - pair.big_e / pair.big_k
    return EllipticOptimum(
        k=k,
        big_k=pair.big_k,
        big_e=pair.big_e,
        gap_scaled=(k * pair.big_k) ** 2,
        sigma_scaled=sigma_scaled_of(k),
        amplitude=k / np.sqrt(period * s),
        alpha_lagrange=period / (4.0 * pair.big_k ** 2 * s),
        period=period,
    )


_monotone_checked = False


def modulus_from_sigma(sigma_scaled_target: float, period: float = 2.0) -> EllipticOptimum:
    """Invert k -> sigma L^2 by bisection on [0, 0.999999].

    Monotonicity of the map is asserted numerically on a 1000-point grid
    (once per process) before trusting the bisection.
    """
    if sigma_scaled_target < 0:
        raise ValueError("need sigma L^2 >= 0")
    global _monotone_checked
    if not _monotone_checked:
        grid = np.linspace(0.0, _K_MAX, 1000)
        vals = np.array([sigma_scaled_of(kk) for kk in grid])
        if np.any(np.diff(vals) <= 0):
            raise AssertionError("k -> sigma L^2 is not strictly increasing")
        _monotone_checked = True
    if sigma_scaled_target == 0.0:
        return optimum_from_modulus(0.0, period)
    top = sigma_scaled_of(_K_MAX)
    if sigma_scaled_target > top:
        raise ValueError(
            f"sigma L^2 = {sigma_scaled_target} exceeds the achievable "
            f"{top:.6g} at k = {_K_MAX}"
        )
    f = lambda kk: sigma_scaled_of(kk) - sigma_scaled_target
    k = bisect_root(f, 0.0, _K_MAX, xtol=1e-12)
    return optimum_from_modulus(k, period)


def wavefunctions(opt: EllipticOptimum, n: int = 2048):
    """(x, psi1, psi2) over [0, 2L): psi2 = A sn(2Kx/L), psi1 = A cn(2Kx/L)."""
    L = opt.period
    x = (np.arange(n) + 0.5) * (2.0 * L / n)
    if opt.k == 0.0:
        amp = opt.amplitude
        return x, amp * np.cos(np.pi * x / L), amp * np.sin(np.pi * x / L)
    u = 2.0 * opt.big_k * x / L
    sn, cn, _ = jacobi_sn_cn_dn(u, opt.k)
    return x, opt.amplitude * cn, opt.amplitude * sn


def profile(opt: EllipticOptimum, n: int = 512, symmetric_gauge: bool = True) -> PotentialProfile:
    """The optimal potential, sampled.

    symmetric_gauge subtracts k^2 (2K/L)^2 so that psi2^2 - psi1^2 equals
    alpha_lagrange * v exactly; with gauge off the offset is zero (v >= 0).
    """
    offset = -opt.k ** 2 * (2.0 * opt.big_k / opt.period) ** 2 if symmetric_gauge else 0.0
    return elliptic_profile(opt.k, opt.period, n, offset=offset)


def _spectral_second_derivative(values: np.ndarray, span: float) -> np.ndarray:
    """d^2/dx^2 of a periodic sampled function (period = span)."""
    n = values.size
    freq = 2.0 * np.pi * np.fft.rfftfreq(n, d=span / n)
    return np.fft.irfft(-(freq ** 2) * np.fft.rfft(values), n=n)


@dataclass(frozen=True)
class VerificationReport:
    """Independent checks of one optimum; `passed` is the conjunction."""

    gap_rel_err: float          # band-solver gap vs (kK)^2 4/L^2
    affine_rel_resid: float     # psi2^2 - psi1^2 regressed on {1, v}
    schrodinger_resid: float    # max |-psi'' + v psi - eps psi| (relative)
    nls_resid: float            # sn branch: psi'' - psi^3/beta + eps psi
    gap_ok: bool
    affine_ok: bool
    schrodinger_ok: bool
    nls_ok: bool

    @property
    def passed(self) -> bool:
        return self.gap_ok and self.affine_ok and self.schrodinger_ok and self.nls_ok


def verify_optimum(opt: EllipticOptimum, n_basis: int = 64, n: int = 512,
                   gap_rtol: float = 1e-6, affine_rtol: float = 1e-10,
                   schrodinger_rtol: float = 1e-8, nls_tol: float = 1e-9) -> VerificationReport:
    """Check the optimum against the band solver and its own equations.

    (i) the plane-wave gap of the sampled potential against (kK)^2 4/L^2;
    (ii) affinity of psi2^2 - psi1^2 in v (least-squares residual);
    (iii) pointwise Schrodinger residuals with spectral second derivatives;
    (iv) the cubic-equation residual of the sn branch.
    """
    if opt.k <= 0.0:
        raise ValueError("verification needs k > 0")
    L = opt.period
    prof = profile(opt, n, symmetric_gauge=True)
    pair = band_edges_fourier(prof, n_basis)
    gap_exact = opt.gap_scaled * 4.0 / L ** 2
    gap_rel = abs(pair.gap - gap_exact) / gap_exact

    x, psi1, psi2 = wavefunctions(opt, 2 * n)
    v = np.tile(prof.samples, 2)
    g = psi2 ** 2 - psi1 ** 2
    design = np.column_stack([np.ones_like(v), v])
    coef, *_ = np.linalg.lstsq(design, g, rcond=None)
    affine_resid = np.linalg.norm(g - design @ coef) / np.linalg.norm(g)

    # symmetric gauge: eps2 = (2K/L)^2, eps1 = (1 - k^2)(2K/L)^2
    w2 = (2.0 * opt.big_k / L) ** 2
    eps2 = w2
    eps1 = (1.0 - opt.k ** 2) * w2
    scale = max(abs(eps2), abs(eps1)) * max(np.abs(psi1).max(), np.abs(psi2).max())
    r1 = -_spectral_second_derivative(psi1, 2 * L) + v * psi1 - eps1 * psi1
    r2 = -_spectral_second_derivative(psi2, 2 * L) + v * psi2 - eps2 * psi2
    schrod = max(np.abs(r1).max(), np.abs(r2).max()) / scale

    beta2 = opt.amplitude ** 2 / (2.0 * opt.k ** 2 * w2)
    eps_nls = (1.0 + opt.k ** 2) * w2
    rn = _spectral_second_derivative(psi2, 2 * L) - psi2 ** 3 / beta2 + eps_nls * psi2
    nls = np.abs(rn).max() / (eps_nls * np.abs(psi2).max())

    return VerificationReport(
        gap_rel_err=float(gap_rel),
        affine_rel_resid=float(affine_resid),
        schrodinger_resid=float(schrod),
        nls_resid=float(nls),
        gap_ok=gap_rel <= gap_rtol,
        affine_ok=affine_resid <= affine_rtol,
        schrodinger_ok=schrod <= schrodinger_rtol,
        nls_ok=nls <= nls_tol,
    )


def branch_potential_difference(opt: EllipticOptimum, n: int = 1024) -> float:
    """Max pointwise difference between v recovered from the sn and cn branches.

    sn branch: v = eps2 - (1+k^2)(2K/L)^2 + 2 k^2 (2K/L)^2 sn^2;
    cn branch: v = eps1 - (1-2k^2)(2K/L)^2 - 2 k^2 (2K/L)^2 cn^2.
    Both must give the same potential; sn^2 and cn^2 are evaluated
    independently (no sn^2 + cn^2 = 1 substitution).
    """
    if opt.k <= 0.0:
        return 0.0
    L = opt.period
    w2 = (2.0 * opt.big_k / L) ** 2
    x = (np.arange(n) + 0.5) * (L / n)
    sn, cn, _ = jacobi_sn_cn_dn(2.0 * opt.big_k * x / L, opt.k)
    eps2 = w2
    eps1 = (1.0 - opt.k ** 2) * w2
    v_sn = eps2 - (1.0 + opt.k ** 2) * w2 + 2.0 * opt.k ** 2 * w2 * sn ** 2
    v_cn = eps1 - (1.0 - 2.0 * opt.k ** 2) * w2 - 2.0 * opt.k ** 2 * w2 * cn ** 2
    return float(np.abs(v_sn - v_cn).max())


def gap_vs_sigma_rows(ks, period: float = 2.0):
    """Rows (sigma L^2, gap_elliptic, gap_sinusoid, gap_squarewell), all
    gaps times L^2/4, comparing the three families at equal sigma.

    The sinusoid with matching period and variance has v0 = 2 sqrt(2) sigma.
    The bang-bang family is reindexed by its own sigma (variance
    v0^2 f (1-f) with barrier fraction f) and linearly interpolated; NaN
    outside the covered sigma range.
    """
    sw_sigma, sw_gap = [], []
    for row in squarewell.sweep_eta(np.linspace(0.3, 4.0, 30)):
        if row.solution is None:
            continue
        s = row.solution
        f = s.barrier_fraction
        sw_sigma.append(4.0 * s.v0_scaled * np.sqrt(f * (1.0 - f)))
        sw_gap.append(s.gap_scaled)
    sw_sigma = np.asarray(sw_sigma)
    sw_gap = np.asarray(sw_gap)

    out = []
    for k in ks:
        opt = optimum_from_modulus(float(k), period)
        sig = opt.sigma_scaled
        gsin = squarewell.sinusoid_gap_scaled(sig / np.sqrt(2.0), period)
        if sw_sigma.size and sw_sigma[0] <= sig <= sw_sigma[-1]:
            gsw = float(np.interp(sig, sw_sigma, sw_gap))
        else:
            gsw = np.nan
        out.append((sig, opt.gap_scaled, gsin, gsw))
    return out


def write_gap_vs_sigma_csv(path, k_max: float = 0.95, rows: int = 24,
                           period: float = 2.0) -> None:
    """Gap against sigma for the elliptic optimum, the equal-sigma sinusoid
    and the bang-bang family reindexed by its own sigma.

    Both sigma scalings (sigma L^2 and sigma L^2/4) are emitted.
    """
    check_modulus(k_max)
    ks = np.linspace(0.05, k_max, rows)
    with open(path, "w") as fh:
        fh.write(f"# L = {period:.15g}; gaps are (eps2-eps1) L^2/4\n")
        fh.write("sigma_scaled,sigma_scaled_quarter,gap_elliptic,gap_sinusoid,gap_squarewell\n")
        for sig, gell, gsin, gsw in gap_vs_sigma_rows(ks, period):
            fh.write(
                f"{sig:.15g},{sig / 4:.15g},{gell:.15g},{gsin:.15g},{gsw:.15g}\n"
            )
