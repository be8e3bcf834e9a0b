"""Bandgap-maximizing periodic square well under the bounds 0 <= v <= v0.

The optimum under a two-sided bound is bang-bang: v = v0 where the upper
edge density exceeds the lower one and v = 0 elsewhere.  With the well
centered at x = 0 (zero on (-A, A), v0 on (A, L - A)) the two band-edge
wavefunctions are

    psi1 = cos(k1 x) in the well,  a1 sinh[kappa1 (x - L/2)] in the barrier,
    psi2 = sin(k2 x) in the well,  a2 cosh[kappa2 (x - L/2)] in the barrier,

with k^2 + kappa^2 = v0, both extended antiperiodically.  Everything is
reduced to the dimensionless variables

    eta = sqrt(v0) L / 2,   alpha = L / (2A),   y_i = k_i A,

in which eps_i L^2/4 = alpha^2 y_i^2 and v0 A^2 = eta^2 / alpha^2.
kappa_i^2 = v0 - k_i^2 may be negative (edge above the barrier top); all
residuals here are analytically continued through that branch switch, so
sweeps pass through it without losing the root.

Matching psi and psi' at x = A gives one transcendental equation per edge;
the optimality condition is the equality of the two unit-normalized edge
densities at the interface, rho1(A) = rho2(A), which coincides with the
gap maximum over alpha (asserted by tests, not assumed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bandsolver import band_edges_fourier
from .potential import PotentialProfile, sinusoidal_profile, square_well_profile
from .rootfind import bisect_root

__all__ = [
    "SquareWellSolution",
    "SweepRow",
    "cos_edge_residual",
    "sin_edge_residual",
    "cos_edge_root",
    "sin_edge_root",
    "boundary_densities",
    "density_match_residual",
    "matching_residual",
    "matching_residual_swapped",
    "solve_at",
    "optimal_alpha",
    "sweep_eta",
    "wavefunctions",
    "profile",
]

_ROOT_XTOL = 1e-13


class OptimumNotBracketed(RuntimeError):
    """No sign change of the density-matching residual in the alpha bracket."""


# ---------------------------------------------------------------------------
# analytic building blocks, even in the barrier wavenumber
# ---------------------------------------------------------------------------
# u = eta^2/alpha^2 - y^2 is the squared barrier wavenumber (times A^2);
# every residual below is written as a function of u so that it is analytic
# across u = 0 (hyperbolic <-> trigonometric barrier).

def _sinhc(z2):
    """sinh(sqrt(z2))/sqrt(z2) as an entire function of z2 (sin for z2 < 0)."""
    z2 = np.asarray(z2, dtype=float)
    out = np.empty_like(z2)
    small = np.abs(z2) < 1e-8
    out[small] = 1.0 + z2[small] / 6.0 + z2[small] ** 2 / 120.0
    pos = (~small) & (z2 > 0)
    neg = (~small) & (z2 < 0)
    rp = np.sqrt(z2[pos])
    out[pos] = np.sinh(rp) / rp
    rn = np.sqrt(-z2[neg])
    out[neg] = np.sin(rn) / rn
    return out


def _coshc(z2):
    """cosh(sqrt(z2)) as an entire function of z2 (cos for z2 < 0)."""
    z2 = np.asarray(z2, dtype=float)
    out = np.empty_like(z2)
    pos = z2 >= 0
    out[pos] = np.cosh(np.sqrt(z2[pos]))
    out[~pos] = np.cos(np.sqrt(-z2[~pos]))
    return out


def _u_of(y, eta: float, alpha: float):
    return (eta / alpha) ** 2 - np.asarray(y, dtype=float) ** 2


def _cos_edge_entire(y, eta: float, alpha: float):
    """Entire form of the cosine-edge matching condition.

    y sin(y) sinh(wq)/q - cos(y) cosh(wq) with w = alpha - 1 and q^2 = u;
    no poles anywhere, zeros exactly at the matching condition.
    """
    y = np.asarray(y, dtype=float)
    u = _u_of(y, eta, alpha)
    w = alpha - 1.0
    z2 = w * w * u
    return y * np.sin(y) * w * _sinhc(z2) - np.cos(y) * _coshc(z2)


def _sin_edge_entire(y, eta: float, alpha: float):
    """Entire form of the sine-edge matching condition.

    y cos(y) cosh(wq) + u w sinhc(w^2 u) sin(y); same properties.
    """
    y = np.asarray(y, dtype=float)
    u = _u_of(y, eta, alpha)
    w = alpha - 1.0
    z2 = w * w * u
    return y * np.cos(y) * _coshc(z2) + u * w * _sinhc(z2) * np.sin(y)


def _check_geometry(eta: float, alpha: float) -> None:
    if eta <= 0 or not np.isfinite(eta):
        raise ValueError(f"need eta > 0, got {eta}")
    if alpha <= 1.0 or not np.isfinite(alpha):
        raise ValueError(f"need alpha > 1 (barrier of positive width), got {alpha}")


# ---------------------------------------------------------------------------
# the matching conditions in their quotient (residual) form
# ---------------------------------------------------------------------------

def cos_edge_residual(y1: float, eta: float, alpha: float) -> float:
    """LHS - RHS of  y1 tan(y1) = q coth((alpha-1) q),  q = sqrt(eta^2/alpha^2 - y1^2).

    Analytically continued: for y1^2 > eta^2/alpha^2 the right side becomes
    p cot((alpha-1) p) with p = sqrt(y1^2 - eta^2/alpha^2); both branches
    approach 1/(alpha-1) at the switch.  Returns +-inf at the poles of
    either side ((alpha-1) p = m pi on the trigonometric branch, or
    y1 = pi/2); a sign change through a pole is not a root.
    """
    _check_geometry(eta, alpha)
    w = alpha - 1.0
    u = _u_of(y1, eta, alpha)
    if u > 0.0:
        q = np.sqrt(u)
        rhs = q / np.tanh(w * q)
    elif u < 0.0:
        p = np.sqrt(-u)
        t = np.tan(w * p)
        rhs = np.inf if t == 0.0 else p / t
    else:
        rhs = 1.0 / w
    return y1 * np.tan(y1) - rhs


def sin_edge_residual(y2: float, eta: float, alpha: float) -> float:
    """LHS - RHS of  tan(y2)/y2 = -coth((alpha-1) q)/q, continued as above.

    On the trigonometric branch the right side is 1/(p tan((alpha-1) p)).
    Note this quotient form has a genuine pole at the branch switch u = 0
    itself (the underlying matching condition is regular there; the entire
    form used for root finding sails through).
    """
    _check_geometry(eta, alpha)
    w = alpha - 1.0
    u = _u_of(y2, eta, alpha)
    if u > 0.0:
        q = np.sqrt(u)
        rhs = -1.0 / (q * np.tanh(w * q))
    elif u < 0.0:
        p = np.sqrt(-u)
        t = np.tan(w * p)
        rhs = np.inf if t == 0.0 else 1.0 / (p * t)
    else:
        rhs = -np.inf
    return np.tan(y2) / y2 - rhs


def _lowest_root(entire_f, eta: float, alpha: float, lo: float, hi: float) -> float:
    """Lowest zero of an entire residual on (lo, hi) by scan + bisection."""
    n_cells = min(20000, max(200, int(32 * (alpha - 1.0))))
    ys = np.linspace(lo, hi, n_cells + 1)
    vals = entire_f(ys, eta, alpha)
    sign_change = np.nonzero(vals[:-1] * vals[1:] <= 0.0)[0]
    if sign_change.size == 0:
        raise OptimumNotBracketed(
            f"no edge root in ({lo:.3g}, {hi:.3g}) at eta={eta}, alpha={alpha}"
        )
    i = int(sign_change[0])
    return bisect_root(
        lambda y: float(entire_f(np.array([y]), eta, alpha)[0]),
        float(ys[i]), float(ys[i + 1]), float(vals[i]), float(vals[i + 1]),
        xtol=_ROOT_XTOL,
    )


def cos_edge_root(eta: float, alpha: float) -> float:
    """Lowest cosine-type edge root y1 in (0, pi/2)."""
    _check_geometry(eta, alpha)
    return _lowest_root(_cos_edge_entire, eta, alpha, 1e-9, np.pi / 2 - 1e-12)


def sin_edge_root(eta: float, alpha: float) -> float:
    """Lowest sine-type edge root y2 in (0, pi).

    In the weak-barrier regime the root sits below pi/2 (edge above the
    barrier top); it crosses pi/2 exactly when the edge energy crosses v0.
    """
    _check_geometry(eta, alpha)
    return _lowest_root(_sin_edge_entire, eta, alpha, 1e-9, np.pi - 1e-9)


# ---------------------------------------------------------------------------
# normalization and interface densities
# ---------------------------------------------------------------------------

def _g_sinh(z2: float) -> float:
    """(sinh(2z)/2 - z)/(z sinh^2 z) as a function of z^2 (even, real)."""
    if abs(z2) < 1e-4:
        return (2.0 / 3.0) * (1.0 - 2.0 * z2 / 15.0 + 2.0 * z2 * z2 / 105.0)
    z = np.sqrt(complex(z2))
    return float(((np.sinh(2 * z) / 2 - z) / (z * np.sinh(z) ** 2)).real)


def _g_cosh(z2: float) -> float:
    """(sinh(2z)/2 + z)/(z cosh^2 z) as a function of z^2 (even, real)."""
    if abs(z2) < 1e-4:
        return 2.0 * (1.0 - 2.0 * z2 / 3.0 + 2.0 * z2 * z2 / 5.0)
    z = np.sqrt(complex(z2))
    return float(((np.sinh(2 * z) / 2 + z) / (z * np.cosh(z) ** 2)).real)


def _norms_per_half_width(y1: float, y2: float, eta: float, alpha: float):
    """Period-normalization integrals of the two edges divided by A.

    N1/A = 1 + sin(2y1)/(2y1) + cos^2(y1) w g_sinh(w^2 u1),
    N2/A = 1 - sin(2y2)/(2y2) + sin^2(y2) w g_cosh(w^2 u2),
    where int over one period of psi_i^2 = N_i for the unscaled cos/sin
    parametrization above.
    """
    w = alpha - 1.0
    u1 = float(_u_of(y1, eta, alpha))
    u2 = float(_u_of(y2, eta, alpha))
    n1 = 1.0 + np.sin(2 * y1) / (2 * y1) + np.cos(y1) ** 2 * w * _g_sinh(w * w * u1)
    n2 = 1.0 - np.sin(2 * y2) / (2 * y2) + np.sin(y2) ** 2 * w * _g_cosh(w * w * u2)
    return n1, n2


def boundary_densities(eta: float, alpha: float, period: float = 2.0):
    """Unit-normalized edge densities at the well/barrier interface x = A.

    Returns (rho1(A), rho2(A), y1, y2) with int_0^L rho_i dx = 1.
    """
    y1 = cos_edge_root(eta, alpha)
    y2 = sin_edge_root(eta, alpha)
    n1, n2 = _norms_per_half_width(y1, y2, eta, alpha)
    half_width = period / (2.0 * alpha)
    rho1 = np.cos(y1) ** 2 / (n1 * half_width)
    rho2 = np.sin(y2) ** 2 / (n2 * half_width)
    return rho1, rho2, y1, y2


def density_match_residual(eta: float, alpha: float, period: float = 2.0) -> float:
    """rho1(A) - rho2(A): negative below the optimal alpha, positive above."""
    rho1, rho2, _, _ = boundary_densities(eta, alpha, period)
    return rho1 - rho2


def _f_tan(y: float, eta: float, alpha: float) -> float:
    q2 = float(_u_of(y, eta, alpha))
    t = np.tan(y)
    return t * t * (1.0 - (alpha - 1.0) * y * y / q2) + (t / y) * (1.0 + y * y / q2)


def _f_cot(y: float, eta: float, alpha: float) -> float:
    q2 = float(_u_of(y, eta, alpha))
    c = 1.0 / np.tan(y)
    return c * c * (1.0 - (alpha - 1.0) * y * y / q2) - (c / y) * (1.0 + y * y / q2)


def matching_residual(y1: float, y2: float, eta: float, alpha: float) -> float:
    """Closed-form interface-density matching condition.

    Eliminating the hyperbolic factors of the normalization integrals via
    the two edge equations turns rho1(A) = rho2(A) into

        cot^2(y2) (1 - (a-1) y2^2/Q2) - cot(y2)/y2 (1 + y2^2/Q2)
      = tan^2(y1) (1 - (a-1) y1^2/Q1) + tan(y1)/y1 (1 + y1^2/Q1)

    with Q_i = eta^2/alpha^2 - y_i^2.  Valid only when (y1, y2) are roots of
    the respective edge conditions; singular at Q_i = 0 and at y1 = pi/2.
    Same root in alpha as density_match_residual (asserted by tests).
    """
    return _f_cot(y2, eta, alpha) - _f_tan(y1, eta, alpha)


def matching_residual_swapped(y1: float, y2: float, eta: float, alpha: float) -> float:
    """The same algebraic template with the two edge roles interchanged
    (cot form applied to y1, tan form to y2).

    Kept as a cross-check target: this variant has no root at the gap
    maximum; its only sign change in alpha is a pole at alpha = 2 eta / pi,
    where y2 crosses pi/2.  See the matching-condition cross-validation in
    the acceptance suite.
    """
    return _f_cot(y1, eta, alpha) - _f_tan(y2, eta, alpha)


# ---------------------------------------------------------------------------
# solutions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SquareWellSolution:
    """Square-well band-edge pair at (eta, alpha), energies in units L^2/4 = 1."""

    eta: float
    alpha: float
    y1: float
    y2: float

    @property
    def eps1_scaled(self) -> float:
        return self.alpha ** 2 * self.y1 ** 2

    @property
    def eps2_scaled(self) -> float:
        return self.alpha ** 2 * self.y2 ** 2

    @property
    def gap_scaled(self) -> float:
        return self.eps2_scaled - self.eps1_scaled

    @property
    def v0_scaled(self) -> float:
        return self.eta ** 2

    @property
    def barrier_fraction(self) -> float:
        return 1.0 - 1.0 / self.alpha


def solve_at(eta: float, alpha: float) -> SquareWellSolution:
    """Edge pair at a given geometry (not necessarily optimal)."""
    y1 = cos_edge_root(eta, alpha)
    y2 = sin_edge_root(eta, alpha)
    if not (y2 > y1):
        raise ArithmeticError(
            f"edge ordering violated at eta={eta}, alpha={alpha}: y1={y1}, y2={y2}"
        )
    return SquareWellSolution(eta=eta, alpha=alpha, y1=y1, y2=y2)


def optimal_alpha(eta: float, alpha_bracket=(1.01, 50.0),
                  alpha_guess: float | None = None) -> SquareWellSolution:
    """Bandgap-maximizing geometry at fixed eta.

    Solves the three-condition system {cosine edge, sine edge, density
    matching} by nested root finding: the edge roots are resolved inside
    every density evaluation, and the density-matching residual is
    bracketed and bisected in alpha.  A warm-start guess narrows the
    bracket (used by sweeps).
    """
    if eta <= 0:
        raise ValueError("need eta > 0")
    lo, hi = alpha_bracket
    h = lambda a: density_match_residual(eta, a)

    bracket = None
    if alpha_guess is not None:
        la, lb = max(lo, 0.85 * alpha_guess), min(hi, 1.2 * alpha_guess)
        fa, fb = h(la), h(lb)
        if fa * fb <= 0:
            bracket = (la, lb, fa, fb)
    if bracket is None:
        alphas = np.geomspace(lo, hi, 140)
        vals = np.array([h(a) for a in alphas])
        idx = np.nonzero(vals[:-1] * vals[1:] <= 0.0)[0]
        if idx.size == 0:
            raise OptimumNotBracketed(
                f"density-matching residual has no sign change for alpha in "
                f"[{lo}, {hi}] at eta={eta}"
            )
        i = int(idx[0])
        bracket = (float(alphas[i]), float(alphas[i + 1]), float(vals[i]), float(vals[i + 1]))

    a_star = bisect_root(h, *bracket, xtol=1e-12)
    return solve_at(eta, a_star)


@dataclass(frozen=True)
class SweepRow:
    eta: float
    solution: SquareWellSolution | None
    error: str | None = None


def sweep_eta(etas) -> list[SweepRow]:
    """Optimal solutions over an increasing eta grid, warm-starting each row.

    Failures are recorded per row and the sweep continues; the analytic
    continuation of the residuals keeps the curve continuous through the
    barrier branch switches.
    """
    etas = np.asarray(etas, dtype=float)
    if etas.ndim != 1 or np.any(np.diff(etas) <= 0) or np.any(etas <= 0):
        raise ValueError("need a strictly increasing grid of positive eta")
    rows: list[SweepRow] = []
    guess = None
    for eta in etas:
        try:
            sol = optimal_alpha(float(eta), alpha_guess=guess)
            guess = sol.alpha
            rows.append(SweepRow(eta=float(eta), solution=sol))
        except (OptimumNotBracketed, ArithmeticError, ValueError) as exc:
            rows.append(SweepRow(eta=float(eta), solution=None, error=str(exc)))
    return rows


# ---------------------------------------------------------------------------
# real-space objects
# ---------------------------------------------------------------------------

def profile(solution: SquareWellSolution, period: float = 2.0) -> PotentialProfile:
    """The square-well potential of a solution, as exact segments."""
    v0 = (2.0 * solution.eta / period) ** 2
    half_width = period / (2.0 * solution.alpha)
    return square_well_profile(v0, half_width, period)


def wavefunctions(solution: SquareWellSolution, period: float = 2.0, n: int = 2048):
    """Unit-normalized psi1, psi2 sampled over [0, 2L).

    Closed-form piecewise evaluation (cos/sin in the well, hyperbolic or
    trigonometric continuation in the barrier), antiperiodic over L.
    """
    L = period
    eta, alpha, y1, y2 = solution.eta, solution.alpha, solution.y1, solution.y2
    half_width = L / (2.0 * alpha)
    v0 = (2.0 * eta / L) ** 2
    k1, k2 = y1 / half_width, y2 / half_width
    kap1 = np.sqrt(complex(v0 - k1 * k1))
    kap2 = np.sqrt(complex(v0 - k2 * k2))
    n1, n2 = _norms_per_half_width(y1, y2, eta, alpha)
    scale1 = 1.0 / np.sqrt(n1 * half_width)
    scale2 = 1.0 / np.sqrt(n2 * half_width)

    x = (np.arange(n) + 0.5) * (2.0 * L / n)
    m = np.floor((x + half_width) / L)
    r = x - m * L                       # r in [-A, L - A)
    sign = np.where(m.astype(int) % 2 == 0, 1.0, -1.0)
    in_well = np.abs(r) <= half_width

    def barrier_ratio(kap, rr, odd: bool):
        # sinh/cosh(kap (r - L/2)) over its value at r = A; stable for any
        # branch because numerator and denominator shrink together
        if abs(kap) ** 2 * (L / 2) ** 2 < 1e-30:
            lin = (rr - L / 2) / (half_width - L / 2)
            return lin if odd else np.ones_like(rr)
        zr = kap * (rr - L / 2)
        za = kap * (half_width - L / 2)
        if odd:
            return (np.sinh(zr) / np.sinh(za)).real
        return (np.cosh(zr) / np.cosh(za)).real

    psi1 = np.where(
        in_well,
        np.cos(k1 * r),
        np.cos(y1) * barrier_ratio(kap1, r, odd=True),
    ) * sign * scale1
    psi2 = np.where(
        in_well,
        np.sin(k2 * r),
        np.sin(y2) * barrier_ratio(kap2, r, odd=False),
    ) * sign * scale2
    return x, psi1, psi2


# ---------------------------------------------------------------------------
# figure data
# ---------------------------------------------------------------------------

def _open_csv(path, meta: str):
    fh = open(path, "w")
    fh.write(f"# {meta}\n")
    return fh


def write_interface_density_scan_csv(path, eta: float = 5.0, alpha_min: float = 2.2,
                                     alpha_max: float = 4.2, rows: int = 401,
                                     period: float = 2.0) -> None:
    """Interface densities and gap against alpha at fixed eta."""
    with _open_csv(path, f"eta = {eta:.15g}, L = {period:.15g}") as fh:
        fh.write("alpha,rho1_at_interface,rho2_at_interface,gap_scaled\n")
        for a in np.linspace(alpha_min, alpha_max, rows):
            rho1, rho2, y1, y2 = boundary_densities(eta, a, period)
            gap = a * a * (y2 * y2 - y1 * y1)
            fh.write(f"{a:.15g},{rho1:.15g},{rho2:.15g},{gap:.15g}\n")


def write_optimal_well_csv(path, eta: float = 5.0, n: int = 1024,
                           period: float = 2.0, alpha: float | None = None) -> None:
    """Well wavefunctions and potential over [0, 2L).

    By default the geometry is the gap-maximizing one; pass `alpha` to emit
    a non-optimal geometry instead.
    """
    sol = solve_at(eta, alpha) if alpha is not None else optimal_alpha(eta)
    x, psi1, psi2 = wavefunctions(sol, period, n)
    v = profile(sol, period).value_at(x)
    with _open_csv(path, f"eta = {eta:.15g}, alpha = {sol.alpha:.15g}, L = {period:.15g}") as fh:
        fh.write("x,psi1,psi2,v\n")
        for row in zip(x, psi1, psi2, v):
            fh.write(",".join(f"{val:.15g}" for val in row) + "\n")


def write_geometry_sweep_csv(path, v0_scaled_max: float = 60.0, rows: int = 30) -> None:
    """(v0 L^2/4, 2A/L) along the optimal curve."""
    etas = np.sqrt(np.linspace(1.0, v0_scaled_max, rows))
    with _open_csv(path, "optimal geometry sweep") as fh:
        fh.write("v0_scaled,inv_alpha,eta,alpha\n")
        for row in sweep_eta(etas):
            if row.solution is None:
                fh.write(f"{row.eta ** 2:.15g},nan,nan,nan\n")
                continue
            s = row.solution
            fh.write(f"{s.v0_scaled:.15g},{1 / s.alpha:.15g},{s.eta:.15g},{s.alpha:.15g}\n")


def write_edge_energies_csv(path, v0_scaled_max: float = 60.0, rows: int = 30) -> None:
    """(v0 L^2/4, eps1 L^2/4, eps2 L^2/4) along the optimal curve."""
    etas = np.sqrt(np.linspace(1.0, v0_scaled_max, rows))
    with _open_csv(path, "optimal edge energies") as fh:
        fh.write("v0_scaled,eps1_scaled,eps2_scaled\n")
        for row in sweep_eta(etas):
            if row.solution is None:
                fh.write(f"{row.eta ** 2:.15g},nan,nan\n")
                continue
            s = row.solution
            fh.write(f"{s.v0_scaled:.15g},{s.eps1_scaled:.15g},{s.eps2_scaled:.15g}\n")


def sinusoid_gap_scaled(v0_scaled: float, period: float = 2.0, n: int = 512,
                        n_basis: int = 32) -> float:
    """Gap (times L^2/4) of v0 cos^2(pi x / L) at matched contrast."""
    v0 = v0_scaled * 4.0 / period ** 2
    prof = sinusoidal_profile(v0, period, n)
    pair = band_edges_fourier(prof, n_basis)
    return pair.gap * period ** 2 / 4.0


def write_gap_comparison_csv(path, v0_scaled_max: float = 60.0, rows: int = 15,
                             period: float = 2.0) -> None:
    """Optimized square-well gap vs the equal-contrast sinusoid."""
    etas = np.sqrt(np.linspace(1.0, v0_scaled_max, rows))
    sweep = sweep_eta(etas)
    with _open_csv(path, "bang-bang vs sinusoidal gap at equal contrast") as fh:
        fh.write("v0_scaled,gap_optimal,gap_sinusoid\n")
        for row in sweep:
            v0s = row.eta ** 2
            gsin = sinusoid_gap_scaled(v0s, period)
            if row.solution is None:
                fh.write(f"{v0s:.15g},nan,{gsin:.15g}\n")
            else:
                fh.write(f"{v0s:.15g},{row.solution.gap_scaled:.15g},{gsin:.15g}\n")
