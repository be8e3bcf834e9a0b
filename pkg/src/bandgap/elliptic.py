"""Complete elliptic integrals and Jacobi elliptic functions.

Self-contained implementations: K and E by the arithmetic-geometric mean,
sn/cn/dn by Bulirsch's descending Landen recursion.  Both converge
quadratically and reach double precision in <= 10 iterations.

Convention: every function here takes the *modulus* k, never the parameter
m = k^2.  Mixing the two is the classic convention bug; all call sites in
this package pass k.  The domain is 0 <= k < 1 (k = 1 is excluded: sn
degenerates to tanh and is no longer periodic).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["EllipticPair", "complete_elliptic", "jacobi_sn_cn_dn", "check_modulus"]

_AGM_STOP = 2e-16     # relative AGM gap at which c_n is negligible
_LANDEN_STOP = 1e-10  # Bulirsch threshold; truncation error is O(stop^2)


def check_modulus(k: float) -> float:
    """Validate an elliptic modulus; returns k as a float."""
    k = float(k)
    if not np.isfinite(k) or k < 0.0 or k >= 1.0:
        raise ValueError(f"elliptic modulus must satisfy 0 <= k < 1, got {k!r}")
    return k


def complementary_modulus(k: float) -> float:
    return np.sqrt((1.0 - k) * (1.0 + k))


@dataclass(frozen=True)
class EllipticPair:
    """Complete elliptic integrals K(k) (first kind) and E(k) (second kind)."""

    big_k: float
    big_e: float


def complete_elliptic(k: float) -> EllipticPair:
    """Compute K(k) and E(k) by the AGM iteration.

    a_0 = 1, b_0 = k'; K = pi / (2 * agm(1, k')) and
    E = K * (1 - sum 2^(n-1) c_n^2) with c_0 = k, c_n = (a_n - b_n)/2.
    Relative accuracy is a few ulp for k up to at least 0.999999.
    """
    k = check_modulus(k)
    a, b = 1.0, complementary_modulus(k)
    c = k
    csum = 0.5 * c * c
    pow2 = 1.0
    for _ in range(60):
        if abs(c) <= _AGM_STOP * a:
            break
        a, b, c = 0.5 * (a + b), np.sqrt(a * b), 0.5 * (a - b)
        pow2 *= 2.0
        csum += pow2 * 0.5 * c * c
    big_k = np.pi / (2.0 * a)
    return EllipticPair(big_k=big_k, big_e=big_k * (1.0 - csum))


def jacobi_sn_cn_dn(u, k: float):
    """Jacobi elliptic functions sn(u,k), cn(u,k), dn(u,k).

    Accepts a scalar or array argument u (any real value; no reduction into
    a fundamental period is required).  Returns a (sn, cn, dn) triple of the
    same shape.  Bulirsch's algorithm: ascend the AGM ladder for the
    complementary parameter, evaluate circular functions at the rescaled
    argument, then descend accumulating dn.
    """
    k = check_modulus(k)
    u_in = np.asarray(u, dtype=float)
    scalar = u_in.ndim == 0
    uu = np.atleast_1d(u_in).astype(float).copy()

    if k == 0.0:
        sn, cn, dn = np.sin(uu), np.cos(uu), np.ones_like(uu)
    else:
        sn = np.empty_like(uu)
        cn = np.empty_like(uu)
        dn = np.empty_like(uu)

        # series near u = 0: the descending recursion divides by sn and
        # would overflow for tiny arguments
        tiny = np.abs(uu) <= 1e-8
        ut = uu[tiny]
        sn[tiny] = ut * (1.0 - (1.0 + k * k) * ut ** 2 / 6.0)
        cn[tiny] = 1.0 - ut ** 2 / 2.0
        dn[tiny] = 1.0 - k * k * ut ** 2 / 2.0

        mc = 1.0 - k * k
        em: list[float] = []
        en: list[float] = []
        a = 1.0
        c = 0.5 * (1.0 + np.sqrt(mc))
        for _ in range(16):
            em.append(a)
            root = np.sqrt(mc)
            en.append(root)
            c = 0.5 * (a + root)
            if abs(a - root) <= _LANDEN_STOP * a:
                break
            mc = a * root
            a = c

        ub = c * uu[~tiny]
        sb = np.sin(ub)
        cb = np.cos(ub)
        nz = sb != 0.0  # guard the division below
        av = cb[nz] / sb[nz]
        cv = av * c
        dv = np.ones_like(av)
        for b_i, e_i in zip(reversed(em), reversed(en)):
            a2 = cv * av
            cv = dv * cv
            dv = (e_i + a2) / (b_i + a2)
            av = cv / b_i
        amp = 1.0 / np.sqrt(cv * cv + 1.0)
        sn_b = np.where(sb[nz] >= 0.0, amp, -amp)
        out_sn = np.zeros_like(ub)
        out_cn = np.sign(cb)
        out_dn = np.ones_like(ub)
        out_sn[nz] = sn_b
        out_cn[nz] = cv * sn_b
        out_dn[nz] = dv
        sn[~tiny] = out_sn
        cn[~tiny] = out_cn
        dn[~tiny] = out_dn

    if scalar:
        return float(sn[0]), float(cn[0]), float(dn[0])
    return sn, cn, dn


def sn_squared_mean(k: float) -> float:
    """Mean of sn^2 over one period: (1 - E/K) / k^2 (limit 1/2 at k = 0)."""
    k = check_modulus(k)
    if k == 0.0:
        return 0.5
    pair = complete_elliptic(k)
    return (1.0 - pair.big_e / pair.big_k) / (k * k)
