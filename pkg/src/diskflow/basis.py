"""Orthonormal eigenbasis of the Stokes operator on the unit disk.

Mode (n, k) has vorticity c * J_n(alpha * r) * exp(i n theta) with
alpha the k-th positive zero of J_{n+1} and eigenvalue alpha**2.  The
normalization makes the vorticities an orthonormal family in L2 of the
disk, which is the same as the velocities being orthonormal in the
gradient inner product; the sign is fixed so every mode's vorticity is
+pi**-0.5 at (r, theta) = (1, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import BesselDomainError, jn_trio, zero_table

_SQRT_PI = math.sqrt(math.pi)
_R_LIMIT = 1.0e-8  # below this, point evaluation switches to series limits

QUANTITIES = {
    "vorticity": 1,
    "velocity": 2,
    "gradient": 4,
    "dtau_utau": 1,  # (1/r) d/dtheta of the angular velocity component
    "dtau_un": 1,    # (1/r) d/dtheta of the radial velocity component
}


@dataclass(frozen=True)
class EigenPair:
    """One Stokes mode: indices, eigenvalue, zeros, and scale constants."""

    n: int
    k: int
    lam: float
    alpha: float      # k-th positive zero of J_{n+1}; lam = alpha**2
    beta: float       # k-th positive zero of J_n
    c_norm: float     # 1 / (sqrt(pi) |J_n(alpha)|) > 0
    c_signed: float   # 1 / (sqrt(pi) J_n(alpha)); fixes the mode sign
    d_const: float    # -alpha**2 J_n(alpha) / n for n >= 1, nan for n = 0


class StokesBasis:
    """Mode table for angular index <= n_max and radial index <= k_max."""

    def __init__(self, n_max: int = 128, k_max: int = 128):
        if n_max < 0 or k_max < 1:
            raise ValueError("need n_max >= 0 and k_max >= 1")
        self.n_max = int(n_max)
        self.k_max = int(k_max)
        tab = zero_table(n_max + 1, k_max)
        zeros = tab.all_rows()[: n_max + 2, :k_max]
        self.alpha = zeros[1:, :].copy()
        self.beta = zeros[:-1, :].copy()
        self.lam = self.alpha**2
        self.j_at_alpha = np.empty_like(self.alpha)
        for n in range(n_max + 1):
            self.j_at_alpha[n] = jn_trio(n, self.alpha[n])[1]
        self.c_signed = 1.0 / (_SQRT_PI * self.j_at_alpha)
        self.c_norm = np.abs(self.c_signed)
        ns = np.arange(n_max + 1, dtype=float)[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            self.d_const = np.where(ns >= 1, -self.lam * self.j_at_alpha / ns, np.nan)
        self._profile_cache: dict = {}

    def _check(self, n: int, k: int) -> None:
        if not (0 <= n <= self.n_max):
            raise BesselDomainError(f"angular index {n} outside [0, {self.n_max}]")
        if not (1 <= k <= self.k_max):
            raise BesselDomainError(f"radial index {k} outside [1, {self.k_max}]")

    def pair(self, n: int, k: int) -> EigenPair:
        self._check(n, k)
        j = k - 1
        return EigenPair(
            n=n, k=k,
            lam=float(self.lam[n, j]),
            alpha=float(self.alpha[n, j]),
            beta=float(self.beta[n, j]),
            c_norm=float(self.c_norm[n, j]),
            c_signed=float(self.c_signed[n, j]),
            d_const=float(self.d_const[n, j]),
        )

    def profile_matrix(self, n: int, r: np.ndarray, quantity: str,
                       k_max: int | None = None) -> np.ndarray:
        """Radial factors of the modes (n, 1..k_max) for one field quantity.

        Returns a complex array of shape (ncomp, k_max, r.size) such that the
        quantity of mode (n, k) at (r, theta) is profile[:, k-1, :] times
        exp(i n theta).
        """
        k_max = self.k_max if k_max is None else k_max
        if quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {quantity!r}")
        self._check(n, max(k_max, 1))
        key = (n, quantity, k_max, r.size, hash(r.tobytes()))
        hit = self._profile_cache.get(key)
        if hit is not None:
            return hit
        parts = _row_radial(n, self.alpha[n, :k_max], self.c_signed[n, :k_max], r)
        prof = _assemble(n, parts, r, quantity)
        self._profile_cache[key] = prof
        return prof


def _row_radial(n: int, alphas: np.ndarray, c_signed: np.ndarray,
                r: np.ndarray) -> dict[str, np.ndarray]:
    """Shared radial building blocks R, T and derivatives for one n-row.

    R and T are the radial factors of the velocity components: the mode's
    velocity is (i n R(r), T(r)) exp(i n theta) in polar components.  All
    returned arrays have shape (len(alphas), len(r)) and include the
    normalization constant.
    """
    K, Q = alphas.size, r.size
    x = np.multiply.outer(alphas, r).ravel()
    jm1, jn, jp1 = jn_trio(n, x)
    jn = jn.reshape(K, Q)
    jp = (0.5 * (jm1 - jp1)).reshape(K, Q)
    a = alphas[:, None]
    cs = c_signed[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        xg = a * r[None, :]
        jpp = -jp / xg + (n * n / (xg * xg) - 1.0) * jn
    ja = 1.0 / (_SQRT_PI * cs)  # J_n(alpha), signed
    rn1 = r[None, :] ** (n - 1) if n >= 1 else np.zeros((1, Q))
    # r^(n-2) only ever enters multiplied by (n - 1), so n <= 1 never uses it
    rn2 = r[None, :] ** (n - 2) if n >= 2 else np.zeros((1, Q))
    inv_a2 = 1.0 / (a * a)
    if n >= 1:
        R = cs * (jn / r[None, :] - ja * rn1) * inv_a2
        Rp = cs * (a * jp / r[None, :] - jn / r[None, :] ** 2
                   - (n - 1) * ja * rn2) * inv_a2
    else:
        R = np.zeros((K, Q))
        Rp = np.zeros((K, Q))
    T = cs * (n * ja * rn1 - a * jp) * inv_a2
    Tp = cs * (n * (n - 1) * ja * rn2 - a * a * jpp) * inv_a2
    return {"J": jn, "Jp": jp, "R": R, "Rp": Rp, "T": T, "Tp": Tp, "cs": cs}


def _assemble(n: int, parts: dict, r: np.ndarray, quantity: str) -> np.ndarray:
    rr = r[None, :]
    if quantity == "vorticity":
        prof = (parts["cs"] * parts["J"])[None, :, :].astype(complex)
    elif quantity == "velocity":
        prof = np.stack([1j * n * parts["R"], parts["T"] + 0j])
    elif quantity == "gradient":
        # Entries of the polar velocity gradient in the orthonormal frame:
        # [d_r u^r, (1/r) d_th u^r - u^th/r; d_r u^th, (1/r) d_th u^th + u^r/r]
        prof = np.stack([
            1j * n * parts["Rp"],
            (-(n * n) * parts["R"] - parts["T"]) / rr + 0j,
            parts["Tp"] + 0j,
            1j * n * (parts["T"] + parts["R"]) / rr,
        ])
    elif quantity == "dtau_utau":
        prof = (1j * n * parts["T"] / rr)[None, :, :]
    elif quantity == "dtau_un":
        prof = (-(n * n) * parts["R"] / rr)[None, :, :].astype(complex)
    else:
        raise ValueError(f"unknown quantity {quantity!r}")
    return np.ascontiguousarray(prof)


def _pair_parts(pair: EigenPair, r: float) -> dict[str, float]:
    parts = _row_radial(pair.n, np.array([pair.alpha]),
                        np.array([pair.c_signed]), np.array([float(r)]))
    return {k: (v[0, 0] if isinstance(v, np.ndarray) else v) for k, v in parts.items()}


def vorticity_eval(pair: EigenPair, r: float, theta: float) -> complex:
    """Vorticity of one mode at a point of the closed disk."""
    if not 0.0 <= r <= 1.0:
        raise BesselDomainError(f"radius {r} outside [0, 1]")
    j = jn_trio(pair.n, np.array([pair.alpha * r]))[1][0]
    return pair.c_signed * j * np.exp(1j * pair.n * theta)


def velocity_eval(pair: EigenPair, r: float, theta: float) -> np.ndarray:
    """Polar velocity components (u^r, u^theta) of one mode at a point.

    The removable singularity at the center is evaluated by its series
    limit; both components vanish on the boundary circle.
    """
    if not 0.0 <= r <= 1.0:
        raise BesselDomainError(f"radius {r} outside [0, 1]")
    n = pair.n
    if r < _R_LIMIT:
        if n == 1:
            ja = 1.0 / (_SQRT_PI * pair.c_signed)
            r0 = pair.c_signed * (0.5 * pair.alpha - ja) / pair.lam
            ur, ut = 1j * r0, -r0
        else:
            ur, ut = 0.0j, 0.0
    else:
        p = _pair_parts(pair, r)
        ur, ut = 1j * n * p["R"], p["T"]
    return np.array([ur, ut]) * np.exp(1j * n * theta)


def velocity_gradient_eval(pair: EigenPair, r: float, theta: float) -> np.ndarray:
    """Polar gradient tensor [[d_r u^r, tangential], [d_r u^th, tangential]].

    Row i, column j is the j-direction derivative of component i in the
    orthonormal polar frame (curvature terms included), so the trace is the
    divergence and (grad[1,0] - grad[0,1]) is the vorticity.
    """
    if not _R_LIMIT <= r <= 1.0:
        raise BesselDomainError(f"radius {r} outside ({_R_LIMIT}, 1]")
    n = pair.n
    p = _pair_parts(pair, r)
    a = 1j * n * p["Rp"]
    b = (-(n * n) * p["R"] - p["T"]) / r
    c = p["Tp"]
    d = 1j * n * (p["T"] + p["R"]) / r
    return np.array([[a, b], [c, d]]) * np.exp(1j * n * theta)


_basis_cache: dict[tuple[int, int], StokesBasis] = {}


def stokes_basis(n_max: int, k_max: int) -> StokesBasis:
    """Shared basis table covering at least (n_max, k_max)."""
    for (bn, bk), bas in _basis_cache.items():
        if bn >= n_max and bk >= k_max:
            return bas
    key = (max(n_max, 8), max(k_max, 8))
    bas = StokesBasis(*key)
    _basis_cache[key] = bas
    return bas
