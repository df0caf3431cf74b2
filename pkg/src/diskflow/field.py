"""Spectral/physical transforms, quadrature, and norms over the disk.

Coefficient arrays store angular indices n = 0..n_theta only; the physical
field is g_{0k} * mode + 2 Re(g_{nk} * mode) for n >= 1, so row 0 must stay
real and every norm identity carries a factor 2 on the n >= 1 rows.  All
norm functions return the *squared* L2 norm, which is the quantity every
downstream functional consumes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .basis import QUANTITIES, StokesBasis
from .bessel import jn_trio

_RULE_TOL = 1.0e-11


class GridError(ValueError):
    """Invalid grid construction or mismatched grids."""


@dataclass
class PolarGrid:
    """Tensor quadrature grid: Gauss-Legendre in r (weights include the
    Jacobian r), equispaced angles with trapezoid weight 2*pi/n_angular."""

    r: np.ndarray
    w: np.ndarray
    n_angular: int
    r_lo: float

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_angular) / self.n_angular

    @property
    def n_radial(self) -> int:
        return self.r.size

    def same_as(self, other: "PolarGrid") -> bool:
        return (self.n_angular == other.n_angular and self.r_lo == other.r_lo
                and self.r.size == other.r.size and np.array_equal(self.r, other.r))


def _gauss_radial(n_radial: int, r_lo: float) -> tuple[np.ndarray, np.ndarray]:
    xi, wq = leggauss(n_radial)
    half = 0.5 * (1.0 - r_lo)
    r = r_lo + half * (xi + 1.0)
    return r, half * wq * r


def _bessel_mass_exact(alpha: float, r_lo: float) -> float:
    # antiderivative of x J_0(a x)^2 is (x^2/2)(J_0(a x)^2 + J_1(a x)^2)
    def f(x):
        _, j0, j1 = jn_trio(0, np.array([alpha * x]))
        return 0.5 * x * x * (j0[0] ** 2 + j1[0] ** 2)

    return f(1.0) - f(r_lo)


def _resolves(r: np.ndarray, w: np.ndarray, alpha: float, r_lo: float) -> bool:
    _, j0, _ = jn_trio(0, alpha * r)
    quad = float(np.sum(w * j0 * j0))
    exact = _bessel_mass_exact(alpha, r_lo)
    return abs(quad - exact) <= _RULE_TOL * max(1.0, abs(exact))


def build_grid(n_radial, n_angular: int, r_lo: float = 0.0,
               validate_alpha: float | None = None,
               max_doublings: int = 8) -> PolarGrid:
    """Quadrature grid on the annulus r_lo < r < 1 (full disk for r_lo = 0).

    With validate_alpha set, the radial node count doubles until the rule
    integrates r * J_0(validate_alpha * r)^2 to within 1e-11 of the closed
    form, so oscillatory mode products up to that wavenumber are trusted.
    """
    if n_radial == "auto":
        n_radial = 32
    if n_radial < 4 or n_angular < 4 or n_angular % 2:
        raise GridError("need n_radial >= 4 and even n_angular >= 4")
    if not 0.0 <= r_lo < 1.0:
        raise GridError(f"r_lo {r_lo} outside [0, 1)")
    n = int(n_radial)
    r, w = _gauss_radial(n, r_lo)
    if validate_alpha is not None:
        for _ in range(max_doublings):
            if _resolves(r, w, validate_alpha, r_lo):
                break
            n *= 2
            r, w = _gauss_radial(n, r_lo)
        else:
            raise GridError(
                f"radial rule not converged for alpha={validate_alpha} on "
                f"({r_lo}, 1) after {max_doublings} doublings")
    return PolarGrid(r=r, w=w, n_angular=int(n_angular), r_lo=float(r_lo))


_radial_rule_cache: dict = {}


def radial_rule(r_lo: float, alpha_max: float, n_start: int = 48) -> tuple[np.ndarray, np.ndarray]:
    """Validated radial-only quadrature rule for mode products up to alpha_max."""
    key = (round(r_lo, 14), round(float(alpha_max), 6), n_start)
    hit = _radial_rule_cache.get(key)
    if hit is not None:
        return hit
    n = n_start
    for _ in range(10):
        r, w = _gauss_radial(n, r_lo)
        if _resolves(r, w, alpha_max, r_lo):
            break
        n *= 2
    else:
        raise GridError(f"radial rule not converged on ({r_lo}, 1)")
    _radial_rule_cache[key] = (r, w)
    return r, w


@dataclass
class SpectralCoeffs:
    """Complex mode coefficients over n = 0..n_theta, k = 1..n_r."""

    g: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.g = np.asarray(self.g, dtype=complex)
        if self.g.ndim != 2 or self.g.shape[1] < 1:
            raise ValueError("coefficient array must be 2-D (n_theta+1, n_r)")

    @property
    def n_theta(self) -> int:
        return self.g.shape[0] - 1

    @property
    def n_r(self) -> int:
        return self.g.shape[1]

    @classmethod
    def zeros(cls, n_theta: int, n_r: int, time: float = 0.0) -> "SpectralCoeffs":
        return cls(g=np.zeros((n_theta + 1, n_r), dtype=complex), time=time)

    def copy(self) -> "SpectralCoeffs":
        return SpectralCoeffs(g=self.g.copy(), time=self.time)

    def to_dict(self) -> dict:
        return {
            "time": float(self.time),
            "n_theta": self.n_theta,
            "n_r": self.n_r,
            "re": self.g.real.tolist(),
            "im": self.g.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralCoeffs":
        g = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
        if g.shape != (int(d["n_theta"]) + 1, int(d["n_r"])):
            raise ValueError("coefficient snapshot shape mismatch")
        return cls(g=g, time=float(d["time"]))


@dataclass
class FieldSample:
    """Real samples of one field quantity on every grid point."""

    grid: PolarGrid
    quantity: str
    values: np.ndarray  # (ncomp, n_angular, n_radial)


def _reality_weights(n_theta: int) -> np.ndarray:
    w = np.full(n_theta + 1, 2.0)
    w[0] = 1.0
    return w


def synthesize(coeffs: SpectralCoeffs, grid: PolarGrid, basis: StokesBasis,
               quantity: str = "vorticity") -> FieldSample:
    """Real physical field of the coefficient state on the grid."""
    nt = coeffs.n_theta
    if nt > basis.n_max or coeffs.n_r > basis.k_max:
        raise ValueError("coefficient truncation exceeds basis table")
    if nt > grid.n_angular // 2 - 1:
        warnings.warn("angular band exceeds grid Nyquist; field will alias")
    ncomp = QUANTITIES[quantity]
    nq = grid.n_radial
    na = grid.n_angular
    spec = np.zeros((ncomp, na // 2 + 1, nq), dtype=complex)
    for n in range(nt + 1):
        prof = basis.profile_matrix(n, grid.r, quantity, k_max=coeffs.n_r)
        row = np.einsum("k,ckq->cq", coeffs.g[n], prof)
        if n == 0:
            row = row.real + 0j
        tgt = n % na
        if tgt > na // 2:  # frequency folds onto its sampled alias
            tgt = na - tgt
            row = np.conj(row)
        spec[:, tgt, :] += row
    vals = np.fft.irfft(spec * na, n=na, axis=1)
    return FieldSample(grid=grid, quantity=quantity, values=vals)


def project(sample: FieldSample, basis: StokesBasis, n_theta: int,
            n_r: int) -> SpectralCoeffs:
    """Mode coefficients of a vorticity sample on a full-disk grid."""
    if sample.quantity != "vorticity":
        raise ValueError("projection is defined for vorticity samples")
    if sample.grid.r_lo != 0.0:
        raise GridError("projection requires a full-disk grid")
    if n_theta > sample.grid.n_angular // 2 - 1:
        warnings.warn("angular band exceeds grid Nyquist; projection will alias")
    chat = np.fft.rfft(sample.values[0], axis=0) / sample.grid.n_angular
    g = np.empty((n_theta + 1, n_r), dtype=complex)
    wgt = sample.grid.w
    for n in range(n_theta + 1):
        # radial profiles are real, so the conjugate in <omega, omega_nk>
        # only touches the angular factor already handled by the FFT
        prof = basis.profile_matrix(n, sample.grid.r, "vorticity", k_max=n_r)
        g[n] = 2.0 * np.pi * (prof[0].real * wgt[None, :]) @ chat[n]
    g[0] = g[0].real
    return SpectralCoeffs(g=g, time=0.0)


def _coeff_norm_sq_disk(coeffs: SpectralCoeffs, basis: StokesBasis,
                        quantity: str) -> float:
    wr = _reality_weights(coeffs.n_theta)[:, None]
    mag = np.abs(coeffs.g) ** 2
    if quantity in ("vorticity", "gradient"):
        return float(np.sum(wr * mag))
    if quantity == "velocity":
        lam = basis.lam[: coeffs.n_theta + 1, : coeffs.n_r]
        return float(np.sum(wr * mag / lam))
    raise ValueError(f"no coefficient fast path for quantity {quantity!r}")


def _coeff_norm_sq_quad(coeffs: SpectralCoeffs, basis: StokesBasis,
                        quantity: str, r: np.ndarray, w: np.ndarray) -> float:
    wr = _reality_weights(coeffs.n_theta)
    total = 0.0
    for n in range(coeffs.n_theta + 1):
        if not np.any(coeffs.g[n]):
            continue
        prof = basis.profile_matrix(n, r, quantity, k_max=coeffs.n_r)
        c = np.einsum("k,ckq->cq", coeffs.g[n], prof)
        total += wr[n] * float(np.sum(w[None, :] * np.abs(c) ** 2))
    return 2.0 * np.pi * total


def norm_l2(source, basis: StokesBasis | None = None, quantity: str = "vorticity",
            delta: float | None = None, n_radial: int = 48) -> float:
    """Squared L2 norm over the disk (delta=None) or the layer 1-delta < r < 1.

    Coefficient input uses the Parseval identities on the full disk for
    vorticity, velocity, and gradient, and a per-angular-mode radial
    quadrature otherwise.  Sample input integrates on the sample's own grid
    (delta must then be None: the region is the grid's region).
    """
    if isinstance(source, FieldSample):
        if delta is not None:
            raise ValueError("sample input integrates over its own grid region")
        s = source.values
        wth = 2.0 * np.pi / source.grid.n_angular
        return float(wth * np.sum(source.grid.w[None, None, :] * s * s))
    if not isinstance(source, SpectralCoeffs):
        raise TypeError("source must be SpectralCoeffs or FieldSample")
    if basis is None:
        raise ValueError("coefficient norms need the basis")
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}")
    if quantity in ("dtau_utau", "dtau_un") and (delta is None or delta >= 1.0):
        # (1/r) d_theta of an n >= 1 mode is not square-integrable across
        # the pole; these norms exist on boundary layers only
        raise ValueError("tangential-gradient norms need a layer width < 1")
    if delta is None:
        return _coeff_norm_sq_disk(source, basis, quantity)
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"layer width {delta} outside (0, 1]")
    r, w = radial_rule(1.0 - delta, _band_alpha_max(source, basis), n_radial)
    return _coeff_norm_sq_quad(source, basis, quantity, r, w)


def _band_alpha_max(coeffs: SpectralCoeffs, basis: StokesBasis) -> float:
    return float(basis.alpha[: coeffs.n_theta + 1, : coeffs.n_r].max())


def inner_product(a: FieldSample, b: FieldSample) -> complex:
    """Quadrature inner product of two samples on the same grid."""
    if not a.grid.same_as(b.grid):
        raise GridError("samples live on different grids")
    if a.values.shape != b.values.shape:
        raise GridError("samples have different component counts")
    wth = 2.0 * np.pi / a.grid.n_angular
    return complex(wth * np.sum(a.grid.w[None, None, :] * a.values * np.conj(b.values)))


def mode_inner_product(basis: StokesBasis, mode_a: tuple[int, int],
                       mode_b: tuple[int, int], quantity: str = "vorticity",
                       delta: float = 1.0, n_angular: int | None = None,
                       n_radial: int = 64) -> complex:
    """Inner product of two complex basis modes over a boundary layer.

    Integrates the actual complex mode values on a tensor grid, so the
    angular cancellation between different angular indices is exercised
    numerically rather than assumed.
    """
    (m, j), (n, k) = mode_a, mode_b
    if n_angular is None:
        n_angular = 2 * max(m, n) + 4
    alpha_max = max(basis.pair(m, j).alpha, basis.pair(n, k).alpha)
    r, w = radial_rule(1.0 - delta, alpha_max, n_radial)
    pa = basis.profile_matrix(m, r, quantity)[:, j - 1, :]
    pb = basis.profile_matrix(n, r, quantity)[:, k - 1, :]
    th = 2.0 * np.pi * np.arange(n_angular) / n_angular
    ang = np.sum(np.exp(1j * (m - n) * th)) * (2.0 * np.pi / n_angular)
    rad = complex(np.sum(w[None, :] * pa * np.conj(pb)))
    return ang * rad


def coeffs_to_json(coeffs: SpectralCoeffs) -> dict:
    return coeffs.to_dict()


def coeffs_from_json(d: dict) -> SpectralCoeffs:
    return SpectralCoeffs.from_dict(d)
