"""Critical point, tree generating functions, and the saddle exponent.

For a degree set D with EGF omega, the critical edge density and the constants
of the scaling window come from the branching-ratio equation phi1(zhat) = 1:

    alpha = phi0(zhat) / 2          (critical edge density m/n)
    t3    = zhat omega'''(zhat) / omega'(zhat)
    c2    = t3 alpha zhat / (2 (1 - alpha))
    c3    = 2 t3 alpha zhat / 3
    rho   = zhat / omega'(zhat)     (singularity of the rooted-tree series)

The rooted-tree series T1 solves T1 = z omega'(T1); its derived series
T_ell = z omega^(ell)(T1) count rooted trees weighted by the root's allowed
child counts, U = T0 - T1^2/2 counts unrooted trees, and
V = (log(1/(1-T2)) - T2 - T2^2/2) / 2 counts unicyclic components.

h_eval is the saddle exponent steering contour estimates at edge density r:

    h(z; r) = r log omega'(z) - r log z + (1 - r) log(2 omega(z) - z omega'(z))

whose z-derivative has the sign of (phi0 - 2r)(phi1 - 1)/(phi0 - 2), with
interior roots where phi0(z) = 2r (root1) and phi1(z) = 1 (zhat).
petrov_profile samples Re h on a circle |z| = z0: for z0 at or below
min(root1(r), zhat) the maxima over the angle sit exactly at the multiples of
2 pi / p where p is the degree period.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .degset import (
    DegreeSet,
    egf_eval,
    egf_eval_complex,
    periodicity,
    phi0,
    phi1,
    _power_arrays,
)
from .errors import (
    ConvergenceError,
    NoCriticalPointError,
    OutOfRangeError,
    SingularityError,
)

_BISECT_STEPS = 80
_NEWTON_STEPS = 3


@dataclass(frozen=True)
class CriticalPoint:
    """The critical point and window constants of a degree set."""

    zhat: float
    alpha: float
    t3: float
    c2: float
    c3: float
    rho: float


# omega = e^z limit (all degrees allowed): the classical random-graph values.
ER_CRITICAL_POINT = CriticalPoint(
    zhat=1.0, alpha=0.5, t3=1.0, c2=0.5, c3=1.0 / 3.0, rho=math.exp(-1.0)
)


def _phi1_derivative(ds: DegreeSet, z: float) -> float:
    w1 = egf_eval(ds, z, 1)
    w2 = egf_eval(ds, z, 2)
    w3 = egf_eval(ds, z, 3)
    return (w2 + z * w3) / w1 - z * (w2 / w1) ** 2


@lru_cache(maxsize=128)
def critical_point(ds: DegreeSet) -> CriticalPoint:
    """Solve phi1(zhat) = 1 and assemble the window constants.

    Bracketing by doubling/halving, 80 bisection steps, then a short Newton
    polish.  Deterministic: same inputs give bitwise-identical results.
    """
    lo = hi = 1.0
    for _ in range(200):
        if phi1(ds, lo) < 1.0:
            break
        lo /= 2.0
    else:
        raise NoCriticalPointError(f"phi1 never drops below 1 near 0 for {ds}")
    for _ in range(200):
        if phi1(ds, hi) > 1.0:
            break
        hi *= 2.0
    else:
        raise NoCriticalPointError(
            f"phi1 never exceeds 1 for {ds}; no critical point on the "
            f"materialised degree range"
        )
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if phi1(ds, mid) < 1.0:
            lo = mid
        else:
            hi = mid
    z = 0.5 * (lo + hi)
    for _ in range(_NEWTON_STEPS):
        f = phi1(ds, z) - 1.0
        df = _phi1_derivative(ds, z)
        if df <= 0.0:
            break
        step = f / df
        z_new = z - step
        if not (lo <= z_new <= hi):
            break
        z = z_new
    zhat = z
    alpha = phi0(ds, zhat) / 2.0
    w1 = egf_eval(ds, zhat, 1)
    w3 = egf_eval(ds, zhat, 3)
    t3 = zhat * w3 / w1
    c2 = t3 * alpha * zhat / (2.0 * (1.0 - alpha))
    c3 = 2.0 * t3 * alpha * zhat / 3.0
    rho = zhat / w1
    return CriticalPoint(zhat=zhat, alpha=alpha, t3=t3, c2=c2, c3=c3, rho=rho)


def tree_T(ds: DegreeSet, ell: int, z: float) -> float:
    """T_ell(z) = z omega^(ell)(T1(z)) where T1 solves T1 = z omega'(T1).

    Defined for 0 <= z <= rho; T1 is found by bisection on the concave map
    g(T) = T - z omega'(T) over [0, zhat] plus a guarded Newton polish, and
    the fixed-point residual must come out below 1e-13.
    """
    if ell < 0:
        raise ValueError(f"derivative order must be >= 0, got {ell}")
    if z < 0.0:
        raise ValueError(f"tree_T requires z >= 0, got {z}")
    cp = critical_point(ds)
    if z > cp.rho * (1.0 + 1e-12):
        raise ConvergenceError(
            f"tree series diverges: z = {z} exceeds the singularity "
            f"rho = {cp.rho}",
            residual=z - cp.rho,
        )
    z_eff = min(z, cp.rho)
    if z_eff == 0.0:
        return 0.0
    if z_eff == cp.rho:
        # At the singularity the fixed point is exactly zhat; solving there
        # loses half the float digits to the square-root branch point.
        t1 = cp.zhat
    else:
        t1 = _solve_t1(ds, z_eff, cp.zhat)
    return z * egf_eval(ds, t1, ell)


def _solve_t1(ds: DegreeSet, z: float, zhat: float) -> float:
    def g(t: float) -> float:
        return t - z * egf_eval(ds, t, 1)

    lo, hi = 0.0, zhat
    g_hi = g(hi)
    if g_hi < 0.0:
        # Only roundoff at z = rho can put us here; accept the endpoint if the
        # residual is at noise level.
        if abs(g_hi) < 1e-10 * max(1.0, zhat):
            return hi
        raise ConvergenceError(
            f"no tree fixed point bracket at z = {z}", residual=g_hi
        )
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(_NEWTON_STEPS):
        dg = 1.0 - z * egf_eval(ds, t, 2)
        if abs(dg) < 1e-8:
            break
        t_new = t - g(t) / dg
        if not (0.0 <= t_new <= zhat):
            break
        t = t_new
    resid = g(t)
    if abs(resid) >= 1e-13 * max(1.0, zhat):
        raise ConvergenceError(
            f"tree fixed point residual {resid} too large at z = {z}",
            residual=resid,
        )
    return t


def unrooted_U(ds: DegreeSet, z: float) -> float:
    """Unrooted-tree series U(z) = T0(z) - T1(z)^2 / 2."""
    t0 = tree_T(ds, 0, z)
    t1 = tree_T(ds, 1, z)
    return t0 - 0.5 * t1 * t1


def unicycle_V(ds: DegreeSet, z: float) -> float:
    """Unicyclic-component series V = (log(1/(1-T2)) - T2 - T2^2/2) / 2.

    Diverges at z = rho where T2 reaches 1.
    """
    cp = critical_point(ds)
    if z >= cp.rho:
        raise SingularityError(
            f"unicycle series diverges at z >= rho = {cp.rho}, got {z}"
        )
    t2 = tree_T(ds, 2, z)
    if t2 >= 1.0:
        raise SingularityError(f"T2(z) = {t2} >= 1 at z = {z}")
    return 0.5 * (-math.log1p(-t2) - t2 - 0.5 * t2 * t2)


def root1(ds: DegreeSet, r: float) -> float:
    """Solve phi0(z) = 2r on the positive axis.

    Raises OutOfRangeError when 2r is outside the open range of phi0 (for
    example r = min(D)/2, attained only in the z -> 0 limit).  At r = alpha
    the root coincides with zhat, making the saddle of h a double root.
    """
    target = 2.0 * r
    lo = 1e-12
    if phi0(ds, lo) >= target:
        raise OutOfRangeError(
            f"2r = {target} is at or below the lower limit of phi0 for {ds}; "
            f"no interior root"
        )
    hi = max(1.0, lo)
    for _ in range(200):
        try:
            if phi0(ds, hi) > target:
                break
        except ArithmeticError as exc:
            raise OutOfRangeError(
                f"2r = {target} not reached by phi0 before truncation "
                f"instability for {ds}: {exc}"
            ) from None
        hi *= 2.0
    else:
        raise OutOfRangeError(f"2r = {target} exceeds the range of phi0 for {ds}")
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if phi0(ds, mid) < target:
            lo = mid
        else:
            hi = mid
    z = 0.5 * (lo + hi)
    for _ in range(_NEWTON_STEPS):
        w0 = egf_eval(ds, z, 0)
        w1 = egf_eval(ds, z, 1)
        w2 = egf_eval(ds, z, 2)
        f = z * w1 / w0 - target
        df = (w1 + z * w2) / w0 - z * (w1 / w0) ** 2
        if df <= 0.0:
            break
        z_new = z - f / df
        if not (lo <= z_new <= hi):
            break
        z = z_new
    return z


def h_eval(ds: DegreeSet, z: complex, r: float) -> complex:
    """Saddle exponent h(z; r) with principal-branch logarithms."""
    if z == 0:
        raise ValueError("h_eval undefined at z = 0")
    w0 = egf_eval_complex(ds, z, 0)
    w1 = egf_eval_complex(ds, z, 1)
    tail = 2.0 * w0 - z * w1
    if w1 == 0 or tail == 0:
        raise SingularityError(f"log argument vanishes at z = {z}")
    return r * (cmath.log(w1) - cmath.log(z)) + (1.0 - r) * cmath.log(tail)


@dataclass(frozen=True)
class PetrovProfile:
    """Re h sampled on a circle, with its maxima located on the grid."""

    grid_size: int
    z0: float
    r: float
    period: int
    values: np.ndarray
    argmax_index: int
    argmax_indices: tuple[int, ...]
    expected_positions: tuple[float, ...]
    max_cell_offset: float
    margin: float


def petrov_profile(
    ds: DegreeSet, z0: float, r: float, grid_size: int = 4096
) -> PetrovProfile:
    """Sample Phi(theta) = Re h(z0 e^{i theta}; r) on a uniform angle grid.

    Precondition: 0 < z0 <= min(root1(r), zhat).  The profile's global maxima
    then sit exactly at the angles 2 pi k / p (p the degree period); the
    report locates the grid argmax set and its offset from those angles in
    grid cells.
    """
    cp = critical_point(ds)
    bound = min(root1(ds, r), cp.zhat)
    if not (0.0 < z0 <= bound * (1.0 + 1e-9)):
        raise ValueError(
            f"petrov_profile requires 0 < z0 <= min(root1(r), zhat) = {bound}, "
            f"got z0 = {z0}"
        )
    theta = 2.0 * np.pi * np.arange(grid_size) / grid_size
    zs = z0 * np.exp(1j * theta)
    w0 = _egf_grid(ds, zs, 0)
    w1 = _egf_grid(ds, zs, 1)
    with np.errstate(divide="ignore"):
        vals = r * (np.log(np.abs(w1)) - math.log(z0)) + (1.0 - r) * np.log(
            np.abs(2.0 * w0 - zs * w1)
        )
    p = periodicity(ds)
    j_star = int(np.argmax(vals))
    top = vals[j_star]
    scale = max(1.0, abs(top))
    near = np.nonzero(vals >= top - 1e-12 * scale)[0]
    expected = tuple(k * grid_size / p for k in range(p))
    offsets = []
    for j in near:
        d = min(
            min(abs(j - e), grid_size - abs(j - e)) for e in expected
        )
        offsets.append(d)
    max_off = float(max(offsets)) if offsets else 0.0
    # Margin: drop below the peak once at least one full cell away from every
    # expected position.
    away = np.ones(grid_size, dtype=bool)
    idx = np.arange(grid_size)
    for e in expected:
        d = np.abs(idx - e)
        d = np.minimum(d, grid_size - d)
        away &= d > 1.0
    margin = float(top - vals[away].max()) if away.any() else 0.0
    return PetrovProfile(
        grid_size=grid_size,
        z0=z0,
        r=r,
        period=p,
        values=vals,
        argmax_index=j_star,
        argmax_indices=tuple(int(j) for j in near),
        expected_positions=expected,
        max_cell_offset=max_off,
        margin=margin,
    )


def _egf_grid(ds: DegreeSet, zs: np.ndarray, order: int) -> np.ndarray:
    ps, aux = _power_arrays(ds.degrees, order)
    if ps.size == 0:
        return np.zeros_like(zs)
    small, fact_small, logfact = aux
    out = np.zeros_like(zs)
    for p, f in zip(ps[small], fact_small):
        out += zs ** int(p) / f
    big = ~small
    if big.any():
        logz = np.log(zs.astype(np.complex128))
        for p, lf in zip(ps[big], logfact[big]):
            out += np.exp(int(p) * logz - lf)
    return out
