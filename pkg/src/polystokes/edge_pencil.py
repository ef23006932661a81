"""Spectrum of the dihedron operator pencil and the edge exponent rules.

Separating r^lambda out of the Stokes system on an infinite wedge of opening
theta turns it into a quadratic eigenvalue problem for an ODE system on the
arc (-theta/2, theta/2): three momentum equations in the Cartesian velocity
components, the divergence row, and three boundary rows per side realizing
the velocity/stress trace operators of the condition index d.

Two routes to the eigenvalues are provided and cross-checked:

* the transcendental equation sin(l*t)*(l^2 sin^2 t - sin^2(l*t)) = 0 for the
  velocity-on-both-sides and stress-on-both-sides pairs, with the real root
  selection rules (pi/theta below pi, the smallest root of
  sin(m*t) + m*sin(t) = 0 above);
* a Chebyshev collocation of the ODE system, linearized to a generalized
  eigenproblem of doubled size and filtered by refinement stability plus a
  normalized pencil residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import eig, svdvals
from scipy.optimize import brentq

from .geometry import BoundaryAssignment, Edge, Polyhedron

__all__ = [
    "DihedronPencil",
    "Spectrum",
    "MuValue",
    "WindowError",
    "BracketingError",
    "dd_nn_residual",
    "mu_real_root",
    "assemble_pencil",
    "solve_spectrum",
    "mu_of_edge_point",
    "mu_k",
    "mu_lower_bound",
    "lambda1_of_edge",
    "MU_THRESHOLD_TWO_THIRDS",
]

# opening angle below which the velocity-pair exponent exceeds 2/3:
# three times the angle whose cosine is 1/4 (about 1.2587*pi)
MU_THRESHOLD_TWO_THIRDS = 3.0 * math.acos(0.25)


class WindowError(RuntimeError):
    """The searched strip is too small to certify the requested eigenvalue."""


class BracketingError(RuntimeError):
    """No sign change found when bracketing a real root (should not happen)."""


@dataclass(frozen=True)
class DihedronPencil:
    """Wedge of opening ``theta`` with condition indices on the two faces."""

    theta: float
    d_plus: int
    d_minus: int
    nu: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.theta < 2.0 * math.pi:
            raise ValueError("theta must lie in (0, 2*pi), got %r" % (self.theta,))
        for d in (self.d_plus, self.d_minus):
            if d not in (0, 1, 2, 3):
                raise ValueError("condition index must be 0..3, got %r" % (d,))
        if not self.nu > 0:
            raise ValueError("nu must be positive")


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues found in a strip, after refinement filtering.

    ``multiplicities`` counts clustered copies from the linearized problem
    (e.g. the ubiquitous eigenvalue 1 of the equal-condition pairs genuinely
    carries a two-dimensional kernel).  ``unresolved`` lists window candidates
    that passed the residual test at the finer discretization but failed to
    reproduce under refinement; they are reported rather than silently
    dropped.
    """

    eigenvalues: Tuple[complex, ...]
    multiplicities: Tuple[int, ...]
    window: Tuple[float, float]
    n: int
    residual_bound: float
    unresolved: Tuple[complex, ...] = ()

    def real_parts(self) -> np.ndarray:
        return np.array([ev.real for ev in self.eigenvalues])


@dataclass(frozen=True)
class MuValue:
    """Edge exponent with its provenance and the eigenvalue role that set it."""

    value: float
    provenance: str  # 'closed-form' | 'numeric' | 'class-bound'
    role: str        # 'lambda1' | 'lambda2'
    is_lower_bound: bool = False
    note: str = ""

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("edge exponent must be positive")


# -- closed forms ---------------------------------------------------------------

def dd_nn_residual(lam: complex, theta: float) -> complex:
    """Transcendental characteristic function for the (0,0) and (3,3) pairs.

    Zeros are exactly the pencil spectrum (lambda != 0 for the velocity pair).
    """
    lam = complex(lam)
    return np.sin(lam * theta) * (lam ** 2 * math.sin(theta) ** 2
                                  - np.sin(lam * theta) ** 2)


def mu_real_root(theta: float, xtol: float = 1e-14) -> float:
    """Edge exponent for the (0,0)/(3,3) pairs: pi/theta below pi, otherwise
    the smallest positive root of sin(m*theta) + m*sin(theta) = 0.
    """
    if not 0.0 < theta < 2.0 * math.pi:
        raise ValueError("theta must lie in (0, 2*pi)")
    if abs(theta - math.pi) <= 1e-12:
        return 1.0  # half-space limit
    if theta < math.pi:
        return math.pi / theta

    def f(m):
        return math.sin(m * theta) + m * math.sin(theta)

    step = min(0.01, math.pi / (4.0 * theta))
    a = step
    fa = f(a)
    while a < 1.0:
        b = min(a + step, 1.0)
        fb = f(b)
        if fa * fb <= 0.0:
            return brentq(f, a, b, xtol=xtol)
        a, fa = b, fb
    raise BracketingError("no root of the edge equation in (0, 1) for theta=%r" % theta)


# -- collocation discretization ---------------------------------------------------

def _cheb(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Chebyshev differentiation matrix and Lobatto nodes on [-1, 1]."""
    k = np.arange(n + 1)
    x = np.cos(np.pi * k / n)
    c = np.hstack([2.0, np.ones(n - 1), 2.0]) * (-1.0) ** k
    X = np.tile(x, (n + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return D, x


def _blocks(p: DihedronPencil, n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row-scaled coefficient matrices (A, B, C) of T(lam) = A + lam B + lam^2 C."""
    if n < 8:
        raise ValueError("collocation size must be at least 8")
    D1, x = _cheb(n)
    half = p.theta / 2.0
    phi = half * x                     # phi[0] = +theta/2, phi[n] = -theta/2
    D = D1 / half
    D2 = D @ D
    m = n + 1
    size = 4 * m
    A = np.zeros((size, size))
    B = np.zeros((size, size))
    C = np.zeros((size, size))
    U = (slice(0, m), slice(m, 2 * m), slice(2 * m, 3 * m))
    P = slice(3 * m, 4 * m)
    cos, sin = np.cos(phi), np.sin(phi)
    nu = p.nu
    r = 0
    # momentum rows at interior nodes; the pressure gradient in Cartesian
    # components is ((lam-1) cos - sin d/dphi, (lam-1) sin + cos d/dphi, 0) P
    for i in range(3):
        for k in range(1, n):
            A[r, U[i]] -= nu * D2[k, :]
            C[r, U[i].start + k] -= nu
            if i == 0:
                A[r, P] -= sin[k] * D[k, :]
                A[r, P.start + k] -= cos[k]
                B[r, P.start + k] += cos[k]
            elif i == 1:
                A[r, P] += cos[k] * D[k, :]
                A[r, P.start + k] -= sin[k]
                B[r, P.start + k] += sin[k]
            r += 1
    # divergence at every node
    for k in range(m):
        B[r, U[0].start + k] += cos[k]
        B[r, U[1].start + k] += sin[k]
        A[r, U[0]] -= sin[k] * D[k, :]
        A[r, U[1]] += cos[k] * D[k, :]
        r += 1
    # boundary rows; endpoint momentum slots are replaced by the traces
    for e, d, sgn in ((0, p.d_plus, 1.0), (n, p.d_minus, -1.0)):
        c0, s0 = math.cos(phi[e]), math.sin(phi[e])
        nvec = (-sgn * s0, sgn * c0, 0.0)
        t_rad = (c0, s0, 0.0)

        def form():
            return np.zeros(size), np.zeros(size)

        # scaled velocity gradient rows G[a][j]: d u_j / d x_a times r^{1-lam}
        G = [[None] * 3 for _ in range(3)]
        for j in range(3):
            a0, b0 = form()
            a0[U[j]] -= s0 * D[e, :]
            b0[U[j].start + e] += c0
            G[0][j] = (a0, b0)
            a1, b1 = form()
            a1[U[j]] += c0 * D[e, :]
            b1[U[j].start + e] += s0
            G[1][j] = (a1, b1)
            G[2][j] = form()

        def strain_normal(a):
            # component a of the scaled strain tensor applied to the normal
            Ar, Br = form()
            for b in range(3):
                if nvec[b]:
                    Aab = 0.5 * (G[a][b][0] + G[b][a][0])
                    Bab = 0.5 * (G[a][b][1] + G[b][a][1])
                    Ar += Aab * nvec[b]
                    Br += Bab * nvec[b]
            return Ar, Br

        rows: List[Tuple[np.ndarray, np.ndarray]] = []
        if d == 0:
            for j in range(3):
                a0, b0 = form()
                a0[U[j].start + e] = 1.0
                rows.append((a0, b0))
        elif d == 1:
            a0, b0 = form()
            a0[U[0].start + e] = c0
            a0[U[1].start + e] = s0
            rows.append((a0, b0))
            a1, b1 = form()
            a1[U[2].start + e] = 1.0
            rows.append((a1, b1))
            Ar, Br = form()
            for a in range(3):
                if nvec[a]:
                    ea, eb = strain_normal(a)
                    Ar += 2 * nu * nvec[a] * ea
                    Br += 2 * nu * nvec[a] * eb
            Ar[P.start + e] -= 1.0
            rows.append((Ar, Br))
        elif d == 2:
            a0, b0 = form()
            a0[U[0].start + e] = nvec[0]
            a0[U[1].start + e] = nvec[1]
            rows.append((a0, b0))
            for tvec in (t_rad, (0.0, 0.0, 1.0)):
                Ar, Br = form()
                for a in range(3):
                    if tvec[a]:
                        ea, eb = strain_normal(a)
                        Ar += tvec[a] * ea
                        Br += tvec[a] * eb
                rows.append((Ar, Br))
        else:  # d == 3
            for a in range(3):
                ea, eb = strain_normal(a)
                Ar = 2 * nu * ea
                Br = 2 * nu * eb
                Ar[P.start + e] -= nvec[a]
                rows.append((Ar, Br))
        for ar, br in rows:
            A[r] += ar
            B[r] += br
            r += 1
    assert r == size
    scale = np.abs(A).max(axis=1) + np.abs(B).max(axis=1) + np.abs(C).max(axis=1)
    scale[scale == 0] = 1.0
    A /= scale[:, None]
    B /= scale[:, None]
    C /= scale[:, None]
    return A, B, C


def assemble_pencil(p: DihedronPencil, lam: complex, n: int) -> np.ndarray:
    """Dense discretization of the pencil at a fixed spectral parameter."""
    A, B, C = _blocks(p, n)
    return A + lam * B + lam ** 2 * C


def pencil_residual(p: DihedronPencil, lam: complex, n: int) -> float:
    """Normalized smallest singular value of the discretized pencil."""
    sv = svdvals(assemble_pencil(p, lam, n))
    return float(sv[-1] / sv[0])


def _raw_eigenvalues(p: DihedronPencil, n: int) -> np.ndarray:
    A, B, C = _blocks(p, n)
    size = A.shape[0]
    I = np.eye(size)
    Z = np.zeros_like(A)
    lhs = np.block([[A, B], [Z, I]])
    rhs = np.block([[Z, -C], [I, Z]])
    w = eig(lhs, rhs, right=False)
    return w[np.isfinite(w)]


def solve_spectrum(p: DihedronPencil, window: Tuple[float, float] = (0.0, 2.0),
                   n: int = 32, stab_tol: float = 1e-6,
                   res_tol: float = 1e-8) -> Spectrum:
    """Eigenvalues of the pencil in a strip re_lo <= Re <= re_hi.

    The quadratic pencil is linearized to a generalized eigenproblem of
    doubled size; reported eigenvalues must reproduce under n -> 2n within
    ``stab_tol`` and have normalized residual below ``res_tol``.
    """
    re_lo, re_hi = window
    if not re_lo < re_hi or not np.isfinite(re_lo) or not np.isfinite(re_hi):
        raise ValueError("window must be a bounded strip")
    coarse = _raw_eigenvalues(p, n)
    fine = _raw_eigenvalues(p, 2 * n)
    sel = fine[(fine.real >= re_lo - 1e-12) & (fine.real <= re_hi + 1e-12)]
    kept: List[complex] = []
    unresolved: List[complex] = []
    worst = 0.0
    for lam in sel:
        dist = np.abs(coarse - lam).min() if len(coarse) else np.inf
        res = pencil_residual(p, complex(lam), 2 * n)
        if dist <= stab_tol and res <= res_tol:
            kept.append(complex(lam))
            worst = max(worst, res)
        elif res <= res_tol:
            unresolved.append(complex(lam))
    # cluster multiple copies of the same eigenvalue
    kept.sort(key=lambda z: (z.real, z.imag))
    values: List[complex] = []
    counts: List[int] = []
    for lam in kept:
        if values and abs(lam - values[-1]) <= 10 * stab_tol:
            counts[-1] += 1
        else:
            values.append(lam)
            counts.append(1)
    return Spectrum(tuple(values), tuple(counts), (re_lo, re_hi), n, worst,
                    tuple(sorted(unresolved, key=lambda z: (z.real, z.imag))))


# -- exponent selection --------------------------------------------------------

def _pair_parity(d_plus: int, d_minus: int) -> Tuple[bool, int]:
    total = d_plus + d_minus
    even = total % 2 == 0
    m = 1 if total in (0, 6) else 2
    return even, m


def _takes_second_eigenvalue(theta: float, d_plus: int, d_minus: int) -> bool:
    even, m = _pair_parity(d_plus, d_minus)
    return even and theta < math.pi / m - 1e-12


def mu_of_edge_point(theta: float, d_plus: int, d_minus: int, spectrum: Spectrum,
                     re_min: float = 1e-3, cert_tol: float = 1e-6) -> MuValue:
    """Select the edge exponent from a computed spectrum by the parity rule.

    Needs the window to certify the first eigenvalue (smallest positive real
    part) and, on the second-eigenvalue branch, the smallest real part above
    one.  Eigenvalues on the line Re = 1 other than 1 itself make the
    selection ambiguous and raise :class:`WindowError`.
    """
    if spectrum.window[0] > 0.0:
        raise WindowError("window must start at or below 0 to certify the first eigenvalue")
    res = [ev.real for ev in spectrum.eigenvalues if ev.real > re_min]
    if not res:
        raise WindowError("no eigenvalue with positive real part in the window; widen it")
    lam1 = min(res)
    if _takes_second_eigenvalue(theta, d_plus, d_minus):
        near_one = [ev for ev in spectrum.eigenvalues
                    if abs(ev.real - 1.0) <= cert_tol and abs(ev - 1.0) > cert_tol]
        if near_one:
            raise WindowError("eigenvalue with real part 1 other than 1 itself; "
                              "cannot certify the second-eigenvalue selection")
        above = [re for re in res if re > 1.0 + cert_tol]
        if not above:
            raise WindowError("window contains no eigenvalue with real part above 1; widen it")
        # certified only when strictly inside the window
        lam2 = min(above)
        if lam2 >= spectrum.window[1] - 1e-9:
            raise WindowError("second eigenvalue sits at the window edge; widen it")
        return MuValue(lam2, "numeric", "lambda2")
    if lam1 >= spectrum.window[1] - 1e-9:
        raise WindowError("first eigenvalue sits at the window edge; widen it")
    return MuValue(lam1, "numeric", "lambda1")


def _closed_form_mu(theta: float) -> MuValue:
    value = mu_real_root(theta)
    role = "lambda2" if theta < math.pi - 1e-12 else "lambda1"
    return MuValue(value, "closed-form", role)


def mu_numeric(theta: float, d_plus: int, d_minus: int, n: int = 32) -> MuValue:
    """Edge exponent via the collocation solver, widening the strip as needed."""
    hi = max(2.4, math.pi / theta + 0.8)
    for _ in range(4):
        spec = solve_spectrum(DihedronPencil(theta, d_plus, d_minus), (0.0, hi), n=n)
        try:
            return mu_of_edge_point(theta, d_plus, d_minus, spec)
        except WindowError:
            hi *= 1.6
    raise WindowError("could not certify the edge exponent up to Re = %.2f" % hi)


def mu_lower_bound(d_plus: int, d_minus: int, theta: float) -> Optional[MuValue]:
    """Guaranteed lower bound for the edge exponent of a mixed pair, if known.

    Returns None when no bound is available for the pair; the numeric solver
    is the fallback there.
    """
    pair = tuple(sorted((d_plus, d_minus)))
    if pair in ((0, 0), (3, 3)):
        # exact values exist; still provide the generic bound for table use
        bound, note = Fraction(1, 2), "equal conditions on both faces"
        if theta < MU_THRESHOLD_TWO_THIRDS:
            bound, note = Fraction(2, 3), "opening below the 2/3-threshold angle"
        if theta < math.pi:
            bound, note = Fraction(1, 1), "opening below pi"
        if theta < 0.75 * math.pi:
            bound, note = Fraction(4, 3), "opening below 3*pi/4"
        return MuValue(float(bound), "class-bound", "lambda1", True, note)
    if pair == (0, 3):
        return MuValue(0.25, "class-bound", "lambda1", True,
                       "velocity against stress across the edge")
    if pair in ((0, 1), (0, 2)):
        bound, note = Fraction(1, 4), "condition changes across the edge"
        if theta < 1.5 * math.pi:
            bound, note = Fraction(1, 3), "condition change, opening below 3*pi/2"
        if pair == (0, 1) and theta < 0.5 * MU_THRESHOLD_TWO_THIRDS:
            bound, note = Fraction(2, 3), "tangential-velocity edge below half the 2/3-threshold"
        if pair == (0, 2):
            if theta < 0.75 * math.pi:
                bound, note = Fraction(2, 3), "slip edge, opening below 3*pi/4"
            if theta < 0.5 * math.pi:
                bound, note = Fraction(1, 1), "slip edge, opening below pi/2"
            if theta < 0.375 * math.pi:
                bound, note = Fraction(4, 3), "slip edge, opening below 3*pi/8"
        return MuValue(float(bound), "class-bound", "lambda1", True, note)
    return None


def mu_k(poly: Polyhedron, bc: BoundaryAssignment, edge: Edge,
         method: str = "auto", n: int = 32) -> MuValue:
    """Edge exponent of a mesh edge (constant along straight edges).

    The infimum over the edge collapses to a single evaluation because the
    opening angle is constant; the API keeps the edge-level entry point so
    curved generalizations stay possible.
    """
    d_plus, d_minus = bc.pair(edge)
    theta = poly.dihedral_angle(edge)
    pair = tuple(sorted((d_plus, d_minus)))
    if method not in ("auto", "closed-form", "numeric"):
        raise ValueError("method must be auto, closed-form or numeric")
    if pair in ((0, 0), (3, 3)) and method != "numeric":
        return _closed_form_mu(theta)
    if method == "closed-form":
        raise ValueError("no closed form for the pair %r" % (pair,))
    return mu_numeric(theta, d_plus, d_minus, n=n)


def lambda1_of_edge(d_plus: int, d_minus: int, theta: float,
                    allow_numeric: bool = True, n: int = 32) -> MuValue:
    """Real part of the first pencil eigenvalue, for the weight window of the
    small-data existence result.

    Velocity-velocity edges have a closed form (1 up to the half-space
    opening, then the real-root branch).  Changed-condition edges with the
    velocity given on one side carry the guaranteed bound 1/3 up to opening
    3*pi/2; anything else falls back to the numeric solver.
    """
    pair = tuple(sorted((d_plus, d_minus)))
    if pair == (0, 0):
        if theta <= math.pi + 1e-12:
            return MuValue(1.0, "closed-form", "lambda1")
        return MuValue(mu_real_root(theta), "closed-form", "lambda1")
    if pair in ((0, 1), (0, 2)) and theta <= 1.5 * math.pi + 1e-12:
        return MuValue(1.0 / 3.0, "class-bound", "lambda1", True,
                       "changed-condition edge with opening at most 3*pi/2")
    if pair == (0, 3):
        return MuValue(0.25, "class-bound", "lambda1", True,
                       "velocity against stress across the edge")
    if not allow_numeric:
        raise WindowError("no closed form or bound for pair %r" % (pair,))
    spec = solve_spectrum(DihedronPencil(theta, d_plus, d_minus), (0.0, 1.8), n=n)
    res = [ev.real for ev in spec.eigenvalues if ev.real > 1e-3]
    if not res:
        raise WindowError("no positive eigenvalue found for pair %r" % (pair,))
    return MuValue(min(res), "numeric", "lambda1")
