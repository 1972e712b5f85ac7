"""Concrete smooth bump and cutoff functions, and the oscillatory profile V_k.

Only the support and plateau of the bump phi and the cutoff chi matter
structurally; this module pins one vetted pair so every downstream numeric
expectation is well defined:

* phi: the standard C-infinity bump c * exp(-1/(1 - (2t-3)^2)) supported on
  [1, 2], normalized so its integral is 1.  With this support, a scale-k
  average touches exactly the primes in [2^k, 2^(k+1)], and the total mass 1
  makes "multiplier at zero -> 1" the prime-number-theorem consistency check.
* chi: an even C-infinity cutoff equal to exactly 1 on |x| <= 1/4 and exactly
  0 on |x| >= 1/2, realized as a quotient of exponential cutoffs so the
  plateau and vanishing are exact, not approximate.
* chi_s(alpha) = chi(2^(10(s+4)) alpha), evaluated branch-first so huge s
  never overflows.
* v_k(k, alpha) = integral of e(2^k t alpha) phi(t) dt, by composite
  Gauss-Legendre with panel count proportional to the oscillation 2^k|alpha|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PrecisionError

__all__ = [
    "BumpSpec",
    "DEFAULT_BUMP",
    "eval_phi",
    "eval_chi",
    "chi_s",
    "chi_s_support",
    "chi_s_plateau",
    "v_k",
    "phi_deriv_l1",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BumpSpec:
    """Quadrature configuration for the fixed bump phi on [1, 2].

    ``normalization`` is the constant c making the integral of phi exactly 1
    (computed once by quadrature); ``quadrature_points`` is the Gauss-Legendre
    order used per panel; ``max_panels`` caps the oscillation-resolved panel
    count of v_k.
    """

    support_lo: float = 1.0
    support_hi: float = 2.0
    quadrature_points: int = 16
    max_panels: int = 1 << 21

    @property
    def normalization(self) -> float:
        return _normalization_constant()


DEFAULT_BUMP = BumpSpec()


@lru_cache(maxsize=8)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _panel_nodes(a: float, b: float, n_panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights of composite Gauss-Legendre on [a, b] with equal panels."""
    x, w = _leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _raw_bump(t: np.ndarray) -> np.ndarray:
    """exp(-1/(1-(2t-3)^2)) on (1,2), 0 elsewhere; unnormalized."""
    t = np.asarray(t, dtype=np.float64)
    u = 2.0 * t - 3.0
    inside = np.abs(u) < 1.0
    out = np.zeros_like(t)
    if np.any(inside):
        ui = u[inside]
        out[inside] = np.exp(-1.0 / (1.0 - ui * ui))
    return out


@lru_cache(maxsize=1)
def _normalization_constant() -> float:
    nodes, weights = _panel_nodes(1.0, 2.0, 64, 24)
    return 1.0 / float(np.dot(weights, _raw_bump(nodes)))


def eval_phi(t):
    """The normalized bump phi(t) = c exp(-1/(1-(2t-3)^2)) on (1, 2), else 0.

    Accepts scalars or arrays.  c is fixed by quadrature so that the integral
    of phi over the line is 1 (to ~1e-14).
    """
    scalar = np.isscalar(t)
    out = _normalization_constant() * _raw_bump(np.atleast_1d(np.asarray(t, dtype=np.float64)))
    return float(out[0]) if scalar else out


def _h(t: np.ndarray) -> np.ndarray:
    """exp(-1/t) for t > 0, exactly 0 for t <= 0."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def eval_chi(x):
    """Even C-infinity cutoff: exactly 1 on |x| <= 1/4, exactly 0 on |x| >= 1/2.

    chi(x) = h(2-4|x|) / (h(2-4|x|) + h(4|x|-1)) with h(t) = exp(-1/t) on t > 0.
    The symmetry point chi(3/8) = 1/2 is exact.
    """
    scalar = np.isscalar(x)
    ax = 4.0 * np.abs(np.atleast_1d(np.asarray(x, dtype=np.float64)))
    up, down = _h(2.0 - ax), _h(ax - 1.0)
    out = np.ones_like(ax)
    dead = up == 0.0
    out[dead] = 0.0
    mid = ~dead & (down > 0.0)
    out[mid] = up[mid] / (up[mid] + down[mid])
    return float(out[0]) if scalar else out


def chi_s_plateau(s: int) -> float:
    """Half-width of the plateau of chi_s: chi_s = 1 on |alpha| <= 2^(-10(s+4)-2)."""
    return math.ldexp(1.0, -10 * (s + 4) - 2)


def chi_s_support(s: int) -> float:
    """Half-width of the support of chi_s: chi_s = 0 on |alpha| >= 2^(-10(s+4)-1)."""
    return math.ldexp(1.0, -10 * (s + 4) - 1)


def chi_s(s: int, alpha: float) -> float:
    """chi(2^(10(s+4)) alpha), branch-decided without forming the huge product.

    Writing |alpha| = m 2^e with m in [1/2, 1), the scaled argument is
    m 2^(e + 10(s+4)); the integer exponent decides plateau (1) or support
    complement (0) exactly, and only the transition band evaluates chi.
    """
    if s < 0:
        raise ValueError("scale index must be >= 0")
    alpha = float(alpha)
    if alpha == 0.0 or math.isnan(alpha):
        return 1.0 if alpha == 0.0 else math.nan
    m, e = math.frexp(abs(alpha))
    shifted = e + 10 * (s + 4)
    if shifted >= 0:
        return 0.0
    if shifted <= -2:
        return 1.0
    # shifted == -1: scaled argument is m/2 in [1/4, 1/2).
    return eval_chi(m / 2.0)


# -- the oscillatory profile V_k ----------------------------------------------

@lru_cache(maxsize=1)
def phi_deriv_l1() -> tuple[float, float]:
    """(L1 norm of phi', L1 norm of phi''), by quadrature of the closed forms.

    These feed the rigorous decay bound |V_k(alpha)| <= ||phi^(n)||_1 /
    (2 pi 2^k |alpha|)^n used both in tests and to certify the analytic-zero
    shortcut for extreme oscillation.
    """
    nodes, weights = _panel_nodes(1.0, 2.0, 256, 16)
    u = 2.0 * nodes - 3.0
    g = _raw_bump(nodes)
    one_m = 1.0 - u * u
    with np.errstate(divide="ignore", invalid="ignore"):
        w1 = -2.0 * u / one_m**2
        w2 = -2.0 / one_m**2 - 8.0 * u * u / one_m**3
    w1 = np.where(g > 0, w1, 0.0)
    w2 = np.where(g > 0, w2, 0.0)
    c = _normalization_constant()
    # d/dt = 2 d/du ; phi' = 2c g w1, phi'' = 4c g (w2 + w1^2)
    l1_d1 = float(np.dot(weights, np.abs(2.0 * c * g * w1)))
    l1_d2 = float(np.dot(weights, np.abs(4.0 * c * g * (w2 + w1 * w1))))
    return l1_d1, l1_d2


def _oscillatory_integral(X: float, spec: BumpSpec) -> complex:
    """integral over [1,2] of e(X t) phi(t) dt, phases reduced in extended precision."""
    n_panels = int(min(max(16, math.ceil(2.0 * abs(X)) + 8), spec.max_panels))
    nodes, weights = _panel_nodes(1.0, 2.0, n_panels, spec.quadrature_points)
    # X*t can reach ~2^21; reduce mod 1 in 80-bit precision before exp.
    phase = np.mod(np.longdouble(X) * nodes.astype(np.longdouble), 1.0).astype(np.float64)
    vals = _raw_bump(nodes) * np.exp(2j * math.pi * phase)
    return _normalization_constant() * complex(np.dot(weights, vals))


def v_k(k: int, alpha: float, spec: BumpSpec = DEFAULT_BUMP, abs_tol: float = 1e-10) -> complex:
    """V_k(alpha) = integral of e(2^k t alpha) phi(t) dt, to ~1e-10 absolute.

    Depends on alpha only through X = 2^k alpha.  Oscillation is resolved with
    about two Gauss-Legendre panels per period; beyond the panel budget the
    two-step integration-by-parts bound ||phi''||_1 / (2 pi X)^2 either
    certifies the value as 0 within tolerance or a PrecisionError is raised.
    """
    if k < 0:
        raise ValueError("scale must be >= 0")
    X = math.ldexp(float(alpha), k)
    aX = abs(X)
    if aX > math.ldexp(1.0, 40):
        raise PrecisionError(f"|2^k alpha| = {aX:.3g} beyond the supported 2^40 cap")
    needed = math.ceil(2.0 * aX) + 8
    if needed > spec.max_panels:
        _, l1_d2 = phi_deriv_l1()
        bound = l1_d2 / (_TWO_PI * aX) ** 2
        if bound < 0.01 * abs_tol:
            return 0.0 + 0.0j
        raise PrecisionError(
            f"oscillation 2^k|alpha| = {aX:.3g} needs {needed} panels, budget {spec.max_panels}"
        )
    if X < 0:
        return _oscillatory_integral(-X, spec).conjugate()
    return _oscillatory_integral(X, spec)
