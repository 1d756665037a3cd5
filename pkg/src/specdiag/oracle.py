"""Grid realizations of the four differential operators.

These never touch eigenvalues or transforms; they differentiate function
values by centered finite differences (or FFT on the torus), so agreement
with the coefficient-space computations is an independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bases import BasisFamily, Hermite, Jacobi, Laguerre, Torus, eval_basis
from .errors import DomainError, MarginError, ParameterError, ResolutionError
from .transforms import GridFunction, SmoothFunction

DEFAULT_ORDER = 8
POINTS_PER_OSCILLATION = 16
DEFAULT_SPACING = {"torus": 2 * math.pi / 1024, "jacobi": 2e-3, "hermite": 1e-2, "laguerre": 1e-2}


def fornberg_weights(z: float, x, m: int) -> np.ndarray:
    """Finite-difference weights at ``z`` for derivatives 0..m on nodes ``x``.

    Returns an array of shape (m + 1, len(x)); row k holds the weights of the
    k-th derivative.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if m >= n:
        raise ParameterError(f"{n} nodes cannot determine derivative order {m}")
    c = np.zeros((m + 1, n))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


@dataclass(frozen=True)
class FiniteDifferenceStencil:
    """Centered stencil of a given accuracy order on a uniform spacing.

    ``coefficients[k]`` are the weights (for unit spacing) of the k-th
    derivative on offsets ``-half..half``; divide by spacing**k.
    """

    order: int = DEFAULT_ORDER
    spacing: float = 1e-2
    max_derivative: int = 2
    coefficients: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.order < 2 or self.order % 2:
            raise ParameterError(f"stencil order must be an even integer ≥ 2, got {self.order}")
        if not self.spacing > 0:
            raise ParameterError(f"spacing must be positive, got {self.spacing}")
        w = fornberg_weights(0.0, self.offsets, self.max_derivative)
        object.__setattr__(self, "coefficients", {k: w[k] for k in range(self.max_derivative + 1)})

    @property
    def half(self) -> int:
        # a centered stencil of 2*half+1 points is accurate to order 2*half - 2*floor((k-1)/2)
        return self.order // 2 + (self.max_derivative - 1) // 2

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.half, self.half + 1, dtype=float)

    def derivatives(self, f, t, spacing=None):
        """Derivatives 0..max_derivative of ``f`` at points ``t``.

        ``spacing`` may be an array (one spacing per point).
        """
        t = np.asarray(t, dtype=float)
        h = self.spacing if spacing is None else np.asarray(spacing, dtype=float)
        h = np.broadcast_to(h, t.shape)
        pts = t[..., None] + h[..., None] * self.offsets
        vals = np.asarray(f(pts))
        out = []
        for k in range(self.max_derivative + 1):
            out.append((vals @ self.coefficients[k]) / h**k)
        return out


def _distance_to_boundary(b: BasisFamily, t):
    lo, hi = b.domain
    return np.minimum(t - lo, hi - t)


def _spacings(b, stencil, t, adaptive, laguerre_direct):
    h0 = stencil.spacing
    if isinstance(b, (Torus, Hermite)):
        return np.full(t.shape, h0)
    dist = _distance_to_boundary(b, t)
    if np.any(dist <= 0):
        raise MarginError(f"{b.kind}: grid points must lie strictly inside the domain")
    need = stencil.half
    if adaptive:
        if laguerre_direct:
            # the singular coefficient needs room; keep the stencil away from 0
            return np.minimum(h0, dist / (need + 10))
        return np.minimum(h0, dist / (need + 1))
    lim = need * h0
    if laguerre_direct:
        lim = max(lim, 10 * h0)
    if np.any(dist < lim):
        raise MarginError(
            f"{b.kind}: grid needs a margin of {lim:.3g} from the boundary at spacing {h0:.3g}"
        )
    return np.full(t.shape, h0)


def _torus_fd(b: Torus, f, t, order, h):
    deg = len(b.poly) - 1
    out = b.poly[0] * np.asarray(f(t), dtype=complex)
    if deg == 0:
        return out
    st = FiniteDifferenceStencil(order, h, max_derivative=deg)
    ders = st.derivatives(f, t)
    for k in range(1, deg + 1):
        if b.poly[k]:
            out = out + b.poly[k] * ders[k]
    return out


def spectral_torus_operator(b: Torus, values) -> np.ndarray:
    """P(d/dt) applied to equispaced samples on [0, 2π) via FFT.

    Exact for trigonometric polynomials of degree below half the sample count.
    """
    v = np.asarray(values, dtype=complex)
    m = v.size
    k = np.fft.fftfreq(m, d=1.0 / m)
    if m % 2 == 0:
        k[m // 2] = 0  # the Nyquist mode has no well-defined derivative
    return np.fft.ifft(b.eigenvalues(k) * np.fft.fft(v))


def apply_operator_grid(b: BasisFamily, f, grid, spacing: float | None = None,
                        order: int = DEFAULT_ORDER, adaptive: bool = False,
                        method: str = "fd") -> GridFunction:
    """T f sampled on ``grid`` by centered finite differences.

    ``f`` is a :class:`SmoothFunction`.  For Laguerre families a smooth-part
    ``f`` (f = t^{α/2} g) is differentiated through g, which keeps the
    stencil away from the t^{α/2} and 1/t singularities; the returned
    values are then the smooth part of T f.  Otherwise the operator is
    applied to f directly and points closer than 10 spacings to 0 are
    rejected.

    ``adaptive=True`` shrinks the spacing near finite endpoints instead of
    raising :class:`MarginError`.  On the torus ``method="spectral"`` uses
    FFT differentiation of equispaced samples (``grid`` must be
    ``2π k/m``).
    """
    if not isinstance(f, SmoothFunction):
        f = SmoothFunction(f)
    t = np.asarray(grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ParameterError("grid must be a non-empty 1-d array")
    h0 = DEFAULT_SPACING.get(b.kind) if spacing is None else float(spacing)
    if h0 is None:
        raise ParameterError(f"no operator oracle for {b.kind} families")

    if isinstance(b, Torus):
        if method == "spectral":
            m = t.size
            if not np.allclose(t, 2 * np.pi * np.arange(m) / m, atol=1e-12):
                raise ParameterError("spectral torus oracle needs the grid 2πk/m, k = 0..m-1")
            vals = spectral_torus_operator(b, f(t))
        else:
            vals = _torus_fd(b, f, t, order, h0)
        return GridFunction(t, vals, b)
    if method != "fd":
        raise ParameterError(f"method {method!r} is only available on the torus")

    smooth = isinstance(b, Laguerre) and f.smooth_part
    direct_laguerre = isinstance(b, Laguerre) and not smooth
    st = FiniteDifferenceStencil(order, h0)
    h = _spacings(b, st, t, adaptive, direct_laguerre)
    u, du, d2u = st.derivatives(f, t, h)

    if isinstance(b, Jacobi):
        a, be = b.alpha, b.beta
        vals = (1 - t * t) * d2u + (be - a - (a + be + 2) * t) * du
    elif isinstance(b, Hermite):
        vals = d2u - t * t * u
    elif smooth:
        a = b.alpha
        vals = t * d2u + (a + 1) * du - 0.25 * t * u + 0.5 * (a + 1) * u
    elif isinstance(b, Laguerre):
        a = b.alpha
        vals = t * d2u + du - 0.25 * t * u - a * a / (4 * t) * u + 0.5 * (a + 1) * u
    else:
        raise ParameterError(f"no operator oracle for {b.kind} families")
    return GridFunction(t, vals, b, smooth=smooth)


def operator_function(b: BasisFamily, f: SmoothFunction, spacing: float | None = None,
                      order: int = DEFAULT_ORDER) -> SmoothFunction:
    """T f as a :class:`SmoothFunction` (adaptive spacing near endpoints).

    Lets the transforms analyze oracle output at their own quadrature nodes.
    """
    if not isinstance(f, SmoothFunction):
        f = SmoothFunction(f)

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        return apply_operator_grid(b, f, flat, spacing, order, adaptive=True).values.reshape(t.shape)

    return SmoothFunction(evaluate, b.domain, smooth_part=f.smooth_part, name=f"T[{f.name}]")


def _local_frequency(b: BasisFamily, n: int, t):
    """Rough oscillation rate (radians per unit t) of b_n near t."""
    n = abs(int(n))
    if isinstance(b, Torus):
        return np.full(t.shape, float(n))
    if isinstance(b, Jacobi):
        return n / np.sqrt(np.maximum(1 - t * t, 1e-300))
    if isinstance(b, Hermite):
        return np.full(t.shape, math.sqrt(2 * n + 1))
    return np.sqrt((n + 1) / np.maximum(t, 1e-300))


def crosscheck_eigenrelation(b: BasisFamily, n: int, grid, spacing: float | None = None,
                             order: int = DEFAULT_ORDER) -> float:
    """‖T b_n - eig(n) b_n‖_∞ / ‖b_n‖_∞ on ``grid``.

    Raises :class:`ResolutionError` if the grid or the stencil spacing gives
    fewer than 16 points per local oscillation of b_n.
    """
    t = np.sort(np.asarray(grid, dtype=float))
    if t.size < 2:
        raise ParameterError("grid needs at least two points")
    h0 = DEFAULT_SPACING[b.kind] if spacing is None else float(spacing)
    freq = _local_frequency(b, n, t)
    gaps = np.diff(t)
    with np.errstate(divide="ignore"):
        grid_res = 2 * np.pi / (np.maximum(freq[:-1], freq[1:]) * gaps)
    if freq.max() > 0 and (np.min(grid_res) < POINTS_PER_OSCILLATION
                           or 2 * np.pi / (freq.max() * h0) < POINTS_PER_OSCILLATION):
        raise ResolutionError(
            f"{b.kind} degree {n} is not resolved by this grid/spacing "
            f"(need {POINTS_PER_OSCILLATION} points per oscillation)"
        )
    smooth = isinstance(b, Laguerre)
    f = SmoothFunction(lambda x: eval_basis(b, n, x, smooth=smooth), b.domain, smooth_part=smooth)
    tf = apply_operator_grid(b, f, t, h0, order)
    ref = f(t)
    scale = np.max(np.abs(ref))
    if scale == 0:
        raise DomainError(f"b_{n} vanishes on the whole grid")
    return float(np.max(np.abs(tf.values - b.eigenvalue(n) * ref)) / scale)
