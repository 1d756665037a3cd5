"""The diagonalizing families: torus exponentials, normalized Jacobi
polynomials, Hermite functions and normalized Laguerre functions.

Polynomial families are evaluated by forward three-term recurrence on the
*orthonormal* polynomials, with a running log-scale so that neither the
polynomial part nor the exponential envelope can overflow or underflow
prematurely.  A value is assembled as ``sign(m) * exp(log|m| + s + env)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar

import numpy as np
from scipy.special import gammaln

from .core import INTEGERS, NATURALS, EigenvalueMap, IndexSet
from .errors import DomainError, ParameterError

_RESCALE = 1e150


@dataclass(frozen=True)
class WeightSpec:
    """Weight attached to a family.

    ``measure_density`` is the density of the L^p measure of the family
    (1/2π on the torus, (1-t)^α(1+t)^β for Jacobi, 1 for Hermite and
    Laguerre).  ``gauss_density`` is the classical weight whose orthonormal
    polynomials drive Golub-Welsch (e^{-t^2} for Hermite, t^α e^{-t} for
    Laguerre; identical to the measure otherwise).
    """

    kind: str
    alpha: float = 0.0
    beta: float = 0.0

    @property
    def interval(self) -> tuple:
        return {
            "torus": (0.0, 2 * math.pi),
            "jacobi": (-1.0, 1.0),
            "hermite": (-math.inf, math.inf),
            "laguerre": (0.0, math.inf),
        }[self.kind]

    def measure_density(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "torus":
            return np.full_like(t, 1 / (2 * math.pi))
        if self.kind == "jacobi":
            return (1 - t) ** self.alpha * (1 + t) ** self.beta
        return np.ones_like(t)

    def log_gauss_density(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "torus":
            return np.full_like(t, -math.log(2 * math.pi))
        if self.kind == "jacobi":
            with np.errstate(divide="ignore"):
                return self.alpha * np.log1p(-t) + self.beta * np.log1p(t)
        if self.kind == "hermite":
            return -t * t
        with np.errstate(divide="ignore"):
            return (self.alpha * np.log(t) if self.alpha else 0.0) - t

    def gauss_density(self, t):
        return np.exp(self.log_gauss_density(t))

    @property
    def gauss_mass(self) -> float:
        a, b = self.alpha, self.beta
        if self.kind == "torus":
            return 1.0
        if self.kind == "jacobi":
            return math.exp((a + b + 1) * math.log(2) + gammaln(a + 1) + gammaln(b + 1) - gammaln(a + b + 2))
        if self.kind == "hermite":
            return math.sqrt(math.pi)
        return math.exp(gammaln(a + 1))


class BasisFamily:
    """Common interface of a diagonalizing family.

    Subclasses provide ``index_kind``, ``domain``, ``eigenvalues`` and
    ``_matrix`` (values of every basis function of the truncated index set
    at an array of points).
    """

    kind: ClassVar[str] = "abstract"
    index_kind: ClassVar[str] = NATURALS

    @property
    def domain(self) -> tuple:
        raise NotImplementedError

    def index_set(self, max_degree: int) -> IndexSet:
        return IndexSet(self.index_kind, max_degree)

    def eigenvalues(self, n) -> np.ndarray:
        raise NotImplementedError

    def eigenvalue(self, n: int) -> complex:
        return complex(np.asarray(self.eigenvalues(np.array([n])))[0])

    def check_domain(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if not np.all(np.isfinite(t)):
            raise DomainError(f"{self.kind}: evaluation points must be finite")
        lo, hi = self.domain
        if np.any(t < lo) or np.any(t > hi):
            raise DomainError(f"{self.kind}: points outside the domain [{lo}, {hi}]")
        return t

    def matrix(self, max_degree: int, t, smooth: bool = False) -> np.ndarray:
        """Basis values, shape ``t.shape + (index_set.size,)``.

        ``smooth=True`` drops the t^{α/2} factor (Laguerre only; a no-op
        elsewhere).
        """
        t = self.check_domain(t)
        flat = self._matrix(int(max_degree), t.reshape(-1), smooth)
        return flat.reshape(t.shape + (flat.shape[-1],))

    def _matrix(self, max_degree, t, smooth):
        raise NotImplementedError

    def evaluate(self, n: int, t, smooth: bool = False):
        idx = self.index_set(abs(int(n)))
        col = self.matrix(abs(int(n)), t, smooth)[..., idx.position(n)]
        return col

    @property
    def is_real(self) -> bool:
        return True

    @property
    def weight(self) -> WeightSpec:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class Torus(BasisFamily):
    """Exponentials e_n(t) = e^{int} on [0, 2π]; T = P(d/dt), eigenvalue P(in).

    ``poly`` lists the coefficients of P in ascending powers.  Points outside
    [0, 2π] are accepted (functions on the torus are 2π-periodic).
    """

    poly: tuple = (0, 1)
    kind: ClassVar[str] = "torus"
    index_kind: ClassVar[str] = INTEGERS

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(complex(a) for a in self.poly))
        if not self.poly:
            raise ParameterError("polynomial P needs at least one coefficient")

    @property
    def domain(self):
        return (0.0, 2 * math.pi)

    def check_domain(self, t):
        t = np.asarray(t, dtype=float)
        if not np.all(np.isfinite(t)):
            raise DomainError("torus: evaluation points must be finite")
        return t

    def eigenvalues(self, n):
        x = 1j * np.asarray(n, dtype=float)
        acc = np.zeros_like(x, dtype=complex)
        for a in reversed(self.poly):
            acc = acc * x + a
        return acc

    def _matrix(self, max_degree, t, smooth):
        n = np.arange(-max_degree, max_degree + 1)
        return np.exp(1j * np.outer(t, n))

    @property
    def is_real(self):
        return False

    @property
    def weight(self):
        return WeightSpec("torus")

    def describe(self):
        return {"kind": self.kind, "poly": [[a.real, a.imag] for a in self.poly]}


class _OrthoPolyFamily(BasisFamily):
    """Families b_n = p_n * exp(envelope) with p_n orthonormal polynomials.

    ``recurrence(m)`` returns (A, B, C, p0) with
    ``p_{k+1} = (A_k t + B_k) p_k - C_k p_{k-1}``.
    """

    def recurrence(self, m: int):
        raise NotImplementedError

    def jacobi_matrix(self, m: int):
        """Diagonal and off-diagonal of the symmetric Jacobi matrix."""
        A, B, C, _ = self.recurrence(m)
        diag = -B[:m] / A[:m]
        off = 1.0 / np.abs(A[: m - 1])
        return diag, off

    def log_envelope(self, t, smooth=False):
        return np.zeros_like(t)

    def _matrix(self, max_degree, t, smooth):
        mant, logs = scaled_recurrence(self, max_degree + 1, t)
        env = self.log_envelope(t, smooth)
        with np.errstate(divide="ignore", under="ignore", invalid="ignore"):
            out = np.sign(mant) * np.exp(np.log(np.abs(mant)) + logs + env[None, :])
        out[mant == 0] = 0.0
        return out.T

    def series(self, coeffs, t, smooth: bool = False) -> np.ndarray:
        """Σ_k coeffs[k] b_k(t) without forming the basis matrix.

        The partial sum is carried in the same rescaled units as the
        recurrence, so it never overflows either.
        """
        t = self.check_domain(t)
        shape = t.shape
        t = t.reshape(-1)
        coeffs = np.asarray(coeffs)
        m = coeffs.size
        if m == 0:
            return np.zeros(shape)
        A, B, C, p0 = self.recurrence(max(m, 1))
        prev = np.zeros(t.size)
        cur = np.full(t.size, float(p0))
        acc = coeffs[0] * cur
        ls = np.zeros(t.size)
        for k in range(m - 1):
            prev, cur = cur, (A[k] * t + B[k]) * cur - C[k] * prev
            big = np.abs(cur) > _RESCALE
            if big.any():
                sc = np.where(big, np.abs(cur), 1.0)
                cur, prev, acc = cur / sc, prev / sc, acc / sc
                ls = ls + np.log(sc)
            acc = acc + coeffs[k + 1] * cur
        env = self.log_envelope(t, smooth)
        with np.errstate(under="ignore", over="ignore", invalid="ignore"):
            out = acc * np.exp(ls + env)
        out = np.where(acc == 0, 0, out)
        return out.reshape(shape)


def scaled_recurrence(family: _OrthoPolyFamily, m: int, t, derivative: bool = False):
    """Run the orthonormal recurrence for degrees 0..m-1 at points ``t``.

    Returns ``(mant, logs)`` (and ``dmant`` when ``derivative``), each of
    shape (m, len(t)), with ``p_k(t) = mant[k] * exp(logs[k])``.
    """
    t = np.asarray(t, dtype=float).reshape(-1)
    A, B, C, p0 = family.recurrence(max(m, 1))
    mant = np.empty((m, t.size))
    logs = np.empty((m, t.size))
    dmant = np.empty((m, t.size)) if derivative else None
    prev = np.zeros(t.size)
    cur = np.full(t.size, float(p0))
    dprev = np.zeros(t.size)
    dcur = np.zeros(t.size)
    ls = np.zeros(t.size)
    mant[0], logs[0] = cur, ls
    if derivative:
        dmant[0] = dcur
    for k in range(m - 1):
        lin = A[k] * t + B[k]
        nxt = lin * cur - C[k] * prev
        if derivative:
            dnxt = A[k] * cur + lin * dcur - C[k] * dprev
            dprev, dcur = dcur, dnxt
        prev, cur = cur, nxt
        scale = np.maximum(np.abs(cur), np.abs(dcur)) if derivative else np.abs(cur)
        big = scale > _RESCALE
        if big.any():
            s = np.where(big, scale, 1.0)
            cur, prev = cur / s, prev / s
            if derivative:
                dcur, dprev = dcur / s, dprev / s
            ls = ls + np.log(s)
        mant[k + 1], logs[k + 1] = cur, ls
        if derivative:
            dmant[k + 1] = dcur
    if derivative:
        return mant, logs, dmant
    return mant, logs


def jacobi_normalization_log(n, alpha, beta):
    """log of the factor turning P_n^{(α,β)} into the orthonormal p_n^{(α,β)}."""
    n = np.asarray(n, dtype=float)
    s = alpha + beta
    with np.errstate(divide="ignore", invalid="ignore"):
        # (2n+s+1) Γ(n+s+1) = Γ(n+s+2)/(n+s+1) * (2n+s+1); stable also at n=0, s=-1
        lead = np.where(
            n == 0,
            gammaln(s + 2),
            np.log(2 * n + s + 1) + gammaln(n + s + 1),
        )
    val = lead + gammaln(n + 1) - (s + 1) * math.log(2) - gammaln(n + alpha + 1) - gammaln(n + beta + 1)
    return 0.5 * val


@dataclass(frozen=True)
class Jacobi(_OrthoPolyFamily):
    """Normalized Jacobi polynomials on [-1, 1] with weight (1-t)^α (1+t)^β."""

    alpha: float = 0.0
    beta: float = 0.0
    kind: ClassVar[str] = "jacobi"

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ParameterError(f"Jacobi parameters need α, β > -1, got ({self.alpha}, {self.beta})")

    @property
    def domain(self):
        return (-1.0, 1.0)

    @property
    def transform_regime(self) -> bool:
        """True when α, β ≥ -1/2 (transform is a topological isomorphism)."""
        return self.alpha >= -0.5 and self.beta >= -0.5

    def eigenvalues(self, n):
        n = np.asarray(n, dtype=float)
        return (-n * (n + self.alpha + self.beta + 1)).astype(complex)

    def recurrence(self, m):
        a, b = self.alpha, self.beta
        s = a + b
        k = np.arange(m + 1, dtype=float)
        # off-diagonals a_k, k >= 1
        off = np.zeros(m + 2)
        kk = np.arange(1, m + 2, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            num = 4 * kk * (kk + a) * (kk + b) * (kk + s)
            den = (2 * kk + s) ** 2 * (2 * kk + s + 1) * (2 * kk + s - 1)
            off[1:] = np.sqrt(num / den)
        off[1] = math.sqrt(4 * (1 + a) * (1 + b) / ((2 + s) ** 2 * (3 + s)))
        diag = np.empty(m + 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            diag[:] = (b * b - a * a) / ((2 * k + s) * (2 * k + s + 2))
        diag[0] = (b - a) / (s + 2)
        A = 1.0 / off[1 : m + 2]
        B = -diag * A
        C = off[: m + 1] * A
        p0 = 1.0 / math.sqrt(self.weight.gauss_mass)
        return A, B, C, p0

    @property
    def weight(self):
        return WeightSpec("jacobi", self.alpha, self.beta)

    def standard(self, n: int, t):
        """Classical P_n^{(α,β)}(t), normalized by P_n(1) = binom(n+α, n)."""
        vals = self.evaluate(n, t)
        return vals * np.exp(-jacobi_normalization_log(n, self.alpha, self.beta))

    def describe(self):
        return {"kind": self.kind, "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class Hermite(_OrthoPolyFamily):
    """Hermite functions h_n(t) = (2^n n! √π)^{-1/2} H_n(t) e^{-t²/2}."""

    kind: ClassVar[str] = "hermite"

    @property
    def domain(self):
        return (-math.inf, math.inf)

    def eigenvalues(self, n):
        n = np.asarray(n, dtype=float)
        return (-(2 * n + 1)).astype(complex)

    def recurrence(self, m):
        k = np.arange(m + 1, dtype=float)
        A = np.sqrt(2.0 / (k + 1))
        B = np.zeros(m + 1)
        C = np.sqrt(k / (k + 1))
        return A, B, C, math.pi ** -0.25

    def log_envelope(self, t, smooth=False):
        return -0.5 * t * t

    @property
    def weight(self):
        return WeightSpec("hermite")


@dataclass(frozen=True)
class Laguerre(_OrthoPolyFamily):
    """Normalized Laguerre functions on [0, ∞):
    ℓ_n(t) = (n!/Γ(n+α+1))^{1/2} e^{-t/2} t^{α/2} L_n^α(t).

    With ``smooth=True`` evaluation drops the t^{α/2} factor.
    """

    alpha: float = 0.0
    kind: ClassVar[str] = "laguerre"

    def __post_init__(self):
        if not self.alpha > -1:
            raise ParameterError(f"Laguerre parameter needs α > -1, got {self.alpha}")

    @property
    def domain(self):
        return (0.0, math.inf)

    def check_domain(self, t):
        t = super().check_domain(t)
        if self.alpha < 0 and np.any(t <= 0):
            raise DomainError("laguerre with α < 0 is only defined for t > 0")
        return t

    def eigenvalues(self, n):
        return (-np.asarray(n, dtype=float)).astype(complex)

    def recurrence(self, m):
        a = self.alpha
        k = np.arange(m + 1, dtype=float)
        D = np.sqrt((k + 1) * (k + a + 1))
        A = -1.0 / D
        B = (2 * k + a + 1) / D
        C = np.sqrt(k * (k + a)) / D
        return A, B, C, math.exp(-0.5 * gammaln(a + 1))

    def log_envelope(self, t, smooth=False):
        env = -0.5 * t
        if not smooth and self.alpha != 0:
            with np.errstate(divide="ignore"):
                env = env + 0.5 * self.alpha * np.log(t)
        return env

    @property
    def weight(self):
        return WeightSpec("laguerre", self.alpha)

    def describe(self):
        return {"kind": self.kind, "alpha": self.alpha}


@dataclass(frozen=True, eq=False)
class Custom(BasisFamily):
    """User-supplied orthonormal family.

    ``evaluator(n, t)`` returns b_n on an array of points, ``eigenvalue(n)``
    the eigenvalue, and ``rule(m)`` a (nodes, weights) pair integrating
    against the family's measure.  Nothing is constructed automatically.
    """

    evaluator: Callable = None
    eigenvalue_fn: Callable = None
    interval: tuple = (-1.0, 1.0)
    rule: Callable = None
    indexing: str = NATURALS
    real: bool = True
    name: str = "custom"
    measure: Callable = field(default=None)
    kind: ClassVar[str] = "custom"

    @property
    def index_kind(self):
        return self.indexing

    @property
    def domain(self):
        return tuple(self.interval)

    def eigenvalues(self, n):
        n = np.asarray(n)
        return np.array([complex(self.eigenvalue_fn(int(k))) for k in n.ravel()]).reshape(n.shape)

    def _matrix(self, max_degree, t, smooth):
        idx = self.index_set(max_degree).indices
        return np.stack([np.asarray(self.evaluator(int(n), t), dtype=complex if not self.real else float) for n in idx], axis=-1)

    @property
    def is_real(self):
        return self.real

    @property
    def weight(self):
        return None

    def describe(self):
        return {"kind": self.kind, "name": self.name}


def eval_basis(b: BasisFamily, n: int, t, smooth: bool = False):
    """Value of the n-th basis function at ``t`` (scalar or array)."""
    out = b.evaluate(n, t, smooth)
    if np.ndim(t) == 0:
        out = out[()]
        return complex(out) if not b.is_real else float(out)
    return out


def eig_map(b: BasisFamily) -> EigenvalueMap:
    return EigenvalueMap(b, b.eigenvalue, vectorized=b.eigenvalues)


def jacobi_sup_bound(n: int, alpha: float, beta: float, normalized: bool = False) -> float:
    """Upper bound binom(n + max(α, β), n) for sup |P_n^{(α,β)}| on [-1, 1].

    With ``normalized=True`` the bound is multiplied by the orthonormalizing
    factor, giving a bound for p_n^{(α,β)}.
    """
    if not (alpha > -1 and beta > -1) or max(alpha, beta) < -0.5:
        raise ParameterError(f"bound needs α, β > -1 and max(α, β) ≥ -1/2, got ({alpha}, {beta})")
    if int(n) != n or n < 0:
        raise ParameterError(f"degree must be a non-negative integer, got {n}")
    q = max(alpha, beta)
    logb = gammaln(n + q + 1) - gammaln(n + 1) - gammaln(q + 1)
    if normalized:
        logb += float(jacobi_normalization_log(n, alpha, beta))
    return float(math.exp(logb))


def basis_norm_sequence(b: BasisFamily, p: float, max_degree: int, **kw) -> list:
    """(‖b_0‖_p, ..., ‖b_N‖_p); negative indices are skipped on the torus."""
    from .norms import basis_function_norm

    return [math.exp(basis_function_norm(b, n, p, **kw).log_value) for n in range(int(max_degree) + 1)]
