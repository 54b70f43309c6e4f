"""Small dense linear algebra for n <= 8.

Everything here works on plain numpy float arrays and returns Python
``complex`` scalars for eigenvalues and roots. Root and eigenvalue lists are
always sorted lexicographically by ``(real, imag)``.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial

from ._accel import jit
from .errors import (
    DegenerateError,
    DimensionError,
    DomainError,
    IterationLimitError,
)

__all__ = [
    "MAX_DIM",
    "REPEATED_ROOT_TOL",
    "RationalTF",
    "as_matrix",
    "as_polynomial",
    "eig_2x2",
    "eig_qr",
    "expm",
    "group_repeated",
    "poly_roots",
    "resolvent_tf",
    "roots_quadratic",
    "sort_roots",
]

MAX_DIM = 8
REPEATED_ROOT_TOL = 1e-9
# relative size below which a leading polynomial coefficient counts as zero
_TRIM_RTOL = 1e-13
_EPS = np.finfo(float).eps


def sort_roots(values):
    return sorted((complex(v) for v in values), key=lambda z: (z.real, z.imag))


def as_matrix(m, shape=None, name="matrix"):
    """Validate ``m`` as a finite 2-D float array, optionally of ``shape``."""
    a = np.array(m, dtype=float)
    if a.ndim == 1 and shape is not None and shape[1] == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if shape is not None:
        rows, cols = shape
        if (rows is not None and a.shape[0] != rows) or (cols is not None and a.shape[1] != cols):
            raise DimensionError(f"{name} must have shape {shape}, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} has non-finite entries")
    return a


def _square(m, name="matrix", max_dim=MAX_DIM):
    a = as_matrix(m, name=name)
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionError(f"{name} must be square, got {a.shape}")
    if not 1 <= n <= max_dim:
        raise DimensionError(f"{name} dimension {n} outside 1..{max_dim}")
    return a


def roots_quadratic(a, b, c):
    """Both roots of ``a*s**2 + b*s + c``, sorted by (re, im).

    Real roots use the cancellation-free form ``q = -(b + sign(b)*sqrt(d))/2``
    with roots ``q/a`` and ``c/q``.
    """
    a, b, c = float(a), float(b), float(c)
    if not all(math.isfinite(v) for v in (a, b, c)):
        raise DomainError("quadratic coefficients must be finite")
    if a == 0.0:
        raise DegenerateError("leading coefficient a is zero")
    disc = b * b - 4.0 * a * c
    if disc >= 0.0:
        q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
        if q == 0.0:
            # b == 0 and disc == 0 forces c == 0
            r1 = r2 = 0.0
        else:
            r1, r2 = q / a, c / q
        return tuple(sort_roots((r1, r2)))
    re = -b / (2.0 * a)
    im = math.sqrt(-disc) / (2.0 * abs(a))
    return (complex(re, -im), complex(re, im))


def eig_2x2(m):
    """Eigenvalues of a 2x2 matrix from its trace and determinant."""
    a = as_matrix(m, shape=(2, 2))
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    return roots_quadratic(1.0, -tr, det)


@jit
def _hessenberg(a):
    # Householder reduction to upper Hessenberg form, in place.
    n = a.shape[0]
    for k in range(n - 2):
        # reflector built from the column scaled to unit max, so squares
        # cannot underflow
        cmax = 0.0
        for i in range(k + 1, n):
            cmax = max(cmax, abs(a[i, k]))
        if cmax == 0.0:
            continue
        alpha = 0.0
        for i in range(k + 1, n):
            alpha += (a[i, k] / cmax) ** 2
        alpha = math.sqrt(alpha)
        if a[k + 1, k] > 0.0:
            alpha = -alpha
        v = np.zeros(n)
        for i in range(k + 1, n):
            v[i] = a[i, k] / cmax
        v[k + 1] -= alpha
        vnorm2 = 0.0
        for i in range(k + 1, n):
            vnorm2 += v[i] * v[i]
        if vnorm2 == 0.0:
            continue
        # a <- (I - 2vv'/v'v) a (I - 2vv'/v'v)
        for j in range(n):
            s = 0.0
            for i in range(k + 1, n):
                s += v[i] * a[i, j]
            s *= 2.0 / vnorm2
            for i in range(k + 1, n):
                a[i, j] -= s * v[i]
        for i in range(n):
            s = 0.0
            for j in range(k + 1, n):
                s += a[i, j] * v[j]
            s *= 2.0 / vnorm2
            for j in range(k + 1, n):
                a[i, j] -= s * v[j]
        for i in range(k + 2, n):
            a[i, k] = 0.0
    return a


@jit
def _sign(a, b):
    return abs(a) if b >= 0.0 else -abs(a)


@jit
def _hqr(a, tol, max_iter):
    """Francis double-shift QR on an upper Hessenberg matrix (destroys ``a``).

    Returns (wr, wi, nn, total_iterations). ``nn`` is -1 on success, else the
    index of the highest unconverged eigenvalue; entries above ``nn`` hold
    converged values.
    """
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            anorm += abs(a[i, j])
    nn = n - 1
    shift = 0.0
    its = 0
    total = 0
    p = q = r = x = y = z = w = 0.0
    while nn >= 0:
        l = 0
        for ll in range(nn, 0, -1):
            s = abs(a[ll - 1, ll - 1]) + abs(a[ll, ll])
            if s == 0.0:
                s = anorm
            # relative test, plus an absolute floor at eps*||H|| (backward stable)
            if abs(a[ll, ll - 1]) <= tol * s or abs(a[ll, ll - 1]) <= _EPS * anorm:
                a[ll, ll - 1] = 0.0
                l = ll
                break
        x = a[nn, nn]
        if l == nn:
            wr[nn] = x + shift
            wi[nn] = 0.0
            nn -= 1
            its = 0
            continue
        y = a[nn - 1, nn - 1]
        w = a[nn, nn - 1] * a[nn - 1, nn]
        if l == nn - 1:
            p = 0.5 * (y - x)
            q = p * p + w
            z = math.sqrt(abs(q))
            x += shift
            if q >= 0.0:
                z = p + _sign(z, p)
                wr[nn - 1] = x + z
                wr[nn] = x + z
                if z != 0.0:
                    wr[nn] = x - w / z
                wi[nn - 1] = 0.0
                wi[nn] = 0.0
            else:
                wr[nn - 1] = x + p
                wr[nn] = x + p
                wi[nn - 1] = -z
                wi[nn] = z
            nn -= 2
            its = 0
            continue
        if total >= max_iter:
            return wr, wi, nn, total
        if its == 10 or its == 20:
            # exceptional shift
            shift += x
            for i in range(nn + 1):
                a[i, i] -= x
            s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
            x = 0.75 * s
            y = x
            w = -0.4375 * s * s
        its += 1
        total += 1
        m = nn - 2
        while m >= l:
            z = a[m, m]
            r = x - z
            s = y - z
            p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
            q = a[m + 1, m + 1] - z - r - s
            r = a[m + 2, m + 1]
            s = abs(p) + abs(q) + abs(r)
            p /= s
            q /= s
            r /= s
            if m == l:
                break
            u = abs(a[m, m - 1]) * (abs(q) + abs(r))
            v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
            if u <= _EPS * v:
                break
            m -= 1
        for i in range(m + 2, nn + 1):
            a[i, i - 2] = 0.0
            if i != m + 2:
                a[i, i - 3] = 0.0
        for k in range(m, nn):
            if k != m:
                p = a[k, k - 1]
                q = a[k + 1, k - 1]
                r = 0.0
                if k != nn - 1:
                    r = a[k + 2, k - 1]
                x = abs(p) + abs(q) + abs(r)
                if x != 0.0:
                    p /= x
                    q /= x
                    r /= x
            s = _sign(math.sqrt(p * p + q * q + r * r), p)
            if s != 0.0:
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                for j in range(k, nn + 1):
                    p = a[k, j] + q * a[k + 1, j]
                    if k != nn - 1:
                        p += r * a[k + 2, j]
                        a[k + 2, j] -= p * z
                    a[k + 1, j] -= p * y
                    a[k, j] -= p * x
                mmin = nn if nn < k + 3 else k + 3
                for i in range(l, mmin + 1):
                    p = x * a[i, k] + y * a[i, k + 1]
                    if k != nn - 1:
                        p += z * a[i, k + 2]
                        a[i, k + 2] -= p * r
                    a[i, k + 1] -= p * q
                    a[i, k] -= p
    return wr, wi, nn, total


def eig_qr(m, max_iter=None, tol=1e-12):
    """Eigenvalues of a real n x n matrix (n <= 8).

    Householder reduction to Hessenberg form followed by Francis double-shift
    QR. A subdiagonal entry is deflated once it falls below
    ``tol * (|h[i,i]| + |h[i+1,i+1]|)`` or below ``eps * ||H||``.

    Parameters
    ----------
    m : array_like, shape (n, n)
    max_iter : int, optional
        Cap on the total number of QR sweeps, default ``100 * n``.
    tol : float

    Returns
    -------
    list of complex, sorted by (re, im)

    Raises
    ------
    IterationLimitError
        When the cap is hit; ``.partial`` holds the eigenvalues that did
        converge.
    """
    a = _square(m)
    n = a.shape[0]
    if max_iter is None:
        max_iter = 100 * n
    # exact power-of-two scaling keeps the sweeps clear of under/overflow
    norm = np.abs(a).max()
    scale = 2.0 ** -math.frexp(norm)[1] if norm > 0 else 1.0
    h = _hessenberg(np.ascontiguousarray(a * scale, dtype=np.float64))
    wr, wi, nn, _ = _hqr(h, float(tol), int(max_iter))
    wr /= scale
    wi /= scale
    if nn >= 0:
        found = [complex(wr[i], wi[i]) for i in range(nn + 1, n)]
        raise IterationLimitError(
            f"QR iteration did not converge within {max_iter} sweeps "
            f"({len(found)} of {n} eigenvalues found)",
            partial=sort_roots(found),
        )
    return sort_roots(complex(wr[i], wi[i]) for i in range(n))


# Pade(6, 6) numerator coefficients for exp
_PADE6 = tuple(
    math.factorial(12 - j) * math.factorial(6)
    / (math.factorial(12) * math.factorial(j) * math.factorial(6 - j))
    for j in range(7)
)


def _expm(a):
    n = a.shape[0]
    norm = np.abs(a).sum(axis=0).max()
    k = 0
    if norm > 0.5:
        k = int(math.ceil(math.log2(norm / 0.5)))
    x = a / 2.0**k
    ident = np.eye(n)
    num = _PADE6[0] * ident
    den = _PADE6[0] * ident
    power = ident
    for j in range(1, 7):
        power = power @ x
        num = num + _PADE6[j] * power
        den = den + (-1) ** j * _PADE6[j] * power
    e = np.linalg.solve(den, num)
    for _ in range(k):
        e = e @ e
    return e


def expm(m):
    """Matrix exponential by scaling and squaring around a Pade(6, 6) core.

    The argument is scaled by ``2**-k`` so that its 1-norm is at most 0.5,
    where the Pade truncation error is far below double precision.
    """
    return _expm(_square(m))


def as_polynomial(p):
    """Coerce coefficients (ascending degree) or a Polynomial to a Polynomial."""
    if isinstance(p, Polynomial):
        coef = np.asarray(p.coef, dtype=float)
    else:
        coef = np.atleast_1d(np.asarray(p, dtype=float))
    if coef.ndim != 1 or not np.all(np.isfinite(coef)):
        raise DomainError("polynomial coefficients must be a finite 1-D sequence")
    return Polynomial(_trim(coef))


def _trim(coef):
    coef = np.asarray(coef, dtype=float)
    scale = np.abs(coef).max() if coef.size else 0.0
    if scale == 0.0:
        return np.zeros(1)
    keep = np.nonzero(np.abs(coef) > _TRIM_RTOL * scale)[0]
    return coef[: keep[-1] + 1].copy()


def poly_roots(p):
    """Roots of a polynomial given by ascending coefficients.

    Degrees 1 and 2 are solved in closed form; higher degrees go through the
    eigenvalues of the companion matrix.
    """
    coef = as_polynomial(p).coef
    if np.all(coef == 0.0):
        raise DegenerateError("zero polynomial has no well-defined roots")
    deg = coef.size - 1
    if deg < 1:
        raise DegenerateError("constant polynomial has no roots")
    if deg == 1:
        return [complex(-coef[0] / coef[1])]
    if deg == 2:
        return list(roots_quadratic(coef[2], coef[1], coef[0]))
    if deg > MAX_DIM:
        raise DimensionError(f"degree {deg} exceeds {MAX_DIM}")
    monic = coef[:-1] / coef[-1]
    comp = np.zeros((deg, deg))
    comp[0, :] = -monic[::-1]
    comp[np.arange(1, deg), np.arange(deg - 1)] = 1.0
    return eig_qr(comp)


def group_repeated(roots, tol=REPEATED_ROOT_TOL):
    """Collapse roots closer than ``tol`` into (root, multiplicity) pairs."""
    groups = []
    for z in sort_roots(roots):
        for g in groups:
            if abs(g[0] - z) <= tol:
                g[1] += 1
                break
        else:
            groups.append([z, 1])
    return [(z, k) for z, k in groups]


@dataclass(frozen=True)
class RationalTF:
    """Ratio of two real polynomials (ascending coefficients)."""

    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        num = as_polynomial(self.num)
        den = as_polynomial(self.den)
        if np.all(den.coef == 0.0):
            raise DegenerateError("denominator is the zero polynomial")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @cached_property
    def poles(self):
        if self.den.degree() == 0:
            return []
        return poly_roots(self.den)

    @cached_property
    def zeros(self):
        if self.num.degree() == 0:
            return []
        return poly_roots(self.num)

    @property
    def dc_gain(self):
        """``num(0)/den(0)``; ``math.inf`` marks a pole at the origin."""
        d0 = float(self.den.coef[0])
        if d0 == 0.0:
            return math.inf
        return float(self.num.coef[0]) / d0

    def __call__(self, s):
        return self.num(s) / self.den(s)

    def scaled(self, k):
        return RationalTF(self.num * float(k), self.den)


def resolvent_tf(A, B, C_out, D=0.0):
    """Transfer function ``C_out (sI - A)^-1 B + D`` of a SISO state-space model.

    The adjugate of ``sI - A`` and the characteristic polynomial come out of
    the Faddeev-LeVerrier recursion::

        M_1 = I,  c_{n-k} = -tr(A M_k) / k,  M_{k+1} = A M_k + c_{n-k} I

    so that ``adj(sI - A) = sum_k M_k s^(n-k)``.
    """
    A = _square(A, name="A")
    n = A.shape[0]
    B = as_matrix(B, shape=(n, 1), name="B")
    C_out = as_matrix(np.atleast_2d(np.asarray(C_out, dtype=float)), shape=(1, n), name="C_out")
    D = float(D)
    if not math.isfinite(D):
        raise DomainError("D must be finite")

    char = np.zeros(n + 1)
    char[n] = 1.0
    num = np.zeros(n + 1)
    M = np.eye(n)
    for k in range(1, n + 1):
        num[n - k] = (C_out @ M @ B)[0, 0]
        AM = A @ M
        char[n - k] = -np.trace(AM) / k
        M = AM + char[n - k] * np.eye(n)
    num = num + D * char
    return RationalTF(Polynomial(num), Polynomial(char))
