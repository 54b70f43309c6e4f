"""Eigenvalue, stability and pole-zero analysis of the RLCM models."""

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .circuits import Topology, build
from .errors import DomainError
from .linalg import RationalTF, eig_2x2, resolvent_tf, sort_roots

__all__ = [
    "RationalTF",
    "Stability",
    "StabilityVerdict",
    "classify_stability",
    "eig_closed",
    "eig_parallel_closed",
    "eig_series_closed",
    "minimal_form",
    "stability_margins",
    "transfer_function",
    "verdict_for",
]

STABILITY_TOL = 1e-9
CANCEL_TOL = 1e-9


class Stability(enum.Enum):
    STABLE = "Stable"
    MARGINAL = "Marginal"
    UNSTABLE = "Unstable"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class StabilityVerdict:
    verdict: Stability
    eigenvalues: tuple
    max_real_part: float

    @property
    def is_stable(self):
        return self.verdict is Stability.STABLE


def _quadratic_roots(half_b, c):
    # roots of s^2 + 2*half_b*s + c, written as -half_b +/- sqrt(half_b^2 - c)
    disc = half_b * half_b - c
    if disc >= 0.0:
        root = math.sqrt(disc)
        # the larger-magnitude root first, the other from the product c
        big = -half_b - math.copysign(root, half_b)
        small = c / big if big != 0.0 else 0.0
        return tuple(sort_roots((big, small)))
    im = math.sqrt(-disc)
    return (complex(-half_b, -im), complex(-half_b, im))


def eig_series_closed(p):
    """Series-circuit eigenvalues ``-(R+R_M)/2L +/- sqrt(((R+R_M)/2L)^2 - 1/LC)``."""
    alpha = (p.r + p.r_m) / (2.0 * p.l)
    return _quadratic_roots(alpha, 1.0 / (p.l * p.c_cap))


def eig_parallel_closed(p):
    """Parallel-circuit eigenvalues ``(-a +/- sqrt(a^2 - 4/LC)) / 2``, ``a = 1/RC + 1/R_M C``."""
    a = 1.0 / (p.r * p.c_cap) + 1.0 / (p.r_m * p.c_cap)
    return _quadratic_roots(0.5 * a, 1.0 / (p.l * p.c_cap))


def classify_stability(eigs, tol=STABILITY_TOL):
    """Stable if every real part is below ``-tol``, Marginal within ``tol`` of zero."""
    eigs = tuple(sort_roots(eigs))
    if not eigs:
        raise DomainError("need at least one eigenvalue")
    worst = max(z.real for z in eigs)
    if worst < -tol:
        verdict = Stability.STABLE
    elif abs(worst) <= tol:
        verdict = Stability.MARGINAL
    else:
        verdict = Stability.UNSTABLE
    return StabilityVerdict(verdict, eigs, worst)


def stability_margins(a):
    """Largest eigenvalue real part of a batch of 2x2 matrices, shape (..., 2, 2).

    Vectorized counterpart of ``eig_2x2`` for parameter sweeps.
    """
    a = np.asarray(a, dtype=float)
    tr = a[..., 0, 0] + a[..., 1, 1]
    det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    half = 0.5 * tr
    disc = half * half - det
    sq = np.sqrt(np.abs(disc))
    # for real roots, the larger one is tr/2 + sqrt(disc); form it stably
    with np.errstate(divide="ignore", invalid="ignore"):
        big = half + np.copysign(sq, half)
        other = np.where(big != 0.0, det / big, 0.0)
    real_max = np.maximum(big, other)
    return np.where(disc >= 0.0, real_max, half)


def transfer_function(ss, output_scale=1.0):
    """``output_scale * C_out (sI - A)^-1 B + D`` with poles and zeros attached."""
    tf = resolvent_tf(ss.a, ss.b, ss.c_out, ss.d)
    return tf.scaled(output_scale) if output_scale != 1.0 else tf


def minimal_form(tf, cancel_tol=CANCEL_TOL):
    """Cancel pole/zero pairs closer than ``cancel_tol``.

    The result is rebuilt from the surviving roots with the original leading
    coefficient ratio, so a fully cancelled ratio becomes a constant.
    """
    if tf.num.degree() == 0 or np.all(tf.num.coef == 0.0):
        return tf
    poles = list(tf.poles)
    zeros = []
    for z in tf.zeros:
        match = None
        for k, p in enumerate(poles):
            if abs(p - z) <= cancel_tol and (match is None or abs(p - z) < abs(poles[match] - z)):
                match = k
        if match is None:
            zeros.append(z)
        else:
            poles.pop(match)
    if len(zeros) == len(tf.zeros):
        return tf
    gain = tf.num.coef[-1] / tf.den.coef[-1]
    return RationalTF(gain * _from_roots(zeros), _from_roots(poles))


def _from_roots(roots):
    if not roots:
        return Polynomial([1.0])
    coef = np.polynomial.polynomial.polyfromroots(roots)
    # conjugate pairs give real coefficients up to rounding
    return Polynomial(np.real(coef).astype(float))


def eig_closed(topology, p):
    if Topology.parse(topology) is Topology.SERIES:
        return eig_series_closed(p)
    return eig_parallel_closed(p)


def verdict_for(topology, p, tol=STABILITY_TOL):
    """Stability verdict of a circuit from its 2x2 state matrix."""
    return classify_stability(eig_2x2(build(topology, p).a), tol)

