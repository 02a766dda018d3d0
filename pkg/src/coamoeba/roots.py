"""Simultaneous root finding for univariate complex polynomials.

The workhorse is an Aberth-Ehrlich iteration vectorised over a batch of
polynomials of one degree, which is what the plane-curve sampler needs.
Rows that fail to converge are retried one at a time with Newton iteration,
synthetic division (deflation) and a final Newton polish against the original
polynomial.  Coefficients are ordered from the highest degree down, as in
``numpy.polyval``.
"""

from __future__ import annotations

import numpy as np

from .errors import RootFindingError

__all__ = ["solve_univariate", "solve_univariate_batch", "residual_bound", "RESIDUAL_TOL"]

RESIDUAL_TOL = 1e-8
MAX_ITER = 400


def _horner(coeffs: np.ndarray, z: np.ndarray):
    """p(z) and p'(z) for coefficient rows ``(k, d+1)`` at points ``(k, m)``."""
    p = np.broadcast_to(coeffs[:, :1], z.shape).astype(complex)
    dp = np.zeros_like(p)
    for j in range(1, coeffs.shape[1]):
        dp = dp * z + p
        p = p * z + coeffs[:, j : j + 1]
    return p, dp


def residual_bound(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """The acceptance bound ``tol * sum|c_i| * max(1, |z|)**d`` per root."""
    coeffs = np.atleast_2d(coeffs)
    d = coeffs.shape[1] - 1
    scale = np.abs(coeffs).sum(axis=1, keepdims=True)
    return RESIDUAL_TOL * scale * np.maximum(1.0, np.abs(z)) ** d


def _residual_ok(coeffs, z):
    p, _ = _horner(coeffs, z)
    return np.all(np.abs(p) <= residual_bound(coeffs, z), axis=1)


def _initial_guesses(monic: np.ndarray) -> np.ndarray:
    k, d1 = monic.shape
    d = d1 - 1
    # geometric mean of root moduli, clamped away from 0 and inf
    c0 = np.abs(monic[:, -1])
    radius = np.where(c0 > 0, c0 ** (1.0 / d), 1.0)
    radius = np.clip(radius, 1e-8, 1e8)
    angles = 2 * np.pi * np.arange(d) / d + 0.4
    return radius[:, None] * np.exp(1j * angles)[None, :]


def _aberth(coeffs: np.ndarray, maxiter: int):
    k, d1 = coeffs.shape
    d = d1 - 1
    monic = coeffs / coeffs[:, :1]
    z = _initial_guesses(monic)
    active = np.ones(k, dtype=bool)
    settled = np.zeros(k, dtype=int)
    eye = np.eye(d, dtype=bool)
    for _ in range(maxiter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        zc = z[idx]
        p, dp = _horner(monic[idx], zc)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = zc[:, :, None] - zc[:, None, :]
            diff[:, eye] = 1.0
            inv = 1.0 / diff
            inv[:, eye] = 0.0
            s = inv.sum(axis=2)
            step = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(step)
        if bad.any():
            # nudge roots sitting on a critical point or colliding with a neighbour
            step[bad] = 1e-3 * (1.0 + np.abs(zc[bad])) * np.exp(0.7j)
        znew = zc - step
        z[idx] = znew
        small = np.all(np.abs(step) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(znew)), axis=1)
        ok = _residual_ok(monic[idx], znew)
        settled[idx] = np.where(ok, settled[idx] + 1, 0)
        # keep polishing a little once the residual bound holds
        done = ok & (small | (settled[idx] >= 3))
        active[idx[done]] = False
    converged = _residual_ok(coeffs, z)
    return z, converged


def _newton(coeffs: np.ndarray, z: complex, iters: int = 100) -> complex:
    for _ in range(iters):
        p = np.polyval(coeffs, z)
        dp = np.polyval(np.polyder(coeffs), z)
        if dp == 0:
            z = z + 1e-6 * (1 + abs(z))
            continue
        step = p / dp
        z = z - step
        if abs(step) <= 4 * np.finfo(float).eps * max(1.0, abs(z)):
            break
    return z


def _deflate_and_polish(coeffs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Fallback: find one root at a time, divide it out, then correct on the original."""
    work = coeffs / coeffs[0]
    found = []
    while len(work) > 2:
        best = None
        for _ in range(20):
            start = complex(rng.normal(), rng.normal()) * (abs(work[-1]) ** (1.0 / (len(work) - 1)) or 1.0)
            z = _newton(work, start, iters=200)
            val = abs(np.polyval(work, z))
            if best is None or val < best[1]:
                best = (z, val)
            if val <= RESIDUAL_TOL * np.abs(work).sum() * max(1.0, abs(z)) ** (len(work) - 1):
                break
        z = best[0]
        found.append(z)
        # synthetic division by (x - z)
        quotient = np.empty(len(work) - 1, dtype=complex)
        acc = 0j
        for j in range(len(work) - 1):
            acc = acc * z + work[j]
            quotient[j] = acc
        work = quotient
    found.append(-work[1] / work[0])
    return np.array([_newton(coeffs, z, iters=50) for z in found])


def solve_univariate_batch(coeffs, maxiter: int = MAX_ITER):
    """Roots of many polynomials of the same degree at once.

    Parameters
    ----------
    coeffs : array_like, shape (k, d+1)
        Complex coefficients, highest degree first.  Leading coefficients must
        be nonzero.
    maxiter : int
        Cap on Aberth iterations.

    Returns
    -------
    roots : ndarray, shape (k, d)
    ok : ndarray of bool, shape (k,)
        Rows whose roots all satisfy the residual bound.  Failed rows are
        reported here rather than raised so samplers can skip and count them.
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    k, d1 = coeffs.shape
    d = d1 - 1
    if d < 1:
        raise ValueError("degree must be at least 1")
    if np.any(coeffs[:, 0] == 0):
        raise ValueError("leading coefficient must be nonzero")
    if not np.all(np.isfinite(coeffs)):
        raise ValueError("coefficients must be finite")
    if d == 1:
        roots = -coeffs[:, 1:2] / coeffs[:, :1]
        return roots, np.ones(k, dtype=bool)
    roots, ok = _aberth(coeffs, maxiter)
    if not ok.all():
        rng = np.random.default_rng(12345)
        for r in np.flatnonzero(~ok):
            roots[r] = _deflate_and_polish(coeffs[r], rng)
        ok = _residual_ok(coeffs, roots)
    return roots, ok


def solve_univariate(coefficients, degree: int | None = None, maxiter: int = MAX_ITER) -> np.ndarray:
    """All ``d`` roots, with multiplicity, of ``c[0] z^d + ... + c[d]``.

    Every returned root satisfies
    ``|p(z)| <= 1e-8 * sum|c_i| * max(1, |z|)**d``.

    >>> sorted(np.round(solve_univariate([1, -3, 2]).real, 12).tolist())
    [1.0, 2.0]

    Raises
    ------
    RootFindingError
        If neither the Aberth iteration nor the deflation fallback meets the
        residual bound.
    """
    c = np.asarray(coefficients, dtype=complex).ravel()
    if degree is not None and degree != len(c) - 1:
        raise ValueError(f"degree {degree} does not match {len(c)} coefficients")
    roots, ok = solve_univariate_batch(c[None, :], maxiter=maxiter)
    if not ok[0]:
        raise RootFindingError(f"root finder did not converge for degree {len(c) - 1} polynomial")
    return roots[0]
