"""Dense nonsymmetric eigensolving, bound-state classification, an
independent small-matrix oracle, and eigenvalue set matching.

The main entry point `eig` wraps LAPACK's general complex solver and adds
the package conventions: eigenvalues in lexicographic order (real part,
then imaginary part), per-pair residual norms, an inverse-iteration polish
for the rare pair whose residual is out of line, and a trace cross-check.

`brute_oracle_small` shares no code path with LAPACK: it builds the
characteristic polynomial by the Faddeev-LeVerrier recursion and finds all
roots simultaneously with Durand-Kerner iteration.  It exists so the main
solver can be checked against something that cannot fail the same way.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    MissingVectorsError,
    NoConvergenceError,
    TooLargeError,
)
from .operators import Grid, OperatorMatrix

__all__ = [
    "Spectrum",
    "eig",
    "brute_oracle_small",
    "classify_spectrum",
    "match_eigenvalue_sets",
]

_ORACLE_MAX_SIZE = 8
_REFINE_TRIGGER = 1e-9
_REFINE_STEPS = 3


def _lex_order(values: np.ndarray) -> np.ndarray:
    """Permutation sorting by real part, ties by imaginary part."""
    return np.lexsort((values.imag, values.real))


def _entries(matrix) -> np.ndarray:
    if isinstance(matrix, OperatorMatrix):
        return np.asarray(matrix.entries, dtype=complex)
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"need a square matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (lex-ordered) with optional vectors and diagnostics.

    vectors, when present, holds one unit-norm column per eigenvalue in the
    same order.  residuals are ||A v - lambda v|| / ||A||_F.  bound_flags is
    filled by classify_spectrum.  trace_error compares the eigenvalue sum
    with the matrix trace, relative to max(1, |trace|, sum |lambda|).
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray | None = None
    residuals: np.ndarray | None = None
    bound_flags: np.ndarray | None = None
    matrix_norm: float = 0.0
    trace_error: float = 0.0

    def __post_init__(self) -> None:
        vals = np.asarray(self.eigenvalues, dtype=complex)
        vals.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def bound_eigenvalues(self) -> np.ndarray:
        if self.bound_flags is None:
            raise MissingVectorsError("spectrum has not been classified yet")
        return self.eigenvalues[self.bound_flags]


def _refine_pair(a: np.ndarray, lam: complex, vec: np.ndarray, norm_a: float):
    """A few steps of inverse iteration with Rayleigh-quotient updates."""
    n = a.shape[0]
    best_lam, best_vec = lam, vec
    best_res = np.linalg.norm(a @ vec - lam * vec)
    reg = 1e-13 * norm_a
    for _ in range(_REFINE_STEPS):
        shifted = a - (best_lam + reg) * np.eye(n)
        try:
            w = np.linalg.solve(shifted, best_vec)
        except np.linalg.LinAlgError:
            break
        nw = np.linalg.norm(w)
        if not np.isfinite(nw) or nw == 0.0:
            break
        w = w / nw
        lam_new = complex(np.vdot(w, a @ w))
        res = np.linalg.norm(a @ w - lam_new * w)
        if res < best_res:
            best_lam, best_vec, best_res = lam_new, w, res
        else:
            break
    return best_lam, best_vec


def eig(matrix, vectors: bool = False) -> Spectrum:
    """Full spectrum of a dense complex matrix with package conventions.

    Accepts an OperatorMatrix or a plain array.  Raises NoConvergenceError
    if the underlying QR iteration gives up.
    """
    a = _entries(matrix)
    norm_a = float(np.linalg.norm(a))
    try:
        if vectors:
            vals, vecs = np.linalg.eig(a)
        else:
            vals = np.linalg.eigvals(a)
            vecs = None
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"dense eigensolve failed: {exc}") from exc

    order = _lex_order(vals)
    vals = vals[order]
    residuals = None
    if vecs is not None:
        vecs = vecs[:, order]
        vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
        denom = norm_a if norm_a > 0.0 else 1.0
        residuals = np.linalg.norm(a @ vecs - vecs * vals[None, :], axis=0) / denom
        bad = np.nonzero(residuals > _REFINE_TRIGGER)[0]
        for idx in bad:
            lam, vec = _refine_pair(a, complex(vals[idx]), vecs[:, idx].copy(), norm_a)
            vals[idx] = lam
            vecs[:, idx] = vec
            residuals[idx] = np.linalg.norm(a @ vec - lam * vec) / denom
        if bad.size:
            order = _lex_order(vals)
            vals = vals[order]
            vecs = vecs[:, order]
            residuals = residuals[order]

    tr = complex(np.trace(a))
    scale = max(1.0, abs(tr), float(np.sum(np.abs(vals))))
    trace_error = abs(vals.sum() - tr) / scale
    if vecs is not None:
        vecs.setflags(write=False)
    if residuals is not None:
        residuals.setflags(write=False)
    return Spectrum(
        eigenvalues=vals,
        vectors=vecs,
        residuals=residuals,
        matrix_norm=norm_a,
        trace_error=trace_error,
    )


def _char_poly_coeffs(a: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients, highest degree first.

    Faddeev-LeVerrier: M_1 = A, c_1 = -tr M_1;
    M_k = A (M_{k-1} + c_{k-1} I), c_k = -tr(M_k)/k.
    """
    n = a.shape[0]
    coeffs = np.empty(n + 1, dtype=complex)
    coeffs[0] = 1.0
    m = a.copy()
    for k in range(1, n + 1):
        c = -np.trace(m) / k
        coeffs[k] = c
        if k < n:
            m = a @ (m + c * np.eye(n))
    return coeffs


def _durand_kerner(coeffs: np.ndarray, tol: float = 1e-12, max_iter: int = 600) -> np.ndarray:
    """All roots of a monic polynomial by simultaneous iteration."""
    n = coeffs.size - 1
    if n == 0:
        return np.empty(0, dtype=complex)
    # Cauchy-type inclusion radius; the offset angle keeps the start
    # configuration away from real-axis symmetries.
    r0 = 1.0 + float(np.max(np.abs(coeffs[1:])))
    z = r0 * np.exp(2j * np.pi * np.arange(n) / n + 0.4j)
    for _ in range(max_iter):
        p = np.polyval(coeffs, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        small = np.abs(diff) < 1e-14
        if small.any():
            diff[small] = 1e-12 * (1.0 + 1j)
        denom = diff.prod(axis=1)
        step = p / denom
        z = z - step
        if np.max(np.abs(step)) < tol * max(1.0, float(np.max(np.abs(z)))):
            break
    else:
        raise NoConvergenceError(
            f"root iteration did not settle within {max_iter} sweeps"
        )
    return z


def brute_oracle_small(matrix) -> np.ndarray:
    """Eigenvalues of a small matrix without LAPACK, lex-ordered.

    Independent route for cross-checking `eig`: characteristic polynomial
    via Faddeev-LeVerrier, roots via Durand-Kerner.  Sizes above 8 are
    refused (TooLargeError); conditioning of the coefficient route degrades
    quickly and the point is verification, not production solving.
    """
    a = _entries(matrix)
    n = a.shape[0]
    if n > _ORACLE_MAX_SIZE:
        raise TooLargeError(f"oracle accepts matrices up to size {_ORACLE_MAX_SIZE}, got {n}")
    roots = _durand_kerner(_char_poly_coeffs(a))
    return roots[_lex_order(roots)]


def classify_spectrum(
    spectrum: Spectrum,
    grid: Grid | None = None,
    im_tol: float = 1e-6,
    edge_frac: float = 0.05,
    continuum_threshold: float | None = None,
) -> Spectrum:
    """Flag bound states; returns a copy with bound_flags filled.

    An eigenvalue is bound when |Im| <= im_tol and it is not a box artifact
    of the Dirichlet truncation.  Without a continuum_threshold every
    small-imaginary eigenvalue counts.  With one, eigenvalues below the
    threshold count directly, and eigenvalues at or above it count only if
    their eigenvector keeps under 1% of its mass in each edge band of
    edge_frac * n nodes (truncation artifacts pile up mass at the walls).
    The edge rule needs eigenvectors; MissingVectorsError otherwise.
    """
    vals = spectrum.eigenvalues
    flags = np.abs(vals.imag) <= im_tol
    if continuum_threshold is not None:
        above = flags & (vals.real >= continuum_threshold)
        if above.any():
            if spectrum.vectors is None:
                raise MissingVectorsError(
                    "edge-localization test needs eigenvectors; rerun the solve with vectors=True"
                )
            n = spectrum.vectors.shape[0]
            if grid is not None and grid.n != n:
                raise ValueError(f"grid has {grid.n} nodes but vectors have {n} rows")
            band = max(1, int(edge_frac * n))
            for idx in np.nonzero(above)[0]:
                v = spectrum.vectors[:, idx]
                mass = np.abs(v) ** 2
                total = mass.sum()
                lo = mass[:band].sum() / total
                hi = mass[-band:].sum() / total
                if lo > 0.01 or hi > 0.01:
                    flags[idx] = False
    flags.setflags(write=False)
    return replace(spectrum, bound_flags=flags)


def match_eigenvalue_sets(targets: np.ndarray, candidates: np.ndarray):
    """Pair each target value with a distinct nearest candidate.

    Greedy on the globally smallest remaining |target - candidate| gap
    (first index wins ties).  Returns (picked values, distances), both in
    target order.
    """
    t = np.asarray(targets, dtype=complex).ravel()
    c = np.asarray(candidates, dtype=complex).ravel()
    if c.size < t.size:
        raise ValueError(f"need at least {t.size} candidates, got {c.size}")
    dist = np.abs(t[:, None] - c[None, :])
    picked = np.empty(t.size, dtype=complex)
    gaps = np.empty(t.size, dtype=float)
    work = dist.copy()
    for _ in range(t.size):
        flat = int(np.argmin(work))
        i, j = divmod(flat, work.shape[1])
        picked[i] = c[j]
        gaps[i] = dist[i, j]
        work[i, :] = np.inf
        work[:, j] = np.inf
    return picked, gaps
