"""Sparse Liouvillian assembly, steady state, and propagation.

Vectorization is column stacking throughout: vec(rho) concatenates the
columns of rho, so vec(A rho B) = (B^T kron A) vec(rho) and the trace
functional is the row vector with ones at the diagonal positions. The
superoperator formula's transposes depend on this choice; do not mix
conventions.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .errors import (
    DegenerateSteadyState,
    LayoutMismatch,
    NonConvergence,
    StepFailure,
    TruncationNotConverged,
)
from .operators import DensityMatrix, LabeledOperator, SpaceLayout


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvectorize(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError("vector length is not a perfect square")
    return np.asarray(v, dtype=complex).reshape((d, d), order="F")


def trace_row(dim: int) -> np.ndarray:
    """Row vector t with t @ vec(rho) = tr(rho)."""
    t = np.zeros(dim * dim)
    t[:: dim + 1] = 1.0
    return t


class Superoperator:
    """Sparse D^2 x D^2 generator of the master equation."""

    def __init__(self, matrix: sp.spmatrix, layout: SpaceLayout):
        self.matrix = sp.csc_matrix(matrix, dtype=complex)
        self.layout = layout
        d = layout.total_dim
        if self.matrix.shape != (d * d, d * d):
            raise LayoutMismatch(
                f"superoperator shape {self.matrix.shape} does not match "
                f"layout dim {d}"
            )

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """L acting on a matrix, returned as a matrix."""
        return unvectorize(self.matrix @ vectorize(rho))

    def norm_scale(self) -> float:
        """Max absolute row sum; used to normalize residuals."""
        return float(abs(self.matrix).sum(axis=1).max()) or 1.0

    def trace_preservation_defect(self) -> float:
        """||tr o L|| per unit operator norm; ~0 for any valid Liouvillian."""
        t = trace_row(self.dim)
        return float(np.max(np.abs(t @ self.matrix))) / self.norm_scale()


def _spre(m: sp.spmatrix) -> sp.spmatrix:
    eye = sp.identity(m.shape[0], dtype=complex, format="csr")
    return sp.kron(eye, m, format="csr")


def _spost(m: sp.spmatrix) -> sp.spmatrix:
    eye = sp.identity(m.shape[0], dtype=complex, format="csr")
    return sp.kron(m.T, eye, format="csr")


def build_liouvillian(H: LabeledOperator,
                      c_list: Sequence[LabeledOperator]) -> Superoperator:
    """L with unvectorized action -i[H, rho] + sum_j D[C_j] rho.

    D[C] rho = C rho C_dag - (1/2){C_dag C, rho}. H must be Hermitian and
    every operator must share H's layout.
    """
    if np.max(np.abs(H.matrix - H.matrix.conj().T)) > 1e-9 * max(
            1.0, float(np.max(np.abs(H.matrix)))):
        raise ValueError("Hamiltonian is not Hermitian")
    h = sp.csr_matrix(H.matrix)
    lio = -1j * (_spre(h) - _spost(h))
    for c_op in c_list:
        if c_op.layout != H.layout:
            raise LayoutMismatch("collapse operator layout differs from H")
        c = sp.csr_matrix(c_op.matrix)
        if c.nnz == 0:
            continue
        cd = c.conj().T.tocsr()
        cdc = (cd @ c).tocsr()
        lio = lio + _spost(cd) @ _spre(c) - 0.5 * (_spre(cdc) + _spost(cdc))
    return Superoperator(lio.tocsc(), H.layout)


def _null_space_dimension(matrix: sp.spmatrix, rel_tol: float = 1e-9) -> int:
    """Number of singular values below rel_tol * s_max.

    Dense SVD; only called on the diagnostic path after a solve failed, and
    guarded by size (the degenerate cases of interest are small).
    """
    d2 = matrix.shape[0]
    if d2 > 8100:
        # svds on the smallest end is unreliable; report "at least 2" so the
        # caller can still raise a typed error.
        return -1
    s = np.linalg.svd(matrix.toarray(), compute_uv=False)
    return int(np.sum(s < rel_tol * s[0]))


def _bordered_solve(lio: Superoperator, diag_index: int) -> np.ndarray:
    """Solve L x = 0, tr(x) = 1 with row `diag_index` replaced by the trace row.

    The replaced row must sit at a diagonal position (i*D+i): those rows
    carry the one linear dependency of a trace-preserving generator, so
    removing any other row leaves the system singular.
    """
    d = lio.dim
    m = lio.matrix.tolil(copy=True)
    m[diag_index, :] = trace_row(d)
    b = np.zeros(d * d, dtype=complex)
    b[diag_index] = 1.0
    lu = spla.splu(m.tocsc())
    return lu.solve(b)


def steady_state(lio: Superoperator, residual_tol: float = 1e-9,
                 verify: bool = True) -> DensityMatrix:
    """Unique steady state of L, trace-normalized.

    Solves the bordered linear system; residual ||L vec(rho)|| per unit
    operator norm must beat residual_tol. With verify=True a second solve
    at a different diagonal row cross-checks uniqueness; disagreement (or a
    singular factorization) triggers a null-space diagnosis and a
    DegenerateSteadyState carrying the kernel dimension.
    """
    d = lio.dim
    scale = lio.norm_scale()

    def diagnose() -> None:
        k = _null_space_dimension(lio.matrix)
        if k == 1:
            raise NonConvergence(
                "steady-state solve failed although the kernel is simple"
            )
        raise DegenerateSteadyState(k)

    try:
        x = _bordered_solve(lio, 0)
    except RuntimeError:
        diagnose()
    if not np.all(np.isfinite(x)):
        diagnose()
    residual = float(np.linalg.norm(lio.matrix @ x)) / (scale * float(np.linalg.norm(x)))
    if residual > residual_tol:
        diagnose()

    if verify and d >= 2:
        try:
            x2 = _bordered_solve(lio, d + 1)  # diagonal position (1,1)
        except RuntimeError:
            diagnose()
        if (not np.all(np.isfinite(x2))
                or np.linalg.norm(x - x2) > 1e-6 * np.linalg.norm(x)):
            diagnose()

    rho = unvectorize(x)
    rho = 0.5 * (rho + rho.conj().T)      # scrub solver-level asymmetry
    rho = rho / np.trace(rho).real        # trace exactly 1 after normalization
    return DensityMatrix(rho, lio.layout)


def propagate(lio: Superoperator, rho0: DensityMatrix, t: float,
              rtol: float = 1e-10, atol: float = 1e-12,
              trace_tol: float = 1e-8) -> DensityMatrix:
    """Evolve rho0 for time t >= 0 with an adaptive stiff integrator (BDF).

    Trace and Hermiticity are checked, never silently repaired: drift
    beyond trace_tol means the step control or the generator is wrong, and
    raises StepFailure.
    """
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if rho0.layout != lio.layout:
        raise LayoutMismatch("state and Liouvillian layouts differ")
    if t == 0.0:
        return rho0

    matrix = lio.matrix

    def rhs(_t, y):
        return matrix @ y

    sol = solve_ivp(rhs, (0.0, t), vectorize(rho0.matrix), method="BDF",
                    rtol=rtol, atol=atol, jac=matrix, dense_output=False)
    if not sol.success:
        raise StepFailure(f"integrator failed: {sol.message}")
    rho = unvectorize(sol.y[:, -1])
    trace_dev = abs(np.trace(rho).real - 1.0)
    herm_dev = float(np.max(np.abs(rho - rho.conj().T)))
    if trace_dev > trace_tol:
        raise StepFailure(f"trace drifted by {trace_dev:g} (> {trace_tol:g})")
    if herm_dev > 1e-8:
        raise StepFailure(f"Hermiticity drifted by {herm_dev:g}")
    return DensityMatrix(0.5 * (rho + rho.conj().T), lio.layout)


def expm_action_grid(lio: Superoperator, v0: np.ndarray, t_max: float,
                     num: int) -> np.ndarray:
    """e^{L t_k} v0 on the uniform grid t_k = k*t_max/(num-1); rows are t_k.

    Exact matrix-exponential action, used by the two-time correlation
    machinery where v0 need not be a state. Small systems step with a
    dense one-interval propagator (one expm, then repeated products);
    larger ones use the sparse Krylov/Taylor grid evaluation.
    """
    if num < 2:
        raise ValueError("need at least two grid points")
    v0 = np.asarray(v0, dtype=complex)
    d2 = lio.matrix.shape[0]
    if d2 <= 2048:
        from scipy.linalg import expm

        step = expm(lio.matrix.toarray() * (t_max / (num - 1)))
        out = np.empty((num, d2), dtype=complex)
        out[0] = v0
        for k in range(1, num):
            out[k] = step @ out[k - 1]
        return out
    return spla.expm_multiply(lio.matrix, v0, start=0.0, stop=t_max,
                              num=num, endpoint=True)


def adaptive_truncation(metric_fn: Callable[[int], np.ndarray], start: int,
                        tolerance: float, step: int = 2,
                        n_max: int = 30) -> int:
    """Smallest N with ||metric(N+step) - metric(N)||_inf < tolerance.

    metric_fn maps a Fock truncation to a fixed-length vector of observables
    (steady-state populations, peak positions in linewidth units, ...).
    Raises TruncationNotConverged past n_max.
    """
    if tolerance <= 0.0:
        raise ValueError("tolerance must be positive")
    if start < 2:
        raise ValueError("start must be at least 2")
    n = start
    current = np.asarray(metric_fn(n), dtype=float)
    while n + step <= n_max:
        nxt = np.asarray(metric_fn(n + step), dtype=float)
        if nxt.shape != current.shape:
            raise ValueError("metric_fn must return a fixed-length vector")
        if np.max(np.abs(nxt - current)) < tolerance:
            return n
        n += step
        current = nxt
    raise TruncationNotConverged(
        f"no convergence up to N_fock={n_max} at tolerance {tolerance:g}"
    )
