"""One- and two-qubit density operators.

Basis ordering for two qubits is |00>, |01>, |10>, |11> with qubit A as the
most significant index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, DomainError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Unit-trace positive semidefinite Hermitian matrix of dimension 2 or 4.

    The matrix is validated on construction and stored read-only.
    """

    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density operator must be square, got shape {m.shape}")
        if m.shape[0] not in (2, 4):
            raise DimensionError(f"only dimensions 2 and 4 are supported, got {m.shape[0]}")
        if not np.all(np.isfinite(m)):
            raise DomainError("density operator has non-finite entries")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise DomainError(f"not Hermitian (deviation {herm:.3g})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise DomainError(f"trace is {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(m).min()
        if lo < PSD_TOL:
            raise DomainError(f"negative eigenvalue {lo:.3g}")
        object.__setattr__(self, "mat", _frozen(m))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def is_pure(self, tol: float = 1e-10) -> bool:
        return self.purity() > 1.0 - tol

    def bloch(self) -> np.ndarray:
        """Bloch vector (r_x, r_y, r_z) of a qubit state."""
        if self.dim != 2:
            raise DimensionError("Bloch vector is defined for single qubits only")
        return np.array([np.real(np.trace(self.mat @ p)) for p in PAULIS])

    def expect(self, op: np.ndarray) -> float:
        return float(np.real(np.trace(self.mat @ op)))

    def allclose(self, other: DensityOperator, atol: float = 1e-10) -> bool:
        return self.dim == other.dim and trace_distance(self, other) < atol

    def __repr__(self):
        return f"DensityOperator(dim={self.dim})"


def from_matrix(mat: np.ndarray, *, renormalize: bool = False) -> DensityOperator:
    """Build a state from a raw matrix, symmetrizing round-off first.

    With ``renormalize`` the matrix is divided by its trace.
    """
    m = np.asarray(mat, dtype=complex)
    m = (m + m.conj().T) / 2
    if renormalize:
        tr = np.trace(m).real
        if tr <= 0:
            raise DomainError("cannot renormalize a matrix with non-positive trace")
        m = m / tr
    return DensityOperator(m)


def pure(vec: Sequence[complex]) -> DensityOperator:
    """Projector onto the normalized vector ``vec``."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    n = np.linalg.norm(v)
    if n == 0:
        raise DomainError("zero vector has no projector")
    v = v / n
    return from_matrix(np.outer(v, v.conj()))


def psi_vector(theta: float) -> np.ndarray:
    """cos(theta)|00> + sin(theta)|11>, for any real theta."""
    return np.array([np.cos(theta), 0.0, 0.0, np.sin(theta)], dtype=complex)


def make_psi(theta: float) -> DensityOperator:
    if not (0.0 <= theta <= np.pi / 2):
        raise DomainError(f"theta={theta} outside [0, pi/2]")
    return pure(psi_vector(theta))


def make_werner(f: float, theta: float) -> DensityOperator:
    """f |Psi(theta)><Psi(theta)| + (1 - f) I/4."""
    if not (0.0 <= f <= 1.0):
        raise DomainError(f"mixing parameter f={f} outside [0, 1]")
    return from_matrix(f * make_psi(theta).mat + (1.0 - f) * I4 / 4)


def maximally_mixed(dim: int = 4) -> DensityOperator:
    if dim not in (2, 4):
        raise DimensionError(f"unsupported dimension {dim}")
    return DensityOperator(np.eye(dim, dtype=complex) / dim)


def basis_state(*bits: int) -> DensityOperator:
    """Computational basis projector, e.g. ``basis_state(0, 1)`` for |01>."""
    idx = 0
    for b in bits:
        idx = 2 * idx + int(b)
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[idx] = 1.0
    return pure(v)


def qubit_from_bloch(r: Sequence[float]) -> DensityOperator:
    r = np.asarray(r, dtype=float)
    if np.linalg.norm(r) > 1.0 + 1e-12:
        raise DomainError("Bloch vector longer than 1")
    return from_matrix(0.5 * (I2 + r[0] * SX + r[1] * SY + r[2] * SZ))


def mixture(components: Iterable[tuple[float, DensityOperator]]) -> DensityOperator:
    """Convex combination sum_i p_i rho_i."""
    comps = list(components)
    if not comps:
        raise DomainError("empty mixture")
    ps = np.array([p for p, _ in comps], dtype=float)
    if np.any(ps < 0) or abs(ps.sum() - 1.0) > 1e-12:
        raise DomainError("mixture weights must be non-negative and sum to 1")
    dims = {r.dim for _, r in comps}
    if len(dims) != 1:
        raise DimensionError("mixture components differ in dimension")
    return from_matrix(sum(p * r.mat for p, r in comps))


def tensor(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    if a.dim != 2 or b.dim != 2:
        raise DimensionError("tensor expects two single-qubit states")
    return from_matrix(np.kron(a.mat, b.mat))


def partial_trace(rho: DensityOperator, subsystem: str = "B") -> DensityOperator:
    """Trace out ``subsystem`` ('A' or 'B') of a two-qubit state."""
    if rho.dim != 4:
        raise DimensionError(f"partial trace needs a two-qubit state, got dim {rho.dim}")
    t = rho.mat.reshape(2, 2, 2, 2)  # indices a, b, a', b'
    if subsystem == "B":
        red = np.einsum("ajbj->ab", t)
    elif subsystem == "A":
        red = np.einsum("jajb->ab", t)
    else:
        raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return from_matrix(red)


def trace_distance(a: DensityOperator, b: DensityOperator) -> float:
    """Half the trace norm of a - b."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch {a.dim} vs {b.dim}")
    ev = np.linalg.eigvalsh(a.mat - b.mat)
    return float(min(1.0, 0.5 * np.abs(ev).sum()))


def von_neumann_entropy(rho: DensityOperator) -> float:
    """Entropy in bits."""
    ev = rho.eigenvalues()
    ev = ev[ev > 1e-15]
    return float(-(ev * np.log2(ev)).sum())


# random states, used by scans and property tests


def random_pure_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_state(rng: np.random.Generator, dim: int = 4, rank: int | None = None) -> DensityOperator:
    """Ginibre-distributed density operator of the given rank (full rank by default)."""
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    m = g @ g.conj().T
    return from_matrix(m / np.trace(m).real)


def random_product(rng: np.random.Generator, pure_parts: bool = True) -> DensityOperator:
    rank = 1 if pure_parts else None
    return tensor(random_state(rng, 2, rank), random_state(rng, 2, rank))


def random_separable(rng: np.random.Generator, terms: int = 4) -> DensityOperator:
    """Random convex mixture of ``terms`` pure product states."""
    w = rng.dirichlet(np.ones(terms))
    w = w / w.sum()
    return mixture([(float(p), random_product(rng)) for p in w])


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
