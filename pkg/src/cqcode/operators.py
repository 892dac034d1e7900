"""Dense complex Hermitian operator arithmetic.

All operators are plain ``numpy.ndarray`` matrices of dtype complex128.
Hermiticity is restored after every arithmetic composite by explicit
symmetrization; spectral operations use dense Hermitian eigendecomposition
throughout.  Functions are pure and never mutate their arguments.
"""

from __future__ import annotations

import numpy as np

from .limits import DEFAULT_ATOL, HERMITIAN_ATOL, SUPPORT_CUT, check_dim


def hermitize(a: np.ndarray) -> np.ndarray:
    """Symmetrize to (A + A*)/2, the nearest Hermitian matrix."""
    return 0.5 * (a + a.conj().T)


def hermiticity_residue(a: np.ndarray) -> float:
    """Largest antisymmetric entry, max |a[i,j] - conj(a[j,i])|."""
    return float(np.abs(a - a.conj().T).max()) if a.size else 0.0


def assert_hermitian(a: np.ndarray, tol: float = HERMITIAN_ATOL, name: str = "operator") -> np.ndarray:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    res = hermiticity_residue(a)
    if res > tol:
        raise ValueError(f"{name} is not Hermitian: residue {res:.3e} > {tol:.1e}")
    return a


def assert_density(a: np.ndarray, tol: float = DEFAULT_ATOL, name: str = "state") -> np.ndarray:
    """Check unit trace and positive semi-definiteness within ``tol``."""
    assert_hermitian(a, tol=max(tol, HERMITIAN_ATOL), name=name)
    tr = complex(np.trace(a))
    if abs(tr - 1.0) > tol:
        raise ValueError(f"{name} trace {tr:.12g} differs from 1 by more than {tol:.1e}")
    least = min_eigenvalue(a)
    if least < -tol:
        raise ValueError(f"{name} has negative eigenvalue {least:.3e} below -{tol:.1e}")
    return a


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def readonly(a: np.ndarray) -> np.ndarray:
    """Mark an array immutable so cached values can be shared safely."""
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def tensor(a: np.ndarray, b: np.ndarray, cap: int | None = None) -> np.ndarray:
    """Kronecker product with a capacity guard on the result dimension."""
    check_dim(a.shape[0] * b.shape[0], cap)
    return np.kron(a, b)


def tensor_all(ops, cap: int | None = None) -> np.ndarray:
    """Kronecker product of a non-empty sequence, left to right."""
    ops = list(ops)
    if not ops:
        raise ValueError("tensor_all needs at least one operator")
    out = ops[0]
    for op in ops[1:]:
        out = tensor(out, op, cap=cap)
    return out


def tensor_power(a: np.ndarray, n: int, cap: int | None = None) -> np.ndarray:
    check_dim(a.shape[0] ** n, cap)
    return tensor_all([a] * n, cap=cap)


def eigh(a: np.ndarray):
    """Eigendecomposition of the hermitized input, ascending eigenvalues."""
    return np.linalg.eigh(hermitize(a))


def min_eigenvalue(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitize(a))[0])


def positive_part_projector(a: np.ndarray, tol: float = DEFAULT_ATOL) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors with eigenvalue >= -tol.

    Ties at zero are kept inside the projector, matching the convention that
    the non-negative part of the spectrum belongs to the projection.
    """
    w, v = eigh(a)
    keep = v[:, w >= -tol]
    return hermitize(keep @ keep.conj().T)


def support_projector(a: np.ndarray, tol: float = DEFAULT_ATOL) -> np.ndarray:
    """Projector onto the span of eigenvectors with eigenvalue > tol."""
    w, v = eigh(a)
    keep = v[:, w > tol]
    return hermitize(keep @ keep.conj().T)


def inv_sqrt_on_support(a: np.ndarray, tol: float = DEFAULT_ATOL) -> np.ndarray:
    """Pseudo-inverse square root: B with B a B = support projector of a.

    Parameters
    ----------
    a : ndarray
        Positive semi-definite matrix (within ``tol``).
    tol : float
        Eigenvalues below ``tol`` are treated as zero; an eigenvalue below
        ``-tol`` is a domain error.
    """
    w, v = eigh(a)
    if w[0] < -tol:
        raise ValueError(f"matrix has negative eigenvalue {w[0]:.3e}, not PSD within {tol:.1e}")
    s = np.where(w > tol, 1.0, 0.0) / np.sqrt(np.where(w > tol, w, 1.0))
    return hermitize((v * s) @ v.conj().T)


def fractional_power_psd(a: np.ndarray, power: float, tol: float = SUPPORT_CUT) -> np.ndarray:
    """Pseudo-power a**power on the support of a PSD matrix.

    Eigenvalues below ``tol`` map to zero for every exponent, including
    negative ones, so singular inputs stay on their support.
    """
    w, v = eigh(a)
    if w[0] < -max(tol, DEFAULT_ATOL):
        raise ValueError(f"matrix has negative eigenvalue {w[0]:.3e}, not PSD")
    pos = w > tol
    s = np.where(pos, np.where(pos, w, 1.0) ** power, 0.0)
    return hermitize((v * s) @ v.conj().T)


def is_psd_dominated(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_ATOL) -> bool:
    """True iff b - a is positive semi-definite within ``tol``."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return min_eigenvalue(b - a) >= -tol


def trace_norm(a: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.abs(np.linalg.eigvalsh(hermitize(a))).sum())


def max_abs(a: np.ndarray) -> float:
    return float(np.abs(a).max()) if a.size else 0.0


def commutation_residue(a: np.ndarray, b: np.ndarray) -> float:
    """Max-entry norm of the commutator [a, b]."""
    return max_abs(a @ b - b @ a)


def real_trace(a: np.ndarray) -> float:
    return float(np.trace(a).real)
