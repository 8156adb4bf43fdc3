"""Dense complex linear algebra kernels.

Everything here works on plain numpy arrays. Functions that take a state also
accept any object with ``dims`` and ``mat`` attributes (e.g.
:class:`qcorr.states.DensityMatrix`) and return the same type where a state
comes back out. Subsystem index 0 is the leftmost tensor factor.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.linalg as sla

from ._config import TOL
from .errors import BadSubsystem, DimMismatch, DomainError, NonHermitian

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Return the underlying complex matrix of a state or array."""
    m = getattr(a, "mat", a)
    return np.asarray(m, dtype=complex)


def dims_of(a, dims: Sequence[int] | None = None) -> tuple[int, ...]:
    if dims is not None:
        return tuple(int(d) for d in dims)
    d = getattr(a, "dims", None)
    if d is not None:
        return tuple(d)
    n = as_matrix(a).shape[0]
    return (n,)


def _rewrap(template, mat, dims):
    if hasattr(template, "dims") and hasattr(template, "mat"):
        return type(template)(tuple(dims), mat)
    return mat


def is_hermitian(h: np.ndarray, tol: float = TOL.hermitian) -> bool:
    h = as_matrix(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= tol * scale)


def hermitize(h: np.ndarray) -> np.ndarray:
    h = as_matrix(h)
    return 0.5 * (h + h.conj().T)


def eigh(h) -> EigenDecomposition:
    """Hermitian eigendecomposition with ascending eigenvalues.

    Raises NonHermitian if ``h`` is not Hermitian to within the relative
    tolerance in ``TOL.hermitian``.
    """
    h = as_matrix(h)
    if not is_hermitian(h):
        raise NonHermitian("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(hermitize(h))
    return EigenDecomposition(w, v)


def eigvalsh(h) -> np.ndarray:
    h = as_matrix(h)
    if not is_hermitian(h):
        raise NonHermitian("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(hermitize(h))


def clamp_spectrum(w: np.ndarray, tol: float = TOL.psd) -> np.ndarray:
    """Zero out eigenvalues in (-tol, 0]; raise on anything more negative."""
    w = np.asarray(w, dtype=float)
    if w.size and w.min() < -tol:
        raise DomainError(f"eigenvalue {w.min():.3e} below -{tol:g}")
    return np.where(w < 0, 0.0, w)


def matrix_function(h, f: Callable[[np.ndarray], np.ndarray], clamp_negative: bool = True) -> np.ndarray:
    """Apply the scalar map ``f`` to the spectrum of Hermitian ``h``.

    With ``clamp_negative`` the spectrum is passed through
    :func:`clamp_spectrum` first, which is what sqrt and log need.
    """
    w, v = eigh(h)
    if clamp_negative:
        w = clamp_spectrum(w)
    fw = np.asarray(f(w))
    return (v * fw) @ v.conj().T


def sqrtm_psd(h) -> np.ndarray:
    return matrix_function(h, np.sqrt, clamp_negative=True)


def kron(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices (or vectors)."""
    out = np.asarray(ops[0], dtype=complex)
    for b in ops[1:]:
        out = np.kron(out, np.asarray(b, dtype=complex))
    return out


def _check_subsystems(idx: Sequence[int], n: int):
    for k in idx:
        if not isinstance(k, (int, np.integer)) or k < 0 or k >= n:
            raise BadSubsystem(f"subsystem index {k!r} out of range for {n} factors")


def partial_trace(rho, keep, dims: Sequence[int] | None = None):
    """Trace out every factor not listed in ``keep``.

    ``keep`` is an int or a collection of subsystem indices. Kept factors are
    returned in ascending index order.
    """
    mat = as_matrix(rho)
    dims = dims_of(rho, dims)
    if int(np.prod(dims)) != mat.shape[0]:
        raise DimMismatch(f"dims {dims} do not match matrix size {mat.shape[0]}")
    if isinstance(keep, (int, np.integer)):
        keep = [keep]
    keep = sorted(set(keep))
    if not keep:
        raise BadSubsystem("keep must be nonempty")
    n = len(dims)
    _check_subsystems(keep, n)
    trace_out = [k for k in range(n) if k not in keep]
    t = mat.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for k in trace_out:
        col[k] = row[k]
    out_idx = "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
    red = np.einsum("".join(row) + "".join(col) + "->" + out_idx, t)
    kd = tuple(dims[k] for k in keep)
    m = int(np.prod(kd))
    return _rewrap(rho, red.reshape(m, m), kd)


def permute_subsystems(rho, perm: Sequence[int], dims: Sequence[int] | None = None):
    """Reorder tensor factors so that new factor ``i`` is old factor ``perm[i]``."""
    mat = as_matrix(rho)
    dims = dims_of(rho, dims)
    n = len(dims)
    if sorted(perm) != list(range(n)):
        raise BadSubsystem(f"{perm!r} is not a permutation of {n} factors")
    t = mat.reshape(dims + dims)
    axes = list(perm) + [p + n for p in perm]
    nd = tuple(dims[p] for p in perm)
    m = int(np.prod(nd))
    return _rewrap(rho, t.transpose(axes).reshape(m, m), nd)


def partial_transpose(rho, subsystem, dims: Sequence[int] | None = None) -> np.ndarray:
    """Transpose the indices of one factor (or a collection of factors)."""
    mat = as_matrix(rho)
    dims = dims_of(rho, dims)
    n = len(dims)
    subs = [subsystem] if isinstance(subsystem, (int, np.integer)) else list(subsystem)
    _check_subsystems(subs, n)
    t = mat.reshape(dims + dims)
    axes = list(range(2 * n))
    for k in subs:
        axes[k], axes[k + n] = axes[k + n], axes[k]
    m = mat.shape[0]
    return t.transpose(axes).reshape(m, m)


def trace_norm(a) -> float:
    """Sum of singular values."""
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``||sqrt(rho) sqrt(sigma)||_1 ** 2``."""
    a = as_matrix(rho)
    b = as_matrix(sigma)
    if a.shape != b.shape:
        raise DimMismatch(f"shapes {a.shape} and {b.shape} differ")
    if hasattr(rho, "dims") and hasattr(sigma, "dims") and tuple(rho.dims) != tuple(sigma.dims):
        raise DimMismatch(f"dims {rho.dims} and {sigma.dims} differ")
    f = trace_norm(sqrtm_psd(a) @ sqrtm_psd(b)) ** 2
    return float(min(max(f, 0.0), 1.0))


def expm(a) -> np.ndarray:
    return sla.expm(as_matrix(a))


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    return a @ b + b @ a


def embed_operator(op, target: int, dims: Sequence[int]) -> np.ndarray:
    """Lift an operator on factor ``target`` to the full space with identities."""
    dims = tuple(dims)
    _check_subsystems([target], len(dims))
    op = np.asarray(op, dtype=complex)
    if op.shape != (dims[target], dims[target]):
        raise DimMismatch(f"operator shape {op.shape} does not match factor dim {dims[target]}")
    left = int(np.prod(dims[:target]))
    right = int(np.prod(dims[target + 1 :]))
    return kron(np.eye(left), op, np.eye(right))
