"""Quantum state carriers, presets, validation and decompositions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from . import matcore as mc
from ._config import TOL
from .errors import DimMismatch, InvalidParams, InvalidState


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Density operator together with its tensor-factor dimensions."""

    dims: tuple
    mat: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimMismatch(f"density matrix must be square, got shape {mat.shape}")
        if int(np.prod(dims)) != mat.shape[0]:
            raise DimMismatch(f"dims {dims} do not multiply to {mat.shape[0]}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def reduced(self, keep) -> "DensityMatrix":
        return mc.partial_trace(self, keep)

    def eigenvalues(self) -> np.ndarray:
        return mc.eigvalsh(self.mat)

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def __repr__(self):
        return f"DensityMatrix(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class PureState:
    dims: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amp = np.asarray(self.amplitudes, dtype=complex).ravel()
        if int(np.prod(dims)) != amp.size:
            raise DimMismatch(f"dims {dims} do not multiply to {amp.size}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > 1e-12:
            raise InvalidState(f"state vector norm {norm:.15g} differs from 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amp)

    def density(self) -> DensityMatrix:
        a = self.amplitudes
        return DensityMatrix(self.dims, np.outer(a, a.conj()))

    @classmethod
    def normalized(cls, dims, amplitudes) -> "PureState":
        amp = np.asarray(amplitudes, dtype=complex).ravel()
        return cls(dims, amp / np.linalg.norm(amp))


@dataclass(frozen=True)
class XStateParams:
    """Two-qubit X state: diagonal d1..d4 and anti-diagonal a14, a23."""

    d1: float
    d2: float
    d3: float
    d4: float
    a14: complex = 0.0
    a23: complex = 0.0

    def violations(self, tol: float = 1e-10) -> list[str]:
        out = []
        d = np.array([self.d1, self.d2, self.d3, self.d4], dtype=float)
        if abs(d.sum() - 1.0) > tol:
            out.append(f"diagonal sum {d.sum():.3e} != 1")
        if d.min() < -tol:
            out.append(f"negative diagonal {d.min():.3e}")
        if abs(self.a14) > np.sqrt(max(self.d1 * self.d4, 0.0)) + tol:
            out.append("|a14| > sqrt(d1*d4)")
        if abs(self.a23) > np.sqrt(max(self.d2 * self.d3, 0.0)) + tol:
            out.append("|a23| > sqrt(d2*d3)")
        return out

    def check(self) -> "XStateParams":
        bad = self.violations()
        if bad:
            raise InvalidParams("; ".join(bad))
        return self

    def matrix(self) -> np.ndarray:
        m = np.diag(np.array([self.d1, self.d2, self.d3, self.d4], dtype=complex))
        m[0, 3] = self.a14
        m[3, 0] = np.conj(self.a14)
        m[1, 2] = self.a23
        m[2, 1] = np.conj(self.a23)
        return m

    def density(self) -> DensityMatrix:
        return DensityMatrix((2, 2), self.matrix())

    @classmethod
    def from_matrix(cls, rho, tol: float = 1e-10) -> "XStateParams":
        m = mc.as_matrix(rho)
        if m.shape != (4, 4):
            raise DimMismatch("X-state parameters need a 4x4 matrix")
        mask = np.ones((4, 4), dtype=bool)
        for i, j in [(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)]:
            mask[i, j] = False
        if np.max(np.abs(m[mask])) > tol:
            raise InvalidParams("matrix has entries outside the X pattern")
        d = np.real(np.diag(m))
        return cls(float(d[0]), float(d[1]), float(d[2]), float(d[3]), complex(m[0, 3]), complex(m[1, 2]))


@dataclass(frozen=True)
class BellDiagonalParams:
    c1: float
    c2: float
    c3: float

    def eigenvalues(self) -> np.ndarray:
        """lambda_ij for (i,j) in (0,0),(0,1),(1,0),(1,1)."""
        c1, c2, c3 = self.c1, self.c2, self.c3
        out = []
        for i in (0, 1):
            for j in (0, 1):
                out.append(0.25 * (1 + (-1) ** i * c1 - (-1) ** (i + j) * c2 + (-1) ** j * c3))
        return np.array(out)

    def check(self) -> "BellDiagonalParams":
        lam = self.eigenvalues()
        if lam.min() < -1e-12:
            raise InvalidParams(f"Bell-diagonal weight {lam.min():.3e} < 0")
        return self

    def matrix(self) -> np.ndarray:
        c1, c2, c3 = self.c1, self.c2, self.c3
        return 0.25 * np.array(
            [
                [1 + c3, 0, 0, c1 - c2],
                [0, 1 - c3, c1 + c2, 0],
                [0, c1 + c2, 1 - c3, 0],
                [c1 - c2, 0, 0, 1 + c3],
            ],
            dtype=complex,
        )

    def to_x(self) -> XStateParams:
        m = self.matrix()
        return XStateParams.from_matrix(m)


@dataclass(frozen=True)
class BlochTriple:
    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    def matrix(self) -> np.ndarray:
        m = mc.kron(mc.PAULI_I, mc.PAULI_I)
        for i, s in enumerate(mc.PAULIS):
            m = m + self.x[i] * mc.kron(s, mc.PAULI_I) + self.y[i] * mc.kron(mc.PAULI_I, s)
            for j, t in enumerate(mc.PAULIS):
                m = m + self.T[i, j] * mc.kron(s, t)
        return 0.25 * m


@dataclass(frozen=True)
class FanoBlochTensor:
    """Coefficients R[a, b] = (d/2) Tr(rho gamma^a (x) sigma^b), gamma^0 = I_d, sigma^0 = I_2."""

    d: int
    R: np.ndarray = field(repr=False)

    def matrix(self) -> np.ndarray:
        gam = [np.eye(self.d, dtype=complex)] + su_generators(self.d)
        sig = [mc.PAULI_I, *mc.PAULIS]
        m = np.zeros((2 * self.d, 2 * self.d), dtype=complex)
        for a, g in enumerate(gam):
            # Tr(g g) is d for the identity and 2 for every generator
            na = self.d if a == 0 else 2
            for b, s in enumerate(sig):
                m += self.R[a, b] / (self.d * na) * mc.kron(g, s)
        return m


# ----------------------------------------------------------------------------
# validation


@dataclass
class Diagnostics:
    problems: list = field(default_factory=list)  # (name, magnitude)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __str__(self):
        return "; ".join(f"{n} ({v:.3e})" for n, v in self.problems)


def validate(rho, dims: Sequence[int] | None = None):
    """Return a DensityMatrix if ``rho`` is a valid state, else Diagnostics.

    Never raises for numerical violations; shape mismatches are reported as
    diagnostics too.
    """
    diag = Diagnostics()
    try:
        m = mc.as_matrix(rho)
    except (TypeError, ValueError) as exc:
        diag.problems.append((f"not a numeric matrix: {exc}", float("nan")))
        return diag
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        diag.problems.append(("not square", float(m.size)))
        return diag
    dims = mc.dims_of(rho, dims)
    if int(np.prod(dims)) != m.shape[0]:
        diag.problems.append((f"dims {dims} do not match size {m.shape[0]}", float(m.shape[0])))
        return diag
    if not np.all(np.isfinite(m)):
        diag.problems.append(("non-finite entries", float("nan")))
        return diag
    herm = float(np.max(np.abs(m - m.conj().T), initial=0.0))
    if herm > TOL.hermitian * max(1.0, float(np.max(np.abs(m)))):
        diag.problems.append(("not Hermitian", herm))
    tr = np.trace(m)
    if abs(tr - 1.0) > TOL.trace:
        diag.problems.append(("trace differs from 1", float(abs(tr - 1.0))))
    wmin = float(np.linalg.eigvalsh(mc.hermitize(m)).min())
    if wmin < -TOL.psd:
        diag.problems.append(("negative eigenvalue", wmin))
    if diag.problems:
        return diag
    return DensityMatrix(dims, m)


def ensure_state(rho, dims: Sequence[int] | None = None) -> DensityMatrix:
    """Like :func:`validate` but raises InvalidState on failure."""
    if isinstance(rho, PureState):
        return rho.density()
    if isinstance(rho, DensityMatrix) and dims is None:
        return rho
    out = validate(rho, dims)
    if isinstance(out, Diagnostics):
        raise InvalidState(str(out))
    return out


def as_state(rho, dims: Sequence[int] | None = None) -> DensityMatrix:
    """Wrap without full validation (cheap path for internal calls)."""
    if isinstance(rho, PureState):
        return rho.density()
    if isinstance(rho, DensityMatrix):
        return rho if dims is None else DensityMatrix(dims, rho.mat)
    if isinstance(rho, XStateParams):
        return rho.density()
    m = mc.as_matrix(rho)
    if dims is None:
        dims = _default_dims(m.shape[0])
    return DensityMatrix(dims, m)


def _default_dims(n: int) -> tuple:
    # bare arrays of size 2**k are read as k qubits
    k = int(round(np.log2(n))) if n > 0 else 0
    return (2,) * k if k >= 1 and 2**k == n else (n,)


def require_dims(rho: DensityMatrix, expected: Sequence[int], what: str = "operation"):
    if tuple(rho.dims) != tuple(expected):
        raise DimMismatch(f"{what} needs dims {tuple(expected)}, got {rho.dims}")


# ----------------------------------------------------------------------------
# presets

_SQ2 = 1 / np.sqrt(2)


def _ket(dims, digits) -> np.ndarray:
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    v[np.ravel_multi_index(tuple(digits), tuple(dims))] = 1.0
    return v


def bell_ket(name: str) -> np.ndarray:
    k00, k01, k10, k11 = (_ket((2, 2), d) for d in [(0, 0), (0, 1), (1, 0), (1, 1)])
    table = {
        "bell_phi_plus": (k00 + k11) * _SQ2,
        "bell_phi_minus": (k00 - k11) * _SQ2,
        "bell_psi_plus": (k01 + k10) * _SQ2,
        "bell_psi_minus": (k01 - k10) * _SQ2,
    }
    return table[name]


def bell_state(name: str = "bell_phi_plus") -> DensityMatrix:
    v = bell_ket(name)
    return DensityMatrix((2, 2), np.outer(v, v.conj()))


def bell_diagonal(c1: float, c2: float, c3: float) -> DensityMatrix:
    p = BellDiagonalParams(float(c1), float(c2), float(c3)).check()
    return DensityMatrix((2, 2), p.matrix())


def x_family(x: float) -> DensityMatrix:
    """One-parameter X-state family with x in [0, 2] (S2 of either marginal is 1)."""
    if not (-1e-12 <= x <= 2 + 1e-12):
        raise InvalidParams(f"x={x} outside [0, 2]")
    a, b = (2 - x) / 6, (1 + x) / 6
    return XStateParams(a, b, b, a, 0.0, 1 / 6).density()


def horodecki(p: float) -> DensityMatrix:
    """p |psi+><psi+| + (1-p) |00><00| with |psi+> = (|01> + |10>)/sqrt 2."""
    if not (-1e-12 <= p <= 1 + 1e-12):
        raise InvalidParams(f"p={p} outside [0, 1]")
    v = bell_ket("bell_psi_plus")
    k00 = _ket((2, 2), (0, 0))
    m = p * np.outer(v, v.conj()) + (1 - p) * np.outer(k00, k00)
    return DensityMatrix((2, 2), m)


def ghz_ket(n: int) -> PureState:
    if n < 2:
        raise InvalidParams("GHZ needs n >= 2")
    dims = (2,) * n
    v = (_ket(dims, (0,) * n) + _ket(dims, (1,) * n)) * _SQ2
    return PureState(dims, v)


def ghz(n: int = 3) -> DensityMatrix:
    return ghz_ket(int(n)).density()


def w_ket(n: int = 3) -> PureState:
    dims = (2,) * n
    v = sum(_ket(dims, tuple(1 if k == j else 0 for k in range(n))) for j in range(n))
    return PureState.normalized(dims, v)


def plus_ket(d: int = 2) -> PureState:
    return PureState((d,), np.ones(d) / np.sqrt(d))


def plus_state(d: int = 2) -> DensityMatrix:
    return plus_ket(int(d)).density()


def computational(basis, dims: Sequence[int] | int) -> DensityMatrix:
    dims = (int(dims),) if np.ndim(dims) == 0 else tuple(int(d) for d in dims)
    if isinstance(basis, (int, np.integer)):
        if not 0 <= basis < int(np.prod(dims)):
            raise InvalidParams(f"basis index {basis} out of range")
        digits = np.unravel_index(int(basis), dims)
    else:
        digits = tuple(int(b) for b in basis)
        if len(digits) != len(dims) or any(not 0 <= b < d for b, d in zip(digits, dims)):
            raise InvalidParams(f"basis digits {digits} incompatible with dims {dims}")
    v = _ket(dims, digits)
    return DensityMatrix(dims, np.outer(v, v.conj()))


PRESETS = (
    "bell_phi_plus",
    "bell_phi_minus",
    "bell_psi_plus",
    "bell_psi_minus",
    "bell_diagonal",
    "x_state",
    "x_general",
    "horodecki",
    "ghz",
    "w_state",
    "plus_state",
    "computational",
    "maximally_mixed",
)


def preset(name: str, *args, **kwargs) -> DensityMatrix:
    """Build a named preset state.

    Positional or keyword parameters per preset:

    - ``bell_diagonal(c1, c2, c3)``
    - ``x_state(x)``: the one-parameter family with x in [0, 2]
    - ``x_general(d1, d2, d3, d4, a14, a23)``
    - ``horodecki(p)``, ``ghz(n)``, ``w_state(n)``, ``plus_state(d)``
    - ``computational(basis, dims)``, ``maximally_mixed(dims)``
    """
    if name.startswith("bell_") and name != "bell_diagonal":
        if name not in ("bell_phi_plus", "bell_phi_minus", "bell_psi_plus", "bell_psi_minus"):
            raise InvalidParams(f"unknown preset {name!r}")
        return bell_state(name)
    try:
        if name == "bell_diagonal":
            return bell_diagonal(*args, **kwargs)
        if name == "x_state":
            return x_family(*args, **kwargs)
        if name == "x_general":
            return XStateParams(*args, **kwargs).check().density()
        if name == "horodecki":
            return horodecki(*args, **kwargs)
        if name == "ghz":
            return ghz(*args, **kwargs)
        if name == "w_state":
            return w_ket(*args, **kwargs).density()
        if name == "plus_state":
            return plus_state(*args, **kwargs)
        if name == "computational":
            if len(args) > 2:  # flat form: index, d1, d2, ...
                return computational(args[0], args[1:])
            return computational(*args, **kwargs)
        if name == "maximally_mixed":
            dims = tuple(args[0] if args else kwargs.get("dims", (2,)))
            n = int(np.prod(dims))
            return DensityMatrix(dims, np.eye(n) / n)
    except TypeError as exc:
        raise InvalidParams(f"bad parameters for preset {name!r}: {exc}") from exc
    raise InvalidParams(f"unknown preset {name!r}")


# ----------------------------------------------------------------------------
# representations


def bloch_decompose(rho) -> BlochTriple:
    """Local Bloch vectors and correlation tensor of a two-qubit state."""
    rho = as_state(rho)
    require_dims(rho, (2, 2), "bloch_decompose")
    m = rho.mat
    x = np.array([np.real(np.trace(m @ mc.kron(s, mc.PAULI_I))) for s in mc.PAULIS])
    y = np.array([np.real(np.trace(m @ mc.kron(mc.PAULI_I, s))) for s in mc.PAULIS])
    T = np.array([[np.real(np.trace(m @ mc.kron(s, t))) for t in mc.PAULIS] for s in mc.PAULIS])
    return BlochTriple(x, y, T)


def bloch_vector(rho) -> np.ndarray:
    """Bloch vector of a single qubit."""
    m = mc.as_matrix(rho)
    if m.shape != (2, 2):
        raise DimMismatch("single-qubit Bloch vector needs a 2x2 matrix")
    return np.array([np.real(np.trace(m @ s)) for s in mc.PAULIS])


def fano_bloch(rho) -> FanoBlochTensor:
    """Fano-Bloch coefficients of a d (x) 2 state, d = dims[0]."""
    rho = as_state(rho)
    if len(rho.dims) != 2 or rho.dims[1] != 2:
        raise DimMismatch(f"fano_bloch needs dims (d, 2), got {rho.dims}")
    d = rho.dims[0]
    gam = [np.eye(d, dtype=complex)] + su_generators(d)
    sig = [mc.PAULI_I, *mc.PAULIS]
    R = np.empty((d * d, 4))
    for a, g in enumerate(gam):
        for b, s in enumerate(sig):
            R[a, b] = 0.5 * d * np.real(np.trace(rho.mat @ mc.kron(g, s)))
    return FanoBlochTensor(d, R)


def su_generators(d: int) -> list:
    """Generalised Gell-Mann matrices ordered U_jk, V_jk (j<k), then W_l.

    Normalised so that Tr(X_i X_j) = 2 delta_ij.
    """
    d = int(d)
    if d < 2:
        raise InvalidParams("su(d) generators need d >= 2")
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    us, vs, ws = [], [], []
    for j, k in pairs:
        u = np.zeros((d, d), dtype=complex)
        u[j, k] = u[k, j] = 1.0
        us.append(u)
        v = np.zeros((d, d), dtype=complex)
        v[j, k] = -1j
        v[k, j] = 1j
        vs.append(v)
    for l in range(1, d):
        w = np.zeros((d, d), dtype=complex)
        w[np.arange(l), np.arange(l)] = 1.0
        w[l, l] = -l
        ws.append(np.sqrt(2.0 / (l * (l + 1))) * w)
    return us + vs + ws


# ----------------------------------------------------------------------------
# decompositions


def _split(dims, cut) -> tuple[list, list]:
    n = len(dims)
    if isinstance(cut, (int, np.integer)):
        left = list(range(int(cut)))
    else:
        left = sorted(int(c) for c in cut)
    right = [k for k in range(n) if k not in left]
    if not left or not right or any(k < 0 or k >= n for k in left):
        raise InvalidParams(f"cut {cut!r} is not a proper bipartition of {n} factors")
    return left, right


def schmidt(psi: PureState, cut=1):
    """Schmidt decomposition across ``cut``.

    ``cut`` is either the number of leading factors on the left or an explicit
    list of left-factor indices. Returns (weights, left_basis, right_basis)
    where weights are the squared Schmidt coefficients in descending order
    (they sum to 1) and the bases are matrices with one vector per column.
    """
    dims = psi.dims
    left, right = _split(dims, cut)
    t = psi.amplitudes.reshape(dims).transpose(left + right)
    dl = int(np.prod([dims[k] for k in left]))
    dr = int(np.prod([dims[k] for k in right]))
    u, s, vh = np.linalg.svd(t.reshape(dl, dr), full_matrices=False)
    return s**2, u, vh.T


def schmidt_rank(weights: np.ndarray, tol: float = 1e-12) -> int:
    return int(np.sum(np.asarray(weights) > tol))


def purify(rho) -> PureState:
    """Purification on dims + [rank]; Tr over the last factor returns rho."""
    rho = as_state(rho)
    w, v = mc.eigh(rho.mat)
    w = mc.clamp_spectrum(w)
    keep = w > TOL.rank
    w, v = w[keep], v[:, keep]
    r = w.size
    amp = np.zeros((rho.dim, r), dtype=complex)
    for i in range(r):
        amp[:, i] = np.sqrt(w[i]) * v[:, i]
    amp = amp.ravel()
    return PureState(rho.dims + (r,), amp / np.linalg.norm(amp))


# ----------------------------------------------------------------------------
# random states


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_pure(dims: Sequence[int], seed=None) -> PureState:
    rng = _rng(seed)
    n = int(np.prod(dims))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState.normalized(tuple(dims), v)


def random_density(dims: Sequence[int], rank: int | None = None, seed=None) -> DensityMatrix:
    rng = _rng(seed)
    n = int(np.prod(dims))
    rank = n if rank is None else int(rank)
    if not 1 <= rank <= n:
        raise InvalidParams(f"rank {rank} outside [1, {n}]")
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    m = g @ g.conj().T
    m = mc.hermitize(m / np.real(np.trace(m)))
    return DensityMatrix(tuple(dims), m)


def random_unitary(d: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_x_params(seed=None) -> XStateParams:
    rng = _rng(seed)
    d = rng.dirichlet(np.ones(4))
    r14, r23 = rng.uniform(0, 1, 2)
    f14, f23 = rng.uniform(0, 2 * np.pi, 2)
    a14 = r14 * np.sqrt(d[0] * d[3]) * np.exp(1j * f14)
    a23 = r23 * np.sqrt(d[1] * d[2]) * np.exp(1j * f23)
    return XStateParams(*map(float, d), complex(a14), complex(a23))


def random_bell_diagonal(seed=None) -> BellDiagonalParams:
    rng = _rng(seed)
    while True:
        c = rng.uniform(-1, 1, 3)
        p = BellDiagonalParams(*map(float, c))
        if p.eigenvalues().min() >= 0:
            return p


# ----------------------------------------------------------------------------
# JSON


def state_from_json(obj: Mapping[str, Any] | str) -> DensityMatrix:
    """Parse ``{"dims", "re", "im"}`` or ``{"preset", "params"}`` into a validated state."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise InvalidState(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, Mapping):
        raise InvalidState("state JSON must be an object")
    if "preset" in obj:
        params = obj.get("params", {}) or {}
        if isinstance(params, Mapping):
            return preset(str(obj["preset"]), **params)
        return preset(str(obj["preset"]), *params)
    try:
        dims = [int(d) for d in obj["dims"]]
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidState(f"state JSON missing or malformed field: {exc}") from exc
    if re.shape != im.shape:
        raise InvalidState("re and im have different shapes")
    return ensure_state(re + 1j * im, dims)


def state_to_json(rho: DensityMatrix) -> dict:
    return {"dims": list(rho.dims), "re": np.real(rho.mat).tolist(), "im": np.imag(rho.mat).tolist()}
