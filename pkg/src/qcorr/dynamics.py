"""Kraus channels, Lindblad evolution, and measure sweeps along a decoherence process."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import matcore as mc
from .errors import DimMismatch, InvalidParams, NonUnitary, QCorrError, StepUnstable
from .states import DensityMatrix, as_state


@dataclass
class KrausChannel:
    operators: list
    label: str = ""

    def __post_init__(self):
        ops = [np.asarray(k, dtype=complex) for k in self.operators]
        if not ops:
            raise InvalidParams("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape or shape[0] != shape[1] for k in ops):
            raise DimMismatch("Kraus operators must share one square shape")
        self.operators = ops

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def completeness_error(self) -> float:
        s = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def compose(self, other: "KrausChannel") -> "KrausChannel":
        """Channel 'other after self'."""
        ops = [b @ a for a in self.operators for b in other.operators]
        return KrausChannel(ops, f"{other.label}*{self.label}")


CHANNELS = ("dephasing", "phase_flip", "depolarizing", "amplitude_damping")


def channel_preset(name: str, p: float) -> KrausChannel:
    """Single-qubit channel presets with fixed textbook Kraus sets."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise InvalidParams(f"channel parameter must lie in [0, 1], got {p}")
    if name == "dephasing":
        ops = [np.diag([1.0, np.sqrt(1 - p)]), np.diag([0.0, np.sqrt(p)])]
    elif name == "phase_flip":
        ops = [np.sqrt(1 - p) * mc.PAULI_I, np.sqrt(p) * mc.PAULI_Z]
    elif name == "depolarizing":
        ops = [np.sqrt(1 - 3 * p / 4) * mc.PAULI_I] + [np.sqrt(p / 4) * s for s in mc.PAULIS]
    elif name == "amplitude_damping":
        ops = [np.diag([1.0, np.sqrt(1 - p)]), np.sqrt(p) * np.array([[0, 1], [0, 0]])]
    else:
        raise InvalidParams(f"unknown channel {name!r}; choose from {CHANNELS}")
    return KrausChannel(ops, f"{name}({p:g})")


def apply_channel(rho, channel: KrausChannel, target=None) -> DensityMatrix:
    """Apply a channel to one factor (``target``), to each listed factor, or to the whole state.

    ``target=None`` with a channel of the full dimension acts globally.
    """
    rho = as_state(rho)
    if target is None:
        if channel.dim != rho.dim:
            raise DimMismatch(f"channel dimension {channel.dim} does not match state dimension {rho.dim}")
        ops = channel.operators
    else:
        if not isinstance(target, (int, np.integer)):
            for t in target:
                rho = apply_channel(rho, channel, int(t))
            return rho
        t = int(target)
        if not 0 <= t < len(rho.dims):
            raise DimMismatch(f"target {t} out of range for dims {rho.dims}")
        if rho.dims[t] != channel.dim:
            raise DimMismatch(f"channel dimension {channel.dim} does not match factor {t} of dims {rho.dims}")
        ops = [mc.embed_operator(k, t, rho.dims) for k in channel.operators]
    m = sum(k @ rho.mat @ k.conj().T for k in ops)
    return DensityMatrix(rho.dims, mc.hermitize(m))


def kraus_from_environment(U, rho_E, tol: float = 1e-10) -> KrausChannel:
    """K_{mu nu} = sqrt(p_nu) <mu|U|nu> for rho_E = sum p_nu |nu><nu|; U acts on S (x) E."""
    U = np.asarray(U, dtype=complex)
    rE = mc.as_matrix(rho_E)
    dE = rE.shape[0]
    n = U.shape[0]
    if n % dE:
        raise DimMismatch(f"unitary size {n} is not a multiple of environment dimension {dE}")
    if np.max(np.abs(U.conj().T @ U - np.eye(n))) > tol:
        raise NonUnitary("joint evolution is not unitary within tolerance")
    dS = n // dE
    w, v = mc.eigh(rE)
    w = mc.clamp_spectrum(w)
    T = U.reshape(dS, dE, dS, dE)
    ops = []
    for nu in range(dE):
        if w[nu] <= 0:
            continue
        # <mu|U|nu> on E, as an operator on S
        Unu = np.einsum("iajb,b->iaj", T, v[:, nu])
        for mu in range(dE):
            ops.append(np.sqrt(w[nu]) * np.einsum("iaj,a->ij", Unu, np.eye(dE)[mu]))
    return KrausChannel(ops, "environment")


def evolve_with_environment(rho_S, U, rho_E) -> np.ndarray:
    """Tr_E[U (rho_S (x) rho_E) U^dagger]."""
    rS = mc.as_matrix(rho_S)
    rE = mc.as_matrix(rho_E)
    joint = U @ np.kron(rS, rE) @ U.conj().T
    return mc.partial_trace(joint, 0, dims=(rS.shape[0], rE.shape[0]))


@dataclass
class LindbladModel:
    H: np.ndarray
    jumps: list = field(default_factory=list)  # (rate, operator)

    def __post_init__(self):
        self.H = np.asarray(self.H, dtype=complex)
        if not mc.is_hermitian(self.H):
            raise InvalidParams("Hamiltonian is not Hermitian")
        jumps = []
        for rate, L in self.jumps:
            if rate < 0:
                raise InvalidParams(f"negative rate {rate}")
            jumps.append((float(rate), np.asarray(L, dtype=complex)))
        self.jumps = jumps


def lindblad_rhs(rho, model: LindbladModel) -> np.ndarray:
    """-i[H, rho] + sum_j g_j (L rho L^dagger - {L^dagger L, rho}/2)."""
    m = mc.as_matrix(rho)
    out = -1j * mc.commutator(model.H, m)
    for g, L in model.jumps:
        Ld = L.conj().T
        out = out + g * (L @ m @ Ld - 0.5 * mc.anticommutator(Ld @ L, m))
    return out


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    max_trace_drift: float
    min_eigenvalue: float


def lindblad_evolve(
    rho0,
    model: LindbladModel,
    t_end: float,
    dt: float,
    hermitize: bool = True,
    drift_limit: float = 1e-6,
    eig_floor: float | None = None,
) -> Trajectory:
    """Fixed-step RK4 integration. The last step is shortened to land on t_end.

    Trace drift above ``drift_limit`` raises StepUnstable. The smallest
    eigenvalue seen is reported on the trajectory; passing ``eig_floor`` also
    raises StepUnstable once it drops below ``-eig_floor``.
    """
    if dt <= 0:
        raise InvalidParams("dt must be positive")
    if t_end < 0:
        raise InvalidParams("t_end must be nonnegative")
    rho0 = as_state(rho0)
    m = rho0.mat.copy()
    n_steps = int(np.ceil(t_end / dt - 1e-12)) if t_end > 0 else 0
    times = [0.0]
    states = [rho0]
    t = 0.0
    drift = 0.0
    min_eig = float(np.linalg.eigvalsh(mc.hermitize(m)).min())
    for _ in range(n_steps):
        h = min(dt, t_end - t)
        k1 = lindblad_rhs(m, model)
        k2 = lindblad_rhs(m + 0.5 * h * k1, model)
        k3 = lindblad_rhs(m + 0.5 * h * k2, model)
        k4 = lindblad_rhs(m + h * k3, model)
        m = m + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if hermitize:
            m = mc.hermitize(m)
        t += h
        drift = max(drift, abs(float(np.real(np.trace(m))) - 1.0))
        if drift > drift_limit:
            raise StepUnstable(f"trace drift {drift:.3e} at t={t:.6g}; try a smaller dt")
        min_eig = min(min_eig, float(np.linalg.eigvalsh(mc.hermitize(m)).min()))
        if eig_floor is not None and min_eig < -eig_floor:
            raise StepUnstable(f"eigenvalue {min_eig:.3e} at t={t:.6g}; try a smaller dt")
        times.append(t)
        states.append(DensityMatrix(rho0.dims, m.copy()))
    return Trajectory(np.array(times), states, drift, min_eig)


# ----------------------------------------------------------------------------
# sweeps


@dataclass
class MeasureTable:
    parameter: str
    grid: np.ndarray
    columns: dict
    errors: dict = field(default_factory=dict)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = list(self.columns)
        w.writerow([self.parameter, *names])
        for i, g in enumerate(self.grid):
            w.writerow([_fmt(g)] + [_fmt(self.columns[n][i]) for n in names])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _fmt(x) -> str:
    x = float(x)
    if np.isnan(x):
        return "nan"
    return f"{x:.12g}"


@dataclass
class ChannelProcess:
    """Apply ``channel`` with strength p to each factor in ``targets``."""

    channel: str
    targets: Sequence[int] | None = None

    def at(self, rho: DensityMatrix, p: float) -> DensityMatrix:
        ch = channel_preset(self.channel, p)
        targets = range(len(rho.dims)) if self.targets is None else self.targets
        return apply_channel(rho, ch, list(targets))


@dataclass
class LindbladProcess:
    """Evolve under ``model`` to time t with step ``dt``."""

    model: LindbladModel
    dt: float = 1e-3
    eig_floor: float | None = None

    def at(self, rho: DensityMatrix, t: float) -> DensityMatrix:
        return lindblad_evolve(rho, self.model, t, self.dt, eig_floor=self.eig_floor).states[-1]


def sweep(initial, process, measures: dict, grid, parameter: str = "param") -> MeasureTable:
    """Evaluate named measures on the evolved state at each grid value.

    ``measures`` maps column names to callables state -> float. Failures are
    recorded as NaN cells with the error text kept in ``errors``.
    """
    rho = as_state(initial)
    grid = np.asarray(grid, dtype=float)
    if not measures:
        raise InvalidParams("no measures requested")
    cols = {name: np.full(grid.size, np.nan) for name in measures}
    errors: dict = {}
    if isinstance(process, LindbladProcess) and np.all(np.diff(grid) >= 0):
        # one trajectory through the sorted grid instead of restarting at t=0
        states = []
        cur, t = rho, 0.0
        for g in grid:
            if g > t:
                cur = lindblad_evolve(cur, process.model, g - t, process.dt, eig_floor=process.eig_floor).states[-1]
                t = g
            states.append(cur)
    else:
        states = [process.at(rho, g) for g in grid]
    for i, s in enumerate(states):
        for name, fn in measures.items():
            try:
                cols[name][i] = float(fn(s))
            except (QCorrError, ArithmeticError, ValueError) as exc:
                errors.setdefault(name, []).append((i, f"{type(exc).__name__}: {exc}"))
    return MeasureTable(parameter, grid, cols, errors)


def population(index: int) -> Callable[[DensityMatrix], float]:
    """Measure returning the diagonal element rho[index, index]."""
    return lambda rho: float(np.real(as_state(rho).mat[index, index]))


__all__ = [
    "KrausChannel",
    "CHANNELS",
    "channel_preset",
    "apply_channel",
    "kraus_from_environment",
    "evolve_with_environment",
    "LindbladModel",
    "lindblad_rhs",
    "Trajectory",
    "lindblad_evolve",
    "MeasureTable",
    "ChannelProcess",
    "LindbladProcess",
    "sweep",
    "population",
]
