"""Command-line front end: measure, sweep, evolve, qfi, verify.

Every failure prints one line ``error_code=<name> ...`` on stderr and exits
nonzero: 1 verify failure, 2 invalid input or state, 3 inapplicable or empty
measure list, 4 integrator instability.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import coherence as co
from . import discord as dc
from . import dynamics as dy
from . import entanglement as et
from . import entropy as en
from . import matcore as mc
from . import metrology as me
from . import states as st
from . import uncertainty as un
from .errors import InapplicableMeasure, InvalidParams, QCorrError, StepUnstable

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_MEASURE, EXIT_UNSTABLE = 0, 1, 2, 3, 4
EIG_FLOOR = 1e-7  # the CLI treats eigenvalues below -1e-7 as integrator instability


class CliError(Exception):
    def __init__(self, code: str, message: str, exit_code: int):
        super().__init__(message)
        self.code = code
        self.exit_code = exit_code


def fmt(x) -> str:
    x = float(x)
    return "nan" if np.isnan(x) else f"{x:.12g}"


# ----------------------------------------------------------------------------
# measure registry


@dataclass(frozen=True)
class Measure:
    fn: Callable[[st.DensityMatrix], float]
    method: str
    applies: Callable[[tuple], bool]
    requirement: str


def _two_qubits(d):
    return tuple(d) == (2, 2)


def _bipartite(d):
    return len(d) == 2


def _qubit_first(d):
    return len(d) >= 2 and d[0] == 2


def _qubit_last_bipartite(d):
    return len(d) == 2 and d[1] == 2


def _any(d):
    return True


def _pure_ket(rho: st.DensityMatrix) -> st.PureState:
    w, v = np.linalg.eigh(rho.mat)
    if w[-1] < 1 - 1e-9:
        raise InapplicableMeasure(f"state is mixed (largest eigenvalue {w[-1]:.6g}); a pure state is required")
    return st.PureState(rho.dims, v[:, -1])


def _single_qubit(d):
    return tuple(d) == (2,)


MEASURES: dict[str, Measure] = {
    "concurrence": Measure(et.concurrence_2q, "wootters", _two_qubits, "dims (2, 2)"),
    "eof": Measure(et.eof_2q, "wootters", _two_qubits, "dims (2, 2)"),
    "negativity": Measure(et.negativity, "partial_transpose", _bipartite, "two factors"),
    "log_negativity": Measure(et.log_negativity, "partial_transpose", _bipartite, "two factors"),
    "entanglement_entropy": Measure(
        lambda r: et.entanglement_entropy(_pure_ket(r)), "schmidt", _bipartite, "two factors, pure state"
    ),
    "tripartite_negativity": Measure(
        et.tripartite_negativity, "partial_transpose", lambda d: tuple(d) == (2, 2, 2), "dims (2, 2, 2)"
    ),
    "lqu": Measure(lambda r: un.lqu_2xd(r)[0], "w_matrix", _qubit_first, "qubit first factor"),
    "lqu_avg": Measure(
        lambda r: un.lqu_multiqubit_avg(r)[0],
        "w_matrix_avg",
        lambda d: 2 <= len(d) <= 5 and all(x == 2 for x in d),
        "2 to 5 qubits",
    ),
    "lqu_d1xd2": Measure(un.lqu_d1xd2, "su_generators", _bipartite, "two factors"),
    "lqfi": Measure(lambda r: un.lqfi(r)[0], "m_matrix", _qubit_first, "qubit first factor"),
    "discord_x": Measure(lambda r: dc.discord_x(r.mat).quantum, "x_closed", _two_qubits, "dims (2, 2), X pattern"),
    "discord_numeric": Measure(
        lambda r: dc.discord_numeric(r).quantum, "grid_refine", _two_qubits, "dims (2, 2)"
    ),
    "discord_rank2": Measure(dc.discord_rank2, "rank2_linear", _two_qubits, "dims (2, 2), rank <= 2"),
    "geometric_discord": Measure(dc.geometric_discord_hs, "hilbert_schmidt", _two_qubits, "dims (2, 2)"),
    "trace_discord_x": Measure(lambda r: dc.trace_discord_x(r.mat), "x_closed", _two_qubits, "dims (2, 2), X pattern"),
    "linear_classical": Measure(
        lambda r: dc.classical_corr_linear(r)[0], "channel_L", _qubit_last_bipartite, "dims (d, 2)"
    ),
    "linear_discord": Measure(dc.linear_discord, "channel_L", _qubit_last_bipartite, "dims (d, 2)"),
    "mutual_information": Measure(en.mutual_information, "von_neumann", _bipartite, "two factors"),
    "von_neumann": Measure(en.von_neumann, "spectral", _any, "any"),
    "linear_entropy": Measure(en.linear_entropy, "purity", _any, "any"),
    "purity": Measure(lambda r: r.purity(), "trace", _any, "any"),
    "c_rel_entropy": Measure(co.c_rel_entropy, "dephased_entropy", _any, "any"),
    "c_l1": Measure(co.c_l1, "l1_offdiag", _any, "any"),
    "c_geometric": Measure(co.c_geometric_qubit, "bloch_closed", _single_qubit, "a single qubit"),
    "correlated_coherence": Measure(co.correlated_coherence, "relative_entropy", _bipartite, "two factors"),
}


def resolve_measures(spec: str | None, dims: tuple) -> dict[str, Measure]:
    names = [s.strip() for s in (spec or "").split(",") if s.strip()]
    if not names:
        raise CliError("empty_measure_list", "no measures requested", EXIT_MEASURE)
    out = {}
    for name in names:
        if name.startswith("population_"):
            try:
                k = int(name.split("_", 1)[1])
            except ValueError:
                raise CliError("unknown_measure", f"measure={name} bad population index", EXIT_MEASURE) from None
            n = int(np.prod(dims))
            out[name] = Measure(dy.population(k), "diagonal", lambda d, k=k, n=n: 0 <= k < n, f"index < {n}")
        elif name in MEASURES:
            out[name] = MEASURES[name]
        else:
            raise CliError("unknown_measure", f"measure={name} known={','.join(MEASURES)},population_<k>", EXIT_MEASURE)
        if not out[name].applies(tuple(dims)):
            raise CliError(
                "inapplicable_measure",
                f"measure={name} dims={tuple(dims)} requires {out[name].requirement}",
                EXIT_MEASURE,
            )
    return out


def evaluate(name: str, m: Measure, rho: st.DensityMatrix) -> float:
    try:
        return float(m.fn(rho))
    except (QCorrError, ArithmeticError) as exc:
        raise CliError("inapplicable_measure", f"measure={name} {type(exc).__name__}: {exc}", EXIT_MEASURE) from exc


# ----------------------------------------------------------------------------
# inputs


def _token(t: str):
    t = t.strip()
    for cast in (int, float, complex):
        try:
            return cast(t)
        except ValueError:
            continue
    raise CliError("invalid_params", f"cannot parse parameter {t!r}", EXIT_INPUT)


def load_state(args) -> st.DensityMatrix:
    if (args.preset is None) == (args.input is None):
        raise CliError("invalid_input", "give exactly one of --preset or --input", EXIT_INPUT)
    try:
        if args.preset is not None:
            params = [_token(t) for t in args.params.split(",") if t.strip()] if args.params else []
            return st.preset(args.preset, *params)
        try:
            with open(args.input) as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError("invalid_input", f"cannot read {args.input}: {exc.strerror}", EXIT_INPUT) from exc
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CliError("invalid_json", f"{args.input}: line {exc.lineno} col {exc.colno}: {exc.msg}", EXIT_INPUT)
        return st.state_from_json(obj)
    except QCorrError as exc:
        raise CliError(exc.code, str(exc), EXIT_INPUT) from exc


def parse_grid(spec: str) -> np.ndarray:
    try:
        a, b, n = spec.split(":")
        start, stop, count = float(a), float(b), int(n)
    except ValueError:
        raise CliError("invalid_grid", f"grid {spec!r} is not start:stop:count", EXIT_INPUT) from None
    if count < 2:
        raise CliError("invalid_grid", f"grid count must be >= 2, got {count}", EXIT_INPUT)
    return np.linspace(start, stop, count)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ----------------------------------------------------------------------------
# commands


def cmd_measure(args) -> int:
    rho = load_state(args)
    measures = resolve_measures(args.measures, rho.dims)
    rows = [(name, fmt(evaluate(name, m, rho)), m.method) for name, m in measures.items()]
    _emit(_rows_csv(("measure", "value", "method"), rows), args.out)
    return EXIT_OK


def _lindblad_model(kind: str, rate: float, dims) -> dy.LindbladModel:
    if rate < 0:
        raise CliError("invalid_params", f"rate must be nonnegative, got {rate}", EXIT_INPUT)
    op = {"amplitude_damping": np.array([[0, 1], [0, 0]]), "dephasing": mc.PAULI_Z}[kind]
    if any(d != 2 for d in dims):
        raise CliError("dim_mismatch", f"Lindblad presets act on qubits, got dims {tuple(dims)}", EXIT_INPUT)
    n = int(np.prod(dims))
    jumps = [(rate, mc.embed_operator(op, k, dims)) for k in range(len(dims))]
    return dy.LindbladModel(np.zeros((n, n)), jumps)


def _process(args, dims):
    name = args.process
    if name in dy.CHANNELS:
        targets = None if args.targets is None else [int(t) for t in args.targets.split(",")]
        if targets is None and any(d != 2 for d in dims):
            raise CliError("dim_mismatch", f"channel presets act on qubits, got dims {tuple(dims)}", EXIT_INPUT)
        return dy.ChannelProcess(name, targets), "p"
    if name.startswith("lindblad_"):
        kind = name[len("lindblad_") :]
        if kind in ("amplitude_damping", "dephasing"):
            model = _lindblad_model(kind, args.rate, dims)
            return dy.LindbladProcess(model, args.dt, eig_floor=EIG_FLOOR), "t"
    known = [*dy.CHANNELS, "lindblad_amplitude_damping", "lindblad_dephasing"]
    raise CliError("unknown_process", f"process={name} known={','.join(known)}", EXIT_INPUT)


def cmd_sweep(args) -> int:
    rho = load_state(args)
    measures = resolve_measures(args.measures, rho.dims)
    grid = parse_grid(args.grid)
    process, pname = _process(args, rho.dims)
    try:
        table = dy.sweep(rho, process, {k: m.fn for k, m in measures.items()}, grid, parameter=pname)
    except StepUnstable as exc:
        raise CliError("step_unstable", str(exc), EXIT_UNSTABLE) from exc
    except QCorrError as exc:
        raise CliError(exc.code, str(exc), EXIT_INPUT) from exc
    for name, errs in table.errors.items():
        i, msg = errs[0]
        print(f"warning measure={name} failed at {len(errs)} grid points; first at index {i}: {msg}", file=sys.stderr)
    _emit(table.to_csv(), args.out)
    return EXIT_OK


def cmd_evolve(args) -> int:
    rho = load_state(args)
    measures = resolve_measures(args.measures, rho.dims) if args.measures else {}
    model = _lindblad_model(args.model, args.rate, rho.dims)
    try:
        traj = dy.lindblad_evolve(rho, model, args.t_end, args.dt, eig_floor=EIG_FLOOR)
    except StepUnstable as exc:
        raise CliError("step_unstable", str(exc), EXIT_UNSTABLE) from exc
    except QCorrError as exc:
        raise CliError(exc.code, str(exc), EXIT_INPUT) from exc
    every = max(1, int(args.every))
    n = rho.dim
    header = ["t", "trace", *[f"population_{k}" for k in range(n)], *measures]
    rows = []
    for i in range(0, len(traj.times), every):
        s = traj.states[i]
        vals = [np.real(np.trace(s.mat)), *np.real(np.diag(s.mat))]
        vals += [evaluate(k, m, s) for k, m in measures.items()]
        rows.append([fmt(traj.times[i]), *map(fmt, vals)])
    _emit(_rows_csv(header, rows), args.out)
    print(f"max_trace_drift={fmt(traj.max_trace_drift)} min_eigenvalue={fmt(traj.min_eigenvalue)}", file=sys.stderr)
    return EXIT_OK


def generator(spec: str, dims) -> np.ndarray:
    """collective_{x,y,z}: sum of sigma/2 over qubits; local_{x,y,z}:k on qubit k."""
    axes = {"x": mc.PAULI_X, "y": mc.PAULI_Y, "z": mc.PAULI_Z}
    kind, _, idx = spec.partition(":")
    scope, _, axis = kind.partition("_")
    if axis not in axes or scope not in ("collective", "local") or any(d != 2 for d in dims):
        raise CliError("invalid_generator", f"generator={spec} on dims {tuple(dims)}", EXIT_INPUT)
    if scope == "collective":
        return sum(mc.embed_operator(axes[axis] / 2, k, dims) for k in range(len(dims)))
    try:
        k = int(idx)
        return mc.embed_operator(axes[axis] / 2, k, dims)
    except (ValueError, QCorrError):
        raise CliError("invalid_generator", f"generator={spec} needs a valid qubit index", EXIT_INPUT) from None


def cmd_qfi(args) -> int:
    rho = load_state(args)
    H = generator(args.generator, rho.dims)
    w, v = np.linalg.eigh(rho.mat)
    if w[-1] > 1 - 1e-12:
        F, method = me.qfi_pure_unitary(st.PureState(rho.dims, v[:, -1]), H), "pure_variance"
    else:
        fam = me.unitary_family(rho, H)
        F, method = me.qfi(rho.mat, me.d_rho(fam)), "spectral"
    rows = [("qfi", fmt(F), method)]
    if F > 1e-12:
        rows.append(("cramer_rao_bound", fmt(me.cramer_rao(F, args.trials)), f"trials={args.trials}"))
    _emit(_rows_csv(("quantity", "value", "method"), rows), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import SUITE_NAMES, run_suite

    if args.suite not in SUITE_NAMES:
        raise CliError("unknown_suite", f"suite={args.suite} known={','.join(SUITE_NAMES)}", EXIT_INPUT)
    if args.n < 1:
        raise CliError("invalid_params", f"--n must be >= 1, got {args.n}", EXIT_INPUT)
    checks = run_suite(args.suite, n=args.n, seed=args.seed)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    worst = max(checks, key=lambda c: c.residual / c.tol if c.tol > 0 else (np.inf if c.residual > 0 else 0.0))
    print(f"summary suite={args.suite} checks={len(checks)} failed={len(failed)} max_residual={fmt(max(c.residual for c in checks))} worst_relative={worst.name}")
    if failed:
        print(f"error_code=verify_failed first={failed[0].name} residual={fmt(failed[0].residual)} tol={failed[0].tol:.3g}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ----------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message.replace("\n", " "), EXIT_INPUT)


def _state_args(p):
    p.add_argument("--preset", help=f"preset name: {', '.join(st.PRESETS)}")
    p.add_argument("--params", help="comma-separated preset parameters")
    p.add_argument("--input", help="state JSON file")
    p.add_argument("--out", help="write CSV here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcorr", description="Quantum correlation measures from the command line.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("measure", help="evaluate measures on a state")
    _state_args(p)
    p.add_argument("--measures", required=True, help="comma-separated measure names")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("sweep", help="measures along a channel or Lindblad process")
    _state_args(p)
    p.add_argument("--measures", required=True)
    p.add_argument("--process", default="dephasing", help="channel preset or lindblad_<kind>")
    p.add_argument("--grid", required=True, help="start:stop:count")
    p.add_argument("--targets", help="comma-separated factor indices for channel processes")
    p.add_argument("--rate", type=float, default=1.0, help="Lindblad rate")
    p.add_argument("--dt", type=float, default=1e-3, help="RK4 step")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("evolve", help="Lindblad evolution of a qubit register")
    _state_args(p)
    p.add_argument("--model", choices=("amplitude_damping", "dephasing"), default="amplitude_damping")
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--t-end", dest="t_end", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-2)
    p.add_argument("--every", type=int, default=1, help="write every k-th step")
    p.add_argument("--measures", help="optional extra measure columns")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("qfi", help="QFI for a unitary encoding")
    _state_args(p)
    p.add_argument("--generator", default="collective_z", help="collective_{x,y,z} or local_{x,y,z}:k")
    p.add_argument("--trials", type=int, default=1)
    p.set_defaults(func=cmd_qfi)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="all")
    p.add_argument("--n", type=int, default=20, help="random samples per check")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def _join_values(argv: list) -> list:
    # "--params -0.5,0.1" would otherwise be read as an option
    out, i = [], 0
    while i < len(argv):
        if argv[i] in ("--params", "--grid") and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_join_values(argv))
        return args.func(args)
    except CliError as exc:
        print(f"error_code={exc.code} {exc}", file=sys.stderr)
        return exc.exit_code
    except InvalidParams as exc:
        print(f"error_code={exc.code} {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
