"""Command-line front end.

Every subcommand is a pure function of its flags.  Tables go out as CSV with
17 significant digits and LF line endings; structured results as JSON.
Exit status: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import checks
from .dynamics import TrapConfig, solve_epsilon, wronskian
from .phase_space import Tomogram, state_tomogram, tomogram_function, wigner_grid
from .specfun import NumericalError, QuadratureSpec
from .states import DeformationSpec, make_state
from .tomography import (
    inversion_quadrature,
    invert_to_wigner,
    photon_number_distribution,
    reconstruct_density_matrix,
)

EPSILON_HEADER = ("t", "eps_re", "eps_im", "epsdot_re", "epsdot_im", "wronskian_im_err")
TOMOGRAM_HEADER = ("X", "mu", "nu", "w")
WIGNER_HEADER = ("q", "p", "W")
PHOTON_HEADER = ("n", "w")

DENSITY_MATRIX_SCHEMA = {
    "type": "object",
    "required": ["dim", "entries", "report"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["m", "n", "re", "im"],
                "properties": {
                    "m": {"type": "integer", "minimum": 0},
                    "n": {"type": "integer", "minimum": 0},
                    "re": {"type": "number"},
                    "im": {"type": "number"},
                },
                "additionalProperties": False,
            },
        },
        "report": {
            "type": "object",
            "required": ["trace", "purity", "min_eigenvalue", "hermitian"],
        },
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def emit(table, fmt: str = "csv", path: str | Path = "-") -> None:
    """Write a table deterministically.

    For ``fmt="csv"`` the table is ``(header, rows)``; for ``"json"`` any
    JSON-serialisable object.  ``path="-"`` writes to stdout.
    """
    if fmt == "csv":
        header, rows = table
        if len(rows) == 0:
            raise ValueError("refusing to write an empty table")
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for row in rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        text = buf.getvalue()
    elif fmt == "json":
        if not table:
            raise ValueError("refusing to write an empty document")
        text = json.dumps(table, indent=1, sort_keys=False, allow_nan=False) + "\n"
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    if str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def read_tomogram_csv(path: str | Path, time: float = 0.0) -> Tomogram:
    """Read a ``X,mu,nu,w`` CSV as written by the ``tomogram`` subcommand."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != TOMOGRAM_HEADER:
                raise ValueError(f"{path}: header must be exactly {','.join(TOMOGRAM_HEADER)}")
            data = np.array([[float(v) for v in row] for row in reader if row])
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc.strerror}") from exc
    if data.size == 0:
        raise ValueError(f"{path}: no samples")
    key = data[:, 1:3]
    starts = np.concatenate([[0], np.nonzero(np.any(np.diff(key, axis=0) != 0, axis=1))[0] + 1])
    lengths = np.diff(np.append(starts, len(data)))
    if np.any(lengths != lengths[0]):
        raise ValueError(f"{path}: every (mu, nu) line must have the same number of X samples")
    n = lengths[0]
    X = data[:, 0].reshape(-1, n)
    w = data[:, 3].reshape(-1, n)
    return Tomogram(time, data[starts, 1], data[starts, 2], X, w, "external")


def _axis(text: str) -> np.ndarray:
    """``"v"``, ``"a,b,c"`` or ``"start:stop:count"``."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return np.linspace(float(a), float(b), int(n))
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad axis specification {text!r}") from exc


# ---------------------------------------------------------------- flag groups


def _trap_flags(p):
    g = p.add_argument_group("trap")
    g.add_argument("--kappa", type=float, default=0.5)
    g.add_argument("--omega", type=float, default=2.0)
    g.add_argument("--steps", type=int, default=2, help="minimum number of integrator steps")


def _state_flags(p):
    g = p.add_argument_group("state")
    g.add_argument("--kind", choices=("coherent", "number", "f_coherent"), default="coherent")
    g.add_argument("--alpha-re", "--beta-re", dest="amp_re", type=float, default=0.0)
    g.add_argument("--alpha-im", "--beta-im", dest="amp_im", type=float, default=0.0)
    g.add_argument("--level", type=int, default=0)
    g.add_argument("--f-variant", default="identity",
                   choices=("identity", "paper_lamb_dicke", "vogel_lamb_dicke", "custom_table"))
    g.add_argument("--eta", type=float, default=0.0)
    g.add_argument("--f-table", default=None, help="comma-separated f(0), f(1), ... for custom_table")
    g.add_argument("--truncation", type=int, default=40)
    g.add_argument("--t", type=float, default=0.0)


def _quad_flags(p):
    g = p.add_argument_group("quadrature (callable inputs only)")
    g.add_argument("--mu-cut", type=float, default=None)
    g.add_argument("--mu-points", type=int, default=None)
    g.add_argument("--y-cut", type=float, default=None)
    g.add_argument("--y-points", type=int, default=None)


def _out_flags(p):
    p.add_argument("--out", default="-")
    p.add_argument("--threads", type=int, default=1)


def _grid_flags(p, name, lo=-5.0, hi=5.0, steps=40):
    p.add_argument(f"--{name}-min", type=float, default=lo)
    p.add_argument(f"--{name}-max", type=float, default=hi)
    p.add_argument(f"--{name}-steps", type=int, default=steps)


def _input_flags(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--from-state", action="store_true", help="build the tomogram from the state flags (default)")
    src.add_argument("--tomogram", default=None, help="CSV written by the tomogram subcommand")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iontomo", description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None, help="key = value file merged under explicit flags")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("epsilon", help="integrate eps(t)")
    _trap_flags(p)
    p.add_argument("--tmax", type=float, default=10.0)
    _out_flags(p)

    p = sub.add_parser("state", help="Fock coefficients of a state as JSON")
    _state_flags(p)
    _out_flags(p)

    p = sub.add_parser("tomogram", help="sample a forward tomogram")
    _trap_flags(p)
    _state_flags(p)
    p.add_argument("--mu", type=_axis, default=np.array([1.0]))
    p.add_argument("--nu", type=_axis, default=np.array([0.0]))
    p.add_argument("--phi", type=_axis, default=None, help="homodyne angles: mu = cos phi, nu = sin phi")
    _grid_flags(p, "x", -6.0, 6.0, 240)
    p.add_argument("--x-scaled", action="store_true", help="X = |(mu, nu)| x on each line")
    _out_flags(p)

    p = sub.add_parser("wigner", help="closed-form Wigner function on a grid")
    _trap_flags(p)
    _state_flags(p)
    _grid_flags(p, "q")
    _grid_flags(p, "p")
    _out_flags(p)

    for name, helptext in (("reconstruct-dm", "density matrix from a tomogram"),
                           ("reconstruct-wigner", "Wigner function from a tomogram"),
                           ("photon-stats", "photon-number distribution from a tomogram")):
        p = sub.add_parser(name, help=helptext)
        _trap_flags(p)
        _state_flags(p)
        _input_flags(p)
        _quad_flags(p)
        _out_flags(p)
        if name == "reconstruct-dm":
            p.add_argument("--nmax", type=int, default=8)
            p.add_argument("--frame", choices=("static", "invariant"), default="static")
        elif name == "reconstruct-wigner":
            _grid_flags(p, "q")
            _grid_flags(p, "p")
        else:
            p.add_argument("--nmax", type=int, default=10)
            p.add_argument("--scan-re", type=float, default=0.0)
            p.add_argument("--scan-im", type=float, default=0.0)

    p = sub.add_parser("check-evolution", help="convergence table for the tomographic evolution equation")
    _trap_flags(p)
    _state_flags(p)
    p.add_argument("--points", type=int, default=3)
    p.add_argument("--h", type=float, default=4e-3, help="largest step; halved twice")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("check", help="run the acceptance battery")
    p.add_argument("--json", action="store_true")
    return parser


def _merge_config(parser, argv):
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, rest = probe.parse_known_args(argv)
    if not known.config:
        return
    try:
        lines = Path(known.config).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ValueError(f"cannot read config {known.config}: {exc.strerror}") from exc
    values = {}
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{known.config}:{i}: expected key = value")
        k, v = (part.strip() for part in line.split("=", 1))
        values[k.replace("-", "_")] = v
    command = next((a for a in rest if not a.startswith("-")), None)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    target = subparsers.choices.get(command)
    if target is None:
        return
    actions = {a.dest: a for a in target._actions}
    defaults = {}
    for k, v in values.items():
        if k not in actions:
            raise ValueError(f"config key {k!r} is not a flag of {command}")
        act = actions[k]
        if isinstance(act, argparse._StoreTrueAction):
            defaults[k] = v.lower() in ("1", "true", "yes")
        else:
            defaults[k] = act.type(v) if act.type else v
            if act.choices and defaults[k] not in act.choices:
                raise ValueError(f"config {k} = {v!r} not one of {act.choices}")
    target.set_defaults(**defaults)


# ---------------------------------------------------------------- builders


def _trap(args) -> TrapConfig:
    for flag in ("kappa", "omega"):
        val = getattr(args, flag)
        if not np.isfinite(val):
            raise ValueError(f"--{flag} must be finite")
    if args.kappa < 0:
        raise ValueError(f"--kappa must be >= 0, got {args.kappa}")
    if args.omega <= 0:
        raise ValueError(f"--omega must be > 0, got {args.omega}")
    return TrapConfig(args.kappa, args.omega)


def _state(args):
    table = None
    if args.f_table:
        table = tuple(float(v) for v in args.f_table.split(","))
    deformation = DeformationSpec(args.f_variant, args.eta, table)
    return make_state(args.kind, complex(args.amp_re, args.amp_im), args.level, deformation, args.truncation)


def _traj(args, t_needed: float):
    if args.t < 0:
        raise ValueError(f"--t must be >= 0, got {args.t}")
    return solve_epsilon(_trap(args), max(t_needed, 1.0), max(args.steps, 2))


def _quad(args, traj, target):
    base = inversion_quadrature(traj, target)
    (ny, nm, _), (yc, mc, _) = base.n_points, base.domain
    ny = args.y_points or ny
    nm = args.mu_points or nm
    yc = args.y_cut or yc
    mc = args.mu_cut or mc
    return QuadratureSpec("trapezoid", (ny, nm, nm), (yc, mc, mc))


def _tomogram_source(args, target):
    traj = _traj(args, args.t)
    if args.tomogram:
        return read_tomogram_csv(args.tomogram, args.t), traj, None
    st = _state(args)
    return tomogram_function(st, traj, args.t), traj, _quad(args, traj, target)


def _axis_from(args, name):
    n = getattr(args, f"{name}_steps")
    if n < 1:
        raise ValueError(f"--{name}-steps must be >= 1")
    return np.linspace(getattr(args, f"{name}_min"), getattr(args, f"{name}_max"), n + 1)


# ---------------------------------------------------------------- commands


def cmd_epsilon(args):
    if not np.isfinite(args.tmax) or args.tmax <= 0:
        raise ValueError(f"--tmax must be > 0, got {args.tmax}")
    traj = solve_epsilon(_trap(args), args.tmax, args.steps)
    w = wronskian(traj, traj.t_grid)
    rows = np.column_stack([traj.t_grid, traj.eps.real, traj.eps.imag,
                            traj.eps_dot.real, traj.eps_dot.imag, w.imag + 2.0])
    emit((EPSILON_HEADER, rows), "csv", args.out)


def cmd_state(args):
    st = _state(args)
    doc = {
        "kind": st.kind,
        "amplitude": {"re": st.amplitude.real, "im": st.amplitude.imag},
        "truncation": st.truncation,
        "deformation": {"variant": st.deformation.variant, "eta": st.deformation.eta},
        "tail_bound": st.tail_bound,
        "coefficients": [{"n": n, "re": float(c.real), "im": float(c.imag)} for n, c in enumerate(st.coeffs)],
    }
    emit(doc, "json", args.out)


def cmd_tomogram(args):
    traj = _traj(args, args.t)
    st = _state(args)
    if args.phi is not None:
        mu, nu = np.cos(args.phi), np.sin(args.phi)
    else:
        M, V = np.meshgrid(args.mu, args.nu, indexing="ij")
        mu, nu = M.ravel(), V.ravel()
    tomo = state_tomogram(st, traj, args.t, mu, nu, _axis_from(args, "x"), args.x_scaled, args.threads)
    rows = np.column_stack([
        tomo.X.ravel(),
        np.repeat(tomo.mu, tomo.X.shape[1]),
        np.repeat(tomo.nu, tomo.X.shape[1]),
        tomo.values.ravel(),
    ])
    emit((TOMOGRAM_HEADER, rows), "csv", args.out)


def cmd_wigner(args):
    traj = _traj(args, args.t)
    grid = wigner_grid(_state(args), traj, args.t, _axis_from(args, "q"), _axis_from(args, "p"))
    emit((WIGNER_HEADER, grid.rows()), "csv", args.out)


def density_matrix_document(dm) -> dict:
    N = dm.dim
    entries = [
        {"m": m, "n": n, "re": float(dm.entries[m, n].real), "im": float(dm.entries[m, n].imag)}
        for m in range(N) for n in range(N)
    ]
    return {"dim": N, "entries": entries, "report": dm.report()}


def cmd_reconstruct_dm(args):
    src, traj, quad = _tomogram_source(args, "density")
    frame = (traj, args.t) if args.frame == "invariant" else None
    dm = reconstruct_density_matrix(src, args.nmax, quad, frame, workers=args.threads)
    emit(density_matrix_document(dm), "json", args.out)


def cmd_reconstruct_wigner(args):
    src, traj, quad = _tomogram_source(args, "wigner")
    grid = invert_to_wigner(src, _axis_from(args, "q"), _axis_from(args, "p"), quad, workers=args.threads)
    emit((WIGNER_HEADER, grid.rows()), "csv", args.out)


def cmd_photon_stats(args):
    src, _, quad = _tomogram_source(args, "density")
    pd = photon_number_distribution(src, args.nmax, complex(args.scan_re, args.scan_im), quad,
                                    workers=args.threads)
    rows = [(n, p) for n, p in enumerate(pd.probs)]
    emit((PHOTON_HEADER, rows), "csv", args.out)


def cmd_check_evolution(args):
    if args.points < 1 or args.h <= 0:
        raise ValueError("--points must be >= 1 and --h > 0")
    cfg = _trap(args)
    st = _state(args)
    rng = np.random.default_rng(args.seed)
    pts = []
    for _ in range(args.points):
        # keep X within a few widths of the line so w is not vanishingly small
        s, phi = rng.uniform(0.5, 1.5), rng.uniform(0, 2 * np.pi)
        pts.append((s * rng.uniform(-1.5, 1.5), s * np.cos(phi), s * np.sin(phi), rng.uniform(0.5, 4.0)))
    steps = (args.h, args.h / 2, args.h / 4)
    rows = checks.evolution_slopes(st, cfg, pts, steps)
    out = sys.stdout
    out.write("X,mu,nu,t," + ",".join(f"res(h={h:g})" for h in steps) + ",slope\n")
    for pt, res, slope in rows:
        out.write(",".join(_fmt(v) for v in (*pt, *res, slope)) + "\n")


def cmd_check(args):
    results = checks.run_all()
    if args.json:
        emit({"passed": all(r.passed for r in results), "criteria": [r.as_dict() for r in results]}, "json", "-")
    else:
        for r in results:
            print(r.line())
    return 0 if all(r.passed for r in results) else 2


COMMANDS = {
    "epsilon": cmd_epsilon,
    "state": cmd_state,
    "tomogram": cmd_tomogram,
    "wigner": cmd_wigner,
    "reconstruct-dm": cmd_reconstruct_dm,
    "reconstruct-wigner": cmd_reconstruct_wigner,
    "photon-stats": cmd_photon_stats,
    "check-evolution": cmd_check_evolution,
    "check": cmd_check,
}


_AXIS_FLAGS = ("--mu", "--nu", "--phi")


def _attach_axis_values(argv):
    """Glue ``--mu -1:1:5`` into ``--mu=-1:1:5`` so argparse does not see a flag."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _AXIS_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run(argv=None) -> int:
    argv = _attach_axis_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        _merge_config(parser, argv)
        args = parser.parse_args(argv)
        code = COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"iontomo: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"iontomo: numerical failure: {exc}", file=sys.stderr)
        return 2
    return code or 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
