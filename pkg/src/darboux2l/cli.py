"""Command-line frontend: tables of potentials, seeds, transforms and chains, plus
the verification suite.

    darboux2l potential --family case1 --R0 1 --c0 0 --t -3:3:601
    darboux2l seed --family tanh --r0 1 --r1 0 --T 1 --R 2
    darboux2l transform --family case1 --R0 1 --c0 0.3 --epsilon 0.5,1,2
    darboux2l chain --family constant --c0 0.3 --R 1,2 --epsilon 1
    darboux2l verify --preset case2 --R0 1 --R1 2 --c0 0.3

Exit status: 0 when every check passes, 1 when a check fails or the
computation hits a singularity, 2 on a bad command line or config file.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import darboux as dx
from . import seeds
from . import system as sy
from . import verify as vf
from .errors import DarbouxError, UsageError
from .numerics import DEFAULT_ATOL, DEFAULT_RTOL, TimeGrid, Trajectory

TOL_ENV = "DARBOUX2L_TOL"
DEFAULT_TOL = 1e-7

COMMANDS = ("potential", "seed", "transform", "chain", "verify")
POTENTIAL_FAMILIES = ("constant", "sech", "tanh", "case1", "case2", "case3")
FAMILY_PARAMS = {
    "constant": ("c0",),
    "sech": ("r0", "T"),
    "tanh": ("r0", "r1", "T"),
    "case1": ("R0", "c0", "gamma0"),
    "case2": ("R0", "R1", "c0", "gamma0", "gamma1"),
    "case3": ("r0", "r1", "T", "R", "p"),
}
PARAM_DEFAULTS = {"gamma0": 0.0, "gamma1": 0.0, "p": 1.0, "r1": 0.0}


# parsing ------------------------------------------------------------------

def parse_grid(text: str) -> TimeGrid:
    """``start:end:count`` -> uniform TimeGrid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} is not start:end:count")
    try:
        start, end, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid {text!r} is not start:end:count") from None
    if not (math.isfinite(start) and math.isfinite(end)) or not start < end:
        raise UsageError(f"grid {text!r} needs finite start < end")
    if count < 2:
        raise UsageError(f"grid {text!r} needs at least 2 points")
    return TimeGrid.uniform(start, end, count)


def parse_complex(text) -> complex:
    """``re+imi`` literals such as ``0-2i``, ``1.5``, ``-2i``."""
    if isinstance(text, (int, float, complex)) and not isinstance(text, bool):
        return complex(text)
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return complex(float(text[0]), float(text[1]))
    s = str(text).strip().replace(" ", "")
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise UsageError(f"bad complex literal {text!r}") from None


def parse_complex_list(text) -> list:
    """Comma-separated literals, or a JSON list of numbers, literals or [re, im] pairs."""
    if isinstance(text, (list, tuple)):
        return [parse_complex(x) for x in text]
    return [parse_complex(x) for x in str(text).split(",") if x.strip()]


def parse_real_list(text) -> list:
    if isinstance(text, (list, tuple)):
        items = text
    else:
        items = [x for x in str(text).split(",") if x.strip()]
    try:
        return [float(x) for x in items]
    except (TypeError, ValueError):
        raise UsageError(f"bad number list {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="darboux2l", description="Darboux transforms of two-level systems")
    parser.add_argument("--config", help="JSON file whose keys mirror the long flags")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, grid_default):
        p.add_argument("--t", dest="t", default=grid_default, help="grid start:end:count")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", help="file to write (default stdout)")
        p.add_argument("--tol", type=float, help=f"residual threshold (env {TOL_ENV}, default {DEFAULT_TOL})")
        p.add_argument("--rtol", type=float, default=DEFAULT_RTOL)
        p.add_argument("--atol", type=float, default=DEFAULT_ATOL)
        p.add_argument("--config", help=argparse.SUPPRESS)
        for name in ("c0", "r0", "r1", "T", "R0", "R1", "gamma0", "gamma1", "p"):
            p.add_argument(f"--{name}", type=float)

    p = sub.add_parser("potential", help="tabulate f(t)")
    common(p, "-5:5:1001")
    p.add_argument("--family", choices=POTENTIAL_FAMILIES)
    p.add_argument("--R", type=float)

    p = sub.add_parser("seed", help="tabulate an exact seed solution")
    common(p, "-5:5:1001")
    p.add_argument("--family", choices=("constant", "tanh"))
    p.add_argument("--R", type=float, help="real-structured seed at eps = -iR (tanh: -iR/T)")
    p.add_argument("--epsilon", help="spectral value, e.g. 0-2i")
    p.add_argument("--p0", default="1")
    p.add_argument("--q0", default="0.5")
    p.add_argument("--c1", default="1")
    p.add_argument("--c2", default="0.5")
    p.add_argument("--negative-control", action="store_true", help="corrupt psi1 by 1e-3 before checking")

    p = sub.add_parser("transform", help="one closed-form step and its transformed solutions")
    common(p, "-5:5:8001")
    p.add_argument("--family", choices=("case1", "case2", "case3"))
    p.add_argument("--R", type=float)
    p.add_argument("--epsilon", default="0.5,1,2", help="comma-separated spectral values")
    p.add_argument("--p0", default="1")
    p.add_argument("--q0", default="0.5")
    p.add_argument("--c1", default="1")
    p.add_argument("--c2", default="0.5")
    p.add_argument("--negative-control", action="store_true", help="shift the new potential by 1e-3")

    p = sub.add_parser("chain", help="iterate transforms numerically from a seed")
    common(p, "-5:5:8001")
    p.add_argument("--family", choices=("constant", "tanh"))
    p.add_argument("--R", help="comma-separated radii; step k uses eps = -iR_k")
    p.add_argument("--gamma", help="comma-separated phases of the constant seed per step")
    p.add_argument("--epsilon", default="1", help="comma-separated spectral values")
    p.add_argument("--p0", default="1")
    p.add_argument("--q0", default="0.5")
    p.add_argument("--c1", default="1")
    p.add_argument("--c2", default="0.5")
    p.add_argument("--negative-control", action="store_true", help="shift the last potential by 1e-3")

    p = sub.add_parser("verify", help="run the full check set for one family")
    common(p, "-5:5:8001")
    p.add_argument("--preset", choices=("case1", "case2", "case3"))
    p.add_argument("--R", type=float)
    p.add_argument("--epsilon", default="0.5,1,2", help="comma-separated spectral values")
    p.add_argument("--negative-control", action="store_true", help="corrupt the pair and new potential by 1e-3")
    return parser


def _subparser(parser, command):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise AssertionError("no subcommands")


def _value_flags(parser) -> set:
    out = set()
    stack = [parser]
    while stack:
        p = stack.pop()
        for action in p._actions:
            if isinstance(action, argparse._SubParsersAction):
                stack.extend(action.choices.values())
            elif action.nargs is None and action.option_strings and not isinstance(
                action, (argparse._StoreTrueAction, argparse._HelpAction)
            ):
                out.update(action.option_strings)
    return out


def _join_dash_values(argv, flags):
    """``--t -3:3:601`` -> ``--t=-3:3:601`` so argparse keeps the value."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in flags and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1] not in flags:
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path!r} is not valid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path!r} must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


@dataclass(frozen=True)
class RunConfig:
    command: str
    grid: TimeGrid
    family: str | None = None
    params: dict = field(default_factory=dict)
    epsilons: tuple = ()
    radii: tuple = ()
    gammas: tuple = ()
    R: float | None = None
    p0: complex = 1.0
    q0: complex = 0.5
    c1: complex = 1.0
    c2: complex = 0.5
    tol: float = DEFAULT_TOL
    rel_tol: float = DEFAULT_RTOL
    abs_tol: float = DEFAULT_ATOL
    output: str | None = None
    format: str = "csv"
    negative_control: bool = False


def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw == "":
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError(f"{TOL_ENV} must be positive")
    return tol


def parse_config(argv) -> RunConfig:
    """Command line (plus optional ``--config`` JSON) -> validated RunConfig.

    Config keys are the long flag names; explicit flags win over the file.
    """
    argv = list(argv)
    if not argv:
        raise UsageError("no command given; expected one of " + ", ".join(COMMANDS))
    parser = _build_parser()
    argv = _join_dash_values(argv, _value_flags(parser))

    # the config file may name the command, so find it before the real parse
    config = {}
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            config = _load_config(argv[i + 1])
        elif tok.startswith("--config="):
            config = _load_config(tok.split("=", 1)[1])
    if not any(tok in COMMANDS for tok in argv):
        if "command" not in config:
            raise UsageError("no command given; expected one of " + ", ".join(COMMANDS))
        argv = argv + [str(config["command"])]
    command = next(tok for tok in argv if tok in COMMANDS)
    if "command" in config and config["command"] != command:
        raise UsageError(f"config names command {config['command']!r} but {command!r} was given")
    config.pop("command", None)

    sub = _subparser(parser, command)
    known = {a.dest for a in sub._actions if a.dest != "help"}
    unknown = sorted(set(config) - known)
    if unknown:
        raise UsageError(f"unknown config key {unknown[0]!r} for {command}")
    sub.set_defaults(**config)
    ns = parser.parse_args(argv)
    return _validate(command, ns)


def _require(ns, names, family):
    params = {}
    for name in names:
        value = getattr(ns, name, None)
        if value is None:
            value = PARAM_DEFAULTS.get(name)
        if value is None:
            raise UsageError(f"--{name} is required for family {family}")
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise UsageError(f"--{name} must be a number, got {value!r}") from None
        if not math.isfinite(value):
            raise UsageError(f"--{name} must be finite")
        params[name] = value
    return params


def _validate(command, ns) -> RunConfig:
    grid = parse_grid(str(ns.t))
    if command != "potential" and len(grid) < 9:
        raise UsageError(f"{command} needs at least 9 grid points for differencing")
    tol = _default_tol() if ns.tol is None else float(ns.tol)
    for name, value in (("tol", tol), ("rtol", ns.rtol), ("atol", ns.atol)):
        if not float(value) > 0:
            raise UsageError(f"--{name} must be positive")
    if ns.format not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {ns.format!r}")
    kw = dict(
        command=command, grid=grid, tol=tol, rel_tol=float(ns.rtol), abs_tol=float(ns.atol),
        output=ns.output, format=ns.format, negative_control=bool(getattr(ns, "negative_control", False)),
    )
    family = getattr(ns, "preset", None) if command == "verify" else ns.family
    if family is None:
        raise UsageError("--preset is required" if command == "verify" else "--family is required")
    kw["family"] = family
    R = getattr(ns, "R", None)

    if command in ("potential", "transform", "verify"):
        names = FAMILY_PARAMS[family]
        kw["params"] = _require(ns, names, family)
    elif command == "seed":
        names = ("c0",) if family == "constant" else ("r0", "r1", "T")
        kw["params"] = _require(ns, names, family)
        if family == "tanh" and R is not None:
            kw["R"] = float(R)
            kw["params"]["p"] = _require(ns, ("p",), family)["p"]
        elif ns.epsilon is not None:
            kw["epsilons"] = (parse_complex(ns.epsilon),)
        elif family == "constant" and R is not None:
            kw["R"] = float(R)
            kw["params"]["gamma0"] = _require(ns, ("gamma0",), family)["gamma0"]
        else:
            raise UsageError("seed needs --epsilon or --R")
    elif command == "chain":
        if R is None:
            raise UsageError("chain needs --R")
        kw["radii"] = tuple(parse_real_list(R))
        names = ("c0",) if family == "constant" else ("r0", "r1", "T")
        kw["params"] = _require(ns, names, family)
        if family == "tanh":
            kw["params"]["p"] = _require(ns, ("p",), family)["p"]
        if ns.gamma is not None:
            kw["gammas"] = tuple(parse_real_list(ns.gamma))
            if len(kw["gammas"]) != len(kw["radii"]):
                raise UsageError("--gamma needs one phase per radius")
    if command in ("transform", "chain", "verify"):
        kw["epsilons"] = tuple(parse_complex_list(ns.epsilon))
        if not kw["epsilons"]:
            raise UsageError("--epsilon is empty")
    for name in ("p0", "q0", "c1", "c2"):
        if hasattr(ns, name):
            kw[name] = parse_complex(getattr(ns, name))
    return RunConfig(**kw)


# computation --------------------------------------------------------------

@dataclass
class Output:
    columns: list
    rows: np.ndarray
    checks: list = field(default_factory=list)
    discrepancies: list = field(default_factory=list)


def _potential_spec(family, params) -> sy.PotentialSpec:
    P = params
    if family == "constant":
        return sy.Constant(P["c0"])
    if family == "sech":
        return sy.Sech(P["r0"], P["T"])
    if family == "tanh":
        return sy.TanhStep(P["r0"], P["r1"], P["T"])
    if family == "case1":
        return sy.Case1(P["R0"], P["c0"], P["gamma0"])
    if family == "case2":
        return sy.Case2(P["R0"], P["R1"], P["c0"], P["gamma0"], P["gamma1"])
    return sy.Case3(P["r0"], P["r1"], P["T"], P["R"], P["p"])


def _spinor_columns(label):
    return [f"re_psi1{label}", f"im_psi1{label}", f"re_psi2{label}", f"im_psi2{label}"]


def _spinor_values(psi):
    return [psi[:, 0].real, psi[:, 0].imag, psi[:, 1].real, psi[:, 1].imag]


def _eps_label(eps):
    return f"[eps={vf._fmt(eps)}]"


def _residual_report(name, grid, psi, potential, eps, tol):
    t_in, r = sy.residual_profile(Trajectory(grid, psi), sy.TwoLevelSystem(eps, potential))
    return vf._report(name, grid, t_in, r, tol)


def _run_potential(cfg: RunConfig) -> Output:
    t = cfg.grid.samples
    f = sy.potential_eval(_potential_spec(cfg.family, cfg.params), t)
    return Output(["t", "f"], np.column_stack([t, f]))


def _run_seed(cfg: RunConfig) -> Output:
    t = cfg.grid.samples
    P = cfg.params
    if cfg.family == "constant":
        potential = sy.Constant(P["c0"])
        if cfg.R is not None:
            eps = -1j * cfg.R
            psi = seeds.constant_seed_real(P["c0"], cfg.R, P["gamma0"], t)
        else:
            eps = cfg.epsilons[0]
            psi = seeds.constant_seed(seeds.ConstantSeedParams(P["c0"], eps, cfg.p0, cfg.q0), t)
    else:
        potential = sy.TanhStep(P["r0"], P["r1"], P["T"])
        if cfg.R is not None:
            sp = seeds.TanhSeedParams(P["r0"], P["r1"], P["T"], cfg.R, P["p"])
            eps = sp.epsilon
            psi = seeds.tanh_seed_real(sp, t)
        else:
            eps = cfg.epsilons[0]
            psi = seeds.tanh_seed_general(P["r0"], P["r1"], P["T"], eps, cfg.c1, cfg.c2, t)
    if cfg.negative_control:
        psi = psi.copy()
        psi[:, 0] *= 1 + 1e-3
    rep = _residual_report(f"seed_residual{_eps_label(eps)}", cfg.grid, psi, potential, eps, cfg.tol)
    return Output(["t"] + _spinor_columns(""), np.column_stack([t] + _spinor_values(psi)), [rep])


def _run_transform(cfg: RunConfig) -> Output:
    t = cfg.grid.samples
    pre = vf.build_preset(cfg.family, p0=cfg.p0, q0=cfg.q0, c1=cfg.c1, c2=cfg.c2, **cfg.params)
    f = sy.potential_eval(pre.seed_potential, t)
    f1 = sy.potential_eval(pre.new_potential, t)
    target = pre.new_potential
    if cfg.negative_control:
        target = sy.Custom(lambda tt: sy.potential_eval(pre.new_potential, tt) + 1e-3)
    columns, values, checks = ["t", "f", "f1"], [t, f, f1], []
    for eps in cfg.epsilons:
        psi = pre.transformed(eps, t)
        label = _eps_label(eps)
        columns += _spinor_columns(label)
        values += _spinor_values(psi)
        checks.append(_residual_report(f"form_invariance{label}", cfg.grid, psi, target, eps, cfg.tol))
    return Output(columns, np.column_stack(values), checks)


def _run_chain(cfg: RunConfig) -> Output:
    t = cfg.grid.samples
    P = cfg.params
    if cfg.family == "constant":
        gammas = dict(zip(cfg.radii, cfg.gammas)) if cfg.gammas else {}
        solver = seeds.constant_seed_solver(P["c0"], gammas, cfg.p0, cfg.q0)
        f = sy.Constant(P["c0"])
    else:
        solver = seeds.tanh_seed_solver(P["r0"], P["r1"], P["T"], P["p"], cfg.c1, cfg.c2)
        f = sy.TanhStep(P["r0"], P["r1"], P["T"])
    n = len(cfg.radii)
    columns = ["t"] + [f"f{k}" for k in range(n + 1)]
    values, checks = [t], []
    potentials = None
    for eps in cfg.epsilons:
        res = dx.darboux_chain(solver, f, list(cfg.radii), t, eps)
        if potentials is None:
            potentials = res.potentials
            values += list(potentials)
        last = potentials[-1] + (1e-3 if cfg.negative_control else 0.0)
        target = sy.Tabulated(cfg.grid, last)
        label = _eps_label(eps)
        columns += _spinor_columns(label)
        values += _spinor_values(res.spinor)
        checks.append(_residual_report(f"chain_residual{label}", cfg.grid, res.spinor, target, eps, cfg.tol))
    return Output(columns, np.column_stack(values), checks)


def _run_verify(cfg: RunConfig) -> Output:
    reports, discrepancies = vf.run_preset(
        cfg.family, cfg.grid, cfg.epsilons, cfg.rel_tol, cfg.abs_tol,
        negative_control=cfg.negative_control, **cfg.params,
    )
    return Output([], np.empty((0, 0)), reports, discrepancies)


RUNNERS = {
    "potential": _run_potential,
    "seed": _run_seed,
    "transform": _run_transform,
    "chain": _run_chain,
    "verify": _run_verify,
}


# output -------------------------------------------------------------------

def fmt_number(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (int, float, np.floating, np.integer)):
        x = float(v)
        return fmt_number(x) if math.isfinite(x) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def render_json(cfg: RunConfig, out: Output) -> str:
    doc = {
        "command": cfg.command,
        "family": cfg.family,
        "columns": out.columns,
        "rows": [list(r) for r in out.rows],
        "checks": [r.to_dict() for r in out.checks],
        "discrepancies": [d.to_dict() for d in out.discrepancies],
        "passed": all(r.passed for r in out.checks),
    }
    return _json_value(doc) + "\n"


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float, np.floating)):
        return fmt_number(v)
    s = str(v)
    if any(c in s for c in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def render_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    lines += [",".join(_csv_cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def render_checks_csv(checks) -> str:
    columns = ["check_name", "max_residual", "threshold", "passed", "worst_t", "notes"]
    rows = [
        [r.check_name, r.max_residual, r.threshold, r.passed, r.worst_t, "; ".join(r.notes)] for r in checks
    ]
    return render_csv(columns, rows)


def render_discrepancies_csv(discrepancies) -> str:
    rows = [[d.formula, d.term, d.max_abs, d.worst_t] for d in discrepancies]
    return render_csv(["formula", "term", "max_abs", "worst_t"], rows)


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run(cfg: RunConfig) -> int:
    """Execute a validated config; returns the exit status."""
    out = RUNNERS[cfg.command](cfg)
    if cfg.format == "json":
        _write(cfg.output, render_json(cfg, out))
    elif cfg.command == "verify":
        _write(cfg.output, render_checks_csv(out.checks))
    else:
        _write(cfg.output, render_csv(out.columns, out.rows))
        if out.checks:
            summary = render_checks_csv(out.checks)
            if cfg.output is None:
                sys.stderr.write(summary)
            else:
                _write(cfg.output + ".checks.csv", summary)
    if out.discrepancies and cfg.format == "csv":
        sys.stderr.write("documented discrepancies\n" + render_discrepancies_csv(out.discrepancies))
    return 0 if all(r.passed for r in out.checks) else 1


def _error(exc) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        sys.stderr.write(_error(exc))
        return 2
    try:
        return run(cfg)
    except (DarbouxError, ValueError) as exc:
        sys.stderr.write(_error(exc))
        return 1


def main_exit() -> None:
    try:
        code = main()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main_exit()
