"""Command line front end: scenario parsing, execution, and stable emission.

Text-first outputs only. CSV files start with '#' comment lines echoing the
resolved configuration and the library version; JSON outputs embed the same
echo as a "config" member (JSON has no comment syntax). Floating point
numbers are printed with 17 significant digits in CSV and with shortest
round-trip repr in JSON, so repeated runs of the same configuration produce
byte-identical files.

Exit codes: 0 success, 1 usage or validation, 2 grid resolution, 3 domain or
contract violation, 4 I/O. TOA_THREADS caps internal parallelism; unset or 0
is the serial reproducibility default.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dispersion import (
    BranchConfig,
    Dispersion,
    EnergySign,
    MomentumHalfLine,
    Regime,
)
from .errors import ContractViolationError, DomainError, ResolutionError
from .orthogonality import (
    SmearingTest,
    check_even_kernel_orthogonality,
    check_position_orthogonality,
    check_time_orthogonality,
    unrestricted_energy_control,
    unrestricted_momentum_control,
)
from .pep import (
    MomentumGrid,
    MomentumWavefunction,
    arrival_amplitude,
    even_kernel_arrival_routes,
    eigenstate_momentum_state,
    gaussian_momentum_state,
)
from .tep import crosscheck_arrival_vs_current, evolve_tep, gaussian_position_state
from .tunneling import (
    ParabolicBarrier,
    RectangularBarrier,
    TabulatedPotential,
    exact_rectangular_transmission,
    tunneling_probability,
)

COMMANDS = ("toa", "toa-nonrel", "ortho", "appendix-demo", "tep-evolve",
            "crosscheck", "tunnel")


class UsageError(Exception):
    """Bad flags or an inconsistent configuration; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class ScenarioConfig:
    """Resolved scenario: one command plus every option it consumes."""

    command: str
    options: dict = field(default_factory=dict)

    def echo(self) -> dict:
        out = {"command": self.command}
        for key in sorted(self.options):
            val = self.options[key]
            if val is not None:
                out[key] = val
        return out

    def echo_line(self) -> str:
        parts = [f"command={self.command}"]
        for key in sorted(self.options):
            val = self.options[key]
            if val is not None:
                parts.append(f"{key}={val}")
        return " ".join(parts)


@dataclass
class RunRecord:
    config: dict
    version: str
    wall_time_s: float
    payload: dict


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _add_common(p: _Parser) -> None:
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--output", help="output file path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_physics(p: _Parser, regime_choice: bool = True) -> None:
    p.add_argument("--mass", type=float, default=1.0)
    if regime_choice:
        p.add_argument("--regime", choices=("rel", "nonrel"), default="rel")
    p.add_argument("--energy-sign", choices=("pos", "neg"), default="pos")
    p.add_argument("--branch", choices=("pos", "neg"), default="pos",
                   help="momentum half-line")


def _add_pgrid(p: _Parser) -> None:
    p.add_argument("--p-min", type=float, default=1e-3)
    p.add_argument("--p-max", type=float, default=12.0)
    p.add_argument("--np", type=int, default=4096, dest="np_")
    p.add_argument("--state", choices=("gaussian", "eigenstate", "file"),
                   default="gaussian")
    p.add_argument("--p0", type=float, default=5.0)
    p.add_argument("--sigma-p", type=float, default=0.25)
    p.add_argument("--state-path", help="CSV with columns p,re,im for --state file")


def _add_tgrid(p: _Parser) -> None:
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--nt", type=int, default=2000)


def _add_positions(p: _Parser) -> None:
    p.add_argument("--x1", type=float, default=0.0)
    p.add_argument("--x2", type=float, default=20.0)


def build_parser() -> _Parser:
    top = _Parser(prog="pepqm", description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=f"pepqm {__version__}")
    sub = top.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    for name, hint in (("toa", "arrival-time distribution"),
                       ("toa-nonrel", "arrival-time distribution, quadratic limit")):
        p = sub.add_parser(name, help=hint)
        _add_common(p)
        _add_physics(p, regime_choice=False)
        _add_pgrid(p)
        _add_tgrid(p)
        _add_positions(p)

    p = sub.add_parser("ortho", help="delta-orthogonality convergence report")
    _add_common(p)
    _add_physics(p)
    p.add_argument("--check", choices=("time", "position", "even", "all"),
                   default="all")
    p.add_argument("--center", type=float, default=0.0)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--cutoffs", default="5,10,20,40",
                   help="comma-separated ascending cutoffs")
    p.add_argument("--resolution", type=int, default=4096)

    p = sub.add_parser("appendix-demo",
                       help="even-kernel two-route discrepancy demonstration")
    _add_common(p)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--energy-sign", choices=("pos", "neg"), default="pos")
    p.add_argument("--p-max", type=float, default=12.0)
    p.add_argument("--np", type=int, default=4097, dest="np_")
    p.add_argument("--p0", type=float, default=5.0)
    p.add_argument("--sigma-p", type=float, default=0.25)
    p.add_argument("--packet", choices=("mixed", "positive"), default="mixed")
    _add_tgrid(p)
    _add_positions(p)

    p = sub.add_parser("tep-evolve", help="free evolution of a position packet")
    _add_common(p)
    _add_physics(p)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--sigma-x", type=float, default=2.0)
    p.add_argument("--p0", type=float, default=5.0)
    p.add_argument("--x-min", type=float, default=-40.0)
    p.add_argument("--x-max", type=float, default=60.0)
    p.add_argument("--nx", type=int, default=8192)
    p.add_argument("--t2", type=float, default=2.0)

    p = sub.add_parser("crosscheck",
                       help="arrival density vs detector current, L1 distance")
    _add_common(p)
    _add_physics(p)
    _add_pgrid(p)
    _add_tgrid(p)
    _add_positions(p)

    p = sub.add_parser("tunnel", help="WKB tunneling probability sweep")
    _add_common(p)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--potential", default="rect:V0=2,left=0,width=1",
                   help="rect:V0=..,left=..,width=.. | parab:V0=..,k=..,center=.. "
                        "| file:PATH")
    p.add_argument("--energy", type=float, help="single energy (overrides sweep)")
    p.add_argument("--e-min", type=float, default=0.2)
    p.add_argument("--e-max", type=float, default=1.8)
    p.add_argument("--ne", type=int, default=9)
    p.add_argument("--bracket", help="a,b bracketing the barrier (default: derived)")

    return top


def _config_file_tokens(text: str) -> list[str]:
    tokens: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line is not key=value: {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        tokens.extend([f"--{key}", val])
    return tokens


def parse_config(argv, config_text: str | None = None) -> ScenarioConfig:
    """Resolve argv (plus an optional key=value config file) into a validated
    ScenarioConfig. Flags override file values."""
    argv = list(argv)
    if not argv:
        raise UsageError("a command is required: " + ", ".join(COMMANDS))

    if config_text is None and "--config" in argv:
        idx = argv.index("--config")
        if idx + 1 >= len(argv):
            raise UsageError("--config needs a path")
        try:
            with open(argv[idx + 1], "r", encoding="utf-8") as fh:
                config_text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
    if config_text is not None:
        file_tokens = _config_file_tokens(config_text)
        rest = []
        skip = False
        for tok in argv[1:]:
            if skip:
                skip = False
                continue
            if tok == "--config":
                skip = True
                continue
            rest.append(tok)
        argv = [argv[0]] + file_tokens + rest

    ns = build_parser().parse_args(argv)
    options = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    if "np_" in options:
        options["np"] = options.pop("np_")
    cfg = ScenarioConfig(command=ns.command, options=options)
    _validate(cfg)
    return cfg


def _validate(cfg: ScenarioConfig) -> None:
    o = cfg.options
    if "np" in o and o["np"] < 2 and o.get("state", "gaussian") != "eigenstate":
        raise UsageError("--np must be at least 2")
    if "nt" in o and o["nt"] < 2:
        raise UsageError("--nt must be at least 2")
    if "p_min" in o and "p_max" in o and not o["p_min"] < o["p_max"]:
        raise UsageError("--p-max must exceed --p-min")
    if "t_min" in o and "t_max" in o and not o["t_min"] < o["t_max"]:
        raise UsageError("--t-max must exceed --t-min")
    if o.get("state") == "gaussian" and o.get("sigma_p", 1.0) <= 0.0:
        raise UsageError("--sigma-p must be positive")
    if o.get("state") == "file" and not o.get("state_path"):
        raise UsageError("--state file needs --state-path")
    if "mass" in o and o["mass"] < 0.0:
        raise UsageError("--mass must be nonnegative")
    if "ne" in o and o["ne"] < 1:
        raise UsageError("--ne must be at least 1")
    if "branch" in o and "p_min" in o and "p_max" in o and cfg.command != "appendix-demo":
        if o.get("state") == "eigenstate":
            if o["branch"] == "pos" and o["p0"] < 0.0:
                raise UsageError("positive momentum branch conflicts with p0 < 0")
            if o["branch"] == "neg" and o["p0"] > 0.0:
                raise UsageError("negative momentum branch conflicts with p0 > 0")
        else:
            if o["branch"] == "pos" and o["p_min"] < -1e-15:
                raise UsageError("positive momentum branch conflicts with p_min < 0")
            if o["branch"] == "neg" and o["p_max"] > 1e-15:
                raise UsageError("negative momentum branch conflicts with p_max > 0")
    if "cutoffs" in o:
        try:
            cuts = tuple(float(s) for s in str(o["cutoffs"]).split(","))
        except ValueError as exc:
            raise UsageError(f"bad --cutoffs: {o['cutoffs']!r}") from exc
        if not cuts or any(c <= 0 for c in cuts) or list(cuts) != sorted(cuts):
            raise UsageError("--cutoffs must be ascending positive numbers")
    if "resolution" in o and o["resolution"] < 16:
        raise UsageError("--resolution must be at least 16")


def _branch_from(o: dict) -> BranchConfig:
    es = EnergySign.POSITIVE if o.get("energy_sign", "pos") == "pos" else EnergySign.NEGATIVE
    hl = (MomentumHalfLine.NONNEGATIVE if o.get("branch", "pos") == "pos"
          else MomentumHalfLine.NONPOSITIVE)
    return BranchConfig(es, hl)


def _dispersion_from(o: dict, force_nonrel: bool = False) -> Dispersion:
    regime = Regime.NONRELATIVISTIC if (force_nonrel or o.get("regime") == "nonrel") \
        else Regime.RELATIVISTIC
    return Dispersion(o["mass"], regime)


def _load_state_file(path: str, half_line: MomentumHalfLine) -> MomentumWavefunction:
    rows = np.loadtxt(path, delimiter=",", comments="#")
    if rows.ndim != 2 or rows.shape[1] < 3:
        raise UsageError("state file needs columns p,re,im")
    grid = MomentumGrid(rows[:, 0], half_line)
    return MomentumWavefunction(grid, rows[:, 1] + 1j * rows[:, 2])


def _build_state(o: dict) -> MomentumWavefunction:
    half = (MomentumHalfLine.NONNEGATIVE if o.get("branch", "pos") == "pos"
            else MomentumHalfLine.NONPOSITIVE)
    kind = o.get("state", "gaussian")
    if kind == "eigenstate":
        return eigenstate_momentum_state(o["p0"], 1.0, half)
    if kind == "file":
        return _load_state_file(o["state_path"], half)
    grid = MomentumGrid(np.linspace(o["p_min"], o["p_max"], o["np"]), half)
    return gaussian_momentum_state(grid, o["p0"], o["sigma_p"])


def _times(o: dict) -> np.ndarray:
    return np.linspace(o["t_min"], o["t_max"], o["nt"])


# ---------------------------------------------------------------------------
# command handlers: each returns (payload, columns, rows) where columns/rows
# describe the CSV body (None when the command is JSON-only)

def _run_toa(cfg: ScenarioConfig, nonrel: bool):
    o = cfg.options
    disp = _dispersion_from(o, force_nonrel=nonrel)
    branch = _branch_from(o)
    state = _build_state(o)
    amp = arrival_amplitude(state, o["x1"], o["x2"], _times(o), disp, branch)
    dens = amp.density()
    payload = {
        "peak_t": float(amp.times[int(np.argmax(dens))]),
        "total_mass": amp.total_mass(),
        "state_norm": state.norm_sq(),
    }
    rows = np.column_stack([amp.times, amp.amplitudes.real, amp.amplitudes.imag, dens])
    return payload, ("t", "re", "im", "prob"), rows


def _run_ortho(cfg: ScenarioConfig):
    o = cfg.options
    disp = _dispersion_from(o)
    branch = _branch_from(o)
    cuts = tuple(float(s) for s in str(o["cutoffs"]).split(","))
    smear = SmearingTest(o["center"], o["width"], cuts, o["resolution"])
    which = o.get("check", "all")
    reports = []
    if which in ("time", "all"):
        reports.append(check_time_orthogonality(disp, branch, smear))
        reports.append(unrestricted_momentum_control(disp, smear))
    if which in ("position", "all"):
        reports.append(check_position_orthogonality(disp, branch, smear))
        reports.append(unrestricted_energy_control(disp, smear))
    if which in ("even", "all"):
        reports.append(check_even_kernel_orthogonality(disp, smear))
    payload = {"reports": [r.to_record() for r in reports]}
    return payload, None, None


def _run_appendix_demo(cfg: ScenarioConfig):
    o = cfg.options
    disp = Dispersion(o["mass"], Regime.RELATIVISTIC)
    sign = EnergySign.POSITIVE if o["energy_sign"] == "pos" else EnergySign.NEGATIVE
    nodes = np.linspace(-o["p_max"], o["p_max"], o["np"])
    s = o["sigma_p"]
    amp = np.exp(-((nodes - o["p0"]) ** 2) / (4.0 * s * s)).astype(complex)
    if o["packet"] == "mixed":
        amp = amp + np.exp(-((nodes + o["p0"]) ** 2) / (4.0 * s * s))
    amp /= np.sqrt(np.trapezoid(np.abs(amp) ** 2, nodes))
    route_a, route_b, disc = even_kernel_arrival_routes(
        nodes, amp, o["x1"], o["x2"], _times(o), disp, sign
    )
    payload = {
        "l2_discrepancy": disc,
        "packet": o["packet"],
        "separation": o["x2"] - o["x1"],
    }
    rows = np.column_stack([
        route_a.times,
        route_a.amplitudes.real, route_a.amplitudes.imag,
        route_b.amplitudes.real, route_b.amplitudes.imag,
    ])
    return payload, ("t", "re_direct", "im_direct", "re_collapsed", "im_collapsed"), rows


def _run_tep_evolve(cfg: ScenarioConfig):
    o = cfg.options
    disp = _dispersion_from(o)
    branch = _branch_from(o)
    xs = np.linspace(o["x_min"], o["x_max"], o["nx"])
    psi0 = gaussian_position_state(xs, o["x0"], o["sigma_x"], o["p0"])
    psi = evolve_tep(psi0, o["t2"], disp, branch)
    payload = {
        "t2": o["t2"],
        "norm": psi.norm_sq(),
        "centroid": float(
            np.trapezoid(xs * np.abs(psi.amplitudes) ** 2, xs) / psi.norm_sq()
        ),
    }
    rows = np.column_stack([
        xs, psi.amplitudes.real, psi.amplitudes.imag, np.abs(psi.amplitudes) ** 2
    ])
    return payload, ("x", "re", "im", "prob"), rows


def _run_crosscheck(cfg: ScenarioConfig):
    o = cfg.options
    disp = _dispersion_from(o)
    state = _build_state(o)
    window = _times(o)
    l1, report = crosscheck_arrival_vs_current(state, o["x1"], o["x2"], window, disp)
    payload = dict(report)
    times = payload.pop("times")
    current = payload.pop("current")
    payload.pop("arrival_density")
    rows = np.column_stack([times, current])
    return payload, ("t", "J"), rows


def parse_potential(spec: str):
    kind, _, body = spec.partition(":")
    if kind == "file":
        if not body:
            raise UsageError("file: potential needs a path")
        try:
            try:
                rows = np.loadtxt(body, comments="#")
            except ValueError:
                rows = np.loadtxt(body, delimiter=",", comments="#")
        except OSError as exc:
            raise UsageError(f"cannot read potential file: {exc}") from exc
        if rows.ndim != 2 or rows.shape[1] < 2:
            raise UsageError("potential file needs two columns: x V")
        return TabulatedPotential(rows[:, 0], rows[:, 1])
    try:
        params = {}
        for item in body.split(","):
            key, val = item.split("=", 1)
            params[key.strip().lower()] = float(val)
    except ValueError as exc:
        raise UsageError(f"bad potential spec: {spec!r}") from exc
    if kind == "rect":
        return RectangularBarrier(params["v0"], params.get("left", 0.0),
                                  params["width"])
    if kind == "parab":
        return ParabolicBarrier(params["v0"], params["k"], params.get("center", 0.0))
    raise UsageError(f"unknown potential kind: {kind!r}")


def _default_bracket(potential):
    if isinstance(potential, RectangularBarrier):
        return (potential.left - 0.5 * potential.width,
                potential.left + 1.5 * potential.width)
    if isinstance(potential, ParabolicBarrier):
        reach = np.sqrt(2.0 * max(potential.v0, 1e-12) / potential.curvature)
        return (potential.center - 1.5 * reach, potential.center + 1.5 * reach)
    return (float(potential.x[0]), float(potential.x[-1]))


def _run_tunnel(cfg: ScenarioConfig):
    o = cfg.options
    potential = parse_potential(o["potential"])
    if o.get("bracket"):
        a, b = (float(s) for s in str(o["bracket"]).split(","))
        bracket = (a, b)
    else:
        bracket = _default_bracket(potential)
    if o.get("energy") is not None:
        energies = [o["energy"]]
    else:
        energies = list(np.linspace(o["e_min"], o["e_max"], o["ne"]))
    is_rect = isinstance(potential, RectangularBarrier)
    rows = []
    for e in energies:
        res = tunneling_probability(potential, float(e), o["mass"], bracket)
        row = [res.energy, res.turning_points[0], res.turning_points[1],
               res.im_w, res.probability]
        if is_rect:
            row.append(exact_rectangular_transmission(
                potential.v0, potential.width, float(e), o["mass"]))
        rows.append(row)
    cols = ("E", "a", "b", "imW", "P_wkb") + (("T_exact",) if is_rect else ())
    payload = {
        "energies": [float(e) for e in energies],
        "probabilities": [float(r[4]) for r in rows],
        "bracket": list(bracket),
    }
    return payload, cols, np.asarray(rows)


_HANDLERS = {
    "toa": lambda cfg: _run_toa(cfg, nonrel=False),
    "toa-nonrel": lambda cfg: _run_toa(cfg, nonrel=True),
    "ortho": _run_ortho,
    "appendix-demo": _run_appendix_demo,
    "tep-evolve": _run_tep_evolve,
    "crosscheck": _run_crosscheck,
    "tunnel": _run_tunnel,
}


def _csv_text(cfg: ScenarioConfig, columns, rows) -> str:
    lines = [f"# pepqm {__version__}", f"# config: {cfg.echo_line()}"]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_text(cfg: ScenarioConfig, payload: dict) -> str:
    doc = {"config": cfg.echo(), "version": __version__, "result": payload}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def run(cfg: ScenarioConfig) -> RunRecord:
    """Execute a scenario, write its outputs, and return the run record.

    The wall time lives only in the returned record, never in emitted files,
    so identical configurations produce byte-identical outputs.
    """
    started = time.perf_counter()
    payload, columns, rows = _HANDLERS[cfg.command](cfg)
    out_path = cfg.options.get("output")
    fmt = cfg.options.get("format", "csv")

    if columns is not None and fmt == "csv":
        text = _csv_text(cfg, columns, rows)
        summary = _json_text(cfg, payload)
        if out_path:
            with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            sys.stdout.write(summary)
        else:
            sys.stdout.write(text)
    else:
        if columns is not None and fmt == "json":
            payload = dict(payload)
            payload["columns"] = list(columns)
            payload["rows"] = [[float(v) for v in row] for row in rows]
        text = _json_text(cfg, payload)
        if out_path:
            with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return RunRecord(config=cfg.echo(), version=__version__,
                     wall_time_s=time.perf_counter() - started, payload=payload)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
        run(cfg)
        return 0
    except UsageError as exc:
        print(f"pepqm: usage error: {exc}", file=sys.stderr)
        return 1
    except ResolutionError as exc:
        print(f"pepqm: resolution error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ContractViolationError) as exc:
        print(f"pepqm: domain error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"pepqm: i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
