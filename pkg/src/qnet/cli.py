"""Command-line front end: JSON network descriptions in, CSV/JSON out.

Exit codes: 0 success, 2 description/configuration errors, 3 numerical
failures (singular sweeps, non-converged designs).  Output bytes are a
pure function of the input file, the flags, and the seed; floats are
written at full repr precision so external diffs are meaningful.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .design import DesignProblem, tune
from .errors import ParseError, QnetError, ValidationError
from .metrics import (
    Wavepacket,
    click_curve,
    compute_report,
    propagate_wavepacket,
)
from .netcore import (
    HybridSpec,
    NetworkSpec,
    SweepGrid,
    build_parallel,
    build_series,
    hybrid_critical_unbalanced,
    hybrid_homogeneous,
    lower_hybrid,
    validate,
)
from .scatter import smatrix, sweep
from .metrics import group_delay, unwrap_phase

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# input files


def _field(doc: dict, key: str, kind=None):
    if key not in doc:
        raise ParseError(f"missing field {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"field {key!r} has type {type(value).__name__}")
    return value


def parse_network_document(doc: dict):
    """Network (or hybrid) spec from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object")
    version = _field(doc, "schema_version", int)
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version!r}")
    kind = _field(doc, "type", str)
    try:
        if kind == "parallel":
            return build_parallel(
                _field(doc, "omegas", list),
                _field(doc, "gammas", list),
                _field(doc, "Gammas", list),
                side_decays=tuple(doc.get("mus", [])),
            )
        if kind == "series":
            return build_series(
                _field(doc, "omegas", list),
                _field(doc, "gamma", (int, float)),
                _field(doc, "Gamma", (int, float)),
                _field(doc, "g", list),
            )
        if kind == "general":
            spec = NetworkSpec(
                resonances=_field(doc, "omegas", list),
                coupling=_field(doc, "g", list),
                input_decays=_field(doc, "gammas", list),
                output_decays=_field(doc, "Gammas", list),
                side_decays=tuple(doc.get("mus", [])),
            )
            return validate(spec)
        if kind == "hybrid":
            manifolds = _field(doc, "manifolds", list)
            if "manifold_gammas" in doc:
                return hybrid_critical_unbalanced(
                    manifolds,
                    _field(doc, "manifold_gammas", list),
                    _field(doc, "ratios", list),
                )
            return hybrid_homogeneous(
                manifolds,
                _field(doc, "gamma", (int, float)),
                _field(doc, "Gamma", (int, float)),
                _field(doc, "g", list),
            )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed {kind!r} description: {exc}") from None
    raise ParseError(f"unknown network type {kind!r}")


def parse_network_file(path: str):
    """Validated NetworkSpec or HybridSpec from a JSON description file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path!r} line {exc.lineno}: {exc.msg}") from None
    return parse_network_document(doc)


def _load(path: str):
    """(document, flattened NetworkSpec) for a description file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path!r} line {exc.lineno}: {exc.msg}") from None
    spec = parse_network_document(doc)
    net = lower_hybrid(spec) if isinstance(spec, HybridSpec) else spec
    return doc, net


# ---------------------------------------------------------------------------
# run configuration


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation: subcommand, file paths, window, and tolerances."""

    command: str
    input: str
    out: str | None = None
    wmin: float | None = None
    wmax: float | None = None
    points: int | None = None
    ppl: float = 40.0
    tol: float = 1e-6
    seed: int = 0
    tau: float = 10.0

    def __post_init__(self):
        if self.points is not None and self.points < 2:
            raise ValidationError("point count must be at least 2")
        if (self.wmin is None) != (self.wmax is None):
            raise ValidationError("give both --wmin and --wmax or neither")
        if self.wmin is not None:
            if not (np.isfinite(self.wmin) and np.isfinite(self.wmax)):
                raise ValidationError("frequency window must be finite")
            if not self.wmin < self.wmax:
                raise ValidationError("empty frequency window")
        if self.tol <= 0 or self.ppl <= 0 or self.tau <= 0:
            raise ValidationError("tolerances must be positive")


def _grid_for(config: RunConfig, net: NetworkSpec) -> SweepGrid:
    if config.wmin is not None:
        return SweepGrid.linspace(config.wmin, config.wmax, config.points or 2001)
    return SweepGrid.for_network(net, points_per_linewidth=config.ppl)


def _emit(config: RunConfig, text: str):
    if config.out is None:
        sys.stdout.write(text)
    else:
        with open(config.out, "w") as fh:
            fh.write(text)


def _csv(header, columns) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    return x


# ---------------------------------------------------------------------------
# subcommands


def _cmd_validate(config: RunConfig):
    _, net = _load(config.input)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "type": "general",
        "omegas": _jsonable(net.resonances),
        "g": _jsonable(net.coupling),
        "gammas": _jsonable(net.input_decays),
        "Gammas": _jsonable(net.output_decays),
        "mus": [_jsonable(m) for m in net.side_decays],
    }
    _emit(config, json.dumps(doc, indent=2) + "\n")


def _cmd_sweep(config: RunConfig):
    _, net = _load(config.input)
    grid = _grid_for(config, net)
    resp = sweep(net, grid)
    refine = lambda x: smatrix(net, x)[1, 0]
    phase = unwrap_phase(resp, refine=refine)
    tau = group_delay(resp, phase=phase)
    T = resp.transmission()
    R = resp.reflection()
    _emit(
        config,
        _csv(
            ["omega", "ReT", "ImT", "absT2", "ReR", "ImR", "phase_unwrapped", "tau_g"],
            [grid.frequencies, T.real, T.imag, np.abs(T) ** 2, R.real, R.imag, phase, tau],
        ),
    )


def _cmd_metrics(config: RunConfig):
    _, net = _load(config.input)
    resp = None
    if config.wmin is not None:
        resp = sweep(net, _grid_for(config, net))
    report = compute_report(net, resp=resp, tol=config.tol)
    doc = {
        "bandwidth": report.bandwidth,
        "dispersion": report.dispersion,
        "unity_peaks": _jsonable(report.unity_peaks),
        "reflection_zeros": _jsonable(report.reflection_zeros),
        "total_phase_change": report.total_phase_change,
        "frequencies": _jsonable(report.frequencies),
        "phase": _jsonable(report.phase),
        "group_delay": _jsonable(report.group_delay),
    }
    _emit(config, json.dumps(doc, indent=2) + "\n")


def _cmd_design(config: RunConfig):
    doc, net = _load(config.input)
    design = _field(doc, "design", dict)
    free = tuple(tuple(item) for item in _field(design, "free", list))
    bounds = tuple(tuple(b) for b in _field(design, "bounds", list))
    target = tuple(_field(design, "target", list))
    problem = DesignProblem(
        base=net, free=free, bounds=bounds, target=target, seed=config.seed
    )
    result = tune(problem)
    out = {
        "parameters": [[*item, value] for item, value in result.parameters.items()],
        "objective": result.objective,
        "converged": result.converged,
        "achieved_frequencies": _jsonable(result.achieved_frequencies),
        "achieved_values": _jsonable(result.achieved_values),
        "message": result.message,
    }
    _emit(config, json.dumps(out, indent=2) + "\n")
    if not result.converged:
        return 3
    return 0


def _packet_from(doc: dict) -> Wavepacket:
    wp = _field(doc, "wavepacket", dict)
    center = _field(wp, "center", (int, float))
    sigma = _field(wp, "sigma", (int, float))
    if sigma <= 0:
        raise ParseError("wavepacket sigma must be positive")
    packet = Wavepacket.gaussian(
        center, sigma, span=float(wp.get("span", 8.0)), points=int(wp.get("points", 4001))
    )
    t0 = float(wp.get("t0", 0.0))
    if t0:
        amp = packet.amplitudes * np.exp(1j * packet.grid.frequencies * t0)
        packet = Wavepacket(packet.grid, amp)
    return packet


def _cmd_wavepacket(config: RunConfig):
    doc, net = _load(config.input)
    packet = _packet_from(doc)
    resp = sweep(net, packet.grid)
    trace = propagate_wavepacket(resp, packet)
    psi = trace.amplitudes
    _emit(
        config,
        _csv(
            ["t", "Re_psi", "Im_psi", "abs2"],
            [trace.times, psi.real, psi.imag, np.abs(psi) ** 2],
        ),
    )


def _cmd_povm(config: RunConfig):
    doc, net = _load(config.input)
    packet = _packet_from(doc)
    resp = sweep(net, packet.grid)
    taus, probs = click_curve(resp, packet, config.tau)
    out_taus = np.linspace(0.0, config.tau, config.points or 101)
    out_probs = np.interp(out_taus, taus, probs)
    _emit(config, _csv(["tau", "click_probability"], [out_taus, out_probs]))


_COMMANDS = {
    "validate": _cmd_validate,
    "sweep": _cmd_sweep,
    "metrics": _cmd_metrics,
    "design": _cmd_design,
    "wavepacket": _cmd_wavepacket,
    "povm": _cmd_povm,
}


def run(config: RunConfig) -> int:
    """Execute one subcommand; returns the process exit code."""
    try:
        code = _COMMANDS[config.command](config)
        return 0 if code is None else code
    except (ParseError, ValidationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except QnetError as exc:
        sys.stderr.write(f"numerical error: {exc}\n")
        return 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qnet",
        description="Frequency-domain simulator for discrete-state scattering networks",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--input", required=True, help="JSON network description")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--wmin", type=float, default=None)
    parser.add_argument("--wmax", type=float, default=None)
    parser.add_argument("--points", type=int, default=None)
    parser.add_argument("--ppl", type=float, default=40.0, help="points per linewidth")
    parser.add_argument("--tol", type=float, default=1e-6)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tau", type=float, default=10.0, help="POVM window length")
    args = parser.parse_args(argv)
    try:
        config = RunConfig(
            command=args.command,
            input=args.input,
            out=args.out,
            wmin=args.wmin,
            wmax=args.wmax,
            points=args.points,
            ppl=args.ppl,
            tol=args.tol,
            seed=args.seed,
            tau=args.tau,
        )
    except (ValidationError, ParseError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
