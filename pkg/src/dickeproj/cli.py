"""Command-line driver.

Exit codes: 0 success, 2 invalid input, 3 degenerate result (annihilated
projection, empty postselection).
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import sys
from math import pi
from pathlib import Path

import numpy as np

from . import entanglement as ent
from .errors import DegenerateError, DomainError
from .fock import (
    CoincidencePattern,
    LossModel,
    SourceParams,
    apply_loss,
    best_point,
    distribute,
    fidelity_sweep,
    postselect,
    source_state,
)
from .fock.fidelity import TARGETS
from .fock.sources import polarization_vector
from .symstate import ProjectorSpec, PureState, apply_local, delta5, named_state, project_qubit

EXIT_OK, EXIT_INVALID, EXIT_DEGENERATE = 0, 2, 3


_FUNCS = {"sqrt": math.sqrt, "cos": math.cos, "sin": math.sin}
_NAMES = {"pi": math.pi}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def number(text: str) -> float:
    """Parse a real number; accepts arithmetic with ``pi`` and ``sqrt`` (e.g. ``-pi/2``, ``1/sqrt(2)``)."""

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            return -ev(node.operand) if isinstance(node.op, ast.USub) else ev(node.operand)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(text)

    try:
        return float(ev(ast.parse(str(text).strip(), mode="eval").body))
    except (SyntaxError, ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def fmt(x: float) -> str:
    return f"{x:.6g}"


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read {path}: {exc}") from None


def _resolve_state(name: str | None, path: str | None) -> PureState | np.ndarray:
    if (name is None) == (path is None):
        raise DomainError("give exactly one of --state or --state-file")
    if name is not None:
        if name.lower().startswith("delta5:"):
            fields = name.split(":", 1)[1].split(",")
            if len(fields) != 2:
                raise DomainError(f"delta5 needs alpha,eps; got {name!r}")
            try:
                alpha, eps = (number(x) for x in fields)
            except argparse.ArgumentTypeError as exc:
                raise DomainError(str(exc)) from None
            return delta5(alpha, eps)
        return named_state(name)
    data = _load_json(path)
    if "rho" in data:
        rho = np.array([[complex(re, im) for re, im in row] for row in data["rho"]])
        if rho.shape != (1 << data["n"],) * 2 or not np.allclose(rho, rho.conj().T, atol=1e-10):
            raise DomainError("rho must be a Hermitian 2^n x 2^n matrix")
        return rho / np.trace(rho).real
    return PureState.from_dict(data)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def cmd_project(args) -> int:
    state = _resolve_state(args.state, args.state_file)
    if not isinstance(state, PureState):
        raise DomainError("projection needs a pure state")
    proj = ProjectorSpec(args.alpha, args.eps)
    out, prob = project_qubit(state, args.qubit, proj)
    out = out.canonical()
    if args.json:
        text = json.dumps({"state": out.to_dict(), "probability": prob}) + "\n"
    else:
        text = f"state: {out.ket_string()}\nprobability: {fmt(prob)}\n"
    _emit(text, args.output)
    return EXIT_OK


def cmd_tangle_sweep(args) -> int:
    if args.samples < 2:
        raise DomainError("--samples must be at least 2")
    # tangles below 1e-15 are round-off
    rows = [(t, tau if abs(tau) > 1e-15 else 0.0) for t, tau in ent.tangle_curve(args.samples, filtered=args.filtered)]
    _emit(_csv(["theta", "tau3"], rows), args.output)
    return EXIT_OK


def _grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 1 or hi < lo:
        raise DomainError("invalid grid specification")
    return np.linspace(lo, hi, steps) if steps > 1 else np.array([lo])


def cmd_fidelity_sweep(args) -> int:
    if args.target not in TARGETS:
        raise DomainError(f"unknown target {args.target!r}")
    if args.zw_min <= 0:
        raise DomainError("--zw-min must be positive")
    zw = _grid(args.zw_min, args.zw_max, args.zw_steps)
    phi = _grid(args.phi_min, args.phi_max, args.phi_steps)
    loss = None if args.no_loss else LossModel(args.eta_c, args.eta_d)
    SourceParams(args.zdc, float(zw[-1]), 0.0, n_max=args.n_max or 6)
    rows = fidelity_sweep(args.target, zw, phi, z_dc=args.zdc, loss=loss,
                          include_six_photons=not args.five_only, n_max=args.n_max,
                          phase_average=args.phase_average)
    _emit(_csv(["z_w", "phi_w", "fidelity", "probability"], rows), args.output)
    best = best_point(rows)
    print(f"max fidelity {fmt(best.fidelity)} at z_w={fmt(best.z_w)} phi_w={fmt(best.phi_w)}", file=sys.stderr)
    return EXIT_OK


def _witness_state(args, target: PureState):
    if args.fidelity is not None:
        f = args.fidelity
        if not (0 <= f <= 1):
            raise DomainError("--fidelity must lie in [0, 1]")
        d = target.amp.size
        proj = np.outer(target.amp, target.amp.conj())
        return f * proj + (1 - f) * (np.eye(d) - proj) / (d - 1)
    state = _resolve_state(args.state, args.state_file)
    if args.filter:
        if not isinstance(state, PureState):
            raise DomainError("filters apply to pure states only")
        state = apply_local(state, [ent.slocc_filter(args.filter)] * state.n)[0]
    return state


def cmd_witness(args) -> int:
    target = named_state(args.target)
    w = ent.WitnessSpec(target, args.offset)
    state = _witness_state(args, target)
    report = ent.witness_report(w, state, args.target)
    _emit(json.dumps(report) + "\n", args.output)
    return EXIT_OK


def _projector(data) -> ProjectorSpec:
    if isinstance(data, dict):
        return ProjectorSpec(float(data["alpha"]), float(data.get("eps", 0.0)))
    return ProjectorSpec(float(data[0]), float(data[1]) if len(data) > 1 else 0.0)


def scenario_from_config(cfg: dict) -> dict:
    """Validate a source-sim scenario and fill defaults."""
    try:
        src = cfg.get("source", {})
        pol = src.get("wcb_polarization", {"alpha": 1.0, "eps": 0.0})
        if isinstance(pol, dict):
            pol = polarization_vector(float(pol["alpha"]), float(pol.get("eps", 0.0)))
        else:
            pol = [complex(*p) if isinstance(p, (list, tuple)) else complex(p) for p in pol]
        params = SourceParams(float(src.get("z_dc", 0.17)), float(src.get("z_w", 0.0)),
                              float(src.get("phi_w", 0.0)), tuple(pol), int(cfg.get("n_max", 6)))
        net = cfg.get("network", {})
        outputs = list(net.get("outputs", ["a", "b", "c", "d", "e"]))
        weights = net.get("weights")
        if weights is not None and (len(weights) != len(outputs)
                                    or abs(sum(abs(w) ** 2 for w in weights) - 1) > 1e-12):
            raise DomainError("weights must match outputs and satisfy sum |w|^2 = 1")
        loss_cfg = cfg.get("loss")
        loss = None if loss_cfg is None else LossModel(float(loss_cfg.get("eta_c", 1.0)),
                                                       float(loss_cfg.get("eta_d", 1.0)))
        pat = cfg.get("pattern", {"kept": outputs[:4], "conditioned": {}})
        conditioned = {k: _projector(v) for k, v in pat.get("conditioned", {}).items()}
        pattern = CoincidencePattern.build(pat.get("kept", []), conditioned)
        if set(pattern.spatial) - set(outputs):
            raise DomainError("pattern refers to modes that are not network outputs")
        analysis = {k: _projector(v) for k, v in cfg.get("analysis", {}).items()}
        target = cfg.get("target")
        target_state = named_state(target) if target else None
        if target_state is not None and target_state.n != len(pattern.kept):
            raise DomainError("target qubit number differs from kept modes")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"invalid scenario: {exc}") from None
    return dict(params=params, outputs=outputs, weights=weights, loss=loss, pattern=pattern,
                analysis=analysis, target=target, target_state=target_state)


def run_scenario(sc: dict) -> dict:
    state = distribute(source_state(sc["params"]), sc["outputs"], sc["weights"])
    if sc["loss"] is not None:
        state = apply_loss(state, sc["loss"])
    rho, prob = postselect(state, sc["pattern"], sc["analysis"])
    out = {
        "probability": prob,
        "kept": list(sc["pattern"].kept),
        "rho": [[[float(x.real), float(x.imag)] for x in row] for row in rho],
    }
    if sc["target_state"] is not None:
        out["target"] = sc["target"]
        out["fidelity"] = ent.fidelity(sc["target_state"], rho)
    return out


def cmd_source_sim(args) -> int:
    cfg = dict(args.scenario or {})
    for key in ("z_dc", "z_w", "phi_w"):
        value = getattr(args, key)
        if value is not None:
            cfg.setdefault("source", {})[key] = value
    if args.n_max is not None:
        cfg["n_max"] = args.n_max
    if args.target is not None:
        cfg["target"] = args.target
    sc = scenario_from_config(cfg)
    _emit(json.dumps(run_scenario(sc)) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dickeproj", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with option values (keys = option names)")
        p.add_argument("--output", "-o", help="write result here instead of stdout")
        return p

    p = common(sub.add_parser("project", help="project one qubit of a state"))
    p.add_argument("--state", help="named state, e.g. D4_2, GHZ3, HHV, delta5:0.7071,1.5708")
    p.add_argument("--state-file", help="PureState JSON file")
    p.add_argument("--qubit", type=int, required=False)
    p.add_argument("--alpha", type=number, required=False)
    p.add_argument("--eps", type=number, default=0.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_project, required=("qubit", "alpha"), subparser=p)

    p = common(sub.add_parser("tangle-sweep", help="three-tangle along the projection angle"))
    p.add_argument("--samples", type=int, default=91)
    p.add_argument("--filtered", action="store_true", help="apply T+ to every qubit first")
    p.set_defaults(func=cmd_tangle_sweep, required=(), subparser=p)

    p = common(sub.add_parser("fidelity-sweep", help="W4 / GHZ4+ fidelity over the coherent-beam grid"))
    p.add_argument("--target", default="W4", help="W4 or GHZ4+")
    p.add_argument("--zdc", type=number, default=0.17)
    p.add_argument("--zw-min", type=number, default=0.05)
    p.add_argument("--zw-max", type=number, default=1.0)
    p.add_argument("--zw-steps", type=int, default=96)
    p.add_argument("--phi-min", type=number, default=0.0)
    p.add_argument("--phi-max", type=number, default=pi)
    p.add_argument("--phi-steps", type=int, default=13)
    p.add_argument("--eta-c", type=number, default=1 / 3)
    p.add_argument("--eta-d", type=number, default=1 / 3)
    p.add_argument("--no-loss", action="store_true")
    p.add_argument("--five-only", action="store_true", help="only five-photon source terms")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--phase-average", action="store_true")
    p.set_defaults(func=cmd_fidelity_sweep, required=(), subparser=p)

    p = common(sub.add_parser("witness", help="evaluate a fidelity witness"))
    p.add_argument("--target", required=False)
    p.add_argument("--offset", type=number, required=False)
    p.add_argument("--state")
    p.add_argument("--state-file")
    p.add_argument("--fidelity", type=number, help="use the isotropic mixture with this fidelity")
    p.add_argument("--filter", choices=["T+", "T-"], help="apply this filter to every qubit first")
    p.set_defaults(func=cmd_witness, required=("target", "offset"), subparser=p)

    p = common(sub.add_parser("source-sim", help="run one source/network/loss/postselection scenario"))
    p.add_argument("--z-dc", dest="z_dc", type=number)
    p.add_argument("--z-w", dest="z_w", type=number)
    p.add_argument("--phi-w", dest="phi_w", type=number)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--target", help="named target for a fidelity readout")
    p.set_defaults(func=cmd_source_sim, required=(), subparser=p)
    return parser


def _apply_config(args, parser) -> None:
    if not args.config:
        args.scenario = None
        return
    cfg = _load_json(args.config)
    if args.command == "source-sim":
        args.scenario = cfg
        return
    args.scenario = None
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise DomainError(f"unknown config key {key!r}")
        default = parser.get_default(dest)
        if getattr(args, dest) in (None, default, False):
            setattr(args, dest, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, args.subparser)
        missing = [r for r in args.required if getattr(args, r) is None]
        if missing:
            raise DomainError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DegenerateError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
