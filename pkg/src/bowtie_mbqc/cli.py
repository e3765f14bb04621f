"""``bowtie-mbqc`` command line.

Exit codes: 0 success, 1 a numerical check failed, 2 bad configuration.
Output goes to ``--out`` (written atomically) or stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from bowtie_mbqc import acceptance, heff, lattice, protocols
from bowtie_mbqc.errors import BranchImpossibleError, ConfigurationError, PreconditionError
from bowtie_mbqc.qcore import (
    H,
    SINGLE_STATES,
    StateVector,
    apply_ccz,
    fidelity,
    kron_states,
    prepare_product,
)

OK, FAILED, BAD_CONFIG = 0, 1, 2
PASS_FIDELITY = 1 - 1e-9
BUILTIN_GRAPHS = {
    "toffoli": lattice.toffoli_graph,
    "enlargement": lattice.enlargement_graph,
}


@dataclass
class RunConfig:
    subcommand: str
    seed: int = 0
    out: Path | None = None
    format: str = "json"
    outcomes: list[int] | None = None
    sample: bool = False
    exhaustive: bool = False
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        if not 0 <= args.seed < 2**64:
            raise ConfigurationError("--seed must be an unsigned 64-bit integer")
        common = {"subcommand", "seed", "out", "format", "outcomes", "sample", "exhaustive", "func"}
        return cls(
            subcommand=args.subcommand,
            seed=args.seed,
            out=args.out,
            format=args.format,
            outcomes=parse_bits(args.outcomes) if args.outcomes is not None else None,
            sample=args.sample,
            exhaustive=args.exhaustive,
            extra={k: v for k, v in vars(args).items() if k not in common},
        )

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def forced(self, n_sites: int) -> list[int] | None:
        if self.outcomes is None or self.sample:
            return None
        if len(self.outcomes) != n_sites:
            raise ConfigurationError(f"--outcomes needs {n_sites} bits, got {len(self.outcomes)}")
        return self.outcomes


# ---------------------------------------------------------------- parsing


def parse_bits(text: str) -> list[int]:
    text = text.replace(",", "").strip()
    if not text or set(text) - {"0", "1"}:
        raise ConfigurationError(f"outcomes must be a string of 0/1, got {text!r}")
    return [int(c) for c in text]


def parse_state(token: str) -> StateVector:
    """A named single-qubit state or an ``a0,a1`` complex pair (normalized)."""
    token = token.strip()
    if token in SINGLE_STATES:
        return prepare_product({1: token})
    parts = token.split(",")
    if len(parts) != 2:
        raise ConfigurationError(f"cannot parse single-qubit state {token!r}")
    try:
        amps = np.array([complex(p.strip().replace(" ", "")) for p in parts])
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse amplitudes {token!r}") from exc
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ConfigurationError("zero vector is not a state")
    return StateVector(1, amps / norm)


def parse_inputs(text: str, count: int) -> list[StateVector]:
    """``count`` states; tokens are ``;``-separated, or ``,``-separated if all are names."""
    tokens = text.split(";") if ";" in text else text.split(",")
    if ";" not in text and count == 1 and len(tokens) == 2:
        tokens = [text]
    if len(tokens) != count:
        raise ConfigurationError(f"expected {count} input state(s), got {len(tokens)} in {text!r}")
    return [parse_state(t) for t in tokens]


def parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"range must be 'lo,hi', got {text!r}") from exc
    return lo, hi


def amps_json(state: StateVector) -> list[list[float]]:
    return [[float(a.real), float(a.imag)] for a in state.amps]


# ---------------------------------------------------------------- output


def emit(cfg: RunConfig, text: str) -> None:
    """Write ``text`` to ``cfg.out`` via temp file + rename, or to stdout."""
    if cfg.out is None:
        sys.stdout.write(text)
        return
    target = Path(cfg.out)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_json(cfg: RunConfig, data: dict) -> None:
    if cfg.format != "json":
        raise ConfigurationError(f"{cfg.subcommand} only writes json")
    emit(cfg, json.dumps(data, indent=2) + "\n")


# ---------------------------------------------------------------- commands


def cmd_toffoli(cfg: RunConfig) -> int:
    logical = parse_inputs(cfg.extra["inputs"], 3)
    psi = kron_states(*logical)
    network_in = psi if cfg.extra["keep_dressing"] else protocols.undress_input(psi)
    run = protocols.toffoli_pattern(network_in, cfg.forced(10), cfg.rng())
    if cfg.extra["keep_dressing"]:
        out = run.output_state
        oracle = StateVector(3, protocols.dressed_toffoli() @ psi.amps)
    else:
        out = protocols.undress_output(run.output_state)
        oracle = StateVector(3, protocols.toffoli_matrix() @ psi.amps)
    f = fidelity(out, oracle)
    data = run.to_json()
    data.update(
        inputs=[amps_json(s) for s in logical],
        dressing="kept" if cfg.extra["keep_dressing"] else "removed",
        output=amps_json(out),
        oracle=amps_json(oracle),
        fidelity_vs_oracle=f,
    )
    emit_json(cfg, data)
    return OK if f >= PASS_FIDELITY else FAILED


def cmd_enlarge(cfg: RunConfig) -> int:
    psi = kron_states(*parse_inputs(cfg.extra["inputs"], 3))
    run = protocols.triangle_enlargement(psi, cfg.forced(4), cfg.rng())
    f = fidelity(run.output_state, apply_ccz(psi, 1, 2, 3))
    data = run.to_json()
    data.update(output=amps_json(run.output_state), fidelity_vs_oracle=f)
    emit_json(cfg, data)
    return OK if f >= PASS_FIDELITY else FAILED


def cmd_wire(cfg: RunConfig) -> int:
    (psi,) = parse_inputs(cfg.extra["inputs"], 1)
    length = cfg.extra["length"]
    if length < 1:
        raise ConfigurationError("--length must be >= 1")
    run = protocols.run_wire(psi, length, cfg.forced(length), cfg.rng())
    oracle = StateVector(1, np.linalg.matrix_power(H, length) @ psi.amps)
    f = fidelity(run.output_state, oracle)
    data = run.to_json()
    data.update(output=amps_json(run.output_state), fidelity_vs_oracle=f)
    emit_json(cfg, data)
    return OK if f >= PASS_FIDELITY else FAILED


def cmd_bridge(cfg: RunConfig) -> int:
    psi = kron_states(*parse_inputs(cfg.extra["inputs"], 2))
    forced = cfg.forced(1)
    outcome = forced[0] if forced else None
    topology = cfg.extra["topology"]
    if cfg.extra["basis"] == "Z":
        if topology != "triangle":
            raise ConfigurationError("Z-basis link breaking is defined for the triangle gadget")
        out, s = protocols.break_link(psi, outcome, cfg.rng())
        emit_json(cfg, {"topology": topology, "basis": "Z", "s": s, "output": amps_json(out)})
        return OK
    gadget = protocols.bridging_gate if topology == "triangle" else protocols.bowtie_bridge
    res = gadget(psi, outcome, cfg.rng())
    cls = protocols.classify_bridge(topology)
    emit_json(
        cfg,
        {
            "topology": topology,
            "basis": "Y",
            "s": res.s,
            "probability": res.probability,
            "output": amps_json(res.output),
            "classification": _jsonable(cls),
        },
    )
    return OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def _grid(lo: float, hi: float, step: float, name: str) -> np.ndarray:
    if step <= 0 or hi < lo:
        raise ConfigurationError(f"bad {name} grid: need step > 0 and max >= min")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def cmd_sweep(cfg: RunConfig) -> int:
    e = cfg.extra
    if e["eps_index"] not in range(5):
        raise ConfigurationError(f"--eps-index must be 0..4, got {e['eps_index']}")
    if cfg.format != "csv":
        raise ConfigurationError("sweep only writes csv")
    taus = heff.DEFAULT_TAU_GRID if e["tau"] is None else _grid(*e["tau"], "tau")
    eps = heff.DEFAULT_EPS_GRID if e["eps"] is None else _grid(*e["eps"], "epsilon")
    surf = heff.fidelity_surface(taus, eps, which_eps=e["eps_index"])
    emit(cfg, surf.to_csv())
    return OK


def cmd_lattice_map(cfg: RunConfig) -> int:
    e = cfg.extra
    if cfg.format == "json":
        emit(cfg, json.dumps(_load_graph(e["graph"], e["rows"], e["cols"]).to_json(), indent=2) + "\n")
        return OK
    field_ = lattice.potential_map(
        V1=e["v1"],
        V2=e["v2"],
        wavelength=e["wavelength"],
        x_range=parse_range(e["x_range"]),
        y_range=parse_range(e["y_range"]),
        resolution=e["resolution"],
    )
    emit(cfg, field_.to_pgm() if cfg.format == "pgm" else field_.to_csv())
    return OK


def _load_graph(source: str, rows: int, cols: int) -> lattice.LatticeGraph:
    if source == "bowtie":
        return lattice.build_bowtie(rows, cols)
    if source in BUILTIN_GRAPHS:
        return BUILTIN_GRAPHS[source]()
    path = Path(source)
    if not path.is_file():
        raise ConfigurationError(f"graph {source!r} is neither a builtin ({', '.join(['bowtie', *BUILTIN_GRAPHS])}) nor a file")
    try:
        return lattice.LatticeGraph.from_json(path.read_text())
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigurationError(f"cannot read graph {source}: {exc}") from exc


def cmd_verify(cfg: RunConfig) -> int:
    try:
        results = acceptance.run_checks(cfg.extra["only"], exhaustive=cfg.exhaustive)
    except KeyError as exc:
        raise ConfigurationError(str(exc.args[0])) from exc
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    emit(cfg, "\n".join(lines) + "\n")
    return OK if passed == len(results) else FAILED


def cmd_estimate(cfg: RunConfig) -> int:
    emit_json(cfg, protocols.resource_estimates(cfg.extra["n"]).to_json())
    return OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=["json", "csv", "pgm"], default=None)
    common.add_argument("--seed", type=int, default=0, help="RNG seed for sampled outcomes (default 0)")
    common.add_argument("--outcomes", default=None, help="forced outcome bits, first bit = first measured site label")
    common.add_argument("--sample", action="store_true", help="sample outcomes from --seed (overrides --outcomes)")
    common.add_argument("--exhaustive", action="store_true")

    p = argparse.ArgumentParser(prog="bowtie-mbqc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)

    def add(name, func, default_format, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func, default_format=default_format)
        return sp

    sp = add("toffoli", cmd_toffoli, "json", "run the 13-qubit Toffoli network")
    sp.add_argument("--in", dest="inputs", required=True, help="three states, e.g. one,one,zero or '1,0;0.6,0.8j;plus'")
    sp.add_argument("--keep-dressing", action="store_true", help="feed inputs straight in and compare with the dressed gate")

    sp = add("enlarge", cmd_enlarge, "json", "triangle enlargement through four ancillas")
    sp.add_argument("--in", dest="inputs", default="plus,plus,plus")

    sp = add("wire", cmd_wire, "json", "teleport one qubit along a chain")
    sp.add_argument("--in", dest="inputs", default="plus")
    sp.add_argument("--length", type=int, default=1)

    sp = add("bridge", cmd_bridge, "json", "bridge or break a link through a shared triangle vertex")
    sp.add_argument("--in", dest="inputs", default="plus,plus")
    sp.add_argument("--topology", choices=["triangle", "bowtie"], default="triangle")
    sp.add_argument("--basis", choices=["Y", "Z"], default="Y")

    sp = add("sweep", cmd_sweep, "csv", "fidelity surface F(tau, eps)")
    sp.add_argument("--eps-index", type=int, default=2)
    sp.add_argument("--tau", type=float, nargs=3, metavar=("MIN", "MAX", "STEP"), default=None)
    sp.add_argument("--eps", type=float, nargs=3, metavar=("MIN", "MAX", "STEP"), default=None)

    sp = add("lattice-map", cmd_lattice_map, "csv", "offset potential map (csv/pgm) or graph export (json)")
    sp.add_argument("--v1", type=float, default=1.0)
    sp.add_argument("--v2", type=float, default=1.0)
    sp.add_argument("--wavelength", type=float, default=2.0)
    sp.add_argument("--x-range", default="0,4")
    sp.add_argument("--y-range", default="0,4")
    sp.add_argument("--resolution", type=int, default=128)
    sp.add_argument("--graph", default="bowtie", help="bowtie | toffoli | enlargement | path to graph JSON")
    sp.add_argument("--rows", type=int, default=2)
    sp.add_argument("--cols", type=int, default=2)

    sp = add("verify", cmd_verify, "csv", "run the acceptance checks")
    sp.add_argument("--only", action="append", default=None, choices=sorted(acceptance.CHECKS))

    sp = add("estimate", cmd_estimate, "json", "resource counts for an n-qubit search")
    sp.add_argument("--n", type=int, required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    func = args.func
    del args.default_format
    try:
        return func(RunConfig.from_args(args))
    except (ConfigurationError, PreconditionError, BranchImpossibleError) as exc:
        print(f"bowtie-mbqc: error: {exc}", file=sys.stderr)
        return BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
