"""Command-line front end.

Every subcommand reads one JSON config (``--config``), validates it in full
before computing anything, and writes flat files. Exit codes: 0 success,
2 config or validation error, 3 construction budget exceeded, 4 internal
invariant violation. Timestamps go only to a ``<out>.log`` sidecar so the
payload files are byte-identical across reruns.
"""
import argparse
import sys
import warnings
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import serialize, svg
from .bands import band_edges, search_interval
from .construct import ConstructionConfig, PhiFunction, build_sequence, verify_records
from .exceptions import (
    ConstructionBudgetExceeded,
    InvalidInput,
    InvariantViolation,
    ThinBandWarning,
)
from .ids import ids_finite_count, ids_periodic_exact
from .modulus import modulus_report
from .thouless import thouless_lyapunov
from .transfer import PeriodicPotential, discriminant, lyapunov_periodic

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_INVARIANT = 0, 2, 3, 4


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PotentialSpec(_Model):
    values: Optional[list[float]] = None
    file: Optional[str] = None
    stage: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.values is None) == (self.file is None):
            raise ValueError("give exactly one of 'values' or 'file'")
        if self.values is not None and not self.values:
            raise ValueError("'values' must not be empty")
        return self


class GridSpec(_Model):
    points: int = Field(default=1001, ge=2)
    min: Optional[float] = None
    max: Optional[float] = None
    values: Optional[list[float]] = None


class ConstructionSpec(_Model):
    C0: float = Field(default=3.0, gt=0)
    eps: float = Field(default=0.5, gt=0)
    stages: int = Field(default=2, ge=0)
    period_cap: int = Field(default=1024, ge=1)
    seed: int = 1
    candidate_attempts: int = Field(default=4, ge=1)
    N_validate: int = Field(default=20000, ge=1)
    grid_points: int = Field(default=201, ge=2)


class PhiSpec(_Model):
    kind: Literal["power", "loglog"] = "power"
    param: float = Field(default=0.25, gt=0)
    scale: float = Field(default=1.0, gt=0)


class ModulusSpec(_Model):
    probes: int = Field(default=10, ge=1)
    seed: int = 0
    grid_points: int = Field(default=1001, ge=2)
    levels: int = Field(default=15, ge=2)


class RunConfig(_Model):
    potential: Optional[PotentialSpec] = None
    V0: PotentialSpec = PotentialSpec(values=[0.0])
    grid: GridSpec = GridSpec()
    finite_N: Optional[int] = Field(default=None, ge=1)
    thouless_tol: float = Field(default=1e-4, gt=0)
    construction: ConstructionSpec = ConstructionSpec()
    phi: PhiSpec = PhiSpec()
    modulus: ModulusSpec = ModulusSpec()
    stages_file: Optional[str] = None
    potentials_file: Optional[str] = None
    potentials_out: Optional[str] = None
    witness_out: Optional[str] = None


class ConfigError(Exception):
    """A config field is missing or inconsistent; ``path`` names the field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")


def _resolve(base, name):
    p = Path(name)
    return p if p.is_absolute() else Path(base) / p


def load_potential(spec, base, path="potential"):
    if spec is None:
        raise ConfigError(path, "required for this command")
    if spec.values is not None:
        return PeriodicPotential(spec.values)
    f = _resolve(base, spec.file)
    if not f.exists():
        raise ConfigError(f"{path}.file", f"no such file {str(f)!r}")
    if spec.stage is None:
        return serialize.read_values_file(f)
    data = serialize.read_json(f)
    if "potentials_file" in data:
        # a construction report; the values live in its potentials file
        data = serialize.read_json(f.parent / data["potentials_file"])
    if spec.stage == 0:
        return PeriodicPotential(data["V0"])
    for s in data.get("stages", []):
        if s["j"] == spec.stage:
            return PeriodicPotential(s["values"])
    raise ConfigError(f"{path}.stage", f"stage {spec.stage} not in {str(f)!r}")


def make_grid(spec, pot):
    if spec.values is not None:
        if not spec.values:
            raise ConfigError("grid.values", "must not be empty")
        return np.array(spec.values, dtype=float)
    lo, hi = search_interval(pot)
    lo = spec.min if spec.min is not None else lo
    hi = spec.max if spec.max is not None else hi
    if not hi > lo:
        raise ConfigError("grid", "max must exceed min")
    return np.linspace(lo, hi, spec.points)


def _quiet_bands(pot):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ThinBandWarning)
        bs = band_edges(pot)
    return bs, [str(w.message) for w in caught]


def cmd_bands(cfg, args, base):
    pot = load_potential(cfg.potential, base)
    bs, _ = _quiet_bands(pot)
    rows = [(i + 1, lo, hi, hi - lo, bool(t)) for i, ((lo, hi), t) in enumerate(zip(bs.bands, bs.thin))]
    rows.append(("total", bs.bands[0, 0], bs.bands[-1, 1], bs.measure, bs.any_thin))
    serialize.write_csv(args.out, ["band_index", "E_minus", "E_plus", "width", "thin_flag"], rows)
    print(f"measure={serialize.fmt(bs.measure)}")
    return {"measure": bs.measure}


def cmd_ids(cfg, args, base):
    pot = load_potential(cfg.potential, base)
    grid = make_grid(cfg.grid, pot)
    bs, _ = _quiet_bands(pot)
    k = ids_periodic_exact(pot, bs, grid)
    header, cols = ["E", "k"], [grid, k]
    if cfg.finite_N is not None:
        header.append("k_N")
        cols.append(ids_finite_count(pot.window(cfg.finite_N), grid))
    serialize.write_csv(args.out, header, zip(*cols))
    if args.svg:
        svg.line_plot(grid, k, args.svg, "integrated density of states", "E", "k(E)")
    return {}


def cmd_lyapunov(cfg, args, base):
    pot = load_potential(cfg.potential, base)
    grid = make_grid(cfg.grid, pot)
    L = lyapunov_periodic(pot, grid)
    D, _ = discriminant(pot, grid)
    serialize.write_csv(args.out, ["E", "L", "D"], zip(grid, L, D))
    if args.svg:
        svg.line_plot(grid, L, args.svg, "Lyapunov exponent", "E", "L(E)")
    return {}


def cmd_thouless(cfg, args, base):
    pot = load_potential(cfg.potential, base)
    grid = make_grid(cfg.grid, pot)
    bs, _ = _quiet_bands(pot)
    L = lyapunov_periodic(pot, grid)
    T = np.array([thouless_lyapunov(pot, bs, e) for e in grid])
    diff = np.abs(T - L)
    serialize.write_csv(args.out, ["E", "L_transfer", "L_thouless", "abs_diff"], zip(grid, L, T, diff))
    worst = float(diff.max())
    print(f"max_abs_diff={serialize.fmt(worst)}")
    if worst > cfg.thouless_tol:
        raise InvariantViolation(f"Thouless and transfer-matrix exponents differ by {worst:.3g}")
    return {"max_abs_diff": worst}


def _potentials_out(cfg, args, base):
    if cfg.potentials_out:
        return _resolve(base, cfg.potentials_out)
    out = Path(args.out)
    return out.with_name(out.stem + ".potentials.json")


def cmd_construct(cfg, args, base):
    V0 = load_potential(cfg.V0, base, "V0")
    c = cfg.construction
    if args.seed is not None:
        c = c.model_copy(update={"seed": args.seed})
    try:
        ccfg = ConstructionConfig(**c.model_dump())
        phi = PhiFunction(**cfg.phi.model_dump())
        phi.validate()
    except InvalidInput as exc:
        raise ConfigError("construction", str(exc)) from exc
    pots_path = _potentials_out(cfg, args, base)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThinBandWarning)
        try:
            records = build_sequence(V0, phi, ccfg)
        except ConstructionBudgetExceeded as exc:
            best, cert = exc.best
            failure = {
                "stage": exc.stage, "message": str(exc), "gap": exc.gap,
                "best_period": cert.period, "best_measure": cert.measure,
                "best_lhs": cert.lhs, "best_rhs": cert.rhs, "best_values": best.values,
            }
            serialize.write_construction(args.out, pots_path, V0, phi, ccfg, exc.records, failure)
            raise
    verify_records(records, V0, phi, ccfg)
    serialize.write_construction(args.out, pots_path, V0, phi, ccfg, records)
    for r in records:
        print(f"stage {r.j}: p={r.p} eps={serialize.fmt(r.eps_j)} lhs={serialize.fmt(r.lhs)} rhs={serialize.fmt(r.rhs)}")
    return {"stages": len(records)}


def _witness_out(cfg, args, base):
    if cfg.witness_out:
        return _resolve(base, cfg.witness_out)
    out = Path(args.out)
    return out.with_name(out.stem + ".witnesses.csv")


def cmd_modulus(cfg, args, base):
    if cfg.stages_file is None:
        raise ConfigError("stages_file", "required for this command")
    report_path = _resolve(base, cfg.stages_file)
    if not report_path.exists():
        raise ConfigError("stages_file", f"no such file {str(report_path)!r}")
    pots = _resolve(base, cfg.potentials_file) if cfg.potentials_file else None
    if pots is not None and not pots.exists():
        raise ConfigError("potentials_file", f"no such file {str(pots)!r}")
    V0, phi, ccfg, records, raw = serialize.read_construction(report_path, pots)
    if raw.get("status") != "ok" or not records:
        raise ConfigError("stages_file", "construction report has no certified stages")
    m = cfg.modulus
    seed = args.seed if args.seed is not None else m.seed
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThinBandWarning)
        verify_records(records, V0, phi, ccfg)
        rep = modulus_report(records, phi, probes=m.probes, seed=seed,
                             grid_points=m.grid_points, levels=m.levels)
    serialize.write_json(args.out, rep.to_dict())
    rows = [(w.j, w.p, w.eps_j, w.E0, w.E1, w.band[0], w.band[1], w.Ej, w.deltaK, w.increment)
            for w in rep.witnesses]
    serialize.write_csv(_witness_out(cfg, args, base),
                        ["j", "p_j", "eps_j", "E0", "E1", "E_minus", "E_plus", "Ej", "deltaK", "increment"], rows)
    if args.svg:
        x = [np.log(1.0 / abs(w.E0 - w.Ej)) for w in rep.witnesses]
        y = [w.deltaK for w in rep.witnesses]
        svg.scatter_plot(x, y, args.svg, "witness pairs", "log(1/|dE|)", "|dk|")
    print("ratios=" + ",".join(serialize.fmt(r) for r in rep.ratios))
    return {"ratios": rep.ratios}


COMMANDS = {
    "bands": cmd_bands,
    "ids": cmd_ids,
    "lyapunov": cmd_lyapunov,
    "thouless-check": cmd_thouless,
    "construct": cmd_construct,
    "modulus": cmd_modulus,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="logholder", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", required=True, help="primary output file")
        p.add_argument("--svg", default=None, help="optional SVG plot")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


def _log(args, status):
    stamp = datetime.now(timezone.utc).isoformat()
    try:
        with open(str(args.out) + ".log", "a") as fh:
            fh.write(f"{stamp} {args.command} config={args.config} status={status}\n")
    except OSError:
        pass


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    base = Path(args.config).parent
    try:
        raw = serialize.read_json(args.config)
        cfg = RunConfig.model_validate(raw)
    except FileNotFoundError:
        print(f"error: config file {args.config!r} not found", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            for err in exc.errors():
                loc = ".".join(str(x) for x in err["loc"]) or "<root>"
                print(f"error: {loc}: {err['msg']}", file=sys.stderr)
        else:
            print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        COMMANDS[args.command](cfg, args, base)
    except (ConfigError, InvalidInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConstructionBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        _log(args, "budget_exceeded")
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"error: invariant violated: {exc}", file=sys.stderr)
        _log(args, "invariant_violation")
        return EXIT_INVARIANT
    _log(args, "ok")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
