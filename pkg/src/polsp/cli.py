"""Batch front end: config files, method dispatch, deterministic export.

Config files are YAML with a strict schema; unknown keys are rejected by
name because a silently ignored typo in a physics config is worse than an
error.  Every output file embeds a manifest digest computed over the
run-defining inputs only (config snapshot, method, q grid, tool version),
never over timestamps, so re-running a manifest byte-reproduces the CSV.

Exit codes: 0 success, 2 configuration error, 3 solver error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .dispersion import classical_roots, secular_roots, sweep
from .errors import ConfigError, GeometryError, ParseError, PolspError, \
    SolverError, SpeciesError, TruncationError
from .hopfield import build_dynamical_matrix, diagonalize
from .kk import LorentzSet, kk_forward, kk_inverse, load_samples, save_samples
from .model import METHODS, CavityConfig, OscillatorSpecies, SolverSettings, validate
from .modes import overlap_K

COMMANDS = ("sweep", "spectrum", "classical", "kk", "converge")

# ---------------------------------------------------------------------------
# config ingestion
# ---------------------------------------------------------------------------

_GEOMETRY_KEYS = {"L", "l", "c"}
_BASIS_KEYS = {"photon_modes", "exciton_modes"}
_SWEEP_KEYS = {"q_min", "q_max", "points"}
_SOLVER_KEYS = {"method", "root_tol", "pole_exclusion", "scan_points",
                "omega_max", "allow_evanescent"}
_SECTIONS = {"geometry", "oscillators", "basis", "sweep", "solver"}

_DEFAULT_PHOTON_MODES = 32
_DEFAULT_EXCITON_MODES = 4


def _require_mapping(obj, section: str) -> dict:
    if not isinstance(obj, dict):
        raise ParseError(f"section must be a mapping, got {type(obj).__name__}",
                         field=section)
    return obj


def _reject_unknown(mapping: dict, allowed: set, section: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ParseError("unknown key", field=f"{section}.{key}")


def _as_float(mapping: dict, key: str, section: str, default=None) -> float:
    if key not in mapping:
        if default is None:
            raise ParseError("required key missing", field=f"{section}.{key}")
        return default
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a number, got {value!r}", field=f"{section}.{key}")
    return float(value)


def _as_int(mapping: dict, key: str, section: str, default=None) -> int:
    if key not in mapping:
        if default is None:
            raise ParseError("required key missing", field=f"{section}.{key}")
        return default
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", field=f"{section}.{key}")
    return value


def parse_config(text: str) -> tuple[CavityConfig, dict]:
    """Parse and validate a YAML config; return it plus its plain snapshot."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML: {exc}") from exc
    if raw is None:
        raise ParseError("config file is empty")
    raw = _require_mapping(raw, "<root>")
    _reject_unknown(raw, _SECTIONS, "<root>")

    if "geometry" not in raw:
        raise ParseError("required section missing", field="geometry")
    geometry = _require_mapping(raw["geometry"], "geometry")
    _reject_unknown(geometry, _GEOMETRY_KEYS, "geometry")
    L = _as_float(geometry, "L", "geometry")
    l = _as_float(geometry, "l", "geometry")
    c = _as_float(geometry, "c", "geometry", default=1.0)

    if "oscillators" not in raw:
        raise ParseError("required section missing", field="oscillators")
    osc_raw = raw["oscillators"]
    if not isinstance(osc_raw, list):
        raise ParseError("must be a list of {omega, G} mappings", field="oscillators")
    species = []
    for k, entry in enumerate(osc_raw):
        entry = _require_mapping(entry, f"oscillators[{k}]")
        _reject_unknown(entry, {"omega", "G"}, f"oscillators[{k}]")
        species.append(OscillatorSpecies(
            omega=_as_float(entry, "omega", f"oscillators[{k}]"),
            G=_as_float(entry, "G", f"oscillators[{k}]")))

    basis = _require_mapping(raw.get("basis", {}), "basis")
    _reject_unknown(basis, _BASIS_KEYS, "basis")
    photon_modes = _as_int(basis, "photon_modes", "basis", default=_DEFAULT_PHOTON_MODES)
    exciton_modes = _as_int(basis, "exciton_modes", "basis", default=_DEFAULT_EXCITON_MODES)

    sweep_sec = _require_mapping(raw.get("sweep", {}), "sweep")
    _reject_unknown(sweep_sec, _SWEEP_KEYS, "sweep")
    q_min = _as_float(sweep_sec, "q_min", "sweep", default=0.0)
    q_max = _as_float(sweep_sec, "q_max", "sweep", default=0.0)
    points = _as_int(sweep_sec, "points", "sweep", default=1)
    if points < 1:
        raise ParseError("points must be >= 1", field="sweep.points")
    if q_max < q_min:
        raise ParseError("q_max must be >= q_min", field="sweep.q_max")

    solver_sec = _require_mapping(raw.get("solver", {}), "solver")
    _reject_unknown(solver_sec, _SOLVER_KEYS, "solver")
    defaults = SolverSettings()
    method = solver_sec.get("method", defaults.method)
    if not isinstance(method, str) or method not in METHODS:
        raise ParseError(f"method must be one of {METHODS}, got {method!r}",
                         field="solver.method")
    allow_ev = solver_sec.get("allow_evanescent", defaults.allow_evanescent)
    if not isinstance(allow_ev, bool):
        raise ParseError("expected a boolean", field="solver.allow_evanescent")
    settings = SolverSettings(
        method=method,
        root_tol=_as_float(solver_sec, "root_tol", "solver", defaults.root_tol),
        pole_exclusion=_as_float(solver_sec, "pole_exclusion", "solver",
                                 defaults.pole_exclusion),
        scan_points=_as_int(solver_sec, "scan_points", "solver", defaults.scan_points),
        omega_max=_as_float(solver_sec, "omega_max", "solver", defaults.omega_max),
        allow_evanescent=allow_ev)

    config = CavityConfig(L=L, l=l, c=c, oscillators=tuple(species),
                          photon_mode_count=photon_modes,
                          exciton_mode_count=exciton_modes,
                          solver=settings)
    try:
        validate(config)
    except GeometryError as exc:
        raise GeometryError(f"geometry: {exc}") from None
    except SpeciesError as exc:
        raise SpeciesError(f"oscillators: {exc}") from None
    except TruncationError as exc:
        raise TruncationError(f"basis: {exc}") from None

    snapshot = {
        "geometry": {"L": L, "l": l, "c": c},
        "oscillators": [{"omega": sp.omega, "G": sp.G} for sp in species],
        "basis": {"photon_modes": photon_modes, "exciton_modes": exciton_modes},
        "sweep": {"q_min": q_min, "q_max": q_max, "points": points},
        "solver": {"method": settings.method, "root_tol": settings.root_tol,
                   "pole_exclusion": settings.pole_exclusion,
                   "scan_points": settings.scan_points,
                   "omega_max": settings.omega_max,
                   "allow_evanescent": settings.allow_evanescent},
    }
    return config, snapshot


def load_config(path) -> tuple[CavityConfig, dict]:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"))


def sweep_grid(snapshot: dict) -> np.ndarray:
    sec = snapshot["sweep"]
    return np.linspace(sec["q_min"], sec["q_max"], sec["points"])


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------

def manifest_digest(snapshot: dict, method: str, q_grid) -> str:
    """Digest over the run-defining fields only; timestamps never enter."""
    payload = {
        "config": snapshot,
        "method": method,
        "q_grid": [float(q) for q in q_grid],
        "tool_version": __version__,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _write_manifest(out_dir: Path, name: str, snapshot: dict, method: str,
                    q_grid, digest: str, outputs: dict) -> Path:
    record = {
        "digest": digest,
        "config": snapshot,
        "method": method,
        "q_grid": [float(q) for q in q_grid],
        "tool_version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "truncation": {
            "photon_modes": snapshot["basis"]["photon_modes"],
            "exciton_modes": snapshot["basis"]["exciton_modes"],
            "species": len(snapshot["oscillators"]),
        },
        "outputs": outputs,
    }
    path = out_dir / f"{name}_manifest.json"
    path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def _file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _fmt(x: float) -> str:
    return f"{x:.11e}"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_sweep(config: CavityConfig, snapshot: dict, out_dir: Path,
               method: str, threads: int) -> list[Path]:
    qs = sweep_grid(snapshot)
    digest = manifest_digest(snapshot, method, qs)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            curve = sweep(config, qs, method=method, mapper=pool.map)
    else:
        curve = sweep(config, qs, method=method)
    csv_path = out_dir / "sweep.csv"
    with csv_path.open("w", encoding="utf-8") as fh:
        fh.write(f"# manifest: {digest}\n")
        fh.write("q,branch,omega\n")
        for branch_id, branch in enumerate(curve.branches):
            for qv, omega in branch:
                fh.write(f"{_fmt(qv)},{branch_id},{_fmt(omega)}\n")
    manifest = _write_manifest(out_dir, "sweep", snapshot, method, qs, digest,
                               {csv_path.name: _file_digest(csv_path)})
    return [csv_path, manifest]


def _cmd_spectrum(config: CavityConfig, snapshot: dict, out_dir: Path,
                  q: float) -> list[Path]:
    # mode tables need eigenvectors, so this is always the dynamical method
    digest = manifest_digest(snapshot, "dynamical", [q])
    overlaps = overlap_K(config)
    modes = diagonalize(build_dynamical_matrix(config, overlaps, q))
    csv_path = out_dir / "spectrum.csv"
    with csv_path.open("w", encoding="utf-8") as fh:
        fh.write(f"# manifest: {digest}\n")
        fh.write("omega,norm_W,norm_X,norm_Y,norm_Z\n")
        for mode in modes:
            parts = [float(np.sum(np.abs(v) ** 2)) for v in
                     (mode.W, mode.X, mode.Y, mode.Z)]
            fh.write(",".join([_fmt(mode.Omega)] + [_fmt(p) for p in parts]) + "\n")
    manifest = _write_manifest(out_dir, "spectrum", snapshot, "dynamical", [q],
                               digest, {csv_path.name: _file_digest(csv_path)})
    return [csv_path, manifest]


def _cmd_classical(config: CavityConfig, snapshot: dict, out_dir: Path,
                   q: float) -> list[Path]:
    digest = manifest_digest(snapshot, "classical", [q])
    model = LorentzSet.from_config(config)
    window = (0.0, config.solver.omega_max)
    branch1, branch2 = classical_roots(config, model, q, window,
                                       poles=model.poles())
    rows = sorted([(w, 1) for w in branch1] + [(w, 2) for w in branch2])
    csv_path = out_dir / "classical.csv"
    with csv_path.open("w", encoding="utf-8") as fh:
        fh.write(f"# manifest: {digest}\n")
        fh.write("omega,branch\n")
        for omega, branch in rows:
            fh.write(f"{_fmt(omega)},{branch}\n")
    manifest = _write_manifest(out_dir, "classical", snapshot, "classical", [q],
                               digest, {csv_path.name: _file_digest(csv_path)})
    return [csv_path, manifest]


def _cmd_kk(config: CavityConfig, snapshot: dict, out_dir: Path,
            input_path: str | None, direction: str) -> list[Path]:
    if input_path is None:
        raise ParseError("kk command needs --input with a two-column sample file")
    grid, values = load_samples(input_path)
    digest = manifest_digest(snapshot, f"kk_{direction}", grid)
    result = kk_forward(grid, values) if direction == "forward" else kk_inverse(grid, values)
    out_path = out_dir / "kk.csv"
    save_samples(out_path, result.grid, result.values,
                 comment=f"manifest: {digest}\n"
                         f"direction: {direction}\n"
                         f"tail_estimate: {result.tail_estimate:.3e}")
    manifest = _write_manifest(out_dir, "kk", snapshot, f"kk_{direction}", grid,
                               digest, {out_path.name: _file_digest(out_path)})
    return [out_path, manifest]


def _converge_ladder(largest: int) -> list[int]:
    ladder = []
    step = largest
    while step >= 1 and len(ladder) < 5:
        ladder.append(step)
        step //= 2
    return sorted(set(ladder))


def _cmd_converge(config: CavityConfig, snapshot: dict, out_dir: Path) -> list[Path]:
    # the complete-matter-basis experiment: hold N fixed, double Xi, watch
    # the secular roots approach the classical ones
    digest = manifest_digest(snapshot, "converge", [0.0])
    model = LorentzSet.from_config(config)
    window = (0.0, config.solver.omega_max)
    branch1, branch2 = classical_roots(config, model, 0.0, window,
                                       poles=model.poles())
    reference = np.sort(np.concatenate([branch1, branch2]))
    if len(reference) == 0:
        raise SolverError("no classical roots inside the window; widen omega_max")
    compare = min(5, len(reference))

    rows = []
    for xi in _converge_ladder(config.exciton_mode_count):
        cfg = config.with_truncation(exciton_mode_count=xi)
        overlaps = overlap_K(cfg)
        roots = secular_roots(cfg, overlaps, 0.0, window)
        take = min(compare, len(roots))
        dev = float(np.max(np.abs(roots[:take] - reference[:take]) / reference[:take]))
        rows.append((xi, cfg.photon_mode_count, dev))

    csv_path = out_dir / "converge.csv"
    with csv_path.open("w", encoding="utf-8") as fh:
        fh.write(f"# manifest: {digest}\n")
        fh.write("exciton_modes,photon_modes,max_rel_deviation\n")
        for xi, n, dev in rows:
            fh.write(f"{xi},{n},{_fmt(dev)}\n")
    manifest = _write_manifest(out_dir, "converge", snapshot, "converge", [0.0],
                               digest, {csv_path.name: _file_digest(csv_path)})
    return [csv_path, manifest]


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polsp",
        description="Polariton spectrum of a dispersive slab in a closed cavity")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="YAML config path")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--method", default=None, choices=METHODS,
                        help="override solver.method from the config")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for q sweeps")
    parser.add_argument("--q", type=float, default=0.0,
                        help="in-plane wavenumber for spectrum/classical")
    parser.add_argument("--input", default=None,
                        help="two-column sample file for the kk command")
    parser.add_argument("--direction", default="forward",
                        choices=("forward", "inverse"),
                        help="kk transform direction")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config, snapshot = load_config(args.config)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        method = args.method or config.solver.method
        if args.threads < 1:
            raise ParseError("threads must be >= 1")

        if args.command == "sweep":
            written = _cmd_sweep(config, snapshot, out_dir, method, args.threads)
        elif args.command == "spectrum":
            written = _cmd_spectrum(config, snapshot, out_dir, args.q)
        elif args.command == "classical":
            written = _cmd_classical(config, snapshot, out_dir, args.q)
        elif args.command == "kk":
            written = _cmd_kk(config, snapshot, out_dir, args.input, args.direction)
        else:
            written = _cmd_converge(config, snapshot, out_dir)
    except ConfigError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2
    except SolverError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 3
    except PolspError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
