"""Command line: run the identity suite or export data as CSV.

Configuration is a YAML file; complex numbers are written as ``[re, im]``
pairs.  See ``configs/default.yaml`` for every accepted key.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .calculus import F_of_t, Times
from .dirichlet import GreenEvaluator
from .errors import ConfigError, ConftauError
from .geometry import BackgroundPotential, DomainShape, compute_moments
from .inverse import SolveOptions
from .verify import REGISTRY, Base, SuiteOptions, VerificationReport, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

TOP_KEYS = {
    "bases", "shape", "potential", "name", "truncations", "solver", "fd_step",
    "identities", "tolerances", "output", "workers", "convergence", "export",
}
BASE_KEYS = {"name", "shape", "potential"}
SHAPE_KEYS = {"r", "u"}
TRUNC_KEYS = {"K", "J", "P", "M"}
SOLVER_KEYS = {"newton_tol", "max_iters", "damping", "fd_jacobian_step"}
OUTPUT_KEYS = {"report", "csv", "echo"}
EXPORT_KEYS = {"base", "t0_min", "t0_max", "n_t0", "green_source", "green_radii", "green_angles"}
DEFAULT_TRUNC = {"K": 8, "J": 8, "P": 4, "M": 512}


@dataclass(frozen=True)
class BaseSpec:
    name: str
    r: float
    u: tuple[complex, ...]
    potential: object  # preset name or tuple-of-tuples of complex


@dataclass(frozen=True)
class RunConfig:
    bases: tuple[BaseSpec, ...]
    K: int = 8
    J: int = 8
    P: int = 4
    M: int = 512
    solver: dict = field(default_factory=dict)
    fd_step: float = 1e-4
    identities: tuple[str, ...] | None = None
    tolerances: dict = field(default_factory=dict)
    report: str = "report.txt"
    csv: str | None = None
    echo: str | None = None
    workers: int = 1
    convergence: bool = True
    export: dict = field(default_factory=dict)

    # -- materialization ---------------------------------------------------
    def suite_options(self) -> SuiteOptions:
        return SuiteOptions(
            K=self.K, M=self.M, fd_step=self.fd_step,
            solver=SolveOptions(M=self.M, **self.solver),
            workers=self.workers, convergence=self.convergence,
        )

    def materialize(self) -> list[Base]:
        out = []
        for b in self.bases:
            try:
                shape = DomainShape(b.r, np.array(b.u, dtype=complex))
                shape.validate(self.M)
                pot = potential_from_spec(b.potential)
            except ConftauError as exc:
                raise ConfigError(f"base {b.name!r}: {exc}") from exc
            if pot.size > self.P:
                raise ConfigError(f"base {b.name!r}: T is {pot.size}x{pot.size}, larger than P={self.P}")
            out.append(Base(b.name, shape, pot))
        return out

    def to_dict(self) -> dict:
        """Plain-data form that :func:`parse_config` maps back to an equal config."""
        d = {
            "bases": [
                {
                    "name": b.name,
                    "shape": {"r": b.r, "u": [[c.real, c.imag] for c in b.u]},
                    "potential": b.potential if isinstance(b.potential, str)
                    else {"T": [[[c.real, c.imag] for c in row] for row in b.potential]},
                }
                for b in self.bases
            ],
            "truncations": {"K": self.K, "J": self.J, "P": self.P, "M": self.M},
            "solver": dict(self.solver),
            "fd_step": self.fd_step,
            "identities": "all" if self.identities is None else list(self.identities),
            "tolerances": dict(self.tolerances),
            "output": {"report": self.report, "csv": self.csv, "echo": self.echo},
            "workers": self.workers,
            "convergence": self.convergence,
        }
        if self.export:
            d["export"] = dict(self.export)
        return d


def potential_from_spec(spec) -> BackgroundPotential:
    if isinstance(spec, str):
        s = spec.replace(" ", "")
        if s == "sigma=1":
            return BackgroundPotential.uniform()
        m = re.fullmatch(r"sigma=\|z\|\^\(?(\d+)\)?", s)
        if m and int(m.group(1)) % 2 == 0:
            return BackgroundPotential.radial_power(int(m.group(1)) // 2 + 1)
        raise ConfigError(f"unknown potential preset {spec!r}")
    return BackgroundPotential(np.array(spec, dtype=complex))


def _complex(x, what: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(float(x[0]), float(x[1]))
    raise ConfigError(f"{what}: expected a number or an [re, im] pair, got {x!r}")


def _check_keys(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected a mapping")
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")


def _number(x, what, kind=float):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{what}: expected a number, got {x!r}")
    if kind is int and int(x) != x:
        raise ConfigError(f"{what}: expected an integer, got {x!r}")
    return kind(x)


def _parse_base(d, idx) -> BaseSpec:
    _check_keys(d, BASE_KEYS, f"bases[{idx}]")
    if "shape" not in d:
        raise ConfigError(f"bases[{idx}]: missing 'shape'")
    if "potential" not in d:
        raise ConfigError(f"bases[{idx}]: missing 'potential'")
    sh = d["shape"]
    _check_keys(sh, SHAPE_KEYS, f"bases[{idx}].shape")
    if "r" not in sh:
        raise ConfigError(f"bases[{idx}].shape: missing 'r'")
    r = _number(sh["r"], "shape.r")
    u = tuple(_complex(c, f"bases[{idx}].shape.u") for c in sh.get("u", [0]))
    pot = d["potential"]
    if isinstance(pot, dict):
        _check_keys(pot, {"T"}, f"bases[{idx}].potential")
        rows = pot.get("T")
        if not isinstance(rows, list) or not rows:
            raise ConfigError(f"bases[{idx}].potential.T must be a nonempty matrix")
        pot = tuple(tuple(_complex(c, "potential.T") for c in row) for row in rows)
    elif not isinstance(pot, str):
        raise ConfigError(f"bases[{idx}].potential: expected a preset name or {{T: ...}}")
    return BaseSpec(str(d.get("name", f"base{idx}")), r, u, pot)


def parse_config(data) -> RunConfig:
    """Validate a plain-data config; raises :class:`ConfigError`."""
    if data is None:
        data = {}
    _check_keys(data, TOP_KEYS, "config")
    if "bases" in data:
        if "shape" in data or "potential" in data:
            raise ConfigError("give either 'bases' or a top-level 'shape'/'potential', not both")
        if not isinstance(data["bases"], list) or not data["bases"]:
            raise ConfigError("'bases' must be a nonempty list")
        bases = tuple(_parse_base(b, i) for i, b in enumerate(data["bases"]))
    else:
        if "shape" not in data:
            raise ConfigError("config: missing 'shape' (or 'bases')")
        single = {k: data[k] for k in ("name", "shape", "potential") if k in data}
        single.setdefault("potential", "sigma=1")
        bases = (_parse_base(single, 0),)
    names = [b.name for b in bases]
    if len(set(names)) != len(names):
        raise ConfigError("base names must be unique")

    tr = dict(DEFAULT_TRUNC)
    if "truncations" in data:
        _check_keys(data["truncations"], TRUNC_KEYS, "truncations")
        tr.update({k: _number(v, f"truncations.{k}", int) for k, v in data["truncations"].items()})
    if tr["K"] < 1 or tr["M"] < 64 or tr["J"] < 0 or tr["P"] < 1:
        raise ConfigError("truncations out of range (K >= 1, J >= 0, P >= 1, M >= 64)")
    for b in bases:
        if len(b.u) > tr["J"] + 1:
            raise ConfigError(f"base {b.name!r}: {len(b.u)} shape coefficients exceed J={tr['J']}")

    solver = {}
    if "solver" in data:
        _check_keys(data["solver"], SOLVER_KEYS, "solver")
        for k, v in data["solver"].items():
            solver[k] = _number(v, f"solver.{k}", int if k == "max_iters" else float)
        try:
            SolveOptions(**solver)
        except ValueError as exc:
            raise ConfigError(f"solver: {exc}") from exc

    ids = data.get("identities", "all")
    if ids == "all" or ids is None:
        identities = None
    elif isinstance(ids, list) and all(isinstance(i, str) for i in ids):
        unknown = [i for i in ids if i not in REGISTRY]
        if unknown:
            raise ConfigError(f"unknown identities: {unknown}")
        identities = tuple(ids)
    else:
        raise ConfigError("'identities' must be 'all' or a list of ids")

    tols = data.get("tolerances", {}) or {}
    if not isinstance(tols, dict):
        raise ConfigError("'tolerances' must be a mapping")
    for k in tols:
        if k not in REGISTRY:
            raise ConfigError(f"tolerance given for unknown identity {k!r}")
    tols = {k: _number(v, f"tolerances.{k}") for k, v in tols.items()}

    out = data.get("output", {}) or {}
    _check_keys(out, OUTPUT_KEYS, "output")
    exp = data.get("export", {}) or {}
    _check_keys(exp, EXPORT_KEYS, "export")

    fd = _number(data.get("fd_step", 1e-4), "fd_step")
    if not fd > 0:
        raise ConfigError("fd_step must be positive")
    workers = _number(data.get("workers", 1), "workers", int)
    conv = data.get("convergence", True)
    if not isinstance(conv, bool):
        raise ConfigError("'convergence' must be true or false")
    return RunConfig(
        bases=bases, K=tr["K"], J=tr["J"], P=tr["P"], M=tr["M"], solver=solver, fd_step=fd,
        identities=identities, tolerances=tols, report=str(out.get("report", "report.txt")),
        csv=out.get("csv"), echo=out.get("echo"), workers=max(1, workers), convergence=conv, export=exp,
    )


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    return parse_config(data)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def write_report(report: VerificationReport, text_path: Path, csv_path: Path) -> None:
    text_path.parent.mkdir(parents=True, exist_ok=True)
    text_path.write_text(report.to_text())
    csv_path.write_text(report.to_csv())


def cmd_verify(config_path, suite: str | None = None, report: str | None = None) -> int:
    try:
        cfg = load_config(config_path)
        if suite:
            ids = tuple(s.strip() for s in suite.split(",") if s.strip())
            unknown = [i for i in ids if i not in REGISTRY]
            if unknown:
                raise ConfigError(f"unknown identities in --suite: {unknown}")
            cfg = replace(cfg, identities=ids)
        if report:
            cfg = replace(cfg, report=report)
        bases = cfg.materialize()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rep = run_suite(bases, None if cfg.identities is None else list(cfg.identities), cfg.suite_options(), cfg.tolerances)
    text_path = Path(cfg.report)
    csv_path = Path(cfg.csv) if cfg.csv else text_path.with_suffix(".csv")
    write_report(rep, text_path, csv_path)
    echo = Path(cfg.echo) if cfg.echo else text_path.with_name(text_path.stem + ".config.yaml")
    echo.write_text(yaml.safe_dump(cfg.to_dict(), sort_keys=False))
    for e in rep.entries:
        print(f"{e.status:<5} {e.id:<14} {e.base:<24} {e.residual:.3e}")
    print(f"{'PASS' if rep.passed else 'FAIL'}: {len(rep.entries)} entries, {len(rep.ids())} identities; report at {text_path}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _pick_base(cfg: RunConfig) -> Base:
    bases = cfg.materialize()
    name = cfg.export.get("base")
    if name is None:
        return bases[0]
    for b in bases:
        if b.name == name:
            return b
    raise ConfigError(f"export.base {name!r} is not among the configured bases")


def _export_rows(cfg: RunConfig, what: str):
    base = _pick_base(cfg)
    ex = cfg.export
    if what == "curve":
        theta, z, _ = base.shape.boundary(cfg.M)
        return ["theta", "re_z", "im_z"], [[t, c.real, c.imag] for t, c in zip(theta, z)]
    if what == "moments":
        m = compute_moments(base.shape, base.pot, cfg.K, cfg.M)
        rows = [[0, m.t0, 0.0, m.v0, 0.0]]
        rows += [[k, m.t[k - 1].real, m.t[k - 1].imag, m.v[k - 1].real, m.v[k - 1].imag] for k in range(1, cfg.K + 1)]
        return ["k", "re_t", "im_t", "re_v", "im_v"], rows
    if what == "fgrid":
        t = Times.from_shape(base.shape, base.pot, cfg.K, cfg.M)
        grid = np.linspace(float(ex.get("t0_min", 0.5)), float(ex.get("t0_max", 2.0)), int(ex.get("n_t0", 16)))
        opts = SolveOptions(M=cfg.M, **cfg.solver)
        return ["t0", "F"], [[t0, F_of_t(Times(t0, t.t), base.pot, opts)] for t0 in grid]
    if what == "green":
        ge = GreenEvaluator(base.shape)
        _, zb, _ = base.shape.boundary(cfg.M)
        R = float(np.max(np.abs(zb)))
        src = _complex(ex.get("green_source", [2.0 * R, 0.0]), "export.green_source")
        radii = np.linspace(1.05 * R, 4.0 * R, int(ex.get("green_radii", 20)))
        angles = 2 * np.pi * np.arange(int(ex.get("green_angles", 36))) / int(ex.get("green_angles", 36))
        pts = (radii[:, None] * np.exp(1j * angles[None, :])).ravel()
        pts = pts[np.abs(pts - src) > 1e-9]
        G = ge.green(np.full(pts.shape, src), pts)
        return ["re_z", "im_z", "G"], [[p.real, p.imag, g] for p, g in zip(pts, G)]
    raise ConfigError(f"unknown export kind {what!r}")


def cmd_export(config_path, what: str, out: str) -> int:
    try:
        cfg = load_config(config_path)
        header, rows = _export_rows(cfg, what)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConftauError as exc:
        print(f"export failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([r if isinstance(r, (int, np.integer)) else "%.17g" % r for r in row])
    print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conftau", description="Moments, tau-function and Hirota identities of planar domains.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run the identity suite")
    v.add_argument("--config", required=True, help="YAML run configuration")
    v.add_argument("--suite", help="comma-separated identity ids (default: from config)")
    v.add_argument("--report", help="report path (CSV written alongside)")
    e = sub.add_parser("export", help="write CSV data for external plotting")
    e.add_argument("--config", required=True)
    e.add_argument("--what", required=True, choices=["curve", "moments", "fgrid", "green"])
    e.add_argument("--out", required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.command == "verify":
        return cmd_verify(args.config, args.suite, args.report)
    return cmd_export(args.config, args.what, args.out)


if __name__ == "__main__":
    sys.exit(main())
