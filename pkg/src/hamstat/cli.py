"""Command-line front end.

Subcommands ``solve``, ``sweep``, ``cone`` and ``verify``. Exit codes: 0
success, 1 verification failure, 2 usage or configuration error, 3
numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import export
from .errors import HamstatError
from .greens import SingularityConfig, admissibility_check
from .grid import DiscGrid, ScalarField
from .spectral import BoundaryTrace, DEFAULT_K, compatibility_integral, mobius_conjugate_solution, solve_one_singularity
from .variational import (
    EnergyTrace,
    _pullback_trace,
    assemble_el_system,
    default_schedule,
    discrete_energies,
    l2inf_quasinorm,
    solve_el,
    t_sweep,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    singularities: list
    boundary: list
    h: float = 1 / 64
    t: float = 0.5
    schedule: list = field(default_factory=list)
    K: int = DEFAULT_K
    out: str = "out"
    seed: int = 0
    ply: bool = False

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("config: top level must be an object")
        known = set(cls.__dataclass_fields__)
        for k in d:
            if k not in known:
                raise ConfigError(f"{k}: unknown field")
        for req in ("singularities", "boundary"):
            if req not in d:
                raise ConfigError(f"{req}: missing required field")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def validate(self):
        try:
            self.config()
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"singularities: {exc}") from None
        try:
            self.trace()
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"boundary: {exc}") from None
        if not isinstance(self.h, (int, float)) or not 0 < self.h <= 0.25:
            raise ConfigError(f"h: mesh size must lie in (0, 1/4], got {self.h!r}")
        if not isinstance(self.t, (int, float)) or not 0 <= self.t <= 1:
            raise ConfigError(f"t: must lie in [0, 1], got {self.t!r}")
        if not isinstance(self.schedule, list):
            raise ConfigError("schedule: must be a list")
        if not isinstance(self.K, int) or self.K < 0:
            raise ConfigError(f"K: must be a non-negative integer, got {self.K!r}")
        if not isinstance(self.seed, int):
            raise ConfigError(f"seed: must be an integer, got {self.seed!r}")

    def config(self):
        return SingularityConfig.from_records(self.singularities)

    def trace(self):
        psi = BoundaryTrace.from_records(self.boundary)
        if psi.K > self.K:
            raise ValueError(f"mode {psi.K} exceeds truncation K = {self.K}")
        return psi

    def to_dict(self):
        return asdict(self)

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: not valid JSON ({exc})") from None
        return cls.from_dict(d)


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path} ({exc.strerror})") from None
    return RunConfig.loads(text)


def _out_dir(args, cfg=None):
    return Path(args.out or os.environ.get("HAMSTAT_OUT") or (cfg.out if cfg else "out"))


def _apply_overrides(cfg, args):
    if args.resolution is not None:
        cfg.h = args.resolution
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.validate()
    return cfg


def _energy_row(t, d, c, tot, l2):
    return EnergyTrace([{"t": t, "dirichlet": d, "coupling": c, "total": tot, "l2inf": l2}])


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(args):
    cfg = _apply_overrides(load_config(args.config), args)
    config, psi = cfg.config(), cfg.trace()
    out = _out_dir(args, cfg)
    spectral = cfg.t == 1
    if spectral and config.n != 1:
        raise ConfigError("t: the t = 1 problem is solved only for one singular point")
    plan = {
        "command": "solve",
        "path": "spectral" if spectral else "grid",
        "t": cfg.t,
        "h": cfg.h,
        "points": config.n,
        "outputs": [str(out / n) for n in ("field.bin", "field.bin.json", "energy.csv", "residual.json", "admissibility.json")]
        + ([str(out / "immersion.ply")] if cfg.ply else []),
    }
    if args.dry_run:
        print(export.dumps_json(plan), end="")
        return EXIT_OK
    grid = DiscGrid(cfg.h, config.points)
    if spectral:
        p, d = config.points[0], config.degrees[0]
        moved = _pullback_trace(psi, p)
        integral = compatibility_integral(psi, config)
        sol = solve_one_singularity(moved, 1.0, d)
        ev = mobius_conjugate_solution(sol, p)
        field_ = ScalarField.from_function(grid, ev)
        rng = np.random.default_rng(cfg.seed)
        z = np.sqrt(rng.random(1000)) * 0.999 * np.exp(2j * np.pi * rng.random(1000))
        z = z[np.abs(z - p) > 1e-6]
        residual = {"max_el_residual": float(np.max(np.abs(ev.residual(z)))), "compatibility_integral": [integral.real, integral.imag]}
        energy = sol.energy() / 2
        trace = _energy_row(1.0, energy, float("nan"), float("nan"), l2inf_quasinorm(field_))
    else:
        system = assemble_el_system(grid, config, cfg.t, psi)
        field_ = solve_el(system)
        x = field_.values[grid.inside]
        res = float(np.linalg.norm(system.matrix @ x - system.rhs) / max(np.linalg.norm(system.rhs), 1e-300))
        d, c, tot = discrete_energies(field_, config, cfg.t)
        residual = {"relative_residual": res, "coupling_over_dirichlet": c / d if d else 0.0}
        trace = _energy_row(cfg.t, d, c, tot, l2inf_quasinorm(field_))
    export.write_field(out / "field.bin", field_, t=cfg.t)
    export.atomic_write(out / "energy.csv", trace.to_csv())
    export.atomic_write(out / "residual.json", export.dumps_json(residual))
    adm = admissibility_check(config, min(cfg.h / 2, 1 / 128)).to_dict()
    export.atomic_write(out / "admissibility.json", export.dumps_json(adm))
    if cfg.ply:
        if not spectral:
            print("ply: the immersion exists only for t = 1; skipped", file=sys.stderr)
        else:
            from .immersion import assemble_immersion, harmonic_conjugate

            cr = harmonic_conjugate(field_, config, method="lsq")
            verts, faces = export.grid_mesh(assemble_immersion(field_, cr))
            export.atomic_write(out / "immersion.ply", export.ply_bytes(verts, faces, args.ascii))
    print(f"solve: wrote {out}")
    return EXIT_OK


def cmd_sweep(args):
    cfg = _apply_overrides(load_config(args.config), args)
    config, psi = cfg.config(), cfg.trace()
    schedule = cfg.schedule if "schedule" in _raw_keys(args.config) else default_schedule()
    if not schedule:
        raise ConfigError("schedule: empty t schedule")
    if any(b <= a for a, b in zip(schedule, schedule[1:])) or schedule[0] < 0 or schedule[-1] >= 1:
        raise ConfigError("schedule: must be strictly increasing inside [0, 1)")
    out = _out_dir(args, cfg)
    if args.dry_run:
        print(export.dumps_json({"command": "sweep", "schedule": schedule, "points": config.n,
                                 "outputs": [str(out / "energy.csv"), str(out / "fit.json")]}), end="")
        return EXIT_OK
    trace = t_sweep(config, psi, schedule, h=cfg.h)
    export.atomic_write(out / "energy.csv", trace.to_csv())
    export.atomic_write(out / "fit.json", export.dumps_json(trace.fit()))
    fit = trace.fit()
    print(f"sweep: slope {fit['slope']:.4f}, theta_hat {fit['theta_hat']:.6g}")
    return EXIT_OK


def _raw_keys(path):
    try:
        return set(json.loads(Path(path).read_text()))
    except (OSError, ValueError):
        return set()


def cmd_cone(args):
    from .immersion import ConeDescriptor, sw_cone, verify_hamiltonian_stationary

    if args.p < 1 or args.q < 1:
        raise ConfigError(f"p, q: cone exponents must be positive integers, got ({args.p}, {args.q})")
    desc = ConeDescriptor(args.p, args.q)
    h = args.resolution or 1 / 64
    out = _out_dir(args)
    if args.dry_run:
        print(export.dumps_json({"command": "cone", "p": args.p, "q": args.q, "h": h,
                                 "outputs": [str(out / "cone.ply"), str(out / "cone.obj"), str(out / "cone.json")]}), end="")
        return EXIT_OK
    grid = DiscGrid(h)
    imm = sw_cone(desc, grid)
    z = grid.Z[grid.inside]
    cf = desc.conformal_factor(z)
    report = {
        "p": args.p,
        "q": args.q,
        "maslov_degree": desc.maslov,
        "h": h,
        "conformal_factor_rel_error": float(np.max(np.abs(imm.conformal_factor[grid.inside] - cf) / cf)),
        "angle_error": float(np.max(np.abs(imm.angle[grid.inside] - np.exp(1j * desc.maslov * np.angle(z))))),
        "channels": imm.report(),
        "structural": verify_hamiltonian_stationary(imm, desc.g, where=np.abs(grid.Z) > 0.25),
    }
    verts, faces = export.cone_mesh(desc)
    export.atomic_write(out / "cone.ply", export.ply_bytes(verts, faces, args.ascii))
    export.atomic_write(out / "cone.obj", export.obj_text(verts, faces))
    export.atomic_write(out / "cone.json", export.dumps_json(report))
    print(f"cone ({args.p},{args.q}): maslov degree {desc.maslov}, angle error {report['angle_error']:.2e}")
    return EXIT_OK


def cmd_verify(args):
    from .suites import SUITES, _plain, run_suite

    if args.suite not in SUITES:
        print(f"verify: unknown suite {args.suite!r}; choose from {sorted(SUITES)}", file=sys.stderr)
        return EXIT_USAGE
    if args.dry_run:
        print(export.dumps_json({"command": "verify", "suite": args.suite,
                                 "checks": [c.__name__ for c in SUITES[args.suite]]}), end="")
        return EXIT_OK
    overrides = {}
    if args.seed is not None:
        overrides["check_wente"] = {"seed": args.seed}
    results = run_suite(args.suite, **overrides)
    ok = True
    summary = []
    for r in results:
        print(r.line())
        ok &= r.passed
        d = r.to_dict()
        d.pop("seconds")
        d.pop("within_budget")
        d["details"].pop("reports", None)
        summary.append(d)
        if r.name.startswith("8") and args.out:
            rank = {"singular_values": r.details["singular_values"], "rank": r.details["rank"]}
            export.atomic_write(Path(args.out) / "rank.json", export.dumps_json(rank))
        if r.name.startswith("6") and args.out:
            from .wente import margins_to_csv

            export.atomic_write(Path(args.out) / "wente_margins.csv", margins_to_csv(r.details["reports"]))
    text = export.dumps_json({"suite": args.suite, "passed": bool(ok), "checks": _plain(summary)})
    if args.out:
        export.atomic_write(Path(args.out) / f"verify_{args.suite}.json", text)
    else:
        print(text, end="")
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="DIR", help="output directory (default: config 'out', or $HAMSTAT_OUT)")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--resolution", type=float, metavar="H", help="grid mesh size")
    common.add_argument("--dry-run", action="store_true", help="validate and print the plan; write nothing")
    common.add_argument("--ascii", action="store_true", help="write ASCII instead of binary PLY")
    parser = argparse.ArgumentParser(prog="hamstat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", parents=[common], help="solve one configuration")
    p.add_argument("--config", required=True, metavar="PATH")
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("sweep", parents=[common], help="continuation in t with energy trace")
    p.add_argument("--config", required=True, metavar="PATH")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("cone", parents=[common], help="Schoen-Wolfson cone mesh and identities")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p.set_defaults(func=cmd_cone)
    p = sub.add_parser("verify", parents=[common], help="run an acceptance suite")
    p.add_argument("suite", help="wente, uniqueness, cones, blowup, rank or all")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HamstatError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
