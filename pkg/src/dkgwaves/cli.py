"""Command-line interface.

Subcommands: ``nld``, ``dkg-iter``, ``dkg-shoot``, ``sweep`` and ``check``.
Options can also come from a ``key = value`` file given with ``--config``;
explicit flags take precedence over the file, which takes precedence over
the defaults. Exit status is 0 on success, 1 on solver failure and 2 on
invalid configuration.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, formats, observables
from .dkg_iter import TOL as ODE_TOL
from .dkg_iter import gauge_normalize, iterate
from .dkg_shoot import solve_massless
from .errors import DkgError, DomainError, ResolutionError, SolverError
from .nld import nld_observables, solve_nld
from .sweep import (SweepTable, dE_dQ_consistency, find_energy_minimum, omega_range,
                    sweep_iterative, sweep_nld, sweep_shooting)

log = logging.getLogger("dkgwaves")

DEFAULTS = {
    "n": 3,
    "m": 1.0,
    "M": 1.0,
    "omega": None,
    "omega_range": None,
    "hstar0": None,
    "kind": "iterative",
    "dr": 0.01,
    "max_iter": 20,
    "tol_g": 1e-6,
    "tol_h0": 1e-6,
    "out": "dkgwaves_output",
    "plot": "png",
    "energy_scale": "auto",
    "reference_nld": False,
    "workers": None,
    "threshold": 1e-3,
}
SHOOTING_HSTAR0 = (-0.999, -0.99, -0.9, -0.7, -0.5, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0)


class ConfigError(ValueError):
    """Invalid command line or configuration file."""


@dataclass
class RunConfig:
    command: str
    n: int = 3
    m: float = 1.0
    M: list[float] = field(default_factory=lambda: [1.0])
    omega: list[float] = field(default_factory=list)
    hstar0: list[float] = field(default_factory=list)
    kind: str = "iterative"
    dr: float = 0.01
    max_iter: int = 20
    tol_g: float = 1e-6
    tol_h0: float = 1e-6
    out: Path = Path("dkgwaves_output")
    plot: str = "png"
    energy_scale: str = "auto"
    reference_nld: bool = False
    workers: int | None = None
    threshold: float = 1e-3
    path: Path | None = None

    def validate(self) -> "RunConfig":
        c = self.command
        if self.n not in (1, 3):
            raise ConfigError(f"--n must be 1 or 3, got {self.n}")
        if self.dr <= 0 or self.m <= 0:
            raise ConfigError("--dr and --m must be positive")
        if self.max_iter < 1:
            raise ConfigError("--max-iter must be at least 1")
        if any(M < 0 for M in self.M):
            raise ConfigError("--M must be non-negative")
        if c in ("nld", "dkg-iter") or (c == "sweep" and self.kind in ("iterative", "nld")):
            if not self.omega:
                raise ConfigError("give --omega or --omega-range")
            bad = [w for w in self.omega if not 0 < w < self.m]
            if bad:
                raise ConfigError(f"omega must lie in (0, m), got {bad}")
        if c in ("nld", "dkg-iter") and len(self.omega) != 1:
            raise ConfigError(f"{c} solves a single frequency")
        if (c == "dkg-iter" or (c == "sweep" and self.kind == "iterative")) and self.n == 1 \
                and any(M == 0 for M in self.M):
            raise ConfigError("M = 0 is only supported in 3D")
        if c == "dkg-iter" and len(self.M) != 1:
            raise ConfigError("dkg-iter takes a single --M")
        if c == "dkg-shoot" or (c == "sweep" and self.kind == "shooting"):
            if self.n != 3:
                raise ConfigError("massless shooting is only implemented in 3D")
            if not self.hstar0:
                raise ConfigError("give --hstar0")
            if any(h <= -1 for h in self.hstar0):
                raise ConfigError("h*(0) must exceed -1")
        if c == "dkg-shoot" and len(self.hstar0) != 1:
            raise ConfigError("dkg-shoot takes a single --hstar0 (use sweep for lists)")
        if c == "check" and self.path is None:
            raise ConfigError("check needs a path")
        if self.plot not in ("png", "svg", "none"):
            raise ConfigError(f"--plot must be png, svg or none, got {self.plot}")
        return self


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def _range(text: str) -> list[float]:
    parts = _floats(str(text).replace(":", ","))
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise ConfigError(f"--omega-range needs start:stop:step, got {text!r}")
    return omega_range(*parts)


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


CONVERTERS = {
    "n": int, "m": float, "M": _floats, "omega": _floats, "omega_range": _range,
    "hstar0": _floats, "kind": str, "dr": float, "max_iter": int,
    "tol_g": float, "tol_h0": float, "out": str, "plot": str, "energy_scale": str,
    "reference_nld": _bool, "workers": int, "threshold": float,
}


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for number, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONVERTERS:
            raise ConfigError(f"{path}:{number}: unknown key {key!r}")
        values[key] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dkgwaves", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, physics=True):
        p.add_argument("--config", help="key = value file with option defaults")
        p.add_argument("--out", help="output directory")
        p.add_argument("--plot", choices=("png", "svg", "none"), help="figure format")
        p.add_argument("-v", "--verbose", action="store_true")
        if physics:
            p.add_argument("--n", type=int, help="spatial dimension (1 or 3)")
            p.add_argument("--m", type=float, help="spinor mass")
            p.add_argument("--dr", type=float, help="grid step")

    p = sub.add_parser("nld", help="cubic Dirac ground state")
    common(p)
    p.add_argument("--omega")

    p = sub.add_parser("dkg-iter", help="iterative Dirac-Klein-Gordon solve")
    common(p)
    p.add_argument("--omega")
    p.add_argument("--M", help="boson mass")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--tol-g", type=float)
    p.add_argument("--tol-h0", type=float)

    p = sub.add_parser("dkg-shoot", help="massless-boson shooting solve (3D)")
    common(p)
    p.add_argument("--hstar0", help="prescribed h*(0)")

    p = sub.add_parser("sweep", help="family of solves over omega or h*(0)")
    common(p)
    p.add_argument("--kind", choices=("iterative", "nld", "shooting"))
    p.add_argument("--omega", help="comma-separated frequencies")
    p.add_argument("--omega-range", help="start:stop:step (inclusive)")
    p.add_argument("--M", help="comma-separated boson masses")
    p.add_argument("--hstar0", help="comma-separated h*(0) values, or 'table'")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--energy-scale", choices=("auto", "unit", "boson-mass"),
                   help="plot E and Q at unit coupling or at g = M^2 (auto: boson-mass if all M > 0)")
    p.add_argument("--reference-nld", action="store_const", const="true",
                   help="add the cubic Dirac curve to iterative plots")
    p.add_argument("--workers", type=int, help="process count (default: DKGWAVES_WORKERS or 1)")

    p = sub.add_parser("check", help="identity suite on a stored wave")
    common(p, physics=False)
    p.add_argument("path", help="wave record (.json) written by nld, dkg-iter or dkg-shoot")
    p.add_argument("--threshold", type=float, help="largest accepted relative residual")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    for key in CONVERTERS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if merged.get("hstar0") == "table":
        merged["hstar0"] = ",".join(map(str, SHOOTING_HSTAR0))
    values = {}
    for key, value in merged.items():
        if value is None or key in ("omega", "omega_range"):
            continue
        values[key] = CONVERTERS[key](value) if isinstance(value, str) else value
    if isinstance(values.get("M"), (int, float)):
        values["M"] = [float(values["M"])]
    if merged.get("omega_range") is not None and getattr(args, "omega", None) is None:
        values["omega"] = CONVERTERS["omega_range"](merged["omega_range"])
    elif merged.get("omega") is not None:
        values["omega"] = CONVERTERS["omega"](merged["omega"])
    values.pop("omega_range", None)
    try:
        cfg = RunConfig(command=args.command, **values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    cfg.out = Path(cfg.out)
    if args.command == "check":
        cfg.path = Path(args.path)
    return cfg.validate()


def _metadata(cfg: RunConfig, **extra) -> dict:
    tolerances = {"ode_abs": ODE_TOL, "ode_rel": ODE_TOL, "g": cfg.tol_g, "h0": cfg.tol_h0}
    return {"config": asdict(cfg), "tolerances": tolerances, **extra}


def _print_obs(obs: observables.Observables, out=sys.stdout):
    print(f"Q = {obs.Q:.9g}  E = {obs.E:.9g}  K = {obs.K:.9g}  N = {obs.N:.9g}  V = {obs.V:.9g}"
          f"  T = {obs.T:.9g}  W = {obs.W:.9g}", file=out)
    print(f"eps = {obs.epsilon:.3e}  ({obs.epsilon_mode}, relative {obs.relative_epsilon:.3e})",
          file=out)


def _maybe_plot_profile(cfg: RunConfig, wave, stem: str):
    if cfg.plot != "none":
        from .plotting import plot_profile
        path = plot_profile(cfg.out / f"{stem}_profile.{cfg.plot}", wave)
        print(f"figure: {path}")


def cmd_nld(cfg: RunConfig) -> int:
    sol = solve_nld(cfg.n, cfg.omega[0], cfg.m, cfg.dr)
    obs = nld_observables(sol)
    print(f"v(0) = {sol.v0:.9f}")
    _print_obs(obs)
    wave = sol.to_wave()
    stem = f"nld_n{cfg.n}_w{cfg.omega[0]:g}"
    path = formats.save_wave(cfg.out, stem, wave, _metadata(cfg, observables=obs.as_dict()))
    _maybe_plot_profile(cfg, wave, stem)
    print(f"wave: {path}")
    return 0


def cmd_dkg_iter(cfg: RunConfig) -> int:
    M = cfg.M[0]
    wave = iterate(cfg.n, cfg.omega[0], cfg.m, M, cfg.dr, cfg.max_iter, cfg.tol_g, cfg.tol_h0)
    header = ("iter", "g", "v(0)", "h(0)", "Q", "E", "Qt", "Et", "eps")
    print("".join(f"{h:>14}" for h in header))
    for row in wave.trace:
        values = (row.g, row.v0, row.h0, row.Q, row.E, row.Qt, row.Et, row.eps)
        print(f"{row.iter:>14d}" + "".join(f"{x:>14.6f}" for x in values))
    if not wave.converged:
        print(f"warning: not converged after {cfg.max_iter} iterations", file=sys.stderr)
    stem = f"dkg_n{cfg.n}_M{M:g}_w{cfg.omega[0]:g}"
    formats.write_trace(cfg.out / f"{stem}_trace.csv", wave.trace)
    unit = gauge_normalize(wave)
    obs = observables.compute(unit)
    path = formats.save_wave(cfg.out, stem, unit, _metadata(cfg, observables=obs.as_dict()))
    _maybe_plot_profile(cfg, unit, stem)
    print(f"wave: {path}")
    return 0 if wave.converged else 1


SHOOT_HEADER = ("h*(0)", "v(0)", "mu", "v~(0)", "omega~", "Q~", "V~", "E~", "eps~/(w~Q~)")


def _shoot_line(h_star0, v0, mu, tv0, tw, Q, V, E, rel) -> str:
    return (f"{h_star0:>8g}" + "".join(f"{x:>12.6f}" for x in (v0, mu, tv0, tw))
            + "".join(f"{x:>14.6f}" for x in (Q, V, E)) + f"{rel:>14.2e}")


def cmd_dkg_shoot(cfg: RunConfig) -> int:
    h_star0 = cfg.hstar0[0]
    sol = solve_massless(h_star0, cfg.dr)
    o = sol.obs
    print(f"{SHOOT_HEADER[0]:>8}" + "".join(f"{h:>12}" for h in SHOOT_HEADER[1:5])
          + "".join(f"{h:>14}" for h in SHOOT_HEADER[5:]))
    print(_shoot_line(h_star0, sol.raw.v0, sol.mu, sol.tilde_v0, sol.tilde_omega, o.Q, o.V, o.E,
                      o.relative_epsilon))
    wave = sol.to_wave()
    stem = f"shoot_h{h_star0:g}"
    path = formats.save_wave(cfg.out, stem, wave, _metadata(cfg, observables=o.as_dict()))
    _maybe_plot_profile(cfg, wave, stem)
    print(f"wave: {path}")
    return 0


def _energy_scale(cfg: RunConfig) -> str:
    if cfg.energy_scale != "auto":
        return cfg.energy_scale
    return "boson-mass" if all(M > 0 for M in cfg.M) else "unit"


def _scaled_curve(table: SweepTable, factor: float):
    return table.column("omega"), table.column("Et") * factor, table.column("Qt") * factor


def cmd_sweep(cfg: RunConfig) -> int:
    out = cfg.out
    curves_E, curves_Q = {}, {}
    failures = 0
    records = {}
    if cfg.kind == "shooting":
        table = sweep_shooting(cfg.hstar0, cfg.dr, cfg.workers)
        formats.write_sweep(out / "sweep_shooting.csv", table)
        print(f"{SHOOT_HEADER[0]:>8}" + "".join(f"{h:>12}" for h in SHOOT_HEADER[1:5])
              + "".join(f"{h:>14}" for h in SHOOT_HEADER[5:]))
        for row in sorted(table.rows, key=lambda r: r.h_star0):
            if row.ok:
                print(_shoot_line(row.h_star0, row.v0, row.coupling, row.tilde_v0, row.omega,
                                  row.Qt, row.Vt, row.Et, row.rel_eps))
            else:
                failures += 1
                print(f"{row.h_star0:>8g}  {row.status}")
        formats.write_plot_data(out, table, "M0_shooting")
        curves_E["M=0 (shooting)"] = (table.column("omega"), table.column("Et"))
        curves_Q["M=0 (shooting)"] = (table.column("omega"), table.column("Qt"))
        scale = "unit"
    else:
        scale = _energy_scale(cfg)
        tables = []
        if cfg.kind == "nld" or cfg.reference_nld:
            tables.append(("NLD", "nld", sweep_nld(cfg.n, cfg.omega, cfg.dr, cfg.m, cfg.workers), 1.0))
        if cfg.kind == "iterative":
            for M in cfg.M:
                table = sweep_iterative(cfg.n, M, cfg.omega, cfg.dr, cfg.m, cfg.max_iter, cfg.workers)
                factor = 1.0 / (M * M) if scale == "boson-mass" else 1.0
                tables.append((f"M={M:g}", f"M{M:g}", table, factor))
        for label, tag, table, factor in tables:
            formats.write_sweep(out / f"sweep_n{cfg.n}_{tag}.csv", table)
            w, E, Q = _scaled_curve(table, factor)
            formats.write_curve(out / f"E_{tag}.csv", w, E, ("omega", "E"))
            formats.write_curve(out / f"Q_{tag}.csv", w, Q, ("omega", "Q"))
            curves_E[label], curves_Q[label] = (w, E), (w, Q)
            print(f"# {label}")
            print(f"{'omega':>10}{'g':>14}{'Q~':>14}{'E~':>14}{'eps/E':>12}{'iter':>6}  status")
            for row in table.rows:
                failures += not row.ok
                print(f"{row.omega:>10.4f}{row.coupling:>14.6f}{row.Qt:>14.6f}{row.Et:>14.6f}"
                      f"{row.rel_eps:>12.2e}{row.iterations:>6d}  {row.status}")
            summary = {}
            try:
                summary["omega_star"], summary["E_min"] = find_energy_minimum(table)
                print(f"energy minimum: omega* = {summary['omega_star']:.5f}")
            except DkgError as exc:
                log.info("%s: %s", label, exc)
            try:
                summary["dE_dQ_violation"] = dE_dQ_consistency(table)
                print(f"dE/domega vs omega dQ/domega: {summary['dE_dQ_violation']:.2e}")
            except ValueError as exc:
                log.info("%s: %s", label, exc)
            records[label] = summary
    if cfg.plot != "none" and curves_E:
        from .plotting import plot_curves
        suffix = " (g = M^2)" if scale == "boson-mass" else ""
        for name, curves in (("E", curves_E), ("Q", curves_Q)):
            path = plot_curves(out / f"{name}_omega.{cfg.plot}", curves, ylabel=name + suffix)
            print(f"figure: {path}")
    formats.write_metadata(out / "sweep.json", _metadata(cfg, energy_scale_used=scale,
                                                         summaries=records, failures=failures))
    return 1 if failures else 0


def cmd_check(cfg: RunConfig) -> int:
    wave = formats.load_wave(cfg.path)
    obs = observables.compute(wave)
    _print_obs(obs)
    worst = 0.0
    for check in observables.identity_suite(wave, obs):
        worst = max(worst, abs(check.relative))
        print(f"{check.name:<24}{check.residual:>14.3e}{check.relative:>14.3e}")
    positive = observables.lemma_positivity(obs)
    print(f"K > 0 and E > 0: {'yes' if positive else 'NO'}")
    ok = worst < cfg.threshold and positive and wave.positive_center_density()
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


COMMANDS = {"nld": cmd_nld, "dkg-iter": cmd_dkg_iter, "dkg-shoot": cmd_dkg_shoot,
            "sweep": cmd_sweep, "check": cmd_check}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, DomainError, ResolutionError) as exc:
        print(f"dkgwaves: configuration error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"dkgwaves: solver failure: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"dkgwaves: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
