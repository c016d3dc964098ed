"""
Command-line entry point.

    cayleywalk dispersion --group Z2^100 --coin grover --out out/
    cayleywalk evolve --group line --coin hadamard --init symmetric --t 100
    cayleywalk hitting one-shot --group Z2^10 --p auto-peak
    cayleywalk hitting gv --group Z2^100 --from 0 --to ones
    cayleywalk compare --family hypercube --sizes 4,6,8,10,12

Exit codes: 0 success, 2 a hitting threshold was not reached, 1 error.
"""

from __future__ import annotations

import argparse
import ast
import csv
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import export
from .group import GeneratorSet, GroupSpec, graph_distance, parse_generators, parse_group
from .hitting import (
    average,
    concurrent,
    default_coin_state,
    measured_arrival_curve,
    one_shot,
)
from .kinematics import gv_hitting_time, velocity_profile
from .spectral import dispersion_table, spectral_evolve
from .walk import (
    Coin,
    evolve,
    grover_coin,
    hadamard_coin,
    identity_coin,
    point_state,
    random_coin,
    uniform_coin_vector,
)

log = logging.getLogger("cayleywalk")

EXIT_OK, EXIT_ERROR, EXIT_UNREACHED = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    group: str = "Z2^4"
    gens: str = "unit"
    coin: str = "grover"
    init: str = "symmetric"
    t: list[int] = field(default_factory=lambda: [10])
    tmax: int | None = None
    p: str = "auto-peak"
    grid: int = 1025
    from_: str = "0"
    to: str = "ones"
    out: str = "."
    seed: int = 0
    definition: str | None = None
    family: str = "hypercube"
    sizes: list[int] = field(default_factory=list)
    workers: int = 1
    check_spectral: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def build(self) -> tuple[GroupSpec, GeneratorSet, Coin]:
        try:
            spec = parse_group(self.group)
        except ValueError as exc:
            raise ConfigError(f"--group: {exc}") from exc
        try:
            gens = parse_generators(self.gens, spec)
        except ValueError as exc:
            raise ConfigError(f"--gens: {exc}") from exc
        return spec, gens, parse_coin(self.coin, len(gens), self.seed)


def _literal(text: str, flag: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError) as exc:
        col = getattr(exc, "offset", None) or 1
        raise ConfigError(f"{flag} {text!r}, column {col}: {exc.__class__.__name__}") from exc


def parse_coin(text: str, d: int, seed: int = 0) -> Coin:
    name = text.strip().lower()
    if name == "grover":
        return grover_coin(d)
    if name == "hadamard":
        if d != 2:
            raise ConfigError(f"--coin hadamard needs |S| = 2, generating set has {d}")
        return hadamard_coin()
    if name == "identity":
        return identity_coin(d)
    if name == "random":
        return random_coin(d, seed)
    m = np.array(_literal(text, "--coin"), dtype=complex)
    if m.shape != (d, d):
        raise ConfigError(f"--coin matrix has shape {m.shape}, expected ({d}, {d})")
    try:
        return Coin(m, "custom")
    except ValueError as exc:
        raise ConfigError(f"--coin: {exc}") from exc


def parse_init(text: str, spec: GroupSpec, gens: GeneratorSet) -> np.ndarray:
    """``symmetric``, ``corner-symmetric``/``uniform``, ``basis:J`` or an inline vector."""
    name = text.strip().lower()
    if name == "symmetric":
        return default_coin_state(spec, gens)
    if name in ("corner-symmetric", "uniform"):
        return uniform_coin_vector(len(gens))
    if name.startswith("basis:"):
        j = int(name.split(":", 1)[1])
        if not 0 <= j < len(gens):
            raise ConfigError(f"--init basis index {j} out of range for |S| = {len(gens)}")
        v = np.zeros(len(gens), dtype=complex)
        v[j] = 1.0
        return v
    v = np.atleast_1d(np.array(_literal(text, "--init"), dtype=complex))
    if v.shape != (len(gens),):
        raise ConfigError(f"--init vector has {v.size} entries, expected {len(gens)}")
    if abs(np.linalg.norm(v) - 1) > 1e-10:
        raise ConfigError(f"--init vector must have unit norm, got {np.linalg.norm(v):.6g}")
    return v


def parse_vertex(text: str, spec: GroupSpec) -> tuple[int, ...]:
    """``0`` (identity), ``ones``, or a comma tuple such as ``1,0,1``."""
    s = text.strip().lower()
    if s == "ones":
        if spec.is_line:
            return (1,)
        return spec.ones()
    try:
        comps = tuple(int(c) for c in s.strip("()").split(","))
    except ValueError as exc:
        raise ConfigError(f"vertex {text!r}: expected 0, ones or a comma tuple") from exc
    if comps == (0,):
        return spec.identity
    if len(comps) != spec.rank:
        raise ConfigError(f"vertex {text!r} has {len(comps)} components, group has rank {spec.rank}")
    return spec.element(comps)


def _out(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_dispersion(cfg: ExperimentConfig) -> int:
    spec, gens, coin = cfg.build()
    table = dispersion_table(coin, spec, gens, grid=cfg.grid)
    profile = velocity_profile(table)
    out = _out(cfg)
    export.write_dispersion_csv(out / "dispersion.csv", table, profile)
    summary = {
        "v_g_max": profile.v_g_max,
        "argmax_wave_number": profile.argmax_wave_number,
        "branch": profile.argmax_branch,
        "velocity_method": profile.method,
        "table_kind": table.kind,
        "meta": table.meta,
        "config": cfg.to_dict(),
    }
    if not spec.is_line and cfg.to:
        res = gv_hitting_time(parse_vertex(cfg.from_, spec), parse_vertex(cfg.to, spec),
                              coin, spec, gens, profile=profile)
        summary["distance"] = res.distance
        summary["gv_hitting_time"] = res.hitting_time
    export.write_json(out / "velocity_summary.json", summary)
    log.info("v_g_max = %.12g at wave number %s", profile.v_g_max, profile.argmax_wave_number)
    return EXIT_OK


def cmd_evolve(cfg: ExperimentConfig) -> int:
    spec, gens, coin = cfg.build()
    phi = parse_init(cfg.init, spec, gens)
    start = parse_vertex(cfg.from_, spec)
    times = sorted(set(int(t) for t in cfg.t))
    if any(t < 0 for t in times):
        raise ConfigError("--t values must be >= 0")
    horizon = times[-1] if times else 0
    state = point_state(spec, gens, phi, start, horizon)
    initial = state
    out = _out(cfg)
    summary: dict = {"config": cfg.to_dict(), "files": []}
    for t in times:
        state = evolve(state, coin, t - state.time)
        path = export.write_distribution_csv(out / f"distribution_t{t}.csv", state)
        summary["files"].append(path.name)
        if cfg.check_spectral:
            ref = spectral_evolve(initial, coin, t)
            diff = float(np.max(np.abs(ref.amplitudes - state.amplitudes)))
            summary.setdefault("spectral_max_abs_diff", {})[str(t)] = diff
    export.write_json(out / "evolve_summary.json", summary)
    return EXIT_OK


def _default_tmax(cfg: ExperimentConfig, distance: int) -> int:
    return cfg.tmax if cfg.tmax is not None else max(2 * distance, 10)


def cmd_hitting(cfg: ExperimentConfig) -> int:
    spec, gens, coin = cfg.build()
    g1, g2 = parse_vertex(cfg.from_, spec), parse_vertex(cfg.to, spec)
    definition = cfg.definition
    out = _out(cfg)
    if definition == "gv":
        res = gv_hitting_time(g1, g2, coin, spec, gens, grid=cfg.grid)
        payload = {
            "definition": "gv",
            "value": res.hitting_time,
            "reached": math.isfinite(res.hitting_time),
            "distance": res.distance,
            "v_g_max": res.v_g_max,
            "config": cfg.to_dict(),
        }
        export.write_json(out / "hitting_gv.json", payload)
        return EXIT_OK if payload["reached"] else EXIT_UNREACHED
    phi = parse_init(cfg.init, spec, gens)
    tmax = _default_tmax(cfg, graph_distance(g1, g2, gens))
    if definition == "one-shot":
        p = cfg.p if cfg.p == "auto-peak" else float(cfg.p)
        result = one_shot(g1, g2, coin, spec, gens, phi, p, tmax)
    elif definition == "concurrent":
        p = 0.5 if cfg.p == "auto-peak" else float(cfg.p)
        result = concurrent(g1, g2, coin, spec, gens, phi, p, tmax)
    elif definition == "average":
        result = average(g1, g2, coin, spec, gens, phi, tmax)
    else:
        raise ConfigError(f"unknown hitting definition {definition!r}")
    payload = result.to_dict()
    payload["config"] = cfg.to_dict()
    export.write_json(out / f"hitting_{definition}.json", payload)
    export.write_arrival_csv(out / f"arrival_{definition}.csv", result.curve)
    if definition == "average":
        return EXIT_OK
    return EXIT_OK if result.reached else EXIT_UNREACHED


COMPARE_HEADER = [
    "family", "size", "distance", "one_shot_time", "one_shot_p",
    "concurrent_cumulative", "average_partial", "average_residual",
    "gv_time", "gv_over_one_shot",
]


def compare_row(family: str, size: int, tmax: int | None, measured_tmax: int) -> list:
    """One instance of the sweep: hypercube dimension or line distance."""
    if family == "hypercube":
        spec = GroupSpec.hypercube(size)
        target = spec.ones()
    elif family == "line":
        spec = GroupSpec.line()
        target = (size,)
    else:
        raise ConfigError(f"unknown family {family!r}")
    gens = parse_generators("unit", spec)
    coin = grover_coin(len(gens)) if family == "hypercube" else hadamard_coin()
    g1 = spec.identity
    d = graph_distance(g1, target, gens)
    horizon = tmax if tmax is not None else max(2 * d, 10)
    os_res = one_shot(g1, target, coin, spec, gens, None, "auto-peak", horizon)
    T = os_res.value
    curve, _ = measured_arrival_curve(g1, target, coin, spec, gens, None, max(T, 1))
    conc = float(curve.cumulative[-1])
    avg = average(g1, target, coin, spec, gens, None, measured_tmax)
    gv = gv_hitting_time(g1, target, coin, spec, gens).hitting_time
    return [family, size, d, T, os_res.parameters["threshold"], conc,
            avg.diagnostics["partial_sum"], avg.diagnostics["residual_mass"], gv, gv / T]


def _compare_task(args):
    return compare_row(*args)


def cmd_compare(cfg: ExperimentConfig) -> int:
    out = _out(cfg)
    measured_tmax = cfg.tmax if cfg.tmax is not None else 1000
    tasks = [(cfg.family, int(n), None, measured_tmax) for n in cfg.sizes]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_compare_task, tasks))
    else:
        rows = [_compare_task(t) for t in tasks]
    with (out / "compare.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPARE_HEADER)
        for r in rows:
            w.writerow([export._num(x) if isinstance(x, float) else x for x in r])
    export.write_json(out / "compare_summary.json", {"rows": len(rows), "config": cfg.to_dict()})
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cayleywalk", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, t_default=None):
        p.add_argument("--group", default="Z2^4")
        p.add_argument("--gens", default="unit")
        p.add_argument("--coin", default="grover")
        p.add_argument("--init", default="symmetric")
        p.add_argument("--from", dest="from_", default="0")
        p.add_argument("--to", default="ones")
        p.add_argument("--out", default=".")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--grid", type=int, default=1025)
        p.add_argument("--tmax", type=int, default=None)
        p.add_argument("--p", default="auto-peak")

    common(sub.add_parser("dispersion", help="dispersion and velocity tables"))
    ev = sub.add_parser("evolve", help="position distributions")
    common(ev)
    ev.add_argument("--t", type=_int_list, action="append", default=None,
                    help="time(s); repeat or give a comma list")
    ev.add_argument("--check-spectral", action="store_true")
    hit = sub.add_parser("hitting", help="hitting times")
    hit.add_argument("definition", choices=["one-shot", "concurrent", "average", "gv"])
    common(hit)
    cmp_ = sub.add_parser("compare", help="hitting-time sweep")
    common(cmp_)
    cmp_.add_argument("--family", choices=["hypercube", "line"], default="hypercube")
    cmp_.add_argument("--sizes", type=_int_list, default=[])
    cmp_.add_argument("--workers", type=int, default=1)
    return parser


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    d = {k: v for k, v in vars(ns).items() if k != "verbose"}
    if "t" in d:
        d["t"] = [x for chunk in (d["t"] or [[10]]) for x in chunk]
    return ExperimentConfig.from_dict(d)


COMMANDS = {
    "dispersion": cmd_dispersion,
    "evolve": cmd_evolve,
    "hitting": cmd_hitting,
    "compare": cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
