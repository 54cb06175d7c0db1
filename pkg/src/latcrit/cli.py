"""Command-line front end.

Subcommands: critdet, locus, spectrum, orbit, verify.  A key=value config
file supplies defaults that explicit flags override.  Identical config and
seed produce byte-identical artifacts: CSV floats use 17 significant digits,
JSON is emitted with sorted keys, and batch results are ordered by input
index regardless of worker completion order.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernels import BACKEND
from .critical2d import critical_determinant, critical_locus_2d
from .cylinder import CriticalLatticeDesc, Piece, classify_z, realize_critical
from .dirichlet import as_xpair, dirichlet_constant, parse_x
from .errors import LatcritError, NormSpecError
from .norms import CylinderGauge, parse_norm_spec
from .orbitflow import orbit_min_gauge
from .verify import run_battery

_COMMANDS = ("critdet", "locus", "spectrum", "orbit", "verify")


@dataclass
class RunConfig:
    command: str
    norm_spec: str | None = None
    grid_n: int = 512
    q_max: int = 10 ** 6
    s_max: float = 20.0
    s_step: float = 0.05
    samples: int = 10
    seed: int = 0
    threads: int = 1
    x: str | None = None
    piece: str | None = None
    shear: str | None = None
    normalize: bool = False
    theorem: str = "all"
    n: int | None = None
    output: str | None = None
    output_path: str | None = None
    # keys set by a flag or config file, as opposed to defaulted; verify
    # forwards only these as battery overrides
    explicit: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.command not in _COMMANDS:
            raise NormSpecError(f"unknown command {self.command!r}")
        for key in ("grid_n", "q_max", "samples", "threads"):
            if getattr(self, key) < 1:
                raise NormSpecError(f"{key} must be positive, got {getattr(self, key)}")
        for key in ("s_max", "s_step"):
            if getattr(self, key) <= 0.0:
                raise NormSpecError(f"{key} must be positive, got {getattr(self, key)}")
        if self.seed < 0:
            raise NormSpecError(f"seed must be nonnegative, got {self.seed}")
        if self.n is not None and self.n < 1:
            raise NormSpecError(f"n must be positive, got {self.n}")
        if self.output not in (None, "csv", "json"):
            raise NormSpecError(f"output must be csv or json, got {self.output!r}")


# -- emission -----------------------------------------------------------------


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _emit_csv(header, rows, path) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt_cell(c) for c in row) for row in rows)
    _write("\n".join(lines) + "\n", path)


def _emit_json(obj, path) -> None:
    _write(json.dumps(obj, indent=2, sort_keys=True) + "\n", path)


# -- config file --------------------------------------------------------------

_CONFIG_CASTS = {
    "norm": str, "grid": int, "qmax": int, "smax": float, "step": float,
    "samples": int, "seed": int, "threads": int, "x": str, "piece": str,
    "shear": str, "normalize": None, "theorem": str, "n": int,
    "output": str, "out": str,
}


def _read_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as e:
        raise NormSpecError(f"cannot read config file {path}: {e}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise NormSpecError(f"{path}:{lineno}: expected key=value, "
                                f"got {raw.strip()!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_CASTS:
            raise NormSpecError(f"{path}:{lineno}: unknown key {key!r}")
        cast = _CONFIG_CASTS[key]
        if cast is None:
            out[key] = val.lower() in ("1", "true", "yes", "on")
        else:
            try:
                out[key] = cast(val)
            except ValueError:
                raise NormSpecError(f"{path}:{lineno}: bad value {val!r} "
                                    f"for {key}") from None
    return out


def _pick(args, cfg: dict, flag: str, default, explicit: set):
    v = getattr(args, flag, None)
    if v is not None:
        explicit.add(flag)
        return v
    if flag in cfg:
        explicit.add(flag)
        return cfg[flag]
    return default


def _resolve_threads(args, cfg: dict, explicit: set) -> int:
    v = _pick(args, cfg, "threads", None, explicit)
    if v is not None:
        return int(v)
    env = os.environ.get("LATCRIT_THREADS")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise NormSpecError(f"LATCRIT_THREADS must be an integer, "
                                f"got {env!r}") from None
    return 1


def build_config(args) -> RunConfig:
    cfg = _read_config_file(args.config) if getattr(args, "config", None) else {}
    explicit: set = set()
    return RunConfig(
        command=args.command,
        norm_spec=_pick(args, cfg, "norm", None, explicit),
        grid_n=_pick(args, cfg, "grid", 512, explicit),
        q_max=_pick(args, cfg, "qmax", 10 ** 6, explicit),
        s_max=_pick(args, cfg, "smax", 20.0, explicit),
        s_step=_pick(args, cfg, "step", 0.05, explicit),
        samples=_pick(args, cfg, "samples", 10, explicit),
        seed=_pick(args, cfg, "seed", 0, explicit),
        threads=_resolve_threads(args, cfg, explicit),
        x=_pick(args, cfg, "x", None, explicit),
        piece=_pick(args, cfg, "piece", None, explicit),
        shear=_pick(args, cfg, "shear", None, explicit),
        normalize=bool(_pick(args, cfg, "normalize", False, explicit)),
        theorem=_pick(args, cfg, "theorem", "all", explicit),
        n=_pick(args, cfg, "n", None, explicit),
        output=_pick(args, cfg, "output", None, explicit),
        output_path=_pick(args, cfg, "out", None, explicit),
        explicit=frozenset(explicit),
    )


# -- subcommand handlers -------------------------------------------------------


def _need_norm(cfg: RunConfig) -> str:
    return cfg.norm_spec if cfg.norm_spec is not None else "euclidean"


def _run_critdet(cfg: RunConfig) -> int:
    domain = parse_norm_spec(_need_norm(cfg))
    delta = critical_determinant(domain, grid_n=cfg.grid_n)
    if (cfg.output or "json") == "csv":
        _emit_csv(["norm", "grid_n", "delta"],
                  [[_need_norm(cfg), cfg.grid_n, delta]], cfg.output_path)
    else:
        _emit_json({"command": "critdet", "norm": _need_norm(cfg),
                    "grid_n": cfg.grid_n, "delta": delta,
                    "backend": BACKEND}, cfg.output_path)
    return 0


def _parse_shear(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise NormSpecError(f"shear must be 'a,b', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise NormSpecError(f"bad shear component in {text!r}") from None


def _run_locus(cfg: RunConfig) -> int:
    if cfg.piece not in ("upper", "lower"):
        raise NormSpecError(f"--piece must be upper or lower, got {cfg.piece!r}")
    if cfg.shear is None:
        raise NormSpecError("locus requires --shear a,b")
    shear = _parse_shear(cfg.shear)
    domain = parse_norm_spec(_need_norm(cfg))
    delta = critical_determinant(domain, grid_n=cfg.grid_n)
    planar = critical_locus_2d(domain, n_samples=1, grid_n=cfg.grid_n)[0]
    piece = Piece.UpperShear if cfg.piece == "upper" else Piece.LowerShear
    desc = CriticalLatticeDesc(piece, planar.basis, shear, normalize=cfg.normalize)
    lat = realize_critical(desc, domain, delta=delta)
    z_class = classify_z(lat).value
    if (cfg.output or "json") == "csv":
        rows = [[i] + [float(v) for v in lat.basis[i]] for i in range(3)]
        _emit_csv(["row", "b1", "b2", "b3"], rows, cfg.output_path)
    else:
        _emit_json({"command": "locus", "norm": _need_norm(cfg),
                    "piece": cfg.piece, "shear": list(shear),
                    "normalize": cfg.normalize, "delta": delta,
                    "basis": [list(map(float, row)) for row in lat.basis],
                    "covolume": lat.covolume, "z_class": z_class},
                   cfg.output_path)
    return 0


def _run_spectrum(cfg: RunConfig) -> int:
    domain = parse_norm_spec(_need_norm(cfg))
    if cfg.x is not None:
        xs = [parse_x(cfg.x)]
    else:
        rng = np.random.default_rng([31, cfg.seed])
        xs = [as_xpair(rng.random(2)) for _ in range(cfg.samples)]

    def one(xp):
        est = dirichlet_constant(xp, domain, cfg.q_max)
        return [xp.x1, xp.x2, est.c_estimate]

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            rows = list(ex.map(one, xs))
    else:
        rows = [one(x) for x in xs]
    if (cfg.output or "csv") == "json":
        _emit_json({"command": "spectrum", "norm": _need_norm(cfg),
                    "q_max": cfg.q_max, "seed": cfg.seed,
                    "rows": [{"x1": r[0], "x2": r[1], "c_estimate": r[2]}
                             for r in rows]}, cfg.output_path)
    else:
        _emit_csv(["x1", "x2", "c_estimate"], rows, cfg.output_path)
    return 0


def _run_orbit(cfg: RunConfig) -> int:
    if cfg.x is None:
        raise NormSpecError("orbit requires --x")
    x = parse_x(cfg.x)
    domain = parse_norm_spec(_need_norm(cfg))
    gauge = CylinderGauge(domain)
    n = int(np.floor(cfg.s_max / cfg.s_step + 1e-9))
    grid = [i * cfg.s_step for i in range(n + 1)]
    samples = orbit_min_gauge(x, gauge, grid)
    if (cfg.output or "csv") == "json":
        _emit_json({"command": "orbit", "norm": _need_norm(cfg),
                    "x": [x.x1, x.x2],
                    "samples": [{"s": s.s, "lambda1": s.lambda1}
                                for s in samples]}, cfg.output_path)
    else:
        _emit_csv(["s", "lambda1"], [[s.s, s.lambda1] for s in samples],
                  cfg.output_path)
    return 0


def _run_verify(cfg: RunConfig) -> int:
    params = {"seed": cfg.seed, "threads": cfg.threads}
    if cfg.n is not None:
        params["n"] = cfg.n
        params["n_starts"] = cfg.n
    if cfg.norm_spec is not None:
        params["norm_specs"] = (cfg.norm_spec,)
    if "qmax" in cfg.explicit:
        params["q_max"] = cfg.q_max
    if "smax" in cfg.explicit:
        params["s_max"] = cfg.s_max
        params["s_hi"] = cfg.s_max
    if "step" in cfg.explicit:
        params["s_step"] = cfg.s_step
    results = run_battery(cfg.theorem, **params)
    lines = [f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}"
             for r in results]
    ok = all(r.passed for r in results)
    lines.append(f"{'OK' if ok else 'FAILED'}: {sum(r.passed for r in results)}"
                 f"/{len(results)} checks passed")
    if cfg.output_path is not None:
        if (cfg.output or "json") == "csv":
            # detail strings may contain commas; keep the cells comma-free
            _emit_csv(["name", "passed", "detail"],
                      [[r.name, int(r.passed), r.detail.replace(",", ";")]
                       for r in results], cfg.output_path)
        else:
            _emit_json({"command": "verify", "theorem": cfg.theorem,
                        "checks": [{"name": r.name, "passed": r.passed,
                                    "detail": r.detail} for r in results],
                        "passed": ok}, cfg.output_path)
    sys.stdout.write("\n".join(lines) + "\n")
    return 0 if ok else 1


_HANDLERS = {
    "critdet": _run_critdet,
    "locus": _run_locus,
    "spectrum": _run_spectrum,
    "orbit": _run_orbit,
    "verify": _run_verify,
}


def run(config: RunConfig) -> int:
    """Dispatch a validated config; returns the process exit code."""
    return _HANDLERS[config.command](config)


# -- argument parsing ----------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--norm", dest="norm", help="norm spec, e.g. euclidean, sup, "
                   "p:4, poly:[...], lin:[a,b;c,d]:<spec>")
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--output", choices=("csv", "json"), dest="output")
    p.add_argument("--out", dest="out", help="output path (default stdout)")
    p.add_argument("--seed", type=int, dest="seed")
    p.add_argument("--threads", type=int, dest="threads",
                   help="worker pool size (env LATCRIT_THREADS as fallback)")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="latcrit",
        description="Critical determinants, critical loci, and Dirichlet "
                    "constants of planar gauges and their cylinders.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("critdet", help="critical determinant of a planar domain")
    _add_common(p)
    p.add_argument("--grid", type=int, dest="grid", help="angular grid size")

    p = sub.add_parser("locus", help="realize a critical lattice of the cylinder")
    _add_common(p)
    p.add_argument("--grid", type=int, dest="grid")
    p.add_argument("--piece", choices=("upper", "lower"), dest="piece")
    p.add_argument("--shear", dest="shear", help="shear parameters 'a,b'")
    p.add_argument("--normalize", action="store_true", default=None,
                   help="scale to unit covolume")

    p = sub.add_parser("spectrum", help="sample Dirichlet constants")
    _add_common(p)
    p.add_argument("--samples", type=int, dest="samples")
    p.add_argument("--qmax", type=int, dest="qmax")
    p.add_argument("--x", dest="x", help="explicit target 'a,b' "
                   "(decimals, fractions, cbrt:/sqrt: tokens)")

    p = sub.add_parser("orbit", help="shortest-gauge series along the flow")
    _add_common(p)
    p.add_argument("--x", dest="x")
    p.add_argument("--smax", type=float, dest="smax")
    p.add_argument("--step", type=float, dest="step")

    p = sub.add_parser("verify", help="run an invariant battery")
    _add_common(p)
    p.add_argument("--theorem", dest="theorem",
                   help="battery name or 'all' (default)")
    p.add_argument("--n", type=int, dest="n", help="sample count override")
    p.add_argument("--qmax", type=int, dest="qmax")
    p.add_argument("--smax", type=float, dest="smax")
    p.add_argument("--step", type=float, dest="step")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return run(build_config(args))
    except LatcritError as e:
        print(f"latcrit error: {e}", file=sys.stderr)
        return e.exit_code
    except FileNotFoundError as e:
        print(f"latcrit error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
