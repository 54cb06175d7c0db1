"""Invariant batteries shared by the CLI `verify` subcommand and the tests.

Each battery samples a property corroborated at desk scale: absence of
counterexamples, not proof.  Batteries return per-check results so callers
can print a report line per check and exit nonzero on any failure.
"""

from __future__ import annotations

import inspect
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .critical2d import critical_determinant, critical_locus_2d
from .cylinder import (CriticalLatticeDesc, Piece, ZClass, classify_z,
                       corroborate_delta_equality, realize_critical)
from .dirichlet import ba_pair_cubic, dirichlet_constant
from .errors import LatcritError
from .lattices import is_admissible
from .norms import CylinderGauge, parse_norm_spec
from .orbitflow import dynamical_constant, orbit_min_gauge

_EUCLID_BOUND = 2.0 / math.sqrt(3.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float


def _timed(name, fn) -> CheckResult:
    t0 = time.perf_counter()
    passed, detail = fn()
    return CheckResult(name, passed, detail, time.perf_counter() - t0)


def _map_ordered(fn, items, threads: int):
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def locus_structure(norm_specs=("euclidean", "p:4"), n: int = 50,
                    seed: int = 0) -> list[CheckResult]:
    """Realized critical lattices: admissible, covolume Delta, in Z+ u Z-."""
    out = []
    for spec in norm_specs:
        def check(spec=spec):
            domain = parse_norm_spec(spec)
            if domain.dim != 2:
                raise LatcritError(f"locus battery needs a planar norm, got {spec!r}")
            delta = critical_determinant(domain)
            gauge = CylinderGauge(domain)
            planar = critical_locus_2d(domain, n_samples=n)
            rng = np.random.default_rng([17, seed])
            bad = 0
            worst = 0.0
            for piece in (Piece.LowerShear, Piece.UpperShear):
                for k in range(n):
                    m2 = planar[k % len(planar)].basis
                    shear = tuple(rng.uniform(-2.0, 2.0, size=2))
                    lat = realize_critical(CriticalLatticeDesc(piece, m2, shear),
                                           domain, delta=delta)
                    err = abs(lat.covolume - delta)
                    worst = max(worst, err)
                    ok = (err <= 1e-9
                          and is_admissible(lat, gauge, 1.0)
                          and classify_z(lat) in (ZClass.ZPlus, ZClass.ZMinus,
                                                  ZClass.Both))
                    bad += 0 if ok else 1
            return bad == 0, (f"{2 * n} lattices, worst covolume error "
                              f"{worst:.3e}, {bad} failures")
        out.append(_timed(f"locus-structure[{spec}]", check))
    return out


def delta_equality(norm_specs=("euclidean", "sup"), n_starts: int = 200,
                   seed: int = 0, threads: int = 1) -> list[CheckResult]:
    """Random-start covolume descent never beats Delta(B) - 1e-6."""
    out = []
    for spec in norm_specs:
        def check(spec=spec):
            domain = parse_norm_spec(spec)
            delta = critical_determinant(domain)
            best = corroborate_delta_equality(domain, n_starts, delta=delta,
                                              seed=seed, threads=threads)
            return best >= delta - 1e-6, (f"min covolume {best:.12f} vs "
                                          f"Delta {delta:.12f}")
        out.append(_timed(f"delta-equality[{spec}]", check))
    return out


def dirichlet_bound(n: int = 100, q_max: int = 10 ** 6, seed: int = 0,
                    threads: int = 1) -> list[CheckResult]:
    """Sampled c_estimates never exceed the spectrum endpoint + 1e-6."""
    out = []
    for spec, bound in (("euclidean", _EUCLID_BOUND), ("sup", 1.0)):
        def check(spec=spec, bound=bound):
            domain = parse_norm_spec(spec)
            rng = np.random.default_rng([23, seed])
            xs = [tuple(rng.random(2)) for _ in range(n)]
            cs = _map_ordered(
                lambda x: dirichlet_constant(x, domain, q_max).c_estimate,
                xs, threads)
            worst = max(cs)
            return worst <= bound + 1e-6, (f"max c over {n} samples "
                                           f"{worst:.9f} vs bound {bound:.9f}")
        out.append(_timed(f"dirichlet-bound[{spec}]", check))
    return out


def ba_orbit(q_max: int = 10 ** 7, s_hi: float = 40.0,
             s_step: float = 0.05) -> list[CheckResult]:
    """(2^{1/3}, 2^{2/3}): transition gap below 2/sqrt(3), bounded orbit."""
    x = ba_pair_cubic()
    domain = parse_norm_spec("euclidean")

    def check_gap():
        est = dirichlet_constant(x, domain, q_max)
        margin = _EUCLID_BOUND - est.tail_sup
        return margin >= 0.02, (f"tail sup {est.tail_sup:.6f}, margin "
                                f"{margin:.6f} (needs >= 0.02)")

    def check_orbit():
        gauge = CylinderGauge(domain)
        grid = np.arange(0.0, s_hi + s_step / 2, s_step)
        lo = min(s.lambda1 for s in orbit_min_gauge(x, gauge, grid))
        return lo > 0.05, f"inf lambda1 over [0,{s_hi:g}] = {lo:.6f} (needs > 0.05)"

    return [_timed("ba-orbit[gap]", check_gap),
            _timed("ba-orbit[bounded]", check_orbit)]


def dani_consistency(n: int = 10, s_max: float = 14.0, s_step: float = 0.01,
                     seed: int = 42, tol: float = 0.05) -> list[CheckResult]:
    """Dynamical c = r^3 matches the Diophantine c at matched horizons."""

    def check():
        domain = parse_norm_spec("euclidean")
        gauge = CylinderGauge(domain)
        q_max = round(math.exp(s_max))
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(n):
            x = tuple(rng.random(2))
            _, c_dyn = dynamical_constant(x, gauge, s_max, s_step)
            c_dir = dirichlet_constant(x, domain, q_max).c_estimate
            worst = max(worst, abs(c_dyn - c_dir) / max(c_dir, 1e-30))
        return worst <= tol, (f"worst relative gap over {n} samples "
                              f"{worst:.4f} (tolerance {tol:g})")

    return [_timed("dani-consistency", check)]


BATTERIES = {
    "locus-structure": locus_structure,
    "delta-equality": delta_equality,
    "dirichlet-bound": dirichlet_bound,
    "ba-orbit": ba_orbit,
    "dani-consistency": dani_consistency,
}


def run_battery(name: str, **params) -> list[CheckResult]:
    """Run one named battery, or every battery for name = 'all'."""
    if name == "all":
        out = []
        for key in BATTERIES:
            out.extend(run_battery(key, **params))
        return out
    if name not in BATTERIES:
        raise LatcritError(f"unknown battery {name!r}; pick from "
                           f"{', '.join(sorted(BATTERIES))} or 'all'")
    fn = BATTERIES[name]
    accepted = set(inspect.signature(fn).parameters)
    return fn(**{k: v for k, v in params.items() if k in accepted and v is not None})
