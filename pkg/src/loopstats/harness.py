"""Experiment driver: per-radius estimates, reports, and the exact-check CLI core.

Every estimator below is a deterministic function of (parameters, seed).
Sample i of a run always consumes stream (seed, i), so worker count only
affects wall time, never output; reports are byte-identical on reruns.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .estimates import Estimate
from .graph import SinkedMultigraph, collapse_boundary
from .lattice import build_cube_region
from .spanning import origin_tree_counts, estimate_xi_forest
from .unicycle import cycle_length_histogram, lambda_from_histogram
from .walks import estimate_xi_lerw, _fan_out

SCHEMA_VERSION = 1

STATISTICS = ("xi", "zeta", "lambda", "tau", "heights")


@dataclass(frozen=True)
class ExperimentConfig:
    """One CLI estimate run: statistic, cube sizes, budget, seed, workers."""

    statistic: str
    dimension: int
    radii: tuple
    samples: int
    seed: int
    workers: int = 1
    fmt: str = "json"
    estimator: str = "forest"   # xi only: 'forest' or 'lerw'

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}")
        if self.dimension < 2:
            raise ValueError("dimension must be at least 2")
        if self.samples <= 0:
            raise ValueError("sample count must be positive")
        if not self.radii or any(r < 1 for r in self.radii):
            raise ValueError("radii must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        if self.fmt not in ("json", "csv"):
            raise ValueError("format must be json or csv")
        if self.estimator not in ("forest", "lerw"):
            raise ValueError("estimator must be forest or lerw")


def estimate_zeta(d: int, r: int, samples: int, seed: int,
                  workers: int = 1) -> Estimate:
    """Mean height at the origin of a uniform recurrent pile on the cube."""
    joint, _, _ = origin_tree_counts(d, r, samples, seed, workers)
    sigma_hist = joint.sum(axis=0)
    return Estimate.from_histogram(sigma_hist, seed)


def height_histogram(d: int, r: int, samples: int, seed: int,
                     workers: int = 1) -> np.ndarray:
    """Counts of each origin height over uniform recurrent piles."""
    joint, _, _ = origin_tree_counts(d, r, samples, seed, workers)
    return joint.sum(axis=0)[:2 * d]


def estimate_tau(d: int, r: int, samples: int, seed: int,
                 workers: int = 1) -> Estimate:
    """Unicycle-to-rooted-tree ratio, chained through the cycle length.

    tau = (m - n + 1) / (#region * lambda); the identity
    tau * lambda * #region / (m - n + 1) = 1 holds by construction.
    """
    g = collapse_boundary(build_cube_region(d, r))
    hist = cycle_length_histogram(g, samples, seed, workers)
    lam = lambda_from_histogram(hist, samples, seed)
    n_region = g.nv - 1
    factor = (g.n_edges - g.nv + 1) / n_region
    tau_mean = factor / lam.mean
    tau_se = factor * lam.stderr / lam.mean**2
    assert abs(tau_mean * lam.mean * n_region / (g.n_edges - g.nv + 1) - 1.0) < 1e-12
    return Estimate(mean=tau_mean, stderr=tau_se, count=lam.count, seed=seed)


def exact_tau_cube(d: int, r: int) -> Fraction:
    """Exact unicycle ratio u / (#region * kappa) for tiny radii."""
    from .spanning import spanning_tree_count, unicycle_count

    g = collapse_boundary(build_cube_region(d, r))
    kappa = spanning_tree_count(g)
    u = unicycle_count(g)
    return Fraction(u, (g.nv - 1) * kappa)


def bulk_vs_origin(d: int, r: int, samples: int, seed: int):
    """(bulk mean height, origin mean height) from full recurrent piles.

    The bulk average runs over all region sites of each sampled pile; in
    the large-cube limit the two agree.
    """
    g = collapse_boundary(build_cube_region(d, r))
    o = g.origin_index()

    def run(start, count):
        return _kernels.recurrent_pile_batch(
            g.indptr, g.inc_edge, g.inc_other, g.edge_u, g.edge_v,
            g.nv, g.sink, count, np.uint64(seed), np.uint64(start), o)

    parts = _fan_out(run, samples, 1)
    height_sums, pile_totals, origin_vals = parts[0]
    n_region = g.nv - 1
    bulk_per_draw = pile_totals / n_region
    bulk = Estimate(mean=float(bulk_per_draw.mean()),
                    stderr=float(bulk_per_draw.std(ddof=1) / np.sqrt(samples)),
                    count=samples, seed=seed)
    origin = Estimate.from_sums(int(origin_vals.sum()),
                                int((origin_vals**2).sum()),
                                samples, seed)
    return bulk, origin


# -- reports -----------------------------------------------------------------

def _record(statistic, d, r, est: Estimate, master_seed):
    return {
        "statistic": statistic,
        "dimension": d,
        "radius": r,
        "mean": est.mean,
        "stderr": est.stderr,
        "count": est.count,
        "seed": master_seed,
        "schema": SCHEMA_VERSION,
    }


def run_experiment(config: ExperimentConfig) -> dict:
    """Run one estimate statistic over the configured radii.

    Radius index i draws from stream (seed, i) of the master seed, so per
    radius results match standalone runs with the derived seeds.
    """
    records = []
    for ri, r in enumerate(config.radii):
        seed_r = (config.seed + 0x9E3779B97F4A7C15 * (ri + 1)) % (1 << 64)
        d = config.dimension
        n = config.samples
        w = config.workers
        if config.statistic == "xi":
            if config.estimator == "lerw":
                est = estimate_xi_lerw(d, r, n, seed_r, workers=w)
                records.append(_record("xi-lerw", d, r, est, config.seed))
            else:
                est = estimate_xi_forest(d, r, n, seed_r, workers=w)
                records.append(_record("xi-forest", d, r, est, config.seed))
        elif config.statistic == "zeta":
            est = estimate_zeta(d, r, n, seed_r, workers=w)
            records.append(_record("zeta", d, r, est, config.seed))
        elif config.statistic == "lambda":
            est = estimate_lambda_cube(d, r, n, seed_r, workers=w)
            records.append(_record("lambda", d, r, est, config.seed))
        elif config.statistic == "tau":
            est = estimate_tau(d, r, n, seed_r, workers=w)
            records.append(_record("tau", d, r, est, config.seed))
        elif config.statistic == "heights":
            hist = height_histogram(d, r, n, seed_r, workers=w)
            for k, c in enumerate(hist):
                p = c / n
                se = float(np.sqrt(p * (1 - p) / n))
                records.append({
                    "statistic": f"height-p{k}",
                    "dimension": d,
                    "radius": r,
                    "mean": p,
                    "stderr": se,
                    "count": n,
                    "seed": config.seed,
                    "schema": SCHEMA_VERSION,
                })
    return {"schema": SCHEMA_VERSION, "records": records}


def estimate_lambda_cube(d, r, samples, seed, workers=1):
    from .unicycle import estimate_lambda

    return estimate_lambda(d, r, samples, seed, workers=workers)


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def report_to_csv(report: dict) -> str:
    cols = ["statistic", "dimension", "radius", "mean", "stderr",
            "count", "seed", "schema"]
    lines = [",".join(cols)]
    for rec in report["records"]:
        lines.append(",".join(repr(rec[c]) if isinstance(rec[c], float)
                              else str(rec[c]) for c in cols))
    return "\n".join(lines) + "\n"
