"""Execute a validated scenario and write its artifacts."""

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .. import __version__
from ..germs import (
    BosonicUM,
    Plane,
    Ray,
    ResidualReport,
    Sphere,
    bracket_residual,
    dirac_residual,
    funnel_limit,
    germ_delta_limit,
    germ_equivalence,
    rotation_matrix,
    vonneumann_residual,
)
from ..meanfield import classical_flow, classical_minimizers, fidelity_trajectory, ground_state_correspondence
from ..numerics import evolve_unitary
from ..projective import PureState
from . import config as cfgmod

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = errors


class NumericFailure(RuntimeError):
    """A numerical stage failed; the message names stage and parameters."""


def fmt(x):
    """17 significant digits, locale independent."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in r])
    return buf.getvalue()


def _write_atomic(path, text):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _pmap(fn, args, jobs):
    if jobs <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, *zip(*args)))


# -- studies --------------------------------------------------------------------
# Each returns (tables, summary, plot_data); tables maps a file suffix
# ("" for the main table) to (header, rows).

def _study_germ_delta(cfg, g, sched, jobs):
    x, y = (cfgmod.build_point(p, g) for p in cfg["points"])
    rep = germ_delta_limit(g, x, y, sched)
    summary = {"exponent": rep.exponent, **rep.extras}
    return {"": (["L", "hbar", "overlap"], rep.rows)}, summary, {"rows": rep.rows}


def _transform(cfg, g):
    t = cfg["transform"]
    kind = t["kind"]
    power = t.get("hbar_power", 0.0)
    if kind in ("identity", "phase"):
        return (lambda L, x: x), t.get("phase", 0.0) if kind == "phase" else 0.0
    if kind == "shift":
        dp, dq = np.array(t["dp"]), np.array(t["dq"])

        def shift(L, x):
            s = g.hbar(L) ** power
            return Plane(tuple(np.array(x.p) + s * dp), tuple(np.array(x.q) + s * dq))

        return shift, 0.0
    angle = t["angle"]
    if isinstance(g, BosonicUM):
        gen = g.algebra.generators[t["generator"]]

        def rotate(L, x):
            return Ray(PureState.from_vector(evolve_unitary(gen, angle * g.hbar(L) ** power, x.amplitudes)))

        return rotate, 0.0
    axis = t["axis"]

    def rotate(L, x):
        return Sphere.from_vector(rotation_matrix(axis, angle * g.hbar(L) ** power) @ x.vector())

    return rotate, 0.0


def _study_germ_equiv(cfg, g, sched, jobs):
    points = [cfgmod.build_point(p, g) for p in cfg["points"]]
    transform, phase0 = _transform(cfg, g)
    phase = lambda L, x: phase0 * L  # noqa: E731
    tol = cfg["transform"].get("tolerance", 1e-3)
    rep = germ_equivalence(g, points, sched, transform=transform, phase=phase, tol=tol)
    rows = [(k, L, h, v) for k, r in enumerate(rep.overlaps) for (L, h, v) in r.rows]
    summary = {"equivalent": rep.equivalent, "all_equivalent": rep.all_equivalent}
    return {"": (["point", "L", "hbar", "overlap"], rows)}, summary, {"reports": [r.rows for r in rep.overlaps]}


def _residual_task(kind, f, g, L):
    fn = dirac_residual if kind == "dirac" else vonneumann_residual
    return fn(f, g, [L]).rows[0]


def _study_residuals(cfg, g, sched, jobs):
    f = cfgmod.build_polynomial(cfg["f"], 3)
    gg = cfgmod.build_polynomial(cfg["g"], 3)
    rows = _pmap(_residual_task, [(cfg["kind"], f, gg, L) for L in sched], jobs)
    rep = ResidualReport.from_rows(cfg["kind"], rows)
    summary = {
        "kind": cfg["kind"],
        "exponent": rep.exponent,
        "strictly_decreasing": rep.strictly_decreasing(),
        "ratios": list(rep.ratios()),
    }
    return {"": (["L", "hbar", "residual"], rep.rows)}, summary, {"rows": rep.rows}


def _sphere_grid(n, seed):
    rng = np.random.default_rng(seed)
    return [Sphere(math.acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi)) for _ in range(n)]


def _ray_grid(n, seed, M):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        v = rng.normal(size=M) + 1j * rng.normal(size=M)
        out.append(Ray(PureState.from_vector(v)))
    return out


def _study_funnel(cfg, g, sched, jobs):
    a = cfgmod.build_polynomial(cfg["funnel"], g.nvars())
    x = cfgmod.build_point(cfg["point"], g)
    rep = funnel_limit(a, g, x, sched)
    rows = [(L, h, v, rep.limit, e) for (L, h, e), v in zip(rep.report.rows, rep.values)]
    tables = {"": (["L", "hbar", "value", "limit", "abs_error"], rows)}
    summary = {"limit": rep.limit, "exponent": rep.report.exponent}
    plot = {"rows": rows}
    if "bracket" in cfg:
        b = cfgmod.build_polynomial(cfg["bracket"]["with"], g.nvars())
        n = cfg["bracket"].get("grid_size", 20)
        grid = _sphere_grid(n, cfg.get("seed", 0)) if not isinstance(g, BosonicUM) else _ray_grid(n, cfg.get("seed", 0), g.M)
        br = bracket_residual(a, b, g, grid, sched)
        tables["bracket"] = (["L", "hbar", "residual"], br.rows)
        summary["bracket_exponent"] = br.exponent
        plot["bracket"] = br.rows
    return tables, summary, plot


def _meanfield_task(psi0, poly, alg, L, t_grid, classical_amps):
    classical = [PureState(a) for a in classical_amps]
    return fidelity_trajectory(psi0, poly, alg, L, t_grid, classical=classical)


def _study_meanfield(cfg, g, sched, jobs):
    poly = cfgmod.build_hamiltonian(cfg, g)
    psi0 = cfgmod.build_point(cfg["psi0"], g).psi
    t_grid = cfgmod.build_t_grid(cfg)
    try:
        classical = classical_flow(psi0, poly, g.algebra, t_grid, dt=cfg.get("dt", 1e-3))
    except RuntimeError as exc:
        raise NumericFailure(f"stage classical_flow (dt={cfg.get('dt', 1e-3)}): {exc}") from exc
    amps = [p.amplitudes for p in classical]
    trajs = _pmap(_meanfield_task, [(psi0, poly, g.algebra, L, t_grid, amps) for L in sched], jobs)
    n = len(g.algebra)
    header = ["t", "L", "fidelity"] + [f"x{a + 1}_cl" for a in range(n)] + [f"X{a + 1}_q" for a in range(n)] + ["energy_cl"]
    rows = []
    for tr in trajs:
        for k, t in enumerate(tr.times):
            rows.append([t, tr.L, tr.fidelity[k], *tr.classical_expectations[k], *tr.quantum_expectations[k], tr.energy[k]])
    summary = {
        "per_L": [
            {
                "L": tr.L,
                "final_fidelity": tr.fidelity[-1],
                "min_fidelity": float(tr.fidelity.min()),
                "sup_expectation_error": tr.sup_expectation_error(),
            }
            for tr in trajs
        ],
        "energy_drift": float(np.max(np.abs(trajs[0].energy - trajs[0].energy[0]))),
    }
    return {"": (header, rows)}, summary, {"trajectories": trajs}


def _ground_task(poly, alg, L, minimizers):
    return ground_state_correspondence(poly, alg, L, minimizers=minimizers)


def _study_ground_state(cfg, g, sched, jobs):
    poly = cfgmod.build_hamiltonian(cfg, g)
    mins = classical_minimizers(poly, g.algebra, seed=cfg.get("seed", 0))
    reps = _pmap(_ground_task, [(poly, g.algebra, L, mins) for L in sched], jobs)
    n = len(g.algebra)
    header = ["L", "hbar"] + [f"X{a + 1}_q" for a in range(n)] + [f"x{a + 1}_cl" for a in range(n)] + ["distance", "gap"]
    rows = []
    for r in reps:
        nearest = r.classical_minimizers[int(np.argmin(r.distances))]
        rows.append([r.L, 1.0 / r.L, *r.quantum_point, *nearest, r.distance, r.gap])
    summary = {
        "classical_minimizers": [list(p) for p in mins[0]],
        "classical_energy": mins[1],
        "degenerate": any(r.degenerate for r in reps),
        "distances": [r.distance for r in reps],
    }
    return {"": (header, rows)}, summary, {"rows": rows}


STUDY_RUNNERS = {
    "germ_delta": _study_germ_delta,
    "germ_equiv": _study_germ_equiv,
    "residuals": _study_residuals,
    "funnel": _study_funnel,
    "meanfield": _study_meanfield,
    "ground_state": _study_ground_state,
}


def resolve_output_dir(cfg, out=None):
    if out:
        return out
    env = os.environ.get("GERMFLOW_OUT")
    if env:
        return env
    return cfg["output"]["directory"]


def run(config, jobs=1, out=None):
    """Validate, execute and write outputs; returns the manifest dict.

    Raises :class:`ConfigError` for invalid configs and
    :class:`NumericFailure` when a numerical stage fails.
    """
    errors = cfgmod.validate(config)
    if errors:
        raise ConfigError(errors)
    cfg = cfgmod.with_defaults(config)
    outdir = resolve_output_dir(cfg, out)
    os.makedirs(outdir, exist_ok=True)
    timings = {}

    t0 = time.perf_counter()
    g = cfgmod.build_family(cfg)
    sched = cfgmod.build_schedule(cfg)
    timings["setup"] = time.perf_counter() - t0

    study = cfg["study"]
    t0 = time.perf_counter()
    try:
        tables, summary, plot_data = STUDY_RUNNERS[study](cfg, g, sched, max(1, int(jobs)))
    except NumericFailure:
        raise
    except (np.linalg.LinAlgError, ArithmeticError, RuntimeError) as exc:
        raise NumericFailure(f"stage {study} (L_values={list(sched.L_values)}): {exc}") from exc
    timings[study] = time.perf_counter() - t0
    log.info("study %s finished in %.2fs", study, timings[study])

    base = f"{study}_{cfg['name']}"
    formats = cfg["output"]["formats"]
    files = []
    t0 = time.perf_counter()
    for suffix, (header, rows) in tables.items():
        stem = base if not suffix else f"{base}_{suffix}"
        if "csv" in formats:
            path = os.path.join(outdir, stem + ".csv")
            _write_atomic(path, csv_text(header, rows))
            files.append(os.path.basename(path))
    if "json" in formats:
        path = os.path.join(outdir, base + ".json")
        _write_atomic(path, json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
        files.append(os.path.basename(path))
    if "png" in formats:
        from . import figures

        for path in figures.render(study, outdir, base, plot_data, g):
            files.append(os.path.basename(path))
    timings["write"] = time.perf_counter() - t0

    manifest = {
        "tool": "germflow",
        "version": __version__,
        "config": _jsonable(cfg),
        "outputs": {study: files},
        "summary": _jsonable(summary),
        "timings_s": timings,
    }
    _write_atomic(os.path.join(outdir, "manifest.json"), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest
