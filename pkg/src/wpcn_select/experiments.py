"""Sweep orchestration: grids, method comparisons, and figure datasets.

Everything here funnels through ``evaluate_point`` so the analytic,
high-SNR, asymptotic, and Monte Carlo routes stay interchangeable row by
row.  Output rows follow one fixed CSV schema; floats are written with
repr() so a rerun of the same config is byte-identical.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import json
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .analytic import (
    Method,
    OutageEstimate,
    PairSpec,
    Scheme,
    SchemeSpec,
    outage_ebs,
    outage_ebs_high_snr,
    outage_ibs,
    outage_ibs_high_snr,
    outage_mms,
    outage_mms_high_snr,
    outage_pair,
    outage_pair_high_snr,
    outage_rs,
    outage_rs_high_snr,
    outage_sbs,
    outage_sbs_high_snr,
)
from .evt import outage_evt_ebs, outage_evt_ibs, outage_evt_mms, outage_evt_pair, outage_evt_sbs
from .model import (
    EhModel,
    SystemParams,
    db_to_linear,
    dbm_to_watts,
    linear_to_db,
    threshold_x,
    watts_to_dbm,
)
from .montecarlo import TrialConfig, simulate_outage

__all__ = [
    "CSV_COLUMNS",
    "ComparisonConfig",
    "OptimalT1",
    "SweepResult",
    "SweepSpec",
    "SweptParameter",
    "compare_methods",
    "evaluate_point",
    "find_optimal_t1",
    "read_csv",
    "reproduce_figure",
    "rows_to_csv",
    "run_sweep",
    "write_csv",
    "write_json",
]

Selection = Union[SchemeSpec, PairSpec]

#: fixed output schema; j and stderr are empty when not applicable
CSV_COLUMNS = (
    "scheme", "k", "j", "M", "pt_dbm", "t1", "q_db", "sigma_n_dbm",
    "sigma_e2", "model", "method", "x_threshold", "outage", "stderr",
)


def _package_version() -> str:
    from . import __version__  # deferred: this module is imported by __init__

    return __version__


# ---------------------------------------------------------------------------
# single-point dispatch
# ---------------------------------------------------------------------------

def evaluate_point(
    selection: Selection,
    params: SystemParams,
    method: Method,
    *,
    sigma_e2: float = 0.0,
    mc_trials: int = 1_000_000,
    base_seed: int = 0,
) -> OutageEstimate:
    """Outage of one (selection, system) point through the requested route."""
    if method is Method.MONTE_CARLO:
        cfg = TrialConfig(selection, params, mc_trials, base_seed, sigma_e2)
        return simulate_outage(cfg)
    if sigma_e2 != 0.0:
        raise ValueError("imperfect CSI is only modeled by the Monte Carlo route")
    x = threshold_x(params)
    if isinstance(selection, PairSpec):
        if method is Method.ANALYTIC:
            return outage_pair(x, selection, params, selection.model)
        if method is Method.HIGH_SNR:
            return outage_pair_high_snr(x, selection, params)
        return outage_evt_pair(x, selection, params.num_devices, params)
    scheme = selection.scheme
    if method is Method.ANALYTIC:
        if scheme is Scheme.RS:
            return outage_rs(x, params, selection.model)
        table = {
            Scheme.SBS: outage_sbs,
            Scheme.EBS: outage_ebs,
            Scheme.IBS: outage_ibs,
            Scheme.MMS: outage_mms,
        }
        return table[scheme](x, selection, params)
    if method is Method.HIGH_SNR:
        if scheme is Scheme.RS:
            return outage_rs_high_snr(x, params)
        if scheme is Scheme.EBS:
            return outage_ebs_high_snr(x, params)
        table = {
            Scheme.SBS: outage_sbs_high_snr,
            Scheme.IBS: outage_ibs_high_snr,
            Scheme.MMS: outage_mms_high_snr,
        }
        return table[scheme](x, selection, params)
    # asymptotics: nonlinear harvester only, and RS has no extreme-value limit
    if scheme is Scheme.RS:
        raise ValueError("random selection has no extreme-value limit")
    if selection.model is not EhModel.NON_LINEAR:
        raise ValueError("asymptotics are stated for the nonlinear harvester")
    table = {
        Scheme.SBS: outage_evt_sbs,
        Scheme.EBS: outage_evt_ebs,
        Scheme.IBS: outage_evt_ibs,
        Scheme.MMS: outage_evt_mms,
    }
    return table[scheme](x, selection.k, params.num_devices, params)


def _row(
    selection: Selection,
    params: SystemParams,
    sigma_e2: float,
    method: Method,
    est: OutageEstimate,
) -> dict:
    q = params.rate_threshold_q
    return {
        "scheme": selection.scheme.value,
        "k": selection.k,
        "j": selection.j if isinstance(selection, PairSpec) else None,
        "M": params.num_devices,
        "pt_dbm": watts_to_dbm(params.transmit_power),
        "t1": params.harvest_fraction,
        "q_db": linear_to_db(q) if q > 0.0 else float("-inf"),
        "sigma_n_dbm": watts_to_dbm(params.noise_variance),
        "sigma_e2": sigma_e2,
        "model": selection.model.value,
        "method": method.value,
        "x_threshold": threshold_x(params),
        "outage": est.value,
        "stderr": est.stderr,
    }


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

class SweptParameter(Enum):
    TRANSMIT_POWER_DBM = "pt_dbm"
    ORDER_INDEX = "k"
    POPULATION_SIZE = "m"
    HARVEST_FRACTION = "t1"
    ESTIMATION_ERROR = "sigma_e2"


@dataclass(frozen=True)
class SweepSpec:
    """One selection rule evaluated along a grid of a single parameter."""

    selection: Selection
    swept: SweptParameter
    grid: tuple
    params: SystemParams
    methods: tuple = (Method.ANALYTIC,)
    mc_trials: int = 200_000
    base_seed: int = 0
    sigma_e2: float = 0.0

    def __post_init__(self) -> None:
        if len(self.grid) == 0:
            raise ValueError("sweep grid is empty")
        if len(self.methods) == 0:
            raise ValueError("no evaluation methods requested")


@dataclass
class SweepResult:
    rows: list
    errors: list
    metadata: dict


def _apply_swept(
    selection: Selection, params: SystemParams, swept: SweptParameter, value, sigma_e2: float
):
    if swept is SweptParameter.TRANSMIT_POWER_DBM:
        return selection, params.replace(transmit_power=dbm_to_watts(float(value))), sigma_e2
    if swept is SweptParameter.POPULATION_SIZE:
        return selection, params.replace(num_devices=int(value)), sigma_e2
    if swept is SweptParameter.HARVEST_FRACTION:
        return selection, params.replace(harvest_fraction=float(value)), sigma_e2
    if swept is SweptParameter.ESTIMATION_ERROR:
        return selection, params, float(value)
    return dataclasses.replace(selection, k=int(value)), params, sigma_e2


def run_sweep(sweep: SweepSpec) -> SweepResult:
    """Evaluate every (grid value, method) pair, recording failures per row
    instead of aborting the grid."""
    rows, errors = [], []
    for i, value in enumerate(sweep.grid):
        try:
            sel, params, sig = _apply_swept(
                sweep.selection, sweep.params, sweep.swept, value, sweep.sigma_e2
            )
        except (ValueError, ArithmeticError) as exc:
            errors.append({"index": i, "value": value, "method": None, "message": str(exc)})
            continue
        for method in sweep.methods:
            try:
                est = evaluate_point(
                    sel, params, method,
                    sigma_e2=sig, mc_trials=sweep.mc_trials, base_seed=sweep.base_seed + i,
                )
            except (ValueError, ArithmeticError) as exc:
                errors.append(
                    {"index": i, "value": value, "method": method.value, "message": str(exc)}
                )
            else:
                rows.append(_row(sel, params, sig, method, est))
    metadata = {
        "swept": sweep.swept.value,
        "grid": [float(v) for v in sweep.grid],
        "methods": [m.value for m in sweep.methods],
        "mc_trials": sweep.mc_trials,
        "base_seed": sweep.base_seed,
        "sigma_e2": sweep.sigma_e2,
        "selection": _selection_meta(sweep.selection),
        "fixed": _params_meta(sweep.params),
        "version": _package_version(),
    }
    return SweepResult(rows, errors, metadata)


def _selection_meta(selection: Selection) -> dict:
    meta = {"scheme": selection.scheme.value, "k": selection.k, "model": selection.model.value}
    if isinstance(selection, PairSpec):
        meta["j"] = selection.j
    return meta


def _params_meta(params: SystemParams) -> dict:
    return {
        "pt_dbm": watts_to_dbm(params.transmit_power),
        "sigma_n_dbm": watts_to_dbm(params.noise_variance),
        "t1": params.harvest_fraction,
        "q": params.rate_threshold_q,
        "M": params.num_devices,
        "rectenna": [params.rectenna.a, params.rectenna.b, params.rectenna.c],
    }


# ---------------------------------------------------------------------------
# optimal harvesting time
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OptimalT1:
    t1: float
    outage: OutageEstimate


def find_optimal_t1(
    scheme: Scheme, k: int, params: SystemParams, search_tolerance: float = 1e-4
) -> OptimalT1:
    """Harvest fraction minimizing the analytic outage.

    The threshold x moves with t1 through t2 = 1 - t1, so the objective is
    re-evaluated from scratch at every candidate.  A coarse scan locates the
    basin and checks unimodality; bounded Brent refines it.  A non-unimodal
    scan (quadrature jitter aside) falls back to the grid argmin and warns.
    """

    def objective(t1: float) -> float:
        p = params.replace(harvest_fraction=float(t1))
        sel = SchemeSpec(scheme, k=k)
        return evaluate_point(sel, p, Method.ANALYTIC).value

    grid = np.linspace(1e-4, 1.0 - 1e-4, 50)
    values = np.array([objective(t) for t in grid])
    i0 = int(np.argmin(values))
    jitter = 1e-12 + 1e-9 * float(np.max(np.abs(values)))
    falling = np.all(np.diff(values[: i0 + 1]) <= jitter)
    rising = np.all(np.diff(values[i0:]) >= -jitter)
    if not (falling and rising):
        warnings.warn(
            "outage is not unimodal in t1 on the coarse grid; returning the grid argmin",
            RuntimeWarning,
        )
        t_star = float(grid[i0])
    else:
        lo = float(grid[max(i0 - 1, 0)])
        hi = float(grid[min(i0 + 1, len(grid) - 1)])
        res = minimize_scalar(
            objective, bounds=(lo, hi), method="bounded",
            options={"xatol": search_tolerance},
        )
        t_star = float(res.x)
    best = evaluate_point(SchemeSpec(scheme, k=k),
                          params.replace(harvest_fraction=t_star), Method.ANALYTIC)
    return OptimalT1(t_star, best)


# ---------------------------------------------------------------------------
# method comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonConfig:
    selection: Selection
    params: SystemParams
    methods: tuple = (Method.ANALYTIC, Method.MONTE_CARLO)
    mc_trials: int = 1_000_000
    base_seed: int = 0
    sigma_e2: float = 0.0
    abs_tolerance: float = 5e-3
    sigma_tolerance: float = 3.0

    def __post_init__(self) -> None:
        if len(self.methods) < 2:
            raise ValueError("comparison needs at least two methods")


def compare_methods(config: ComparisonConfig) -> dict:
    """Pairwise agreement report between evaluation routes at one point.

    A pair passes when the gap is within sigma_tolerance Monte Carlo standard
    errors or within abs_tolerance, whichever is larger; deterministic pairs
    use abs_tolerance alone.
    """
    estimates = {}
    for method in config.methods:
        estimates[method] = evaluate_point(
            config.selection, config.params, method,
            sigma_e2=config.sigma_e2, mc_trials=config.mc_trials,
            base_seed=config.base_seed,
        )
    pairs = []
    for m1, m2 in itertools.combinations(config.methods, 2):
        e1, e2 = estimates[m1], estimates[m2]
        gap = abs(e1.value - e2.value)
        var = sum(e.stderr ** 2 for e in (e1, e2) if e.stderr is not None)
        se = math.sqrt(var)
        z = gap / se if se > 0.0 else None
        limit = max(config.sigma_tolerance * se, config.abs_tolerance)
        pairs.append({
            "methods": [m1.value, m2.value],
            "gap": gap,
            "z_score": z,
            "limit": limit,
            "passed": gap <= limit,
        })
    return {
        "selection": _selection_meta(config.selection),
        "fixed": _params_meta(config.params),
        "sigma_e2": config.sigma_e2,
        "x_threshold": threshold_x(config.params),
        "estimates": {
            m.value: {"outage": e.value, "stderr": e.stderr} for m, e in estimates.items()
        },
        "pairs": pairs,
        "all_match": all(p["passed"] for p in pairs),
    }


def format_comparison(report: dict) -> str:
    lines = [
        "point: scheme={scheme} k={k} M={M} x={x:.6g}".format(
            scheme=report["selection"]["scheme"], k=report["selection"]["k"],
            M=report["fixed"]["M"], x=report["x_threshold"],
        )
    ]
    for name, est in report["estimates"].items():
        se = "" if est["stderr"] is None else f"  (stderr {est['stderr']:.3e})"
        lines.append(f"  {name:10s} {est['outage']:.6e}{se}")
    for p in report["pairs"]:
        verdict = "ok" if p["passed"] else "MISMATCH"
        z = "" if p["z_score"] is None else f"  z={p['z_score']:.2f}"
        lines.append(
            f"  {p['methods'][0]} vs {p['methods'][1]}: gap {p['gap']:.3e}"
            f" (limit {p['limit']:.3e}){z}  {verdict}"
        )
    lines.append("result: " + ("all methods agree" if report["all_match"] else "disagreement"))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row[col]) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(rows_to_csv(rows))
    return path


_INT_COLUMNS = {"k", "j", "M"}
_STR_COLUMNS = {"scheme", "model", "method"}


def read_csv(path) -> list:
    rows = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header: {reader.fieldnames!r}")
        for raw in reader:
            row = {}
            for col in CSV_COLUMNS:
                text = raw[col]
                if text == "":
                    row[col] = None
                elif col in _STR_COLUMNS:
                    row[col] = text
                elif col in _INT_COLUMNS:
                    row[col] = int(text)
                else:
                    row[col] = float(text)
            rows.append(row)
    return rows


def write_json(obj, path) -> Path:
    path = Path(path)
    with path.open("w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# figure datasets
# ---------------------------------------------------------------------------

_ALL_SCHEMES = (Scheme.RS, Scheme.SBS, Scheme.EBS, Scheme.IBS, Scheme.MMS)
_RANKED_SCHEMES = (Scheme.SBS, Scheme.EBS, Scheme.IBS, Scheme.MMS)


def _params_for_x(params: SystemParams, x: float) -> SystemParams:
    # invert x = 2^(q/t2) - 1 so the threshold column matches the grid value
    q = params.comm_fraction * math.log2(1.0 + x)
    return params.replace(rate_threshold_q=q)


def _fig_outage_vs_power(params: SystemParams, k: int, trials: int, seed: int):
    grid = list(range(-40, 25, 5))
    rows = []
    n = 0
    for scheme, model, pt in itertools.product(
        _ALL_SCHEMES, (EhModel.NON_LINEAR, EhModel.LINEAR), grid
    ):
        sel = SchemeSpec(scheme, k=k, model=model)
        p = params.replace(transmit_power=dbm_to_watts(pt))
        rows.append(_row(sel, p, 0.0, Method.ANALYTIC, evaluate_point(sel, p, Method.ANALYTIC)))
        if trials > 0:
            est = evaluate_point(
                sel, p, Method.MONTE_CARLO, mc_trials=trials, base_seed=seed + n
            )
            rows.append(_row(sel, p, 0.0, Method.MONTE_CARLO, est))
        n += 1
    meta = {"pt_dbm_grid": grid, "k": k, "schemes": [s.value for s in _ALL_SCHEMES],
            "models": ["nonlinear", "linear"]}
    return rows, meta


def _fig_outage_vs_k(params: SystemParams, M: int, trials: int, seed: int):
    p0 = params.replace(num_devices=M, transmit_power=dbm_to_watts(-10.0))
    rows = []
    n = 0
    for scheme, k in itertools.product(_RANKED_SCHEMES, range(1, M + 1)):
        sel = SchemeSpec(scheme, k=k)
        rows.append(_row(sel, p0, 0.0, Method.ANALYTIC, evaluate_point(sel, p0, Method.ANALYTIC)))
        if trials > 0:
            est = evaluate_point(
                sel, p0, Method.MONTE_CARLO, mc_trials=trials, base_seed=seed + n
            )
            rows.append(_row(sel, p0, 0.0, Method.MONTE_CARLO, est))
        n += 1
    meta = {"M": M, "k_grid": list(range(1, M + 1)), "pt_dbm": -10.0,
            "schemes": [s.value for s in _RANKED_SCHEMES]}
    return rows, meta


def _fig_pair(params: SystemParams, trials: int, seed: int):
    p0 = params.replace(
        transmit_power=dbm_to_watts(-40.0), rate_threshold_q=db_to_linear(-4.0)
    )
    rows = []
    for M in (10, 20, 30):
        p = p0.replace(num_devices=M)
        for k in (1, 2):
            for j in range(3, M + 1):
                sel = PairSpec(Scheme.SBS, k=k, j=j)
                est = evaluate_point(sel, p, Method.ANALYTIC)
                rows.append(_row(sel, p, 0.0, Method.ANALYTIC, est))
    meta = {"M_grid": [10, 20, 30], "k_grid": [1, 2], "j": "3..M",
            "q_db": -4.0, "pt_dbm": -40.0}
    return rows, meta


def _fig_evt(params: SystemParams, trials: int, seed: int):
    p0 = params.replace(transmit_power=dbm_to_watts(-40.0))
    x_grid = np.geomspace(0.1, 3.0, 30)
    rows = []
    for scheme, k, M in itertools.product(
        _RANKED_SCHEMES, (1, 2), (10, 20, 50, 100, 200, 500, 1000)
    ):
        sel = SchemeSpec(scheme, k=k)
        p1 = p0.replace(num_devices=M)
        for x in x_grid:
            p = _params_for_x(p1, float(x))
            for method in (Method.ANALYTIC, Method.EVT):
                rows.append(_row(sel, p, 0.0, method, evaluate_point(sel, p, method)))
    meta = {"M_grid": [10, 20, 50, 100, 200, 500, 1000], "k_grid": [1, 2],
            "x_grid": [float(x) for x in x_grid], "pt_dbm": -40.0,
            "schemes": [s.value for s in _RANKED_SCHEMES]}
    return rows, meta


def _fig_harvest_time(params: SystemParams, trials: int, seed: int):
    p0 = params.replace(transmit_power=dbm_to_watts(-10.0))
    t1_grid = [round(0.05 * i, 2) for i in range(1, 20)]
    sigma_grid = (0.0, 0.2, 0.5)
    rows = []
    n = 0
    for scheme, t1 in itertools.product(_RANKED_SCHEMES, t1_grid):
        sel = SchemeSpec(scheme, k=2)
        p = p0.replace(harvest_fraction=t1)
        rows.append(_row(sel, p, 0.0, Method.ANALYTIC, evaluate_point(sel, p, Method.ANALYTIC)))
        if trials > 0:
            for sig in sigma_grid:
                est = evaluate_point(
                    sel, p, Method.MONTE_CARLO,
                    sigma_e2=sig, mc_trials=trials, base_seed=seed + n,
                )
                rows.append(_row(sel, p, sig, Method.MONTE_CARLO, est))
                n += 1
    meta = {"t1_grid": t1_grid, "sigma_e2_grid": list(sigma_grid), "k": 2,
            "pt_dbm": -10.0, "schemes": [s.value for s in _RANKED_SCHEMES]}
    return rows, meta


_FIGURES = {
    "fig2a": lambda p, t, s: _fig_outage_vs_power(p, 2, t, s),
    "fig2b": lambda p, t, s: _fig_outage_vs_power(p, 4, t, s),
    "fig3a": lambda p, t, s: _fig_outage_vs_k(p, 10, t, s),
    "fig3b": lambda p, t, s: _fig_outage_vs_k(p, 20, t, s),
    "fig4": _fig_pair,
    "fig5": _fig_evt,
    "fig6": _fig_harvest_time,
}


def reproduce_figure(
    figure_id: str,
    out_dir=".",
    trials: int = 100_000,
    seed: int = 0,
    params: Optional[SystemParams] = None,
):
    """Regenerate one figure's dataset as <id>.csv plus a .meta.json sidecar.

    trials=0 skips the Monte Carlo overlays.  Output carries no timestamps,
    so identical inputs give byte-identical files.
    """
    key = figure_id.lower().replace("-", "").replace("_", "")
    if key not in _FIGURES:
        raise ValueError(f"unknown figure {figure_id!r}; pick from {sorted(_FIGURES)}")
    if params is None:
        params = SystemParams()
    rows, meta = _FIGURES[key](params, trials, seed)
    meta.update({
        "figure": key,
        "trials": trials,
        "base_seed": seed,
        "version": _package_version(),
    })
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = write_csv(rows, out_dir / f"{key}.csv")
    meta_path = write_json(meta, out_dir / f"{key}.meta.json")
    return csv_path, meta_path
