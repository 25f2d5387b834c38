"""Monte Carlo estimation of the outage probabilities.

Trials are split into fixed-size blocks, each seeded independently through
SeedSequence(entropy=base_seed, spawn_key=(block,)).  Block RNG state depends
only on (base_seed, block index), and per-block failure counts are integers,
so the estimate is bit-identical for a given config no matter how many
worker threads execute the blocks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import Method, OutageEstimate, PairSpec, Scheme, SchemeSpec
from .model import SystemParams, harvested_energy, snr, threshold_x

__all__ = [
    "ChannelDraw",
    "TrialConfig",
    "draw_channels",
    "select_device",
    "simulate_outage",
]

#: trials per RNG block; smaller for large M to bound the (8, n, M) buffers
_BLOCK = 1 << 16
_ELEMENT_BUDGET = 1 << 21

#: env var capping the worker thread count (estimates do not depend on it)
THREADS_ENV = "WPCN_SELECT_THREADS"


@dataclass(frozen=True)
class TrialConfig:
    """One simulation run: what to select, under which system, how long."""

    spec: SchemeSpec | PairSpec
    params: SystemParams
    num_trials: int = 1_000_000
    base_seed: int = 0
    estimation_error_var: float = 0.0

    def __post_init__(self) -> None:
        if not (isinstance(self.num_trials, int) and self.num_trials >= 1):
            raise ValueError(f"num_trials must be a positive integer, got {self.num_trials!r}")
        if not (isinstance(self.base_seed, int) and self.base_seed >= 0):
            raise ValueError(f"base_seed must be a non-negative integer, got {self.base_seed!r}")
        if not 0.0 <= self.estimation_error_var < 1.0:
            raise ValueError(
                f"estimation error variance must lie in [0, 1), got {self.estimation_error_var!r}"
            )
        top = self.spec.j if isinstance(self.spec, PairSpec) else self.spec.k
        if top > self.params.num_devices:
            raise ValueError(
                f"order index {top} exceeds the population size {self.params.num_devices}"
            )


@dataclass(frozen=True)
class ChannelDraw:
    """Squared gains for one slot; estimated gains present only under
    imperfect CSI (selection ranks on estimates, outage uses the truth)."""

    gains_g: np.ndarray
    gains_h: np.ndarray
    est_g: np.ndarray | None = None
    est_h: np.ndarray | None = None

    @property
    def ranking_g(self) -> np.ndarray:
        return self.gains_g if self.est_g is None else self.est_g

    @property
    def ranking_h(self) -> np.ndarray:
        return self.gains_h if self.est_h is None else self.est_h


def _draw_block(M: int, n: int, sigma_e2: float, rng: np.random.Generator):
    """(true_g, true_h, rank_g, rank_h), each shaped (n, M)."""
    if sigma_e2 == 0.0:
        g = -np.log1p(-rng.random((n, M)))
        h = -np.log1p(-rng.random((n, M)))
        return g, h, g, h
    z = rng.standard_normal((8, n, M))
    s_est = math.sqrt((1.0 - sigma_e2) / 2.0)
    s_err = math.sqrt(sigma_e2 / 2.0)
    est_g = (s_est * z[0]) ** 2 + (s_est * z[1]) ** 2
    g = (s_est * z[0] + s_err * z[2]) ** 2 + (s_est * z[1] + s_err * z[3]) ** 2
    est_h = (s_est * z[4]) ** 2 + (s_est * z[5]) ** 2
    h = (s_est * z[4] + s_err * z[6]) ** 2 + (s_est * z[5] + s_err * z[7]) ** 2
    return g, h, est_g, est_h


def draw_channels(M: int, sigma_e2: float, rng: np.random.Generator) -> ChannelDraw:
    """One slot of i.i.d. unit-mean squared gains for M devices.

    Under imperfect CSI the estimate carries variance 1 - sigma_e2 and the
    independent error carries sigma_e2, so the true gain keeps unit mean.
    """
    if not (isinstance(M, int) and M >= 1):
        raise ValueError(f"population size must be a positive integer, got {M!r}")
    if not 0.0 <= sigma_e2 < 1.0:
        raise ValueError(f"estimation error variance must lie in [0, 1), got {sigma_e2!r}")
    g, h, rg, rh = _draw_block(M, 1, sigma_e2, rng)
    if sigma_e2 == 0.0:
        return ChannelDraw(g[0], h[0])
    return ChannelDraw(g[0], h[0], rg[0], rh[0])


def _ranking_stat(
    scheme: Scheme, g: np.ndarray, h: np.ndarray, params: SystemParams, model
) -> np.ndarray:
    if scheme is Scheme.SBS:
        return snr(h, harvested_energy(g, params, model), params)
    if scheme is Scheme.EBS:
        return harvested_energy(g, params, model)
    if scheme is Scheme.IBS:
        return h
    if scheme is Scheme.MMS:
        return np.minimum(g, h)
    raise ValueError(f"no ranking statistic for {scheme!r}")


def select_device(
    spec: SchemeSpec | PairSpec,
    draw: ChannelDraw,
    params: SystemParams,
    rng: np.random.Generator | None = None,
):
    """Index (or index pair) picked on one draw.

    Ranking uses estimated gains when present.  Ties break to the lowest
    index via a stable descending sort.  Random selection consumes rng.
    """
    M = draw.gains_g.shape[-1]
    if spec.scheme is Scheme.RS:
        if rng is None:
            raise ValueError("random selection needs an rng")
        if isinstance(spec, PairSpec):
            a = int(rng.integers(M))
            b = (a + int(rng.integers(1, M))) % M
            return a, b
        return int(rng.integers(M))
    stat = _ranking_stat(spec.scheme, draw.ranking_g, draw.ranking_h, params, spec.model)
    order = np.argsort(-stat, kind="stable")
    if isinstance(spec, PairSpec):
        return int(order[spec.k - 1]), int(order[spec.j - 1])
    return int(order[spec.k - 1])


def _count_block(config: TrialConfig, x: float, block: int, n: int) -> int:
    """Failures among the n trials of one block (exact integer)."""
    spec, params = config.spec, config.params
    M = params.num_devices
    seq = np.random.SeedSequence(entropy=config.base_seed, spawn_key=(block,))
    rng = np.random.Generator(np.random.Philox(seq))
    g, h, rank_g, rank_h = _draw_block(M, n, config.estimation_error_var, rng)
    rows = np.arange(n)

    # selection indices are drawn after the fading block so the gain stream
    # is identical across schemes under one seed
    if isinstance(spec, PairSpec):
        if spec.scheme is Scheme.RS:
            a = rng.integers(M, size=n)
            b = (a + rng.integers(1, M, size=n)) % M
        else:
            stat = _ranking_stat(spec.scheme, rank_g, rank_h, params, spec.model)
            order = np.argsort(-stat, axis=1, kind="stable")
            a = order[:, spec.k - 1]
            b = order[:, spec.j - 1]
        x_a = snr(h[rows, a], harvested_energy(g[rows, a], params, spec.model), params)
        x_b = snr(h[rows, b], harvested_energy(g[rows, b], params, spec.model), params)
        sinr = x_a / (x_b + 1.0)
        return int((sinr <= x).sum())

    if spec.scheme is Scheme.RS:
        sel = rng.integers(M, size=n)
    else:
        stat = _ranking_stat(spec.scheme, rank_g, rank_h, params, spec.model)
        sel = np.argsort(-stat, axis=1, kind="stable")[:, spec.k - 1]
    snr_sel = snr(h[rows, sel], harvested_energy(g[rows, sel], params, spec.model), params)
    return int((snr_sel <= x).sum())


def _worker_count(num_blocks: int) -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap <= 0:
        cap = min(4, os.cpu_count() or 1)
    return max(1, min(cap, num_blocks))


def simulate_outage(config: TrialConfig) -> OutageEstimate:
    """Monte Carlo outage estimate with a binomial standard error."""
    x = threshold_x(config.params)
    if x == 0.0:
        # zero rate threshold never fails: gains are positive a.s.
        return OutageEstimate(0.0, Method.MONTE_CARLO, stderr=0.0)

    block_size = min(_BLOCK, max(1, _ELEMENT_BUDGET // config.params.num_devices))
    total = config.num_trials
    sizes = [block_size] * (total // block_size)
    if total % block_size:
        sizes.append(total % block_size)

    with ThreadPoolExecutor(max_workers=_worker_count(len(sizes))) as pool:
        counts = list(
            pool.map(lambda ib: _count_block(config, x, ib[0], ib[1]), enumerate(sizes))
        )
    failures = sum(counts)
    p_hat = failures / total
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / total)
    return OutageEstimate(p_hat, Method.MONTE_CARLO, stderr=stderr)
