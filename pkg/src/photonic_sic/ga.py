"""Genetic search over reference delays and amplitudes.

Genes are integer grid indices, so every candidate is quantised to the
search-space resolution by construction. Fitness is the SIC depth (dB) of
each candidate; a whole generation is scored by one call to the fitness
function, which for the photonic link is one segmented capture.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .delay import Candidate, CorrelationResult, SegmentPlan, build_segmented_reference, segment_powers
from .errors import ConfigurationError, EstimationError

__all__ = [
    "SearchSpace",
    "GaConfig",
    "GaIteration",
    "GaHistory",
    "SegmentedFitness",
    "stage1_ranges",
    "ga_run",
    "stage3_refine",
]


@dataclass(frozen=True)
class SearchSpace:
    delay_ranges_s: tuple
    amplitude_ranges: tuple
    delay_resolution_s: float = 1e-12
    amplitude_resolution: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "delay_ranges_s", tuple(tuple(map(float, r)) for r in self.delay_ranges_s))
        object.__setattr__(self, "amplitude_ranges", tuple(tuple(map(float, r)) for r in self.amplitude_ranges))
        if len(self.delay_ranges_s) != len(self.amplitude_ranges) or not self.delay_ranges_s:
            raise ConfigurationError("need one delay and one amplitude range per reference")
        for lo, hi in self.delay_ranges_s + self.amplitude_ranges:
            if not lo < hi:
                raise ConfigurationError(f"empty range ({lo}, {hi})")
        for lo, hi in self.amplitude_ranges:
            if lo < 0 or hi > 1:
                raise ConfigurationError("amplitude ranges must lie in [0, 1]")
        if self.delay_resolution_s <= 0 or self.amplitude_resolution <= 0:
            raise ConfigurationError("resolutions must be positive")

    @property
    def n_refs(self):
        return len(self.delay_ranges_s)

    def _axes(self):
        res = [self.delay_resolution_s] * self.n_refs + [self.amplitude_resolution] * self.n_refs
        return list(self.delay_ranges_s + self.amplitude_ranges), res

    def levels(self):
        """Number of grid points along every dimension."""
        rngs, res = self._axes()
        return np.array([int(math.floor((hi - lo) / r + 1e-9)) + 1 for (lo, hi), r in zip(rngs, res)])

    def values(self, genes):
        """Physical values of integer genes, shape (n, 2 * n_refs)."""
        rngs, res = self._axes()
        lo = np.array([r[0] for r in rngs])
        return lo + np.asarray(genes) * np.array(res)

    def candidate(self, gene_row):
        v = self.values(gene_row)
        k = self.n_refs
        return Candidate(np.round(v[:k] * 1e15) / 1e15, np.round(v[k:] * 1e9) / 1e9)

    def genes_of(self, cand: Candidate):
        """Nearest grid genes for a candidate (clipped into the space)."""
        rngs, res = self._axes()
        vals = list(cand.delays_s) + list(cand.amplitudes)
        g = [int(round((v - r[0]) / s)) for v, r, s in zip(vals, rngs, res)]
        return np.clip(g, 0, self.levels() - 1)

    def sample(self, rng, n):
        return rng.integers(0, self.levels(), size=(n, self.levels().size))

    def to_dict(self):
        return {
            "delay_ranges_ps": [[lo * 1e12, hi * 1e12] for lo, hi in self.delay_ranges_s],
            "amplitude_ranges": [list(r) for r in self.amplitude_ranges],
            "delay_resolution_ps": self.delay_resolution_s * 1e12,
            "amplitude_resolution": self.amplitude_resolution,
        }


@dataclass(frozen=True)
class GaConfig:
    population: int = 152
    mutation_rate: float = 0.1
    iterations: int = 11
    elite_fraction: float = 0.5
    seed: int = 0
    target_depth_db: float | None = None

    def __post_init__(self):
        if self.population < 2:
            raise ConfigurationError("population must exceed 1")
        if not 0 <= self.mutation_rate <= 1:
            raise ConfigurationError("mutation_rate must be in [0, 1]")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be at least 1")
        if not 0 < self.elite_fraction <= 1:
            raise ConfigurationError("elite_fraction must be in (0, 1]")


@dataclass
class GaIteration:
    iteration: int
    best: Candidate
    best_fitness: float
    population: np.ndarray
    fitness: np.ndarray

    def to_dict(self):
        return {
            "iteration": self.iteration,
            "best_delays_ps": [d * 1e12 for d in self.best.delays_s],
            "best_amplitudes": list(self.best.amplitudes),
            "depth_db": self.best_fitness,
            "population": np.round(self.population, 15).tolist(),
            "fitness": [None if not np.isfinite(f) else float(f) for f in self.fitness],
        }


@dataclass
class GaHistory:
    space: SearchSpace
    iterations: list = field(default_factory=list)
    captures: int = 0

    @property
    def best(self):
        return self.iterations[-1].best

    @property
    def best_fitness(self):
        return self.iterations[-1].best_fitness

    def best_curve(self):
        return [it.best_fitness for it in self.iterations]

    def to_dict(self):
        return {
            "space": self.space.to_dict(),
            "captures": self.captures,
            "iterations": [it.to_dict() for it in self.iterations],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


class SegmentedFitness:
    """Scores a generation with segmented captures of the link.

    Fitness of a candidate is the depth of its segment relative to the same
    segment of a reference-muted ``baseline`` capture.
    """

    def __init__(self, evaluator, plan: SegmentPlan, banks, band, baseline=None, edge_fraction=0.01):
        self.evaluator = evaluator
        self.plan = plan
        self.banks = banks
        self.band = band
        self.edge_fraction = edge_fraction
        if baseline is None:
            silence = build_segmented_reference(banks, plan, [])
            baseline = segment_powers(evaluator.submit(silence), plan, band, edge_fraction)
        self.baseline = np.asarray(baseline)
        usable = plan.usable_indices()
        self._valid = self.baseline >= 1e-3 * np.median(self.baseline[usable])
        self.captures = 0

    def __call__(self, candidates):
        out = np.empty(len(candidates))
        usable = self.plan.usable_indices()
        for start in range(0, len(candidates), self.plan.usable):
            batch = candidates[start : start + self.plan.usable]
            frame = build_segmented_reference(self.banks, self.plan, batch)
            p = segment_powers(self.evaluator.submit(frame), self.plan, self.band, self.edge_fraction)
            self.captures += 1
            u = usable[: len(batch)]
            with np.errstate(divide="ignore"):
                d = 10 * np.log10(self.baseline[u] / np.maximum(p[u], 1e-300))
            out[start : start + len(batch)] = np.where(self._valid[u], d, -np.inf)
        return out


def stage1_ranges(
    xcorr_results,
    si_total_power: float,
    ref_power: float,
    delay_window_s: float = 200e-12,
    amplitude_window: float = 0.25,
    round_to_s: float = 100e-12,
    delay_resolution_s: float = 1e-12,
    amplitude_resolution: float = 0.01,
) -> SearchSpace:
    """Search box from rough delays and a pooled amplitude estimate.

    Rough delays are rounded to ``round_to_s`` (the correlation resolution of
    the capture) before the window is applied; the pooled amplitude is
    ``sqrt(si_total_power / ref_power)`` rounded to the amplitude resolution.
    """
    from .delay import amplitude_from_power

    if not xcorr_results:
        raise EstimationError("stage 1 needs at least one correlation result")
    delays = []
    for r in xcorr_results:
        if not isinstance(r, CorrelationResult) or not r.peak_lags_s:
            raise EstimationError("correlation result has no peaks")
        d = r.rough_delay_s
        if round_to_s:
            d = round(d / round_to_s) * round_to_s
        delays.append(d)
    a = amplitude_from_power(si_total_power, ref_power)
    a = round(a / amplitude_resolution) * amplitude_resolution
    lo = max(0.0, round(a - amplitude_window, 9))
    hi = min(1.0, round(a + amplitude_window, 9))
    return SearchSpace(
        tuple((max(0.0, d - delay_window_s), d + delay_window_s) for d in delays),
        tuple((lo, hi) for _ in delays),
        delay_resolution_s,
        amplitude_resolution,
    )


def _select(genes, fit, n):
    order = np.argsort(-fit, kind="stable")[:n]
    return genes[order], fit[order]


def ga_run(fitness, space: SearchSpace, cfg: GaConfig, init=None):
    """Run the elitist GA; returns (best candidate, history).

    ``fitness`` maps a list of candidates to an array of depths (higher is
    better). Iteration 1 is the random initial population; every later
    iteration scores ``cfg.population`` offspring.
    """
    rng = np.random.default_rng(cfg.seed)
    levels = space.levels()
    n, d = cfg.population, levels.size
    history = GaHistory(space)
    genes = space.sample(rng, n) if init is None else np.asarray(init)
    fit = np.asarray(fitness([space.candidate(g) for g in genes]), dtype=float)
    genes, fit = _select(genes, fit, n)
    history.iterations.append(GaIteration(1, space.candidate(genes[0]), float(fit[0]), space.values(genes), fit))
    n_elite = max(2, int(math.ceil(cfg.elite_fraction * n)))
    for it in range(2, cfg.iterations + 1):
        if cfg.target_depth_db is not None and fit[0] >= cfg.target_depth_db:
            break
        elite = genes[:n_elite]
        p1 = elite[rng.integers(0, n_elite, n)]
        use_best = rng.random(n) < 0.5
        p1[use_best] = genes[0]
        p2 = elite[rng.integers(0, n_elite, n)]
        mask = rng.random((n, d)) < 0.5
        child = np.where(mask, p1, p2)
        mut = rng.random((n, d)) < cfg.mutation_rate
        child = np.where(mut, space.sample(rng, n), child)
        child_fit = np.asarray(fitness([space.candidate(g) for g in child]), dtype=float)
        genes, fit = _select(np.vstack([genes, child]), np.concatenate([fit, child_fit]), n)
        history.iterations.append(GaIteration(it, space.candidate(genes[0]), float(fit[0]), space.values(genes), fit))
    history.captures = getattr(fitness, "captures", 0)
    return history.best, history


def stage3_refine(space: SearchSpace, converged: GaHistory, shrink: float = 0.5) -> SearchSpace:
    """Box of ``shrink`` times the widths centred on the converged best.

    The delay resolution is halved; the amplitude resolution is kept.
    """
    if not converged.iterations:
        raise ConfigurationError("refinement needs a non-empty history")
    best = converged.best
    dr = []
    for (lo, hi), c in zip(space.delay_ranges_s, best.delays_s):
        half = shrink * (hi - lo) / 2
        dr.append((max(0.0, c - half), c + half))
    ar = []
    for (lo, hi), c in zip(space.amplitude_ranges, best.amplitudes):
        half = shrink * (hi - lo) / 2
        ar.append((max(0.0, round(c - half, 9)), min(1.0, round(c + half, 9))))
    return SearchSpace(tuple(dr), tuple(ar), space.delay_resolution_s / 2, space.amplitude_resolution)
