"""
Experiment engine: algorithm x instance x runs under a time or evaluation
budget, aggregated into the min / mean / success-rate rows of a results table.

Run i is seeded with ``base_seed + i``; numpy's SeedSequence expands that
integer into the run's private stream, so adding runs never changes the
earlier ones.
"""

import csv
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Optional

import numpy as np

from mincond.core.budget import DEFAULT_STAGNATION_LIMIT, SearchBudget, SearchContext
from mincond.core.engine import ConductanceValue, brute_force_min_conductance, evaluate_bits, format_decimal, write_partition
from mincond.core.errors import EmptyRecords, InvalidConfig, TooLarge
from mincond.core.genetic import DEFAULT_POP_SIZE, DEFAULT_TOURNAMENT_SIZE, GaConfig, aga_1px_run, aga_ux_run
from mincond.core.graph import Graph, largest_connected_component, load_edge_list
from mincond.core.local_search import DEFAULT_MOVE_MIX, SamplerConfig, als1_run, arls12_run, ls1_run
from mincond.core.memetic import DEFAULT_LS_LENGTH, AmaConfig, sts_ama_run

logger = logging.getLogger(__name__)

THREADS_ENV = "CONDUCTANCE_THREADS"
SUMMARY_HEADER = ["graph", "algorithm", "min_phi", "mean_phi", "success", "runs"]
RUNS_HEADER = ["run", "seed", "phi", "elapsed_ms", "evaluations", "restarts"]

# budget of each algorithm inside ``verify_small``
VERIFY_EVALUATIONS = 50_000
VERIFY_POP_SIZE = 20
VERIFY_LS_LENGTH = 1_000
VERIFY_STAGNATION = 2_000


@dataclass
class ExperimentConfig:
    instance_path: str
    algorithm: str
    runs: int = 1
    time_limit: Optional[float] = None
    iterations: Optional[int] = None
    base_seed: int = 0
    pop_size: int = DEFAULT_POP_SIZE
    tournament: int = DEFAULT_TOURNAMENT_SIZE
    ls_length: int = DEFAULT_LS_LENGTH
    stagnation: int = DEFAULT_STAGNATION_LIMIT
    move_mix: float = DEFAULT_MOVE_MIX
    ps_floor: Optional[float] = None
    lcc: bool = False
    out_summary: Optional[str] = None
    out_runs: Optional[str] = None
    out_partition: Optional[str] = None
    workers: Optional[int] = None

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise InvalidConfig(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.runs < 1:
            raise InvalidConfig(f"runs must be >= 1, got {self.runs}")
        if (self.time_limit is None) == (self.iterations is None):
            raise InvalidConfig("set exactly one of time limit and iteration budget")
        if not 0 <= self.move_mix <= 1:
            raise InvalidConfig(f"move mix must be in [0, 1], got {self.move_mix}")
        if self.ps_floor is not None and not 0 < self.ps_floor <= 0.5:
            raise InvalidConfig(f"ps floor must be in (0, 1/2], got {self.ps_floor}")
        if self.workers is not None and self.workers < 1:
            raise InvalidConfig(f"workers must be >= 1, got {self.workers}")
        # constructing them runs their own checks
        self.budget_for(0)
        if self.algorithm.startswith("aga"):
            self.ga_config()
        elif self.algorithm == "sts-ama":
            self.ama_config()

    def budget_for(self, run_index: int) -> SearchBudget:
        return SearchBudget(
            time_limit=self.time_limit,
            max_evaluations=self.iterations,
            stagnation_limit=self.stagnation,
            seed=self.base_seed + run_index,
        )

    def ga_config(self) -> GaConfig:
        return GaConfig(p=self.pop_size, t=self.tournament, ps_floor=self.ps_floor)

    def ama_config(self) -> AmaConfig:
        return AmaConfig(p=self.pop_size, t=self.tournament, l=self.ls_length,
                         move_mix=self.move_mix, ps_floor=self.ps_floor)

    def sampler(self, graph: Graph) -> SamplerConfig:
        return SamplerConfig.for_graph(graph, self.ps_floor)


@dataclass
class RunRecord:
    run_index: int
    seed: int
    best_conductance: ConductanceValue
    best_membership: np.ndarray = field(repr=False)
    elapsed: float
    evaluations: int
    restarts: int


@dataclass
class SummaryRow:
    graph_name: str
    algorithm: str
    min_phi: ConductanceValue
    mean_phi: Fraction
    success: int
    runs: int

    @property
    def success_rate(self) -> str:
        return f"{self.success} / {self.runs}"

    def csv_row(self) -> list[str]:
        return [self.graph_name, self.algorithm, self.min_phi.display(), format_decimal(self.mean_phi),
                str(self.success), str(self.runs)]


Runner = Callable[[Graph, ExperimentConfig, SearchBudget, SearchContext], np.ndarray]


def _ls1(graph, cfg, budget, context):
    return ls1_run(graph, budget, context).bits()


def _als1(graph, cfg, budget, context):
    return als1_run(graph, budget, context, cfg.sampler(graph)).bits()


def _arls12(graph, cfg, budget, context):
    return arls12_run(graph, budget, context, cfg.move_mix, cfg.sampler(graph)).bits()


def _aga_1px(graph, cfg, budget, context):
    return aga_1px_run(graph, cfg.ga_config(), budget, context).genotype


def _aga_ux(graph, cfg, budget, context):
    return aga_ux_run(graph, cfg.ga_config(), budget, context).genotype


def _sts_ama(graph, cfg, budget, context):
    return sts_ama_run(graph, cfg.ama_config(), budget, context).genotype


ALGORITHMS: dict[str, Runner] = {
    "ls1": _ls1,
    "als1": _als1,
    "arls12": _arls12,
    "aga-1px": _aga_1px,
    "aga-ux": _aga_ux,
    "sts-ama": _sts_ama,
}


def resolve_workers(cfg: ExperimentConfig) -> int:
    if cfg.workers is not None:
        return cfg.workers
    value = os.environ.get(THREADS_ENV)
    if value is None:
        return os.cpu_count() or 1
    try:
        workers = int(value)
    except ValueError:
        raise InvalidConfig(f"{THREADS_ENV} must be a positive integer, got {value!r}") from None
    if workers < 1:
        raise InvalidConfig(f"{THREADS_ENV} must be a positive integer, got {value!r}")
    return workers


def load_instance(cfg: ExperimentConfig) -> Graph:
    graph = load_edge_list(cfg.instance_path)
    return largest_connected_component(graph) if cfg.lcc else graph


def execute_run(graph: Graph, cfg: ExperimentConfig, run_index: int) -> RunRecord:
    budget = cfg.budget_for(run_index)
    context = budget.start()
    started = time.perf_counter()
    bits = ALGORITHMS[cfg.algorithm](graph, cfg, budget, context)
    elapsed = time.perf_counter() - started
    phi = evaluate_bits(graph, bits)
    logger.info("%s %s run %d: phi=%s evaluations=%d restarts=%d (%.2fs)",
                graph.name, cfg.algorithm, run_index, phi, context.evaluations, context.restarts, elapsed)
    return RunRecord(run_index, budget.seed, phi, bits, elapsed, context.evaluations, context.restarts)


def aggregate_stats(records: list[RunRecord], graph_name: str = "graph", algorithm: str = "") -> SummaryRow:
    """
    Min by exact order, mean over all runs kept as a Fraction, success =
    runs whose best equals the min exactly.
    """
    if not records:
        raise EmptyRecords("cannot summarise zero runs")
    min_phi = min(r.best_conductance for r in records)
    mean_phi = sum((r.best_conductance.as_fraction() for r in records), Fraction(0)) / len(records)
    success = sum(1 for r in records if r.best_conductance == min_phi)
    return SummaryRow(graph_name, algorithm, min_phi, mean_phi, success, len(records))


def _open_for_writing(path: str):
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    return open(path, "w", newline="", encoding="utf-8")


def emit_csv(rows: list[SummaryRow], records: list[RunRecord], summary_path: Optional[str],
             runs_path: Optional[str] = None) -> None:
    """Writes the summary table and, when ``runs_path`` is given, the per-run table."""
    if summary_path:
        with _open_for_writing(summary_path) as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(SUMMARY_HEADER)
            writer.writerows(row.csv_row() for row in rows)
    if runs_path:
        with _open_for_writing(runs_path) as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(RUNS_HEADER)
            for r in records:
                writer.writerow([r.run_index, r.seed, r.best_conductance.display(),
                                 round(r.elapsed * 1000), r.evaluations, r.restarts])


def run_experiment(cfg: ExperimentConfig, graph: Optional[Graph] = None) -> tuple[list[RunRecord], SummaryRow]:
    """
    Executes ``cfg.runs`` independent runs, in worker processes when more
    than one worker is allowed, then aggregates and writes the outputs.
    """
    cfg.validate()
    graph = graph if graph is not None else load_instance(cfg)
    workers = min(resolve_workers(cfg), cfg.runs)
    job = partial(execute_run, graph, cfg)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(job, range(cfg.runs)))
    else:
        records = [job(i) for i in range(cfg.runs)]

    summary = aggregate_stats(records, graph.name, cfg.algorithm)
    logger.info("%s %s: min %s mean %s success %s", graph.name, cfg.algorithm,
                summary.min_phi, format_decimal(summary.mean_phi), summary.success_rate)

    emit_csv([summary], records, cfg.out_summary, cfg.out_runs)
    if cfg.out_partition:
        best = min(records, key=lambda r: r.best_conductance)
        write_partition(cfg.out_partition, graph, best.best_membership, best.best_conductance)
    return records, summary


@dataclass
class VerifyEntry:
    algorithm: str
    phi: ConductanceValue
    reached: bool
    violation: bool


@dataclass
class VerifyReport:
    graph_name: str
    optimum: ConductanceValue
    witness: np.ndarray = field(repr=False)
    entries: list[VerifyEntry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(e.violation for e in self.entries)


def verify_small(instance, seed: int = 0, iterations: int = VERIFY_EVALUATIONS) -> VerifyReport:
    """
    Brute-forces the optimum of a small instance and runs every algorithm
    briefly against it. An algorithm reporting less than the optimum is a
    violation.

    Args:
        instance: edge-list path or a loaded Graph with at most 24 vertices.
    """
    graph = instance if isinstance(instance, Graph) else load_edge_list(instance)
    if graph.n > 24:
        raise TooLarge(f"{graph.name} has {graph.n} vertices; verification is limited to 24")
    optimum, witness = brute_force_min_conductance(graph)
    report = VerifyReport(graph.name, optimum, witness)

    for name in ALGORITHMS:
        cfg = ExperimentConfig(
            instance_path="", algorithm=name, iterations=iterations, base_seed=seed,
            pop_size=VERIFY_POP_SIZE, ls_length=VERIFY_LS_LENGTH, stagnation=VERIFY_STAGNATION,
        )
        record = execute_run(graph, cfg, 0)
        phi = record.best_conductance
        entry = VerifyEntry(name, phi, reached=phi == optimum, violation=phi < optimum)
        if entry.violation:
            logger.error("%s: %s reported %s below the optimum %s", graph.name, name, phi, optimum)
        report.entries.append(entry)
    return report


def relative_ordering(graph: Graph, algorithms: list[str], runs: int = 10, iterations: Optional[int] = 200_000,
                      base_seed: int = 0, time_limit: Optional[float] = None,
                      workers: Optional[int] = 1) -> dict[str, Fraction]:
    """
    Mean best conductance of each algorithm over short seeded runs.

    A ``time_limit`` replaces the evaluation budget.
    """
    means = {}
    for name in algorithms:
        cfg = ExperimentConfig(instance_path="", algorithm=name, runs=runs,
                               iterations=None if time_limit is not None else iterations,
                               time_limit=time_limit, base_seed=base_seed, workers=workers)
        _, summary = run_experiment(cfg, graph)
        means[name] = summary.mean_phi
    return means
