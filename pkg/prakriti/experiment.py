"""
Prakriti Experiment Module
==========================

End-to-end pipeline and the test-size x feature-count sweep behind the
result tables and bar charts.

Pipeline for one cell
---------------------
    load / generate → forward fill → label (column or K-modes)   [once]
    select K best features → train/test split → fit → predict → report

Feature selection runs on the full table before the split by default
(the workflow order); ``select_after_split`` scores features on the
training part only.

Every cell draws its seeds from ``derive_seed(master, descriptor)``, so a
cell gives the same numbers whether it runs alone, inside a sweep, in any
order or in a worker process.

Author: [Your Name]
License: MIT
"""

import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from . import kmodes
from .config import ExperimentConfig
from .dataset import CategoricalTable, IngestOptions, forward_fill, load_csv, train_test_split
from .errors import PrakritiError, SelectionError, StateError
from .feature_selection import select_k_best
from .metrics import MetricsReport, evaluate
from .models import cluster_names, fit_model, predict_table
from .seeding import derive_seed
from .synth import GeneratorSpec, generate, spec_for

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ('model', 'test_size', 'n_features', 'accuracy', 'precision', 'f_score', 'recall')
PLOT_METRICS = ('accuracy', 'precision', 'f_score', 'recall')


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Attribute package errors raised inside the block to pipeline stage ``name``."""
    try:
        yield
    except PrakritiError as exc:
        raise exc.with_stage(name)


# ═══════════════════════════════════════════════════════════════════════════════
# RESULT TYPES
# ═══════════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class SweepRow:
    """One (model, test size, feature count) cell of the sweep."""

    model: str
    test_size: float
    n_features: int
    seed: int
    accuracy: float = math.nan
    precision: float = math.nan
    f_score: float = math.nan
    recall: float = math.nan
    elapsed_s: float = 0.0
    error: Optional[str] = None
    stage: Optional[str] = None
    report: Optional[MetricsReport] = field(default=None, compare=False)

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def key(self) -> str:
        return f"{self.model}_test{self.test_size:g}_k{self.n_features}"


@dataclass(frozen=True)
class SweepResult:
    """All cells of one sweep in table order (model, test size, feature count)."""

    rows: Tuple[SweepRow, ...]
    seed: int

    @property
    def failures(self) -> Tuple[SweepRow, ...]:
        return tuple(r for r in self.rows if not r.ok)

    @property
    def complete(self) -> bool:
        return not self.failures

    def to_frame(self) -> pd.DataFrame:
        """Successful cells with the result-table columns."""
        records = [
            {name: getattr(r, name) for name in SWEEP_COLUMNS}
            for r in self.rows
            if r.ok
        ]
        return pd.DataFrame.from_records(records, columns=list(SWEEP_COLUMNS))

    def summary(self) -> str:
        """Return the sweep as a banner-formatted table"""
        lines = [
            '',
            '═' * 66,
            ' SWEEP RESULTS',
            '═' * 66,
            f" {'model':<7}{'test':>6}{'K':>6}{'accuracy':>11}{'precision':>11}"
            f"{'f_score':>10}{'recall':>9}",
        ]
        for r in self.rows:
            if r.ok:
                lines.append(
                    f" {r.model:<7}{r.test_size:>6g}{r.n_features:>6}{r.accuracy:>11.4f}"
                    f"{r.precision:>11.4f}{r.f_score:>10.4f}{r.recall:>9.4f}"
                )
            else:
                lines.append(
                    f" {r.model:<7}{r.test_size:>6g}{r.n_features:>6}  failed [{r.stage}]: {r.error}"
                )
        lines.append('═' * 66)
        return '\n'.join(lines)


@dataclass(frozen=True)
class PlotData:
    """Grouped-bar data: one group per feature count, one bar per metric."""

    model: str
    test_size: float
    groups: Tuple[Tuple[int, Dict[str, float]], ...]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame.from_records(
            [{'n_features': n, **values} for n, values in self.groups],
            columns=['n_features', *PLOT_METRICS],
        )

    def to_dict(self) -> Dict:
        return {
            'model': self.model,
            'test_size': self.test_size,
            'metrics': list(PLOT_METRICS),
            'groups': [{'n_features': n, 'bars': values} for n, values in self.groups],
        }


# ═══════════════════════════════════════════════════════════════════════════════
# DATA PREPARATION
# ═══════════════════════════════════════════════════════════════════════════════

def generator_spec(config: ExperimentConfig) -> GeneratorSpec:
    return spec_for(
        config.generator_rows,
        config.generator_features,
        categories=config.generator_categories,
        informative=config.generator_informative,
        signal=config.generator_signal,
        missing_rate=config.generator_missing_rate,
    )


def label_with_kmodes(table: CategoricalTable, config: ExperimentConfig) -> CategoricalTable:
    """
    Replace the labels of ``table`` by K-modes cluster names.

    With reference labels, each cluster takes its majority label; without,
    clusters are named in order (cluster 0 → first dosha name, ...).
    """
    model = kmodes.fit_best(
        table,
        config.kmodes_k,
        derive_seed(config.seed, 'labels/kmodes'),
        config.kmodes_max_iter,
        config.kmodes_restarts,
        config.kmodes_init,
    )
    if table.has_labels:
        names = table.label_names
        naming = kmodes.name_clusters(model, table.labels, names)
    else:
        names = cluster_names(config.kmodes_k)
        naming = kmodes.positional_naming(model, names)
    logger.info(
        "k-modes labels: k=%d, cost %d after %d iterations",
        model.k, model.cost, model.iterations_run,
    )
    return table.with_labels(kmodes.apply_naming(model, naming, names), names)


def prepare_table(config: ExperimentConfig) -> CategoricalTable:
    """
    Load (or generate), impute and label the experiment table once.

    Returns
    -------
    CategoricalTable
        Labelled, without missing cells
    """
    with stage('load'):
        if config.uses_generator:
            table = generate(generator_spec(config), derive_seed(config.seed, 'generator'))
        else:
            table = load_csv(
                config.data_path,
                IngestOptions(label_column=config.label_column, missing_tokens=config.missing_tokens),
            )

    with stage('impute'):
        table = forward_fill(table)

    with stage('label'):
        source = config.label_source
        if source == 'auto':
            source = 'column' if table.has_labels else 'kmodes'
        if source == 'column':
            if not table.has_labels:
                raise StateError(f"no label column '{config.label_column}' in the data")
        else:
            table = label_with_kmodes(table, config)
    logger.info(
        "experiment table: %d rows x %d features, labels from %s",
        table.row_count, table.column_count, source,
    )
    return table


# ═══════════════════════════════════════════════════════════════════════════════
# PIPELINE
# ═══════════════════════════════════════════════════════════════════════════════

def cell_seed(master_seed: int, test_size: float, n_features: int) -> int:
    """Seed of one (test size, feature count) cell; shared by all models."""
    return derive_seed(master_seed, f"cell/test_size={test_size:g}/n_features={n_features}")


def run_pipeline(
    config: ExperimentConfig,
    test_size: float,
    n_features: int,
    model: str,
    table: Optional[CategoricalTable] = None,
) -> MetricsReport:
    """
    Run one cell: select → split → fit → predict → report.

    Parameters
    ----------
    config : ExperimentConfig
        Experiment settings (seed, hyperparameters, data source)
    test_size : float
        Held-out fraction
    n_features : int
        Features kept by SelectKBest
    model : str
        'mnb' or 'dtree'
    table : CategoricalTable, optional
        Output of prepare_table(); prepared from ``config`` when None

    Returns
    -------
    MetricsReport
        Metrics on the held-out rows; errors carry the failing stage
    """
    if table is None:
        table = prepare_table(config)
    seed = cell_seed(config.seed, test_size, n_features)

    if config.select_after_split:
        with stage('split'):
            split = train_test_split(table, test_size, seed, config.stratified)
        with stage('select'):
            _, train = select_k_best(split.train, n_features)
            test = split.test.select_columns(train.column_names)
    else:
        with stage('select'):
            _, reduced = select_k_best(table, n_features)
        with stage('split'):
            split = train_test_split(reduced, test_size, seed, config.stratified)
        train, test = split.train, split.test

    with stage('fit'):
        trained = fit_model(model, train, config, derive_seed(seed, f"fit/{model}"))
    with stage('predict'):
        predicted = predict_table(trained, test)
    with stage('report'):
        return evaluate(test.labels, predicted, table.label_names)


def _run_cell(
    config: ExperimentConfig, table: CategoricalTable, model: str, test_size: float, n_features: int
) -> SweepRow:
    seed = cell_seed(config.seed, test_size, n_features)
    start = time.perf_counter()
    try:
        report = run_pipeline(config, test_size, n_features, model, table)
    except PrakritiError as exc:
        logger.error("cell %s/%g/%d failed: %s", model, test_size, n_features, exc)
        message, failed_stage = exc.message, exc.stage
    except Exception as exc:
        # Unexpected library errors are recorded on the cell like package errors
        logger.exception("cell %s/%g/%d failed unexpectedly", model, test_size, n_features)
        message, failed_stage = f"{type(exc).__name__}: {exc}", None
    else:
        message = None

    if message is not None:
        return SweepRow(
            model=model,
            test_size=test_size,
            n_features=n_features,
            seed=seed,
            elapsed_s=time.perf_counter() - start,
            error=message,
            stage=failed_stage,
        )
    elapsed = time.perf_counter() - start
    logger.debug("cell %s/%g/%d: accuracy %.4f in %.2f s", model, test_size, n_features, report.accuracy, elapsed)
    return SweepRow(
        model=model,
        test_size=test_size,
        n_features=n_features,
        seed=seed,
        accuracy=report.accuracy,
        precision=report.precision_weighted,
        f_score=report.f1_weighted,
        recall=report.recall_weighted,
        elapsed_s=elapsed,
        report=report,
    )


def run_sweep(
    config: ExperimentConfig,
    table: Optional[CategoricalTable] = None,
    verbose: bool = False,
) -> SweepResult:
    """
    Evaluate every (model, test size, feature count) cell.

    Parameters
    ----------
    config : ExperimentConfig
        Grid, seed and hyperparameters
    table : CategoricalTable, optional
        Prepared table; prepare_table(config) is called when None
    verbose : bool
        Print the banner-formatted result table

    Returns
    -------
    SweepResult
        Rows ordered by model, then test size, then feature count; failed
        cells are kept with their error and stage
    """
    if table is None:
        table = prepare_table(config)
    config.validate(available_features=table.column_count)

    cells = [
        (model, test_size, n_features)
        for model in config.models
        for test_size in config.test_sizes
        for n_features in config.feature_counts
    ]
    logger.info("sweep: %d cells, %d worker(s)", len(cells), config.workers)

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = {
                cell: pool.submit(_run_cell, config, table, *cell) for cell in cells
            }
            done = {cell: future.result() for cell, future in futures.items()}
        rows = [done[cell] for cell in cells]
    else:
        rows = [_run_cell(config, table, *cell) for cell in cells]

    result = SweepResult(rows=tuple(rows), seed=config.seed)
    if result.failures:
        logger.warning("%d of %d cells failed", len(result.failures), len(rows))
    if verbose:
        print(result.summary())
    return result


# ═══════════════════════════════════════════════════════════════════════════════
# OUTPUTS
# ═══════════════════════════════════════════════════════════════════════════════

def emit_plot_data(result: SweepResult, model: str, test_size: float) -> PlotData:
    """
    Bar-chart data for one model and test size.

    Raises
    ------
    SelectionError
        No successful row matches (model, test_size)
    """
    rows = [
        r for r in result.rows
        if r.ok and r.model == model and math.isclose(r.test_size, test_size)
    ]
    if not rows:
        raise SelectionError(f"no sweep rows for model '{model}' at test size {test_size:g}")
    groups = tuple(
        (r.n_features, {m: getattr(r, m) for m in PLOT_METRICS})
        for r in sorted(rows, key=lambda r: r.n_features)
    )
    return PlotData(model=model, test_size=test_size, groups=groups)


def write_plot_data(plot: PlotData, path: str, fmt: str = 'csv') -> None:
    if fmt == 'json':
        with open(path, 'w', encoding='utf-8') as fh:
            json.dump(plot.to_dict(), fh, indent=2)
            fh.write('\n')
    else:
        plot.to_frame().to_csv(path, index=False, lineterminator='\n')


def plot_grouped_bars(plot: PlotData, save_path: str) -> plt.Figure:
    """
    Grouped bar chart: feature count on the x axis, four metric bars each.

    Parameters
    ----------
    plot : PlotData
        Output of emit_plot_data()
    save_path : str
        PNG file to write

    Returns
    -------
    matplotlib.figure.Figure
    """
    counts = [n for n, _ in plot.groups]
    x = np.arange(len(counts))
    width = 0.2
    colors = ('tab:blue', 'tab:orange', 'tab:green', 'tab:red')

    fig, ax = plt.subplots(figsize=(10, 5))
    for i, (metric, color) in enumerate(zip(PLOT_METRICS, colors)):
        heights = [values[metric] for _, values in plot.groups]
        ax.bar(x + (i - 1.5) * width, heights, width, color=color, alpha=0.8, label=metric)

    ax.set_xticks(x)
    ax.set_xticklabels([str(n) for n in counts])
    ax.set_xlabel('Number of features')
    ax.set_ylabel('Score')
    ax.set_ylim(0, 1.05)
    ax.set_title(f'Number of features vs metrics ({plot.model}, test size {plot.test_size:.0%})')
    ax.legend(loc='lower right')
    ax.grid(axis='y', alpha=0.3)

    plt.tight_layout()
    plt.savefig(save_path, dpi=150, bbox_inches='tight')
    plt.close(fig)
    logger.info("plot saved to %s", save_path)
    return fig


def write_sweep(
    result: SweepResult,
    output_dir: str,
    fmt: str = 'csv',
    plot: bool = False,
) -> List[str]:
    """
    Write the sweep artefacts.

    Files
    -----
    sweep.csv                              successful cells, result-table columns
    reports/<model>_test<size>_k<K>.json   full MetricsReport (or the error) per cell
    plot_<model>_test<size>.csv|json       grouped-bar data per model and test size
    plot_<model>_test<size>.png            charts, when ``plot`` is set

    Returns
    -------
    list of str
        Paths written, in the order above
    """
    os.makedirs(os.path.join(output_dir, 'reports'), exist_ok=True)
    written = []

    sweep_path = os.path.join(output_dir, 'sweep.csv')
    result.to_frame().to_csv(sweep_path, index=False, lineterminator='\n')
    written.append(sweep_path)

    for row in result.rows:
        path = os.path.join(output_dir, 'reports', f"{row.key}.json")
        document = {
            'model': row.model,
            'test_size': row.test_size,
            'n_features': row.n_features,
            'seed': row.seed,
        }
        if row.ok:
            document['report'] = row.report.to_dict()
        else:
            document['error'] = {'stage': row.stage, 'message': row.error}
        with open(path, 'w', encoding='utf-8') as fh:
            json.dump(document, fh, indent=2, ensure_ascii=False)
            fh.write('\n')
        written.append(path)

    seen = []
    for row in result.rows:
        pair = (row.model, row.test_size)
        if pair in seen:
            continue
        seen.append(pair)
        try:
            data = emit_plot_data(result, *pair)
        except SelectionError as exc:
            logger.warning("no plot data: %s", exc.message)
            continue
        stem = os.path.join(output_dir, f"plot_{row.model}_test{row.test_size:g}")
        write_plot_data(data, f"{stem}.{fmt}", fmt)
        written.append(f"{stem}.{fmt}")
        if plot:
            plot_grouped_bars(data, f"{stem}.png")
            written.append(f"{stem}.png")
    return written
