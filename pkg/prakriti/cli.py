"""
Prakriti Command Line Interface
===============================

Main entry point for every pipeline stage and the full sweep.

Usage:
    python -m prakriti <command> [options]

    or after installation:

    prakriti <command> [options]

Exit status: 0 success, 1 data / model error, 2 sweep finished with failed
cells, 64 usage error. Exactly one summary line goes to standard output;
logs and warnings go to standard error.

Author: [Your Name]
License: MIT
"""

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

import pandas as pd

from .config import (
    DEFAULT_K,
    DEFAULT_MAX_ITER,
    DEFAULT_SEED,
    MODEL_IDS,
    ExperimentConfig,
    load_experiment_config,
)
from .dataset import IngestOptions, forward_fill, load_csv, write_csv
from .errors import PrakritiError, StateError
from .experiment import generator_spec, prepare_table, run_sweep, stage, write_sweep
from .feature_selection import select_k_best, write_ranking
from .metrics import CSV_COLUMNS, evaluate
from .models import decode_labels, fit_model, load_model, predict_table, save_model
from .synth import generate

logger = logging.getLogger('prakriti')

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 2
EXIT_USAGE = 64


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 64 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--seed', type=int, default=None,
        help=f'Master seed (default: {DEFAULT_SEED}, or the config file value)'
    )
    common.add_argument(
        '--config', type=str, default=None,
        help='TOML experiment file (schema_version = 1)'
    )
    common.add_argument(
        '--output-dir', type=str, default='.',
        help='Directory for output files (default: current directory)'
    )
    common.add_argument(
        '--format', choices=('csv', 'json'), default='csv',
        help='Tabular output format (default: csv)'
    )
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='Warnings and errors only')
    return common


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per pipeline stage"""
    common = _common_options()
    parser = UsageParser(
        prog='prakriti',
        description='Prakriti (dosha) classification toolkit',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    prakriti synth --rows 1000 --out data.csv            # Synthetic questionnaire
    prakriti select --k 20 --in data.csv                 # Top-20 chi-square ranking
    prakriti cluster --k 7 --in data.csv                 # K-modes labels
    prakriti train --model mnb --in data.csv --out model.json
    prakriti predict --model model.json --in new.csv     # Per-row dosha names
    prakriti evaluate --model model.json --in test.csv   # Metrics report
    prakriti sweep --config dosha.toml --plot            # Full result tables
        """
    )
    sub = parser.add_subparsers(dest='command', required=True, parser_class=UsageParser)

    # Synthetic data
    p = sub.add_parser('synth', parents=[common], help='Generate a synthetic labelled CSV')
    p.add_argument('--rows', type=int, default=None, help='Rows (default: 1000)')
    p.add_argument('--features', type=int, default=None, help='Features (default: 147)')
    p.add_argument('--categories', type=int, default=None, help='Categories per feature (default: 3)')
    p.add_argument('--informative', type=int, default=None, help='Informative features (default: 20)')
    p.add_argument('--signal', type=float, default=None, help='Signal strength in [0, 1] (default: 0.9)')
    p.add_argument('--missing-rate', type=float, default=None, help='Blanked cell share (default: 0.02)')
    p.add_argument('--out', type=str, default='synth.csv', help='Output CSV, relative to --output-dir')

    # Feature selection
    p = sub.add_parser('select', parents=[common], help='Chi-square feature ranking')
    p.add_argument('--in', dest='input', required=True, help='Labelled CSV')
    p.add_argument('--k', type=int, default=20, help='Features to keep (default: 20)')
    p.add_argument('--reduced-out', type=str, default=None, help='Also write the reduced CSV here')

    # Clustering
    p = sub.add_parser('cluster', parents=[common], help='K-modes clustering')
    p.add_argument('--in', dest='input', required=True, help='CSV (labels optional)')
    p.add_argument('--k', type=int, default=None, help=f'Clusters (default: {DEFAULT_K})')
    p.add_argument('--max-iter', type=int, default=None, help=f'Iteration cap (default: {DEFAULT_MAX_ITER})')
    p.add_argument('--restarts', type=int, default=None, help='Independent runs, lowest cost kept (default: 1)')
    p.add_argument('--init', choices=('random', 'huang'), default=None, help='Initial modes (default: random)')
    p.add_argument('--model-out', type=str, default='kmodes.json', help='Model JSON, relative to --output-dir')

    # Training
    p = sub.add_parser('train', parents=[common], help='Fit a classifier')
    p.add_argument('--model', choices=MODEL_IDS, required=True, help='Classifier')
    p.add_argument('--in', dest='input', required=True, help='Labelled training CSV')
    p.add_argument('--out', type=str, default='model.json', help='Model JSON, relative to --output-dir')
    p.add_argument('--alpha', type=float, default=None, help='MNB Laplace smoothing (default: 1.0)')
    p.add_argument('--max-depth', type=int, default=None, help='Tree depth cap (default: unlimited)')
    p.add_argument('--prune', action='store_true', default=None, help='Reduced-error pruning')

    # Prediction
    p = sub.add_parser('predict', parents=[common], help='Predict dosha names')
    p.add_argument('--model', required=True, help='Model JSON from train or cluster')
    p.add_argument('--in', dest='input', required=True, help='CSV with the model features')

    # Evaluation
    p = sub.add_parser('evaluate', parents=[common], help='Metrics on a labelled CSV')
    p.add_argument('--model', required=True, help='Model JSON from train or cluster')
    p.add_argument('--in', dest='input', required=True, help='Labelled CSV')

    # Sweep
    p = sub.add_parser('sweep', parents=[common], help='Test size x feature count sweep')
    p.add_argument('--data', type=str, default=None, help='CSV to use instead of the generator')
    p.add_argument('--workers', type=int, default=None, help='Parallel cells (default: 1)')
    p.add_argument('--plot', action='store_true', help='Also write PNG bar charts')

    return parser


def parse_args(args=None):
    """Parse command line arguments"""
    return build_parser().parse_args(args)


def _configure_logging(args) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format='%(levelname)s %(name)s: %(message)s',
        force=True,
    )
    logging.captureWarnings(True)


def _load_config(args, **overrides) -> ExperimentConfig:
    overrides['seed'] = args.seed
    if args.config:
        return load_experiment_config(args.config, **overrides)
    config = ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})
    config.validate()
    return config


def _out(args, name: str) -> str:
    os.makedirs(args.output_dir, exist_ok=True)
    return os.path.join(args.output_dir, name)


def _read(path: str, config: ExperimentConfig):
    with stage('load'):
        table = load_csv(
            path,
            IngestOptions(label_column=config.label_column, missing_tokens=config.missing_tokens),
        )
    with stage('impute'):
        return forward_fill(table)


def _write_records(records: List[dict], columns: List[str], path: str, fmt: str) -> None:
    if fmt == 'json':
        with open(path, 'w', encoding='utf-8') as fh:
            json.dump(records, fh, indent=2, ensure_ascii=False)
            fh.write('\n')
        return
    pd.DataFrame.from_records(records, columns=columns).to_csv(path, index=False, lineterminator='\n')


# ═══════════════════════════════════════════════════════════════════════════════
# COMMANDS
# ═══════════════════════════════════════════════════════════════════════════════

def cmd_synth(args) -> int:
    config = _load_config(
        args,
        generator_rows=args.rows,
        generator_features=args.features,
        generator_categories=args.categories,
        generator_informative=args.informative,
        generator_signal=args.signal,
        generator_missing_rate=args.missing_rate,
    )
    with stage('synth'):
        table = generate(generator_spec(config), config.seed)
    path = _out(args, args.out)
    write_csv(table, path, config.label_column or 'dosha')
    print(f"synth: wrote {table.row_count} rows x {table.column_count} features to {path}")
    return EXIT_OK


def cmd_select(args) -> int:
    config = _load_config(args)
    table = _read(args.input, config)
    with stage('select'):
        ranked, reduced = select_k_best(table, args.k)
    path = _out(args, f"ranking.{args.format}")
    write_ranking(ranked[:args.k], path, args.format)
    if args.reduced_out:
        write_csv(reduced, _out(args, args.reduced_out), config.label_column or 'dosha')
    top = ranked[0]
    print(
        f"select: kept {args.k} of {table.column_count} features "
        f"(top {top.feature_name}, chi2 {top.statistic:.2f}) -> {path}"
    )
    return EXIT_OK


def cmd_cluster(args) -> int:
    config = _load_config(
        args,
        kmodes_k=args.k,
        kmodes_max_iter=args.max_iter,
        kmodes_restarts=args.restarts,
        kmodes_init=args.init,
    )
    table = _read(args.input, config)
    with stage('cluster'):
        trained = fit_model('kmodes', table, config, config.seed)
    cluster = trained.estimator
    for note in trained.naming.warnings:
        logger.warning(note)

    names = trained.naming.mapping
    records = [
        {'row': int(row_id), 'cluster': int(c), 'label': names.get(int(c), '')}
        for row_id, c in zip(table.row_ids, cluster.assignments)
    ]
    path = _out(args, f"assignments.{args.format}")
    _write_records(records, ['row', 'cluster', 'label'], path, args.format)
    save_model(trained, _out(args, args.model_out))
    logger.info("cluster naming:\n%s", trained.naming.summary())
    print(
        f"cluster: k={cluster.k}, cost {cluster.cost} after {cluster.iterations_run} "
        f"iterations ({'converged' if cluster.converged else 'iteration cap'}) -> {path}"
    )
    return EXIT_OK


def cmd_train(args) -> int:
    config = _load_config(
        args,
        alpha=args.alpha,
        tree_max_depth=args.max_depth,
        tree_prune=args.prune,
    )
    table = _read(args.input, config)
    with stage('fit'):
        trained = fit_model(args.model, table, config, config.seed)
    path = _out(args, args.out)
    save_model(trained, path)
    print(
        f"train: {args.model} on {table.row_count} rows x {table.column_count} features "
        f"({len(trained.label_names)} classes) -> {path}"
    )
    return EXIT_OK


def _load_for_model(args, config):
    with stage('load'):
        trained = load_model(args.model)
    table = _read(args.input, config)
    with stage('conform'):
        table = trained.conform(table)
    return trained, table


def cmd_predict(args) -> int:
    config = _load_config(args)
    trained, table = _load_for_model(args, config)
    with stage('predict'):
        names = decode_labels(trained, predict_table(trained, table))
    records = [{'row': int(r), 'dosha': n} for r, n in zip(table.row_ids, names)]
    path = _out(args, f"predictions.{args.format}")
    _write_records(records, ['row', 'dosha'], path, args.format)
    print(f"predict: {len(records)} rows with {trained.model_id} -> {path}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    config = _load_config(args)
    trained, table = _load_for_model(args, config)
    if not table.has_labels:
        raise StateError(f"no label column '{config.label_column}' in {args.input}", stage='load')
    with stage('predict'):
        predicted = predict_table(trained, table)
    with stage('report'):
        report = evaluate(table.labels, predicted, trained.label_names)
    path = _out(args, f"report.{args.format}")
    if args.format == 'json':
        with open(path, 'w', encoding='utf-8') as fh:
            json.dump(report.to_dict(), fh, indent=2, ensure_ascii=False)
            fh.write('\n')
    else:
        # A whole-file evaluation has no held-out fraction
        columns = [c for c in CSV_COLUMNS if c != 'test_size']
        row = dict(zip(CSV_COLUMNS, report.csv_row(None, len(trained.feature_names))))
        _write_records([{c: row[c] for c in columns}], columns, path, 'csv')
    logger.info("evaluation:\n%s", report.summary())
    print(
        f"evaluate: accuracy {report.accuracy:.4f}, precision {report.precision_weighted:.4f}, "
        f"f_score {report.f1_weighted:.4f}, recall {report.recall_weighted:.4f} -> {path}"
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _load_config(args, data_path=args.data, workers=args.workers)
    logger.info(config.summary())
    table = prepare_table(config)
    result = run_sweep(config, table, verbose=False)
    written = write_sweep(result, args.output_dir, args.format, plot=args.plot)
    logger.info(result.summary())
    failed = len(result.failures)
    print(
        f"sweep: {len(result.rows) - failed}/{len(result.rows)} cells -> {written[0]}"
        + (f" ({failed} failed)" if failed else "")
    )
    return EXIT_PARTIAL if failed else EXIT_OK


COMMANDS = {
    'synth': cmd_synth,
    'select': cmd_select,
    'cluster': cmd_cluster,
    'train': cmd_train,
    'predict': cmd_predict,
    'evaluate': cmd_evaluate,
    'sweep': cmd_sweep,
}


def main(args: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = parse_args(args)
    _configure_logging(args)
    try:
        return COMMANDS[args.command](args)
    except PrakritiError as exc:
        print(f"error [{exc.stage or args.command}]: {exc.message}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
