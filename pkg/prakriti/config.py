"""
Prakriti Configuration Module
=============================

Constants and the experiment configuration for the dosha pipeline.

Author: [Your Name]
License: MIT
"""

import tomllib
from dataclasses import dataclass, fields
from typing import Any, Dict, Optional, Tuple

from .errors import ConfigError


# Label vocabulary and file conventions
DOSHA_NAMES = (
    'Vata',
    'Pita',
    'Kapha',
    'Vata-Kapha',
    'Vata-Pita',
    'Pita-Kapha',
    'Vata-Pita-Kapha',
)
DEFAULT_LABEL_COLUMN = 'dosha'
DEFAULT_MISSING_TOKENS = ('', 'NA')

# Reproducibility: default runs never depend on the clock
DEFAULT_SEED = 2023

# Serialized artefacts
MODEL_FORMAT_VERSION = 1
CONFIG_SCHEMA_VERSION = 1

# Experiment grid
DEFAULT_TEST_SIZES = (0.1, 0.2)
DEFAULT_FEATURE_COUNTS = (20, 40, 60, 80, 100)
MODEL_IDS = ('mnb', 'dtree')

# K-modes
DEFAULT_K = 7
DEFAULT_MAX_ITER = 100

LABEL_SOURCES = ('auto', 'column', 'kmodes')


@dataclass
class ExperimentConfig:
    """
    Complete configuration of one test-size x feature-count sweep.

    All parameters needed to reproduce the protocol:
    - Data source (CSV file or synthetic generator)
    - Label source (explicit column or K-modes derived)
    - Sweep grid (test sizes x feature counts x models)
    - Model hyperparameters

    Example
    -------
    >>> config = ExperimentConfig(
    ...     data_path='survey.csv',
    ...     test_sizes=(0.1, 0.2),
    ...     feature_counts=(20, 40, 60, 80, 100),
    ... )
    """

    # ═══════════════════════════════════════════════════════════════════════
    # DATA
    # ═══════════════════════════════════════════════════════════════════════

    data_path: Optional[str] = None
    """CSV file to load. When None, a synthetic table is generated instead."""

    missing_tokens: Tuple[str, ...] = DEFAULT_MISSING_TOKENS
    """Cell values treated as missing during ingestion"""

    generator_rows: int = 1000
    """Synthetic rows when no data_path is given"""

    generator_features: int = 147
    """Synthetic feature count (the questionnaire has 147 attributes)"""

    generator_categories: int = 3
    """Categories per synthetic feature"""

    generator_informative: int = 20
    """Synthetic features that depend on the class"""

    generator_signal: float = 0.9
    """Probability an informative cell takes its class-preferred category"""

    generator_missing_rate: float = 0.02
    """Fraction of synthetic cells blanked before imputation"""

    # ═══════════════════════════════════════════════════════════════════════
    # LABELS
    # ═══════════════════════════════════════════════════════════════════════

    label_column: Optional[str] = DEFAULT_LABEL_COLUMN
    """Name of the class column in the CSV (None if the file has none)"""

    label_source: str = 'auto'
    """
    'column' uses the label column, 'kmodes' clusters the records into k
    groups and names them by majority vote, 'auto' picks 'column' when the
    table has labels and 'kmodes' otherwise. Labelling happens once, before
    the sweep, so every cell sees the same classes.
    """

    kmodes_k: int = DEFAULT_K
    """Number of clusters for K-modes derived labels"""

    kmodes_max_iter: int = DEFAULT_MAX_ITER
    """Iteration cap for K-modes"""

    kmodes_restarts: int = 1
    """Independent K-modes runs; the lowest-cost one is kept"""

    kmodes_init: str = 'random'
    """'random' (distinct records) or 'huang' (frequency based)"""

    # ═══════════════════════════════════════════════════════════════════════
    # SWEEP GRID
    # ═══════════════════════════════════════════════════════════════════════

    test_sizes: Tuple[float, ...] = DEFAULT_TEST_SIZES
    """Held-out fractions, outer loop of the result tables"""

    feature_counts: Tuple[int, ...] = DEFAULT_FEATURE_COUNTS
    """K values for SelectKBest, inner loop of the result tables"""

    models: Tuple[str, ...] = MODEL_IDS
    """Classifiers to evaluate"""

    stratified: bool = False
    """Stratify the train/test split by class"""

    select_after_split: bool = False
    """
    Fit feature selection on the training part only. The default (False)
    scores features on the full table before splitting, matching the
    workflow order; it leaks test labels into the ranking.
    """

    seed: int = DEFAULT_SEED
    """Master seed; per-cell seeds are derived from it"""

    # ═══════════════════════════════════════════════════════════════════════
    # MODELS
    # ═══════════════════════════════════════════════════════════════════════

    alpha: float = 1.0
    """Laplace smoothing for Multinomial Naive Bayes"""

    tree_max_depth: Optional[int] = None
    """Depth cap for the decision tree (None = unlimited)"""

    tree_min_samples_split: int = 2
    """Smallest node the tree will still split"""

    tree_min_gain: float = 0.0
    """Splits must gain strictly more information than this"""

    tree_prune: bool = False
    """Reduced-error post-pruning (off = full-grown tree)"""

    tree_prune_fraction: float = 0.2
    """Share of the training rows held out for pruning"""

    # ═══════════════════════════════════════════════════════════════════════
    # EXECUTION
    # ═══════════════════════════════════════════════════════════════════════

    workers: int = 1
    """Parallel sweep cells (1 = run in-process)"""

    # ═══════════════════════════════════════════════════════════════════════
    # DERIVED PROPERTIES
    # ═══════════════════════════════════════════════════════════════════════

    @property
    def cell_count(self) -> int:
        """Number of rows the sweep produces"""
        return len(self.models) * len(self.test_sizes) * len(self.feature_counts)

    @property
    def uses_generator(self) -> bool:
        """True when the data comes from the synthetic generator"""
        return self.data_path is None

    def validate(self, available_features: Optional[int] = None) -> None:
        """Raise ConfigError when the grid or hyperparameters are out of range."""
        for size in self.test_sizes:
            if not 0.0 < size < 1.0:
                raise ConfigError(f"test size {size} is outside (0, 1)")
        for count in self.feature_counts:
            if count < 1:
                raise ConfigError(f"feature count {count} must be positive")
            if available_features is not None and count > available_features:
                raise ConfigError(
                    f"feature count {count} exceeds the {available_features} available features"
                )
        unknown = [m for m in self.models if m not in MODEL_IDS]
        if unknown or not self.models:
            raise ConfigError(f"models must be a non-empty subset of {MODEL_IDS}, got {self.models}")
        if self.label_source not in LABEL_SOURCES:
            raise ConfigError(f"label_source must be one of {LABEL_SOURCES}")
        if self.kmodes_init not in ('random', 'huang'):
            raise ConfigError("kmodes_init must be 'random' or 'huang'")
        if self.alpha <= 0:
            raise ConfigError("alpha must be positive")
        if not 0.0 < self.tree_prune_fraction < 1.0:
            raise ConfigError("tree_prune_fraction must be in (0, 1)")
        if self.tree_min_samples_split < 2:
            raise ConfigError("tree_min_samples_split must be at least 2")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    def summary(self) -> str:
        """Return formatted configuration summary"""
        source = self.data_path or (
            f"synthetic {self.generator_rows} x {self.generator_features} "
            f"(signal {self.generator_signal:.2f})"
        )
        depth = 'unlimited' if self.tree_max_depth is None else str(self.tree_max_depth)
        return f"""
Prakriti Experiment Summary
══════════════════════════════════════════════════════════════
Data:
  Source:           {source}
  Labels:           {self.label_source} ({self.label_column})
  Missing Tokens:   {', '.join(repr(t) for t in self.missing_tokens)}

Sweep Grid:
  Test Sizes:       {', '.join(f'{s:g}' for s in self.test_sizes)}
  Feature Counts:   {', '.join(str(c) for c in self.feature_counts)}
  Models:           {', '.join(self.models)}
  Cells:            {self.cell_count}
  Stratified:       {self.stratified}
  Select After Split: {self.select_after_split}
  Seed:             {self.seed}

Models:
  MNB alpha:        {self.alpha:g}
  Tree Depth:       {depth}
  Tree Pruning:     {self.tree_prune} ({self.tree_prune_fraction:.0%} holdout)
══════════════════════════════════════════════════════════════
"""


# ═══════════════════════════════════════════════════════════════════════════════
# CONFIG FILES
# ═══════════════════════════════════════════════════════════════════════════════

_TOML_SECTIONS = {
    'data': {
        'path': 'data_path',
        'missing_tokens': 'missing_tokens',
    },
    'generator': {
        'rows': 'generator_rows',
        'features': 'generator_features',
        'categories': 'generator_categories',
        'informative': 'generator_informative',
        'signal': 'generator_signal',
        'missing_rate': 'generator_missing_rate',
    },
    'labels': {
        'column': 'label_column',
        'source': 'label_source',
    },
    'kmodes': {
        'k': 'kmodes_k',
        'max_iter': 'kmodes_max_iter',
        'restarts': 'kmodes_restarts',
        'init': 'kmodes_init',
    },
    'sweep': {
        'test_sizes': 'test_sizes',
        'feature_counts': 'feature_counts',
        'models': 'models',
        'stratified': 'stratified',
        'select_after_split': 'select_after_split',
        'seed': 'seed',
        'workers': 'workers',
    },
    'mnb': {
        'alpha': 'alpha',
    },
    'dtree': {
        'max_depth': 'tree_max_depth',
        'min_samples_split': 'tree_min_samples_split',
        'min_gain': 'tree_min_gain',
        'prune': 'tree_prune',
        'prune_fraction': 'tree_prune_fraction',
    },
}
"""TOML table/key → ExperimentConfig field"""


def config_from_mapping(document: Dict[str, Any], **overrides: Any) -> ExperimentConfig:
    """
    Build an ExperimentConfig from a parsed config document.

    Parameters
    ----------
    document : dict
        Parsed TOML; must contain ``schema_version``
    **overrides
        Field values that win over the document (e.g. ``seed`` from the CLI)

    Returns
    -------
    ExperimentConfig
    """
    version = document.get('schema_version')
    if version != CONFIG_SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported config schema_version {version!r} "
            f"(expected {CONFIG_SCHEMA_VERSION})"
        )

    values: Dict[str, Any] = {}
    for section, table in document.items():
        if section == 'schema_version':
            continue
        if section not in _TOML_SECTIONS or not isinstance(table, dict):
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in table.items():
            if key not in _TOML_SECTIONS[section]:
                raise ConfigError(f"unknown key '{key}' in [{section}]")
            values[_TOML_SECTIONS[section][key]] = value

    # TOML has no None: an empty label column or a negative depth means "not set"
    if values.get('label_column') == '':
        values['label_column'] = None
    if values.get('tree_max_depth') is not None and values['tree_max_depth'] < 0:
        values['tree_max_depth'] = None
    for name in ('missing_tokens', 'test_sizes', 'feature_counts', 'models'):
        if name in values:
            values[name] = tuple(values[name])

    known = {f.name for f in fields(ExperimentConfig)}
    values.update({k: v for k, v in overrides.items() if k in known and v is not None})
    config = ExperimentConfig(**values)
    config.validate()
    return config


def load_experiment_config(path: str, **overrides: Any) -> ExperimentConfig:
    """Read a TOML experiment file (see README for the layout)."""
    try:
        with open(path, 'rb') as fh:
            document = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_mapping(document, **overrides)
