"""
Prakriti - Dosha Classification Toolkit
=======================================

Categorical machine-learning pipeline for Ayurvedic constitution (prakriti)
data: forward-fill imputation, chi-square feature selection, K-modes
clustering, Multinomial Naive Bayes and decision-tree classifiers, weighted
metrics and the test-size x feature-count sweep.

Quick Start
-----------
>>> from prakriti import ExperimentConfig, prepare_table, run_sweep, write_sweep
>>>
>>> # Synthetic 1000 x 147 questionnaire, labels from the 'dosha' column
>>> config = ExperimentConfig(seed=2023)
>>> table = prepare_table(config)
>>>
>>> # 2 models x 2 test sizes x 5 feature counts = 20 rows
>>> result = run_sweep(config, table, verbose=True)
>>> write_sweep(result, 'out/', plot=True)
>>>
>>> # Single stages
>>> from prakriti import load_csv, forward_fill, select_k_best, mnb
>>> table = forward_fill(load_csv('survey.csv'))
>>> ranking, reduced = select_k_best(table, 20)
>>> model = mnb.fit(reduced, alpha=1.0)

Command Line Usage
------------------
    python -m prakriti sweep --config dosha.toml --plot

Modules
-------
config
    Constants and the experiment configuration
dataset
    CSV ingestion, forward fill, encoding and splitting
feature_selection
    Chi-square ranking and SelectKBest
kmodes
    K-modes clustering and cluster naming
mnb
    Multinomial Naive Bayes
dtree
    Information-gain decision tree with reduced-error pruning
metrics
    Confusion matrix and weighted metrics
synth
    Synthetic data with planted class structure
models
    Estimator registry and JSON model files
experiment
    Pipeline, sweep and plot data
cli
    Command-line interface

Author: [Your Name]
License: MIT
"""

__version__ = "1.0.0"
__author__ = "[Your Name]"

# Configuration
from .config import (
    ExperimentConfig,
    DOSHA_NAMES,
    DEFAULT_SEED,
    DEFAULT_TEST_SIZES,
    DEFAULT_FEATURE_COUNTS,
    load_experiment_config,
)

# Errors
from .errors import (
    PrakritiError,
    ArgumentError,
    IngestError,
    SchemaError,
    ImputationError,
    StateError,
    InitializationError,
    FitError,
    PruneError,
    SelectionError,
    ConfigError,
    ModelFormatError,
)

# Data
from .dataset import (
    CategoricalTable,
    IngestOptions,
    SplitPair,
    MISSING,
    UNSEEN,
    load_csv,
    write_csv,
    forward_fill,
    train_test_split,
)

# Feature selection
from .feature_selection import (
    ContingencyTable,
    FeatureScore,
    build_contingency,
    chi_square_statistic,
    chi_square_p_value,
    select_k_best,
)

# Estimators (module-qualified: kmodes.fit, mnb.fit, dtree.fit ...)
from . import dtree, kmodes, mnb
from .kmodes import ClusterModel, ClusterNaming
from .mnb import MnbModel
from .dtree import TreeNode, TreeParams

# Metrics
from .metrics import (
    ConfusionMatrix,
    MetricsReport,
    confusion,
    report,
)

# Synthetic data
from .synth import GeneratorSpec, generate

# Models and experiment
from .models import TrainedModel, fit_model, predict_table, save_model, load_model
from .experiment import (
    SweepResult,
    PlotData,
    prepare_table,
    run_pipeline,
    run_sweep,
    emit_plot_data,
    write_sweep,
)

# Define public API
__all__ = [
    # Version
    '__version__',
    '__author__',
    # Config
    'ExperimentConfig',
    'DOSHA_NAMES',
    'DEFAULT_SEED',
    'DEFAULT_TEST_SIZES',
    'DEFAULT_FEATURE_COUNTS',
    'load_experiment_config',
    # Errors
    'PrakritiError',
    'ArgumentError',
    'IngestError',
    'SchemaError',
    'ImputationError',
    'StateError',
    'InitializationError',
    'FitError',
    'PruneError',
    'SelectionError',
    'ConfigError',
    'ModelFormatError',
    # Data
    'CategoricalTable',
    'IngestOptions',
    'SplitPair',
    'MISSING',
    'UNSEEN',
    'load_csv',
    'write_csv',
    'forward_fill',
    'train_test_split',
    # Feature selection
    'ContingencyTable',
    'FeatureScore',
    'build_contingency',
    'chi_square_statistic',
    'chi_square_p_value',
    'select_k_best',
    # Estimators
    'dtree',
    'kmodes',
    'mnb',
    'ClusterModel',
    'ClusterNaming',
    'MnbModel',
    'TreeNode',
    'TreeParams',
    # Metrics
    'ConfusionMatrix',
    'MetricsReport',
    'confusion',
    'report',
    # Synthetic data
    'GeneratorSpec',
    'generate',
    # Models and experiment
    'TrainedModel',
    'fit_model',
    'predict_table',
    'save_model',
    'load_model',
    'SweepResult',
    'PlotData',
    'prepare_table',
    'run_pipeline',
    'run_sweep',
    'emit_plot_data',
    'write_sweep',
]
