"""
Prakriti Models Module
======================

One interface over the three estimators (Multinomial Naive Bayes, decision
tree, K-modes) and their versioned JSON files.

Model file layout
-----------------
    {
      "format_version": 1,
      "model": "mnb" | "dtree" | "kmodes",
      "features": [{"name": "f000", "categories": ["c0", "c1", ...]}, ...],
      "classes": ["Vata", ...],
      "params": {...},
      "body": {...}
    }

Everything inside ``body`` is keyed by feature, category and class
*names*, never by index, so a file stays valid for any CSV with the same
columns. Loaders reject other format versions and model ids.

Author: [Your Name]
License: MIT
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from . import dtree, kmodes, mnb
from .config import DOSHA_NAMES, MODEL_FORMAT_VERSION, ExperimentConfig
from .dataset import CategoricalTable, conform
from .errors import ArgumentError, ModelFormatError, StateError

logger = logging.getLogger(__name__)

ESTIMATORS = ('mnb', 'dtree', 'kmodes')


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """A fitted estimator together with the schema it was trained on."""

    model_id: str
    estimator: Any
    """MnbModel, TreeNode or ClusterModel"""

    feature_names: Tuple[str, ...]
    vocabularies: Tuple[Tuple[str, ...], ...]
    label_names: Tuple[str, ...]
    params: Dict[str, Any] = field(default_factory=dict)
    naming: Optional[kmodes.ClusterNaming] = None
    """Cluster → class names (K-modes only)"""

    def conform(self, table: CategoricalTable) -> CategoricalTable:
        """Re-encode ``table`` against this model's schema."""
        labels = self.label_names if table.has_labels else None
        return conform(table, self.feature_names, self.vocabularies, labels)


def cluster_names(k: int) -> Tuple[str, ...]:
    """Class names for k unlabelled clusters: the dosha names when k fits, else cluster0..."""
    if k <= len(DOSHA_NAMES):
        return DOSHA_NAMES
    return tuple(f"cluster{c}" for c in range(k))


def tree_params(config: ExperimentConfig) -> dtree.TreeParams:
    return dtree.TreeParams(
        max_depth=config.tree_max_depth,
        min_samples_split=config.tree_min_samples_split,
        min_gain=config.tree_min_gain,
        prune=config.tree_prune,
        prune_fraction=config.tree_prune_fraction,
    )


# ═══════════════════════════════════════════════════════════════════════════════
# FIT / PREDICT
# ═══════════════════════════════════════════════════════════════════════════════

def fit_model(
    model_id: str,
    train: CategoricalTable,
    config: Optional[ExperimentConfig] = None,
    seed: int = 0,
) -> TrainedModel:
    """
    Fit one estimator.

    Parameters
    ----------
    model_id : str
        'mnb', 'dtree' or 'kmodes'
    train : CategoricalTable
        Imputed training rows (labelled for mnb / dtree)
    config : ExperimentConfig, optional
        Hyperparameters (defaults when None)
    seed : int
        Seed for the pruning holdout (dtree) or initial modes (kmodes)

    Returns
    -------
    TrainedModel
    """
    config = config or ExperimentConfig()
    if model_id == 'mnb':
        estimator = mnb.fit(train, config.alpha)
        params = {'alpha': config.alpha}
        naming = None
    elif model_id == 'dtree':
        tp = tree_params(config)
        estimator = dtree.fit(train, tp, seed)
        params = {
            'max_depth': tp.max_depth,
            'min_samples_split': tp.min_samples_split,
            'min_gain': tp.min_gain,
            'prune': tp.prune,
            'prune_fraction': tp.prune_fraction,
            'seed': int(seed),
        }
        naming = None
    elif model_id == 'kmodes':
        estimator = kmodes.fit_best(
            train,
            config.kmodes_k,
            seed,
            config.kmodes_max_iter,
            config.kmodes_restarts,
            config.kmodes_init,
        )
        params = {
            'k': config.kmodes_k,
            'max_iter': config.kmodes_max_iter,
            'restarts': config.kmodes_restarts,
            'init': config.kmodes_init,
            'seed': int(seed),
        }
        if train.has_labels:
            naming = kmodes.name_clusters(estimator, train.labels, train.label_names)
        else:
            naming = kmodes.positional_naming(estimator, cluster_names(config.kmodes_k))
    else:
        raise ArgumentError(f"unknown model '{model_id}' (expected one of {ESTIMATORS})")

    if train.has_labels:
        label_names = train.label_names
    elif naming is not None:
        label_names = cluster_names(config.kmodes_k)
    else:
        label_names = ()
    return TrainedModel(
        model_id=model_id,
        estimator=estimator,
        feature_names=train.column_names,
        vocabularies=train.vocabularies,
        label_names=tuple(label_names),
        params=params,
        naming=naming,
    )


def predict_table(model: TrainedModel, table: CategoricalTable) -> np.ndarray:
    """
    Class index per row of ``table`` (already in the model's schema).

    K-modes models return the class named for each row's nearest cluster;
    rows landing in an unnamed (empty) cluster raise StateError.
    """
    if table.column_names != model.feature_names:
        raise ArgumentError("table columns differ from the model's; conform() it first")
    if model.model_id == 'mnb':
        return mnb.predict_batch(model.estimator, table)
    if model.model_id == 'dtree':
        return dtree.predict_batch(model.estimator, table)
    clusters = kmodes.predict_batch(model.estimator, table)
    lookup = {name: i for i, name in enumerate(model.label_names)}
    per_cluster = np.array(
        [lookup.get(model.naming.mapping.get(c), -1) for c in range(model.estimator.k)],
        dtype=np.int64,
    )
    predicted = per_cluster[clusters]
    if np.any(predicted < 0):
        raise StateError("rows fall into an unnamed cluster", stage='predict')
    return predicted


# ═══════════════════════════════════════════════════════════════════════════════
# SERIALIZATION
# ═══════════════════════════════════════════════════════════════════════════════

def _mnb_body(model: TrainedModel) -> Dict[str, Any]:
    est: mnb.MnbModel = model.estimator
    classes = model.label_names
    return {
        'alpha': est.alpha,
        'class_counts': {c: int(n) for c, n in zip(classes, est.class_counts.tolist())},
        'log_prior': {c: float(v) for c, v in zip(classes, est.log_prior.tolist())},
        'feature_counts': {
            name: {
                cat: {c: int(n) for c, n in zip(classes, row)}
                for cat, row in zip(vocab, counts.tolist())
            }
            for name, vocab, counts in zip(model.feature_names, model.vocabularies, est.feature_counts)
        },
        'log_likelihood': {
            name: {
                cat: {c: float(v) for c, v in zip(classes, row)}
                for cat, row in zip(vocab, table.tolist())
            }
            for name, vocab, table in zip(model.feature_names, model.vocabularies, est.log_likelihood)
        },
    }


def _mnb_from_body(body, features, vocabularies, classes) -> mnb.MnbModel:
    counts = [
        [[body['feature_counts'][name][cat][c] for c in classes] for cat in vocab]
        for name, vocab in zip(features, vocabularies)
    ]
    return mnb.from_counts(
        body['alpha'],
        [body['class_counts'][c] for c in classes],
        counts,
        features,
        vocabularies,
        classes,
    )


def _tree_to_dict(node: dtree.TreeNode, model: TrainedModel) -> Dict[str, Any]:
    out = {
        'majority': model.label_names[node.majority_class],
        'samples': node.sample_count,
        'class_counts': {c: int(n) for c, n in zip(model.label_names, node.class_counts.tolist())},
    }
    if not node.is_leaf:
        vocab = model.vocabularies[node.feature]
        out['feature'] = model.feature_names[node.feature]
        out['children'] = {
            vocab[value]: _tree_to_dict(child, model) for value, child in node.children.items()
        }
    return out


def _tree_from_dict(data, features, vocabularies, classes) -> dtree.TreeNode:
    class_index = {c: i for i, c in enumerate(classes)}
    children = {}
    feature = None
    if 'feature' in data:
        feature = features.index(data['feature'])
        vocab = vocabularies[feature]
        children = {
            vocab.index(cat): _tree_from_dict(child, features, vocabularies, classes)
            for cat, child in data['children'].items()
        }
    return dtree.TreeNode(
        majority_class=class_index[data['majority']],
        sample_count=int(data['samples']),
        class_counts=np.array([data['class_counts'][c] for c in classes], dtype=np.int64),
        feature=feature,
        children=children,
    )


def _kmodes_body(model: TrainedModel) -> Dict[str, Any]:
    est: kmodes.ClusterModel = model.estimator
    return {
        'modes': [dict(zip(model.feature_names, mode)) for mode in est.decoded_modes()],
        'cost_trace': list(est.cost_trace),
        'moves_trace': list(est.moves_trace),
        'assignments': est.assignments.tolist(),
        'names': {str(c): name for c, name in model.naming.mapping.items()},
        'purity': {str(c): p for c, p in model.naming.purity.items()},
    }


def _kmodes_from_body(body, params, features, vocabularies) -> Tuple[kmodes.ClusterModel, kmodes.ClusterNaming]:
    modes = np.array(
        [[vocab.index(mode[name]) for name, vocab in zip(features, vocabularies)] for mode in body['modes']],
        dtype=np.int64,
    ).reshape(len(body['modes']), len(features))
    assignments = np.array(body['assignments'], dtype=np.int64)
    modes.setflags(write=False)
    assignments.setflags(write=False)
    cluster = kmodes.ClusterModel(
        k=len(body['modes']),
        modes=modes,
        assignments=assignments,
        cost_trace=tuple(body['cost_trace']),
        moves_trace=tuple(body['moves_trace']),
        iterations_run=len(body['cost_trace']),
        seed=int(params['seed']),
        max_iter=int(params['max_iter']),
        init=params['init'],
        feature_names=features,
        vocabularies=vocabularies,
    )
    naming = kmodes.ClusterNaming(
        mapping={int(c): name for c, name in body['names'].items()},
        purity={int(c): float(p) for c, p in body['purity'].items()},
        sizes={c: int(n) for c, n in enumerate(cluster.cluster_sizes.tolist())},
    )
    return cluster, naming


def model_to_dict(model: TrainedModel) -> Dict[str, Any]:
    if model.model_id == 'mnb':
        body = _mnb_body(model)
    elif model.model_id == 'dtree':
        body = {'root': _tree_to_dict(model.estimator, model)}
    else:
        body = _kmodes_body(model)
    return {
        'format_version': MODEL_FORMAT_VERSION,
        'model': model.model_id,
        'features': [
            {'name': name, 'categories': list(vocab)}
            for name, vocab in zip(model.feature_names, model.vocabularies)
        ],
        'classes': list(model.label_names),
        'params': model.params,
        'body': body,
    }


def model_from_dict(document: Dict[str, Any]) -> TrainedModel:
    """
    Rebuild a TrainedModel from its JSON document.

    Raises
    ------
    ModelFormatError
        Unknown format_version or model id, or a malformed body
    """
    version = document.get('format_version')
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format_version {version!r} (expected {MODEL_FORMAT_VERSION})"
        )
    model_id = document.get('model')
    if model_id not in ESTIMATORS:
        raise ModelFormatError(f"unknown model id {model_id!r}")

    try:
        features = tuple(f['name'] for f in document['features'])
        vocabularies = tuple(tuple(f['categories']) for f in document['features'])
        classes = tuple(document['classes'])
        params = dict(document.get('params', {}))
        body = document['body']
        naming = None
        if model_id == 'mnb':
            estimator = _mnb_from_body(body, features, vocabularies, classes)
        elif model_id == 'dtree':
            estimator = _tree_from_dict(body['root'], features, vocabularies, classes)
        else:
            estimator, naming = _kmodes_from_body(body, params, features, vocabularies)
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise ModelFormatError(f"malformed {model_id} model: {exc!r}") from exc

    return TrainedModel(
        model_id=model_id,
        estimator=estimator,
        feature_names=features,
        vocabularies=vocabularies,
        label_names=classes,
        params=params,
        naming=naming,
    )


def save_model(model: TrainedModel, path: str) -> None:
    """Write ``model`` as UTF-8 JSON."""
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(model_to_dict(model), fh, indent=2, ensure_ascii=False)
        fh.write('\n')
    logger.info("saved %s model to %s", model.model_id, path)


def load_model(path: str) -> TrainedModel:
    """Read a model file written by save_model()."""
    try:
        with open(path, encoding='utf-8') as fh:
            document = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not a JSON model file ({exc})") from exc
    except OSError as exc:
        raise ModelFormatError(f"cannot read {path}: {exc}") from exc
    if not isinstance(document, dict):
        raise ModelFormatError(f"{path}: not a JSON model file")
    return model_from_dict(document)


def decode_labels(model: TrainedModel, predicted: Sequence[int]) -> list:
    """Class indices → class names."""
    return [model.label_names[int(i)] for i in predicted]
