"""scikit-learn compatible wrappers around the featurizer and the receiver MLP.

``SnapshotFeaturizer`` turns canonical snapshots (or pass events) into
feature rows; ``ReceiverMLP`` is a classifier over receiver unums 1..11.
Both follow the usual estimator contract (constructor stores parameters
only, ``fit`` returns self, fitted attributes end in ``_``) so they can be
cloned, grid-searched and chained in a ``Pipeline``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from passcast import mlp
from passcast.features import Level, extract_many, feature_names
from passcast.geometry import FieldSpec, Snapshot
from passcast.labeler import PassEvent

CLASSES = np.arange(1, 12)


def _as_snapshots(X) -> list[Snapshot]:
    out = []
    for item in X:
        if isinstance(item, PassEvent):
            item = item.state
        if not isinstance(item, Snapshot):
            raise TypeError(f"expected Snapshot or PassEvent, got {type(item).__name__}")
        out.append(item)
    return out


class SnapshotFeaturizer(TransformerMixin, BaseEstimator):
    """Stateless transformer: canonical snapshots -> (n, 92|352|385) array."""

    def __init__(self, level="high", field=None):
        self.level = level
        self.field = field

    def fit(self, X=None, y=None):
        self.level_ = Level.parse(self.level)
        self.field_ = self.field if self.field is not None else FieldSpec()
        self.n_features_out_ = self.level_.dim
        return self

    def transform(self, X):
        check_is_fitted(self, "level_")
        return extract_many(_as_snapshots(X), self.level_, self.field_)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "level_")
        return np.asarray(feature_names(self.level_), dtype=object)


class ReceiverMLP(ClassifierMixin, BaseEstimator):
    """Softmax MLP predicting which of the 11 teammates receives the ball.

    Parameters mirror ``mlp.TrainConfig``; ``hidden_layer_sizes`` excludes
    the input and the 11-way output layer.
    """

    def __init__(
        self,
        hidden_layer_sizes=(64,),
        learning_rate=0.01,
        batch_size=32,
        epochs=50,
        seed=0,
        validation_fraction=0.2,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.seed = seed
        self.validation_fraction = validation_fraction

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        y = np.asarray(y)
        if not np.all(np.isin(y, CLASSES)):
            raise ValueError("labels must be receiver unums 1..11")
        cfg = mlp.TrainConfig(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            seed=self.seed,
            validation_fraction=self.validation_fraction,
        )
        sizes = [X.shape[1], *self.hidden_layer_sizes, len(CLASSES)]
        self.model_, self.history_ = mlp.train(X, y, sizes, cfg)
        self.classes_ = CLASSES.copy()
        self.n_features_in_ = X.shape[1]
        return self

    @classmethod
    def from_model(cls, model: mlp.Model) -> "ReceiverMLP":
        """Wrap an already trained (or loaded) model as a fitted estimator."""
        est = cls(hidden_layer_sizes=tuple(model.layer_sizes[1:-1]), seed=model.seed or 0)
        est.model_ = model
        est.history_ = mlp.TrainHistory()
        est.classes_ = CLASSES.copy()
        est.n_features_in_ = model.n_inputs
        return est

    def _validated(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise mlp.DimensionMismatch(
                f"X has {X.shape[1]} features, but the model was fitted with {self.n_features_in_}"
            )
        return X

    def predict_proba(self, X):
        X = self._validated(X)
        return mlp.forward(self.model_, X)

    def predict(self, X):
        return self.predict_topk(X, 1)[:, 0]

    def predict_topk(self, X, k=2):
        """(n, k) array of unums, most likely first; ties go to the lower unum."""
        return mlp.topk_indices(self.predict_proba(X), k) + 1

    def topk_score(self, X, y, k=2):
        return mlp.topk_accuracy(self.predict_proba(X), np.asarray(y, dtype=int) - 1, k)
