"""sklearn-style facade over the window classifier.

LectureActivityClassifier keeps constructor arguments verbatim (so
get_params/set_params/clone work) and defers to the training loop on fit.
X is a list of WindowSample with materialized embeddings; y is optional and
overrides the windows' gold labels.
"""

import dataclasses

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .model import ModelConfig, forward_batch
from .taxonomy import N_CLASSES
from .training import TrainConfig, stratified_split, train
from .validation import check_labels, check_windows


class LectureActivityClassifier(BaseEstimator, ClassifierMixin):
    def __init__(
        self,
        n_context=15,
        lstm_units=512,
        head_units=2048,
        text_dim=1024,
        audio_dim=512,
        audio_steps_per_frame=49,
        epochs=10,
        batch_size=32,
        max_lr=0.001,
        eval_fraction=0.1,
        seed=0,
    ):
        self.n_context = n_context
        self.lstm_units = lstm_units
        self.head_units = head_units
        self.text_dim = text_dim
        self.audio_dim = audio_dim
        self.audio_steps_per_frame = audio_steps_per_frame
        self.epochs = epochs
        self.batch_size = batch_size
        self.max_lr = max_lr
        self.eval_fraction = eval_fraction
        self.seed = seed

    def _model_config(self):
        return ModelConfig(
            lstm_units=self.lstm_units,
            head_units=self.head_units,
            n_classes=N_CLASSES,
            n_context=self.n_context,
            text_dim=self.text_dim,
            audio_dim=self.audio_dim,
            audio_steps_per_frame=self.audio_steps_per_frame,
        )

    def _train_config(self):
        return TrainConfig(
            eval_fraction=self.eval_fraction,
            seed=self.seed,
            max_lr=self.max_lr,
            epochs=self.epochs,
            batch_size=self.batch_size,
        )

    def fit(self, X, y=None):
        X = check_windows(X, require_gold=y is None)
        if y is not None:
            labels = check_labels(y, len(X))
            X = [dataclasses.replace(w) for w in X]
            for w, label in zip(X, labels):
                w.center = dataclasses.replace(w.center, gold=label)
        train_set, eval_set = stratified_split(X, self.eval_fraction, self.seed)
        self.params_, self.history_ = train(
            train_set, eval_set, self._model_config(), self._train_config()
        )
        self.classes_ = np.arange(N_CLASSES)
        return self

    def predict_proba(self, X):
        self._check_fitted()
        return forward_batch(self.params_, check_windows(X))

    def predict(self, X):
        return self.predict_proba(X).argmax(axis=1)

    def _check_fitted(self):
        if not hasattr(self, "params_"):
            raise RuntimeError("estimator is not fitted; call fit first")
