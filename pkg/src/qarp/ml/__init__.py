"""Classical learners for the recommendation stage, keyed by their report names."""

from __future__ import annotations

import numpy as np

from .base import NotFittedError, PredictionError
from .bayes import GaussianNB
from .ensemble import (
    AdaBoostClassifier,
    AdaBoostRegressor,
    BaggingClassifier,
    BaggingRegressor,
    GradientBoostingClassifier,
    RandomForestClassifier,
    RandomForestRegressor,
)
from .linear import LinearRegression, LinearSVM, LogisticRegression
from .neighbors import KNeighborsClassifier, KNeighborsRegressor, NearestCentroid
from .tree import DecisionTreeClassifier, DecisionTreeRegressor

# report name -> factory(seed)
CLASSIFIERS = {
    "DT": lambda seed: DecisionTreeClassifier(random_state=seed),
    "SVM": lambda seed: LinearSVM(),
    "SVM-Linear": lambda seed: LinearSVM(),
    "NaiveBayes": lambda seed: GaussianNB(),
    "kNN": lambda seed: KNeighborsClassifier(5),
    "NearestCentroid": lambda seed: NearestCentroid(),
    "LogisticRegression": lambda seed: LogisticRegression(),
    "RF": lambda seed: RandomForestClassifier(10, random_state=seed),
    "Ensemble-AB": lambda seed: AdaBoostClassifier(50, random_state=seed),
    "Ensemble-Bg": lambda seed: BaggingClassifier(10, random_state=seed),
    "Ensemble-GB": lambda seed: GradientBoostingClassifier(100, 0.1, 3, random_state=seed),
}

REGRESSORS = {
    "kNNR": lambda seed: KNeighborsRegressor(5),
    "Linear Regression": lambda seed: LinearRegression(),
    "DTR": lambda seed: DecisionTreeRegressor(random_state=seed),
    "Adaboost": lambda seed: AdaBoostRegressor(50, random_state=seed),
    "Bagging": lambda seed: BaggingRegressor(10, random_state=seed),
    "RF": lambda seed: RandomForestRegressor(10, random_state=seed),
}

# descriptive aliases
ALIASES = {
    "GaussianNB": ("classification", "NaiveBayes"),
    "LinearSVM": ("classification", "SVM-Linear"),
    "AdaBoostC": ("classification", "Ensemble-AB"),
    "GradientBoostC": ("classification", "Ensemble-GB"),
    "AdaBoostR": ("regression", "Adaboost"),
    "LinearRegression": ("regression", "Linear Regression"),
}


def make_learner(kind: str, task: str = "classification", seed: int = 0):
    if kind in ALIASES:
        task, kind = ALIASES[kind]
    table = CLASSIFIERS if task == "classification" else REGRESSORS
    if kind not in table:
        raise KeyError(f"no {task} model named {kind!r}")
    return table[kind](seed)


def fit(kind: str, X, y, seed: int = 0, task: str = "classification"):
    return make_learner(kind, task, seed).fit(np.asarray(X, dtype=float), y)


def predict(model, X):
    return model.predict(X)


def accuracy(y_true, y_pred) -> float:
    y_true, y_pred = np.asarray(y_true), np.asarray(y_pred)
    if len(y_true) != len(y_pred) or len(y_true) == 0:
        raise ValueError("accuracy needs two non-empty vectors of equal length")
    return float(np.mean(y_true == y_pred))


def mae(y_true, y_pred) -> float:
    y_true, y_pred = np.asarray(y_true, dtype=float), np.asarray(y_pred, dtype=float)
    if len(y_true) != len(y_pred) or len(y_true) == 0:
        raise ValueError("mae needs two non-empty vectors of equal length")
    return float(np.mean(np.abs(y_true - y_pred)))


__all__ = [
    "CLASSIFIERS", "REGRESSORS", "make_learner", "fit", "predict", "accuracy", "mae",
    "NotFittedError", "PredictionError",
    "DecisionTreeClassifier", "DecisionTreeRegressor", "LinearSVM", "LogisticRegression",
    "LinearRegression", "GaussianNB", "KNeighborsClassifier", "KNeighborsRegressor",
    "NearestCentroid", "RandomForestClassifier", "RandomForestRegressor", "BaggingClassifier",
    "BaggingRegressor", "AdaBoostClassifier", "AdaBoostRegressor", "GradientBoostingClassifier",
]
