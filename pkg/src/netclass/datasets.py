"""Loaders for the public benchmark datasets.

Iris and Wine come from scikit-learn's bundled copies and the Palmer penguins
from the ``palmerpenguins`` package (both in the ``datasets`` extra). HTRU2 has
no bundled copy: point :func:`htru2` at the UCI ``HTRU_2.csv`` file.
"""

from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

from .data import Dataset, load_csv
from .errors import DataError

PENGUIN_FEATURES = ["bill_length_mm", "bill_depth_mm", "flipper_length_mm", "body_mass_g"]

HTRU2_FEATURES = [
    "profile_mean",
    "profile_std",
    "profile_excess_kurtosis",
    "profile_skewness",
    "dmsnr_mean",
    "dmsnr_std",
    "dmsnr_excess_kurtosis",
    "dmsnr_skewness",
]

HTRU2_ENV = "NETCLASS_HTRU2_CSV"


def _sklearn(name: str) -> Dataset:
    from sklearn import datasets as skd

    bunch = getattr(skd, f"load_{name}")()
    labels = np.array([str(bunch.target_names[t]) for t in bunch.target])
    return Dataset(bunch.data.astype(float), labels, [str(f) for f in bunch.feature_names])


def iris() -> Dataset:
    return _sklearn("iris")


def wine() -> Dataset:
    return _sklearn("wine")


def penguins_raw_path() -> Path:
    """Path of the 344-row penguins CSV shipped with ``palmerpenguins``."""
    import palmerpenguins

    return Path(palmerpenguins.__file__).parent / "data" / "penguins.csv"


def penguins() -> Dataset:
    """The four body measurements of each penguin, labelled by species.

    Categorical columns (island, sex) and the year are dropped, as are the two
    rows with missing measurements, leaving 342 rows.
    """
    feats, labels = [], []
    with penguins_raw_path().open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            vals = [row[c] for c in PENGUIN_FEATURES]
            if any(v in ("", "NA") for v in vals):
                continue
            feats.append([float(v) for v in vals])
            labels.append(row["species"])
    return Dataset(np.array(feats), np.array(labels), list(PENGUIN_FEATURES))


def htru2(path=None) -> Dataset:
    """HTRU2 pulsar candidates from ``path`` or ``$NETCLASS_HTRU2_CSV``.

    Accepts the headerless UCI file (8 features then the 0/1 class) or a CSV
    with a header whose label column is named ``class``.
    """
    path = path or os.environ.get(HTRU2_ENV)
    if not path:
        raise DataError(f"no HTRU2 file given; pass a path or set {HTRU2_ENV}")
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8") as fh:
        first = next(csv.reader(fh), [])
    try:
        [float(c) for c in first]
        headerless = True
    except ValueError:
        headerless = False
    if not headerless:
        return load_csv(path, "class")
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if data.shape[1] != 9:
        raise DataError(f"{path}: expected 9 columns, got {data.shape[1]}")
    labels = np.array([str(int(c)) for c in data[:, 8]])
    return Dataset(data[:, :8], labels, list(HTRU2_FEATURES))
