"""RX anomaly scoring, quantile binarization, blob extraction and the objective."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DetectorUnavailable, InputError
from .imaging import to_global, to_local

MIN_COVERED = 32


@dataclass
class AnomalyField:
    scores: np.ndarray  # (h, w); 0 where uncovered
    coverage: np.ndarray  # (h, w) bool
    mean: np.ndarray  # (bands,)
    cov: np.ndarray  # (bands, bands), regularized
    window: tuple = None

    def covered_scores(self):
        return self.scores[self.coverage]


def rx_scores(image):
    """Squared Mahalanobis distance of every covered cell to the image statistics."""
    chan = image.channels
    cover = image.coverage
    vals = chan[cover]
    return rx_from_values(vals, cover, image.window)


def rx_from_values(vals, cover, window=None, min_covered=MIN_COVERED):
    vals = np.asarray(vals, dtype=np.float64)
    if len(vals) < min_covered:
        raise DetectorUnavailable(f"{len(vals)} covered cells, need {min_covered}")
    # shifting by one sample first keeps constant bands exactly zero
    shifted = vals - vals[0]
    shift = shifted.mean(axis=0)
    mean = vals[0] + shift
    d = shifted - shift
    cov = d.T @ d / len(vals)
    bands = cov.shape[0]
    eps = 1e-6 * np.trace(cov) / bands
    cov = cov + eps * np.eye(bands)
    if eps == 0.0:
        s = np.zeros(len(vals))
    else:
        s = np.einsum("ij,ij->i", d @ np.linalg.inv(cov), d)
        np.maximum(s, 0.0, out=s)
    scores = np.zeros(cover.shape)
    scores[cover] = s
    return AnomalyField(scores, cover, mean, cov, window)


def nearest_rank_threshold(values, q):
    """Value of rank ceil(q * m) in ascending order; -inf when that rank is 0."""
    if not 0.0 <= q <= 1.0:
        raise InputError(f"quantile must be in [0, 1], got {q}")
    m = len(values)
    # rounding guards q * m landing a hair above an integer
    k = math.ceil(round(q * m, 9))
    if k == 0 or m == 0:
        return -np.inf
    return float(np.partition(values, k - 1)[k - 1])


def threshold_mask(field, q):
    """Covered cells whose score is strictly above the nearest-rank q-quantile."""
    s = field.covered_scores()
    thr = nearest_rank_threshold(s, q)
    return field.coverage & (field.scores > thr)


@dataclass
class Blob:
    cells: np.ndarray  # flat indices in the frame the blob was extracted from
    contour: np.ndarray  # subset of cells on the border
    centroid: tuple  # world (x, y) of the contour cells, or (col, row) without a spec
    bbox: tuple  # (row_min, col_min, row_max, col_max) in frame coordinates
    label: int

    @property
    def size(self):
        return len(self.cells)

    @property
    def contour_size(self):
        return len(self.contour)


def _blobs(idx, width, height):
    labels = kernels.label_sparse(idx, width, height)
    border = kernels.border_flags(idx, width, height)
    return labels, border


def largest_blob_sparse(idx, width, height):
    """Largest blob by contour size (ties: member count, then lower label).

    Returns (members, contour_members, label) as flat indices in the
    ``width`` x ``height`` frame, or None for an empty mask.
    """
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size == 0:
        return None
    labels, border = _blobs(idx, width, height)
    nlab = int(labels.max()) + 1
    csize = np.bincount(labels, weights=border, minlength=nlab)
    msize = np.bincount(labels, minlength=nlab)
    # lexsort: last key is primary
    order = np.lexsort((np.arange(nlab), -msize, -csize))
    best = int(order[0])
    sel = labels == best
    return idx[sel], idx[sel & border], best


def largest_blob(mask, spec=None, window=None):
    """Largest 8-connected blob of a dense boolean mask, or None.

    With ``spec`` and ``window`` the centroid is in world metres, otherwise
    in (column, row) cell units.
    """
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    found = largest_blob_sparse(np.flatnonzero(mask), w, h)
    if found is None:
        return None
    cells, contour, label = found
    rows, cols = cells // w, cells % w
    bbox = (int(rows.min()), int(cols.min()), int(rows.max()), int(cols.max()))
    cr, cc = contour // w, contour % w
    if spec is not None:
        x, y = spec.cell_center(cr + window[0], cc + window[1])
        centroid = (float(np.mean(x)), float(np.mean(y)))
    else:
        centroid = (float(np.mean(cc)), float(np.mean(cr)))
    return Blob(cells, contour, centroid, bbox, label)


@dataclass
class ObjectiveResult:
    score: int
    position: tuple  # world (x, y) or None
    blob_idx: np.ndarray  # global flat indices of blob members
    contour_idx: np.ndarray


def evaluate(integral, spec):
    """Objective of an integral mask with the blob that produced it."""
    win = integral.window
    local = to_local(integral.mask_idx, spec, win)
    found = largest_blob_sparse(local, win[3], win[2])
    if found is None:
        empty = np.zeros(0, dtype=np.int64)
        return ObjectiveResult(0, None, empty, empty)
    cells, contour, _ = found
    x, y = spec.cell_center(contour // win[3] + win[0], contour % win[3] + win[1])
    return ObjectiveResult(len(contour), (float(np.mean(x)), float(np.mean(y))),
                           to_global(cells, spec, win), to_global(contour, spec, win))


def objective(integral, spec):
    """(O, estimated position): contour size of the largest blob and its contour centroid."""
    r = evaluate(integral, spec)
    return r.score, r.position


def detect(image, q, spec):
    """Capture pipeline: RX, threshold, and the flagged cells as sorted global indices."""
    try:
        field = rx_scores(image)
    except DetectorUnavailable:
        return np.zeros(0, dtype=np.int64)
    mask = threshold_mask(field, q)
    return to_global(np.flatnonzero(mask), spec, image.window)
