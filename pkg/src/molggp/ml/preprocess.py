"""Feature scalers and univariate feature selectors.

Both operate on a plain (rows, columns) array or on a FeatureMatrix; the
apply functions return the same type they were given.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from ..chem.featurize import FeatureMatrix
from ..special import f_sf

P_FLOOR = 1e-300


def _values(X) -> np.ndarray:
    return np.asarray(X.values if isinstance(X, FeatureMatrix) else X, dtype=float)


def _nonzero(d: np.ndarray) -> np.ndarray:
    return np.where(d == 0, 1.0, d)


@dataclass(frozen=True)
class ScalerState:
    kind: str
    params: dict[str, Any]
    center: np.ndarray | None = None  # per column; None for Normalizer
    scale: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "center": None if self.center is None else self.center.tolist(),
            "scale": None if self.scale is None else self.scale.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerState":
        arr = lambda v: None if v is None else np.asarray(v, dtype=float)  # noqa: E731
        return cls(d["kind"], d["params"], arr(d["center"]), arr(d["scale"]))


def fit_scaler(kind: str, params: dict[str, Any], X) -> ScalerState:
    A = _values(X)
    if A.shape[0] == 0:
        raise ValueError("cannot fit a scaler on an empty matrix")
    p = A.shape[1]
    zeros, ones = np.zeros(p), np.ones(p)
    if kind == "Normalizer":
        if params["norm"] not in ("l1", "l2", "max"):
            raise ValueError(f"unknown norm {params['norm']!r}")
        return ScalerState(kind, dict(params))
    if kind == "MinMaxScaler":
        lo = A.min(axis=0)
        return ScalerState(kind, {}, lo, _nonzero(A.max(axis=0) - lo))
    if kind == "MaxAbsScaler":
        return ScalerState(kind, {}, zeros, _nonzero(np.abs(A).max(axis=0)))
    if kind == "RobustScaler":
        q25, q50, q75 = np.percentile(A, [25, 50, 75], axis=0, method="linear")
        center = q50 if params["with_centering"] else zeros
        scale = _nonzero(q75 - q25) if params["with_scaling"] else ones
        return ScalerState(kind, dict(params), center, scale)
    if kind == "StandardScaler":
        center = A.mean(axis=0) if params["with_mean"] else zeros
        scale = _nonzero(A.std(axis=0)) if params["with_std"] else ones
        return ScalerState(kind, dict(params), center, scale)
    raise ValueError(f"unknown scaler {kind!r}")


def apply_scaler(state: ScalerState, X):
    A = _values(X)
    if state.kind == "Normalizer":
        norm = state.params["norm"]
        if norm == "l1":
            n = np.abs(A).sum(axis=1)
        elif norm == "l2":
            n = np.sqrt((A * A).sum(axis=1))
        else:
            n = np.abs(A).max(axis=1) if A.shape[1] else np.zeros(A.shape[0])
        out = A / _nonzero(n)[:, None]
    else:
        if A.shape[1] != state.center.shape[0]:
            raise ValueError(f"column-mismatch: expected {state.center.shape[0]}, got {A.shape[1]}")
        out = (A - state.center) / state.scale
    return replace(X, values=out) if isinstance(X, FeatureMatrix) else out


def f_classif(X, y) -> tuple[np.ndarray, np.ndarray]:
    """Two-group one-way ANOVA F statistic and p-value for every column."""
    A = _values(X)
    y = np.asarray(y)
    n = A.shape[0]
    groups = [A[y == c] for c in (0, 1)]
    if any(g.shape[0] == 0 for g in groups):
        raise ValueError("single-class input: both classes are required")
    if n < 3:
        raise ValueError("need at least 3 samples")
    mean = A.mean(axis=0)
    ssb = sum(g.shape[0] * (g.mean(axis=0) - mean) ** 2 for g in groups)
    ssw = sum(((g - g.mean(axis=0)) ** 2).sum(axis=0) for g in groups)
    total = ((A - mean) ** 2).sum(axis=0)
    scale = np.abs(A).max(axis=0)
    # treat rounding residue as exact zero
    constant = total <= (1e-24 * n) * np.maximum(scale, 1e-300) ** 2
    separated = ~constant & (ssw <= 1e-13 * total)
    F = np.zeros(A.shape[1])
    p = np.ones(A.shape[1])
    regular = ~constant & ~separated
    F[regular] = ssb[regular] / (ssw[regular] / (n - 2))
    for j in np.flatnonzero(regular):
        p[j] = f_sf(F[j], 1, n - 2)
    F[separated] = np.inf
    p[separated] = 0.0
    return F, np.maximum(p, P_FLOOR)


def f_oneway_pvalue(column, labels) -> float:
    _, p = f_classif(np.asarray(column, dtype=float).reshape(-1, 1), labels)
    return float(p[0])


def bh_mask(p: np.ndarray, alpha: float) -> np.ndarray:
    m = p.size
    if m == 0:
        return np.zeros(0, dtype=bool)
    ps = np.sort(p)
    ok = np.flatnonzero(ps <= alpha * np.arange(1, m + 1) / m)
    if ok.size == 0:
        return np.zeros(m, dtype=bool)
    return p <= ps[ok[-1]]


def fit_selector(kind: str, params: dict[str, Any], X, y) -> np.ndarray:
    """Boolean keep-mask over columns; may be empty."""
    A = _values(X)
    m = A.shape[1]
    if kind == "VarianceThreshold":
        return A.var(axis=0) > params["threshold"]
    F, p = f_classif(A, y)
    if kind == "SelectPercentile":
        k = max(1, int(m * params["percentile"] / 100))
        order = np.lexsort((np.arange(m), -F))  # F descending, then index
        mask = np.zeros(m, dtype=bool)
        mask[order[:k]] = True
        return mask
    if kind == "SelectFPR":
        return p < params["alpha"]
    if kind == "SelectFWE":
        return p < params["alpha"] / m
    if kind == "SelectFDR":
        return bh_mask(p, params["alpha"])
    raise ValueError(f"unknown selector {kind!r}")


def apply_selector(mask: np.ndarray, X):
    mask = np.asarray(mask, dtype=bool)
    if isinstance(X, FeatureMatrix):
        keep = np.flatnonzero(mask)
        return FeatureMatrix([X.columns[i] for i in keep], X.values[:, keep], [X.groups[i] for i in keep])
    return _values(X)[:, mask]
