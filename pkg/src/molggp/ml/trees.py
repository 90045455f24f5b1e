"""Compiled tree-growing kernels shared by the tree learners.

Trees are stored as flat arrays (feature, threshold, left, right, value);
``feature == -1`` marks a leaf.  Samples with ``x[f] <= threshold`` go left.
Growing kernels take the transposed matrix ``XT`` (features x samples) so
column scans stay contiguous.
"""
from __future__ import annotations

import numpy as np
from numba import njit

LEAF = -1
# relative tolerance under which two split scores count as tied
TIE_TOL = 1e-12


@njit(cache=True, nogil=True)
def _midpoint(lo, hi):
    mid = 0.5 * (lo + hi)
    if mid >= hi:  # adjacent floats
        mid = lo
    return mid


@njit(cache=True, nogil=True)
def _better(score, f, best_score, best_f, tol):
    if score < best_score - tol:
        return True
    return score <= best_score + tol and f < best_f


@njit(cache=True, nogil=True)
def grow_cart(XT, y, w, max_depth, min_samples_split, n_candidates, random_split, seed):
    """Grow a Gini CART tree on the samples with positive weight.

    max_depth < 0 means unbounded.  With ``random_split`` each candidate
    feature gets one threshold drawn uniformly between its node min and max
    (extremely randomized trees); otherwise every midpoint between
    consecutive distinct values is scored.  Ties keep the lower feature
    index, then the lower threshold.
    """
    np.random.seed(seed)
    p, n = XT.shape
    m = 0
    for i in range(n):
        if w[i] > 0:
            m += 1
    idx = np.empty(m, np.int64)
    k = 0
    for i in range(n):
        if w[i] > 0:
            idx[k] = i
            k += 1

    cap = 2 * m + 1
    feature = np.full(cap, LEAF, np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    value = np.zeros(cap)

    st_node = np.empty(cap, np.int64)
    st_lo = np.empty(cap, np.int64)
    st_hi = np.empty(cap, np.int64)
    st_depth = np.empty(cap, np.int64)
    top = 0
    st_node[0] = 0
    st_lo[0] = 0
    st_hi[0] = m
    st_depth[0] = 0
    top = 1
    n_nodes = 1

    feats = np.arange(p)
    tmp = np.empty(m, np.int64)
    vals = np.empty(m)

    while top > 0:
        top -= 1
        node = st_node[top]
        lo = st_lo[top]
        hi = st_hi[top]
        depth = st_depth[top]

        W = 0.0
        W1 = 0.0
        for k in range(lo, hi):
            i = idx[k]
            W += w[i]
            W1 += w[i] * y[i]
        value[node] = W1 / W if W > 0 else 0.0
        if W1 <= 0.0 or W1 >= W:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue
        if W < min_samples_split or hi - lo < 2:
            continue

        # visit features in random order until n_candidates non-constant
        # ones have been scored; ties go to the lower feature index
        if n_candidates < p:
            cand = np.random.permutation(p)
        else:
            cand = feats
        tol = TIE_TOL * W
        best_score = np.inf
        best_f = -1
        best_t = 0.0
        cnt = hi - lo
        visited = 0
        for f in cand:
            if visited >= n_candidates:
                break
            vmin = np.inf
            vmax = -np.inf
            for k in range(cnt):
                v = XT[f, idx[lo + k]]
                vals[k] = v
                if v < vmin:
                    vmin = v
                if v > vmax:
                    vmax = v
            if vmin >= vmax:
                continue
            visited += 1
            if random_split:
                t = np.random.uniform(vmin, vmax)
                if t >= vmax:
                    t = vmin
                wl = 0.0
                wl1 = 0.0
                for k in range(cnt):
                    if vals[k] <= t:
                        i = idx[lo + k]
                        wl += w[i]
                        wl1 += w[i] * y[i]
                wr = W - wl
                wr1 = W1 - wl1
                if wl <= 0.0 or wr <= 0.0:
                    continue
                score = wl1 * (wl - wl1) / wl + wr1 * (wr - wr1) / wr
                if _better(score, f, best_score, best_f, tol):
                    best_score = score
                    best_f = f
                    best_t = t
            else:
                order = np.argsort(vals[:cnt], kind="mergesort")
                wl = 0.0
                wl1 = 0.0
                for k in range(cnt - 1):
                    i = idx[lo + order[k]]
                    wl += w[i]
                    wl1 += w[i] * y[i]
                    v0 = vals[order[k]]
                    v1 = vals[order[k + 1]]
                    if v0 >= v1:
                        continue
                    wr = W - wl
                    wr1 = W1 - wl1
                    if wl <= 0.0 or wr <= 0.0:
                        continue
                    score = wl1 * (wl - wl1) / wl + wr1 * (wr - wr1) / wr
                    if _better(score, f, best_score, best_f, tol):
                        best_score = score
                        best_f = f
                        best_t = _midpoint(v0, v1)
        if best_f < 0:
            continue

        # stable partition of idx[lo:hi]
        nl = 0
        for k in range(lo, hi):
            if XT[best_f, idx[k]] <= best_t:
                nl += 1
        a = lo
        b = lo + nl
        for k in range(lo, hi):
            i = idx[k]
            if XT[best_f, i] <= best_t:
                tmp[a - lo] = i
                a += 1
            else:
                tmp[b - lo] = i
                b += 1
        for k in range(lo, hi):
            idx[k] = tmp[k - lo]

        feature[node] = best_f
        threshold[node] = best_t
        left[node] = n_nodes
        right[node] = n_nodes + 1
        # push right first so the left subtree is expanded first
        st_node[top] = n_nodes + 1
        st_lo[top] = lo + nl
        st_hi[top] = hi
        st_depth[top] = depth + 1
        top += 1
        st_node[top] = n_nodes
        st_lo[top] = lo
        st_hi[top] = lo + nl
        st_depth[top] = depth + 1
        top += 1
        n_nodes += 2

    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        value[:n_nodes].copy(),
    )


@njit(cache=True, nogil=True)
def predict_tree(feature, threshold, left, right, value, X):
    n = X.shape[0]
    out = np.empty(n)
    for r in range(n):
        node = 0
        while feature[node] != LEAF:
            if X[r, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[r] = value[node]
    return out


@njit(cache=True, nogil=True)
def presort(XT):
    p = XT.shape[0]
    order = np.empty((p, XT.shape[1]), np.int64)
    for f in range(p):
        order[f] = np.argsort(XT[f, :], kind="mergesort")
    return order


@njit(cache=True, nogil=True)
def fit_stump(XT, order, y, w):
    """Best weighted-Gini depth-1 split using a presorted column order.

    Returns (feature, threshold, left class-1 fraction, right class-1
    fraction); feature is -1 when no split exists.
    """
    p, n = XT.shape
    W = 0.0
    W1 = 0.0
    for i in range(n):
        W += w[i]
        W1 += w[i] * y[i]
    root = W1 / W if W > 0 else 0.0
    tol = TIE_TOL * W
    best_score = np.inf
    best_f = -1
    best_t = 0.0
    best_l = root
    best_r = root
    for f in range(p):
        wl = 0.0
        wl1 = 0.0
        col = order[f]
        for k in range(n - 1):
            i = col[k]
            wl += w[i]
            wl1 += w[i] * y[i]
            v0 = XT[f, i]
            v1 = XT[f, col[k + 1]]
            if v0 >= v1:
                continue
            wr = W - wl
            if wl <= 0.0 or wr <= 0.0:
                continue
            wr1 = W1 - wl1
            score = wl1 * (wl - wl1) / wl + wr1 * (wr - wr1) / wr
            if score < best_score - tol:
                best_score = score
                best_f = f
                best_t = _midpoint(v0, v1)
                best_l = wl1 / wl
                best_r = wr1 / wr
    return best_f, best_t, best_l, best_r


@njit(cache=True, nogil=True)
def _best_gradient_split(XT, ordr, g, h, lo, hi, lam):
    p = XT.shape[0]
    G = 0.0
    H = 0.0
    for k in range(lo, hi):
        i = ordr[0, k]
        G += g[i]
        H += h[i]
    parent = G * G / (H + lam)
    tol = TIE_TOL * (parent + H)
    best_gain = 0.0
    best_f = -1
    best_t = 0.0
    for f in range(p):
        gl = 0.0
        hl = 0.0
        for k in range(lo, hi - 1):
            i = ordr[f, k]
            gl += g[i]
            hl += h[i]
            v0 = XT[f, i]
            v1 = XT[f, ordr[f, k + 1]]
            if v0 >= v1:
                continue
            gr = G - gl
            hr = H - hl
            gain = 0.5 * (gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent)
            if gain > best_gain + tol:
                best_gain = gain
                best_f = f
                best_t = _midpoint(v0, v1)
    return best_gain, best_f, best_t, G, H


@njit(cache=True, nogil=True)
def grow_gradient_tree(XT, order, g, h, max_depth, max_leaves, lam, learning_rate):
    """Second-order boosting tree grown best-first up to ``max_leaves`` leaves.

    ``order`` is the per-column argsort from :func:`presort`.  Leaf weight is
    -G / (H + lam) scaled by the learning rate; a leaf is split only for
    strictly positive gain.
    """
    p, n = XT.shape
    cap = 2 * max_leaves + 1
    feature = np.full(cap, LEAF, np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    value = np.zeros(cap)
    depth = np.zeros(cap, np.int64)
    gain = np.zeros(cap)
    split_f = np.full(cap, -1, np.int64)
    split_t = np.zeros(cap)
    seg_lo = np.zeros(cap, np.int64)
    seg_hi = np.zeros(cap, np.int64)
    # each leaf owns the same contiguous segment in every column's order
    ordr = order.copy()
    tmp = np.empty(n, np.int64)
    goes_left = np.zeros(n, np.bool_)

    n_nodes = 1
    n_leaves = 1
    seg_hi[0] = n
    bg, bf, bt, G, H = _best_gradient_split(XT, ordr, g, h, 0, n, lam)
    value[0] = -G / (H + lam) * learning_rate
    gain[0] = bg
    split_f[0] = bf
    split_t[0] = bt
    while n_leaves < max_leaves:
        pick = -1
        pick_gain = 0.0
        for node in range(n_nodes):
            if feature[node] != LEAF or split_f[node] < 0:
                continue
            if max_depth >= 0 and depth[node] >= max_depth:
                continue
            if gain[node] > pick_gain:
                pick_gain = gain[node]
                pick = node
        if pick < 0:
            break
        f = split_f[pick]
        t = split_t[pick]
        lo = seg_lo[pick]
        hi = seg_hi[pick]
        nl = 0
        for k in range(lo, hi):
            i = ordr[0, k]
            goes_left[i] = XT[f, i] <= t
            if goes_left[i]:
                nl += 1
        for c in range(p):
            a = 0
            b = nl
            for k in range(lo, hi):
                i = ordr[c, k]
                if goes_left[i]:
                    tmp[a] = i
                    a += 1
                else:
                    tmp[b] = i
                    b += 1
            for k in range(hi - lo):
                ordr[c, lo + k] = tmp[k]
        li = n_nodes
        ri = n_nodes + 1
        n_nodes += 2
        feature[pick] = f
        threshold[pick] = t
        left[pick] = li
        right[pick] = ri
        seg_lo[li] = lo
        seg_hi[li] = lo + nl
        seg_lo[ri] = lo + nl
        seg_hi[ri] = hi
        for child in (li, ri):
            depth[child] = depth[pick] + 1
            bg, bf, bt, G, H = _best_gradient_split(XT, ordr, g, h, seg_lo[child], seg_hi[child], lam)
            value[child] = -G / (H + lam) * learning_rate
            gain[child] = bg
            split_f[child] = bf
            split_t[child] = bt
        n_leaves += 1
    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        value[:n_nodes].copy(),
    )
