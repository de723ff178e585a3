"""Independent reference implementations used to check the library.

Everything here is written as plain loops straight from the defining
formulas, deliberately avoiding the vectorized paths under test.
"""

from __future__ import annotations

import numpy as np

from sblorec.graphdata import InteractionNetwork, SocialNetwork


# ---------------------------------------------------------------- builders

def social_from_dense(adj: np.ndarray) -> SocialNetwork:
    adj = np.asarray(adj)
    edges = np.argwhere(np.triu(adj, 1) > 0)
    return SocialNetwork(adj.shape[0], edges)


def interactions_from_dense(mat: np.ndarray) -> InteractionNetwork:
    mat = np.asarray(mat)
    edges = np.argwhere(mat > 0)
    return InteractionNetwork(mat.shape[0], mat.shape[1], edges)


def random_instance(rng, m=None, n=None, p_social=0.35, p_inter=0.35):
    """Random (dense A, dense B) pair with symmetric simple A."""
    m = m if m is not None else int(rng.integers(2, 11))
    n = n if n is not None else int(rng.integers(2, 13))
    upper = np.triu(rng.random((m, m)) < p_social, 1)
    a = (upper | upper.T).astype(float)
    b = (rng.random((m, n)) < p_inter).astype(float)
    return a, b


# ------------------------------------------------------- solver references

def objective_direct(s, a, b, lam1, lam2):
    """Elementwise squared-residual sums, no trace identities."""
    total = 0.0
    m = a.shape[0]
    n = b.shape[1]
    for i in range(m):
        for j in range(m):
            total += s[i, j] ** 2
    ra = a - s @ a
    rb = b - s @ b
    for i in range(m):
        for j in range(m):
            total += lam1 * ra[i, j] ** 2
    for i in range(m):
        for j in range(n):
            total += lam2 * rb[i, j] ** 2
    return total


def gd_minimize(a, b, lam1, lam2, tol=1e-9, max_iter=500_000):
    """Plain gradient descent on the joint reconstruction objective.

    Gradient from mechanical differentiation:
        dF/dS = 2S - 2 lam1 (A - SA) A^T - 2 lam2 (B - SB) B^T.
    Step size 1/L with L the Hessian Lipschitz constant 2(1 + lmax).
    """
    m = a.shape[0]
    gram = lam1 * a @ a.T + lam2 * b @ b.T
    lmax = float(np.linalg.eigvalsh(gram).max()) if m else 0.0
    step = 1.0 / (2.0 * (1.0 + lmax))
    s = np.zeros((m, m))
    for _ in range(max_iter):
        grad = 2.0 * s - 2.0 * lam1 * (a - s @ a) @ a.T - 2.0 * lam2 * (b - s @ b) @ b.T
        s = s - step * grad
        if np.linalg.norm(grad) <= tol * max(1.0, np.linalg.norm(s)):
            break
    return s


def matmul_loops(s, b):
    """Naive triple-loop product."""
    m, n = b.shape
    out = np.zeros((m, n))
    for i in range(m):
        for a in range(n):
            acc = 0.0
            for j in range(m):
                acc += s[i, j] * b[j, a]
            out[i, a] = acc
    return out


# ------------------------------------------------------ scorer references

def _inv(x):
    return 1.0 / x if x > 0 else 0.0


def _pw(base, exponent):
    return base ** exponent if base > 0 else 0.0


def md_scores(b):
    m, n = b.shape
    ku = b.sum(axis=1)
    ko = b.sum(axis=0)
    w = np.zeros((n, n))
    for al in range(n):
        for be in range(n):
            acc = 0.0
            for l in range(m):
                if b[l, al] and b[l, be]:
                    acc += _inv(ku[l])
            w[al, be] = _inv(ko[be]) * acc
    f = np.zeros((m, n))
    for i in range(m):
        for al in range(n):
            f[i, al] = sum(b[i, be] * w[al, be] for be in range(n))
    return f


def hhp_scores(b, lam):
    m, n = b.shape
    ku = b.sum(axis=1)
    ko = b.sum(axis=0)
    w = np.zeros((n, n))
    for al in range(n):
        for be in range(n):
            acc = 0.0
            for l in range(m):
                if b[l, al] and b[l, be]:
                    acc += _inv(ku[l])
            w[al, be] = _pw(ko[al], lam - 1.0) * _pw(ko[be], -lam) * acc
    f = np.zeros((m, n))
    for i in range(m):
        for al in range(n):
            f[i, al] = sum(b[i, be] * w[al, be] for be in range(n))
    return f


def pd_scores(b, eps):
    m, n = b.shape
    ko = b.sum(axis=0)
    norms = np.array([sum(b[l, r] * _pw(ko[r], eps) for r in range(n))
                      for l in range(m)])
    w = np.zeros((n, n))
    for al in range(n):
        for be in range(n):
            acc = 0.0
            for l in range(m):
                if b[l, al] and b[l, be]:
                    acc += _inv(norms[l])
            w[al, be] = _pw(ko[al], eps) * _inv(ko[be]) * acc
    f = np.zeros((m, n))
    for i in range(m):
        for al in range(n):
            f[i, al] = sum(b[i, be] * w[al, be] for be in range(n))
    return f


def rwr_scores(a, b, t1, t2, t3):
    m, n = b.shape
    ka = a.sum(axis=1)
    kb = b.sum(axis=1)
    trans = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            if a[i, j] and ka[i] > 0:
                trans[i, j] = 1.0 / ka[i]
    sim_a = np.zeros((m, m))
    for i in range(m):
        e = np.zeros(m)
        e[i] = 1.0
        sim_a[i] = (1.0 - t3) * np.linalg.solve(np.eye(m) - t3 * trans, e)
    sim_b = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            if kb[i] > 0 and kb[j] > 0:
                common = sum(b[i, be] * b[j, be] for be in range(n))
                sim_b[i, j] = common / np.sqrt(kb[i] * kb[j])
    f = np.zeros((m, n))
    for i in range(m):
        for al in range(n):
            f[i, al] = sum(
                _pw(sim_a[i, j], t1) * _pw(sim_b[i, j], t2) * b[j, al]
                for j in range(m)
            )
    return f


def cosra_t_scores(a, b, theta):
    m, n = b.shape
    kb_u = b.sum(axis=1)
    kb_o = b.sum(axis=0)
    resource = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            acc = 0.0
            for be in range(n):
                if b[i, be] and b[j, be]:
                    acc += 1.0 / np.sqrt(kb_u[j] * kb_o[be])
            resource[i, j] = acc
    f = np.zeros((m, n))
    for i in range(m):
        for al in range(n):
            acc = 0.0
            for j in range(m):
                if not b[j, al]:
                    continue
                t = resource[i, j]
                weight = _pw(t, theta) if a[i, j] else t
                acc += weight / np.sqrt(kb_u[j] * kb_o[al])
            f[i, al] = acc
    return f


def socmd_scores(a, b, p):
    m, n = b.shape
    ka = a.sum(axis=1)
    kb = b.sum(axis=1)
    ko = b.sum(axis=0)
    f = np.zeros((m, n))
    for i in range(m):
        for al in range(n):
            term1 = 0.0
            for l in range(m):
                for be in range(n):
                    if b[l, al] and b[l, be] and b[i, be]:
                        d = kb[l] * ko[be] * kb[i]
                        if d > 0:
                            term1 += 1.0 / d
            term2 = 0.0
            for l in range(m):
                for j in range(m):
                    if b[l, al] and a[l, j] and a[j, i]:
                        d = kb[l] * ka[j] * ka[i]
                        if d > 0:
                            term2 += 1.0 / d
            f[i, al] = p * term1 + (1.0 - p) * term2
    return f


# ------------------------------------------------------- metric references

def brute_precision_recall_f(rec_objects, probe, length):
    hits = len(set(rec_objects) & set(probe))
    pre = hits / length
    rec = hits / len(probe)
    f = 0.0 if pre + rec == 0 else 2 * pre * rec / (pre + rec)
    return pre, rec, f


def brute_aupr(score_row, probe, eligible):
    """Exhaustive sweep: precision/recall at every cut by set counting."""
    eligible = list(eligible)
    order = sorted(eligible, key=lambda o: (-score_row[o], o))
    probe = set(probe) & set(eligible)
    points = []
    for cut in range(1, len(order) + 1):
        hits = len(set(order[:cut]) & probe)
        points.append((hits / len(probe), hits / cut))
    increases = []
    prev_recall = 0.0
    for recall, precision in points:
        if recall > prev_recall:
            increases.append((recall, precision))
            prev_recall = recall
    xs = [0.0] + [r for r, _ in increases]
    ys = [increases[0][1]] + [p for _, p in increases]
    area = 0.0
    for k in range(1, len(xs)):
        area += (xs[k] - xs[k - 1]) * (ys[k] + ys[k - 1]) / 2.0
    return area


def brute_intra_similarity(rec_objects, b):
    objs = list(rec_objects)
    ko = b.sum(axis=0)
    total = 0.0
    for al in objs:
        for be in objs:
            if al == be:
                continue
            if ko[al] > 0 and ko[be] > 0:
                common = int((b[:, al] * b[:, be]).sum())
                total += common / np.sqrt(ko[al] * ko[be])
    k = len(objs)
    return total / (k * (k - 1))


def brute_hamming(lists, length):
    total = 0.0
    pairs = 0
    for i in range(len(lists)):
        for j in range(i + 1, len(lists)):
            overlap = len(set(lists[i]) & set(lists[j]))
            total += 1.0 - overlap / length
            pairs += 1
    return total / pairs


def brute_popularity(rec_objects, b):
    ko = b.sum(axis=0)
    return float(np.mean([ko[o] for o in rec_objects]))
