"""Independent reference computations used to pin expected values.

Everything here is brute force on purpose: joint-Gaussian moments are built
by explicit matrix products and conditioned with dense linear algebra, so
none of the engine's recursions are reused.
"""

from __future__ import annotations

import numpy as np


def _powers(g: np.ndarray, t_len: int) -> list[np.ndarray]:
    p = g.shape[0]
    out = [np.eye(p)]
    for _ in range(t_len):
        out.append(g @ out[-1])
    return out


def joint_state_moments(g, w, m0, c0, t_len):
    """Mean and covariance of the stacked states (theta_1 .. theta_T)."""
    g = np.atleast_2d(np.asarray(g, float))
    w = np.atleast_2d(np.asarray(w, float))
    m0 = np.atleast_1d(np.asarray(m0, float))
    c0 = np.atleast_2d(np.asarray(c0, float))
    p = g.shape[0]
    pw = _powers(g, t_len)
    mean = np.concatenate([pw[t] @ m0 for t in range(1, t_len + 1)])
    cov = np.zeros((t_len * p, t_len * p))
    for s in range(1, t_len + 1):
        for t in range(1, t_len + 1):
            block = pw[s] @ c0 @ pw[t].T
            for k in range(1, min(s, t) + 1):
                block = block + pw[s - k] @ w @ pw[t - k].T
            cov[(s - 1) * p : s * p, (t - 1) * p : t * p] = block
    return mean, cov


def joint_obs_moments(g, w, m0, c0, F, v):
    """Joint (theta_{1:T}, y_{1:T}) mean and covariance, fixed V, explicit W."""
    F = np.atleast_2d(np.asarray(F, float))  # (T, p)
    t_len, p = F.shape
    mean_th, cov_th = joint_state_moments(g, w, m0, c0, t_len)
    sel = np.zeros((t_len, t_len * p))
    for t in range(t_len):
        sel[t, t * p : (t + 1) * p] = F[t]
    mean_y = sel @ mean_th
    cov_yy = sel @ cov_th @ sel.T + v * np.eye(t_len)
    cov_ty = cov_th @ sel.T
    return mean_th, cov_th, mean_y, cov_yy, cov_ty


def conditional(mean_a, cov_aa, mean_b, cov_bb, cov_ab, b_obs):
    """Moments of a | b = b_obs for a joint Gaussian."""
    solve = np.linalg.solve(cov_bb, np.asarray(b_obs, float) - mean_b)
    mean = mean_a + cov_ab @ solve
    cov = cov_aa - cov_ab @ np.linalg.solve(cov_bb, cov_ab.T)
    return mean, (cov + cov.T) / 2


def batch_filtered(g, w, m0, c0, F, v, y):
    """Filtered moments (theta_t | y_{1:t}) by direct joint conditioning."""
    F = np.atleast_2d(np.asarray(F, float))
    t_len, p = F.shape
    mean_th, cov_th, mean_y, cov_yy, cov_ty = joint_obs_moments(g, w, m0, c0, F, v)
    ms, cs = [], []
    for t in range(1, t_len + 1):
        sl_t = slice((t - 1) * p, t * p)
        sl_y = slice(0, t)
        mean, cov = conditional(
            mean_th[sl_t],
            cov_th[sl_t, sl_t],
            mean_y[sl_y],
            cov_yy[sl_y, sl_y],
            cov_ty[sl_t, sl_y],
            np.asarray(y, float)[sl_y],
        )
        ms.append(mean)
        cs.append(cov)
    return np.array(ms), np.array(cs)


def batch_smoothed(g, w, m0, c0, F, v, y):
    """Smoothed moments (theta_t | y_{1:T}) by direct joint conditioning."""
    F = np.atleast_2d(np.asarray(F, float))
    t_len, p = F.shape
    mean_th, cov_th, mean_y, cov_yy, cov_ty = joint_obs_moments(g, w, m0, c0, F, v)
    y = np.asarray(y, float)
    hs, bighs = [], []
    for t in range(1, t_len + 1):
        sl_t = slice((t - 1) * p, t * p)
        mean, cov = conditional(
            mean_th[sl_t], cov_th[sl_t, sl_t], mean_y, cov_yy, cov_ty[sl_t, :], y
        )
        hs.append(mean)
        bighs.append(cov)
    return np.array(hs), np.array(bighs)


def batch_one_step(g, w, m0, c0, F, v, y):
    """One-step predictive mean/variance of y_t | y_{1:t-1}."""
    F = np.atleast_2d(np.asarray(F, float))
    t_len = F.shape[0]
    _, _, mean_y, cov_yy, _ = joint_obs_moments(g, w, m0, c0, F, v)
    y = np.asarray(y, float)
    fs, qs = [], []
    for t in range(t_len):
        if t == 0:
            fs.append(mean_y[0])
            qs.append(cov_yy[0, 0])
            continue
        mean, cov = conditional(
            mean_y[t : t + 1],
            cov_yy[t : t + 1, t : t + 1],
            mean_y[:t],
            cov_yy[:t, :t],
            cov_yy[t : t + 1, :t],
            y[:t],
        )
        fs.append(mean[0])
        qs.append(cov[0, 0])
    return np.array(fs), np.array(qs)


def reachable(nodes, edges, start):
    """Brute-force reachability by repeated edge scans."""
    out = {start}
    changed = True
    while changed:
        changed = False
        for a, b in edges:
            if a in out and b not in out:
                out.add(b)
                changed = True
    return out


def has_cycle(nodes, edges) -> bool:
    """A directed cycle exists iff some node reaches itself through >=1 edge."""
    for node in nodes:
        for a, b in edges:
            if a == node and node in reachable(nodes, edges, b):
                return True
    return False


def partition_violations(panel_sets: dict[str, set], universe: set) -> dict:
    """Set-arithmetic reference for the partition check."""
    overlap = {}
    for i, (pa, sa) in enumerate(sorted(panel_sets.items())):
        for pb, sb in sorted(panel_sets.items())[i + 1 :]:
            for node in sa & sb:
                overlap.setdefault(node, set()).update({pa, pb})
    covered = set().union(*panel_sets.values()) if panel_sets else set()
    return {
        "overlap": {n: sorted(ps) for n, ps in overlap.items()},
        "uncovered": sorted(universe - covered),
        "unknown": sorted(covered - universe),
    }
