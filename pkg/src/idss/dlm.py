"""Univariate dynamic linear regression with discount variance learning.

Observation y_t = F_t' theta_t + eps_t, state theta_t = G theta_{t-1} + w_t.
The state evolution covariance comes either from an explicit W or from a
single discount factor (R_t = G C G' / delta_theta). The observation
variance is either fixed or learned through the discounted gamma recursion
n_t = delta n_{t-1} + 1, d_t = delta d_{t-1} + S_{t-1} e_t^2 / Q_t, with the
running point estimate S_t = d_t / n_t plugged into the one-step forecast
variance. One-step forecasts are Student-t with n_{t-1} degrees of freedom
in learned-variance mode and Gaussian in fixed-variance mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import stats

from .errors import InvalidInput, NumericalError

# covariances are symmetrized every step; eigenvalues below this are floored
# to zero before any inversion
EIG_FLOOR = 1e-12


def symmetrize(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2.0


def psd_floor(a: np.ndarray) -> np.ndarray:
    """Clip tiny negative eigenvalues introduced by round-off."""
    a = symmetrize(a)
    w = np.linalg.eigvalsh(a)
    if w[0] >= 0.0:
        return a
    scale = max(1.0, float(np.abs(w).max()))
    if w[0] < -1e-5 * scale:
        raise NumericalError(f"covariance has negative eigenvalue {w[0]:.3e}")
    w2, v = np.linalg.eigh(a)
    return symmetrize((v * np.clip(w2, 0.0, None)) @ v.T)


def psd_inverse(a: np.ndarray) -> np.ndarray:
    """Inverse through an eigendecomposition with floored eigenvalues.

    The floor is relative to the largest eigenvalue (condition capped near
    1e10) so near-rank-deficient covariances invert stably instead of
    amplifying round-off along their null directions.
    """
    a = symmetrize(a)
    w, v = np.linalg.eigh(a)
    if not np.all(np.isfinite(w)):
        raise NumericalError("non-finite covariance")
    floor = max(EIG_FLOOR, 1e-10 * float(w[-1]))
    w = np.maximum(w, floor)
    return symmetrize((v / w) @ v.T)


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Symmetric square root; tolerates exact zeros (degenerate draws)."""
    a = symmetrize(a)
    w, v = np.linalg.eigh(a)
    if w[0] < -1e-6 * max(1.0, abs(w[-1])):
        raise NumericalError(f"covariance has negative eigenvalue {w[0]:.3e}")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


@dataclass(frozen=True)
class NodeModel:
    """Model settings for one node's dynamic regression.

    The design row is [intercept, parents at t (in order), own lag-1 value
    if include_lag]. Exactly one of state_discount / explicit_w drives the
    state evolution covariance. fixed_obs_variance=None turns on gamma
    discount variance learning.
    """

    node: str
    parents: tuple[str, ...] = ()
    include_lag: bool = False
    state_discount: float | None = 0.98
    variance_discount: float = 0.95
    prior_mean: np.ndarray | None = None
    prior_cov: float | np.ndarray = 1000.0
    prior_n: float = 1.0
    prior_d: float = 1.0
    explicit_w: np.ndarray | None = None
    evolution: np.ndarray | None = None
    fixed_obs_variance: float | None = None
    # network-level fitting reads the prior in response-standardized units
    # and maps it to the data scale; set False to use the prior verbatim
    scale_priors_to_data: bool = True

    def __post_init__(self):
        if (self.state_discount is None) == (self.explicit_w is None):
            raise InvalidInput(
                f"{self.node}: exactly one of state_discount / explicit_w must be set"
            )
        if self.state_discount is not None and not (0.0 < self.state_discount <= 1.0):
            raise InvalidInput(f"{self.node}: state_discount must be in (0, 1]")
        if not (0.0 < self.variance_discount < 1.0):
            raise InvalidInput(f"{self.node}: variance_discount must be in (0, 1)")
        if self.prior_n <= 0 or self.prior_d <= 0:
            raise InvalidInput(f"{self.node}: prior_n and prior_d must be positive")
        if self.fixed_obs_variance is not None and self.fixed_obs_variance < 0:
            raise InvalidInput(f"{self.node}: fixed_obs_variance must be >= 0")
        p = self.state_dim
        m0 = np.zeros(p) if self.prior_mean is None else np.asarray(self.prior_mean, float)
        if m0.shape != (p,):
            raise InvalidInput(f"{self.node}: prior_mean must have length {p}")
        object.__setattr__(self, "prior_mean", m0)
        c0 = self.prior_cov
        c0 = float(c0) * np.eye(p) if np.isscalar(c0) else symmetrize(np.asarray(c0, float))
        if c0.shape != (p, p):
            raise InvalidInput(f"{self.node}: prior_cov must be {p}x{p}")
        if np.linalg.eigvalsh(c0)[0] < -1e-9:
            raise InvalidInput(f"{self.node}: prior_cov must be PSD")
        object.__setattr__(self, "prior_cov", c0)
        if self.evolution is not None:
            g = np.asarray(self.evolution, float)
            if g.shape != (p, p):
                raise InvalidInput(f"{self.node}: evolution matrix must be {p}x{p}")
            object.__setattr__(self, "evolution", g)
        if self.explicit_w is not None:
            w = np.asarray(self.explicit_w, float)
            if w.ndim == 2:
                w = symmetrize(w)
                shape_ok = w.shape == (p, p)
            else:
                shape_ok = w.ndim == 3 and w.shape[1:] == (p, p)
            if not shape_ok:
                raise InvalidInput(f"{self.node}: explicit_w must be (p,p) or (T,p,p)")
            object.__setattr__(self, "explicit_w", w)

    @property
    def state_dim(self) -> int:
        return 1 + len(self.parents) + (1 if self.include_lag else 0)

    @property
    def learns_variance(self) -> bool:
        return self.fixed_obs_variance is None

    def g_matrix(self) -> np.ndarray:
        return np.eye(self.state_dim) if self.evolution is None else self.evolution

    def w_at(self, t: int) -> np.ndarray | None:
        if self.explicit_w is None:
            return None
        return self.explicit_w if self.explicit_w.ndim == 2 else self.explicit_w[t]


class Posterior(NamedTuple):
    """Closing state of a filter step: theta | D_t and the variance recursion."""

    m: np.ndarray
    C: np.ndarray
    n: float
    d: float

    @property
    def s(self) -> float:
        return self.d / self.n


class FilterStep(NamedTuple):
    a: np.ndarray
    R: np.ndarray
    f: float
    q: float
    e: float
    gain: np.ndarray
    m: np.ndarray
    C: np.ndarray
    n: float
    d: float
    observed: bool


@dataclass
class FilterState:
    """Per-time filtering output, t = 0..T-1 along the leading axis."""

    model: NodeModel
    F: np.ndarray          # (T, p) design rows
    y: np.ndarray          # (T,) observations, NaN = missing
    a: np.ndarray          # (T, p)
    R: np.ndarray          # (T, p, p)
    f: np.ndarray          # (T,)
    q: np.ndarray          # (T,)
    e: np.ndarray          # (T,) zero where missing
    gain: np.ndarray       # (T, p)
    m: np.ndarray          # (T, p)
    C: np.ndarray          # (T, p, p)
    n: np.ndarray          # (T,)
    d: np.ndarray          # (T,)
    observed: np.ndarray   # (T,) bool

    @property
    def T(self) -> int:
        return self.F.shape[0]

    @property
    def s(self) -> np.ndarray:
        return self.d / self.n

    def posterior(self, t: int) -> Posterior:
        return Posterior(self.m[t], self.C[t], float(self.n[t]), float(self.d[t]))

    def terminal(self) -> Posterior:
        return self.posterior(self.T - 1)


@dataclass
class SmoothedState:
    """Marginal smoothed moments theta_t | D_T."""

    h: np.ndarray  # (T, p)
    H: np.ndarray  # (T, p, p)


def initial_posterior(model: NodeModel) -> Posterior:
    return Posterior(model.prior_mean.copy(), model.prior_cov.copy(), model.prior_n, model.prior_d)


def filter_step(
    prev: Posterior,
    y_t: float | None,
    f_t: np.ndarray,
    model: NodeModel,
    t: int = 0,
) -> FilterStep:
    """One forward recursion from theta | D_{t-1} to theta | D_t.

    A missing observation (None or NaN) leaves the state at its prior and
    lets the variance-learning counts decay by the discount alone.
    """
    f_t = np.asarray(f_t, float)
    if not np.all(np.isfinite(f_t)):
        raise InvalidInput(f"{model.node}: non-finite design row at t={t}")
    if not (np.all(np.isfinite(prev.m)) and np.all(np.isfinite(prev.C))):
        raise InvalidInput(f"{model.node}: non-finite prior moments at t={t}")

    g = model.g_matrix()
    a = g @ prev.m
    gcg = symmetrize(g @ prev.C @ g.T)
    w = model.w_at(t)
    if w is None:
        r = gcg / model.state_discount
    else:
        r = gcg + w
    r = psd_floor(r)

    v_hat = model.fixed_obs_variance if not model.learns_variance else prev.s
    f_pred = float(f_t @ a)
    q = float(f_t @ r @ f_t) + v_hat
    if q <= 0.0:
        raise NumericalError(f"{model.node}: non-positive forecast variance at t={t}")

    missing = y_t is None or not np.isfinite(y_t)
    delta = model.variance_discount
    if missing:
        m, c = a, r
        e = 0.0
        gain = np.zeros_like(a)
        if model.learns_variance:
            n, d = delta * prev.n, delta * prev.d
        else:
            n, d = prev.n, prev.d
        return FilterStep(a, r, f_pred, q, e, gain, m, c, n, d, False)

    e = float(y_t) - f_pred
    gain = (r @ f_t) / q
    m = a + gain * e
    # Joseph form: algebraically R - A Q A', numerically PSD by construction
    i_af = np.eye(a.shape[0]) - np.outer(gain, f_t)
    c = psd_floor(i_af @ r @ i_af.T + v_hat * np.outer(gain, gain))
    if model.learns_variance:
        n = delta * prev.n + 1.0
        d = delta * prev.d + prev.s * e * e / q
    else:
        n, d = prev.n, prev.d
    return FilterStep(a, r, f_pred, q, e, gain, m, c, n, d, True)


def forward_filter(
    y: np.ndarray, F: np.ndarray, model: NodeModel
) -> tuple[FilterState, float]:
    """Filter a whole series and return the summed one-step log predictive.

    The log predictive accumulates over observed steps only: Student-t with
    n_{t-1} df (learned variance) or Gaussian (fixed variance), location f_t
    and squared scale Q_t.
    """
    y = np.asarray(y, float)
    F = np.asarray(F, float)
    t_len = y.shape[0]
    if t_len < 1:
        raise InvalidInput(f"{model.node}: need at least one time point")
    if F.shape != (t_len, model.state_dim):
        raise InvalidInput(
            f"{model.node}: design must be ({t_len}, {model.state_dim}), got {F.shape}"
        )

    p = model.state_dim
    fs = FilterState(
        model=model,
        F=F,
        y=y,
        a=np.empty((t_len, p)),
        R=np.empty((t_len, p, p)),
        f=np.empty(t_len),
        q=np.empty(t_len),
        e=np.zeros(t_len),
        gain=np.zeros((t_len, p)),
        m=np.empty((t_len, p)),
        C=np.empty((t_len, p, p)),
        n=np.empty(t_len),
        d=np.empty(t_len),
        observed=np.zeros(t_len, dtype=bool),
    )

    log_pred = 0.0
    prev = initial_posterior(model)
    for t in range(t_len):
        try:
            step = filter_step(prev, y[t], F[t], model, t=t)
        except (NumericalError, InvalidInput) as err:
            raise type(err)(f"t={t}: {err}") from err
        fs.a[t], fs.R[t] = step.a, step.R
        fs.f[t], fs.q[t], fs.e[t] = step.f, step.q, step.e
        fs.gain[t], fs.m[t], fs.C[t] = step.gain, step.m, step.C
        fs.n[t], fs.d[t] = step.n, step.d
        fs.observed[t] = step.observed
        if step.observed:
            scale = np.sqrt(step.q)
            if model.learns_variance:
                log_pred += float(stats.t.logpdf(y[t], df=prev.n, loc=step.f, scale=scale))
            else:
                log_pred += float(stats.norm.logpdf(y[t], loc=step.f, scale=scale))
        prev = Posterior(step.m, step.C, step.n, step.d)
    return fs, log_pred


def _backward_gains(fs: FilterState, model: NodeModel):
    """B_t = C_t G' R_{t+1}^{-1} for t = 0..T-2."""
    g = model.g_matrix()
    gains = []
    for t in range(fs.T - 1):
        gains.append(fs.C[t] @ g.T @ psd_inverse(fs.R[t + 1]))
    return gains


def backward_smooth(fs: FilterState, model: NodeModel) -> SmoothedState:
    """Marginal smoothed moments by the backward recursion.

    h_t = m_t + B_t (h_{t+1} - a_{t+1}),
    H_t = C_t - B_t (R_{t+1} - H_{t+1}) B_t',  with h_T = m_T, H_T = C_T.
    """
    t_len = fs.T
    p = model.state_dim
    h = np.empty((t_len, p))
    bigh = np.empty((t_len, p, p))
    h[-1] = fs.m[-1]
    bigh[-1] = fs.C[-1]
    gains = _backward_gains(fs, model)
    for t in range(t_len - 2, -1, -1):
        b = gains[t]
        h[t] = fs.m[t] + b @ (h[t + 1] - fs.a[t + 1])
        bigh[t] = psd_floor(fs.C[t] - b @ (fs.R[t + 1] - bigh[t + 1]) @ b.T)
    return SmoothedState(h=h, H=bigh)


def ffbs_sample_many(
    fs: FilterState, model: NodeModel, rng: np.random.Generator, n_paths: int
) -> np.ndarray:
    """Draw n_paths state trajectories from the joint smoothed posterior.

    theta_T ~ N(m_T, C_T); then backwards theta_t | theta_{t+1} is normal
    with mean m_t + B_t (theta_{t+1} - a_{t+1}) and covariance
    C_t - B_t R_{t+1} B_t'. Returns (T, n_paths, p); deterministic given rng.
    """
    if n_paths < 1:
        raise InvalidInput("n_paths must be >= 1")
    t_len, p = fs.T, model.state_dim
    out = np.empty((t_len, n_paths, p))
    root = psd_sqrt(fs.C[-1])
    out[-1] = fs.m[-1] + rng.standard_normal((n_paths, p)) @ root.T
    gains = _backward_gains(fs, model)
    for t in range(t_len - 2, -1, -1):
        b = gains[t]
        cond_cov = psd_floor(fs.C[t] - b @ fs.R[t + 1] @ b.T)
        root = psd_sqrt(cond_cov)
        mean = fs.m[t] + (out[t + 1] - fs.a[t + 1]) @ b.T
        out[t] = mean + rng.standard_normal((n_paths, p)) @ root.T
    return out


def ffbs_sample(fs: FilterState, model: NodeModel, rng: np.random.Generator) -> np.ndarray:
    """Single smoothed-trajectory draw, shape (T, p)."""
    return ffbs_sample_many(fs, model, rng, 1)[:, 0, :]


def variance_posterior(fs: FilterState) -> dict[str, np.ndarray]:
    """Gamma posterior of the observation precision per time.

    phi_t | D_t ~ Gamma(n_t / 2, d_t / 2); S_t = d_t / n_t estimates the
    observation variance.
    """
    return {
        "shape": fs.n / 2.0,
        "rate": fs.d / 2.0,
        "n": fs.n.copy(),
        "d": fs.d.copy(),
        "s": fs.s,
    }
