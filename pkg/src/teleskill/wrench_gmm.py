"""Gaussian mixture encoding of wrench profiles and mixture regression.

The joint space is (phase, wrench) in R^{1+m}. Fitting is deterministic:
samples are split into contiguous phase-sorted bins for initialization and
refined by EM with a covariance ridge scaled by the data covariance.
Conditioning the mixture on the phase (GMR) gives a smooth wrench
reference with a blended conditional covariance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import FitError, InputError
from .recording import Recording


@dataclass(frozen=True)
class GmmConfig:
    k: int = 5
    max_iters: int = 200
    tol: float = 1e-8
    reg: float = 1e-6
    seed: int = 0  # reserved; default initialization is deterministic

    def __post_init__(self):
        if self.k < 1:
            raise InputError("k must be >= 1")
        if self.tol <= 0.0:
            raise InputError("tol must be positive")
        if self.reg < 0.0:
            raise InputError("reg must be non-negative")


@dataclass(frozen=True)
class GmmModel:
    """Mixture over (phase, wrench); first coordinate is the phase input."""

    priors: np.ndarray
    means: np.ndarray        # (k, 1+m)
    covariances: np.ndarray  # (k, 1+m, 1+m)
    input_dim: int = 1
    em_log_likelihoods: tuple = field(default=(), compare=False)

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]


@dataclass(frozen=True)
class WrenchReference:
    mean: np.ndarray
    covariance: np.ndarray


def build_dataset(rec: Recording, phases, stream: str = "wrench") -> np.ndarray:
    """Stack per-frame [phase, wrench] rows."""
    if stream not in rec.streams:
        raise InputError(f"stream {stream!r} not present in recording")
    phases = np.asarray(phases, dtype=np.float64)
    if phases.shape != (rec.frames,):
        raise InputError(
            f"phase count {phases.shape} does not match frame count {rec.frames}"
        )
    return np.column_stack([phases, rec.streams[stream].samples])


def _log_gaussian(x: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    """Row-wise log N(x; mean, cov) via Cholesky."""
    d = mean.size
    chol = np.linalg.cholesky(cov)
    diff = (x - mean).T
    sol = scipy.linalg.solve_triangular(chol, diff, lower=True)
    return (-0.5 * d * math.log(2.0 * math.pi)
            - np.sum(np.log(np.diag(chol)))
            - 0.5 * np.sum(sol**2, axis=0))


def _component_logpdfs(model_priors, means, covs, x: np.ndarray) -> np.ndarray:
    n, k = x.shape[0], means.shape[0]
    logp = np.full((n, k), -np.inf)
    for j in range(k):
        if model_priors[j] <= 0.0:
            continue
        try:
            logp[:, j] = math.log(model_priors[j]) + _log_gaussian(x, means[j], covs[j])
        except np.linalg.LinAlgError as exc:
            raise FitError(
                f"singular covariance in component {j} after regularization"
            ) from exc
    return logp


def _logsumexp_rows(logp: np.ndarray) -> np.ndarray:
    mx = np.max(logp, axis=1)
    safe = np.where(np.isfinite(mx), mx, 0.0)
    return safe + np.log(np.sum(np.exp(logp - safe[:, None]), axis=1))


def fit_gmm(samples: np.ndarray, cfg: GmmConfig | None = None) -> GmmModel:
    """Deterministic EM fit.

    Initialization splits the samples into k contiguous phase-sorted bins
    (bin mean/covariance, priors = bin fractions); every M-step adds
    reg * mean(diag(data covariance)) * I to each covariance. Iterates
    until the relative log-likelihood change drops below tol.
    """
    cfg = cfg or GmmConfig()
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 2:
        raise InputError("samples must be a 2-d array")
    n, d = x.shape
    if n < cfg.k * d:
        raise FitError(f"too few samples: {n} < k*(1+m) = {cfg.k * d}")
    if not np.isfinite(x).all():
        raise FitError("samples contain non-finite values")

    data_cov = np.atleast_2d(np.cov(x.T, bias=True))
    ridge = cfg.reg * float(np.mean(np.diag(data_cov))) * np.eye(d)

    order = np.argsort(x[:, 0], kind="stable")
    bins = np.array_split(order, cfg.k)
    priors = np.array([len(b) / n for b in bins])
    means = np.array([x[b].mean(axis=0) for b in bins])
    covs = np.empty((cfg.k, d, d))
    for j, b in enumerate(bins):
        diff = x[b] - means[j]
        c = diff.T @ diff / len(b)
        covs[j] = 0.5 * (c + c.T) + ridge

    history: list[float] = []
    ll_prev: float | None = None
    for _ in range(cfg.max_iters):
        logp = _component_logpdfs(priors, means, covs, x)
        row_lse = _logsumexp_rows(logp)
        ll = float(np.sum(row_lse))
        if ll_prev is not None and ll < ll_prev:
            # the constant covariance ridge makes the M-step slightly
            # sub-optimal near convergence; keep the peak iterate
            priors, means, covs = prev_params
            break
        history.append(ll)
        if ll_prev is not None and abs(ll - ll_prev) < cfg.tol * abs(ll_prev):
            break
        ll_prev = ll
        prev_params = (priors.copy(), means.copy(), covs.copy())

        resp = np.exp(logp - row_lse[:, None])
        nk = resp.sum(axis=0)
        if np.any(nk <= 0.0):
            raise FitError("a mixture component collapsed to zero mass")
        priors = nk / n
        means = (resp.T @ x) / nk[:, None]
        for j in range(cfg.k):
            diff = x - means[j]
            c = (resp[:, j] * diff.T) @ diff / nk[j]
            covs[j] = 0.5 * (c + c.T) + ridge

    model = GmmModel(priors=priors, means=means, covariances=covs,
                     em_log_likelihoods=tuple(history))
    _check_model(model)
    return model


def _check_model(model: GmmModel) -> None:
    if abs(float(model.priors.sum()) - 1.0) > 1e-12 or np.any(model.priors < 0.0):
        raise FitError("priors do not form a probability vector")
    for j in range(model.k):
        c = model.covariances[j]
        if np.max(np.abs(c - c.T)) > 1e-12:
            raise FitError(f"covariance {j} not symmetric")
        try:
            np.linalg.cholesky(c)
        except np.linalg.LinAlgError as exc:
            raise FitError(
                f"singular covariance in component {j} after regularization; "
                "degenerate data?"
            ) from exc


def log_likelihood(model: GmmModel, samples: np.ndarray) -> float:
    """Sum of per-sample log densities, computed with log-sum-exp."""
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.dim:
        raise InputError(
            f"samples have dimension {x.shape[-1] if x.ndim == 2 else '?'}, "
            f"model expects {model.dim}"
        )
    logp = _component_logpdfs(model.priors, model.means, model.covariances, x)
    return float(np.sum(_logsumexp_rows(logp)))


def gmr_responsibilities(model: GmmModel, x: float) -> np.ndarray:
    """Posterior component weights h_k(x) given the phase coordinate."""
    if not math.isfinite(x):
        raise InputError("phase must be finite")
    mu_x = model.means[:, 0]
    s_xx = model.covariances[:, 0, 0]
    with np.errstate(divide="ignore"):
        log_h = np.where(
            model.priors > 0.0,
            np.log(np.maximum(model.priors, 1e-300))
            - 0.5 * np.log(2.0 * math.pi * s_xx)
            - 0.5 * (x - mu_x) ** 2 / s_xx,
            -np.inf,
        )
    mx = float(np.max(log_h))
    h = np.exp(log_h - mx)
    return h / h.sum()


def gmr(model: GmmModel, x: float) -> WrenchReference:
    """Condition the mixture on phase x: blended conditional mean and the
    responsibility-weighted blend of per-component conditional covariances."""
    h = gmr_responsibilities(model, x)
    mu_x = model.means[:, 0]
    mu_f = model.means[:, 1:]
    s_xx = model.covariances[:, 0, 0]
    s_xf = model.covariances[:, 0, 1:]
    s_ff = model.covariances[:, 1:, 1:]

    cond_means = mu_f + s_xf * ((x - mu_x) / s_xx)[:, None]
    mean = h @ cond_means

    m = mu_f.shape[1]
    cov = np.zeros((m, m))
    for j in range(model.k):
        cov += h[j] * (s_ff[j] - np.outer(s_xf[j], s_xf[j]) / s_xx[j])
    cov = 0.5 * (cov + cov.T)
    return WrenchReference(mean=mean, covariance=cov)


def select_k_bic(samples: np.ndarray, k_range, cfg: GmmConfig | None = None) -> int:
    """Smallest k minimizing BIC = -2*loglik + p*log(n)."""
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise InputError("empty k range")
    base = cfg or GmmConfig()
    x = np.asarray(samples, dtype=np.float64)
    n, d = x.shape
    best_k, best_bic = None, math.inf
    for k in ks:
        model = fit_gmm(x, replace(base, k=k))
        ll = log_likelihood(model, x)
        p = (k - 1) + k * d + k * d * (d + 1) // 2
        bic = -2.0 * ll + p * math.log(n)
        if bic < best_bic:
            best_k, best_bic = k, bic
    return best_k
