"""scikit-learn style front end to the secure state search."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_epsilon, check_noise_bounds, check_positive_int
from .residual import DEFAULT_EPSILON
from .search import SearchMode, secure_estimate
from .system import LtiSystem, StackedWindow, max_allowable_attacks


class SecureStateEstimator(TransformerMixin, BaseEstimator):
    """Estimate the window-initial state of an LTI plant under sensor attacks.

    Each sample is one stacked measurement window of length ``window * p``
    (time-major: all sensors at the first instant, then the next one).

    Parameters
    ----------
    system : LtiSystem
        The plant ``(A, C)``.
    window : int, optional
        Number of time instants per sample; defaults to the state dimension.
    epsilon : float, default=1e-5
        Solution accuracy used in the fit budget.
    s_bar : int or "auto", default="auto"
        Maximum number of attacked sensors. ``"auto"`` derives it from sparse
        observability during :meth:`fit` (exhaustive, keep ``p`` small).
        Ignored in ``halfp`` mode.
    mode : {"exact", "halfp"}, default="exact"
    noise_bounds : array-like of shape (p,), optional
        Per-sensor bounds on the stacked noise norm.

    Attributes
    ----------
    s_bar_ : int or None
    noise_bounds_ : ndarray of shape (p,)
    n_features_in_ : int
    results_ : list of EstimationResult
        One entry per sample of the last :meth:`predict`/:meth:`transform`.
    """

    def __init__(self, system=None, window=None, epsilon=DEFAULT_EPSILON, s_bar="auto",
                 mode="exact", noise_bounds=None):
        self.system = system
        self.window = window
        self.epsilon = epsilon
        self.s_bar = s_bar
        self.mode = mode
        self.noise_bounds = noise_bounds

    def fit(self, X=None, y=None):
        """Validate the configuration and resolve ``s_bar``; `X` is only shape-checked."""
        if not isinstance(self.system, LtiSystem):
            raise TypeError("system must be an LtiSystem")
        self.window_ = self.system.n if self.window is None else check_positive_int(
            self.window, "window")
        self.mode_ = SearchMode(self.mode)
        check_epsilon(self.epsilon)
        self.noise_bounds_ = check_noise_bounds(self.noise_bounds, self.system.p)
        self.n_features_in_ = self.window_ * self.system.p
        if self.mode_ is SearchMode.HALF_P:
            self.s_bar_ = None
        elif self.s_bar == "auto":
            self.s_bar_ = max_allowable_attacks(self.system, self.window_)
        else:
            self.s_bar_ = check_positive_int(self.s_bar, "s_bar", minimum=0)
        if X is not None:
            self._check_X(X)
        return self

    def _check_X(self, X):
        X = check_array(np.atleast_2d(np.asarray(X, dtype=float)))
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected window * p = {self.n_features_in_}"
            )
        return X

    def estimate(self, Y):
        """Run the search on a single stacked window and return the full result."""
        check_is_fitted(self, "n_features_in_")
        Y = self._check_X(Y)[0]
        window = StackedWindow(Y, T=self.window_, p=self.system.p)
        return secure_estimate(window, self.system, self.noise_bounds_, self.epsilon,
                               self.s_bar_, self.mode_)

    def _run_all(self, X):
        check_is_fitted(self, "n_features_in_")
        X = self._check_X(X)
        self.results_ = [self.estimate(row) for row in X]
        return self.results_

    def predict(self, X):
        """Estimated states, shape ``(n_samples, n)``; NaN rows where the search failed."""
        out = np.full((0, self.system.n), np.nan)
        rows = []
        for result in self._run_all(X):
            rows.append(result.x_hat if result.solved else np.full(self.system.n, np.nan))
        return np.vstack(rows) if rows else out

    def transform(self, X):
        """Attack indicators, shape ``(n_samples, p)``: 1 attacked, 0 attack-free, NaN on failure."""
        flags = []
        for result in self._run_all(X):
            row = np.full(self.system.p, np.nan)
            if result.solved:
                row[:] = 0.0
                row[list(result.attacked)] = 1.0
            flags.append(row)
        return np.vstack(flags)
