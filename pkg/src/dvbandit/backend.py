"""Backend selection: compiled trial kernels when the extension is built,
pure Python otherwise.

The compiled module mirrors the pure-Python arithmetic operation for
operation, so both backends produce bit-identical trials; selection is a
speed decision only.  Override with DVBANDIT_BACKEND=python|compiled or the
``backend=`` argument accepted by the harness entry points.
"""

import os

import numpy as np

from . import _rng

try:
    from . import _ckernels as _compiled
except ImportError:
    _compiled = None

_ENV_VAR = "DVBANDIT_BACKEND"
_CHOICES = ("auto", "compiled", "python")


def have_compiled() -> bool:
    return _compiled is not None


def resolve(choice: str = "auto") -> str:
    """Resolve a backend request to 'compiled' or 'python'."""
    if choice == "auto":
        choice = os.environ.get(_ENV_VAR, "auto")
    if choice not in _CHOICES:
        raise ValueError(f"unknown backend {choice!r}, expected one of {_CHOICES}")
    if choice == "auto":
        return "compiled" if have_compiled() else "python"
    if choice == "compiled" and not have_compiled():
        raise RuntimeError("compiled backend requested but the extension is not built")
    return choice


def active_backend() -> str:
    """The backend used by default in this process."""
    return resolve("auto")


def standard_normal(master_seed: int, trial_index: int, arm: int, t: int) -> float:
    """Scalar keyed normal draw via the active backend (both give equal bits)."""
    if active_backend() == "compiled":
        return _compiled.standard_normal(
            master_seed & _rng.MASK64, trial_index, arm, t
        )
    return _rng.standard_normal(master_seed, trial_index, arm, t)


def standard_normal_grid(master_seed, trial_indices, arm, ts) -> np.ndarray:
    """Vectorized keyed draws; the numpy path already matches the scalar one."""
    return _rng.standard_normal_grid(master_seed, trial_indices, arm, ts)


def _means_array(means) -> np.ndarray:
    return np.asarray(means, dtype=np.float64)


def kernel_wtcs(means, sigma, master_seed, trial_index, t_start, window, choice="auto"):
    """Fused wait-then-sample trial; None if the compiled backend is not in play."""
    if resolve(choice) != "compiled":
        return None
    return _compiled.run_wtcs(
        _means_array(means), sigma, master_seed & _rng.MASK64, trial_index,
        t_start, window,
    )


def kernel_pswse(means, sigma, master_seed, trial_index, lam, delta, max_rounds,
                 choice="auto"):
    if resolve(choice) != "compiled":
        return None
    return _compiled.run_pswse(
        _means_array(means), sigma, master_seed & _rng.MASK64, trial_index,
        lam, delta, max_rounds,
    )


def kernel_se(means, sigma, master_seed, trial_index, delta, max_rounds,
              choice="auto"):
    if resolve(choice) != "compiled":
        return None
    return _compiled.run_se(
        _means_array(means), sigma, master_seed & _rng.MASK64, trial_index,
        delta, max_rounds,
    )


def kernel_lucb(means, sigma, master_seed, trial_index, delta, max_rounds,
                choice="auto"):
    if resolve(choice) != "compiled":
        return None
    return _compiled.run_lucb(
        _means_array(means), sigma, master_seed & _rng.MASK64, trial_index,
        delta, max_rounds,
    )
