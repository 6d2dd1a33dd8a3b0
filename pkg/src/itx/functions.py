"""Analytic test functions f(tau) with a declared exponential decay rate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import PreconditionError

__all__ = ["IndexFunction", "f1", "f2", "f3", "zero", "exp_pi", "gaussian", "CORPUS", "by_name"]


@dataclass(frozen=True)
class IndexFunction:
    """f(tau) with |f(tau)| <= M exp(-decay_rate tau)."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    decay_rate: float
    label: str

    def __post_init__(self):
        if not self.decay_rate > 0:
            raise PreconditionError("decay_rate must be positive")

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        out = np.asarray(self.evaluator(tau), dtype=float)
        return out.item() if out.ndim == 0 else out

    def admissible(self, delta: float) -> bool:
        """Membership condition: decay_rate > pi - 2 delta."""
        return self.decay_rate > np.pi - 2 * delta

    def require(self, delta: float):
        if not self.admissible(delta):
            raise PreconditionError(
                f"{self.label}: decay rate {self.decay_rate} not above pi - 2*delta = {np.pi - 2 * delta:.6g}"
            )

    @property
    def is_zero(self) -> bool:
        return self.label == "zero"

    def scale(self, alpha: float) -> "IndexFunction":
        ev = self.evaluator
        return IndexFunction(lambda t: alpha * ev(t), self.decay_rate, f"{alpha:g}*{self.label}")

    def __add__(self, other: "IndexFunction") -> "IndexFunction":
        a, b = self.evaluator, other.evaluator
        return IndexFunction(lambda t: a(t) + b(t), min(self.decay_rate, other.decay_rate),
                             f"{self.label}+{other.label}")


# tau^k e^{-pi tau} decays at every rate below pi; 3.0 leaves room for the
# polynomial factor while keeping the membership condition for delta > 0.071.
_RATE = 3.0

f1 = IndexFunction(lambda t: t * np.exp(-np.pi * t), _RATE, "f1")
f2 = IndexFunction(lambda t: t * t * np.exp(-np.pi * t), _RATE, "f2")
f3 = IndexFunction(lambda t: np.exp(-np.pi * t) * np.sin(t) ** 2, _RATE, "f3")
exp_pi = IndexFunction(lambda t: np.exp(-np.pi * t), np.pi, "exp")
zero = IndexFunction(lambda t: np.zeros_like(np.asarray(t, dtype=float)), 50.0, "zero")


def gaussian(center: float, width: float) -> IndexFunction:
    """Unit-mass Gaussian bump in tau (its decay is super-exponential)."""
    norm = 1.0 / (width * np.sqrt(2 * np.pi))
    # any fixed rate bounds a Gaussian; a modest one keeps the constant
    # M = exp(rate*center + (rate*width)^2/2) finite
    return IndexFunction(lambda t: norm * np.exp(-0.5 * ((t - center) / width) ** 2),
                         20.0, f"gauss({center:g},{width:g})")


CORPUS = {"f1": f1, "f2": f2, "f3": f3}
_NAMED = {**CORPUS, "zero": zero, "exp": exp_pi}


def by_name(name: str) -> IndexFunction:
    try:
        return _NAMED[name]
    except KeyError:
        raise PreconditionError(f"unknown test function {name!r}; choose from {sorted(_NAMED)}") from None
