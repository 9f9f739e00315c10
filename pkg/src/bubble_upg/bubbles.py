"""Bubble generating functions on a single element [0, h].

Both bubble families vanish at the element ends; a UPG scheme only sees
their average b, so the quadratic bubble can be rescaled to reproduce the
exponential bubble's average exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, ParameterError

# h/(2 eps) above which coth(h/(2 eps)) == 1 in double precision (difference < 2e-17)
COTH_SATURATION = 19.0
# h/eps above which exp(-h/eps) is lost against 1 and the exponential bubble is 1 - x/h
EXP_COLLAPSE_RATIO = 36.0


def _require_positive(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise DomainError(f"{k} must be positive, got {v}")


def tanh_half_ratio(h: float, epsilon: float) -> float:
    """t_e = tanh(h / (2 eps))."""
    _require_positive(h=h, epsilon=epsilon)
    return float(np.tanh(h / (2.0 * epsilon)))


def _langevin(x: float) -> float:
    """coth(x) - 1/x, accurate for small x."""
    if x > COTH_SATURATION:
        return 1.0 - 1.0 / x
    if x < 0.1:
        x2 = x * x
        return x * (1 / 3 - x2 * (1 / 45 - x2 * (2 / 945 - x2 * (1 / 4725 - x2 * 2 / 93555))))
    return 1.0 / np.tanh(x) - 1.0 / x


def exponential_average(h: float, epsilon: float) -> float:
    """Average of the exponential bubble, 1/(2 t_e) - eps/h."""
    _require_positive(h=h, epsilon=epsilon)
    return 0.5 * _langevin(h / (2.0 * epsilon))


def special_beta(h: float, epsilon: float) -> float:
    """beta = (3/4) (coth(h/(2 eps)) - 2 eps/h), so that 2 beta/3 matches the exponential average."""
    _require_positive(h=h, epsilon=epsilon)
    return 0.75 * _langevin(h / (2.0 * epsilon))


def _check_element(x, h):
    xa = np.asarray(x, dtype=float)
    tol = 1e-14 * h
    if np.any(xa < -tol) or np.any(xa > h + tol) or np.any(np.isnan(xa)):
        raise DomainError(f"bubble argument must lie in [0, h] = [0, {h}]")
    return np.clip(xa, 0.0, h)


def _scalar(a):
    return float(a) if np.ndim(a) == 0 else a


def eval_quadratic_bubble(x, h: float, beta: float):
    """B^q(x) = (4 beta / h^2) x (h - x)."""
    _require_positive(h=h)
    xa = _check_element(x, h)
    return _scalar(4.0 * beta / h**2 * xa * (h - xa))


def _exp_bubble(t, h, epsilon, collapse):
    if collapse and h / epsilon > EXP_COLLAPSE_RATIO:
        return 1.0 - t / h
    return np.expm1(-t / epsilon) / np.expm1(-h / epsilon) - t / h


def eval_exponential_bubble(x, h: float, epsilon: float, collapse: bool = True):
    """Solution of -eps B'' - B' = 1/h, B(0) = B(h) = 0.

    With ``collapse`` (the default) the bubble is returned as exactly 1 - x/h
    once h/eps exceeds EXP_COLLAPSE_RATIO, which is what double precision
    produces away from the first few eps of the element anyway.
    """
    _require_positive(h=h, epsilon=epsilon)
    xa = _check_element(x, h)
    return _scalar(_exp_bubble(xa, h, epsilon, collapse))


@dataclass(frozen=True)
class BubbleSpec:
    family: str
    epsilon: float
    h: float
    beta: Optional[float] = None
    collapse: bool = True

    def __post_init__(self):
        if self.family not in ("quadratic", "exponential"):
            raise ParameterError(f"unknown bubble family {self.family!r}")
        _require_positive(h=self.h, epsilon=self.epsilon)
        if self.family == "quadratic" and self.beta is None:
            raise ParameterError("quadratic bubble needs beta")
        if not self.average_b > 0:
            raise ParameterError(f"bubble average must be positive, got {self.average_b}")

    @classmethod
    def quadratic(cls, h, epsilon, beta="special") -> "BubbleSpec":
        if isinstance(beta, str):
            if beta != "special":
                raise ParameterError(f"beta policy must be 'special' or a number, got {beta!r}")
            beta = special_beta(h, epsilon)
        return cls("quadratic", epsilon, h, float(beta))

    @classmethod
    def exponential(cls, h, epsilon, collapse=True) -> "BubbleSpec":
        return cls("exponential", epsilon, h, None, collapse)

    @property
    def average_b(self) -> float:
        if self.family == "quadratic":
            return 2.0 * self.beta / 3.0
        return exponential_average(self.h, self.epsilon)

    @property
    def collapsed(self) -> bool:
        return self.family == "exponential" and self.collapse and self.h / self.epsilon > EXP_COLLAPSE_RATIO

    def values(self, t):
        """Vectorized bubble values for offsets t in [0, h] (no domain check)."""
        t = np.asarray(t, dtype=float)
        if self.family == "quadratic":
            return 4.0 * self.beta / self.h**2 * t * (self.h - t)
        return _exp_bubble(t, self.h, self.epsilon, self.collapse)

    def layer_breaks(self) -> np.ndarray:
        """Offsets in (0, h) resolving the exp(-t/eps) layer at the element's left end."""
        if self.family != "exponential" or self.collapsed:
            return np.zeros(0)
        from .quadrature import LAYER_REACH, graded_distances

        reach = min(self.h, LAYER_REACH * self.epsilon)
        d = graded_distances(self.epsilon, self.epsilon / 4.0, reach)
        return d[d < self.h]


def bubble_average(spec: BubbleSpec) -> float:
    return spec.average_b
