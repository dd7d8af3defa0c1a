"""Problem data for ``-eps u'' - b u' + c u + dshift u(x-1) = f`` on (0, 2).

Boundary data: ``u(2) = 0`` and ``u = phi`` on (-1, 0] with ``phi(0) = 0``.
``dshift`` is the literal (signed) multiplier of ``u(x-1)`` on the left-hand
side, so a printed ``-d(x) u(x-1)`` is stored as ``dshift = -d``.

Coefficient functions must accept and return numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

__all__ = [
    "ProblemSpec",
    "ProblemError",
    "AssumptionViolation",
    "ValidationReport",
    "LayerModel",
    "validate",
    "compute_gamma",
    "manufacture_rhs",
    "layer_model",
    "registry_get",
    "register",
    "registry_names",
]

Func = Callable[[np.ndarray], np.ndarray]

N_SAMPLES = 100_000
ASSUMPTION_TOL = 1e-12


class ProblemError(ValueError):
    pass


class AssumptionViolation(ProblemError):
    """A structural assumption on the coefficients does not hold."""


def _const(value: float) -> Func:
    return lambda x: np.full_like(np.asarray(x, dtype=float), value)


@dataclass(frozen=True)
class ProblemSpec:
    epsilon: float
    b: Func
    b_prime: Func
    c: Func
    dshift: Func
    f: Func
    phi: Func
    beta: float
    gamma: float
    name: str = "custom"

    def with_epsilon(self, epsilon: float) -> "ProblemSpec":
        return replace(self, epsilon=epsilon)


@dataclass(frozen=True)
class ValidationReport:
    min_b: float
    min_coercivity: float
    phi_at_zero: float
    beta: float
    gamma: float

    @property
    def ok(self) -> bool:
        return (
            self.min_b >= self.beta - ASSUMPTION_TOL
            and self.beta > 0
            and self.min_coercivity >= self.gamma - ASSUMPTION_TOL
            and self.gamma > 0
            and abs(self.phi_at_zero) <= ASSUMPTION_TOL
        )


def _samples(a: float, b: float) -> np.ndarray:
    return np.linspace(a, b, N_SAMPLES)


def _coercivity_estimate(spec: ProblemSpec) -> float:
    x = _samples(0.0, 2.0)
    d_sup = float(np.max(np.abs(spec.dshift(_samples(1.0, 2.0)))))
    return float(np.min(spec.c(x) - 0.5 * spec.b_prime(x) - 0.5 * d_sup))


def compute_gamma(spec: ProblemSpec) -> float:
    """Sampled lower bound of ``c - b'/2 - sup_{[1,2]}|dshift|/2``."""
    g = _coercivity_estimate(spec)
    if g <= 0.0:
        raise AssumptionViolation(
            f"c - b'/2 - sup|dshift|/2 >= gamma > 0 fails: sampled minimum is {g:.6g}"
        )
    return g


def validate(spec: ProblemSpec) -> ValidationReport:
    """Check ``b >= beta > 0``, the coercivity bound and ``phi(0) = 0`` by dense sampling."""
    x = _samples(0.0, 2.0)
    report = ValidationReport(
        min_b=float(np.min(spec.b(x))),
        min_coercivity=_coercivity_estimate(spec),
        phi_at_zero=float(np.asarray(spec.phi(np.array([0.0])))[0]),
        beta=spec.beta,
        gamma=spec.gamma,
    )
    if spec.epsilon <= 0:
        raise AssumptionViolation(f"epsilon must be positive, got {spec.epsilon}")
    if not (spec.beta > 0 and report.min_b >= spec.beta - ASSUMPTION_TOL):
        raise AssumptionViolation(
            f"b >= beta > 0 fails: min b = {report.min_b:.6g}, beta = {spec.beta:.6g}"
        )
    if not (spec.gamma > 0 and report.min_coercivity >= spec.gamma - ASSUMPTION_TOL):
        raise AssumptionViolation(
            "c - b'/2 - sup|dshift|/2 >= gamma > 0 fails: "
            f"min = {report.min_coercivity:.6g}, gamma = {spec.gamma:.6g}"
        )
    if abs(report.phi_at_zero) > ASSUMPTION_TOL:
        raise AssumptionViolation(f"phi(0) = 0 fails: phi(0) = {report.phi_at_zero:.6g}")
    return report


def manufacture_rhs(
    u: Func,
    du: Func,
    ddu: Func,
    skeleton: ProblemSpec,
    phi: Func | None = None,
) -> ProblemSpec:
    """Return ``skeleton`` with ``f`` replaced so that ``u`` solves the problem exactly.

    ``phi`` defaults to ``u`` itself evaluated on [-1, 0], i.e. the natural
    smooth extension.
    """
    ends = np.asarray(u(np.array([0.0, 2.0])), dtype=float)
    if np.any(np.abs(ends) > 1e-12):
        raise ProblemError(f"manufactured solution must vanish at 0 and 2, got {ends.tolist()}")
    history = u if phi is None else phi
    if abs(float(np.asarray(history(np.array([0.0])))[0])) > 1e-12:
        raise ProblemError("history function must vanish at 0")
    eps, b, c, d = skeleton.epsilon, skeleton.b, skeleton.c, skeleton.dshift

    def shifted(x):
        s = np.asarray(x, dtype=float) - 1.0
        return np.where(s <= 0.0, history(np.minimum(s, 0.0)), u(np.maximum(s, 0.0)))

    def f(x):
        x = np.asarray(x, dtype=float)
        return -eps * ddu(x) - b(x) * du(x) + c(x) * u(x) + d(x) * shifted(x)

    return replace(skeleton, f=f, phi=history, name=f"{skeleton.name}-manufactured")


@dataclass(frozen=True)
class LayerModel:
    """Synthetic smooth part, boundary layer at 0 and weak layer at 1.

    ``S = cos(pi x / 2)``, ``E = exp(-beta x / eps)`` and
    ``W = eps exp(-beta (x - 1) / eps)`` on (1, 2), zero elsewhere.
    Each component takes the derivative order as second argument.
    """

    beta: float
    epsilon: float
    degree: int

    def S(self, x, order: int = 0):
        x = np.asarray(x, dtype=float)
        w = 0.5 * math.pi
        return w**order * np.cos(w * x + 0.5 * order * math.pi)

    def E(self, x, order: int = 0):
        x = np.asarray(x, dtype=float)
        return (-self.beta / self.epsilon) ** order * np.exp(-self.beta * x / self.epsilon)

    def W(self, x, order: int = 0):
        x = np.asarray(x, dtype=float)
        s = np.maximum(x - 1.0, 0.0)
        val = self.epsilon * (-self.beta / self.epsilon) ** order * np.exp(-self.beta * s / self.epsilon)
        return np.where(x > 1.0, val, 0.0)

    def u(self, x, order: int = 0):
        return self.S(x, order) + self.E(x, order) + self.W(x, order)


def layer_model(beta: float, epsilon: float, degree: int) -> LayerModel:
    if beta <= 0 or epsilon <= 0:
        raise ProblemError("beta and epsilon must be positive")
    return LayerModel(beta=beta, epsilon=epsilon, degree=degree)


# -- registry ---------------------------------------------------------------

def _paper_d(x):
    x = np.asarray(x, dtype=float)
    return np.where(x < 1.0, 1.0 - x, 2.0 + np.sin(4.0 * np.pi * x))


def _paper_spec(epsilon: float, dshift: Func, name: str) -> ProblemSpec:
    return ProblemSpec(
        epsilon=epsilon,
        b=lambda x: 2.0 + np.asarray(x, dtype=float),
        b_prime=_const(1.0),
        c=lambda x: 3.0 + np.asarray(x, dtype=float),
        dshift=dshift,
        f=_const(3.0),
        phi=lambda x: np.asarray(x, dtype=float) ** 2,
        beta=2.0,
        gamma=1.0,
        name=name,
    )


def paper_example(epsilon: float = 1e-6) -> ProblemSpec:
    """``-eps u'' - (2+x) u' + (3+x) u + d(x) u(x-1) = 3`` with ``phi(x) = x**2``.

    ``d = 1 - x`` on (0, 1) and ``2 + sin(4 pi x)`` on [1, 2).
    """
    return _paper_spec(epsilon, _paper_d, "paper-example")


def paper_example_printed(epsilon: float = 1e-6) -> ProblemSpec:
    """Same data as :func:`paper_example` with ``-d(x) u(x-1)`` on the left-hand side."""
    return _paper_spec(epsilon, lambda x: -_paper_d(x), "paper-example-printed")


def _mms_u(x):
    x = np.asarray(x, dtype=float)
    return x * (2.0 - x) * np.exp(-x)


def _mms_du(x):
    x = np.asarray(x, dtype=float)
    return (x * x - 4.0 * x + 2.0) * np.exp(-x)


def _mms_ddu(x):
    x = np.asarray(x, dtype=float)
    return (-x * x + 6.0 * x - 6.0) * np.exp(-x)


def manufactured(epsilon: float = 1e-2) -> ProblemSpec:
    """Benchmark coefficients with exact solution ``x (2 - x) exp(-x)``."""
    spec = manufacture_rhs(_mms_u, _mms_du, _mms_ddu, paper_example(epsilon))
    return replace(spec, name="manufactured")


# Known exact solutions as (value, derivative), keyed by registry name.
EXACT_SOLUTIONS = {"manufactured": (_mms_u, _mms_du)}

_REGISTRY: dict[str, Callable[..., ProblemSpec]] = {
    "paper-example": paper_example,
    "paper-example-printed": paper_example_printed,
    "manufactured": manufactured,
}


def register(name: str, factory: Callable[..., ProblemSpec]) -> None:
    _REGISTRY[name] = factory


def registry_names() -> list[str]:
    return sorted(_REGISTRY)


def registry_get(name: str, epsilon: float | None = None, beta: float | None = None,
                 gamma: float | None = None) -> ProblemSpec:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ProblemError(f"unknown problem {name!r}; known: {', '.join(registry_names())}") from None
    spec = factory() if epsilon is None else factory(epsilon)
    if beta is not None:
        spec = replace(spec, beta=beta)
    if gamma is not None:
        spec = replace(spec, gamma=gamma)
    return spec
