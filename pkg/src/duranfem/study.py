"""H-sweep convergence studies against a reference or exact solution."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

from .analysis import (
    ConvergenceRow,
    ConvergenceTable,
    EnergyNormParams,
    error_vs_exact,
    error_vs_reference,
    fill_rates,
)
from .fem import FeFunction, FeSpace, solve_problem
from .mesh import MeshParams, Variant, build_mesh, check_coarse_assumption
from .problem import EXACT_SOLUTIONS, registry_get, validate

__all__ = ["StudyConfig", "run_study", "solve_on", "emit", "read_config", "TABLE_H"]

log = logging.getLogger(__name__)

TABLE_H = (0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1)


class CoarseAssumptionWarning(UserWarning):
    pass


@dataclass
class StudyConfig:
    problem: str = "paper-example"
    variant: Variant = Variant.STANDARD
    degree: int = 1
    epsilon: float = 1e-6
    H_list: Sequence[float] = TABLE_H
    reference_degree: int = 4
    reference_H: float = 0.05
    quad_points: int | None = None
    omission_theta: float = 1e-3
    rate_by: str = "cells"
    use_exact: bool = True
    output: Path | None = None

    def __post_init__(self):
        self.variant = Variant(self.variant)
        self.H_list = tuple(float(h) for h in self.H_list)
        if not self.H_list:
            raise ValueError("H_list is empty")
        if any(not 0.0 < h < 1.0 for h in self.H_list):
            raise ValueError("all H values must lie in (0, 1)")
        if any(a <= b for a, b in zip(self.H_list, self.H_list[1:])):
            raise ValueError("H_list must be strictly decreasing")
        if self.reference_H > min(self.H_list):
            raise ValueError("reference_H must not exceed the smallest H in the sweep")

    def mesh_params(self, H: float, degree: int | None = None) -> MeshParams:
        return MeshParams(H, self.epsilon, degree or self.degree, self.variant, self.omission_theta)


def solve_on(spec, params: MeshParams, degree: int, quad_points: int | None = None) -> FeFunction:
    mesh = build_mesh(params)
    return solve_problem(spec, FeSpace(mesh, degree), quad_points)


def run_study(config: StudyConfig) -> ConvergenceTable:
    spec = registry_get(config.problem, config.epsilon)
    validate(spec)
    norm = EnergyNormParams(spec.epsilon, spec.gamma)
    exact = EXACT_SOLUTIONS.get(config.problem) if config.use_exact else None

    ref = None
    if exact is None:
        ref_params = config.mesh_params(config.reference_H, config.reference_degree)
        ref = solve_on(spec, ref_params, config.reference_degree)
        log.info("reference: %d cells, degree %d", ref.space.n_cells, config.reference_degree)

    table = ConvergenceTable(meta={
        "problem": config.problem,
        "variant": config.variant.value,
        "k": config.degree,
        "epsilon": config.epsilon,
        "reference": "exact" if exact else f"k={config.reference_degree},H={config.reference_H}",
    })
    for H in config.H_list:
        params = config.mesh_params(H)
        if config.variant is Variant.COARSE and not check_coarse_assumption(params):
            warnings.warn(f"exp(-eps^(-1/k)) <= H^(k-1) fails for H={H}, k={config.degree}",
                          CoarseAssumptionWarning, stacklevel=2)
        u = solve_on(spec, params, config.degree, config.quad_points)
        err = error_vs_exact(u, exact, norm) if exact else error_vs_reference(u, ref, norm)
        table.rows.append(ConvergenceRow(H, u.space.n_cells, u.space.dof_count, err))
        log.info("H=%g cells=%d error=%.3e", H, u.space.n_cells, err)
    return fill_rates(table, config.rate_by)


def emit(table: ConvergenceTable, fmt: str = "csv", path: Path | str | None = None) -> str:
    if fmt == "csv":
        text = table.to_csv()
    elif fmt == "text":
        text = table.to_text()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


_CONFIG_TYPES = {f.name: f for f in fields(StudyConfig)}


def read_config(path: Path | str) -> dict:
    """Parse a flat ``key = value`` file into StudyConfig keyword arguments."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "H":
            key = "H_list"
        if key not in _CONFIG_TYPES:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, value)
    return out


def _convert(key: str, value: str):
    if key == "H_list":
        return tuple(float(v) for v in value.split(",") if v.strip())
    if key in ("degree", "reference_degree", "quad_points"):
        return int(value)
    if key in ("epsilon", "reference_H", "omission_theta"):
        return float(value)
    if key == "use_exact":
        return value.lower() in ("1", "true", "yes")
    if key == "output":
        return Path(value)
    return value
