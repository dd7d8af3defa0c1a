"""Frozen benchmark values for the shifted model problem at eps = 1e-6.

Errors are given to three significant digits and rates to two decimals,
as tabulated.  Each entry maps H to ``(cells, error, rate)``;
the rate is None on the last row.
"""

H_VALUES = (0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1)

_STANDARD_CELLS = (46, 50, 56, 64, 74, 88, 112, 162, 310)

_STANDARD_ERRORS = {
    1: (3.14e-01, 2.85e-01, 2.52e-01, 2.21e-01, 1.86e-01, 1.50e-01, 1.13e-01, 7.59e-02, 3.81e-02),
    2: (6.83e-02, 5.57e-02, 4.40e-02, 3.33e-02, 2.36e-02, 1.53e-02, 8.77e-03, 3.94e-03, 9.96e-04),
    3: (1.04e-02, 7.63e-03, 5.19e-03, 3.84e-03, 2.26e-03, 1.26e-03, 5.56e-04, 1.45e-04, 1.78e-05),
}
_STANDARD_RATES = {
    1: (1.20, 1.05, 0.99, 1.19, 1.24, 1.17, 1.08, 1.06),
    2: (2.44, 2.09, 2.08, 2.39, 2.49, 2.31, 2.17, 2.12),
    3: (3.67, 3.39, 2.27, 3.64, 3.37, 3.40, 3.64, 3.23),
}

_COARSE_CELLS = {
    1: (25, 27, 30, 34, 39, 47, 60, 86, 165),
    2: (35, 38, 43, 49, 57, 67, 86, 124, 238),
    3: (39, 42, 47, 54, 62, 74, 95, 137, 262),
}
_COARSE_ERRORS = {
    1: (3.14e-01, 2.84e-01, 2.53e-01, 2.20e-01, 1.86e-01, 1.52e-01, 1.13e-01, 7.81e-02, 3.81e-02),
    2: (6.85e-02, 5.58e-02, 4.40e-02, 3.31e-02, 2.36e-02, 1.54e-02, 8.75e-03, 3.94e-03, 9.96e-04),
    3: (1.02e-02, 7.91e-03, 5.25e-03, 3.94e-03, 2.01e-03, 1.12e-03, 4.76e-04, 1.37e-04, 1.76e-05),
}
_COARSE_RATES = {
    1: (1.31, 1.11, 1.11, 1.23, 1.07, 1.20, 1.03, 1.10),
    2: (2.49, 1.93, 2.19, 2.23, 2.64, 2.26, 2.18, 2.11),
    3: (3.43, 3.64, 2.06, 4.89, 3.31, 3.42, 3.41, 3.16),
}


def _rows(cells, errors, rates):
    return {H: (n, e, r) for H, n, e, r in zip(H_VALUES, cells, errors, (*rates, None))}


STANDARD = {k: _rows(_STANDARD_CELLS, _STANDARD_ERRORS[k], _STANDARD_RATES[k]) for k in (1, 2, 3)}
COARSE = {k: _rows(_COARSE_CELLS[k], _COARSE_ERRORS[k], _COARSE_RATES[k]) for k in (1, 2, 3)}


def benchmark(variant: str) -> dict:
    """``{k: {H: (cells, error, rate)}}`` for ``"standard"`` or ``"coarse"``."""
    return {"standard": STANDARD, "coarse": COARSE}[str(getattr(variant, "value", variant))]
