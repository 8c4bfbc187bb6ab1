import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mlab import Field, GridSpec, dft_inverse, spectrum_from_modes

settings.register_profile(
    "suite",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def rel_err(got: np.ndarray, want: np.ndarray) -> float:
    got = np.asarray(got)
    want = np.asarray(want)
    scale = float(np.max(np.abs(want)))
    if scale == 0.0:
        return float(np.max(np.abs(got)))
    return float(np.max(np.abs(got - want))) / scale


def rel_l2(got: np.ndarray, want: np.ndarray) -> float:
    got = np.asarray(got).reshape(-1)
    want = np.asarray(want).reshape(-1)
    scale = float(np.linalg.norm(want))
    if scale == 0.0:
        return float(np.linalg.norm(got))
    return float(np.linalg.norm(got - want)) / scale


def random_trig(
    grid: GridSpec, degree: int, seed: int, real: bool = True
) -> tuple[Field, dict[tuple[int, ...], complex]]:
    """Random trig polynomial of max frequency ``degree`` plus its mode dict.

    The mode dict is the ground truth the oracles consume; the Field comes
    from the library's inverse transform of the same modes.
    """
    rng = np.random.default_rng(seed)
    modes: dict[tuple[int, ...], complex] = {}
    lo, hi = -degree, degree + 1
    for xi in np.ndindex(*(2 * degree + 1,) * grid.d):
        key = tuple(int(x) + lo for x in xi)
        c = complex(rng.standard_normal(), rng.standard_normal())
        modes[key] = c
    if real:
        sym: dict[tuple[int, ...], complex] = {}
        for xi, c in modes.items():
            neg = tuple(-x for x in xi)
            sym[xi] = 0.5 * (c + modes[neg].conjugate())
        modes = sym
    spec = spectrum_from_modes(grid, modes)
    return dft_inverse(spec, is_real=real), modes


@pytest.fixture
def grid1d() -> GridSpec:
    return GridSpec(d=1, n=8)


@pytest.fixture
def grid2d() -> GridSpec:
    return GridSpec(d=2, n=8)
