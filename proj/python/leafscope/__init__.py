"""Geodesic, leaf and Radon transforms on compact manifolds with boundary."""

import json

import numpy as np

from . import _leafscope as _core
from ._leafscope import ConfigError, NumericalError, Scene, __version__, load_scene, trapped_example

__all__ = [
    "ConfigError",
    "NumericalError",
    "Scene",
    "__version__",
    "attenuated",
    "coverage",
    "density_check",
    "detect_trapped",
    "fbp",
    "fourier_slice",
    "geodesic",
    "leaf_screen",
    "leaf_transform",
    "load_scene",
    "scene_from_dict",
    "trapped_example",
    "xray",
]


def _vec(v):
    return np.asarray(v, dtype=float).ravel()


def scene_from_dict(config):
    return _core.scene_from_json(json.dumps(config))


def geodesic(scene, x, xi, t_cap=0.0):
    """Returns (report, samples); samples rows are (t, x_1, ..., x_n)."""
    report, samples = _core.geodesic(scene, _vec(x), _vec(xi), t_cap)
    return json.loads(report), samples


def coverage(scene, points=1000, dirs=64, t_cap=0.0, seed=0):
    return json.loads(_core.coverage(scene, points, dirs, t_cap, seed))


def detect_trapped(scene, grid=32, **kw):
    return json.loads(_core.detect_trapped(scene, grid, **kw))


def leaf_screen(scene, y, eta):
    return json.loads(_core.leaf_screen(scene, _vec(y), _vec(eta)))


def xray(scene, f, x, xi, tol=1e-8):
    """Returns (mollified, sharp-cutoff) integrals of f along the geodesic."""
    return _core.xray(scene, f, _vec(x), _vec(xi), tol)


def leaf_transform(scene, f, y, eta, lam=0.0, tol=1e-6):
    return _core.leaf_transform(scene, f, _vec(y), _vec(eta), complex(lam), tol)


def attenuated(scene, f, y, eta, lam=0.0):
    return _core.attenuated(scene, f, _vec(y), _vec(eta), lam)


def fbp(sinogram, p_max, half_width, grid=129):
    return _core.fbp(np.asarray(sinogram, dtype=float), p_max, half_width, grid)


def fourier_slice(scene, f, zeta, spacing=0.5):
    return _core.fourier_slice(scene, f, _vec(zeta), spacing)


def density_check(f, lambdas):
    return json.loads(_core.density_check(f, [float(v) for v in lambdas]))
