"""Physics-informed network training and loss landscapes for fixed points of dynamical systems.

Configs are dicts with the same keys as the ``train`` section of a CLI manifest.
"""

import json

import numpy as np

from . import _core
from ._core import (
    CapabilityError,
    ConfigError,
    DegenerateDirectionError,
    DivergenceError,
    DomainError,
    Error,
    NumericalError,
    ParseError,
    UndefinedError,
    allen_cahn_reference,
    l2_relative_error,
    pendulum_energy,
    pendulum_reference,
    toy_analytic,
)

__all__ = [
    "CapabilityError",
    "ConfigError",
    "DegenerateDirectionError",
    "DivergenceError",
    "DomainError",
    "Error",
    "NumericalError",
    "ParseError",
    "UndefinedError",
    "allen_cahn_reference",
    "evaluate",
    "init_params",
    "input_derivatives",
    "l2_relative_error",
    "loss_landscape",
    "pendulum_energy",
    "pendulum_reference",
    "physics_loss",
    "toy_analytic",
    "train",
]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def init_params(config):
    """Initial parameter vector of the configured network."""
    return _core.init_params(_text(config))


def input_derivatives(config, params, point, request):
    """Outputs differentiated along each axis tuple in ``request``, e.g. [(), (0,), (1, 1)]."""
    return _core.input_derivatives(_text(config), params, np.atleast_1d(point), [list(r) for r in request])


def physics_loss(config, params, points):
    """(L_f, dL_f/dtheta) on points of shape (N, inputs)."""
    return _core.physics_loss(_text(config), params, np.asarray(points, dtype=float))


def train(config):
    """Runs one training job; returns losses (epochs x [L_f, L_u, L]), checkpoints and final parameters."""
    return _core.train(_text(config))


def evaluate(config, params, threshold=0.15, min_L_f=0.0):
    """L2 error against the reference and the outcome class of an ODE run."""
    return _core.evaluate(_text(config), params, threshold, min_L_f)


def loss_landscape(config, theta0, theta_mid, theta_final, T, **kwargs):
    """Physics loss on the plane spanned by three checkpoints."""
    return _core.loss_landscape(_text(config), theta0, theta_mid, theta_final, T, **kwargs)
