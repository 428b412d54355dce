"""SGD with classical momentum."""

import numpy as np

from src.errors import DataError, ShapeError


def sgd_update(params, grads, learning_rate, momentum, velocity=None):
    """Return updated ``(params, velocity)`` dicts; inputs are left untouched.

    velocity <- momentum * velocity - learning_rate * grad
    param    <- param + velocity
    """
    if learning_rate <= 0:
        raise DataError(f"learning rate must be positive, got {learning_rate}")
    if not 0 <= momentum < 1:
        raise DataError(f"momentum must be in [0, 1), got {momentum}")
    velocity = velocity or {}
    new_params, new_velocity = {}, {}
    for name, param in params.items():
        grad = grads[name]
        if grad.shape != param.shape:
            raise ShapeError(f"gradient for {name} has shape {grad.shape}, expected {param.shape}")
        prev = velocity.get(name)
        if prev is None:
            prev = np.zeros_like(param)
        elif prev.shape != param.shape:
            raise ShapeError(f"velocity for {name} has shape {prev.shape}, expected {param.shape}")
        step = momentum * prev - learning_rate * grad
        new_velocity[name] = step.astype(param.dtype, copy=False)
        new_params[name] = (param + new_velocity[name]).astype(param.dtype, copy=False)
    return new_params, new_velocity
