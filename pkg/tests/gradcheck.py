"""Central finite-difference gradient checking helpers."""

import numpy as np


def central_diff(f, x: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Elementwise central difference of a scalar function of array x."""
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        orig = x[i]
        x[i] = orig + h
        fp = f()
        x[i] = orig - h
        fm = f()
        x[i] = orig
        grad[i] = (fp - fm) / (2.0 * h)
    return grad


def rel_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(np.abs(numeric).max(), np.abs(analytic).max(), 1e-8)
    return float(np.abs(analytic - numeric).max() / scale)


def check_layer_gradients(layer, x: np.ndarray, rng, tol: float = 1e-3) -> None:
    """Verify input and parameter gradients of a layer at a random point.

    The scalar objective is sum(forward(x) * r) for a fixed random r, whose
    analytic gradient is backward(r).
    """
    r = rng.normal(size=layer.forward(x.copy(), training=True).shape)

    def objective():
        return float(np.sum(layer.forward(x, training=True) * r))

    for p in layer.params():
        p.zero_grad()
    layer.forward(x, training=True)
    grad_x = layer.backward(r.copy())

    num_x = central_diff(objective, x)
    err = rel_error(grad_x, num_x)
    assert err < tol, f"input gradient relative error {err}"
    for i, p in enumerate(layer.params()):
        num_p = central_diff(objective, p.data)
        err = rel_error(p.grad, num_p)
        assert err < tol, f"parameter {i} gradient relative error {err}"


def check_loss_gradient(loss_fn, pred: np.ndarray, tol: float = 1e-3, h: float = 1e-4) -> None:
    """Verify the gradient a loss returns against central differences."""
    _, grad = loss_fn(pred)

    def objective():
        return loss_fn(pred)[0]

    num = central_diff(objective, pred, h=h)
    err = rel_error(grad, num)
    assert err < tol, f"loss gradient relative error {err}"
