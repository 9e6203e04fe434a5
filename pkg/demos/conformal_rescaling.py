"""Transport in a rescaled metric equals conjugated transport in the original one.

For ghat = e^{2U} g, tractor components change by the matrix M(U, dU) of
the splitting.  Parallel transport is a property of the conformal class, so
transport for ghat must equal M(end) T M(start)^-1 with T the transport for g.

    python demos/conformal_rescaling.py
"""
import numpy as np

from tractorlab._jax import jnp
from tractorlab.geometry import conformal_rescale, get_chart
from tractorlab.tractor import LoopPath, change_matrix_at, segment, transport_array


def main():
    g = get_chart("generic_poly(2,3)")
    ups = lambda x: 0.3 * jnp.sin(x[0] - x[3]) + 0.2 * x[1] * x[2]  # noqa: E731
    ghat = conformal_rescale(g, ups, name="ghat")
    params = [np.full(5, -0.1), np.array([0.3, 0.1, -0.2, 0.0, 0.2]), 0.05 * np.ones(5)]
    T = transport_array(LoopPath([segment(g, "poly", params)]), np.eye(7)).value
    That = transport_array(LoopPath([segment(ghat, "poly", params)]), np.eye(7)).value
    path = LoopPath([segment(g, "poly", params)])
    Ma = change_matrix_at(g, path.start, ups)
    Mb = change_matrix_at(g, path.segments[0].end, ups)
    print(f"|T_hat - M(b) T M(a)^-1| = {np.max(np.abs(That - Mb @ T @ np.linalg.inv(Ma))):.2e}")
    print(f"|T_hat - T|               = {np.max(np.abs(That - T)):.2e}  (the splittings differ)")


if __name__ == "__main__":
    main()
