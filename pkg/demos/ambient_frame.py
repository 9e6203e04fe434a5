"""The ambient metric reproduces the tractor metric and connection.

Along t = 1, r = 0 the frame (d_t, d_i / t, d_r / t) pulls the ambient
metric back to h and the ambient Levi-Civita connection back to the tractor
connection matrix.

    python demos/ambient_frame.py [chart]
"""
import sys

import numpy as np

from tractorlab.ambient import ambient_connection_compare, ambient_metric, ambient_metric_compare, tangential_ricci
from tractorlab.geometry import get_chart


def main(name: str = "sphere(4)"):
    A = ambient_metric(get_chart(name))
    rng = np.random.default_rng(0)
    x = A.base.sample(rng, 0.5)
    v = rng.normal(size=A.base.dim)
    tang, rr = tangential_ricci(A, x)
    print(f"{A.chart.name} at x = {np.round(x, 3)}")
    print(f"  tangential Ricci      {tang:.2e}   (Ric_rr = {rr:.2e})")
    print(f"  metric vs h           {ambient_metric_compare(A, x):.2e}")
    print(f"  connection vs tractor {ambient_connection_compare(A, x, v):.2e}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
