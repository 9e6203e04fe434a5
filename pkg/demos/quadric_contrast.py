"""Tractor holonomy -I against trivial Maurer-Cartan holonomy on the same quadric loop.

The antipodal great-circle lift in S^p x S^q closes in the quadric of null
lines.  The normal tractor connection carries the fibre to minus itself along
it, while the flat Maurer-Cartan connection on G x_P R^{n+2} returns the
identity.  The sign is instead carried by the tautological line, whose
monodromy is -1.

    python demos/quadric_contrast.py [p q]
"""
import sys

import numpy as np

from tractorlab.homogeneous import ModelSpace, line_monodromy, mc_holonomy, model_loop, quadric_tractor_holonomy


def main(p: int = 2, q: int = 3):
    N = p + q + 2
    model = ModelSpace("quadric", p, q)
    loop = model_loop(model, "antipodal")
    np.set_printoptions(precision=3, suppress=True)

    H = quadric_tractor_holonomy(p, q)
    print(f"quadric of signature ({p},{q}), antipodal loop")
    print(f"  tractor holonomy, |H + I| = {np.max(np.abs(H + np.eye(N))):.2e}")
    print(np.round(H, 6))

    for rep in ("standard", "det_twisted"):
        r = mc_holonomy("P_line", rep, loop)
        print(f"  Maurer-Cartan holonomy ({rep}), |H - I| = {np.max(np.abs(r.value - np.eye(N))):.2e}")

    print(f"  tautological line monodromy: {line_monodromy(loop):+d}")
    for cid in ("control-arc", "control-backtrack"):
        print(f"  {cid}: monodromy {line_monodromy(model_loop(model, cid)):+d}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:3]))
