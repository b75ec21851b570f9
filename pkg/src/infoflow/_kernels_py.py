"""Pure-Python fallback for the path-generation hot loop.

Keep the update expressions byte-for-byte identical to _kernels.pyx so both
backends produce bit-identical paths for the same increments.
"""

from __future__ import annotations

import numpy as np


def euler_path_2d(out1, out2, dw1, dw2, f1, f2, a11, a12, a21, a22, b1, b2, dt, x01, x02):
    """Fill out1/out2 (length n+1) with the forward-Euler recursion."""
    n = len(dw1)
    w1 = np.asarray(dw1).tolist()
    w2 = np.asarray(dw2).tolist()
    o1 = [0.0] * (n + 1)
    o2 = [0.0] * (n + 1)
    x1 = float(x01)
    x2 = float(x02)
    o1[0] = x1
    o2[0] = x2
    for i in range(n):
        n1 = x1 + (f1 + a11 * x1 + a12 * x2) * dt + b1 * w1[i]
        n2 = x2 + (f2 + a21 * x1 + a22 * x2) * dt + b2 * w2[i]
        x1 = n1
        x2 = n2
        o1[i + 1] = x1
        o2[i + 1] = x2
    out1[:] = o1
    out2[:] = o2
