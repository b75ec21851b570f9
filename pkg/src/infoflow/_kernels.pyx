# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loop for 2-D linear-SDE path generation.

Must stay arithmetically identical to infoflow._kernels_py (same expressions,
same evaluation order); the build disables FP contraction to guarantee it.
"""


def euler_path_2d(double[::1] out1, double[::1] out2,
                  double[::1] dw1, double[::1] dw2,
                  double f1, double f2,
                  double a11, double a12, double a21, double a22,
                  double b1, double b2, double dt,
                  double x01, double x02):
    """Fill out1/out2 (length n+1) with the forward-Euler recursion.

    dw1/dw2 are the pre-scaled Gaussian increments (variance dt) of length n.
    """
    cdef Py_ssize_t n = dw1.shape[0]
    cdef Py_ssize_t i
    cdef double x1 = x01
    cdef double x2 = x02
    cdef double n1, n2
    out1[0] = x1
    out2[0] = x2
    for i in range(n):
        n1 = x1 + (f1 + a11 * x1 + a12 * x2) * dt + b1 * dw1[i]
        n2 = x2 + (f2 + a21 * x1 + a22 * x2) * dt + b2 * dw2[i]
        x1 = n1
        x2 = n2
        out1[i + 1] = x1
        out2[i + 1] = x2
