"""Literal rational constants generated by ``scripts/derive_constants.py``.

Do not edit by hand; rerun the script instead.
"""

from fractions import Fraction as F

# Big-stencil kernel C_j(t) = BIG0[j] + BIG4[j] * t**4 + O(t**8), t = lambda*dx.
BIG0 = (F(-1, 15), F(21, 40), F(1, 8), F(-23, 12), F(7, 4), F(-19, 40), F(7, 120))
BIG4 = (
    F(-229, 226800),
    F(1493, 75600),
    F(-587, 15120),
    F(65, 9072),
    F(11, 378),
    F(-323, 18900),
    F(103, 113400),
)

# Substencil kernels C_j^m(t) = SUB0 + SUB2 * t**2 + SUB4 * t**4 + O(t**6).
SUB0 = (
    (F(-1, 4), F(3, 2), F(-2), F(1, 2), F(1, 4)),
    (F(1, 4), F(1, 2), F(-2), F(3, 2), F(-1, 4)),
    (F(7, 4), F(-9, 2), F(4), F(-3, 2), F(1, 4)),
)
SUB2 = (
    (F(7, 120), F(-13, 120), F(-1, 40), F(17, 120), F(-1, 15)),
    (F(-1, 15), F(17, 120), F(-1, 40), F(-13, 120), F(7, 120)),
    (F(7, 120), F(-13, 120), F(-1, 40), F(17, 120), F(-1, 15)),
)
SUB4 = (
    (F(-263, 30240), F(97, 6048), F(41, 10080), F(-649, 30240), F(19, 1890)),
    (F(19, 1890), F(-649, 30240), F(41, 10080), F(97, 6048), F(-263, 30240)),
    (F(-103, 6048), F(1241, 30240), F(-211, 10080), F(-397, 30240), F(19, 1890)),
)

# beta^Z_m = v^T Q_m v for the polynomial-limit substencil reconstruction.
Z_FORMS = (
    (
        (F(265, 189), F(-79823, 15120), F(35561, 5040), F(-60587, 15120), F(12527, 15120)),
        (F(-79823, 15120), F(33311, 1512), F(-79333, 2520), F(141649, 7560), F(-60587, 15120)),
        (F(35561, 5040), F(-79333, 2520), F(8207, 168), F(-79333, 2520), F(35561, 5040)),
        (F(-60587, 15120), F(141649, 7560), F(-79333, 2520), F(33311, 1512), F(-79823, 15120)),
        (F(12527, 15120), F(-60587, 15120), F(35561, 5040), F(-79823, 15120), F(265, 189)),
    ),
    (
        (F(811, 189), F(-204353, 15120), F(80711, 5040), F(-128837, 15120), F(26177, 15120)),
        (F(-204353, 15120), F(72497, 1512), F(-153883, 2520), F(253999, 7560), F(-105317, 15120)),
        (F(80711, 5040), F(-153883, 2520), F(13793, 168), F(-118603, 2520), F(50471, 5040)),
        (F(-128837, 15120), F(253999, 7560), F(-118603, 2520), F(42593, 1512), F(-93473, 15120)),
        (F(26177, 15120), F(-105317, 15120), F(50471, 5040), F(-93473, 15120), F(265, 189)),
    ),
    (
        (F(3793, 189), F(-913103, 15120), F(354761, 5040), F(-574667, 15120), F(120047, 15120)),
        (F(-913103, 15120), F(288671, 1512), F(-581653, 2520), F(961489, 7560), F(-406667, 15120)),
        (F(354761, 5040), F(-581653, 2520), F(48191, 168), F(-405253, 2520), F(173321, 5040)),
        (F(-574667, 15120), F(961489, 7560), F(-405253, 2520), F(138143, 1512), F(-298223, 15120)),
        (F(120047, 15120), F(-406667, 15120), F(173321, 5040), F(-298223, 15120), F(811, 189)),
    ),
)
