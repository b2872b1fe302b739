"""Explicit polynomials and radicals behind the Copenhagen positivity argument.

Every function here is a direct transcription.  Wherever a quantity is
displayed in two forms (a monomial expansion and a factored or sum-of-squares
rewrite), both forms are kept and registered in ``IDENTITIES`` so that the
transcription can be checked by evaluating both sides at random points.

Variables: ``s1 = cosh x1``, ``s2 = cos x2``, ``l2 = s2**2``, ``c`` with
``s1 = 1 + c**2 s2**2``, ``c1 = c**2``, ``v`` a unit-interval reparametrisation
that depends on the item, ``b = 6/5 - c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

sqrt = np.sqrt
SQRT17 = np.sqrt(17.0)
C_MAX = np.sqrt(17.0 / 14.0)


# ---------------------------------------------------------------------------
# potential at h = -2 in (s1, s2)

def V_s(s1, s2, h=-2.0):
    """``V = W1(s1) + W2(s2)`` written in ``(cosh x1, cos x2)``."""
    return -s1 * (16 + (-1 + 8 * h) * s1 + s1 ** 3) / 32 + s2 ** 2 * ((-1 + 8 * h) + s2 ** 2) / 32


def V_s_critical(s1, s2):
    return (-s1 * (16 - 17 * s1 + s1 ** 3) + s2 ** 4 - 17 * s2 ** 2) / 32


# ---------------------------------------------------------------------------
# positivity for c > 0

def c_m1_edge(s1):
    """``c_{-1}(s1, 1)`` at ``h = -2``."""
    return (-17 - 8 * s1 + 40 * s1 ** 2 - 8 * s1 ** 4
            - 4 * s1 * sqrt(s1 ** 2 - 1) * sqrt(16 + 16 * s1 - 17 * s1 ** 2 + s1 ** 4)) / 16


def c_m1_edge_square_gap(s1):
    return (-17 - 8 * s1 + 40 * s1 ** 2 - 8 * s1 ** 4) ** 2 - 16 * s1 ** 2 * (s1 ** 2 - 1) * (
        16 + 16 * s1 - 17 * s1 ** 2 + s1 ** 4)


def c_m1_edge_square_gap_sos(s1):
    v = s1 - 1
    return 49 + 48 * v + 16 * v ** 2 * (
        41 * (1 - v) ** 4 + 7 * v * (1 - v) ** 5 + 25 * (1 - v) ** 4 * v ** 2 + 29 * v ** 6
        + 13 * v * (3 - 4 * v) ** 2 + (1 - v) * v ** 3 * (14 - 45 * v + 44 * v ** 2))


# ---------------------------------------------------------------------------
# hat D and the h-monotonicity argument

def hat_D16(s2, h):
    """``16 hat D(s2, h)``."""
    return (-1 + 8 * s2 ** 2 - 8 * s2 ** 4 + h * (8 - 16 * s2 ** 2)
            - 4 * s2 * sqrt(1 - s2 ** 2) * sqrt(16 + s2 ** 2 - s2 ** 4 + 8 * h * (1 - s2 ** 2)))


def f_sh(s2, h):
    """``f(s2, h) = -32 V(1, s2)``."""
    return 16 + s2 ** 2 - s2 ** 4 + 8 * h * (1 - s2 ** 2)


def dh_hat_D(s2, h):
    return 0.5 - s2 ** 2 - s2 * (1 - s2 ** 2) ** 1.5 / sqrt(f_sh(s2, h))


def dhh_hat_D(s2, h):
    return 4 * s2 * (1 - s2 ** 2) ** 2.5 * f_sh(s2, h) ** -1.5


def dh_hat_D_critical(s2):
    return 0.5 - s2 ** 2 - (1 - s2 ** 2) ** 1.5 / sqrt(17 - s2 ** 2)


def underline_h(s2):
    return -(16 + s2 ** 2 - s2 ** 4) / (8 * (1 - s2 ** 2))


def bar_h(s2):
    return (16 - 67 * s2 ** 2 + 71 * s2 ** 4 - 4 * s2 ** 6) / (8 * (s2 ** 2 - 1) * (-1 + 2 * s2 ** 2) ** 2)


S20 = 0.5 * np.sqrt((57 - np.sqrt(129.0)) / 30)


def J_58(s1):
    """``J(s1) = 4 sqrt(s1^2 - 1) r(s1, 5/8)`` at ``h = -2``."""
    return sqrt(s1 ** 2 - 1) * sqrt(26575 / 4096 + 16 * s1 - 17 * s1 ** 2 + s1 ** 4)


def E0(s1):
    return (-187055 - 163474 * s1 + 2863736 * s1 ** 2 - 6584384 * s1 ** 3 + 6310408 * s1 ** 4
            - 2469888 * s1 ** 5 + 98304 * s1 ** 6 + 131072 * s1 ** 7 - 16384 * s1 ** 8)


def E0_rewritten(s1):
    v = s1 - 1
    return (-1024 * v ** 3 * (1 - 2 * v) ** 3 * (5 - v) * (13 + 2 * v) - 189054 * v ** 2 * (1 - 2 * v) ** 3
            - 185596 * v ** 3 * (1 - 2 * v) ** 2 - 5817 * v * (1 - 2 * v) ** 2 - 29434 * v ** 2 * (1 - 2 * v)
            - 17665 * (1 - 2 * v) * (1 - 6 * v) ** 2 - 162199 * v * (4 * v - 1) ** 2)


def E58_rhs(s1):
    """Right-hand side of the ``2^20 c_{-1}(s1, 5/8) hat W0(s1, 5/8, -2)`` display."""
    k = 100 * np.sqrt(41457.0)
    J = J_58(s1)
    return (E0(s1) + 4 * s1 * (k - 20361) * J
            + 4 * s1 * (4418 - 65536 * s1 + 69632 * s1 ** 2 - 4096 * s1 ** 4) * (J - (5 / 4 - 8 * (s1 - 5 / 4) ** 2))
            + (k - 20360) * (17 + 8 * s1 - 40 * s1 ** 2 + 8 * s1 ** 4))


def quartic_a(s1):
    return 17 + 8 * s1 - 40 * s1 ** 2 + 8 * s1 ** 4


def quartic_a_rewritten(s1):
    return -7 * (3 - 2 * s1) - 41 * (s1 - 1) - (s1 - 1) * (3 - 2 * s1) * (-1 + 10 * s1 + 4 * s1 ** 2)


def quartic_b(s1):
    return 4418 - 65536 * s1 + 69632 * s1 ** 2 - 4096 * s1 ** 4


def quartic_b_rewritten(s1):
    return 4418 + 4096 * (s1 - 1) * s1 * (16 - s1 - s1 ** 2)


def J_gap(s1):
    J2 = (s1 ** 2 - 1) * (26575 / 4096 + 16 * s1 - 17 * s1 ** 2 + s1 ** 4)
    return (5 / 4 - 8 * (s1 - 5 / 4) ** 2) ** 2 - J2


def J_gap_rewritten(s1):
    return ((s1 - 1) ** 4 * (1549675 / 4096 - 1048977 * s1 / 2048 + 713883 * s1 ** 2 / 4096)
            + (2 - s1) ** 2 * (28749 / 4096 * (6 - 5 * s1) ** 2 * (s1 - 1) ** 2
                               + 2993 / 2048 * (7 - 6 * s1) ** 2 * (s1 - 1) + 9 / 64 * (15 - 13 * s1) ** 2)
            + 44897 / 2048 * (2 - s1) * (s1 - 1) ** 3 * (5 - 4 * s1) ** 2)


# ---------------------------------------------------------------------------
# I0 at h = -2

def D16(s2):
    """``16 D(s2)`` at ``h = -2``."""
    return -17 - 8 * s2 ** 4 + 40 * s2 ** 2 - 4 * s2 ** 2 * sqrt(1 - s2 ** 2) * sqrt(17 - s2 ** 2)


def D(s2):
    return D16(s2) / 16


def dD(s2):
    return s2 * (8 + sqrt(1 - s2 ** 2) * ((10 - 4 * s2 ** 2) * sqrt(17 - s2 ** 2)
                                          - (25 - 2 * s2 ** 2) * sqrt(1 - s2 ** 2))) / (
        2 * sqrt(1 - s2 ** 2) * sqrt(17 - s2 ** 2))


def dD_gap(s2):
    return (10 - 4 * s2 ** 2) ** 2 * (17 - s2 ** 2) - (25 - 2 * s2 ** 2) ** 2 * (1 - s2 ** 2)


def dD_gap_expanded(s2):
    return 1075 - 735 * s2 ** 2 + 248 * s2 ** 4 - 12 * s2 ** 6


def t0(s1, s2):
    return sqrt((17 - s2 ** 2) / (s1 * (16 - s1 - s1 ** 2)))


def j0(s2, c):
    u = c ** 2 * s2 ** 2
    return 7 + 40 * u - 8 * u ** 2 - 32 * u ** 3 - 8 * u ** 4


def g0(s1):
    return -17 - 8 * s1 + 40 * s1 ** 2 - 8 * s1 ** 4


def j1(s2):
    return 85 - 26 * s2 ** 2 + s2 ** 4 - (17 - s2 ** 2) * sqrt(1 - s2 ** 2) * sqrt(17 - s2 ** 2)


def j1_rewritten(s2):
    return 85 - 17 ** 1.5 + s2 ** 2 * (-26 + s2 ** 2 + (5780 - 918 * s2 ** 2 + 52 * s2 ** 4 - s2 ** 6) / (
        17 ** 1.5 + sqrt(1 - s2 ** 2) * (17 - s2 ** 2) ** 1.5))


def j2_squared(s2, c):
    return (2 + c ** 2 * s2 ** 2) * (17 - 14 * c ** 2 - s2 ** 2 - 11 * c ** 4 * s2 ** 2
                                    + 4 * c ** 6 * s2 ** 4 + c ** 8 * s2 ** 6)


def j2_squared_from_V(s2, c):
    return (2 + c ** 2 * s2 ** 2) * (-32 / s2 ** 2 * V_s_critical(1 + c ** 2 * s2 ** 2, s2))


def j2(s2, c):
    return sqrt(j2_squared(s2, c))


def j3(s2, c):
    u = c ** 2 * s2 ** 2
    return (-14 + 3 * u + u ** 2) * (1 + u) ** 2


def j4(s2, c):
    u = c ** 2 * s2 ** 2
    return 70 + 18 * u - 105 * u ** 2 - 74 * u ** 3 + 2 * u ** 4 + 8 * u ** 5 + u ** 6


def g4(s1):
    return 16 + 32 * s1 + 64 * s1 ** 2 - 22 * s1 ** 3 - 23 * s1 ** 4 + 2 * s1 ** 5 + s1 ** 6


def g4_second(s1):
    return 128 - 132 * s1 - 276 * s1 ** 2 + 40 * s1 ** 3 + 30 * s1 ** 4


def g4_second_in_v(s1):
    v = s1 - 1
    return -210 - 444 * v + 24 * v ** 2 + 160 * v ** 3 + 30 * v ** 4


def c_m1_16(s2, c):
    """``16 c_{-1}(s2, c)``."""
    return j0(s2, c) - 4 * c * s2 ** 2 * (1 + c ** 2 * s2 ** 2) * j2(s2, c)


def W3(s2, c):
    return j3(s2, c) * j2(s2, c) + c * j4(s2, c)


def E1(s2, c):
    return j1(s2) * c_m1_16(s2, c) / 16 - c ** 3 * D(s2) * W3(s2, c)


def j20(s2, c):
    return 169 / 32 - (c ** 2 - 0.25) * (2.5 + s2 ** 2 / 4 + c ** 2) - c ** 4 * s2 ** 2 / 2


def j2_gap256(l2, c1):
    """``256 (j_{2,0}^2 - j_2^2)`` in ``(l2, c1) = (s2^2, c^2)``, monomial form."""
    return (905 / 4 + 364 * c1 - 1728 * c1 ** 2 + 1152 * c1 ** 3 + 256 * c1 ** 4
            + (701 - 5180 * c1 + 7960 * c1 ** 2 + 704 * c1 ** 3 + 256 * c1 ** 4) * l2
            + (1 + 248 * c1 + 832 * c1 ** 3 + 64 * c1 ** 4) * l2 ** 2 - 1536 * c1 ** 4 * l2 ** 3
            - 256 * c1 ** 5 * l2 ** 4)


def j2_gap256_direct(l2, c1):
    s2, c = sqrt(l2), sqrt(c1)
    return 256 * (j20(s2, c) ** 2 - j2_squared(s2, c))


def j21(c1):
    return 6923 - 26216 * c1 + 27024 * c1 ** 2 + 19712 * c1 ** 3 + 4736 * c1 ** 4


def j22(c1):
    return 803 - 1862 * c1 + 524 * c1 ** 2 + 2656 * c1 ** 3 + 640 * c1 ** 4


def j23(c1):
    return 1505 - 6794 * c1 + 8484 * c1 ** 2 + 4192 * c1 ** 3 + 192 * c1 ** 4


def j24(c1):
    return 905 / 4 + 364 * c1 - 1728 * c1 ** 2 + 1152 * c1 ** 3 + 256 * c1 ** 4


def j25(c1):
    return 3713 / 4 - 4568 * c1 + 6232 * c1 ** 2 + 2688 * c1 ** 3 - 960 * c1 ** 4 - 256 * c1 ** 5


def j2_gap256_split(l2, c1):
    return (l2 * (1 - l2) / 2 * (l2 * (1 - l2) * j21(c1) + 4 * (1 - l2) ** 2 * j22(c1) + 4 * l2 ** 2 * j23(c1))
            + (1 - l2) ** 4 * j24(c1) + l2 ** 4 * j25(c1))


def j21_v(v):
    return ((1 - v) / 49 * (2 * v * (96528 - 580911 * v + 1346231 * v ** 2) + 12000 * (3 - 10 * v) ** 2
                            + 231227 * (1 - v) ** 3) + 145322731 / 2401 * v ** 4)


def j22_v(v):
    return v * (1 - v) / 343 * (326193 - 1061368 * v + 1671464 * v ** 2) + 803 * (1 - v) ** 4 + 13113085 / 2401 * v ** 4


def j23_v(v):
    return (v * (1 - v) / 343 * (58359 - 325948 * v + 3078524 * v ** 2) + 100 * (3 - 10 * v) ** 2
            + 605 * (1 - v) ** 4 + 21099315 / 2401 * v ** 4)


def j24_v(v):
    return (v ** 2 / 9604 * (4183326 - 8388128 * v + 7465427 * v ** 2) + 100 * v * (3 - 5 * v) ** 2
            + 447 * v * (1 - v) ** 3 + 905 / 4 * (1 - v) ** 4)


def j25_v(v):
    return (v ** 2 * (1 - v) ** 2 / 98 * (125841 + 401512 * v) + 16643 / 28 * v * (1 - v) ** 4
            + 67796525 / 9604 * v ** 4 * (1 - v) + 100 * (3 - 10 * v) ** 2 + 113 / 4 * (1 - v) ** 5
            + 115642367 / 67228 * v ** 5)


def D_minus(s2):
    return -17 - 8 * s2 ** 4 + 40 * s2 ** 2 - 4 * s2 ** 2 * (33 / 8 - (2 * s2 ** 2 + s2 ** 4))


def D_plus(s2):
    return -17 - 8 * s2 ** 4 + 40 * s2 ** 2 - 4 * s2 ** 2 * (1 - s2 ** 2) * (4 + 2 * s2 ** 2 + s2 ** 4)


def d_plus_gap(s2):
    return (1 - s2 ** 2) * (17 - s2 ** 2) - ((1 - s2 ** 2) * (4 + 2 * s2 ** 2 + s2 ** 4)) ** 2


def d_plus_gap_rewritten(s2):
    return (1 - s2 ** 4) * (1 - 2 * s2 ** 2 + 6 * s2 ** 4 + 2 * s2 ** 6 + s2 ** 8)


def d_minus_gap(s2):
    """``64 (d_-^2 - (1 - s2^2)(17 - s2^2))``; the factor 64 is needed for the rewrite to match."""
    return 64 * ((33 / 8 - (2 * s2 ** 2 + s2 ** 4)) ** 2 - (1 - s2 ** 2) * (17 - s2 ** 2))


def d_minus_gap_rewritten(s2):
    return (s2 ** 4 / 4 * (71 - 287 * s2 ** 2 + 293 * s2 ** 4) + 3 * s2 ** 2 / 4 * (11 - 20 * s2 ** 2) ** 2
            + 37 * s2 ** 2 / 4 * (1 - s2 ** 2) ** 3 + (1 - 2 * s2 ** 2) ** 2)


def E2(s2, c):
    """Lower bound of ``16 E1`` on the region ``D <= 0``."""
    return (59 / 4 * (j0(s2, c) - 4 * c * s2 ** 2 * (1 + c ** 2 * s2 ** 2) * j20(s2, c))
            - c ** 3 * D_minus(s2) * j3(s2, c) * j20(s2, c) - c ** 4 * D_plus(s2) * j4(s2, c))


# ---------------------------------------------------------------------------
# polynomials in c for the E2 expansion

def _poly(coeffs):
    return np.polynomial.Polynomial(coeffs)


def h1(l2, c):
    return 16 * c ** 11 * (1 + 32 * c - 4 * c ** 2 + 256 * c ** 3 - 8 * c ** 4 + 32 * c ** 5 + 16 * c ** 3 * (8 + c ** 2) * l2)


def h2(c):
    return 8 * c ** 10 * (2368 - 151 * c - 128 * c ** 2 + 160 * c ** 3 - 512 * c ** 4 + 48 * c ** 5 - 256 * c ** 6)


H3 = _poly([6608, -22538, 37760, 43056, -471552, 1083859, -667488, -22371, 53248, -57015, 52096, -1459,
            -896, 5440, -3584, 624, 1088])
H4 = _poly([99120, -111746, 188800, -709972, -272752, 2377365, -2809728, 2257746, -1074240, 129136, 0, 7616])
H5 = _poly([39648, -22302, 37760, -407878, 259440, 725190, -2140416, 3019152, -1440000, 27200])
H6 = _poly([6608, 0, 0, -89964, 76160, 34272, 0, 15232])
K1 = _poly([72688, -111982, 188800, -349002, 1552416, -3429694, 2538200, -768657, 642128, 53009, 33152, 4267,
            -896, 3784, 8704, -128])
K2 = _poly([-165200, 223492, -377600, 991280, -1742336, 3920764, -5570360, 5195743, -2587792, -319833, 33152,
            -17470, 2176, -3088, 0, -1088])
K3 = _poly([132160, -223964, 377600, -539456, 779872, -2021770, 3175040, -3205287, 1464320, 236090, -80512,
            11504, 0, -5440])
K5 = _poly([99120, -224436, 377600, -87632, -182592, -122776, 779720, -1214831, 340848, 152347, -127872, 5538,
            2176, -13968, 0, -1088])
D1_COEFFS = [1171163506, -7471707255, 16174395360, 8922925732, -44809560461, -33799370597, 45096619475,
             78595290662, 37015742898, -14346554736, -29900538237, -19491958537, -6963317252, -1208863632,
             45920428, 44662945, -18645624, -19608465, -8327827, -2388872, -519800, -89861, -12669, -1482, -145,
             -12, -1, -1, -1, -1, -1]
D1 = _poly(D1_COEFFS)


def h3(c):
    return H3(c)


def h4(c):
    return H4(c)


def h5(c):
    return H5(c)


def h6(c):
    return H6(c)


def k1(c):
    return K1(c)


def k2(c):
    return K2(c)


def k3(c):
    return K3(c)


def k5(c):
    return K5(c)


def E3(l2, c):
    return k1(c) * l2 ** 2 + k2(c) * l2 + k3(c)


def E2_expanded64(l2, c):
    """``64 E2`` as the displayed combination of ``E3`` and ``h1 ... h6``."""
    return (E3(l2, c) * l2 ** 3 * (1 - l2) + h1(l2, c) * l2 ** 7 * (1 - l2) + h2(c) * l2 ** 7 + h3(c) * l2 ** 6
            + h4(c) * l2 ** 2 * (1 - l2) ** 4 + h5(c) * l2 * (1 - l2) ** 5 + h6(c) * (1 - l2) ** 6
            + 10000 * c ** 4 * (3 - 5 * l2) ** 2 * (31 * (4 - 5 * c) ** 2 * l2 ** 4 / 50
                                                    + (3 - 4 * c) ** 2 * (1 - l2) * l2 ** 2
                                                    + (1 - 2 * c) ** 4 * (1 - l2) * l2 + c ** 4 * l2 ** 4)
            + 80 * c ** 9 * l2 ** 6 * (1 - l2) + 256 * c ** 16 * l2 ** 8 * (1 - l2 ** 2))


def E2_direct64(l2, c):
    return 64 * E2(sqrt(l2), c)


def h3_rewritten(c):
    b = 6 / 5 - c
    return ((17638696 / 625 + 5496536 / 125 * c + 4054798 / 25 * c ** 2 + (487824 / 5 + 634791 * b) * c ** 3)
            * (2 / 5 - c) ** 2 * b
            + 1799104 / 3125 * c * b + 2 * (46460648 - 2460625 * c) / 78125
            + (332348 + 145849 * c + 50716 * c ** 2) * c ** 4 * (1 - c) ** 4
            + (1380 + 1138 * c) * c ** 10 * (1 - c) ** 2 + 163 * c ** 11 + (3584 * b + 6 / 5) * c ** 13
            + 624 * c ** 15 + 1088 * c ** 16)


def h4_rewritten(c):
    b = 6 / 5 - c
    return (c * (7 / 10 - c) ** 2 * (32498403269 / 125000 + b * (
        55874294 / 3125 + 183617569 / 250 * c + 114118354 / 125 * c ** 2 + 1436406 / 25 * c ** 2 * b
        + (2917616 / 5 + 129136 * b) * c ** 4))
        + (99120 - 3120663099669 / 12500000 * c + 99820440049 / 625000 * c ** 2) + 7616 * c ** 11)


def h5_rewritten(c):
    b = 6 / 5 - c
    return (c * (13 / 20 - c) ** 2 * (3703539883 / 40000 + b * (
        92744181 / 1000 + 52681943 / 100 * c + 3077836 / 5 * c ** 2 + 503940 * c ** 3 + 1404640 * c ** 4)
        + 27200 * c ** 6)
        + 22592124459 / 80000000 + 489006553 * c / 3200000 + 3744646701 / 50000 * (29 / 40 - c) ** 2)


def h6_rewritten(c):
    return (c ** 2 * (3 / 5 - c) ** 2 * (16305856 / 125 + 1268064 / 25 * c + 91392 / 5 * c ** 2 + 15232 * c ** 3)
            + 6039012 / 125 * c * (13 / 20 - c) ** 2
            + (6608 - 255148257 / 12500 * c + 49515186 / 3125 * c ** 2))


def k1_rewritten(c):
    b = 6 / 5 - c
    return ((581229138 / 15625 + 500000 * c ** 3 + 63625694 / 25 * c ** 4) * (7 / 10 - c) ** 2
            + 473182277 * c / 125 * (3 / 10 - c) ** 2 * (9 / 10 - c) ** 2
            + (948554347 / 6250 + 136241809 / 1250 * b) * (2 / 5 - c) ** 2 * b
            + (642128 * b ** 4 + 19273323 * c / 5 * (3 / 5 - c) ** 2) * c ** 2 * b ** 2
            + c ** 9 * (53009 + 33152 * c + 4267 * c ** 2 - 896 * c ** 3 + 3784 * c ** 4 + 8704 * c ** 5
                        - 128 * c ** 6)
            + 32652259 / 156250 + 15311007 / 10000 * c)


def k3_rewritten(c):
    b = 6 / 5 - c
    return (c ** 2 * (17 / 20 - c) ** 2 * (
        2355466141019 / 4000000 + 170920469037 / 400000 * c
        + (3936935827 / 5000 + 401995653 / 1000 * b) * c ** 2 + 42279081 / 25 * c ** 4
        + (13026 / 5 + 80512 * b) * c ** 5)
        + 24462722037599 / 160000000 * c * (4 / 5 - c) ** 2 + 11504 * c ** 11 - 5440 * c ** 13
        + (132160 - 80453722037599 * c / 250000000 + 314833837847093 * c ** 2 / 1600000000))


def E3_edge(c):
    return k1(c) + k2(c) + k3(c)


def E3_edge_rewritten(c):
    b = 6 / 5 - c
    return ((39648 - 28903204136204 * c / 244140625 + 5470057737716 * c ** 2 / 48828125)
            + 1773112492 / 78125 * c ** 3 * b ** 2
            + c ** 3 * b ** 3 * (16976668754 / 78125 + 11890235417 / 15625 * c + 1721158044 / 3125 * c ** 2)
            + c ** 8 * b * (36159674 / 625 + 2825154 / 125 * c + 174859 / 25 * c ** 2 + 22064 / 5 * c ** 3
                            + 4744 * c ** 4)
            + c * (3 / 5 - c) ** 2 * (160957143606 / 9765625 + 104765224976 * c / 390625)
            + 8704 * c ** 14 - 1216 * c ** 15)


def E3_interior_gap(l2, c):
    """``E3 - k3 (1 - l2)^2 - E3(1, c) l2^2``, which equals ``l2 (1 - l2) k5``."""
    return E3(l2, c) - k3(c) * (1 - l2) ** 2 - E3_edge(c) * l2 ** 2


def E3_interior_gap_k5(l2, c):
    return l2 * (1 - l2) * k5(c)


def minus_dk5(c):
    return -K5.deriv()(c)


def minus_dk5_rewritten(c):
    b = 6 / 5 - c
    return ((224436 - 39166298761 * c / 40000 + 8584984187 * c ** 2 / 8000)
            + c ** 2 * (0.5 - c) ** 2 * (296223209 / 400 + 29197057 / 20 * c + 2934884627 / 2500 * c ** 2
                                         + b * (433202652 / 125 * c ** 2 + 5077647 / 25 * c ** 3)
                                         + 29200428 / 25 * c ** 5)
            + 110596281 * c / 100 * (9 / 20 - c) ** 2 + c ** 9 * b * (461262 / 5 + 26112 * c)
            + 181584 * c ** 12 + 16320 * c ** 14)


def D0(c):
    return 4 * k1(c) * k3(c) - k2(c) ** 2


def D0_in_v(v):
    return D0(2 * v / 5 + 4 / 5)


def D1_value(v):
    return D1(v)


def D1_rewritten(v):
    return (24063486356113 / 320000 + 5194158621777 * v / 80000
            + (0.5 - v) ** 2 * (14476579533567 / 16000 + 2258156665941 / 32 * (0.2 - v) ** 2)
            + (0.4 - v) ** 2 * (820472989093 / 800 * (1 - v) + 587799303261 / 8 * v * (0.6 - v) ** 2)
            + v ** 4 * (0.5 - v) ** 2 * (419040213759 / 8 + (1 - v) * (
                147822902909 / 2 + 299960460267 / 2 * v + 129475910052 * v ** 2 + 57564677658 * v ** 3))
            + v ** 10 * (1 - v) * (27664139421 + 8172180884 * v + 1208863632 * v ** 2 + 4931817 * v ** 4
                                   + 49594762 * v ** 5 + 30949138 * v ** 6 + 11340673 * v ** 7
                                   + 3012846 * v ** 8 + 623974 * v ** 9 + 104174 * v ** 10 + 14313 * v ** 11)
            + 40988611 * v ** 14
            + (1 - v) * v ** 22 * (1644 + 162 * v + 17 * v ** 2 + 5 * v ** 3 + 4 * v ** 4 + 3 * v ** 5
                                   + 2 * v ** 6 + v ** 7))


# ---------------------------------------------------------------------------
# non-convexity for mu != 1/2

def G1(r1):
    return (((1 - r1) * r1) ** 5.5 * (1 - 2 * r1) * (3 - 3 * r1 + r1 ** 2) * (1 + r1 + r1 ** 2)
            * ((3 - r1) ** 2 + 4 * r1 ** 2 + (2 - r1) * r1 ** 3)) / (2 * ((1 - r1) ** 2 + (2 - r1) * r1 ** 3) ** 3)


def G2(r1, s):
    return (4 * sqrt((1 - r1) ** 2 + (2 - r1) * r1 ** 3) * sqrt((3 - r1) ** 2 + 4 * r1 ** 2 + (2 - r1) * r1 ** 3) * s
            - (15 - 14 * r1 + 11 * r1 ** 2 + 6 * r1 ** 3 - 3 * r1 ** 4))


def G2_gap(r1):
    return (15 - 14 * r1 + 11 * r1 ** 2 + 6 * r1 ** 3 - 3 * r1 ** 4) ** 2 - 16 * (
        (1 - r1) ** 2 + (2 - r1) * r1 ** 3) * ((3 - r1) ** 2 + 4 * r1 ** 2 + (2 - r1) * r1 ** 3)


def G2_gap_in_nu(r1):
    nu = r1 - 0.5
    return 19433 / 256 + 123 * nu ** 2 / 16 + 307 * nu ** 4 / 8 + 51 * nu ** 6 - 7 * nu ** 8


# ---------------------------------------------------------------------------
# identity registry

@dataclass(frozen=True)
class Identity:
    name: str
    left: Callable
    right: Callable
    domain: tuple  # one (lo, hi) per argument


IDENTITIES = [
    Identity("c_m1_edge_square_gap", c_m1_edge_square_gap, c_m1_edge_square_gap_sos, ((1.0, 2.0),)),
    Identity("E0_rewritten", E0, E0_rewritten, ((1.0, 1.5),)),
    Identity("quartic_a", quartic_a, quartic_a_rewritten, ((1.0, 1.5),)),
    Identity("quartic_b", quartic_b, quartic_b_rewritten, ((1.0, 2.0),)),
    Identity("J_gap", J_gap, J_gap_rewritten, ((1.0, 2.0),)),
    Identity("dD_gap", dD_gap, dD_gap_expanded, ((0.0, 1.0),)),
    Identity("j0_g0", lambda s2, c: j0(s2, c), lambda s2, c: g0(1 + c ** 2 * s2 ** 2), ((0.0, 1.0), (0.0, C_MAX))),
    Identity("j4_g4", lambda s2, c: j4(s2, c), lambda s2, c: g4(1 + c ** 2 * s2 ** 2), ((0.0, 1.0), (0.0, C_MAX))),
    Identity("g4_second", g4_second, g4_second_in_v, ((1.0, 1.6),)),
    Identity("j1_rewritten", j1, j1_rewritten, ((0.0, 1.0),)),
    Identity("j2_from_V", j2_squared, j2_squared_from_V, ((0.05, 1.0), (0.0, C_MAX))),
    Identity("j2_gap_expanded", j2_gap256_direct, j2_gap256, ((0.0, 1.0), (0.0, 17 / 14))),
    Identity("j2_gap_split", j2_gap256, j2_gap256_split, ((0.0, 1.0), (0.0, 17 / 14))),
    Identity("j21_v", lambda v: j21(17 * v / 14), j21_v, ((0.0, 1.0),)),
    Identity("j22_v", lambda v: j22(17 * v / 14), j22_v, ((0.0, 1.0),)),
    Identity("j23_v", lambda v: j23(17 * v / 14), j23_v, ((0.0, 1.0),)),
    Identity("j24_v", lambda v: j24(17 * v / 14), j24_v, ((0.0, 1.0),)),
    Identity("j25_v", lambda v: j25(17 * v / 14), j25_v, ((0.0, 1.0),)),
    Identity("d_plus_gap", d_plus_gap, d_plus_gap_rewritten, ((0.0, 1.0),)),
    Identity("d_minus_gap", d_minus_gap, d_minus_gap_rewritten, ((0.0, 1.0),)),
    Identity("E2_expansion", E2_direct64, E2_expanded64, ((0.0, 1.0), (0.0, C_MAX))),
    Identity("h3_rewritten", h3, h3_rewritten, ((0.0, 1.2),)),
    Identity("h4_rewritten", h4, h4_rewritten, ((0.0, 1.2),)),
    Identity("h5_rewritten", h5, h5_rewritten, ((0.0, 1.2),)),
    Identity("h6_rewritten", h6, h6_rewritten, ((0.0, 1.2),)),
    Identity("k1_rewritten", k1, k1_rewritten, ((0.0, 1.2),)),
    Identity("k3_rewritten", k3, k3_rewritten, ((0.0, 1.2),)),
    Identity("E3_edge_rewritten", E3_edge, E3_edge_rewritten, ((0.0, 1.2),)),
    Identity("E3_interior_k5", E3_interior_gap, E3_interior_gap_k5, ((0.0, 1.0), (0.0, 1.2))),
    Identity("minus_dk5_rewritten", minus_dk5, minus_dk5_rewritten, ((0.0, 1.2),)),
    Identity("D1_rewritten", D1_value, D1_rewritten, ((0.0, 1.0),)),
    Identity("G2_gap_nu", G2_gap, G2_gap_in_nu, ((0.0, 1.0),)),
]


def identity_error(ident: Identity, n: int = 20, seed: int = 0) -> float:
    """Largest relative discrepancy between the two forms at ``n`` random points."""
    rng = np.random.default_rng(seed)
    args = [rng.uniform(lo, hi, n) for lo, hi in ident.domain]
    a = np.asarray(ident.left(*args), float)
    b = np.asarray(ident.right(*args), float)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b) / scale))
