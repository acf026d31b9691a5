"""Published reference values that the certified computations are checked
against, with a short citation label for each group."""
from __future__ import annotations

from gmpy2 import mpq


def _q(s: str) -> mpq:
    return mpq(s)


# residual bounds on I_k x J by the cubic-plus-tail method: (lower, upper)
RESIDUAL_TAYLOR = {
    "I1": (_q("-4.9058e-7"), _q("5.1794e-7")),
    "I2": (_q("-8.4748e-8"), _q("7.5413e-7")),
    "I3": (_q("1.1011e-7"), _q("1.3040e-6")),
    "I4": (_q("4.9134e-7"), _q("2.9344e-6")),
}
RESIDUAL_SUP = _q("2.9344e-6")

# Chebyshev l1 bounds on |R|
CHEB_GLOBAL = _q("3.5551e-6")
CHEB_SUBREGION = {
    "I1": _q("5.3776e-7"),
    "I2": _q("9.6144e-7"),
    "I3": _q("1.5004e-6"),
    "I4": _q("2.9505e-6"),
}

# ranges of F0, F0', F0'' on I_k x J, four decimals
RANGES = {
    "F0:I1": ("-0.0601", "0.8004"), "F0:I2": ("0.7157", "0.9753"),
    "F0:I3": ("0.9039", "1.7938"), "F0:I4": ("1.7819", "2.6220"),
    "F0':I1": ("-0.0001", "1.1990"), "F0':I2": ("1.1179", "1.3091"),
    "F0':I3": ("1.2134", "1.6066"), "F0':I4": ("1.4660", "1.7036"),
    "F0'':I1": ("0.6770", "1.0144"), "F0'':I2": ("0.5927", "0.7778"),
    "F0'':I3": ("0.2599", "0.6890"), "F0'':I4": ("0.0881", "0.3099"),
}
RANGES = {k: (_q(lo), _q(hi)) for k, (lo, hi) in RANGES.items()}

# matching-time window, given as truncated decimals
TM_RANGE = (_q("1.962257"), _q("2.043219"))

# energy supremum bounds (M, M1, M2, M3)
TABLE1 = {
    "I1": ("3.1930", "3.0482", "2.1323", "1.5886"),
    "I2": ("0.3912", "0.3323", "0.0284", "1.0001"),
    "I3": ("0.7762", "0.5465", "0.1701", "1.0020"),
    "I4": ("0.7077", "0.3120", "0.0775", "1.0008"),
}
TABLE1 = {k: tuple(_q(v) for v in row) for k, row in TABLE1.items()}

# contraction chain rows: B0, eps, then the three norm columns in printed order
TABLE2_COLUMNS = ("B0", "eps", "E", "E'", "E''")
TABLE2 = {
    "I1": ("1.6538e-6", "5e-6", "1.6538e-6", "2.0673e-6", "1.2921e-6"),
    "I2": ("2.4371e-6", "7e-7", "2.4371e-6", "3.6556e-7", "1.6296e-6"),
    "I3": ("4.3873e-6", "3e-6", "4.3873e-6", "2.6324e-6", "2.6386e-6"),
    "I4": ("7.4947e-6", "4e-6", "7.4947e-6", "3.7474e-6", "4.8916e-6"),
}
TABLE2 = {k: dict(zip(TABLE2_COLUMNS, (_q(v) for v in row))) for k, row in TABLE2.items()}

# final inner error bounds, under their published labels
INNER_BOUNDS = {"E": _q("7.4947e-6"), "E'": _q("3.7474e-6"), "E''": _q("4.8916e-6")}

# far field
H_NORM = _q("1.6955e-4")
H0_TARGET = H_NORM / _q("1.03")
OUTER_CONSTANTS = {"C_F''": _q("5.4901e-4"), "C_F'": _q("9.8179e-5"), "C_F": _q("1.7558e-5")}

# matching at alpha = 0
MATCH_RESIDUAL = _q("4.1443e-5")
MATCH_BETA = _q("0.8381")
MATCH_BETA_SLACK = _q("1.05")

# oracle reference numbers
A_NUM = 1.65519
WALL_STRESS = 0.46960

CITATIONS = {
    "residual.taylor": "published residual bounds, subregion Taylor method",
    "residual.chebyshev": "published residual bounds, Chebyshev projection",
    "ranges": "published ranges of F0 and its derivatives",
    "tm": "published matching-time window",
    "signs": "claimed unique sign change of G1, G2, G3",
    "monotone": "claimed monotonicity in alpha",
    "table1": "published energy supremum bounds",
    "table2": "published contraction chain",
    "inner": "published inner error bounds",
    "h0": "published far-field norm ceiling divided by 1.03",
    "outer": "published far-field error constants",
    "match.residual": "published initial matching residual",
    "match.beta": "published Jacobian bound times 1.05",
    "match.cert": "claimed unique matched parameters in the trust region",
    "residual_sup": "published sup norm of the residual",
}
