"""Compiled-in constants of the quasi-solution.

All values are exact rationals.  The coefficient table ``P_MATRIX`` is the
14 x 6 matrix whose ``(i, j)`` entry multiplies ``beta**j * y**i /
((i+1)(i+2)(i+3))`` in the inner polynomial.
"""
from __future__ import annotations

from gmpy2 import mpq

_P_ROWS = [
    ["29589/493148", "-9845/82042", "-274/40132715", "241/11270972", "-422/16143111", "308/28130517"],
    ["15185/1706376", "-17096/473735", "36599/968864", "-19441/3418968", "6287/892276", "-10649/3570017"],
    ["-203116/65155", "-3042/970153", "-15440/235863", "21239/89058", "-114887/372923", "5024/37953"],
    ["-72804/75433", "239497/147253", "213995/192583", "-110079/28121", "1322305/259224", "-80021/35684"],
    ["106800/43663", "-112122/86717", "-155285/19732", "525204/17519", "-2029749/49136", "391166/20741"],
    ["-387344/32609", "77473/4402", "304475/15867", "-3049469/26658", "445437/2501", "-568723/6514"],
    ["3084825/27611", "-1006071/9319", "171511/4286", "3723623/24721", "-1097313/2915", "1207261/5453"],
    ["-2254258/5883", "3595213/9561", "-1049674/2379", "2081034/4399", "1013365/19943", "-1249672/5459"],
    ["1915077/2126", "-3165632/3527", "5196992/3543", "-3429722/1327", "3839299/2153", "-2755673/9363"],
    ["-2860297/1927", "3706169/2627", "-5245388/1929", "1764108/317", "-6522639/1366", "1111693/833"],
    ["281944/179", "-3174435/2257", "5003871/1621", "-7633149/1117", "6098777/958", "-9281007/4606"],
    ["-2506157/2481", "2704059/3157", "-8285683/3873", "6455381/1295", "-4186545/863", "3106817/1912"],
    ["2072736/5813", "-1425478/4881", "3778762/4529", "-980233/486", "3100252/1537", "-4063417/5821"],
    ["-1051227/19699", "745495/17357", "-1839247/13071", "1844827/5276", "-2241089/6290", "3813801/30274"],
]

P_MATRIX: tuple[tuple[mpq, ...], ...] = tuple(tuple(mpq(v) for v in row) for row in _P_ROWS)

# nominal far-field parameters as quadratics in alpha: (const, linear, quadratic)
A0_COEFFS = (mpq(3221, 1946), mpq(-797, 603), mpq(176, 289))
B0_COEFFS = (mpq(-2763, 1765), mpq(761, 284), mpq(-194, 237))
C0_COEFFS = (mpq(377, 1613), mpq(174, 1357), mpq(937, 6822))

RHO0 = mpq(5, 10**4)
ALPHA_MIN = mpq(-3, 50)
ALPHA_MAX = mpq(3, 50)
X_MATCH = mpq(5, 2)
C_CEILING = mpq(1, 4)
T_FLOOR = mpq(196, 100)

X_KNOTS = tuple(
    mpq(s)
    for s in ("0", "1/16", "1/8", "1/4", "3/8", "1/2", "3/4", "1", "5/4", "7/5", "3/2", "7/4", "2", "9/4", "12/5", "5/2")
)
ALPHA_KNOTS = tuple(mpq(s) for s in ("-3/50", "-1/20", "-1/50", "1/50", "1/20", "3/50"))

# subintervals I1..I4 of [0, 5/2]
SUBINTERVALS = (
    (mpq(0), mpq(5, 4)),
    (mpq(5, 4), mpq(7, 5)),
    (mpq(7, 5), mpq(2)),
    (mpq(2), mpq(5, 2)),
)

# contraction-gate epsilons per subinterval
EPSILONS = (mpq(5, 10**6), mpq(7, 10**7), mpq(3, 10**6), mpq(4, 10**6))

# far-field weighted-norm ceiling on the correction h
H_NORM_CEILING = mpq(16955, 10**8)

# published error radii of the quasi-solution
INNER_RADII = {"F": mpq(74947, 10**10), "F'": mpq(37474, 10**10), "F''": mpq(48916, 10**10)}
OUTER_CONSTANTS = {"F": mpq(17558, 10**9), "F'": mpq(98179, 10**9), "F''": mpq(54901, 10**8)}
OUTER_T_POWERS = {"F": mpq(-2), "F'": mpq(-3, 2), "F''": mpq(-1)}

# brackets holding the unique zero of G1, G2, G3 for every alpha
SIGN_BRACKETS = {
    "G1": (mpq(115, 100), mpq(13, 10)),
    "G2": (mpq(85, 100), mpq(105, 100)),
    "G3": (mpq(5, 4), mpq(7, 5)),
}
