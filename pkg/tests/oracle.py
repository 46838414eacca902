"""High-precision reference values computed directly from the closed forms with mpmath."""
import mpmath as mp

mp.mp.dps = 40


def consts(g):
    g = mp.mpf(g)
    h = mp.sqrt(1 + g * g / 4)
    G = g / h
    return dict(g=g, h=h, G=G, g_plus=h - g / 2, g_minus=-g / 2 - h, g_sup_plus=g / 2 + h, g_sup_minus=g / 2 - h)


def _split(R):
    R = [mp.mpf(x) for x in R]
    return R[0], mp.sqrt(sum(x * x for x in R[1:])), R[1:]


def B(g, R):
    c = consts(g)
    r0, m, _ = _split(R)
    return -(r0 + c["g_minus"] * m) * (r0 + c["g_plus"] * m)


def j(g, R):
    c = consts(g)
    r0, m, _ = _split(R)
    return abs((r0 + c["g_minus"] * m) / (r0 + c["g_plus"] * m)) ** (-c["G"] / 4)


def F(g, R):
    c = consts(g)
    r0, m, _ = _split(R)
    u = r0 + c["g_minus"] * m
    v = r0 + c["g_plus"] * m
    return abs(u) ** (mp.mpf(1) / 2 - c["G"] / 4) * abs(v) ** (mp.mpf(1) / 2 + c["G"] / 4)


def H(g, P):
    c = consts(g)
    p0, n, _ = _split(P)
    Gsp = 1 + c["G"] / 2
    Gsm = c["G"] / 2 - 1
    return abs(p0 - n / c["g_sup_plus"]) ** (Gsp / 2) * abs(p0 - n / c["g_sup_minus"]) ** (-Gsm / 2)


def sigma(g, R):
    c = consts(g)
    r0, m, sp = _split(R)
    w = j(g, R)
    return [w * (r0 - c["g"] / 2 * m)] + [c["h"] * w * x for x in sp]


def axis_angle(g, R):
    c = consts(g)
    r0, m, _ = _split(R)
    A = r0 - c["g"] / 2 * m
    return mp.acosh(A / mp.sqrt(abs(B(g, R)))) / c["h"]


def f(x):
    return float(x)
