"""Regenerate the frozen reference values used by the test suite.

Every number is computed with mpmath in extended precision, independently of
gammadiff, and printed at 17 significant digits ready to paste into the
``*_REF`` tables of tests/.  Needs ``pip install mpmath``.  The absolute
moment and principal value integrals take a few minutes.

    python3 tools/freeze_oracles.py [specfun|pdf|cdf|vg|abs|pv ...]
"""
import argparse

import mpmath as mp

U_CASES = [(0.3, -0.4, 1.7), (0.5, 1.5, 0.2), (-0.4, 0.2, 3.0), (1.2, 2.0, 0.5), (0.7, 1.3, 10.0),
           (-1.0, 0.3, 2.5), (0.4, -1.0, 0.8), (2.5, 3.0, 25.0)]
F21_CASES = [(0.5, 1.3, 2.1, 0.4), (1.5, 0.7, 3.2, -0.8), (0.7, 1.1, 2.5, 0.9), (2.0, 3.5, 1.7, -5.0)]
M_CASES = [(0.3, 1.7, -15.0), (2.5, 0.6, 8.0), (-3.0, 1.5, 2.0), (1.1, 2.2, -0.5)]
K_CASES = [(0.0, 1.0), (0.5, 2.0), (2.5, 0.3), (1.3, 0.05), (7.2, 12.0), (20.0, 3.0)]
PDF_PARAMS = [(2, 1.5, 0.7, 2.2), (0.6, 1, 0.7, 2), (5, 2, 3, 0.5)]
PDF_X = [-2.0, -0.3, 0.25, 1.5]
CDF_CASES = [((2, 1.5, 0.7, 2.2), 0.5), ((0.6, 1, 0.7, 2), -0.2), ((5, 2, 3, 0.5), 1.0)]
VG_CASES = [((1.5, -1, 0.5), 0.7), ((3, 0.5, 2), -1.2), ((5, 0, 1), 2.0)]
ABS_CASES = [((2, 1.5, 0.7, 2.2), 1.3), ((0.6, 1, 0.7, 2), 0.5), ((5, 2, 3, 0.5), 3.7), ((0.6, 1, 0.7, 2), 2.0)]
PV_PARAMS = [(2, 1, 1, 1), (5, 2, 3, 0.5), (2, 1.5, 0.7, 2.2)]


def s(v):
    return mp.nstr(v, 17)


def specfun():
    mp.mp.dps = 40
    for c in U_CASES:
        print("U", c, s(mp.hyperu(*c)))
    for c in F21_CASES:
        print("2F1", c, s(mp.hyp2f1(*c)))
    for c in M_CASES:
        print("1F1", c, s(mp.hyp1f1(*c)))
    for c in K_CASES:
        print("K", c, s(mp.besselk(*c)))


def pdf():
    # convolution integral p(x) = int f1(x + y) f2(y) dy, reflected for x < 0
    mp.mp.dps = 40
    for p in PDF_PARAMS:
        for x in PDF_X:
            a1, b1, a2, b2 = [mp.mpf(v) for v in p]
            t = mp.mpf(x)
            if t < 0:
                a1, b1, a2, b2, t = a2, b2, a1, b1, -t
            k = b1 ** a1 * b2 ** a2 / mp.gamma(a1) / mp.gamma(a2) * mp.exp(-b1 * t)
            v = k * mp.quad(lambda y: y ** (a2 - 1) * (t + y) ** (a1 - 1) * mp.exp(-(b1 + b2) * y), [0, 1, mp.inf])
            print("pdf", p, x, s(v))


def cdf():
    # F(x) = E F_{X1}(x + X2) with the regularized lower incomplete gamma function
    mp.mp.dps = 25
    for p, x in CDF_CASES:
        a1, b1, a2, b2 = [mp.mpf(v) for v in p]
        f = lambda y: (mp.gammainc(a1, 0, b1 * (x + y), regularized=True)
                       * b2 ** a2 * y ** (a2 - 1) * mp.exp(-b2 * y) / mp.gamma(a2))
        lo = max(0, -x)
        print("cdf", p, x, s(mp.quad(f, [lo, lo + 1, lo + 10, mp.inf])))


def vg():
    mp.mp.dps = 30
    for (r, th, sg), x in VG_CASES:
        r, th, sg, t = [mp.mpf(v) for v in (r, th, sg, x)]
        a = mp.sqrt(th ** 2 + sg ** 2)
        v = (mp.exp(th * t / sg ** 2) * (abs(t) / a) ** ((r - 1) / 2) * mp.besselk((r - 1) / 2, a * abs(t) / sg ** 2)
             / (sg * mp.sqrt(mp.pi) * mp.gamma(r / 2) * 2 ** ((r - 1) / 2)))
        print("vg", (float(r), float(th), float(sg)), x, s(v))


def _density_u(p, x):
    # the Tricomi form, evaluated entirely in mpmath
    a1, b1, a2, b2 = [mp.mpf(v) for v in p]
    if x < 0:
        a1, b1, a2, b2, x = a2, b2, a1, b1, -x
    pref = b1 ** a1 * b2 ** a2 / (b1 + b2) ** (a1 + a2 - 1) / mp.gamma(a1)
    return pref * mp.exp(-b1 * x) * mp.hyperu(1 - a1, 2 - a1 - a2, x * (b1 + b2))


def abs_moments():
    mp.mp.dps = 20
    for p, b in ABS_CASES:
        f = lambda t: t ** (b - 1) * (_density_u(p, t) + _density_u(p, -t))
        print("abs", p, b, s(mp.quad(f, [0, 0.5, 2, 10, mp.inf])))


def pv():
    mp.mp.dps = 20
    for p in PV_PARAMS:
        f = lambda t: (_density_u(p, t) - _density_u(p, -t)) / t
        print("pv", p, s(mp.quad(f, [0, 0.5, 2, 10, mp.inf])))


TABLES = {"specfun": specfun, "pdf": pdf, "cdf": cdf, "vg": vg, "abs": abs_moments, "pv": pv}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("tables", nargs="*", metavar="table", help=f"any of {', '.join(TABLES)} (default all)")
    args = ap.parse_args()
    unknown = [t for t in args.tables if t not in TABLES]
    if unknown:
        ap.error(f"unknown table(s): {', '.join(unknown)}")
    for name in args.tables or list(TABLES):
        TABLES[name]()


if __name__ == "__main__":
    main()
