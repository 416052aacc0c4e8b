#!/usr/bin/env python3
"""Regenerate the field bundles under crates/core/fixtures/.

Dev tool only. Unit systems are the classical cyclotomic units for the
cyclotomic fields and products of real-quadratic fundamental units for the
triquadratic census fields; regulators are recomputed here with mpmath.
The census unit systems written here are later replaced by gen_pari.py,
which writes certified fundamental units.
"""
import json
import os
import sys
from fractions import Fraction

import mpmath
import sympy as sp
from sympy.polys.numberfields import to_number_field

mpmath.mp.dps = 60
HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "crates", "core", "fixtures")


def rat(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def coords_list(poly_coeffs_low_first, n):
    c = [Fraction(0)] * n
    for i, v in enumerate(poly_coeffs_low_first):
        c[i] += Fraction(v)
    return [rat(v) for v in c]


def regulator(minpoly_low_first, units):
    n = len(minpoly_low_first) - 1
    coeffs_high = [mpmath.mpf(c) for c in reversed(minpoly_low_first)]
    roots = mpmath.polyroots(coeffs_high, maxsteps=400, extraprec=400)
    upper = sorted([r for r in roots if mpmath.im(r) > 0], key=lambda z: (mpmath.re(z), mpmath.im(z)))
    assert len(upper) == n // 2, "field is not totally complex"
    rows = []
    for u in units:
        vals = []
        for z in upper[:-1]:
            s = sum(mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator * z**i for i, c in enumerate(u))
            vals.append(2 * mpmath.log(abs(s)))
        rows.append(vals)
    if not rows:
        return mpmath.mpf(1)
    return abs(mpmath.det(mpmath.matrix(rows)))


def bundle(label, minpoly, w, zeta, units):
    n = len(minpoly) - 1
    reg = regulator(minpoly, [[Fraction(x) for x in u] for u in units])
    return {
        "fund_units": [coords_list(u, n) for u in units],
        "label": label,
        "min_poly": [int(c) for c in minpoly],
        "regulator": mpmath.nstr(reg, 30, min_fixed=-1, max_fixed=40),
        "torsion_gen": coords_list(zeta, n),
        "torsion_order": w,
    }


def write(path, obj):
    with open(path, "w") as fh:
        fh.write(json.dumps(obj, sort_keys=True, separators=(",", ":")))


def cyclotomic(m):
    x = sp.Symbol("x")
    phi = sp.Poly(sp.cyclotomic_poly(m, x), x)
    return [int(c) for c in reversed(phi.all_coeffs())]


def geometric(a):
    """1 + z + ... + z^(a-1) = (1 - z^a)/(1 - z)."""
    return [1] * a


def reduce_mod(coeffs, minpoly):
    x = sp.Symbol("x")
    p = sp.Poly(list(reversed(coeffs)), x)
    f = sp.Poly(list(reversed(minpoly)), x)
    r = p.rem(f)
    out = [Fraction(int(c)) for c in reversed(r.all_coeffs())]
    return out + [Fraction(0)] * (len(minpoly) - 1 - len(out))


def main_fixtures():
    # Q(zeta_7): torsion generated by -zeta, units (1-z^a)/(1-z), a = 2, 3.
    f7 = cyclotomic(7)
    write(os.path.join(OUT, "q_zeta7.json"),
          bundle("Q(zeta7)", f7, 14, [0, -1], [geometric(2), geometric(3)]))
    # Q(zeta_9): a = 2, 4.
    f9 = cyclotomic(9)
    write(os.path.join(OUT, "q_zeta9.json"),
          bundle("Q(zeta9)", f9, 18, [0, -1], [geometric(2), geometric(4)]))
    # Q(zeta_16): a = 3, 5, 7.
    f16 = cyclotomic(16)
    write(os.path.join(OUT, "q_zeta16.json"),
          bundle("Q(zeta16)", f16, 16, [0, 1], [geometric(3), geometric(5), geometric(7)]))


def independent_units(minpoly, candidates, r):
    """Greedy pick of r multiplicatively independent units from candidates."""
    n = len(minpoly) - 1
    coeffs_high = [mpmath.mpf(c) for c in reversed(minpoly)]
    roots = mpmath.polyroots(coeffs_high, maxsteps=400, extraprec=400)
    upper = sorted([z for z in roots if mpmath.im(z) > 0], key=lambda z: (mpmath.re(z), mpmath.im(z)))
    chosen, vecs = [], []
    for u in candidates:
        v = [2 * mpmath.log(abs(sum(mpmath.mpf(c.numerator) / c.denominator * z**i for i, c in enumerate(u)))) for z in upper[:-1]]
        trial = vecs + [v]
        m = mpmath.matrix(trial)
        # rank test through the Gram determinant
        g = m * m.T
        if abs(mpmath.det(g)) > mpmath.mpf(10) ** -20:
            chosen.append(u)
            vecs = trial
        if len(chosen) == r:
            break
    assert len(chosen) == r
    return chosen


def census():
    x = sp.Symbol("x")
    fields = []
    # Cyclotomic octics.
    for m, w, zeta in ((15, 30, [0, -1]), (16, 16, [0, 1]), (20, 20, [0, 1]), (24, 24, [0, 1])):
        f = cyclotomic(m)
        cands = []
        for a in range(2, m):
            if sp.gcd(a, m) != 1:
                continue
            cands.append(reduce_mod(geometric(a), f))
        for a in range(1, m):
            one_minus = [1] + [0] * (a - 1) + [-1]
            cands.append(reduce_mod(one_minus, f))
        cands = [c for c in cands if is_unit(f, c)]
        units = independent_units(f, cands, 3)
        fields.append((f"Q(zeta{m})", f, w, zeta, units))
    # Triquadratic CM fields Q(sqrt a, sqrt b, sqrt(-c)).
    tri = [
        (2, 5, 1, 8, "zeta8"),
        (3, 5, 1, 12, "zeta12"),
        (2, 3, 5, 2, "minus1"),
        (2, 5, 3, 6, "zeta6"),
        (3, 7, 1, 12, "zeta12"),
        (5, 13, 1, 4, "i"),
    ]
    fund = {2: 1 + sp.sqrt(2), 3: 2 + sp.sqrt(3), 5: (1 + sp.sqrt(5)) / 2, 6: 5 + 2 * sp.sqrt(6),
            7: 8 + 3 * sp.sqrt(7), 10: 3 + sp.sqrt(10), 13: (3 + sp.sqrt(13)) / 2, 15: 4 + sp.sqrt(15),
            21: (5 + sp.sqrt(21)) / 2, 35: 6 + sp.sqrt(35), 65: 8 + sp.sqrt(65)}
    for a, b, c, w, zname in tri:
        gen = sp.sqrt(a) + sp.sqrt(b) + sp.sqrt(-c)
        mp = sp.Poly(sp.minimal_polynomial(gen, x), x)
        assert mp.degree() == 8 and mp.LC() == 1
        f = [int(v) for v in reversed(mp.all_coeffs())]

        def coords(expr):
            an = to_number_field(expr, gen)
            cs = [Fraction(int(sp.fraction(q)[0]), int(sp.fraction(q)[1])) for q in reversed(an.coeffs())]
            return cs + [Fraction(0)] * (8 - len(cs))

        units = [coords(fund[a]), coords(fund[b]), coords(fund[a * b])]
        zeta_expr = {
            "zeta8": (1 + sp.I) / sp.sqrt(2),
            "zeta12": (sp.sqrt(3) + sp.I) / 2,
            "zeta6": (1 + sp.sqrt(-3)) / 2,
            "minus1": sp.Integer(-1),
            "i": sp.I,
        }[zname]
        fields.append((f"Q(sqrt{a},sqrt{b},sqrt-{c})", f, w, coords(zeta_expr), units))
    for i, (label, f, w, zeta, units) in enumerate(fields):
        write(os.path.join(OUT, "census", f"octic_cm_{i:02d}.json"), bundle(label, f, w, zeta, units))


def is_unit(f, coeffs):
    x = sp.Symbol("x")
    g = sp.Poly([sp.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x)
    res = sp.resultant(sp.Poly(list(reversed(f)), x), g)
    return abs(res) == 1


if __name__ == "__main__":
    main_fixtures()
    if "--skip-census" not in sys.argv:
        census()
