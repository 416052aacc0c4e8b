#!/usr/bin/env python3
"""PARI-backed fixtures (needs cypari2).

  - rewrites the census bundles with certified fundamental units from bnfinit;
  - writes the non-Galois quartic K = Q[x]/(x^4 + 6x^2 + 7) together with its
    degree-8 normal closure L and the four images of K's generator in L.
"""
import json
import os
from fractions import Fraction

import cypari2

pari = cypari2.Pari()
pari.allocatemem(2 * 10**9)
pari.set_real_precision(60)
HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "crates", "core", "fixtures")


def rat(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def coords(mod, n):
    """Power-basis coordinates of a PARI Mod (or plain polynomial)."""
    p = pari.lift(mod)
    cs = [Fraction(str(pari.polcoef(p, i))) for i in range(n)]
    return [rat(c) for c in cs]


def poly_low_first(f):
    n = int(pari.poldegree(f))
    return [int(pari.polcoef(f, i)) for i in range(n + 1)]


def bnf_bundle(label, f):
    n = int(pari.poldegree(f))
    bnf = pari.bnfinit(f, 1)
    assert int(pari.bnfcertify(bnf)) == 1
    tu = pari("(b)->b.tu")(bnf)
    fu = pari("(b)->b.fu")(bnf)
    reg = pari("(b)->b.reg")(bnf)
    return {
        "fund_units": [coords(u, n) for u in fu],
        "label": label,
        "min_poly": poly_low_first(f),
        "regulator": str(reg)[:32],
        "torsion_gen": coords(tu[1], n),
        "torsion_order": int(tu[0]),
    }


def write(path, obj):
    with open(path, "w") as fh:
        fh.write(json.dumps(obj, sort_keys=True, separators=(",", ":")))


def census():
    d = os.path.join(OUT, "census")
    for name in sorted(os.listdir(d)):
        if not name.endswith(".json"):
            continue
        path = os.path.join(d, name)
        old = json.load(open(path))
        x = pari("x")
        f = sum(c * x**i for i, c in enumerate(old["min_poly"]))
        write(path, bnf_bundle(old["label"], f))


def closure_fixture():
    fk = pari("x^4 + 6*x^2 + 7")
    assert int(pari.polgalois(fk)[0]) == 8
    fl = pari.polredabs(pari.nfsplitting(fk))
    k = bnf_bundle("Q(sqrt(-3-sqrt2))", fk)
    lb = bnf_bundle("closure of Q(sqrt(-3-sqrt2))", fl)
    images = pari.nfroots(pari.subst(fl, "x", "y"), fk)
    k["normal_closure"] = {"bundle": lb, "images": [coords(pari.subst(pari.lift(r), "y", "x"), 8) for r in images]}
    write(os.path.join(OUT, "quartic_d4.json"), k)


if __name__ == "__main__":
    census()
    closure_fixture()
