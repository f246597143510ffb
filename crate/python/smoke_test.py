"""Smoke test for the pyhyperproc bindings.

Install first:  pip install --no-build-isolation -e crates/python
"""
import json
import sys

import pyhyperproc as hp


def check(name, cond):
    print(("PASS " if cond else "FAIL ") + name)
    return bool(cond)


def main():
    ok = True
    m = hp.Model.default()
    ok &= check("default model", m.max_element == 2048 and m.thresholds == [16, 128])
    ok &= check("level_of", m.level_of(5) == "N" and m.level_of(2000) == "*N")
    ok &= check("omega band", m.omega_band("N") == (16, 2048))

    ok &= check("eval", hp.eval(m, "ALL n in N . 0 <= n"))
    ok &= check("eval with params", hp.eval(m, "EX n in N . n = x", {"x": 3}))

    inv = hp.omega_check(m, "n < w")
    ok &= check("omega check", inv["invariant"] and inv["counterexample"] is None)
    ok &= check("omega set", 3 in hp.omega_set(m, "n < w"))
    try:
        hp.omega_modulus(m, "EX k <= w . k + k = w")
        ok &= check("modulus precondition", False)
    except hp.PreconditionError:
        ok &= check("modulus precondition", True)

    try:
        hp.eval(m, "ALL n in N . (")
        ok &= check("parse error", False)
    except ValueError:
        ok &= check("parse error", True)

    half = hp.Real(m, "rat:1/2")
    ok &= check("real at", half.at(4) == ("1", "2"))
    ok &= check("real add", (half + half).eq(hp.Real(m, "rat:1/1"), 20))

    ok &= check("lpo transfer", hp.lpo_transfer(m, "n * n = 49")["witness"] == 7)
    ok &= check("mp", hp.mp(m, "n = 5")["standard_witness"] == 5)
    ok &= check("dne", hp.dne(m, "n < 128")["hyper_implication"])

    doc = json.loads(hp.demo())
    ok &= check("demo", all(e["checks"] == e["passed"] for e in doc["result"]["entries"]))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
