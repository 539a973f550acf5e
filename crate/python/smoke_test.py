"""Imports the compiled extension and exercises each binding once.

Build first with `cargo build -p sumprod-py` (or `--release`); the script
copies target/<profile>/libsumprod.so next to itself as sumprod.so unless
SUMPROD_LIB points at a built library.
"""

import os
import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate():
    env = os.environ.get("SUMPROD_LIB")
    if env:
        return Path(env)
    for profile in ("release", "debug"):
        for name in ("libsumprod.so", "libsumprod.dylib", "sumprod.dll"):
            p = ROOT / "target" / profile / name
            if p.exists():
                return p
    sys.exit("no built extension found; run `cargo build -p sumprod-py`")


def load():
    tmp = tempfile.mkdtemp(prefix="sumprod_")
    shutil.copy(locate(), Path(tmp) / "sumprod.so")
    sys.path.insert(0, tmp)
    import sumprod

    return sumprod


def main():
    sp = load()

    rep = sp.verify_extremal(3)
    assert rep["n"] == 17 and rep["witness"] is None, rep
    c = sp.Coloring.extremal(4)
    assert c.n == 44 and c.find_monochromatic() is None
    bad = sp.Coloring.interval(17, [5, 6, 8])
    x, y, col = bad.find_monochromatic()
    assert bad.color(x + y) == bad.color(x * y) == col
    again = sp.Coloring.from_json(c.to_json())
    assert again.colors() == c.colors()

    t = sp.sp_number(1, 100)
    assert t["threshold"] == 12
    t2 = sp.sp_number(2, 100)
    assert t2["threshold"] == 54 and len(t2["at"]["odd_cycle"]) % 2 == 1

    s = sp.run_suite("shift", 1000, 20, 1)
    assert s["pass"] and len(s["rows"]) == 20
    assert all(ok for _, _, _, ok in sp.trivial_checks(1000))

    f = sp.SampledFunction.random_disc(-100, 1200, 7, 0)
    assert 0.0 <= f.u1_norm(1000, 3, 10) <= 1.0
    assert f.u1_norm(1000, 3, 10, "uniform") >= 0.0
    pf = f.project(3, 10)
    assert pf.lo == f.lo + 27 and abs(pf(500)) <= 1.0

    z = sp.exp_sum(list(range(1, 11)), 0.0)
    assert abs(z - 1) < 1e-12
    dv = sp.dioph_verify(list(range(1, 101)), 2.0, 8.0, 100.0, [0.1, 0.2])
    assert dv["summary"]["failures"] == 0
    v = sp.vino_verify(0.2, 1000, 0.001, 0.1)
    assert v["q"] == 5 and not v["alarm"]
    num, den = sp.gamma_exact([2, 3])
    assert Fraction(int(num), int(den)) == Fraction(17, 25)
    assert abs(sp.gamma_coprimality([2, 3]) - 0.68) < 1e-12

    psi = sp.vonmangoldt_exp_sum(1000, 1, 0.0)
    assert abs(psi.real - 996.6805) < 1e-3 and psi.imag == 0.0
    w = sp.weyl_structure_scan(10000, 1, 0.3)
    assert w["summary"]["failures"] == 0

    sieve = sp.SelbergSieve(10000 ** 0.25)
    assert sieve(10007) > 0 and abs(sieve.expansion_at(10007) - sieve(10007)) < 1e-8
    assert min(sieve.table(10000)) >= 0.0
    sr = sp.sieve_report(10000, 10000 ** 0.25, 6)
    assert sr["telescoping_error"] <= 1e-8

    rs = sp.richness_scan(sp.Coloring.random(100000, 3, 1), 2, 2, [(3, 8), (11, 30)], 2)
    assert rs["partition_ok"]

    code, out, _ = sp.run_cli(["extremal", "r=3"])
    assert code == 0 and "N=17, no monochromatic pair" in out
    code, _, err = sp.run_cli(["extremal", "bogus=1"])
    assert code == 2 and "bogus" in err

    try:
        sp.Coloring(2, [0, 5])
    except ValueError:
        pass
    else:
        raise AssertionError("invalid color accepted")
    try:
        sp.dioph_verify(list(range(1, 100001)), 2.0, 8.0, 1e5, [0.05], 1 << 30)
    except sp.CapacityError:
        pass
    else:
        raise AssertionError("grid budget not enforced")

    print("smoke test ok")


if __name__ == "__main__":
    main()
