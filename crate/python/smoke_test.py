"""Smoke test for the compiled `npf` extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`,
or copy `target/release/libnpf.so` to `npf.so` next to this script.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import npf


def main():
    f = npf.Series("x^2 + x*t + t^2", p=3)
    assert f.newton_polygon() == [("0", "2"), ("2", "0")], f.newton_polygon()
    assert f.legendre("1/2") == f.gauss("1/2")[0] == "1"

    g = npf.Series("x + t", p=3) * npf.Series("x + 2*t", p=3)
    assert g == npf.Series("x^{2} + 2*t^{2}", p=3)

    canon = npf.Series("3*p^{1/2} + 1", mode="arithmetic")
    assert str(canon) == "1 + p^{1/2} + p^{3/2} + O(p^{32})", str(canon)

    try:
        npf.Series("x^{-1}")
    except ValueError:
        pass
    else:
        raise AssertionError("negative exponent accepted")

    half = npf.inverse_legendre_power("1/2")
    assert (half["c"], half["r"], half["exact"]) == ("1/4", "1", True)

    assert npf.classify("1/4", "1/2") == "ω"

    report = npf.chain_report(["1/4", "1/2"], depth=256)
    assert report["passed"] and len(report["pairs"]) == 1

    limit, values = npf.example_sup("1", 100)
    assert limit == "3" and values[-1] == "601/200"

    passed, text = npf.run_verify("classify", 50, 0)
    assert passed, text
    print("smoke test passed")


if __name__ == "__main__":
    main()
