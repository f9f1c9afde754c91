"""Smoke test for the pymacmahon extension module.

Build and install first, e.g.
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/pymacmahon-*.whl
"""

import json
from fractions import Fraction

import pymacmahon as m


def main():
    assert m.brute_m([1, 1], 4) == 3
    assert m.macmahon_u(2, 10).coeff(4) == m.brute_m([1, 1], 4)

    h6 = m.h_series(6, 10)
    assert h6.coeff(0) == Fraction(-11, 1440)
    rep = m.express_quasimodular(m.g_series(2, 40) * m.g_series(2, 40), 4)
    assert rep == {"G2^2": Fraction(1)}, rep

    ok, _ = m.is_prime_detecting(m.macmahon_u(1, 60))
    assert not ok

    reduced = m.times_n_reduce([1])
    assert all(isinstance(c, Fraction) for _, c in reduced)

    certs = [json.loads(c) for c in m.verify_table1(60)]
    assert len(certs) == 5

    const = m.search_const_detectors(4, 80)
    assert const, "no constant-coefficient detectors found"

    print("pymacmahon smoke test: ok")


if __name__ == "__main__":
    main()
