import math
import os

import pytest

import iwasawa

DATA = os.environ.get("IWASAWA_DATA", os.path.join(os.path.dirname(__file__), "..", "..", "data"))


def path(name):
    return os.path.join(DATA, name)


def test_valuations():
    for p in (2, 3, 5):
        for k in range(1, 300):
            assert iwasawa.factorial_val(k, p) == sum(iwasawa.vp(j, p) for j in range(1, k + 1))
    for k in range(1, 27):
        c = math.comb(27, k)
        v = 0
        while c % 3 == 0:
            c //= 3
            v += 1
        assert iwasawa.binom_prime_power_val(3, k, 3) == v


def test_padic_scalar():
    x = iwasawa.PadicScalar(3, 4, 18)
    assert x.val == 2
    assert (x * iwasawa.PadicScalar(3, 4, 2)).residue == 36
    assert iwasawa.PadicScalar(3, 4, 0).val is None
    assert (iwasawa.PadicScalar(5, 3, 2).inverse() * iwasawa.PadicScalar(5, 3, 2)).residue == 1
    assert iwasawa.idempotent_power(iwasawa.PadicScalar(5, 3, 7), 2).residue == 1
    assert iwasawa.idempotent_power(iwasawa.PadicScalar(5, 3, 10), 2).residue == 0
    with pytest.raises(iwasawa.ValidationError):
        iwasawa.PadicScalar(4, 2, 1)


def test_mahler_round_trip():
    f = lambda b: 4 ** b - 3 * b * b
    coeffs = iwasawa.mahler_coeffs(f, 3, 3, 27)
    assert len(coeffs) == 28
    for x in range(27):
        assert iwasawa.mahler_reconstruct(coeffs, 3, 3, x) == f(x) % 27


def test_ucs_example():
    r = iwasawa.run("ucs", path("example2.json"))
    assert r["exit_code"] == 0
    assert r["series"][1]["span"] == "span{x2,x3,x5}"
    assert r["centralizer"]["span"] == "span{x2,x3,x4,x5}"


def test_ucs_from_dict_and_errors():
    doc = {"presentation": {"p": 3, "dim": 2, "brackets": [[1, 2, 2, 3]]}}
    with pytest.raises(iwasawa.ValidationError):
        iwasawa.run("ucs", doc, p=5)
    with pytest.raises(iwasawa.ValidationError):
        iwasawa.run("nope", doc)


def test_control_and_growth():
    c = iwasawa.run("control", path("heisenberg_central_ideal.json"), level=1, coeff_prec=2)
    assert c["exit_code"] == 0
    g = iwasawa.run("growth", path("heisenberg_conj.json"), level=3, coeff_prec=5)
    assert g["lambda"] == 2


def test_threads_do_not_change_reports():
    a = iwasawa.run("mahler", path("heisenberg_conj.json"), level=1, coeff_prec=2, degree=4, threads=1)
    b = iwasawa.run("mahler", path("heisenberg_conj.json"), level=1, coeff_prec=2, degree=4, threads=4)
    assert a == b
