import math
from decimal import Decimal, localcontext
from fractions import Fraction as F

import numpy as np
import pytest

from exsys.certify import (
    Certificate,
    VerificationError,
    a3_report,
    contains_v,
    length_interval,
    main_m,
    parse_fstar,
    run_main_theorem,
    verify_certificate,
)
from exsys.generators import gen_standard_torus, gen_twisted_cylinder


@pytest.fixture(scope="module")
def twist():
    return gen_twisted_cylinder(2)


@pytest.fixture(scope="module")
def short_u(twist):
    return run_main_theorem(twist, seed=0, spacing=F(1, 4))


@pytest.fixture(scope="module")
def v_cube(twist):
    return run_main_theorem(twist, seed=0, samples=50)


def test_contains_v():
    assert contains_v([(0, 1)])
    assert contains_v([(1, 2), (1, 3)])
    assert not contains_v([(0, 2)])
    assert not contains_v([(1, 0), (0, 0)])


def test_length_interval_brackets_float():
    segs = [((F(0), F(0), F(0)), (F(1), F(1), F(0))), ((F(1), F(1), F(0)), (F(1), F(1), F(1)))]
    lo, hi = length_interval(segs)
    with localcontext() as ctx:
        ctx.prec = 60
        exact = Decimal(2).sqrt() + 1
    assert lo <= exact <= hi and hi - lo < Decimal("1e-40")


def test_short_u_certificate_verifies(twist, short_u):
    cert = short_u.certificate
    assert cert.kind == "short-u"
    assert verify_certificate(cert, twist)
    assert not short_u.threshold_hypothesis


def test_v_in_cube_witness_bound(twist, v_cube):
    cert = v_cube.certificate
    assert cert.kind == "v-in-cube"
    assert cert.diameter <= v_cube.witness_bound
    assert v_cube.m == pytest.approx(main_m(v_cube.sys_u_est, twist.area()))


def test_certificate_text_round_trip(twist, short_u):
    text = short_u.certificate.dumps(short_u.data.refined)
    back = Certificate.loads(text, twist)
    assert back.dumps(short_u.data.refined) == text
    verify_certificate(back, twist)


def test_tampered_certificate_fails(twist, short_u):
    text = short_u.certificate.dumps(short_u.data.refined)
    lines = text.splitlines()
    i = next(k for k, l in enumerate(lines) if l.startswith("n_hits"))
    lines[i] = "n_hits = 0"
    with pytest.raises(VerificationError):
        verify_certificate(Certificate.loads("\n".join(lines) + "\n", twist), twist)


def test_certificate_rejects_other_mesh(short_u):
    other = gen_standard_torus(res=16)
    with pytest.raises(VerificationError):
        verify_certificate(short_u.certificate, other)


def test_deterministic_certificates(twist, short_u):
    again = run_main_theorem(twist, seed=0, spacing=F(1, 4))
    assert again.certificate.dumps(again.data.refined) == short_u.certificate.dumps(short_u.data.refined)


def test_a3_formulas():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b = (int(x) for x in rng.integers(-9, 10, 2))
        if math.gcd(a, b) != 1:
            continue
        # complete (a, b) to a unimodular row pair
        c, d = _bezout(a, b)
        r = a3_report(((a, b), (c, d)))
        X, Y = b * b + d * d, a * a + c * c
        assert (r.sys_u_sq, r.sys_v_sq) == (X, Y)
        assert (r.winner == "main") == (min(X, Y) ** 3 < max(X, Y))


def _bezout(a, b):
    # returns (c, d) with a*d - b*c = 1
    def eg(x, y):
        if y == 0:
            return (1 if x >= 0 else -1), 0
        q, r = divmod(x, y)
        s, t = eg(y, r)
        return t, s - q * t

    s, t = eg(a, b)
    return -t, s


def test_parse_fstar_rejects_singular():
    assert parse_fstar("1,0,8,1") == ((1, 0), (8, 1))
    r = a3_report(parse_fstar("1,0,8,1"))
    assert r.sys_u == 1 and r.sys_v == pytest.approx(math.sqrt(65))
    with pytest.raises(ValueError):
        a3_report(parse_fstar("1,1,1,1"))
