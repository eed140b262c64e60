import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exsys.cubical import Chain, boundary
from exsys.curves import LatticeLoop, ch, decompose_cycle
from exsys.filling import dump_transcript, fill_cycle_x1, fill_x1, load_transcript, replay
from exsys.oracle import min_linf_filling
from exsys.suites import random_embedded_loop


def test_loop_parse_dump_round_trip():
    loop = LatticeLoop.parse("0 0 0 : xyXY")
    assert LatticeLoop.parse(loop.dump()) == loop
    assert len(loop) == 4
    with pytest.raises(ValueError):
        LatticeLoop.parse("0 0 0 : xy")


def test_unit_square_filling():
    loop = LatticeLoop.parse("0 0 0 : xyXY")
    r = fill_x1(loop)
    assert boundary(r.chain) == ch(loop.path())
    assert r.multiplicity == 1


def test_ch_of_backtrack_is_zero():
    assert not ch(LatticeLoop.parse("1 2 3 : zZ").path())


def test_split_additivity():
    path = LatticeLoop.parse("0 0 0 : xxyzXXYZ").path()
    for k in range(len(path) + 1):
        a, b = path.split(k)
        assert ch(a) + ch(b) == ch(path)


def test_decompose_figure_eight():
    a = ch(LatticeLoop.parse("0 0 0 : xyXY").path()) + ch(LatticeLoop.parse("1 1 0 : xyXY").path())
    pieces = decompose_cycle(a)
    assert all(p.is_embedded() and p.closed for p in pieces)
    assert sum((ch(p) for p in pieces), Chain.zero(1)) == a
    assert sum(ch(p).l1() for p in pieces) == a.l1()


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_random_embedded_loop_filling(seed):
    rng = np.random.default_rng(seed)
    loop = random_embedded_loop(rng, max_len=30)
    r = fill_x1(loop)
    target = ch(loop.path())
    assert boundary(r.chain) == target
    assert r.multiplicity <= target.l1()
    assert replay(r.transcript) == r.chain


def test_transcript_text_round_trip():
    loop = LatticeLoop.parse("0 0 0 : xxyzXYXZ")
    r = fill_x1(loop)
    assert replay(load_transcript(dump_transcript(r.transcript))) == r.chain


def test_oracle_sandwich_on_small_loop():
    loop = LatticeLoop.parse("0 0 0 : xxyyXXYY")
    alpha = ch(loop.path())
    opt, c = min_linf_filling(alpha)
    assert boundary(c) == alpha
    r = fill_cycle_x1(alpha)
    assert opt <= r.multiplicity <= alpha.l1()
