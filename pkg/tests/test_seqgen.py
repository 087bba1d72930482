import numpy as np
import pytest

from cazackit import numtheory as nt
from cazackit import seqgen as sg

SMALL_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23]


def periodic_autocorr(x):
    n = x.size
    return np.array([np.sum(x * np.conj(np.roll(x, -t))) for t in range(n)])


@pytest.mark.parametrize("q", SMALL_PRIMES)
def test_bjorck_cazac(q):
    x = sg.bjorck(q).samples
    assert np.max(np.abs(np.abs(x) - 1.0)) < 1e-12
    ac = periodic_autocorr(x)
    assert abs(ac[0] - q) < 1e-10
    assert np.max(np.abs(ac[1:])) < 1e-10 * q


@pytest.mark.parametrize("q", SMALL_PRIMES)
def test_zc_cazac(q):
    for u in range(1, q):
        x = sg.zc(u, q).samples
        assert np.max(np.abs(np.abs(x) - 1.0)) < 1e-12
        ac = periodic_autocorr(x)
        assert np.max(np.abs(ac[1:])) < 1e-10 * q


def test_zc_cross_root_magnitude():
    # distinct roots give constant inner-product magnitude sqrt(q)
    q = 7
    for u in range(1, q):
        for v in range(1, q):
            if u == v:
                continue
            ip = np.sum(sg.zc(u, q).samples * np.conj(sg.zc(v, q).samples))
            assert abs(abs(ip) - np.sqrt(q)) < 1e-10


def test_bjorck_phase_structure():
    q = 113
    x = sg.bjorck(q).samples
    theta = np.arccos(1.0 / (1.0 + np.sqrt(q)))
    for m in range(q):
        expected = np.exp(1j * nt.legendre(m, q) * theta)
        assert abs(x[m] - expected) < 1e-12


def test_reject_bad_inputs():
    with pytest.raises(ValueError):
        sg.bjorck(9)
    with pytest.raises(ValueError):
        sg.zc(0, 7)
    with pytest.raises(ValueError):
        sg.zc(7, 7)


def test_cyclic_shift():
    s = sg.bjorck(7)
    sh = sg.cyclic_shift(s, 2)
    assert sh.provenance["shift"] == 2
    ref = np.array([s.samples[(m - 2) % 7] for m in range(7)])
    assert np.allclose(sh.samples, ref)


def test_circulant_set_orthogonal():
    sset = sg.circulant_set(sg.bjorck(11))
    m = sset.to_matrix()
    gram = m.conj().T @ m
    assert np.max(np.abs(gram - 11 * np.eye(11))) < 1e-10
    assert sset.kind == "CyclicShift"
    assert sset.n_columns == 11


def test_root_set():
    sset = sg.root_set(7)
    assert sset.n_columns == 6
    assert sset.kind == "RootIndex"
    m = sset.to_matrix()
    gram = np.abs(m.conj().T @ m)
    off = gram[~np.eye(6, dtype=bool)]
    assert np.max(np.abs(off - np.sqrt(7))) < 1e-10


def test_sequence_csv_round_trip(tmp_path):
    s = sg.zc(3, 13)
    path = tmp_path / "seq.csv"
    sg.write_sequence_csv(s, path)
    back = sg.read_sequence_csv(path, family="ZC")
    assert np.array_equal(back.samples, s.samples)  # byte-exact via %.17g
