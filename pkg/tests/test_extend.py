import numpy as np
import pytest

from cazackit import extend, numtheory as nt, seqgen as sg


def make_set(split=(113, 7), n=120, kind="CyclicShift", count=None,
             family="Bjorck"):
    g = nt.GoldbachSplit(split, n)
    plan = extend.ExtensionPlan(
        n, g, kind,
        count or (max(split) if kind == "CyclicShift"
                  else max(p - 1 for p in split)))
    return extend.extend_even(plan, extend.default_bases(g, family))


def test_extend_even_shapes_and_assignment():
    s = make_set()
    assert s.length == 120
    assert s.n_columns == 113
    assert s.kind == "CyclicShift"
    for c, rec in enumerate(s.assignment):
        assert rec == (c, c % 7)  # auto short assignment pi(c) = c mod Q2


def test_extend_even_column_structure():
    s = make_set(count=10)
    b113 = sg.bjorck(113).samples
    b7 = sg.bjorck(7).samples
    for c, col in enumerate(s.columns):
        long = np.array([b113[(m - c) % 113] for m in range(113)])
        short = np.array([b7[(m - (c % 7)) % 7] for m in range(7)])
        assert np.allclose(col.samples, np.concatenate([long, short]))


def test_extend_odd_three_parts():
    g = nt.GoldbachSplit((109, 5, 7), 121)
    plan = extend.ExtensionPlan(121, g, "CyclicShift", 20)
    s = extend.extend_odd(plan, extend.default_bases(g, "Bjorck"))
    assert s.length == 121
    assert all(len(rec) == 3 for rec in s.assignment)


def test_plan_count_cap():
    g = nt.GoldbachSplit((113, 7), 120)
    with pytest.raises(ValueError):
        extend.ExtensionPlan(120, g, "CyclicShift", 114)
    with pytest.raises(ValueError):
        extend.ExtensionPlan(120, g, "RootIndex", 113)
    with pytest.raises(ValueError):
        extend.ExtensionPlan(119, g, "CyclicShift", 5)  # n mismatch


def test_root_index_requires_zc():
    g = nt.GoldbachSplit((113, 7), 120)
    plan = extend.ExtensionPlan(120, g, "RootIndex", 6)
    with pytest.raises(ValueError):
        extend.extend_even(plan, extend.default_bases(g, "Bjorck"))


def test_extend_repetition():
    base = sg.bjorck(113)
    rep = extend.extend_repetition(base, 120)
    assert rep.length == 120
    assert np.allclose(rep.samples[113:], base.samples[:7])


def test_repetition_set():
    s = extend.repetition_set(113, 120, 14)
    assert s.n_columns == 14
    assert s.length == 120
    assert s.meta["extension"] == "repetition"
    b = sg.bjorck(113)
    for c, col in enumerate(s.columns):
        expected = extend.extend_repetition(sg.cyclic_shift(b, c), 120)
        assert np.allclose(col.samples, expected.samples)


def test_orthogonal_subset():
    s = make_set()
    sub = extend.orthogonal_subset(s)
    m = sub.to_matrix()
    gram = np.abs(m.conj().T @ m) / 120.0
    off = gram[~np.eye(sub.n_columns, dtype=bool)]
    assert sub.n_columns == 7
    assert np.max(off) < 1e-10


def test_select_columns():
    s = make_set(count=20)
    sub = extend.select_columns(s, [0, 7, 14])
    assert sub.n_columns == 3
    assert sub.assignment == (s.assignment[0], s.assignment[7], s.assignment[14])
    assert np.allclose(sub.columns[1].samples, s.columns[7].samples)


def test_set_csv_round_trip(tmp_path):
    s = make_set(count=5)
    csv_path = tmp_path / "set.csv"
    man_path = tmp_path / "set.meta.json"
    extend.write_set_csv(s, csv_path, man_path)
    back = extend.read_set_csv(csv_path)
    assert back.n_columns == 5
    assert np.array_equal(back.to_matrix(), s.to_matrix())
