import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import paper_f_scalar
from septensor.errors import ConfigError, DomainError, InvalidGrid, UnsupportedOffGrid
from septensor.gridfn import (
    FunctionSource,
    Grid,
    Interval,
    builtin_registry,
    default_grids,
    eval_source,
    make_uniform_grid,
    read_tabulated_csv,
    write_tabulated_csv,
)


@pytest.mark.parametrize("lo,hi,n,expected", [
    (0.0, 1.0, 2, [0.0, 1.0]),
    (0.0, 1.0, 5, [0.0, 0.25, 0.5, 0.75, 1.0]),
    (-1.0, 1.0, 3, [-1.0, 0.0, 1.0]),
])
def test_uniform_grid_examples(lo, hi, n, expected):
    g = make_uniform_grid(Interval(lo, hi), n)
    np.testing.assert_array_equal(g.points, expected)


def test_grid_rejects_too_few_points():
    with pytest.raises(InvalidGrid):
        make_uniform_grid(Interval(0.0, 1.0), 1)


def test_bad_interval():
    with pytest.raises(InvalidGrid):
        Interval(1.0, 0.0)


def test_grid_must_be_increasing():
    with pytest.raises(InvalidGrid):
        Grid(Interval(0.0, 1.0), [0.0, 0.7, 0.5, 1.0])


def test_grid_points_read_only():
    g = make_uniform_grid(Interval(0.0, 1.0), 3)
    with pytest.raises(ValueError):
        g.points[0] = 5.0


def test_eval_examples():
    assert eval_source(FunctionSource.builtin("paper-f"), 0.0, 0.0) == 1.0
    assert eval_source(FunctionSource.from_expression("x*y"), 0.5, 0.25) == 0.125
    assert eval_source(FunctionSource.builtin("rank1-sep"), 0.0, 0.0) == 1.0


def test_tabulated_off_grid():
    nodes = [0.0, 0.5, 1.0]
    f = FunctionSource.tabulated(nodes, nodes, np.eye(3))
    assert eval_source(f, 0.5, 0.5) == 1.0
    assert eval_source(f, 0.5 + 1e-15, 1.0) == 0.0
    with pytest.raises(UnsupportedOffGrid):
        eval_source(f, 0.1, 0.1)


def test_registry():
    names = builtin_registry()
    assert {"paper-f", "rank1-sep", "zero"} <= set(names)
    with pytest.raises(ConfigError):
        FunctionSource.builtin("nope")


def test_out_of_domain():
    with pytest.raises(DomainError):
        eval_source(FunctionSource.builtin("paper-f"), 1.5, 0.0)


def test_nan_sample_is_domain_error():
    f = FunctionSource.from_expression("sqrt(x-0.5)")
    with pytest.raises(DomainError):
        f.sample(np.array([0.0, 1.0]), np.array([0.0]))


def test_paper_f_term_by_term():
    rng = np.random.default_rng(7)
    f = FunctionSource.builtin("paper-f")
    pts = rng.random((1000, 2))
    got = f(pts[:, 0], pts[:, 1])
    ref = np.array([paper_f_scalar(x, y) for x, y in pts])
    assert np.max(np.abs(got - ref)) <= 1e-14


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_eval_is_pure(x, y):
    f = FunctionSource.builtin("paper-f")
    a, b = eval_source(f, x, y), eval_source(f, x, y)
    assert a == b or (np.isnan(a) and np.isnan(b))
    assert np.float64(a).tobytes() == np.float64(b).tobytes()


def test_sample_shape_and_entries():
    f = FunctionSource.from_expression("x-2*y")
    A = f.sample(np.array([0.0, 1.0]), np.array([0.0, 0.5, 1.0]))
    np.testing.assert_array_equal(A, [[0.0, -1.0, -2.0], [1.0, 0.0, -1.0]])


def test_default_grids_tabulated_use_nodes():
    f = FunctionSource.tabulated([0.0, 0.3, 1.0], [0.0, 1.0], np.ones((3, 2)))
    gx, gy = default_grids(f, 401)
    np.testing.assert_array_equal(gx.points, [0.0, 0.3, 1.0])
    np.testing.assert_array_equal(gy.points, [0.0, 1.0])


def test_tabulated_shape_mismatch():
    with pytest.raises(ConfigError):
        FunctionSource.tabulated([0.0, 1.0], [0.0, 1.0], np.ones((3, 2)))


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    f = FunctionSource.tabulated([0.0, 0.25, 1.0], [-1.0, 0.0, 2.0, 3.0], rng.normal(size=(3, 4)))
    path = tmp_path / "f.csv"
    write_tabulated_csv(path, f)
    g = read_tabulated_csv(path)
    np.testing.assert_array_equal(g.payload.values, f.payload.values)
    assert g.node_grids() == f.node_grids()


def test_csv_ragged_reports_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x\\y,0,1\n0,1,2\n1,3\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="line 3"):
        read_tabulated_csv(path)
