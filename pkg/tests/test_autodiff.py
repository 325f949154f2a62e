"""Gradient correctness of every tape operation against central differences."""

import numpy as np
import pytest

from repositioner.numerics import Var, concat, finite_diff_check, gather, stack
from repositioner.numerics.nn import derive_rng


def check(build, arrays, tol=1e-6):
    """Backprop `build` at `arrays` and compare against finite differences."""
    leaves = [Var(a, requires_grad=True) for a in arrays]
    out = build(leaves)
    out.backward()
    grads = [l.grad for l in leaves]

    def fn(point):
        return float(build([Var(p) for p in point]).value)

    assert finite_diff_check(fn, arrays, grads) <= tol


@pytest.mark.parametrize("seed", range(3))
def test_arithmetic_chain(seed):
    rng = derive_rng(seed, "adtest")
    a, b = rng.normal(size=(3, 4)), rng.normal(size=(3, 4)) + 3.0
    check(lambda v: ((v[0] * v[1] + v[0] / v[1] - v[1]) ** 2).sum(), [a, b])


def test_broadcasting_bias():
    rng = derive_rng(1, "adtest")
    x, b = rng.normal(size=(5, 3)), rng.normal(size=3)
    check(lambda v: ((v[0] + v[1]) ** 3).mean(), [x, b])


def test_matmul_vector_and_matrix():
    rng = derive_rng(2, "adtest")
    a, b, v = rng.normal(size=(4, 3)), rng.normal(size=(3, 2)), rng.normal(size=3)
    check(lambda vs: ((vs[0] @ vs[1]) ** 2).sum() + ((vs[0] @ vs[2]) ** 2).sum(), [a, b, v])


def test_nonlinearities():
    rng = derive_rng(3, "adtest")
    x = rng.normal(size=(4, 4))
    check(lambda v: (v[0].tanh().sum() + v[0].sigmoid().sum()
                     + v[0].softplus().sum() + (v[0] * 0.1).exp().sum()), [x])
    y = np.abs(rng.normal(size=6)) + 0.5
    check(lambda v: (v[0].log() + v[0].sqrt()).sum(), [y])


def test_trig():
    rng = derive_rng(4, "adtest")
    x = rng.normal(size=(3, 5))
    check(lambda v: (v[0].sin() ** 2 + v[0].cos()).sum(), [x])


def test_relu_and_abs_away_from_kink():
    rng = derive_rng(5, "adtest")
    x = rng.normal(size=(6, 2))
    x[np.abs(x) < 0.05] = 0.1
    check(lambda v: (v[0].relu() ** 2).sum() + v[0].abs().sum(), [x])


def test_reductions_and_reshape():
    rng = derive_rng(6, "adtest")
    x = rng.normal(size=(4, 6))
    check(lambda v: v[0].sum(axis=0).sigmoid().sum() + v[0].mean(axis=1).sum()
                    + v[0].reshape(8, 3).T.sum(axis=1).max(axis=0), [x])


def test_softmax_rows_sum_to_one_and_grads():
    rng = derive_rng(7, "adtest")
    x = rng.normal(size=(5, 4))
    s = Var(x).softmax(axis=1)
    np.testing.assert_allclose(s.value.sum(axis=1), 1.0, atol=1e-12)
    check(lambda v: (v[0].softmax(axis=1) * np.arange(4.0)).sum(), [x])


def test_max_pool_gradient():
    rng = derive_rng(8, "adtest")
    x = rng.normal(size=(7, 3))
    check(lambda v: (v[0].max(axis=0) ** 2).sum(), [x])


def test_gather_scatter_accumulates_repeats():
    rng = derive_rng(9, "adtest")
    table = rng.normal(size=(5, 3))
    idx = np.array([0, 2, 2, 4, 0])
    check(lambda v: (gather(v[0], idx) ** 2).sum(), [table])
    t = Var(table, requires_grad=True)
    (gather(t, idx).sum()).backward()
    expected = np.zeros((5, 3))
    np.add.at(expected, idx, 1.0)
    np.testing.assert_array_equal(t.grad, expected)


def test_gather_with_2d_index():
    rng = derive_rng(10, "adtest")
    table = rng.normal(size=(6, 2))
    idx = np.array([[0, 1, 2], [3, 3, 5]])
    check(lambda v: (gather(v[0], idx).sum(axis=1) ** 2).sum(), [table])


def test_concat_and_stack():
    rng = derive_rng(11, "adtest")
    a, b = rng.normal(size=(2, 3)), rng.normal(size=(2, 2))
    check(lambda v: (concat([v[0], v[1]], axis=1) ** 2).sum(), [a, b])
    c, d = rng.normal(size=4), rng.normal(size=4)
    check(lambda v: (stack([v[0], v[1]], axis=0).tanh()).sum(), [c, d])


def test_diamond_reuse_accumulates():
    x = Var(np.array([2.0, 3.0]), requires_grad=True)
    y = x * x + x * 4.0
    y.sum().backward()
    np.testing.assert_allclose(x.grad, 2 * x.value + 4.0)


def test_backward_requires_scalar():
    x = Var(np.ones((2, 2)), requires_grad=True)
    with pytest.raises(ValueError):
        (x * 2).backward()
