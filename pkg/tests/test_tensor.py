import numpy as np
import pytest

from lfmdfn.autodiff.tensor import Tensor, grad_enabled, no_grad


class TestConstruction:
    def test_integer_input_promoted_to_float32(self):
        t = Tensor([1, 2])
        assert t.data.dtype == np.float32
        assert not t.requires_grad
        assert t.grad is None

    def test_float64_preserved(self):
        t = Tensor(np.zeros(3, dtype=np.float64))
        assert t.data.dtype == np.float64

    def test_requires_grad_flag(self):
        assert Tensor(1.0, requires_grad=True).requires_grad


class TestArithmetic:
    def test_add_backward(self):
        a = Tensor(np.array([1.0, 2.0]), requires_grad=True)
        b = Tensor(np.array([3.0, 4.0]), requires_grad=True)
        (a + b).sum().backward()
        np.testing.assert_array_equal(a.grad, [1.0, 1.0])
        np.testing.assert_array_equal(b.grad, [1.0, 1.0])

    def test_mul_backward(self):
        a = Tensor(np.array([2.0, 3.0]), requires_grad=True)
        b = Tensor(np.array([5.0, 7.0]), requires_grad=True)
        (a * b).sum().backward()
        np.testing.assert_array_equal(a.grad, [5.0, 7.0])
        np.testing.assert_array_equal(b.grad, [2.0, 3.0])

    def test_self_addition_accumulates(self):
        x = Tensor(np.array([1.5]), requires_grad=True)
        (x + x).sum().backward()
        np.testing.assert_array_equal(x.grad, [2.0])

    def test_diamond_graph(self):
        # y = (x + x) * x; dy/dx = 4x
        x = Tensor(np.array([3.0]), requires_grad=True)
        ((x + x) * x).sum().backward()
        np.testing.assert_array_equal(x.grad, [12.0])

    def test_scalar_operand(self):
        x = Tensor(np.array([1.0, 2.0]), requires_grad=True)
        (x * 3.0 + 1.0).sum().backward()
        np.testing.assert_array_equal(x.grad, [3.0, 3.0])

    def test_sub_and_neg(self):
        a = Tensor(np.array([5.0]), requires_grad=True)
        b = Tensor(np.array([2.0]), requires_grad=True)
        (a - b).sum().backward()
        np.testing.assert_array_equal(a.grad, [1.0])
        np.testing.assert_array_equal(b.grad, [-1.0])
        c = Tensor(np.array([4.0]), requires_grad=True)
        (-c).sum().backward()
        np.testing.assert_array_equal(c.grad, [-1.0])


class TestShapes:
    def test_reshape_round_trip(self, rng):
        x = Tensor(rng.normal(size=(2, 6)).astype(np.float32), requires_grad=True)
        y = x.reshape(3, 4)
        assert y.data.shape == (3, 4)
        y.sum().backward()
        assert x.grad.shape == (2, 6)
        np.testing.assert_array_equal(x.grad, np.ones((2, 6), np.float32))

    def test_transpose_grad_is_inverse_permutation(self, rng):
        g = rng.normal(size=(4, 2, 3)).astype(np.float32)
        x = Tensor(rng.normal(size=(2, 3, 4)).astype(np.float32), requires_grad=True)
        y = x.transpose(2, 0, 1)
        (y * Tensor(g)).sum().backward()
        np.testing.assert_array_equal(x.grad, g.transpose(1, 2, 0))

    def test_mean_backward(self):
        x = Tensor(np.arange(6, dtype=np.float32), requires_grad=True)
        x.mean().backward()
        np.testing.assert_allclose(x.grad, np.full(6, 1 / 6), rtol=1e-6)


class TestBackwardProtocol:
    def test_nonscalar_backward_needs_seed(self):
        x = Tensor(np.zeros((2, 2)), requires_grad=True)
        with pytest.raises(ValueError):
            (x + x).backward()

    def test_explicit_seed(self):
        x = Tensor(np.ones((2, 2)), requires_grad=True)
        y = x * x
        seed = np.full((2, 2), 0.5, np.float64)
        y.backward(seed)
        np.testing.assert_array_equal(x.grad, np.ones((2, 2)))

    def test_grad_accumulates_across_calls(self):
        x = Tensor(np.array([1.0]), requires_grad=True)
        (x * 2.0).sum().backward()
        (x * 3.0).sum().backward()
        np.testing.assert_array_equal(x.grad, [5.0])

    def test_no_grad_blocks_graph(self):
        x = Tensor(np.array([1.0]), requires_grad=True)
        with no_grad():
            y = x * 2.0
        assert not y.requires_grad
        assert grad_enabled() is True

    def test_no_grad_restores_on_exception(self):
        with pytest.raises(RuntimeError):
            with no_grad():
                raise RuntimeError("boom")
        assert grad_enabled() is True

    def test_deep_chain_no_recursion_limit(self):
        x = Tensor(np.array([1.0]), requires_grad=True)
        y = x
        for _ in range(5000):
            y = y + 0.0
        y.sum().backward()
        np.testing.assert_array_equal(x.grad, [1.0])

    def test_constant_leaf_gets_no_grad(self):
        a = Tensor(np.array([1.0]), requires_grad=True)
        b = Tensor(np.array([2.0]))
        (a * b).sum().backward()
        assert b.grad is None
