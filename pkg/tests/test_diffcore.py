"""Tests for tensors, primitives and reverse-mode accumulation."""

import numpy as np
import pytest

from acdgcl.diffcore import (
    NonFiniteError,
    ShapeError,
    Tape,
    TapeError,
    Tensor,
    active_tape,
    backward,
    finite_diff_check,
    no_tape,
    ops,
)


class TestTensor:
    """Tests for the immutable tensor type."""

    def test_data_is_read_only(self):
        """Tensor storage cannot be written through."""
        t = Tensor([1.0, 2.0])
        with pytest.raises(ValueError):
            t.data[0] = 5.0

    def test_copies_its_input(self):
        """Mutating the source array leaves the tensor unchanged."""
        source = np.array([1.0, 2.0])
        t = Tensor(source)
        source[0] = 9.0
        assert t.data[0] == 1.0

    def test_non_finite_values_rejected(self):
        """NaN and Inf are error states."""
        with pytest.raises(NonFiniteError):
            Tensor([1.0, np.nan])
        with pytest.raises(NonFiniteError):
            Tensor([np.inf])

    def test_item_requires_single_element(self):
        """item() works on one-element tensors only."""
        assert Tensor([[3.5]]).item() == 3.5
        with pytest.raises(ShapeError):
            Tensor([1.0, 2.0]).item()


class TestPrimitives:
    """Tests for forward values of the primitive set."""

    def test_matmul_identity(self):
        """Multiplying by the identity returns the input."""
        a = [[1.0, 2.0], [3.0, 4.0]]
        np.testing.assert_array_equal(ops.matmul(a, np.eye(2)).data, a)

    def test_matmul_shape_mismatch_names_shapes(self):
        """Non-conforming shapes raise an error naming both."""
        with pytest.raises(ShapeError, match=r"\(2, 3\).*\(2, 3\)"):
            ops.matmul(np.ones((2, 3)), np.ones((2, 3)))

    def test_relu(self):
        np.testing.assert_array_equal(ops.relu([-1.0, 0.0, 2.0]).data, [0.0, 0.0, 2.0])

    def test_segment_sum(self):
        """Rows are summed per segment id."""
        out = ops.segment_sum([1.0, 2.0, 3.0, 4.0], [0, 0, 1, 1], 2)
        np.testing.assert_array_equal(out.data, [3.0, 7.0])

    def test_segment_sum_matches_loop(self):
        """Segment sums of matrix rows equal a per-segment loop exactly."""
        rng = np.random.default_rng(3)
        values = rng.normal(size=(12, 4))
        ids = np.sort(rng.integers(0, 4, size=12))
        out = ops.segment_sum(values, ids, 4).data
        for s in range(4):
            expected = np.zeros(4)
            for row, seg in zip(values, ids):
                if seg == s:
                    expected = expected + row
            np.testing.assert_array_equal(out[s], expected)

    def test_segment_sum_empty_segment_is_zero(self):
        out = ops.segment_sum([1.0, 2.0], [0, 2], 3)
        np.testing.assert_array_equal(out.data, [1.0, 0.0, 2.0])

    def test_broadcast_mismatch(self):
        with pytest.raises(ShapeError):
            ops.add(np.ones((2, 3)), np.ones((4,)))

    def test_log_of_zero_is_non_finite(self):
        """Operations producing -inf raise instead of propagating."""
        with pytest.raises(NonFiniteError):
            ops.log([0.0, 1.0])

    def test_logsumexp_large_values(self):
        """Max-subtraction keeps large inputs finite."""
        out = ops.logsumexp(np.array([[1000.0, 1000.0]]), axis=1)
        np.testing.assert_allclose(out.data, [1000.0 + np.log(2.0)])

    def test_concat(self):
        out = ops.concat([np.ones((1, 2)), np.zeros((2, 2))], axis=0)
        assert out.shape == (3, 2)


class TestBackward:
    """Tests for gradient accumulation over the tape."""

    def test_sum_gradient(self):
        """d/dx sum(x) is all ones."""
        with Tape() as tape:
            x = tape.leaf("x", [1.0, 2.0, 3.0])
            loss = ops.sum(x)
        np.testing.assert_array_equal(backward(tape, loss)["x"], [1.0, 1.0, 1.0])

    def test_l2_norm_sq_gradient(self):
        """The gradient of ||x||^2 is 2x."""
        with Tape() as tape:
            x = tape.leaf("x", [1.0, -2.0])
            loss = ops.l2_norm_sq(x)
        np.testing.assert_array_equal(backward(tape, loss)["x"], [2.0, -4.0])

    def test_softmax_gradient(self):
        """log(exp(a) + exp(b)) at a = b = 0 has gradient one half each."""
        with Tape() as tape:
            a = tape.leaf("a", 0.0)
            b = tape.leaf("b", 0.0)
            loss = ops.log(ops.add(ops.exp(a), ops.exp(b)))
        grads = backward(tape, loss)
        assert grads["a"] == pytest.approx(0.5)
        assert grads["b"] == pytest.approx(0.5)

    def test_gradients_accumulate_over_consumers(self):
        """A tensor used twice receives the sum of both contributions."""
        with Tape() as tape:
            x = tape.leaf("x", [1.0, 3.0])
            loss = ops.sum(ops.add(ops.mul(x, x), x))
        np.testing.assert_array_equal(backward(tape, loss)["x"], [3.0, 7.0])

    def test_broadcast_gradient_reduces(self):
        """A bias broadcast over rows receives the row-summed gradient."""
        with Tape() as tape:
            x = tape.leaf("x", np.ones((2, 3)))
            b = tape.leaf("b", np.zeros(3))
            loss = ops.sum(ops.add(x, b))
        grads = backward(tape, loss)
        np.testing.assert_array_equal(grads["b"], [2.0, 2.0, 2.0])

    def test_take_rows_scatter_adds(self):
        """Gathered rows send their gradient back to the source rows."""
        with Tape() as tape:
            x = tape.leaf("x", np.ones((3, 2)))
            loss = ops.sum(ops.take_rows(x, [0, 0, 1]))
        np.testing.assert_array_equal(backward(tape, loss)["x"], [[2, 2], [1, 1], [0, 0]])

    def test_unreached_leaf_gets_zero(self):
        with Tape() as tape:
            x = tape.leaf("x", [1.0])
            tape.leaf("unused", [[1.0, 2.0]])
            loss = ops.sum(x)
        grads = backward(tape, loss)
        np.testing.assert_array_equal(grads["unused"], [[0.0, 0.0]])

    def test_non_scalar_loss_rejected(self):
        with Tape() as tape:
            x = tape.leaf("x", [1.0, 2.0])
            y = ops.mul(x, 2.0)
        with pytest.raises(TapeError, match="scalar"):
            backward(tape, y)

    def test_loss_from_other_tape_rejected(self):
        with Tape() as first:
            x = first.leaf("x", [1.0])
            loss = ops.sum(x)
        with Tape() as second:
            second.leaf("y", [1.0])
        with pytest.raises(TapeError):
            backward(second, loss)

    def test_leaf_registered_twice(self):
        with Tape() as tape:
            tape.leaf("x", [1.0])
            with pytest.raises(TapeError):
                tape.leaf("x", [2.0])


class TestTape:
    """Tests for tape recording, replay and nesting."""

    def test_records_in_topological_order(self):
        """Every entry's inputs are leaves, constants or earlier outputs."""
        with Tape() as tape:
            x = tape.leaf("x", [1.0, 2.0])
            ops.sum(ops.relu(ops.mul(x, x)))
        seen = {leaf.id for leaf in tape.leaves.values()}
        for entry in tape.entries:
            for t in entry.inputs:
                assert t.id in seen or not tape.contains(t)
            seen.add(entry.output.id)

    def test_replay_is_bit_identical(self):
        with Tape() as tape:
            x = tape.leaf("x", np.linspace(-1.0, 1.0, 6).reshape(2, 3))
            loss = ops.logsumexp(ops.matmul(x, ops.transpose(x)), axis=1)
        values = tape.replay()
        np.testing.assert_array_equal(values[loss.id], loss.data)

    def test_replay_with_override(self):
        with Tape() as tape:
            x = tape.leaf("x", [1.0, 2.0])
            loss = ops.sum(ops.mul(x, x))
        assert tape.replay({"x": [3.0, 0.0]})[loss.id] == 9.0

    def test_no_recording_outside_tape(self):
        assert active_tape() is None
        ops.add([1.0], [2.0])
        assert active_tape() is None

    def test_nested_tape_suspends_outer(self):
        """Operations inside an inner tape are not recorded on the outer one."""
        with Tape() as outer:
            x = outer.leaf("x", [1.0])
            with Tape() as inner:
                ops.add(x, 1.0)
            assert active_tape() is outer
            ops.mul(x, 2.0)
        assert len(inner.entries) == 1
        assert [e.op for e in outer.entries] == ["mul"]

    def test_no_tape_suspends_recording(self):
        with Tape() as tape:
            x = tape.leaf("x", [1.0])
            with no_tape():
                ops.add(x, 1.0)
        assert tape.entries == []

    def test_tape_cannot_be_entered_twice(self):
        tape = Tape()
        with tape:
            with pytest.raises(TapeError):
                tape.__enter__()


def _dims(rng, ndim, high=4):
    return tuple(int(n) for n in rng.integers(1, high, size=ndim))


def _operands_for(name, rng):
    """Random operands for one primitive and the call that applies it."""
    if name in ("add", "sub", "mul", "div"):
        shape = _dims(rng, int(rng.integers(1, 3)))
        # broadcast the second operand along the leading axes half the time
        b_shape = shape[-1:] if rng.random() < 0.5 else shape
        b = rng.uniform(1.0, 2.0, size=b_shape) if name == "div" else rng.normal(size=b_shape)
        op = getattr(ops, name)
        return {"a": rng.normal(size=shape), "b": b}, lambda p: op(p["a"], p["b"])
    if name == "scale":
        return {"a": rng.normal(size=_dims(rng, 2))}, lambda p: ops.scale(p["a"], -1.7)
    if name == "broadcast":
        rows, cols = _dims(rng, 2)
        return {"a": rng.normal(size=(1, cols))}, lambda p: ops.broadcast(p["a"], (rows, cols))
    if name in ("relu", "neg", "transpose"):
        op = getattr(ops, name)
        return {"a": rng.normal(size=_dims(rng, 2))}, lambda p: op(p["a"])
    if name == "exp":
        return {"a": rng.uniform(-1.0, 1.0, size=_dims(rng, 2))}, lambda p: ops.exp(p["a"])
    if name in ("log", "sqrt"):
        op = getattr(ops, name)
        return {"a": rng.uniform(1.0, 2.0, size=_dims(rng, 2))}, lambda p: op(p["a"])
    if name in ("sum", "mean"):
        op = getattr(ops, name)
        axis = [None, 0, 1][int(rng.integers(3))]
        keepdims = bool(rng.integers(2))
        return {"a": rng.normal(size=_dims(rng, 2))}, lambda p: op(p["a"], axis=axis, keepdims=keepdims)
    if name == "l2_norm_sq":
        axis = [None, 1][int(rng.integers(2))]
        return {"a": rng.normal(size=_dims(rng, 2))}, lambda p: ops.l2_norm_sq(p["a"], axis=axis)
    if name == "segment_sum":
        n, d = _dims(rng, 2, high=6)
        k = int(rng.integers(1, 4))
        ids = rng.integers(0, k, size=n)
        return {"a": rng.normal(size=(n, d))}, lambda p: ops.segment_sum(p["a"], ids, k)
    if name == "take_rows":
        n, d = _dims(rng, 2)
        index = rng.integers(0, n, size=int(rng.integers(1, 6)))
        return {"a": rng.normal(size=(n, d))}, lambda p: ops.take_rows(p["a"], index)
    if name == "matmul":
        m, k, n = _dims(rng, 3)
        operands = {"a": rng.normal(size=(m, k)), "b": rng.normal(size=(k, n))}
        return operands, lambda p: ops.matmul(p["a"], p["b"])
    if name == "concat":
        axis = int(rng.integers(2))
        rows, cols = _dims(rng, 2)
        other = (rows + 1, cols) if axis == 0 else (rows, cols + 2)
        operands = {"a": rng.normal(size=(rows, cols)), "b": rng.normal(size=other)}
        return operands, lambda p: ops.concat([p["a"], p["b"]], axis=axis)
    if name == "logsumexp":
        axis = int(rng.integers(2))
        return {"a": rng.normal(size=_dims(rng, 2))}, lambda p: ops.logsumexp(p["a"], axis=axis)
    raise AssertionError(f"no operands for {name}")


PRIMITIVES = [
    "add", "sub", "mul", "div", "scale", "broadcast", "relu", "neg", "transpose", "exp",
    "log", "sqrt", "sum", "mean", "l2_norm_sq", "segment_sum", "take_rows", "matmul",
    "concat", "logsumexp",
]


class TestPrimitiveGradients:
    """Every primitive's backward rule against central differences."""

    @pytest.mark.parametrize("name", PRIMITIVES)
    def test_matches_finite_differences(self, name):
        rng = np.random.default_rng(PRIMITIVES.index(name))
        for trial in range(100):
            operands, apply = _operands_for(name, rng)
            with no_tape():
                out_shape = apply({k: Tensor(v) for k, v in operands.items()}).shape
            # weights bounded away from zero keep every output coordinate in play
            weights = rng.uniform(0.5, 1.5, size=out_shape) * rng.choice([-1.0, 1.0], size=out_shape)

            def objective(p, apply=apply, weights=weights):
                return ops.sum(ops.mul(apply(p), weights))

            report = finite_diff_check(objective, operands, h=1e-5, tol=1e-6, abs_floor=1e-2, seed=trial)
            assert report.passed, f"{name} trial {trial}: {report.max_rel_error:.3e} at {report.worst}"

    def test_gradient_of_sum_is_sum_of_gradients(self):
        rng = np.random.default_rng(42)
        x0 = rng.normal(size=(4, 3))
        m = rng.normal(size=(3, 5))
        w = rng.normal(size=(4, 3))

        def first(x):
            return ops.sum(ops.mul(ops.exp(x), w))

        def second(x):
            return ops.l2_norm_sq(ops.matmul(ops.relu(x), m))

        grads = []
        for loss_fn in (first, second, lambda x: ops.add(first(x), second(x))):
            with Tape() as tape:
                loss = loss_fn(tape.leaf("x", x0))
            grads.append(backward(tape, loss)["x"])
        np.testing.assert_allclose(grads[2], grads[0] + grads[1], rtol=0.0, atol=1e-12)
