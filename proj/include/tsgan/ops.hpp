// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsgan/tensor.hpp"

// Differentiable tensor primitives. Every op records itself on the active
// tape when one of its inputs is attached to it.
//
// Binary ops accept equal shapes, or a one-element operand that is broadcast
// against the other. Anything else raises ShapeError; layer code reshapes and
// calls expand() explicitly.

namespace tsgan {

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
/// Throws DomainError on a zero divisor.
Tensor div(const Tensor& a, const Tensor& b);

Tensor neg(const Tensor& a);
Tensor add_scalar(const Tensor& a, double c);
Tensor mul_scalar(const Tensor& a, double c);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);
/// log(1 + x); throws DomainError unless every x > -1.
Tensor log1p(const Tensor& a);
Tensor square(const Tensor& a);
/// Throws DomainError for negative inputs. The derivative at 0 is taken as 0.
Tensor sqrt(const Tensor& a);
/// Derivative at 0 is taken as 0.
Tensor abs(const Tensor& a);
/// 1/x with 1/0 defined as 0.
Tensor safe_reciprocal(const Tensor& a);

enum class ElementwiseOp { Add, Sub, Mul, Div, Neg, Tanh, Sigmoid, Exp, Log1p, Square, Sqrt, Abs };

/// Dispatching form of the ops above; `b` is required for binary kinds only.
Tensor elementwise(ElementwiseOp op, const Tensor& a, const Tensor& b = {});

/// op(a) x op(b) for rank-2 operands, where op transposes when requested.
Tensor matmul(const Tensor& a, const Tensor& b, bool transpose_a = false, bool transpose_b = false);

/// Sums over `axes` (removed from the result). An empty axis list is the identity.
Tensor sum(const Tensor& a, std::span<const std::size_t> axes);
Tensor sum(const Tensor& a, std::initializer_list<std::size_t> axes);
/// Sum of all elements as a shape-{} tensor.
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a, std::span<const std::size_t> axes);
Tensor mean(const Tensor& a, std::initializer_list<std::size_t> axes);
Tensor mean(const Tensor& a);

enum class ReduceOp { Sum, Mean };
Tensor reduce(ReduceOp op, const Tensor& a, std::span<const std::size_t> axes);

Tensor reshape(const Tensor& a, Shape shape);
/// Repeats size-1 axes of `a` up to `shape`; ranks must match.
Tensor expand(const Tensor& a, Shape shape);
/// Contiguous range [start, start+length) along `axis`.
Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length);
/// Zero tensor of `shape` with `a` written at `start` along `axis`; inverse of slice.
Tensor pad_axis(const Tensor& a, Shape shape, std::size_t axis, std::size_t start);
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
/// Stacks equal-shaped tensors along a new axis.
Tensor stack(std::span<const Tensor> parts, std::size_t axis);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator-(const Tensor& a) { return neg(a); }
inline Tensor operator+(const Tensor& a, double c) { return add_scalar(a, c); }
inline Tensor operator-(const Tensor& a, double c) { return add_scalar(a, -c); }
inline Tensor operator*(const Tensor& a, double c) { return mul_scalar(a, c); }
inline Tensor operator*(double c, const Tensor& a) { return mul_scalar(a, c); }

}  // namespace tsgan
