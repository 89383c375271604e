// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include "tsgan/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "tsgan/autodiff.hpp"
#include "tsgan/errors.hpp"

namespace tsgan {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Grads = std::vector<Tensor>;

Tensor sum_to(const Tensor& g, const Shape& shape) {
  if (g.shape() == shape) return g;
  return reshape(sum(g), shape);
}

Shape broadcast_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return a.shape();
  if (b.numel() == 1 && (a.numel() != 1 || a.rank() >= b.rank())) return a.shape();
  if (a.numel() == 1) return b.shape();
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a.shape()) + " and " +
                   shape_str(b.shape()));
}

template <class F>
std::vector<double> binary_values(const Tensor& a, const Tensor& b, std::size_t n, F f) {
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(n);
  if (av.size() == n && bv.size() == n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i], bv[i]);
  } else if (bv.size() == 1) {
    const double y = bv[0];
    for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i], y);
  } else {
    const double x = av[0];
    for (std::size_t i = 0; i < n; ++i) out[i] = f(x, bv[i]);
  }
  return out;
}

template <class F>
std::vector<double> unary_values(const Tensor& a, F f) {
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  return out;
}

Tensor recorded(const char* kind, std::vector<Tensor> inputs, Shape shape, std::vector<double> values,
                BackwardFn fn) {
  Tensor out(std::move(shape), std::move(values));
  Tape::record(kind, std::move(inputs), out, std::move(fn));
  return out;
}

std::vector<std::size_t> checked_axes(const Tensor& a, std::span<const std::size_t> axes) {
  std::vector<std::size_t> sorted(axes.begin(), axes.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ShapeError("duplicate reduction axis");
  }
  if (!sorted.empty() && sorted.back() >= a.rank()) {
    throw ShapeError("reduction axis " + std::to_string(sorted.back()) + " invalid for shape " +
                     shape_str(a.shape()));
  }
  return sorted;
}

// Row-major strides of `shape`.
std::vector<std::size_t> strides_of(const Shape& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) strides[i - 1] = strides[i] * shape[i];
  return strides;
}

}  // namespace

// ---------------------------------------------------------------------------
// Binary elementwise

Tensor add(const Tensor& a, const Tensor& b) {
  Shape shape = broadcast_shape(a, b, "add");
  auto v = binary_values(a, b, shape_numel(shape), [](double x, double y) { return x + y; });
  return recorded("add", {a, b}, std::move(shape), std::move(v),
                  [](const Tensor& g, const Grads& in, const Tensor&, const std::vector<bool>& need) {
                    Grads r(2);
                    if (need[0]) r[0] = sum_to(g, in[0].shape());
                    if (need[1]) r[1] = sum_to(g, in[1].shape());
                    return r;
                  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  Shape shape = broadcast_shape(a, b, "sub");
  auto v = binary_values(a, b, shape_numel(shape), [](double x, double y) { return x - y; });
  return recorded("sub", {a, b}, std::move(shape), std::move(v),
                  [](const Tensor& g, const Grads& in, const Tensor&, const std::vector<bool>& need) {
                    Grads r(2);
                    if (need[0]) r[0] = sum_to(g, in[0].shape());
                    if (need[1]) r[1] = sum_to(neg(g), in[1].shape());
                    return r;
                  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  Shape shape = broadcast_shape(a, b, "mul");
  auto v = binary_values(a, b, shape_numel(shape), [](double x, double y) { return x * y; });
  return recorded("mul", {a, b}, std::move(shape), std::move(v),
                  [](const Tensor& g, const Grads& in, const Tensor&, const std::vector<bool>& need) {
                    Grads r(2);
                    if (need[0]) r[0] = sum_to(mul(g, in[1]), in[0].shape());
                    if (need[1]) r[1] = sum_to(mul(g, in[0]), in[1].shape());
                    return r;
                  });
}

Tensor div(const Tensor& a, const Tensor& b) {
  Shape shape = broadcast_shape(a, b, "div");
  for (double y : b.values()) {
    if (y == 0.0) throw DomainError("div: zero divisor");
  }
  auto v = binary_values(a, b, shape_numel(shape), [](double x, double y) { return x / y; });
  return recorded("div", {a, b}, std::move(shape), std::move(v),
                  [](const Tensor& g, const Grads& in, const Tensor& out, const std::vector<bool>& need) {
                    Grads r(2);
                    if (need[0]) r[0] = sum_to(div(g, in[1]), in[0].shape());
                    if (need[1]) r[1] = sum_to(neg(div(mul(g, out), in[1])), in[1].shape());
                    return r;
                  });
}

// ---------------------------------------------------------------------------
// Unary elementwise

Tensor neg(const Tensor& a) {
  return recorded("neg", {a}, a.shape(), unary_values(a, [](double x) { return -x; }),
                  [](const Tensor& g, const Grads&, const Tensor&, const std::vector<bool>&) {
                    return Grads{neg(g)};
                  });
}

Tensor add_scalar(const Tensor& a, double c) {
  return recorded("add_scalar", {a}, a.shape(), unary_values(a, [c](double x) { return x + c; }),
                  [](const Tensor& g, const Grads&, const Tensor&, const std::vector<bool>&) {
                    return Grads{g};
                  });
}

Tensor mul_scalar(const Tensor& a, double c) {
  return recorded("mul_scalar", {a}, a.shape(), unary_values(a, [c](double x) { return x * c; }),
                  [c](const Tensor& g, const Grads&, const Tensor&, const std::vector<bool>&) {
                    return Grads{mul_scalar(g, c)};
                  });
}

Tensor tanh(const Tensor& a) {
  return recorded("tanh", {a}, a.shape(), unary_values(a, [](double x) { return std::tanh(x); }),
                  [](const Tensor& g, const Grads&, const Tensor& out, const std::vector<bool>&) {
                    return Grads{mul(g, add_scalar(neg(square(out)), 1.0))};
                  });
}

Tensor sigmoid(const Tensor& a) {
  auto v = unary_values(a, [](double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return recorded("sigmoid", {a}, a.shape(), std::move(v),
                  [](const Tensor& g, const Grads&, const Tensor& out, const std::vector<bool>&) {
                    return Grads{mul(mul(g, out), add_scalar(neg(out), 1.0))};
                  });
}

Tensor exp(const Tensor& a) {
  return recorded("exp", {a}, a.shape(), unary_values(a, [](double x) { return std::exp(x); }),
                  [](const Tensor& g, const Grads&, const Tensor& out, const std::vector<bool>&) {
                    return Grads{mul(g, out)};
                  });
}

Tensor log1p(const Tensor& a) {
  for (double x : a.values()) {
    if (!(x > -1.0)) throw DomainError("log1p: input must be > -1, got " + std::to_string(x));
  }
  return recorded("log1p", {a}, a.shape(), unary_values(a, [](double x) { return std::log1p(x); }),
                  [](const Tensor& g, const Grads& in, const Tensor&, const std::vector<bool>&) {
                    return Grads{div(g, add_scalar(in[0], 1.0))};
                  });
}

Tensor square(const Tensor& a) {
  return recorded("square", {a}, a.shape(), unary_values(a, [](double x) { return x * x; }),
                  [](const Tensor& g, const Grads& in, const Tensor&, const std::vector<bool>&) {
                    return Grads{mul(g, mul_scalar(in[0], 2.0))};
                  });
}

Tensor sqrt(const Tensor& a) {
  for (double x : a.values()) {
    if (x < 0.0) throw DomainError("sqrt: negative input " + std::to_string(x));
  }
  return recorded("sqrt", {a}, a.shape(), unary_values(a, [](double x) { return std::sqrt(x); }),
                  [](const Tensor& g, const Grads&, const Tensor& out, const std::vector<bool>&) {
                    return Grads{mul(mul_scalar(g, 0.5), safe_reciprocal(out))};
                  });
}

Tensor abs(const Tensor& a) {
  return recorded("abs", {a}, a.shape(), unary_values(a, [](double x) { return std::abs(x); }),
                  [](const Tensor& g, const Grads& in, const Tensor&, const std::vector<bool>&) {
                    Tensor sign(in[0].shape(), unary_values(in[0], [](double x) {
                                  return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
                                }));
                    return Grads{mul(g, sign)};
                  });
}

Tensor safe_reciprocal(const Tensor& a) {
  return recorded("safe_reciprocal", {a}, a.shape(),
                  unary_values(a, [](double x) { return x == 0.0 ? 0.0 : 1.0 / x; }),
                  [](const Tensor& g, const Grads&, const Tensor& out, const std::vector<bool>&) {
                    return Grads{neg(mul(g, square(out)))};
                  });
}

Tensor elementwise(ElementwiseOp op, const Tensor& a, const Tensor& b) {
  auto need_b = [&]() -> const Tensor& {
    if (!b.defined()) throw ContractError("binary elementwise op needs a second operand");
    return b;
  };
  switch (op) {
    case ElementwiseOp::Add: return add(a, need_b());
    case ElementwiseOp::Sub: return sub(a, need_b());
    case ElementwiseOp::Mul: return mul(a, need_b());
    case ElementwiseOp::Div: return div(a, need_b());
    case ElementwiseOp::Neg: return neg(a);
    case ElementwiseOp::Tanh: return tanh(a);
    case ElementwiseOp::Sigmoid: return sigmoid(a);
    case ElementwiseOp::Exp: return exp(a);
    case ElementwiseOp::Log1p: return log1p(a);
    case ElementwiseOp::Square: return square(a);
    case ElementwiseOp::Sqrt: return sqrt(a);
    case ElementwiseOp::Abs: return abs(a);
  }
  throw ContractError("unknown elementwise op");
}

// ---------------------------------------------------------------------------
// Linear algebra

Tensor matmul(const Tensor& a, const Tensor& b, bool transpose_a, bool transpose_b) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw ShapeError("matmul needs rank-2 operands, got " + shape_str(a.shape()) + " and " +
                     shape_str(b.shape()));
  }
  const std::size_t m = transpose_a ? a.dim(1) : a.dim(0);
  const std::size_t k = transpose_a ? a.dim(0) : a.dim(1);
  const std::size_t kb = transpose_b ? b.dim(1) : b.dim(0);
  const std::size_t n = transpose_b ? b.dim(0) : b.dim(1);
  if (k != kb) {
    throw ShapeError("matmul inner dimensions differ: " + shape_str(a.shape()) + " x " +
                     shape_str(b.shape()));
  }
  std::vector<double> out(m * n);
  {
    Eigen::Map<const RowMatrix> A(a.values().data(), a.dim(0), a.dim(1));
    Eigen::Map<const RowMatrix> B(b.values().data(), b.dim(0), b.dim(1));
    Eigen::Map<RowMatrix> C(out.data(), m, n);
    if (!transpose_a && !transpose_b) {
      C.noalias() = A * B;
    } else if (!transpose_a) {
      C.noalias() = A * B.transpose();
    } else if (!transpose_b) {
      C.noalias() = A.transpose() * B;
    } else {
      C.noalias() = A.transpose() * B.transpose();
    }
  }
  return recorded(
      "matmul", {a, b}, {m, n}, std::move(out),
      [transpose_a, transpose_b](const Tensor& g, const Grads& in, const Tensor&,
                                 const std::vector<bool>& need) {
        const Tensor& A = in[0];
        const Tensor& B = in[1];
        Grads r(2);
        if (!transpose_a && !transpose_b) {
          if (need[0]) r[0] = matmul(g, B, false, true);
          if (need[1]) r[1] = matmul(A, g, true, false);
        } else if (!transpose_a) {
          if (need[0]) r[0] = matmul(g, B, false, false);
          if (need[1]) r[1] = matmul(g, A, true, false);
        } else if (!transpose_b) {
          if (need[0]) r[0] = matmul(B, g, false, true);
          if (need[1]) r[1] = matmul(A, g, false, false);
        } else {
          if (need[0]) r[0] = matmul(B, g, true, true);
          if (need[1]) r[1] = matmul(g, A, true, true);
        }
        return r;
      });
}

// ---------------------------------------------------------------------------
// Reductions

Tensor sum(const Tensor& a, std::span<const std::size_t> axes) {
  const auto sorted = checked_axes(a, axes);
  if (sorted.empty()) return a;
  const Shape& in_shape = a.shape();
  std::vector<bool> reduced(in_shape.size(), false);
  for (auto ax : sorted) reduced[ax] = true;
  Shape out_shape;
  Shape keep_shape = in_shape;
  for (std::size_t i = 0; i < in_shape.size(); ++i) {
    if (reduced[i]) {
      keep_shape[i] = 1;
    } else {
      out_shape.push_back(in_shape[i]);
    }
  }
  // Output stride per input axis (0 along reduced axes).
  const auto keep_strides = strides_of(keep_shape);
  std::vector<std::size_t> out_stride(in_shape.size());
  for (std::size_t i = 0; i < in_shape.size(); ++i) out_stride[i] = reduced[i] ? 0 : keep_strides[i];

  const auto av = a.values();
  std::vector<double> out(shape_numel(out_shape), 0.0);
  const bool contiguous = sorted.back() - sorted.front() + 1 == sorted.size();
  if (out.size() == 1) {
    double s = 0.0;
    for (double x : av) s += x;
    out[0] = s;
  } else if (contiguous) {
    // View as (outer, reduced, inner) and sum the middle axis.
    std::size_t outer = 1, red = 1, inner = 1;
    for (std::size_t i = 0; i < in_shape.size(); ++i) {
      if (i < sorted.front()) {
        outer *= in_shape[i];
      } else if (i <= sorted.back()) {
        red *= in_shape[i];
      } else {
        inner *= in_shape[i];
      }
    }
    for (std::size_t o = 0; o < outer; ++o) {
      double* dst = out.data() + o * inner;
      const double* src = av.data() + o * red * inner;
      for (std::size_t r = 0; r < red; ++r, src += inner) {
        for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
      }
    }
  } else {
    std::vector<std::size_t> index(in_shape.size(), 0);
    std::size_t offset = 0;
    for (std::size_t flat = 0; flat < av.size(); ++flat) {
      out[offset] += av[flat];
      for (std::size_t d = in_shape.size(); d-- > 0;) {
        if (++index[d] < in_shape[d]) {
          offset += out_stride[d];
          break;
        }
        offset -= out_stride[d] * (in_shape[d] - 1);
        index[d] = 0;
      }
    }
  }
  return recorded("sum", {a}, std::move(out_shape), std::move(out),
                  [keep_shape](const Tensor& g, const Grads& in, const Tensor&, const std::vector<bool>&) {
                    return Grads{expand(reshape(g, keep_shape), in[0].shape())};
                  });
}

Tensor sum(const Tensor& a, std::initializer_list<std::size_t> axes) {
  return sum(a, std::span<const std::size_t>(axes.begin(), axes.size()));
}

Tensor sum(const Tensor& a) {
  std::vector<std::size_t> all(a.rank());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  if (all.empty()) return a;
  return sum(a, all);
}

Tensor mean(const Tensor& a, std::span<const std::size_t> axes) {
  const auto sorted = checked_axes(a, axes);
  if (sorted.empty()) return a;
  std::size_t count = 1;
  for (auto ax : sorted) count *= a.dim(ax);
  if (count == 0) throw ShapeError("mean over an empty axis");
  return div(sum(a, sorted), Tensor::scalar(static_cast<double>(count)));
}

Tensor mean(const Tensor& a, std::initializer_list<std::size_t> axes) {
  return mean(a, std::span<const std::size_t>(axes.begin(), axes.size()));
}

Tensor mean(const Tensor& a) {
  std::vector<std::size_t> all(a.rank());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  if (all.empty()) return a;
  return mean(a, all);
}

Tensor reduce(ReduceOp op, const Tensor& a, std::span<const std::size_t> axes) {
  return op == ReduceOp::Sum ? sum(a, axes) : mean(a, axes);
}

// ---------------------------------------------------------------------------
// Shape manipulation

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw ShapeError("cannot reshape " + shape_str(a.shape()) + " to " + shape_str(shape));
  }
  if (shape == a.shape()) return a;
  return recorded("reshape", {a}, std::move(shape), a.to_vector(),
                  [](const Tensor& g, const Grads& in, const Tensor&, const std::vector<bool>&) {
                    return Grads{reshape(g, in[0].shape())};
                  });
}

Tensor expand(const Tensor& a, Shape shape) {
  const Shape& src = a.shape();
  if (src.size() != shape.size()) {
    throw ShapeError("expand: rank mismatch " + shape_str(src) + " -> " + shape_str(shape));
  }
  std::vector<std::size_t> expanded_axes;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] == shape[i]) continue;
    if (src[i] != 1) {
      throw ShapeError("expand: cannot broadcast " + shape_str(src) + " to " + shape_str(shape));
    }
    expanded_axes.push_back(i);
  }
  if (expanded_axes.empty()) return a;

  const auto av = a.values();
  std::vector<double> out(shape_numel(shape));
  if (expanded_axes.back() - expanded_axes.front() + 1 == expanded_axes.size()) {
    // View as (outer, 1, inner) -> (outer, rep, inner).
    std::size_t outer = 1, rep = 1, inner = 1;
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i < expanded_axes.front()) {
        outer *= shape[i];
      } else if (i <= expanded_axes.back()) {
        rep *= shape[i];
      } else {
        inner *= shape[i];
      }
    }
    double* dst = out.data();
    for (std::size_t o = 0; o < outer; ++o) {
      const double* src = av.data() + o * inner;
      for (std::size_t r = 0; r < rep; ++r, dst += inner) std::copy(src, src + inner, dst);
    }
  } else {
    auto src_strides = strides_of(src);
    for (auto ax : expanded_axes) src_strides[ax] = 0;
    std::vector<std::size_t> index(shape.size(), 0);
    std::size_t offset = 0;
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
      out[flat] = av[offset];
      for (std::size_t d = shape.size(); d-- > 0;) {
        if (++index[d] < shape[d]) {
          offset += src_strides[d];
          break;
        }
        offset -= src_strides[d] * (shape[d] - 1);
        index[d] = 0;
      }
    }
  }
  return recorded("expand", {a}, std::move(shape), std::move(out),
                  [expanded_axes](const Tensor& g, const Grads& in, const Tensor&, const std::vector<bool>&) {
                    return Grads{reshape(sum(g, expanded_axes), in[0].shape())};
                  });
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length) {
  const Shape& shape = a.shape();
  if (axis >= shape.size() || start + length > shape[axis]) {
    throw ShapeError("slice [" + std::to_string(start) + ", " + std::to_string(start + length) +
                     ") on axis " + std::to_string(axis) + " out of range for " + shape_str(shape));
  }
  std::size_t outer = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  Shape out_shape = shape;
  out_shape[axis] = length;
  const auto av = a.values();
  std::vector<double> out(outer * length * inner);
  const std::size_t chunk = length * inner;
  for (std::size_t o = 0; o < outer; ++o) {
    const double* from = av.data() + (o * shape[axis] + start) * inner;
    std::copy(from, from + chunk, out.begin() + static_cast<std::ptrdiff_t>(o * chunk));
  }
  return recorded("slice", {a}, std::move(out_shape), std::move(out),
                  [axis, start](const Tensor& g, const Grads& in, const Tensor&, const std::vector<bool>&) {
                    return Grads{pad_axis(g, in[0].shape(), axis, start)};
                  });
}

Tensor pad_axis(const Tensor& a, Shape shape, std::size_t axis, std::size_t start) {
  const Shape& src = a.shape();
  bool ok = src.size() == shape.size() && axis < shape.size() && start + src[axis] <= shape[axis];
  for (std::size_t i = 0; ok && i < shape.size(); ++i) {
    if (i != axis && src[i] != shape[i]) ok = false;
  }
  if (!ok) {
    throw ShapeError("pad_axis: cannot place " + shape_str(src) + " into " + shape_str(shape));
  }
  std::size_t outer = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  const auto av = a.values();
  std::vector<double> out(shape_numel(shape), 0.0);
  const std::size_t chunk = src[axis] * inner;
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy(av.begin() + static_cast<std::ptrdiff_t>(o * chunk),
              av.begin() + static_cast<std::ptrdiff_t>((o + 1) * chunk),
              out.begin() + static_cast<std::ptrdiff_t>((o * shape[axis] + start) * inner));
  }
  return recorded("pad_axis", {a}, std::move(shape), std::move(out),
                  [axis, start](const Tensor& g, const Grads& in, const Tensor&, const std::vector<bool>&) {
                    return Grads{slice(g, axis, start, in[0].dim(axis))};
                  });
}

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat of zero tensors");
  const Shape& first = parts[0].shape();
  if (axis >= first.size()) throw ShapeError("concat axis out of range");
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == first.size();
    for (std::size_t i = 0; ok && i < s.size(); ++i) {
      if (i != axis && s[i] != first[i]) ok = false;
    }
    if (!ok) throw ShapeError("concat: incompatible shape " + shape_str(s) + " vs " + shape_str(first));
    out_shape[axis] += s[axis];
  }
  std::size_t outer = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= first[i];
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < first.size(); ++i) inner *= first[i];

  std::vector<double> out(shape_numel(out_shape));
  std::size_t column = 0;
  for (const auto& p : parts) {
    const auto pv = p.values();
    const std::size_t chunk = p.dim(axis) * inner;
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy(pv.begin() + static_cast<std::ptrdiff_t>(o * chunk),
                pv.begin() + static_cast<std::ptrdiff_t>((o + 1) * chunk),
                out.begin() + static_cast<std::ptrdiff_t>((o * out_shape[axis] + column) * inner));
    }
    column += p.dim(axis);
  }
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return recorded("concat", std::move(inputs), std::move(out_shape), std::move(out),
                  [axis](const Tensor& g, const Grads& in, const Tensor&, const std::vector<bool>& need) {
                    Grads r(in.size());
                    std::size_t start = 0;
                    for (std::size_t k = 0; k < in.size(); ++k) {
                      const std::size_t len = in[k].dim(axis);
                      if (need[k]) r[k] = slice(g, axis, start, len);
                      start += len;
                    }
                    return r;
                  });
}

Tensor stack(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("stack of zero tensors");
  if (axis > parts[0].rank()) throw ShapeError("stack axis out of range");
  std::vector<Tensor> lifted;
  lifted.reserve(parts.size());
  for (const auto& p : parts) {
    if (p.shape() != parts[0].shape()) {
      throw ShapeError("stack: shapes differ " + shape_str(p.shape()) + " vs " + shape_str(parts[0].shape()));
    }
    Shape s = p.shape();
    s.insert(s.begin() + static_cast<std::ptrdiff_t>(axis), 1);
    lifted.push_back(reshape(p, std::move(s)));
  }
  return concat(lifted, axis);
}

}  // namespace tsgan
