// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include "tsgan/tensor.hpp"

#include <cstring>
#include <functional>
#include <numeric>
#include <sstream>

#include "tsgan/autodiff.hpp"
#include "tsgan/errors.hpp"

namespace tsgan {

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ')';
  return os.str();
}

Tensor detail_wrap(std::shared_ptr<detail::TensorImpl> impl) { return Tensor(std::move(impl)); }

Tensor::Tensor(Shape shape, std::vector<double> values) {
  if (shape_numel(shape) != values.size()) {
    throw ShapeError("tensor shape " + shape_str(shape) + " does not hold " +
                     std::to_string(values.size()) + " values");
  }
  impl_ = std::make_shared<detail::TensorImpl>();
  impl_->shape = std::move(shape);
  impl_->values = std::move(values);
}

Tensor Tensor::zeros(Shape shape) { return full(std::move(shape), 0.0); }
Tensor Tensor::ones(Shape shape) { return full(std::move(shape), 1.0); }

Tensor Tensor::full(Shape shape, double value) {
  const std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

const detail::TensorImpl& Tensor::checked() const {
  if (!impl_) throw ContractError("use of an undefined tensor");
  return *impl_;
}

const Shape& Tensor::shape() const { return checked().shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  const auto& s = shape();
  if (axis >= s.size()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_str(s));
  }
  return s[axis];
}

std::size_t Tensor::numel() const { return checked().values.size(); }

std::span<const double> Tensor::values() const { return checked().values; }

std::span<double> Tensor::mutable_values() {
  checked();
  return impl_->values;
}

std::vector<double> Tensor::to_vector() const { return checked().values; }

double Tensor::item() const {
  const auto& impl = checked();
  if (impl.values.size() != 1) {
    throw ShapeError("item() on tensor of shape " + shape_str(impl.shape));
  }
  return impl.values[0];
}

double Tensor::operator[](std::size_t flat_index) const { return checked().values.at(flat_index); }

bool Tensor::attached() const {
  const Tape* tape = Tape::active();
  return impl_ && tape && impl_->tape_id == tape->id();
}

Tensor Tensor::detach() const {
  const auto& impl = checked();
  return Tensor(impl.shape, impl.values);
}

bool Tensor::bitwise_equal(const Tensor& other) const {
  const auto& a = checked();
  const auto& b = other.checked();
  return a.shape == b.shape &&
         std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0;
}

}  // namespace tsgan
