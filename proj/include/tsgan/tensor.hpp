// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tsgan {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

struct TensorImpl {
  Shape shape;
  std::vector<double> values;
  // Id of the tape this tensor is recorded on (0 = detached) and its node index there.
  std::uint64_t tape_id = 0;
  std::size_t node = 0;
};

}  // namespace detail

/// Dense row-major array of doubles.
///
/// A Tensor is a handle: copies share the same storage and tape attachment,
/// the way parameters are shared between a model and its optimizer. Use
/// clone() for an independent deep copy.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values);

  static Tensor zeros(Shape shape);
  static Tensor ones(Shape shape);
  static Tensor full(Shape shape, double value);
  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  bool defined() const noexcept { return impl_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> values() const;
  /// Writable view. Mutating a tensor that is recorded on a live tape
  /// invalidates that tape's saved intermediates.
  std::span<double> mutable_values();
  std::vector<double> to_vector() const;

  /// Value of a one-element tensor.
  double item() const;
  double operator[](std::size_t flat_index) const;

  /// True when recorded on the tape that is currently active on this thread.
  bool attached() const;
  /// Same values, new storage, no tape attachment.
  Tensor detach() const;
  Tensor clone() const { return detach(); }

  bool same_storage(const Tensor& other) const noexcept { return impl_ == other.impl_; }
  bool bitwise_equal(const Tensor& other) const;

  const std::shared_ptr<detail::TensorImpl>& impl() const { return impl_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}
  const detail::TensorImpl& checked() const;

  std::shared_ptr<detail::TensorImpl> impl_;

  friend class Tape;
  friend Tensor detail_wrap(std::shared_ptr<detail::TensorImpl>);
};

Tensor detail_wrap(std::shared_ptr<detail::TensorImpl> impl);

}  // namespace tsgan
