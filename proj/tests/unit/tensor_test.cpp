// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tsgan/errors.hpp"
#include "tsgan/ops.hpp"
#include "tsgan/random.hpp"

namespace tsgan {
namespace {

using ::testing::ElementsAre;
using ::testing::ElementsAreArray;

TEST(TensorTest, ConstructionChecksElementCount) {
  EXPECT_THROW(Tensor({2, 2}, {1.0, 2.0, 3.0}), ShapeError);
  Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.numel(), 6u);
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(Tensor::scalar(3.5).item(), 3.5);
  EXPECT_THROW(t.item(), ShapeError);
}

TEST(TensorTest, CopiesShareStorageCloneDoesNot) {
  Tensor a = Tensor::vector({1, 2});
  Tensor b = a;
  Tensor c = a.clone();
  a.mutable_values()[0] = 7;
  EXPECT_EQ(b[0], 7);
  EXPECT_EQ(c[0], 1);
}

TEST(TensorTest, UndefinedTensorThrowsOnUse) {
  Tensor t;
  EXPECT_FALSE(t.defined());
  EXPECT_THROW(t.shape(), ContractError);
}

TEST(ElementwiseTest, Examples) {
  EXPECT_THAT(add(Tensor::vector({1, 2}), Tensor::vector({3, 4})).to_vector(), ElementsAre(4, 6));
  EXPECT_THAT(tanh(Tensor::vector({0})).to_vector(), ElementsAre(0));
  EXPECT_THAT(sigmoid(Tensor::vector({0})).to_vector(), ElementsAre(0.5));
  EXPECT_THAT(elementwise(ElementwiseOp::Mul, Tensor::vector({2, 3}), Tensor::scalar(2)).to_vector(),
              ElementsAre(4, 6));
  EXPECT_THAT(log1p(Tensor::vector({0, std::numbers::e - 1})).to_vector(), ElementsAre(0, 1));
}

TEST(ElementwiseTest, ScalarBroadcastEitherSide) {
  EXPECT_THAT(sub(Tensor::scalar(10), Tensor::vector({1, 2})).to_vector(), ElementsAre(9, 8));
  EXPECT_THAT(div(Tensor::vector({2, 4}), Tensor::vector({2})).to_vector(), ElementsAre(1, 2));
}

TEST(ElementwiseTest, ShapeMismatchIsShapeError) {
  EXPECT_THROW(add(Tensor::vector({1, 2}), Tensor::vector({1, 2, 3})), ShapeError);
  EXPECT_THROW(mul(Tensor::zeros({2, 3}), Tensor::zeros({3, 2})), ShapeError);
  EXPECT_THROW(elementwise(ElementwiseOp::Add, Tensor::vector({1})), ContractError);
}

TEST(ElementwiseTest, DomainViolations) {
  EXPECT_THROW(log1p(Tensor::vector({-1.0})), DomainError);
  EXPECT_THROW(log1p(Tensor::vector({-3.0})), DomainError);
  EXPECT_THROW(sqrt(Tensor::vector({-0.1})), DomainError);
  EXPECT_THROW(div(Tensor::vector({1.0}), Tensor::vector({0.0})), DomainError);
}

TEST(ElementwiseTest, SigmoidIsFiniteForLargeInputs) {
  const auto v = sigmoid(Tensor::vector({-800, 800})).to_vector();
  EXPECT_EQ(v[0], 0.0);
  EXPECT_EQ(v[1], 1.0);
}

TEST(MatmulTest, Examples) {
  const Tensor a = Tensor::matrix(2, 2, {1, 2, 3, 4});
  const Tensor eye = Tensor::matrix(2, 2, {1, 0, 0, 1});
  EXPECT_TRUE(matmul(a, eye).bitwise_equal(a));
  EXPECT_THAT(matmul(Tensor::matrix(1, 2, {1, 2}), Tensor::matrix(2, 1, {3, 4})).to_vector(), ElementsAre(11));
  Rng rng(3);
  const Tensor z = matmul(Tensor::zeros({2, 3}), uniform_tensor({3, 5}, -1, 1, rng));
  EXPECT_EQ(z.shape(), (Shape{2, 5}));
  EXPECT_THAT(z.to_vector(), ::testing::Each(0.0));
}

TEST(MatmulTest, TransposeFlags) {
  const Tensor a = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
  const Tensor b = Tensor::matrix(2, 3, {1, 0, 1, 0, 1, 0});
  // a * b^T
  EXPECT_THAT(matmul(a, b, false, true).to_vector(), ElementsAre(4, 2, 10, 5));
  // a^T * b
  EXPECT_THAT(matmul(a, b, true, false).to_vector(), ElementsAre(1, 4, 1, 2, 5, 2, 3, 6, 3));
  EXPECT_THROW(matmul(a, b), ShapeError);
  EXPECT_THROW(matmul(Tensor::vector({1, 2}), b), ShapeError);
}

TEST(ReduceTest, Examples) {
  EXPECT_EQ(mean(Tensor::vector({2, 4, 6})).item(), 4.0);
  const Tensor m = Tensor::matrix(2, 2, {1, 2, 3, 4});
  EXPECT_TRUE(sum(m, std::span<const std::size_t>{}).bitwise_equal(m));
  EXPECT_THAT(sum(m, {0}).to_vector(), ElementsAre(4, 6));
  EXPECT_THAT(sum(m, {1}).to_vector(), ElementsAre(3, 7));
  EXPECT_THAT(reduce(ReduceOp::Mean, m, std::vector<std::size_t>{0, 1}).to_vector(), ElementsAre(2.5));
}

TEST(ReduceTest, InvalidAxisIsShapeError) {
  EXPECT_THROW(sum(Tensor::zeros({2, 2}), {2}), ShapeError);
  EXPECT_THROW(sum(Tensor::zeros({2, 2}), {0, 0}), ShapeError);
}

TEST(ReduceTest, MiddleAxisOfRank3) {
  Tensor t({2, 3, 2}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  EXPECT_THAT(sum(t, {1}).to_vector(), ElementsAre(9, 12, 27, 30));
  EXPECT_THAT(sum(t, {0, 2}).to_vector(), ElementsAre(18, 26, 34));
}

TEST(ReduceTest, MeanEqualsSumOverCountForPowersOfTwo) {
  Rng rng(11);
  for (std::size_t n : {1u, 2u, 4u, 8u, 64u, 1024u}) {
    const Tensor x = uniform_tensor({n}, -2, 2, rng);
    EXPECT_EQ(mean(x).item(), sum(x).item() / static_cast<double>(n)) << n;
  }
}

TEST(ShapeOpsTest, SliceConcatStackExpand) {
  Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_THAT(slice(t, 1, 1, 2).to_vector(), ElementsAre(2, 3, 5, 6));
  EXPECT_THAT(slice(t, 0, 1, 1).to_vector(), ElementsAre(4, 5, 6));
  EXPECT_THROW(slice(t, 1, 2, 2), ShapeError);

  const Tensor parts[] = {slice(t, 1, 0, 1), slice(t, 1, 1, 2)};
  EXPECT_TRUE(concat(parts, 1).bitwise_equal(t));

  const Tensor rows[] = {Tensor::vector({1, 2}), Tensor::vector({3, 4})};
  EXPECT_EQ(stack(rows, 0).shape(), (Shape{2, 2}));
  EXPECT_THAT(stack(rows, 1).to_vector(), ElementsAre(1, 3, 2, 4));

  EXPECT_THAT(expand(Tensor({1, 2}, {7, 8}), {3, 2}).to_vector(), ElementsAre(7, 8, 7, 8, 7, 8));
  EXPECT_THAT(expand(Tensor({2, 1}, {7, 8}), {2, 3}).to_vector(), ElementsAre(7, 7, 7, 8, 8, 8));
  EXPECT_THROW(expand(Tensor({2, 2}, {1, 2, 3, 4}), {2, 3}), ShapeError);

  EXPECT_THAT(pad_axis(Tensor::vector({5}), {3}, 0, 1).to_vector(), ElementsAre(0, 5, 0));
  EXPECT_THROW(reshape(t, {4}), ShapeError);
}

}  // namespace
}  // namespace tsgan
