// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include "tsgan/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "tsgan/autodiff.hpp"
#include "tsgan/ops.hpp"
#include "tsgan/random.hpp"

namespace tsgan {

double relative_error(double analytic, double numeric) {
  const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / scale;
}

namespace {

double evaluate(const ScalarFn& f, std::span<const Tensor> inputs) {
  Tape tape;
  tape.watch(inputs);
  return f(inputs).item();
}

}  // namespace

double max_gradient_error(const ScalarFn& f, std::span<const Tensor> inputs, double step) {
  std::vector<Tensor> work;
  work.reserve(inputs.size());
  for (const auto& t : inputs) work.push_back(t.clone());

  std::vector<Tensor> analytic;
  {
    Tape tape;
    tape.watch(work);
    const Tensor loss = f(work);
    analytic = backward(loss, work);
  }

  double worst = 0.0;
  for (std::size_t k = 0; k < work.size(); ++k) {
    auto values = work[k].mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + step;
      const double plus = evaluate(f, work);
      values[i] = original - step;
      const double minus = evaluate(f, work);
      values[i] = original;
      const double numeric = (plus - minus) / (2.0 * step);
      worst = std::max(worst, relative_error(analytic[k][i], numeric));
    }
  }
  return worst;
}

bool GradcheckReport::passed() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed(); });
}

double GradcheckReport::max_error() const {
  double worst = 0.0;
  for (const auto& r : results) worst = std::max(worst, r.max_rel_error);
  return worst;
}

namespace {

constexpr double kFirstOrderTolerance = 1e-5;
constexpr double kSecondOrderTolerance = 1e-4;

Shape random_shape(Rng& rng, std::size_t min_rank = 1, std::size_t max_rank = 3) {
  std::uniform_int_distribution<std::size_t> rank_dist(min_rank, max_rank);
  std::uniform_int_distribution<std::size_t> dim_dist(1, 5);
  Shape s(rank_dist(rng));
  for (auto& d : s) d = dim_dist(rng);
  return s;
}

// Entries in [-2, 2] pushed at least `gap` away from zero.
Tensor away_from_zero(Shape shape, double gap, Rng& rng) {
  Tensor t = uniform_tensor(std::move(shape), gap, 2.0, rng);
  std::bernoulli_distribution flip(0.5);
  for (auto& x : t.mutable_values()) {
    if (flip(rng)) x = -x;
  }
  return t;
}

// Weighted sum so every output element contributes a distinct gradient.
Tensor weighted(const Tensor& y, const Tensor& weights) { return sum(mul(y, weights)); }

struct OpCase {
  const char* name;
  std::function<void(Rng&, std::vector<Tensor>&, ScalarFn&)> build;
};

std::vector<OpCase> primitive_cases() {
  auto unary = [](const char* name, Tensor (*op)(const Tensor&), double lo, double hi) {
    return OpCase{name, [op, lo, hi](Rng& rng, std::vector<Tensor>& in, ScalarFn& f) {
                    Shape s = random_shape(rng);
                    in = {uniform_tensor(s, lo, hi, rng)};
                    Tensor w = uniform_tensor(s, -2.0, 2.0, rng);
                    f = [op, w](std::span<const Tensor> x) { return weighted(op(x[0]), w); };
                  }};
  };
  auto binary = [](const char* name, Tensor (*op)(const Tensor&, const Tensor&), bool scalar_b,
                   bool nonzero_b) {
    return OpCase{name, [=](Rng& rng, std::vector<Tensor>& in, ScalarFn& f) {
                    Shape s = random_shape(rng);
                    Shape sb = scalar_b ? Shape{} : s;
                    Tensor b = nonzero_b ? away_from_zero(sb, 0.5, rng) : uniform_tensor(sb, -2.0, 2.0, rng);
                    in = {uniform_tensor(s, -2.0, 2.0, rng), b};
                    Tensor w = uniform_tensor(s, -2.0, 2.0, rng);
                    f = [op, w](std::span<const Tensor> x) { return weighted(op(x[0], x[1]), w); };
                  }};
  };

  std::vector<OpCase> cases = {
      binary("add", add, false, false),
      binary("add_broadcast", add, true, false),
      binary("sub", sub, false, false),
      binary("mul", mul, false, false),
      binary("mul_broadcast", mul, true, false),
      binary("div", div, false, true),
      binary("div_broadcast", div, true, true),
      unary("neg", neg, -2.0, 2.0),
      unary("tanh", tanh, -2.0, 2.0),
      unary("sigmoid", sigmoid, -2.0, 2.0),
      unary("exp", exp, -2.0, 2.0),
      unary("log1p", log1p, -0.9, 2.0),
      unary("square", square, -2.0, 2.0),
      unary("sqrt", sqrt, 0.1, 2.0),
      unary("safe_reciprocal", safe_reciprocal, 0.5, 2.0),
  };
  cases.push_back({"abs", [](Rng& rng, std::vector<Tensor>& in, ScalarFn& f) {
                     Shape s = random_shape(rng);
                     in = {away_from_zero(s, 0.1, rng)};
                     Tensor w = uniform_tensor(s, -2.0, 2.0, rng);
                     f = [w](std::span<const Tensor> x) { return weighted(abs(x[0]), w); };
                   }});
  cases.push_back({"scalar_ops", [](Rng& rng, std::vector<Tensor>& in, ScalarFn& f) {
                     Shape s = random_shape(rng);
                     in = {uniform_tensor(s, -2.0, 2.0, rng)};
                     Tensor w = uniform_tensor(s, -2.0, 2.0, rng);
                     const double c = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
                     f = [w, c](std::span<const Tensor> x) {
                       return weighted(add_scalar(mul_scalar(x[0], c), c), w);
                     };
                   }});
  cases.push_back({"matmul", [](Rng& rng, std::vector<Tensor>& in, ScalarFn& f) {
                     std::uniform_int_distribution<std::size_t> d(1, 5);
                     std::bernoulli_distribution coin(0.5);
                     const std::size_t m = d(rng), k = d(rng), n = d(rng);
                     const bool ta = coin(rng), tb = coin(rng);
                     in = {uniform_tensor(ta ? Shape{k, m} : Shape{m, k}, -2.0, 2.0, rng),
                           uniform_tensor(tb ? Shape{n, k} : Shape{k, n}, -2.0, 2.0, rng)};
                     Tensor w = uniform_tensor({m, n}, -2.0, 2.0, rng);
                     f = [w, ta, tb](std::span<const Tensor> x) { return weighted(matmul(x[0], x[1], ta, tb), w); };
                   }});
  auto reduction = [](const char* name, ReduceOp op) {
    return OpCase{name, [op](Rng& rng, std::vector<Tensor>& in, ScalarFn& f) {
                    Shape s = random_shape(rng);
                    std::vector<std::size_t> axes;
                    std::bernoulli_distribution coin(0.5);
                    for (std::size_t i = 0; i < s.size(); ++i) {
                      if (coin(rng)) axes.push_back(i);
                    }
                    Shape out;
                    for (std::size_t i = 0; i < s.size(); ++i) {
                      if (std::find(axes.begin(), axes.end(), i) == axes.end()) out.push_back(s[i]);
                    }
                    in = {uniform_tensor(s, -2.0, 2.0, rng)};
                    Tensor w = uniform_tensor(out, -2.0, 2.0, rng);
                    f = [op, axes, w](std::span<const Tensor> x) { return weighted(reduce(op, x[0], axes), w); };
                  }};
  };
  cases.push_back(reduction("sum", ReduceOp::Sum));
  cases.push_back(reduction("mean", ReduceOp::Mean));
  cases.push_back({"reshape", [](Rng& rng, std::vector<Tensor>& in, ScalarFn& f) {
                     Shape s = random_shape(rng);
                     in = {uniform_tensor(s, -2.0, 2.0, rng)};
                     const Shape flat{shape_numel(s)};
                     Tensor w = uniform_tensor(flat, -2.0, 2.0, rng);
                     f = [w, flat](std::span<const Tensor> x) { return weighted(square(reshape(x[0], flat)), w); };
                   }});
  cases.push_back({"expand", [](Rng& rng, std::vector<Tensor>& in, ScalarFn& f) {
                     Shape target = random_shape(rng);
                     Shape s = target;
                     std::bernoulli_distribution coin(0.5);
                     for (auto& d : s) {
                       if (coin(rng)) d = 1;
                     }
                     in = {uniform_tensor(s, -2.0, 2.0, rng)};
                     Tensor w = uniform_tensor(target, -2.0, 2.0, rng);
                     f = [w, target](std::span<const Tensor> x) { return weighted(tanh(expand(x[0], target)), w); };
                   }});
  cases.push_back({"slice", [](Rng& rng, std::vector<Tensor>& in, ScalarFn& f) {
                     Shape s = random_shape(rng);
                     const std::size_t axis = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
                     const std::size_t start = std::uniform_int_distribution<std::size_t>(0, s[axis] - 1)(rng);
                     const std::size_t len = std::uniform_int_distribution<std::size_t>(1, s[axis] - start)(rng);
                     Shape out = s;
                     out[axis] = len;
                     in = {uniform_tensor(s, -2.0, 2.0, rng)};
                     Tensor w = uniform_tensor(out, -2.0, 2.0, rng);
                     f = [=](std::span<const Tensor> x) { return weighted(square(slice(x[0], axis, start, len)), w); };
                   }});
  cases.push_back({"pad_axis", [](Rng& rng, std::vector<Tensor>& in, ScalarFn& f) {
                     Shape s = random_shape(rng);
                     const std::size_t axis = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
                     Shape out = s;
                     out[axis] += std::uniform_int_distribution<std::size_t>(0, 3)(rng);
                     const std::size_t start = std::uniform_int_distribution<std::size_t>(0, out[axis] - s[axis])(rng);
                     in = {uniform_tensor(s, -2.0, 2.0, rng)};
                     Tensor w = uniform_tensor(out, -2.0, 2.0, rng);
                     f = [=](std::span<const Tensor> x) { return weighted(pad_axis(square(x[0]), out, axis, start), w); };
                   }});
  cases.push_back({"concat", [](Rng& rng, std::vector<Tensor>& in, ScalarFn& f) {
                     Shape s = random_shape(rng);
                     const std::size_t axis = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
                     Shape s2 = s;
                     s2[axis] = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
                     Shape out = s;
                     out[axis] += s2[axis];
                     in = {uniform_tensor(s, -2.0, 2.0, rng), uniform_tensor(s2, -2.0, 2.0, rng)};
                     Tensor w = uniform_tensor(out, -2.0, 2.0, rng);
                     f = [=](std::span<const Tensor> x) {
                       const Tensor parts[] = {square(x[0]), x[1]};
                       return weighted(concat(parts, axis), w);
                     };
                   }});
  cases.push_back({"stack", [](Rng& rng, std::vector<Tensor>& in, ScalarFn& f) {
                     Shape s = random_shape(rng, 1, 2);
                     const std::size_t axis = std::uniform_int_distribution<std::size_t>(0, s.size())(rng);
                     Shape out = s;
                     out.insert(out.begin() + static_cast<std::ptrdiff_t>(axis), 2);
                     in = {uniform_tensor(s, -2.0, 2.0, rng), uniform_tensor(s, -2.0, 2.0, rng)};
                     Tensor w = uniform_tensor(out, -2.0, 2.0, rng);
                     f = [=](std::span<const Tensor> x) {
                       const Tensor parts[] = {x[0], sigmoid(x[1])};
                       return weighted(stack(parts, axis), w);
                     };
                   }});
  return cases;
}

// Penalty on the per-row gradient norm of a small tanh critic, the shape of
// the WGAN-GP term: mean_i (||d D / d x_i|| - 1)^2.
Tensor norm_penalty(std::span<const Tensor> x) {
  const Tensor& input = x[0];
  const Tensor& weight = x[1];
  const Tensor& readout = x[2];
  const Tensor hidden = tanh(matmul(input, weight));
  const Tensor score = matmul(hidden, reshape(readout, {readout.numel(), 1}));
  const Tensor g = grad(sum(score), input, /*create_graph=*/true);
  const Tensor norms = sqrt(sum(square(g), {1}));
  return mean(square(add_scalar(norms, -1.0)));
}

}  // namespace

GradcheckReport run_primitive_gradchecks(std::uint64_t seed, std::size_t cases_per_op) {
  GradcheckReport report;
  Rng rng(seed);
  for (const auto& op : primitive_cases()) {
    GradcheckResult result{op.name, cases_per_op, 0.0, kFirstOrderTolerance};
    for (std::size_t c = 0; c < cases_per_op; ++c) {
      std::vector<Tensor> inputs;
      ScalarFn f;
      op.build(rng, inputs, f);
      result.max_rel_error = std::max(result.max_rel_error, max_gradient_error(f, inputs));
    }
    report.results.push_back(result);
  }
  return report;
}

GradcheckReport run_second_order_gradchecks(std::uint64_t seed, std::size_t cases) {
  GradcheckReport report;
  Rng rng(seed);

  GradcheckResult squared_grad{"grad_of_squared_gradient", cases, 0.0, kSecondOrderTolerance};
  GradcheckResult penalty{"gradient_norm_penalty", cases, 0.0, kSecondOrderTolerance};
  GradcheckResult smooth{"grad_of_sigmoid_exp_gradient", cases, 0.0, kSecondOrderTolerance};
  for (std::size_t c = 0; c < cases; ++c) {
    {
      // h = sum((d sum(x^2) / dx)^2) = sum(4 x^2)
      const Tensor x = uniform_tensor(random_shape(rng), -2.0, 2.0, rng);
      const Tensor inputs[] = {x};
      ScalarFn f = [](std::span<const Tensor> in) {
        const Tensor g = grad(sum(square(in[0])), in[0], true);
        return sum(square(g));
      };
      squared_grad.max_rel_error = std::max(squared_grad.max_rel_error, max_gradient_error(f, inputs));
    }
    {
      std::uniform_int_distribution<std::size_t> d(1, 4);
      const std::size_t batch = d(rng), features = d(rng), hidden = d(rng);
      const Tensor inputs[] = {uniform_tensor({batch, features}, -2.0, 2.0, rng),
                               uniform_tensor({features, hidden}, -2.0, 2.0, rng),
                               uniform_tensor({hidden}, -2.0, 2.0, rng)};
      penalty.max_rel_error = std::max(penalty.max_rel_error, max_gradient_error(norm_penalty, inputs));
    }
    {
      const Shape s = random_shape(rng);
      const Tensor inputs[] = {uniform_tensor(s, -2.0, 2.0, rng), uniform_tensor(s, -1.0, 1.0, rng)};
      ScalarFn f = [](std::span<const Tensor> in) {
        const Tensor inner = sum(mul(sigmoid(mul(in[0], in[1])), exp(in[1])));
        const Tensor g = grad(inner, in[0], true);
        return sum(mul(g, log1p(square(in[0]))));
      };
      smooth.max_rel_error = std::max(smooth.max_rel_error, max_gradient_error(f, inputs));
    }
  }
  report.results = {squared_grad, penalty, smooth};
  return report;
}

}  // namespace tsgan
