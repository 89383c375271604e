// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "tsgan/checkpoint.hpp"
#include "tsgan/config.hpp"
#include "tsgan/data.hpp"
#include "tsgan/errors.hpp"
#include "tsgan/gradcheck.hpp"
#include "tsgan/metrics.hpp"
#include "tsgan/run.hpp"
#include "tsgan/tune.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

Array to_array(const tsgan::Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  Array out(shape);
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

tsgan::RunConfig make_config(const std::map<std::string, std::string>& overrides) {
  tsgan::RunConfig c;
  for (const auto& [k, v] : overrides) c.set(k, v);
  c.set("seed", std::to_string(tsgan::resolve_seed(c)));
  return c;
}

template <typename T>
py::array_t<T> copy_array(const std::vector<T>& v) {
  py::array_t<T> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict series_to_dict(const tsgan::SeriesDataset& data) {
  py::dict out;
  out["timestamp"] = copy_array(data.timestamps);
  for (const auto& ch : data.channels) out[py::str(ch.name)] = copy_array(ch.values);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "WGAN-GP augmentation of rainfall/flow windows and flow forecasting";

  auto error = py::register_exception<tsgan::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<tsgan::ConfigError>(m, "ConfigError", error);
  py::register_exception<tsgan::ParseError>(m, "ParseError", error);
  py::register_exception<tsgan::FormatError>(m, "FormatError", error);
  py::register_exception<tsgan::CorruptionError>(m, "CorruptionError", error);
  py::register_exception<tsgan::ShapeError>(m, "ShapeError", error);
  py::register_exception<tsgan::SizeError>(m, "SizeError", error);

  // Data.
  m.def(
      "synth_catchment",
      [](std::size_t length, std::uint64_t seed) {
        tsgan::CatchmentConfig c;
        c.length = length;
        return series_to_dict(tsgan::synth_catchment(c, seed));
      },
      py::arg("length") = 100000, py::arg("seed") = 0,
      "Synthetic 5-minute catchment series as a dict of numpy arrays.");
  m.def(
      "load_csv", [](const std::filesystem::path& p) { return series_to_dict(tsgan::load_csv(p)); }, py::arg("path"));
  m.def(
      "make_windows",
      [](const Array& series, std::size_t window_len, std::size_t stride) {
        if (series.ndim() != 2) throw tsgan::ShapeError("expected a (steps, channels) array");
        const auto steps = static_cast<std::size_t>(series.shape(0));
        const auto chans = static_cast<std::size_t>(series.shape(1));
        tsgan::SeriesDataset d;
        for (std::size_t t = 0; t < steps; ++t) d.timestamps.push_back(static_cast<std::int64_t>(t) * tsgan::kStepSeconds);
        for (std::size_t c = 0; c < chans; ++c) {
          tsgan::Channel ch{"c" + std::to_string(c), {}};
          for (std::size_t t = 0; t < steps; ++t) ch.values.push_back(series.at(t, c));
          d.channels.push_back(std::move(ch));
        }
        return to_array(tsgan::make_windows(d, window_len, stride).data);
      },
      py::arg("series"), py::arg("window_len") = tsgan::kWindowLength, py::arg("stride") = 1,
      "Stride windows of a (steps, channels) array: (count, window_len, channels).");

  // Metrics.
  m.def(
      "jsd",
      [](const Array& a, const Array& b, std::size_t bins) { return tsgan::jsd_points(to_vector(a), to_vector(b), bins); },
      py::arg("a"), py::arg("b"), py::arg("bins") = tsgan::kDefaultBins,
      "Jensen-Shannon divergence (natural log) of two samples over their joint range.");
  m.def(
      "kld",
      [](const Array& p, const Array& q, std::size_t bins, double lo, double hi) {
        return tsgan::kld(tsgan::histogram_estimate(to_vector(p), bins, lo, hi),
                          tsgan::histogram_estimate(to_vector(q), bins, lo, hi));
      },
      py::arg("p"), py::arg("q"), py::arg("bins"), py::arg("lo"), py::arg("hi"));
  m.def(
      "mae", [](const Array& pred, const Array& obs) { return tsgan::mae(to_vector(pred), to_vector(obs)); },
      py::arg("pred"), py::arg("obs"));
  m.def(
      "peak_event_metrics",
      [](const Array& pred, const Array& obs, double q) {
        const auto pm = tsgan::peak_event_metrics(to_vector(pred), to_vector(obs), q);
        py::dict out;
        out["threshold"] = pm.threshold;
        out["peak_count"] = pm.peak_count;
        out["dry_count"] = pm.dry_count;
        out["mae"] = pm.mae;
        out["peak_mae"] = pm.peak_mae;
        out["peak_bias"] = pm.peak_bias;
        out["dry_mae"] = pm.dry_mae;
        return out;
      },
      py::arg("pred"), py::arg("obs"), py::arg("quantile") = 0.95);

  // Autodiff checks.
  m.def(
      "gradcheck",
      [](std::size_t cases, std::uint64_t seed) {
        py::dict out;
        const auto first = tsgan::run_primitive_gradchecks(seed, cases);
        const auto second = tsgan::run_second_order_gradchecks(seed, cases);
        for (const auto* report : {&first, &second}) {
          for (const auto& r : report->results) out[py::str(r.name)] = py::make_tuple(r.max_rel_error, r.tolerance);
        }
        return out;
      },
      py::arg("cases") = 10, py::arg("seed") = 0, "Maps each suite to (max relative error, tolerance).");

  // Tuner schedule.
  m.def(
      "halving_plan",
      [](std::size_t trials, std::size_t rungs, std::size_t budget) {
        const auto p = tsgan::plan_successive_halving(trials, rungs, budget);
        py::dict out;
        out["base_steps"] = p.base_steps;
        out["entrants"] = p.entrants;
        out["steps"] = p.steps;
        out["total_steps"] = p.total_steps;
        out["final_survivors"] = p.final_survivors();
        return out;
      },
      py::arg("trials"), py::arg("rungs"), py::arg("budget"));

  // Config and commands.
  m.def(
      "config_text", [](const std::map<std::string, std::string>& overrides) { return make_config(overrides).serialize(); },
      py::arg("overrides") = std::map<std::string, std::string>{}, "Canonical config text with overrides applied.");
  m.def(
      "run_command",
      [](const std::string& command, const std::map<std::string, std::string>& overrides,
         std::optional<std::filesystem::path> out) {
        tsgan::CommandResult r;
        {
          py::gil_scoped_release release;
          r = tsgan::run_command(command, make_config(overrides), out);
        }
        py::dict d;
        d["summary"] = r.summary;
        d["details"] = r.details;
        d["exit_code"] = r.exit_code;
        py::list artifacts;
        for (const auto& a : r.manifest.artifacts) artifacts.append(py::make_tuple(a.name, a.crc32, a.bytes));
        d["artifacts"] = artifacts;
        return d;
      },
      py::arg("command"), py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("out") = py::none(),
      "Runs a subcommand with config overrides (key -> value).");

  // Checkpoints.
  m.def(
      "load_checkpoint",
      [](const std::filesystem::path& p) {
        const auto ckpt = tsgan::load_checkpoint(p);
        py::dict tensors;
        for (const auto& nt : ckpt.tensors) tensors[py::str(nt.name)] = to_array(nt.tensor);
        py::dict meta;
        for (const auto& [k, v] : ckpt.meta) meta[py::str(k)] = v;
        py::dict out;
        out["version"] = ckpt.version;
        out["tensors"] = tensors;
        out["meta"] = meta;
        out["config"] = ckpt.config.serialize();
        return out;
      },
      py::arg("path"));
}
