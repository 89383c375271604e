// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include <charconv>
#include <cmath>
#include <map>

#include "tsgan/data.hpp"
#include "tsgan/errors.hpp"

namespace tsgan {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Real: return "real";
    case Provenance::Synthetic: return "synthetic";
    case Provenance::Oversampled: return "oversampled";
  }
  return "unknown";
}

std::size_t WindowBatch::channel_index(std::string_view name) const {
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] == name) return i;
  }
  throw ContractError("window batch has no channel '" + std::string(name) + "'");
}

std::vector<double> WindowBatch::channel_values(std::string_view name) const {
  const std::size_t c = channel_index(name);
  const std::size_t nc = channels.size();
  const auto v = data.values();
  std::vector<double> out;
  out.reserve(v.size() / nc);
  for (std::size_t i = c; i < v.size(); i += nc) out.push_back(v[i]);
  return out;
}

std::vector<double> WindowBatch::window_channel(std::size_t w, std::size_t c) const {
  const std::size_t nc = channels.size();
  const std::size_t len = steps();
  const auto v = data.values();
  std::vector<double> out(len);
  for (std::size_t t = 0; t < len; ++t) out[t] = v[(w * len + t) * nc + c];
  return out;
}

WindowBatch WindowBatch::subset(std::span<const std::size_t> indices) const {
  const std::size_t stride = steps() * channels.size();
  const auto v = data.values();
  std::vector<double> out(indices.size() * stride);
  std::vector<Provenance> prov;
  prov.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t w = indices[k];
    if (w >= count()) throw ShapeError("window index " + std::to_string(w) + " out of range");
    std::copy(v.begin() + static_cast<std::ptrdiff_t>(w * stride),
              v.begin() + static_cast<std::ptrdiff_t>((w + 1) * stride),
              out.begin() + static_cast<std::ptrdiff_t>(k * stride));
    prov.push_back(provenance[w]);
  }
  return {Tensor({indices.size(), steps(), channels.size()}, std::move(out)), channels, std::move(prov)};
}

WindowBatch WindowBatch::concat(const WindowBatch& other) const {
  if (other.channels != channels) throw ContractError("cannot concatenate window batches with different channels");
  if (count() == 0) return other;
  if (other.count() == 0) return *this;
  if (other.steps() != steps()) throw ShapeError("cannot concatenate windows of different length");
  std::vector<double> values = data.to_vector();
  const auto ov = other.data.values();
  values.insert(values.end(), ov.begin(), ov.end());
  std::vector<Provenance> prov = provenance;
  prov.insert(prov.end(), other.provenance.begin(), other.provenance.end());
  return {Tensor({count() + other.count(), steps(), channels.size()}, std::move(values)), channels, std::move(prov)};
}

std::size_t WindowBatch::count_of(Provenance p) const {
  std::size_t n = 0;
  for (auto q : provenance) n += q == p ? 1 : 0;
  return n;
}

WindowBatch make_windows(const SeriesDataset& data, std::size_t window_len, std::size_t stride) {
  if (window_len == 0 || stride == 0) throw ContractError("window length and stride must be positive");
  const std::size_t n = data.length();
  if (n < window_len) {
    throw SizeError("series of length " + std::to_string(n) + " is shorter than the window " +
                    std::to_string(window_len));
  }
  const std::size_t count = (n - window_len) / stride + 1;
  const std::size_t nc = data.channels.size();
  std::vector<double> values(count * window_len * nc);
  for (std::size_t w = 0; w < count; ++w) {
    for (std::size_t t = 0; t < window_len; ++t) {
      for (std::size_t c = 0; c < nc; ++c) {
        values[(w * window_len + t) * nc + c] = data.channels[c].values[w * stride + t];
      }
    }
  }
  return {Tensor({count, window_len, nc}, std::move(values)), data.channel_names(),
          std::vector<Provenance>(count, Provenance::Real)};
}

std::vector<std::size_t> wet_window_indices(const WindowBatch& batch, std::string_view channel, double threshold) {
  const std::size_t c = batch.channel_index(channel);
  std::vector<std::size_t> keep;
  for (std::size_t w = 0; w < batch.count(); ++w) {
    const auto x = batch.window_channel(w, c);
    if (x.size() < 2) continue;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
    if (sd > threshold) keep.push_back(w);
  }
  return keep;
}

WindowBatch filter_flat_windows(const WindowBatch& batch, std::string_view channel, double threshold) {
  return batch.subset(wet_window_indices(batch, channel, threshold));
}

Tensor compute_start_token(const WindowBatch& batch) {
  if (batch.count() == 0) throw SizeError("start token of an empty batch");
  const std::size_t nc = batch.channels.size();
  std::vector<double> sums(nc, 0.0);
  const auto v = batch.data.values();
  for (std::size_t i = 0; i < v.size(); ++i) sums[i % nc] += v[i];
  const auto n = static_cast<double>(v.size() / nc);
  for (auto& s : sums) s /= n;
  return Tensor::vector(std::move(sums));
}

void write_windows_csv(const WindowBatch& batch, std::ostream& out) {
  std::string buffer = "window,provenance,step";
  for (const auto& c : batch.channels) buffer += "," + c;
  buffer.push_back('\n');
  const std::size_t nc = batch.channels.size();
  const auto v = batch.data.values();
  char num[32];
  for (std::size_t w = 0; w < batch.count(); ++w) {
    const std::string prefix = std::to_string(w) + "," + std::string(to_string(batch.provenance[w])) + ",";
    for (std::size_t t = 0; t < batch.steps(); ++t) {
      buffer += prefix;
      buffer += std::to_string(t);
      for (std::size_t c = 0; c < nc; ++c) {
        buffer.push_back(',');
        auto [ptr, ec] = std::to_chars(num, num + sizeof(num), v[(w * batch.steps() + t) * nc + c]);
        buffer.append(num, ptr);
      }
      buffer.push_back('\n');
    }
    if (buffer.size() > (1u << 20)) {
      out << buffer;
      buffer.clear();
    }
  }
  out << buffer;
}

WindowBatch read_windows_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  for (std::size_t start = 0;;) {
    const auto comma = line.find(',', start);
    header.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (header.size() < 4 || header[0] != "window" || header[1] != "provenance" || header[2] != "step") {
    throw ParseError(1, "expected header 'window,provenance,step,<channels>'");
  }
  WindowBatch batch;
  batch.channels.assign(header.begin() + 3, header.end());
  const std::size_t nc = batch.channels.size();
  const std::map<std::string, Provenance, std::less<>> tags{
      {"real", Provenance::Real}, {"synthetic", Provenance::Synthetic}, {"oversampled", Provenance::Oversampled}};

  std::vector<double> values;
  std::size_t steps = 0;     // fixed once the first window closes
  std::size_t next_step = 0;  // expected step index within the current window
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (std::size_t start = 0;;) {
      const auto comma = rest.find(',', start);
      f.push_back(rest.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != nc + 3) throw ParseError(line_no, "wrong field count");
    std::size_t w = 0, t = 0;
    if (std::from_chars(f[0].data(), f[0].data() + f[0].size(), w).ec != std::errc() ||
        std::from_chars(f[2].data(), f[2].data() + f[2].size(), t).ec != std::errc()) {
      throw ParseError(line_no, "bad window/step index");
    }
    if (t == 0) {
      if (!batch.provenance.empty()) {
        if (steps == 0) steps = next_step;
        if (next_step != steps) throw ParseError(line_no, "windows differ in length");
      }
      if (w != batch.provenance.size()) throw ParseError(line_no, "windows must be numbered consecutively");
      const auto tag = tags.find(f[1]);
      if (tag == tags.end()) throw ParseError(line_no, "unknown provenance '" + std::string(f[1]) + "'");
      batch.provenance.push_back(tag->second);
      next_step = 0;
    } else if (batch.provenance.empty() || w + 1 != batch.provenance.size() || t != next_step) {
      throw ParseError(line_no, "steps must be contiguous and ordered");
    }
    for (std::size_t c = 0; c < nc; ++c) {
      double v = 0.0;
      const auto& s = f[c + 3];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(line_no, "bad number");
      values.push_back(v);
    }
    ++next_step;
  }
  if (values.empty()) throw SizeError("no windows in file");
  if (steps == 0) steps = next_step;
  if (next_step != steps) throw ParseError(line_no, "last window is truncated");
  const std::size_t count = batch.provenance.size();
  batch.data = Tensor({count, steps, nc}, std::move(values));
  return batch;
}

SeriesSplit split_chronological(const SeriesDataset& data, std::size_t train_windows, std::size_t test_windows,
                                std::size_t window_len) {
  if (train_windows == 0 || test_windows == 0) throw SizeError("split needs at least one window per side");
  const std::size_t train_rows = train_windows + window_len - 1;
  const std::size_t test_rows = test_windows + window_len - 1;
  if (train_rows + test_rows > data.length()) {
    throw SizeError("series of length " + std::to_string(data.length()) + " cannot hold " +
                    std::to_string(train_windows) + " + " + std::to_string(test_windows) + " windows");
  }
  return {data.rows(0, train_rows), data.rows(data.length() - test_rows, test_rows)};
}

}  // namespace tsgan
