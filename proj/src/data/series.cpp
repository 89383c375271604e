// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsgan/data.hpp"
#include "tsgan/errors.hpp"

namespace tsgan {

bool SeriesDataset::has_channel(std::string_view name) const {
  for (const auto& c : channels) {
    if (c.name == name) return true;
  }
  return false;
}

const Channel& SeriesDataset::channel(std::string_view name) const {
  for (const auto& c : channels) {
    if (c.name == name) return c;
  }
  throw ContractError("dataset has no channel '" + std::string(name) + "'");
}

Channel& SeriesDataset::channel(std::string_view name) {
  return const_cast<Channel&>(std::as_const(*this).channel(name));
}

std::vector<std::string> SeriesDataset::channel_names() const {
  std::vector<std::string> names;
  for (const auto& c : channels) names.push_back(c.name);
  return names;
}

void SeriesDataset::validate() const {
  for (const auto& c : channels) {
    if (c.values.size() != timestamps.size()) {
      throw FormatError("channel '" + c.name + "' has " + std::to_string(c.values.size()) + " values for " +
                        std::to_string(timestamps.size()) + " timestamps");
    }
    if (c.name == kPrecipitation || c.name == kFlow) {
      for (std::size_t i = 0; i < c.values.size(); ++i) {
        if (!(c.values[i] >= 0.0)) {
          throw DomainError("channel '" + c.name + "' is negative at row " + std::to_string(i));
        }
      }
    }
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] - timestamps[i - 1] != kStepSeconds) {
      throw FormatError("non-uniform spacing between rows " + std::to_string(i - 1) + " and " + std::to_string(i));
    }
  }
}

SeriesDataset SeriesDataset::rows(std::size_t begin, std::size_t count) const {
  if (begin + count > length()) throw SizeError("row range exceeds dataset length");
  SeriesDataset out;
  const auto b = static_cast<std::ptrdiff_t>(begin);
  const auto e = static_cast<std::ptrdiff_t>(begin + count);
  out.timestamps.assign(timestamps.begin() + b, timestamps.begin() + e);
  for (const auto& c : channels) out.channels.push_back({c.name, {c.values.begin() + b, c.values.begin() + e}});
  return out;
}

SeriesDataset SeriesDataset::select(std::span<const std::string> names) const {
  SeriesDataset out;
  out.timestamps = timestamps;
  for (const auto& n : names) out.channels.push_back(channel(n));
  return out;
}

// ---------------------------------------------------------------------------
// Timestamps

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  if (text.size() != 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  auto field = [&](std::size_t pos, std::size_t len, int& out) {
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc() && ptr == first + len;
  };
  int y, mo, d, h, mi, s;
  if (!field(0, 4, y) || !field(5, 2, mo) || !field(8, 2, d) || !field(11, 2, h) || !field(14, 2, mi) ||
      !field(17, 2, s)) {
    return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_iso8601(std::int64_t seconds) {
  using namespace std::chrono;
  std::int64_t days = seconds / 86400;
  std::int64_t rem = seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>((rem / 60) % 60), static_cast<int>(rem % 60));
  return buf;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr std::string_view kHeader = "timestamp,precipitation_mm,temperature_c,flow";

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

void append_double(std::string& out, double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

}  // namespace

SeriesDataset parse_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line()) throw ParseError(1, "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (line != kHeader) throw ParseError(line_no, "expected header '" + std::string(kHeader) + "'");

  SeriesDataset data;
  data.channels = {{std::string(kPrecipitation), {}}, {std::string(kTemperature), {}}, {std::string(kFlow), {}}};
  while (next_line()) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 fields, found " + std::to_string(fields.size()));
    }
    const auto ts = parse_iso8601(fields[0]);
    if (!ts) throw ParseError(line_no, "bad timestamp '" + std::string(fields[0]) + "'");
    double values[3];
    for (int k = 0; k < 3; ++k) {
      const auto v = parse_double(fields[k + 1]);
      if (!v) throw ParseError(line_no, "bad number '" + std::string(fields[k + 1]) + "'");
      values[k] = *v;
    }
    if (values[0] < 0.0) throw ParseError(line_no, "negative precipitation");
    if (values[2] < 0.0) throw ParseError(line_no, "negative flow");
    if (!data.timestamps.empty()) {
      const std::int64_t delta = *ts - data.timestamps.back();
      if (delta != kStepSeconds) {
        throw FormatError("line " + std::to_string(line_no) + ": expected a 5-minute step, found " +
                          std::to_string(delta) + " s");
      }
    }
    data.timestamps.push_back(*ts);
    for (int k = 0; k < 3; ++k) data.channels[k].values.push_back(values[k]);
  }
  return data;
}

SeriesDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse_csv(in);
}

void write_csv(const SeriesDataset& data, std::ostream& out) {
  data.validate();
  const auto& p = data.channel(kPrecipitation).values;
  const auto& t = data.channel(kTemperature).values;
  const auto& f = data.channel(kFlow).values;
  std::string buffer;
  buffer.append(kHeader).push_back('\n');
  for (std::size_t i = 0; i < data.length(); ++i) {
    buffer += format_iso8601(data.timestamps[i]);
    buffer.push_back(',');
    append_double(buffer, p[i]);
    buffer.push_back(',');
    append_double(buffer, t[i]);
    buffer.push_back(',');
    append_double(buffer, f[i]);
    buffer.push_back('\n');
  }
  out << buffer;
}

void save_csv(const SeriesDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  write_csv(data, out);
}

}  // namespace tsgan
