// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include "tsgan/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "tsgan/errors.hpp"

namespace tsgan {
namespace {

constexpr char kMagic[4] = {'S', 'G', 'N', '1'};

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  template <typename T>
  void le(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<unsigned char>(value >> (8 * i)));
  }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  std::vector<unsigned char>& buffer() { return buf_; }

 private:
  std::vector<unsigned char> buf_;
};

class Reader {
 public:
  Reader(const unsigned char* data, std::size_t size) : data_(data), size_(size) {}

  template <typename T>
  T le() {
    need(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(static_cast<T>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return value;
  }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  std::string text(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return size_ - pos_; }

 private:
  void need(std::size_t n) const {
    if (size_ - pos_ < n) throw CorruptionError("checkpoint: unexpected end of data");
  }
  const unsigned char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const unsigned char* data, std::size_t n) {
  return static_cast<std::uint32_t>(crc32(0L, data, static_cast<uInt>(n)));
}

double parse_double(std::string_view text, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw FormatError("checkpoint: bad number in " + what);
  return v;
}

std::uint64_t parse_u64(std::string_view text, const std::string& what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("checkpoint: bad integer in " + what);
  }
  return v;
}

void restore_adam(const Checkpoint& ckpt, const std::string& prefix, const std::vector<Tensor>& params,
                  AdamState& state) {
  state.step_count = parse_u64(ckpt.meta_value(prefix + ".step"), prefix);
  state.first_moment.clear();
  state.second_moment.clear();
  if (!ckpt.has(prefix + ".m.0")) return;  // optimizer never stepped
  std::vector<NamedTensor> target;
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.first_moment.push_back(Tensor::zeros(params[i].shape()));
    state.second_moment.push_back(Tensor::zeros(params[i].shape()));
  }
  append_adam_named(state, prefix, target);
  restore_tensors(ckpt, target);
}

}  // namespace

bool Checkpoint::has(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return true;
  }
  return false;
}

const Tensor& Checkpoint::tensor(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t.tensor;
  }
  throw FormatError("checkpoint: no tensor named '" + std::string(name) + "'");
}

const std::string& Checkpoint::meta_value(std::string_view key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) throw FormatError("checkpoint: missing meta." + std::string(key));
  return it->second;
}

std::string Checkpoint::snapshot() const {
  std::string out = config.serialize();
  for (const auto& [key, value] : meta) {
    if (value.find('\n') != std::string::npos || key.find_first_of("=\n# ") != std::string::npos) {
      throw ContractError("checkpoint: meta entries must be single-line, key '" + key + "'");
    }
    out += "meta." + key + " = " + value + "\n";
  }
  return out;
}

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.le<std::uint32_t>(ckpt.version);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, tensor] : ckpt.tensors) {
    if (name.size() > 0xffff) throw ContractError("checkpoint: tensor name too long");
    if (tensor.rank() > 0xff) throw ContractError("checkpoint: tensor rank too large");
    w.le<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.le<std::uint8_t>(static_cast<std::uint8_t>(tensor.rank()));
    for (const auto d : tensor.shape()) w.le<std::uint64_t>(d);
    for (const double v : tensor.values()) w.f64(v);
  }
  const std::string snap = ckpt.snapshot();
  w.le<std::uint32_t>(static_cast<std::uint32_t>(snap.size()));
  w.bytes(snap.data(), snap.size());
  auto& buf = w.buffer();
  w.le<std::uint32_t>(crc_of(buf.data(), buf.size()));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() >= sizeof kMagic && std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) {
    throw FormatError("checkpoint: bad magic (not an SGN1 file)");
  }
  if (buf.size() < 12) throw CorruptionError("checkpoint: truncated header");
  Reader header(buf.data() + 4, 4);
  const auto version = header.le<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  if (buf.size() < 20) throw CorruptionError("checkpoint: truncated");
  const std::size_t body = buf.size() - 4;
  Reader tail(buf.data() + body, 4);
  if (tail.le<std::uint32_t>() != crc_of(buf.data(), body)) {
    throw CorruptionError("checkpoint: checksum mismatch (file truncated or modified)");
  }

  Reader r(buf.data() + 8, body - 8);
  Checkpoint ckpt;
  ckpt.version = version;
  const auto count = r.le<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.text(r.le<std::uint16_t>());
    const auto rank = r.le<std::uint8_t>();
    Shape shape(rank);
    std::size_t numel = 1;
    for (auto& d : shape) {
      d = r.le<std::uint64_t>();
      if (d != 0 && numel > r.remaining() / d) throw CorruptionError("checkpoint: tensor larger than file");
      numel *= d;
    }
    if (numel > r.remaining() / 8) throw CorruptionError("checkpoint: tensor larger than file");
    std::vector<double> values(numel);
    for (auto& v : values) v = r.f64();
    ckpt.tensors.push_back({std::move(name), Tensor(std::move(shape), std::move(values))});
  }
  const std::string snap = r.text(r.le<std::uint32_t>());
  if (r.remaining() != 0) throw CorruptionError("checkpoint: trailing bytes before checksum");

  std::string config_text;
  std::istringstream lines(snap);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("meta.", 0) == 0) {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) throw FormatError("checkpoint: malformed meta line");
      ckpt.meta.emplace(line.substr(5, eq - 5), line.substr(eq + 3));
    } else {
      config_text += line + "\n";
    }
  }
  ckpt.config = RunConfig::parse_text(config_text);
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  write_checkpoint(ckpt, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

void restore_tensors(const Checkpoint& ckpt, const std::vector<NamedTensor>& target) {
  for (const auto& [name, tensor] : target) {
    const Tensor& src = ckpt.tensor(name);
    if (src.shape() != tensor.shape()) {
      throw FormatError("checkpoint: '" + name + "' has shape " + shape_str(src.shape()) + ", model expects " +
                        shape_str(tensor.shape()));
    }
    auto dst = Tensor(tensor).mutable_values();
    std::copy(src.values().begin(), src.values().end(), dst.begin());
  }
}

void store_preproc_stats(const PreprocStats& stats, Checkpoint& ckpt) {
  std::string names;
  for (const auto& c : stats.channels) {
    if (c.name.find_first_of(", =\n#") != std::string::npos) throw ContractError("unsupported channel name");
    names += (names.empty() ? "" : ",") + c.name;
    ckpt.meta["preproc." + c.name] =
        std::string(c.log_transform ? "1" : "0") + " " + format_real(c.mean) + " " + format_real(c.stddev);
  }
  ckpt.meta["preproc.channels"] = names;
}

PreprocStats load_preproc_stats(const Checkpoint& ckpt) {
  PreprocStats stats;
  std::string_view names = ckpt.meta_value("preproc.channels");
  while (!names.empty()) {
    const auto comma = names.find(',');
    ChannelStats c;
    c.name = std::string(names.substr(0, comma));
    names = comma == std::string_view::npos ? std::string_view{} : names.substr(comma + 1);
    std::istringstream fields(ckpt.meta_value("preproc." + c.name));
    std::string log, mean, stddev;
    if (!(fields >> log >> mean >> stddev) || (log != "0" && log != "1")) {
      throw FormatError("checkpoint: malformed preprocessing stats for " + c.name);
    }
    c.log_transform = log == "1";
    c.mean = parse_double(mean, c.name);
    c.stddev = parse_double(stddev, c.name);
    stats.channels.push_back(std::move(c));
  }
  return stats;
}

void append_adam_named(const AdamState& state, const std::string& prefix, std::vector<NamedTensor>& out) {
  for (std::size_t i = 0; i < state.first_moment.size(); ++i) {
    out.push_back({prefix + ".m." + std::to_string(i), state.first_moment[i]});
    out.push_back({prefix + ".v." + std::to_string(i), state.second_moment[i]});
  }
}

Checkpoint make_gan_checkpoint(const GanTrainer& trainer, const PreprocStats& stats, const RunConfig& config) {
  const GanModel& model = trainer.model();
  Checkpoint ckpt;
  ckpt.config = config;
  model.generator.append_named("generator", ckpt.tensors);
  model.critic.append_named("critic", ckpt.tensors);
  append_adam_named(model.generator_opt, "opt.generator", ckpt.tensors);
  append_adam_named(model.critic_opt, "opt.critic", ckpt.tensors);
  ckpt.meta["kind"] = "gan";
  ckpt.meta["generator_steps"] = std::to_string(model.generator_steps);
  ckpt.meta["critic_steps"] = std::to_string(model.critic_steps);
  ckpt.meta["opt.generator.step"] = std::to_string(model.generator_opt.step_count);
  ckpt.meta["opt.critic.step"] = std::to_string(model.critic_opt.step_count);
  ckpt.meta["rng"] = trainer.rng_state();
  std::string channels;
  for (const auto& c : trainer.data().channels) channels += (channels.empty() ? "" : ",") + c;
  ckpt.meta["channels"] = channels;
  store_preproc_stats(stats, ckpt);
  return ckpt;
}

GanModel load_gan_model(const Checkpoint& ckpt) {
  if (ckpt.meta_value("kind") != "gan") throw FormatError("checkpoint does not hold a GAN");
  const Tensor& token = ckpt.tensor("generator.start_token");
  GanModel model = make_gan_model(ckpt.config.gan_config(), token.clone());
  std::vector<NamedTensor> target;
  model.generator.append_named("generator", target);
  model.critic.append_named("critic", target);
  restore_tensors(ckpt, target);
  restore_adam(ckpt, "opt.generator", model.generator.parameters(), model.generator_opt);
  restore_adam(ckpt, "opt.critic", model.critic.parameters(), model.critic_opt);
  model.generator_steps = parse_u64(ckpt.meta_value("generator_steps"), "generator_steps");
  model.critic_steps = parse_u64(ckpt.meta_value("critic_steps"), "critic_steps");
  return model;
}

void restore_gan_trainer(const Checkpoint& ckpt, GanTrainer& trainer) {
  GanModel loaded = load_gan_model(ckpt);
  GanModel& model = trainer.model();
  if (loaded.generator.channels() != model.generator.channels()) {
    throw FormatError("checkpoint channel count does not match the training data");
  }
  model = std::move(loaded);
  trainer.set_rng_state(ckpt.meta_value("rng"));
}

Checkpoint make_forecast_checkpoint(const ForecastModel& model, const PreprocStats& stats, const RunConfig& config) {
  Checkpoint ckpt;
  ckpt.config = config;
  model.append_named("forecaster", ckpt.tensors);
  ckpt.meta["kind"] = "forecaster";
  ckpt.meta["cell"] = std::string(to_string(model.cell));
  store_preproc_stats(stats, ckpt);
  return ckpt;
}

ForecastModel load_forecast_model(const Checkpoint& ckpt) {
  if (ckpt.meta_value("kind") != "forecaster") throw FormatError("checkpoint does not hold a forecaster");
  ForecastConfig config = ckpt.config.forecast_config();
  config.cell = parse_cell_kind(ckpt.meta_value("cell"));
  Rng rng(0);
  ForecastModel model = make_forecast_model(config, rng);
  std::vector<NamedTensor> target;
  model.append_named("forecaster", target);
  restore_tensors(ckpt, target);
  return model;
}

}  // namespace tsgan
