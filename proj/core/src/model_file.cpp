#include "eon/model_file.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include <zlib.h>

#include "eon/errors.hpp"

namespace eon {

namespace {

constexpr std::uint8_t kMagic[4] = {'E', 'O', 'N', '1'};
constexpr std::size_t kHeaderBytes = 4 + 2 + 16;
constexpr std::size_t kNeuronFixedBytes = 2 + 2 + 4;

class Writer {
public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v));
    u16(static_cast<std::uint16_t>(v >> 16));
  }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint16_t u16() {
    const auto v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    const std::uint32_t lo = u16();
    return lo | (std::uint32_t{u16()} << 16);
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  void skip(std::size_t n) { pos_ += n; }

private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint16_t narrow16(std::size_t v, const char* what) {
  if (v > 0xFFFF) {
    throw ConfigError(std::string(what) + " does not fit the model file's 16-bit field");
  }
  return static_cast<std::uint16_t>(v);
}

} // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  constexpr std::size_t kChunk = 1U << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const auto n = std::min(kChunk, bytes.size() - off);
    crc = ::crc32(crc, bytes.data() + off, static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_model(const Layer& layer) {
  const auto& cfg = layer.config();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + layer.size() * (kNeuronFixedBytes + CompressedVector::packed_size(cfg.pixels())) + 4);
  Writer w(out);
  w.bytes(kMagic);
  w.u16(kModelFormatVersion);
  w.u16(narrow16(cfg.side, "D"));
  w.u16(narrow16(cfg.kernel_side, "K_S"));
  w.u16(cfg.filters);
  w.u32(static_cast<std::uint32_t>(cfg.neurons));
  w.u16(narrow16(cfg.active, "W"));
  w.u16(narrow16(cfg.t_learn0, "T_learn[0]"));
  w.u16(narrow16(cfg.clusters, "clusters"));
  for (const auto& rec : layer.neurons()) {
    w.u16(narrow16(rec.t_learn, "T_learn"));
    w.u16(rec.t_fire ? narrow16(*rec.t_fire, "T_fire") : kInactiveFire);
    w.u32(rec.learned_count);
    w.bytes(rec.weights.vector().packed());
  }
  w.u32(crc32(out));
  return out;
}

Layer decode_model(std::span<const std::uint8_t> bytes, const std::optional<ModelConfig>& expected) {
  if (bytes.size() < kHeaderBytes + 4) {
    throw TruncatedPayload("model file shorter than its header");
  }
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw BadMagic("model file does not start with EON1");
  }
  Reader r(bytes);
  r.skip(4);
  if (const auto version = r.u16(); version != kModelFormatVersion) {
    throw UnsupportedVersion("model format version " + std::to_string(version) + " is not supported");
  }
  ModelConfig cfg;
  cfg.side = r.u16();
  cfg.kernel_side = r.u16();
  const auto filters = r.u16();
  cfg.neurons = r.u32();
  cfg.active = r.u16();
  cfg.t_learn0 = r.u16();
  cfg.clusters = r.u16();
  if (filters == 0 || filters > kMaxFilters) {
    throw FormatError("model file: filter count out of range");
  }
  cfg.filters = static_cast<std::uint8_t>(filters);

  const std::size_t packed = CompressedVector::packed_size(cfg.pixels());
  const std::size_t expected_size = kHeaderBytes + cfg.neurons * (kNeuronFixedBytes + packed) + 4;
  if (bytes.size() < expected_size) {
    throw TruncatedPayload("model file truncated: " + std::to_string(bytes.size()) + " of " +
                           std::to_string(expected_size) + " bytes");
  }
  if (bytes.size() > expected_size) {
    throw FormatError("model file has trailing bytes");
  }
  const auto body = bytes.first(expected_size - 4);
  Reader tail(bytes.subspan(expected_size - 4));
  if (tail.u32() != crc32(body)) {
    throw ChecksumMismatch("model file checksum mismatch");
  }
  if (expected && !(*expected == cfg)) {
    throw ConfigMismatch("model file was written for a different configuration (N = " +
                         std::to_string(cfg.neurons) + ", D = " + std::to_string(cfg.side) + ")");
  }

  std::vector<NeuronRecord> neurons;
  neurons.reserve(cfg.neurons);
  try {
    cfg.validate();
    for (std::size_t n = 0; n < cfg.neurons; ++n) {
      NeuronRecord rec;
      rec.t_learn = r.u16();
      if (const auto tf = r.u16(); tf != kInactiveFire) {
        rec.t_fire = tf;
      }
      rec.learned_count = r.u32();
      rec.weights = WeightVector(CompressedVector::from_packed(cfg.side, cfg.filters, r.bytes(packed)), cfg.active);
      neurons.push_back(std::move(rec));
    }
    return Layer(cfg, std::move(neurons));
  } catch (const ContractViolation& e) {
    throw FormatError(std::string("model file content invalid: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("model file content invalid: ") + e.what());
  }
}

void save_model(const Layer& layer, const std::filesystem::path& path) {
  const auto bytes = encode_model(layer);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

Layer load_model(const std::filesystem::path& path, const std::optional<ModelConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_model(bytes, expected);
}

std::uint32_t layer_fingerprint(const Layer& layer) {
  return crc32(encode_model(layer));
}

} // namespace eon
