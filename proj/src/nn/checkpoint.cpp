#include "rpaf/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace rpaf::nn {
namespace {

constexpr char kMagic[4] = {'R', 'P', 'A', 'F'};
// Guards against absurd allocations when decoding corrupted headers.
constexpr std::uint32_t kMaxLayers = 1024;
constexpr std::uint32_t kMaxWidth = 1u << 20;

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      throw CheckpointError(CheckpointError::Kind::kMalformed, "checkpoint truncated");
    }
  }
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return std::bit_cast<double>(bits);
  }
  bool at_end() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const std::vector<DenseNet>& nets) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(nets.size()));
  for (const auto& net : nets) {
    w.u32(static_cast<std::uint32_t>(net.layer_count()));
    for (auto d : net.dims()) w.u32(static_cast<std::uint32_t>(d));
    for (const auto& layer : net.layers()) w.u8(static_cast<std::uint8_t>(layer.activation));
    for (double p : net.parameters()) w.f64(p);
  }
  return w.take();
}

std::vector<DenseNet> decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError(CheckpointError::Kind::kVersion, "not an RPAF checkpoint (bad magic)");
  }
  Reader r(bytes);
  for (std::size_t i = 0; i < sizeof(kMagic); ++i) r.u8();
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError(CheckpointError::Kind::kVersion,
                          "unsupported checkpoint version " + std::to_string(version));
  }
  const auto count = r.u32();
  std::vector<DenseNet> nets;
  for (std::uint32_t n = 0; n < count; ++n) {
    const auto layers = r.u32();
    if (layers == 0 || layers > kMaxLayers) {
      throw CheckpointError(CheckpointError::Kind::kMalformed, "bad layer count");
    }
    std::vector<std::size_t> dims(layers + 1);
    for (auto& d : dims) {
      d = r.u32();
      if (d == 0 || d > kMaxWidth) {
        throw CheckpointError(CheckpointError::Kind::kMalformed, "bad layer width");
      }
    }
    std::vector<Activation> acts(layers);
    for (auto& a : acts) {
      const auto tag = r.u8();
      if (tag > static_cast<std::uint8_t>(Activation::kLogistic)) {
        throw CheckpointError(CheckpointError::Kind::kMalformed, "unknown activation tag");
      }
      a = static_cast<Activation>(tag);
    }
    DenseNet net(std::move(dims), std::move(acts));
    r.need(net.parameter_count() * 8);
    for (double& p : net.parameters()) p = r.f64();
    nets.push_back(std::move(net));
  }
  if (!r.at_end()) {
    throw CheckpointError(CheckpointError::Kind::kMalformed, "trailing bytes after checkpoint");
  }
  return nets;
}

void save_checkpoint(const std::vector<DenseNet>& nets, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(nets);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(CheckpointError::Kind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError(CheckpointError::Kind::kIo, "short write to " + path.string());
}

std::vector<DenseNet> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Kind::kIo, "cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace rpaf::nn
