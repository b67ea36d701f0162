#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "rpaf/nn/dense_net.hpp"

namespace rpaf::nn {

// Layout (all integers and floats little-endian):
//   "RPAF" | u32 version | u32 network count
//   per network: u32 layer count L | (L + 1) x u32 dims | L x u8 activation
//                | per layer: row-major f64 weights, then f64 biases
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { kIo, kMalformed, kVersion };

  CheckpointError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::vector<std::uint8_t> encode_checkpoint(const std::vector<DenseNet>& nets);
std::vector<DenseNet> decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::vector<DenseNet>& nets, const std::filesystem::path& path);
std::vector<DenseNet> load_checkpoint(const std::filesystem::path& path);

}  // namespace rpaf::nn
