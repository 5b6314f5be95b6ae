#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dkgm/nn.hpp"
#include "dkgm/tensor.hpp"

namespace dkgm {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

/// Checkpoint format, bit-exact: magic bytes "DKGM", format version as a
/// 32-bit little-endian unsigned integer, then per tensor: 32-bit name
/// length, UTF-8 name, 32-bit rank, 32-bit dims, 64-bit little-endian
/// floating-point data. Tensors repeat until end of file.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors,
                     std::uint32_t version = kCheckpointVersion);

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

/// Per layer "<prefix>.layer<i>.weight" / ".bias", plus the architecture
/// under "<prefix>.spec.*" so the net round-trips by itself.
std::vector<NamedTensor> net_to_tensors(const TimeConditionedNet& net, const std::string& prefix);
TimeConditionedNet net_from_tensors(const std::vector<NamedTensor>& tensors,
                                    const std::string& prefix);

struct ModelMeta {
  int stage = 1;  // 1 or 2
  double noise_level = 0.0;
  std::size_t n_steps = 0;
  double b_lo = 0.0;
  double b_hi = 0.0;
};

/// Trained-model persistence: the net plus scalar metadata tensors named
/// meta.stage, meta.noise_level, meta.n_steps, meta.b_lo, meta.b_hi.
void save_stage_checkpoint(const std::filesystem::path& path, const TimeConditionedNet& net,
                           const ModelMeta& meta);
std::pair<TimeConditionedNet, ModelMeta> load_stage_checkpoint(const std::filesystem::path& path);

}  // namespace dkgm
