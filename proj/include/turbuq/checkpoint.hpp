#pragma once

// Model persistence: one JSON document holding the architecture, flat
// parameters, running statistics, standardization constants, and seed.
// Doubles are written in shortest exact form, so save -> load -> forward
// reproduces outputs bit for bit.

#include <cstdint>
#include <filesystem>

#include "turbuq/dataset.hpp"
#include "turbuq/nn.hpp"

namespace turbuq {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ml::CnnModel model;
  data::Standardization standardization;
  std::uint64_t seed = 0;
};

// CheckpointError on unwritable path or non-finite parameters.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

// CheckpointError on missing/unreadable file, version mismatch, or any
// inconsistency between the architecture and the stored arrays. The loaded
// model is in inference mode.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace turbuq
