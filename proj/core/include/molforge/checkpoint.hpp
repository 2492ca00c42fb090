#pragma once

#include <cstdint>
#include <filesystem>

#include "molforge/network.hpp"

namespace molforge {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ValueNetwork network;
  Adam optimizer;
};

/// Writes the network parameters and Adam moments. Throws IoError.
void save_checkpoint(const ValueNetwork& net, const Adam& optimizer, const std::filesystem::path& path);

/// Throws IoError, VersionMismatch or CorruptCheckpoint. The optimizer comes
/// back with default hyperparameters and the saved step count and moments.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace molforge
