#pragma once

#include <filesystem>

#include "n2n/mlp.hpp"

namespace n2n {

/// Writes the full parameter set as a JSON container mapping tensor name to
/// {shape, row-major values}. Doubles round-trip exactly.
void save_checkpoint(const MlpParams& params, const std::filesystem::path& path);

/// Loads a checkpoint written by save_checkpoint. Throws std::runtime_error
/// on missing files or malformed containers.
MlpParams load_checkpoint(const std::filesystem::path& path);

}  // namespace n2n
