#pragma once

#include <filesystem>

#include "flowsentry/optim.hpp"

namespace flowsentry {

/// Binary checkpoint: magic, format-version integer, then per parameter the
/// name, shape, and little-endian 64-bit float payloads for the value and
/// both Adam moments, followed by the shared step count.
void save_checkpoint(const std::filesystem::path& path, const ParameterStore& params);

ParameterStore load_checkpoint(const std::filesystem::path& path);

}  // namespace flowsentry
