#pragma once

#include <string>
#include <variant>

#include "ttrz/dense.hpp"
#include "ttrz/nn.hpp"
#include "ttrz/tt_matrix.hpp"
#include "ttrz/tt_vector.hpp"

namespace ttrz {

/// Payload kinds of the TTRZ1 tensor container.
using Payload = std::variant<DenseTensor, TTVector, TTMatrix, Network>;

/// Container layout: magic "TTRZ1", a little-endian u64 byte length, a
/// UTF-8 JSON metadata block, then the raw 64-bit little-endian float
/// segments in the order the metadata declares. Round trips are bit-exact.
void write_container(const std::string& path, const Payload& payload);

/// Throws IoError on missing, truncated, or malformed files.
Payload read_container(const std::string& path);

const char* payload_kind_name(const Payload& payload);
std::size_t payload_param_count(const Payload& payload);

} // namespace ttrz
