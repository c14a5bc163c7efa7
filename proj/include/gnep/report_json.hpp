#pragma once

#include <string>

#include "json.hpp"

namespace gnep {

/// Serializes a JSON document with floating-point numbers printed at 17
/// significant digits, so every double round-trips bit-exactly and the
/// output is stable across runs.
std::string dump_json(const nlohmann::json& j, int indent = 2);

}  // namespace gnep
