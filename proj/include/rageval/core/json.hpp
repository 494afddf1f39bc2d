#pragma once

#include <nlohmann/json.hpp>

namespace rageval {

// Insertion-ordered JSON keeps emitted files byte-stable across runs.
using Json = nlohmann::ordered_json;

}  // namespace rageval
