#pragma once

// Single point of access for the JSON library so the rest of the tree does
// not care where the toolchain image puts the header.

#include <json.hpp>

namespace blindsearch {
using json = nlohmann::json;
}
