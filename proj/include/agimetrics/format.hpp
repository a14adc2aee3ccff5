#pragma once

#include <string>

namespace agimetrics {

// Shortest round-trip decimal form of a double, locale-independent.
std::string format_double(double v);

}  // namespace agimetrics
