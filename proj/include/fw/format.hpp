#pragma once

#include <string>

namespace fw {

/// Shortest text form of a double that reads back to the same value.
std::string format_real(double value);

}  // namespace fw
