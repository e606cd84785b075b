#pragma once

#include <string>

namespace credal {

// Shortest round-trip decimal form (std::to_chars); deterministic, so files
// built from the same doubles are byte-identical across runs.
std::string format_double(double v);

std::string read_cpu_model();
std::string compiler_description();
std::string build_type_description();

}  // namespace credal
