#pragma once

#include <string>
#include <utility>

#include "credal/encoder.hpp"

namespace credal {

// JSON checkpoint, schema_version 1:
//   {"schema_version": 1, "config": {...}, "params": {"<key>": [flat doubles]}}
// Keys follow ModelParams::named(): embedding, layers.<i>.ln1.gain,
// layers.<i>.attn.wq, ..., head. Doubles round-trip exactly.
void save_checkpoint(const std::string& path, const ModelConfig& cfg, const ModelParams& params);

std::pair<ModelConfig, ModelParams> load_checkpoint(const std::string& path);

}  // namespace credal
