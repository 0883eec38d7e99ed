#pragma once

#include <string>

#include "tnspec/pts.hpp"

namespace tnspec {

// Dense-state disk format: a directory with manifest.json and one raw
// binary tensor (complex doubles interleaved, row-major site order) —
// same scheme as the MPS format with a single tensor.
void save_state(const PureState& psi, const std::string& dir);
PureState load_state(const std::string& dir);

}  // namespace tnspec
