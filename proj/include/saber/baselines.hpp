#pragma once

#include <string>

#include "saber/geometry.hpp"
#include "saber/model.hpp"

namespace saber {

// Constant-velocity model: repeat the last displacement.
inline Vec2 cvm_predict(const Vec2& prev_pos, const Vec2& cur_pos) { return cur_pos + (cur_pos - prev_pos); }

// Maps a detector name ("cvm" or a model variant) onto the shared model
// configuration; unknown names throw. CVM itself has no parameters and is
// selected by passing a null model to the scoring pipeline.
struct DetectorKind {
    bool is_cvm = false;
    Variant variant = Variant::SaberVae;
};

DetectorKind detector_from_name(const std::string& name);

}  // namespace saber
