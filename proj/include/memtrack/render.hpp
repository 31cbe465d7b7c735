#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memtrack/scenario.hpp"
#include "memtrack/tracker.hpp"

namespace memtrack {

/// RGB raster of one frame: predictions as filled discs colored by track id
/// (12-color palette), ground truth as white outlines on top. The square
/// canvas spans [0, max(W, H)] on both axes, row 0 at world y = 0.
std::vector<std::uint8_t> render_frame(const FrameResult& frame,
                                       const std::vector<GtState>& gt_states, double world_w,
                                       double world_h, int resolution);

/// Binary P6, max value 255.
std::string encode_ppm(const std::vector<std::uint8_t>& rgb, int resolution);

/// One image per frame, named frame_0000.ppm, frame_0001.ppm, ...
/// Rejects resolution < 64.
void render_run(const RunRecord& run, const GroundTruth& gt, const std::string& outdir,
                int resolution);

}  // namespace memtrack
