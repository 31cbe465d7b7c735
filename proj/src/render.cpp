#include "memtrack/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "memtrack/io.hpp"

namespace memtrack {

namespace {

struct Rgb {
    std::uint8_t r, g, b;
};

// Fixed 12-color palette, indexed by track_id % 12.
constexpr Rgb kPalette[12] = {
    {230, 25, 75},   {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
    {245, 130, 48},  {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
    {210, 245, 60},  {250, 190, 212}, {0, 128, 128},  {220, 190, 255},
};

void fill_disc(std::vector<std::uint8_t>& rgb, int resolution, double scale, double cx, double cy,
               double radius, Rgb color) {
    if (radius <= 0.0) return;
    int lo_x = std::max(0, static_cast<int>(std::floor((cx - radius) * scale)));
    int hi_x = std::min(resolution - 1, static_cast<int>(std::ceil((cx + radius) * scale)));
    int lo_y = std::max(0, static_cast<int>(std::floor((cy - radius) * scale)));
    int hi_y = std::min(resolution - 1, static_cast<int>(std::ceil((cy + radius) * scale)));
    for (int py = lo_y; py <= hi_y; ++py) {
        for (int px = lo_x; px <= hi_x; ++px) {
            double wx = (px + 0.5) / scale, wy = (py + 0.5) / scale;
            double dx = wx - cx, dy = wy - cy;
            if (dx * dx + dy * dy > radius * radius) continue;
            std::size_t at = 3 * (static_cast<std::size_t>(py) * resolution + px);
            rgb[at] = color.r;
            rgb[at + 1] = color.g;
            rgb[at + 2] = color.b;
        }
    }
}

void outline_disc(std::vector<std::uint8_t>& rgb, int resolution, double scale, double cx,
                  double cy, double radius, Rgb color) {
    if (radius <= 0.0) return;
    double half_band = 1.0 / scale;  // ~2px ring
    double outer = radius + half_band, inner = std::max(0.0, radius - half_band);
    int lo_x = std::max(0, static_cast<int>(std::floor((cx - outer) * scale)));
    int hi_x = std::min(resolution - 1, static_cast<int>(std::ceil((cx + outer) * scale)));
    int lo_y = std::max(0, static_cast<int>(std::floor((cy - outer) * scale)));
    int hi_y = std::min(resolution - 1, static_cast<int>(std::ceil((cy + outer) * scale)));
    for (int py = lo_y; py <= hi_y; ++py) {
        for (int px = lo_x; px <= hi_x; ++px) {
            double wx = (px + 0.5) / scale, wy = (py + 0.5) / scale;
            double dx = wx - cx, dy = wy - cy;
            double d2 = dx * dx + dy * dy;
            if (d2 > outer * outer || d2 < inner * inner) continue;
            std::size_t at = 3 * (static_cast<std::size_t>(py) * resolution + px);
            rgb[at] = color.r;
            rgb[at + 1] = color.g;
            rgb[at + 2] = color.b;
        }
    }
}

}  // namespace

std::vector<std::uint8_t> render_frame(const FrameResult& frame,
                                       const std::vector<GtState>& gt_states, double world_w,
                                       double world_h, int resolution) {
    if (resolution < 64) throw Error(ErrorCode::RangeViolation, "resolution must be >= 64");
    std::vector<std::uint8_t> rgb(3 * static_cast<std::size_t>(resolution) * resolution, 0);
    const double scale = static_cast<double>(resolution) / std::max(world_w, world_h);

    std::vector<const TrackOutput*> outputs;
    for (const TrackOutput& out : frame.outputs) outputs.push_back(&out);
    std::sort(outputs.begin(), outputs.end(), [](const TrackOutput* a, const TrackOutput* b) {
        return a->track_id < b->track_id;
    });
    for (const TrackOutput* out : outputs) {
        if (out->mask.blank()) continue;
        fill_disc(rgb, resolution, scale, out->mask.center_x, out->mask.center_y,
                  out->mask.effective_radius(),
                  kPalette[static_cast<std::size_t>(out->track_id) % 12]);
    }
    for (const GtState& state : gt_states) {
        if (state.visibility <= 0.0) continue;
        outline_disc(rgb, resolution, scale, state.mask.center_x, state.mask.center_y,
                     state.mask.radius, Rgb{255, 255, 255});
    }
    return rgb;
}

std::string encode_ppm(const std::vector<std::uint8_t>& rgb, int resolution) {
    char header[64];
    std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n", resolution, resolution);
    std::string out(header);
    out.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
    return out;
}

void render_run(const RunRecord& run, const GroundTruth& gt, const std::string& outdir,
                int resolution) {
    if (resolution < 64) throw Error(ErrorCode::RangeViolation, "resolution must be >= 64");
    if (static_cast<std::int64_t>(run.frames.size()) != gt.num_frames()) {
        throw Error(ErrorCode::FrameRangeMismatch, "run/gt frame counts differ");
    }
    std::filesystem::create_directories(outdir);
    for (std::size_t k = 0; k < run.frames.size(); ++k) {
        std::vector<std::uint8_t> rgb =
            render_frame(run.frames[k], gt.identity_frames[k], gt.world_w, gt.world_h, resolution);
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04zu.ppm", k);
        write_text_file(outdir + "/" + name, encode_ppm(rgb, resolution));
    }
}

}  // namespace memtrack
