#include "memtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "memtrack/assignment.hpp"
#include "memtrack/geometry.hpp"

namespace memtrack {

namespace {

struct Det {
    int id = 0;
    double x = 0.0, y = 0.0, r = 0.0;  // visible (effective) disc
};

double det_iou(const Det& a, const Det& b) {
    if (a.r <= 0.0 || b.r <= 0.0) return 0.0;
    // Canonical operand order keeps the value exactly symmetric.
    const Det* first = &a;
    const Det* second = &b;
    if (std::tie(b.r, b.x, b.y) < std::tie(a.r, a.x, a.y)) std::swap(first, second);
    double dx = first->x - second->x, dy = first->y - second->y;
    double lens = disc_lens_area(first->r, second->r, std::sqrt(dx * dx + dy * dy));
    double uni = kPi * first->r * first->r + kPi * second->r * second->r - lens;
    return uni > 0.0 ? lens / uni : 0.0;
}

std::vector<std::vector<Det>> pred_dets(const RunRecord& run) {
    std::vector<std::vector<Det>> frames;
    frames.reserve(run.frames.size());
    for (const FrameResult& frame : run.frames) {
        std::vector<Det> dets;
        for (const TrackOutput& out : frame.outputs) {
            if (out.mask.blank()) continue;
            dets.push_back({out.track_id, out.mask.center_x, out.mask.center_y,
                            out.mask.effective_radius()});
        }
        frames.push_back(std::move(dets));
    }
    return frames;
}

std::vector<std::vector<Det>> gt_dets(const GroundTruth& gt) {
    std::vector<std::vector<Det>> frames;
    frames.reserve(static_cast<std::size_t>(gt.num_frames()));
    for (std::int64_t t = 0; t < gt.num_frames(); ++t) {
        std::vector<Det> dets;
        const auto& states = gt.identity_frames[static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (states[i].visibility <= 0.0) continue;
            const MaskGeom& m = states[i].mask;
            dets.push_back({static_cast<int>(i), m.center_x, m.center_y,
                            m.radius * std::sqrt(states[i].visibility)});
        }
        frames.push_back(std::move(dets));
    }
    return frames;
}

void check_frame_ranges(const RunRecord& run, const GroundTruth& gt) {
    if (static_cast<std::int64_t>(run.frames.size()) != gt.num_frames()) {
        throw Error(ErrorCode::FrameRangeMismatch,
                    "run has " + std::to_string(run.frames.size()) + " frames, gt has " +
                        std::to_string(gt.num_frames()));
    }
}

/// Pairs each visible identity with its slot's non-blank prediction.
/// Calls fn(pred_or_null, gt_state) once per (frame, visible identity).
template <typename Fn>
void for_each_visible_pair(const RunRecord& run, const GroundTruth& gt, Fn&& fn) {
    check_frame_ranges(run, gt);
    for (std::size_t k = 0; k < run.frames.size(); ++k) {
        const auto& states = gt.identity_frames[k];
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (states[i].visibility <= 0.0) continue;
            const TrackOutput* pred = nullptr;
            for (const TrackOutput& out : run.frames[k].outputs) {
                if (out.slot == static_cast<int>(i) && !out.mask.blank()) {
                    pred = &out;
                    break;
                }
            }
            fn(pred, states[i]);
        }
    }
}

struct MatchCounts {
    long tp = 0, fn = 0, fp = 0;
    // (pred id, gt id) -> joint TP count across the run
    std::map<std::pair<int, int>, long> pair_tp;
    std::unordered_map<int, long> pred_count;
    std::unordered_map<int, long> gt_count;
};

HotaResult accumulate_hota(const std::vector<std::vector<Det>>& preds,
                           const std::vector<std::vector<Det>>& gts,
                           const std::vector<double>& alpha_set,
                           const std::function<std::vector<int>(
                               const std::vector<std::vector<double>>&)>& matcher) {
    long total_pred = 0, total_gt = 0;
    for (const auto& f : preds) total_pred += static_cast<long>(f.size());
    for (const auto& f : gts) total_gt += static_cast<long>(f.size());

    HotaResult result;
    for (double alpha : alpha_set) {
        if (total_pred == 0 && total_gt == 0) {
            result.deta_per_alpha.push_back(1.0);
            result.assa_per_alpha.push_back(1.0);
            result.hota_per_alpha.push_back(1.0);
            continue;
        }
        MatchCounts counts;
        for (std::size_t k = 0; k < preds.size(); ++k) {
            const auto& p = preds[k];
            const auto& g = gts[k];
            for (const Det& d : p) counts.pred_count[d.id] += 1;
            for (const Det& d : g) counts.gt_count[d.id] += 1;
            if (p.empty() || g.empty()) {
                counts.fp += static_cast<long>(p.size());
                counts.fn += static_cast<long>(g.size());
                continue;
            }
            std::vector<std::vector<double>> weights(p.size(),
                                                     std::vector<double>(g.size(), -1.0));
            for (std::size_t i = 0; i < p.size(); ++i) {
                for (std::size_t j = 0; j < g.size(); ++j) {
                    double v = det_iou(p[i], g[j]);
                    if (v >= alpha) weights[i][j] = v;
                }
            }
            std::vector<int> match = matcher(weights);
            long matched = 0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (match[i] < 0) continue;
                ++matched;
                counts.pair_tp[{p[i].id, g[static_cast<std::size_t>(match[i])].id}] += 1;
            }
            counts.tp += matched;
            counts.fp += static_cast<long>(p.size()) - matched;
            counts.fn += static_cast<long>(g.size()) - matched;
        }

        double deta = 0.0;
        long det_denominator = counts.tp + counts.fn + counts.fp;
        if (det_denominator > 0) deta = static_cast<double>(counts.tp) / det_denominator;

        double assa = 0.0;
        if (counts.tp > 0) {
            double acc = 0.0;
            for (const auto& [ids, tpa] : counts.pair_tp) {
                long fna = counts.gt_count[ids.second] - tpa;
                long fpa = counts.pred_count[ids.first] - tpa;
                double a = static_cast<double>(tpa) / static_cast<double>(tpa + fna + fpa);
                acc += a * static_cast<double>(tpa);  // once per TP instance
            }
            assa = acc / static_cast<double>(counts.tp);
        }

        result.deta_per_alpha.push_back(deta);
        result.assa_per_alpha.push_back(assa);
        result.hota_per_alpha.push_back(std::sqrt(deta * assa));
    }

    auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    result.deta = mean(result.deta_per_alpha);
    result.assa = mean(result.assa_per_alpha);
    result.hota = mean(result.hota_per_alpha);
    return result;
}

/// Exhaustive per-frame matcher: max TP count, ties by summed IoU, then
/// lexicographically smallest assignment vector.
std::vector<int> enumerate_matching(const std::vector<std::vector<double>>& weights) {
    const std::size_t rows = weights.size();
    std::vector<int> current(rows, -1), best(rows, -1);
    std::vector<bool> col_used(rows == 0 ? 0 : weights[0].size(), false);
    long best_count = -1;
    double best_sum = 0.0;

    std::function<void(std::size_t, long, double)> recurse = [&](std::size_t i, long count,
                                                                 double sum) {
        if (i == rows) {
            bool better = false;
            if (count > best_count) {
                better = true;
            } else if (count == best_count) {
                if (sum > best_sum) {
                    better = true;
                } else if (sum == best_sum) {
                    better = std::lexicographical_compare(current.begin(), current.end(),
                                                          best.begin(), best.end());
                }
            }
            if (better) {
                best = current;
                best_count = count;
                best_sum = sum;
            }
            return;
        }
        for (std::size_t j = 0; j < col_used.size(); ++j) {
            if (col_used[j] || weights[i][j] < 0.0) continue;
            col_used[j] = true;
            current[i] = static_cast<int>(j);
            recurse(i + 1, count + 1, sum + weights[i][j]);
            col_used[j] = false;
        }
        current[i] = -1;
        recurse(i + 1, count, sum);
    };
    recurse(0, 0, 0.0);
    return best;
}

}  // namespace

std::vector<double> default_alpha_set() {
    std::vector<double> alphas;
    for (int k = 1; k <= 19; ++k) alphas.push_back(0.05 * k);
    return alphas;
}

double iou(const MaskGeom& a, const MaskGeom& b) {
    Det da{0, a.center_x, a.center_y, a.effective_radius()};
    Det db{0, b.center_x, b.center_y, b.effective_radius()};
    return det_iou(da, db);
}

double j_score(const RunRecord& run, const GroundTruth& gt) {
    double sum = 0.0;
    long pairs = 0;
    for_each_visible_pair(run, gt, [&](const TrackOutput* pred, const GtState& state) {
        ++pairs;
        if (pred == nullptr) return;
        MaskGeom gt_mask = MaskGeom::unchecked(state.mask.center_x, state.mask.center_y,
                                               state.mask.radius, state.visibility);
        sum += iou(pred->mask, gt_mask);
    });
    return pairs == 0 ? 1.0 : sum / static_cast<double>(pairs);
}

namespace {

struct PixelSet {
    // Pixel coordinates on the world-anchored grid; may be negative.
    std::vector<std::pair<int, int>> pixels;
};

PixelSet raster_boundary(double cx, double cy, double radius, double scale) {
    PixelSet out;
    if (radius <= 0.0 || radius * scale < 1e-9) return out;
    auto inside = [&](int px, int py) {
        double wx = (px + 0.5) / scale;
        double wy = (py + 0.5) / scale;
        double dx = wx - cx, dy = wy - cy;
        return dx * dx + dy * dy <= radius * radius;
    };
    int lo_x = static_cast<int>(std::floor((cx - radius) * scale)) - 1;
    int hi_x = static_cast<int>(std::ceil((cx + radius) * scale)) + 1;
    int lo_y = static_cast<int>(std::floor((cy - radius) * scale)) - 1;
    int hi_y = static_cast<int>(std::ceil((cy + radius) * scale)) + 1;
    for (int py = lo_y; py <= hi_y; ++py) {
        for (int px = lo_x; px <= hi_x; ++px) {
            if (!inside(px, py)) continue;
            if (!inside(px - 1, py) || !inside(px + 1, py) || !inside(px, py - 1) ||
                !inside(px, py + 1)) {
                out.pixels.emplace_back(px, py);
            }
        }
    }
    return out;
}

/// Fraction of `from` boundary pixels within `tol_px` (pixel centers) of any
/// `to` boundary pixel, via stamped dilation of `to` into a window bitmap.
double boundary_coverage(const PixelSet& from, const PixelSet& to, double tol_px) {
    if (from.pixels.empty()) return 0.0;
    if (to.pixels.empty()) return 0.0;
    const int reach = static_cast<int>(std::floor(tol_px));
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
            if (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy <= tol_px * tol_px) {
                offsets.emplace_back(dx, dy);
            }
        }
    }
    int lo_x = to.pixels[0].first, hi_x = lo_x, lo_y = to.pixels[0].second, hi_y = lo_y;
    for (const auto& [px, py] : to.pixels) {
        lo_x = std::min(lo_x, px);
        hi_x = std::max(hi_x, px);
        lo_y = std::min(lo_y, py);
        hi_y = std::max(hi_y, py);
    }
    lo_x -= reach + 1;
    lo_y -= reach + 1;
    hi_x += reach + 1;
    hi_y += reach + 1;
    const int width = hi_x - lo_x + 1, height = hi_y - lo_y + 1;
    std::vector<std::uint8_t> dilated(static_cast<std::size_t>(width) * height, 0);
    for (const auto& [px, py] : to.pixels) {
        for (const auto& [dx, dy] : offsets) {
            int x = px + dx - lo_x, y = py + dy - lo_y;
            dilated[static_cast<std::size_t>(y) * width + x] = 1;
        }
    }
    long covered = 0;
    for (const auto& [px, py] : from.pixels) {
        int x = px - lo_x, y = py - lo_y;
        if (x >= 0 && x < width && y >= 0 && y < height &&
            dilated[static_cast<std::size_t>(y) * width + x] != 0) {
            ++covered;
        }
    }
    return static_cast<double>(covered) / static_cast<double>(from.pixels.size());
}

}  // namespace

double f_boundary(const RunRecord& run, const GroundTruth& gt, int resolution) {
    if (resolution < 64) {
        throw Error(ErrorCode::RangeViolation, "resolution must be >= 64");
    }
    const double scale = static_cast<double>(resolution) / std::max(gt.world_w, gt.world_h);
    const double tol_px = 0.008 * std::sqrt(2.0) * static_cast<double>(resolution);

    double sum = 0.0;
    long pairs = 0;
    for_each_visible_pair(run, gt, [&](const TrackOutput* pred, const GtState& state) {
        ++pairs;
        if (pred == nullptr) return;
        PixelSet pb = raster_boundary(pred->mask.center_x, pred->mask.center_y,
                                      pred->mask.effective_radius(), scale);
        PixelSet gb = raster_boundary(state.mask.center_x, state.mask.center_y,
                                      state.mask.radius * std::sqrt(state.visibility), scale);
        if (pb.pixels.empty() && gb.pixels.empty()) {
            sum += 1.0;
            return;
        }
        if (pb.pixels.empty() || gb.pixels.empty()) return;  // contributes 0
        double precision = boundary_coverage(pb, gb, tol_px);
        double recall = boundary_coverage(gb, pb, tol_px);
        if (precision + recall > 0.0) sum += 2.0 * precision * recall / (precision + recall);
    });
    return pairs == 0 ? 1.0 : sum / static_cast<double>(pairs);
}

long id_switches(const RunRecord& run, const GroundTruth& gt, double alpha) {
    check_frame_ranges(run, gt);
    auto preds = pred_dets(run);
    long switches = 0;
    const int n = gt.num_identities();
    for (int identity = 0; identity < n; ++identity) {
        int last_id = -1;
        for (std::size_t k = 0; k < preds.size(); ++k) {
            const GtState& state = gt.identity_frames[k][static_cast<std::size_t>(identity)];
            if (state.visibility <= 0.0) continue;
            Det g{identity, state.mask.center_x, state.mask.center_y,
                  state.mask.radius * std::sqrt(state.visibility)};
            int best_id = -1;
            double best_iou = 0.0;
            for (const Det& p : preds[k]) {
                double v = det_iou(p, g);
                if (v < alpha) continue;
                if (v > best_iou || (v == best_iou && best_id >= 0 && p.id < best_id)) {
                    best_iou = v;
                    best_id = p.id;
                }
            }
            if (best_id < 0) continue;
            if (last_id >= 0 && best_id != last_id) ++switches;
            last_id = best_id;
        }
    }
    return switches;
}

HotaResult hota(const RunRecord& run, const GroundTruth& gt,
                const std::vector<double>& alpha_set) {
    check_frame_ranges(run, gt);
    return accumulate_hota(pred_dets(run), gt_dets(gt), alpha_set,
                           max_cardinality_max_weight_matching);
}

HotaResult oracle_hota(const RunRecord& run, const GroundTruth& gt,
                       const std::vector<double>& alpha_set) {
    check_frame_ranges(run, gt);
    if (run.frames.size() > 6) {
        throw Error(ErrorCode::InstanceTooLarge,
                    std::to_string(run.frames.size()) + " frames > 6");
    }
    auto preds = pred_dets(run);
    auto gts = gt_dets(gt);
    std::unordered_set<int> pred_ids, gt_ids;
    for (const auto& f : preds) {
        for (const Det& d : f) pred_ids.insert(d.id);
    }
    for (const auto& f : gts) {
        for (const Det& d : f) gt_ids.insert(d.id);
    }
    if (pred_ids.size() > 4) {
        throw Error(ErrorCode::InstanceTooLarge, std::to_string(pred_ids.size()) + " tracks > 4");
    }
    if (gt_ids.size() > 4) {
        throw Error(ErrorCode::InstanceTooLarge,
                    std::to_string(gt_ids.size()) + " identities > 4");
    }
    return accumulate_hota(preds, gts, alpha_set, enumerate_matching);
}

MetricsReport evaluate(const RunRecord& run, const GroundTruth& gt,
                       const std::vector<double>& alpha_set, int resolution) {
    MetricsReport report;
    report.j = j_score(run, gt);
    report.f = f_boundary(run, gt, resolution);
    report.jf = 0.5 * (report.j + report.f);
    HotaResult h = hota(run, gt, alpha_set);
    report.hota = h.hota;
    report.deta = h.deta;
    report.assa = h.assa;
    report.idsw = id_switches(run, gt);
    return report;
}

std::vector<DensityGapRow> density_gap(const std::vector<DensitySample>& samples) {
    std::map<int, std::map<std::uint64_t, std::pair<const MetricsReport*, const MetricsReport*>>>
        by_density;
    for (const DensitySample& s : samples) {
        auto& slot = by_density[s.num_targets][s.seed];
        if (s.policy == PolicyKind::Coupled) {
            slot.first = &s.report;
        } else {
            slot.second = &s.report;
        }
    }
    std::vector<DensityGapRow> rows;
    for (const auto& [n, seeds] : by_density) {
        DensityGapRow row;
        row.num_targets = n;
        std::vector<double> hota_deltas, idsw_deltas;
        for (const auto& [seed, pair] : seeds) {
            if (pair.first == nullptr || pair.second == nullptr) {
                throw Error(ErrorCode::MissingPolicy,
                            "density " + std::to_string(n) + " seed " + std::to_string(seed) +
                                " lacks one policy");
            }
            row.hota_coupled += pair.first->hota;
            row.hota_decoupled += pair.second->hota;
            row.idsw_coupled += static_cast<double>(pair.first->idsw);
            row.idsw_decoupled += static_cast<double>(pair.second->idsw);
            hota_deltas.push_back(pair.second->hota - pair.first->hota);
            idsw_deltas.push_back(static_cast<double>(pair.second->idsw) -
                                  static_cast<double>(pair.first->idsw));
        }
        const double k = static_cast<double>(seeds.size());
        row.seeds = static_cast<int>(seeds.size());
        row.hota_coupled /= k;
        row.hota_decoupled /= k;
        row.idsw_coupled /= k;
        row.idsw_decoupled /= k;
        auto mean_se = [&](const std::vector<double>& deltas, double& mean, double& se) {
            double s = 0.0;
            for (double d : deltas) s += d;
            mean = s / k;
            if (deltas.size() > 1) {
                double var = 0.0;
                for (double d : deltas) var += (d - mean) * (d - mean);
                var /= (k - 1.0);
                se = std::sqrt(var / k);
            }
        };
        mean_se(hota_deltas, row.delta_hota, row.se_delta_hota);
        mean_se(idsw_deltas, row.delta_idsw, row.se_delta_idsw);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace memtrack
