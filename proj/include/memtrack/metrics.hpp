#pragma once

#include <cstdint>
#include <vector>

#include "memtrack/core.hpp"
#include "memtrack/policy.hpp"
#include "memtrack/scenario.hpp"
#include "memtrack/tracker.hpp"

namespace memtrack {

/// Run-level evaluation summary. All reals in [0,1].
struct MetricsReport {
    double j = 0.0;
    double f = 0.0;
    double jf = 0.0;
    double hota = 0.0;
    double deta = 0.0;
    double assa = 0.0;
    long idsw = 0;
};

/// The default HOTA threshold grid {0.05, 0.10, ..., 0.95}.
std::vector<double> default_alpha_set();

/// Intersection-over-union of two disc masks, each reduced to its visible
/// concentric disc (area scaled by visible_fraction). Blank masks have IoU 0
/// with everything.
double iou(const MaskGeom& a, const MaskGeom& b);

/// Region similarity: mean IoU over all (frame, visible identity) pairs,
/// pairing prediction to identity by slot; a visible identity with no
/// non-blank prediction contributes 0.
double j_score(const RunRecord& run, const GroundTruth& gt);

/// Boundary similarity: masks rasterized on the world-anchored pixel grid
/// (resolution along the longer world side), 1-pixel boundaries, precision /
/// recall with a dilation tolerance of 0.8% of the image diagonal, harmonic
/// mean, averaged over the same pairs as j_score.
double f_boundary(const RunRecord& run, const GroundTruth& gt, int resolution);

/// Per ground-truth identity, counts frames whose best-IoU (>= alpha)
/// matched track id differs from the previously matched one.
long id_switches(const RunRecord& run, const GroundTruth& gt, double alpha = 0.5);

struct HotaResult {
    double hota = 0.0;
    double deta = 0.0;
    double assa = 0.0;
    std::vector<double> hota_per_alpha;
    std::vector<double> deta_per_alpha;
    std::vector<double> assa_per_alpha;
};

/// HOTA decomposition over the alpha grid. Per-frame detection matching is
/// bijective, maximizing TP count then total IoU (assignment solver);
/// DetA = TP/(TP+FN+FP), AssA averages TPA/(TPA+FNA+FPA) over TPs,
/// HOTA_a = sqrt(DetA_a * AssA_a), and the headline values are means over
/// the grid.
HotaResult hota(const RunRecord& run, const GroundTruth& gt,
                const std::vector<double>& alpha_set = default_alpha_set());

/// Verification-only twin of hota: enumerates every per-frame bijective
/// matching (max TP count, ties by summed IoU then lexicographic order).
/// Rejects instances beyond 4 tracks, 6 frames, or 4 identities.
HotaResult oracle_hota(const RunRecord& run, const GroundTruth& gt,
                       const std::vector<double>& alpha_set = default_alpha_set());

/// Everything at once (the eval surface).
MetricsReport evaluate(const RunRecord& run, const GroundTruth& gt,
                       const std::vector<double>& alpha_set = default_alpha_set(),
                       int resolution = 512);

struct DensitySample {
    int num_targets = 0;
    PolicyKind policy = PolicyKind::Coupled;
    std::uint64_t seed = 0;
    MetricsReport report;
};

struct DensityGapRow {
    int num_targets = 0;
    int seeds = 0;
    double hota_coupled = 0.0;
    double hota_decoupled = 0.0;
    double delta_hota = 0.0;     // decoupled - coupled, mean over seeds
    double se_delta_hota = 0.0;  // standard error of the per-seed deltas
    double idsw_coupled = 0.0;
    double idsw_decoupled = 0.0;
    double delta_idsw = 0.0;
    double se_delta_idsw = 0.0;
};

/// Per-density paired deltas (Decoupled - Coupled), means over seeds with
/// standard errors. Both policies must be present for every density level.
std::vector<DensityGapRow> density_gap(const std::vector<DensitySample>& samples);

}  // namespace memtrack
