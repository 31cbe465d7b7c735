#include "memtrack/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "memtrack/geometry.hpp"
#include "memtrack/log.hpp"

namespace memtrack {

namespace {

constexpr double kRadiusMin = 1.5;
constexpr double kRadiusMax = 3.0;
constexpr double kSpeedMin = 0.5;
constexpr double kSpeedMax = 1.5;
// Re-entry places the target at least this fraction of min(W,H) away from
// its exit-time position, far beyond any motion gate.
constexpr double kRelocationFraction = 0.35;

struct Body {
    double x = 0.0, y = 0.0;
    double vx = 0.0, vy = 0.0;
    double radius = 1.0;
};

void reflect_into(Body& b, double w, double h) {
    double lo_x = b.radius, hi_x = w - b.radius;
    double lo_y = b.radius, hi_y = h - b.radius;
    // Degenerate worlds (disc wider than the box) pin to center.
    if (lo_x >= hi_x) {
        b.x = w / 2.0;
        b.vx = 0.0;
    } else {
        while (b.x < lo_x || b.x > hi_x) {
            if (b.x < lo_x) {
                b.x = 2.0 * lo_x - b.x;
                b.vx = -b.vx;
            } else {
                b.x = 2.0 * hi_x - b.x;
                b.vx = -b.vx;
            }
        }
    }
    if (lo_y >= hi_y) {
        b.y = h / 2.0;
        b.vy = 0.0;
    } else {
        while (b.y < lo_y || b.y > hi_y) {
            if (b.y < lo_y) {
                b.y = 2.0 * lo_y - b.y;
                b.vy = -b.vy;
            } else {
                b.y = 2.0 * hi_y - b.y;
                b.vy = -b.vy;
            }
        }
    }
}

FeatureVec orthogonal_component(const FeatureVec& base, Rng& rng, std::size_t dim) {
    while (true) {
        std::vector<double> u = rng.unit_vector(dim);
        double proj = 0.0;
        for (std::size_t i = 0; i < dim; ++i) proj += u[i] * base[i];
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            u[i] -= proj * base[i];
            norm_sq += u[i] * u[i];
        }
        if (norm_sq > 1e-12) {
            double inv = 1.0 / std::sqrt(norm_sq);
            for (double& c : u) c *= inv;
            return FeatureVec::unchecked(std::move(u));
        }
    }
}

}  // namespace

const char* event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::Occlusion: return "occlusion";
        case EventKind::ExitReentry: return "exit_reentry";
        case EventKind::RapidMotion: return "rapid_motion";
    }
    return "?";
}

EventKind event_kind_from_name(const std::string& name) {
    if (name == "occlusion") return EventKind::Occlusion;
    if (name == "exit_reentry") return EventKind::ExitReentry;
    if (name == "rapid_motion") return EventKind::RapidMotion;
    throw Error(ErrorCode::ParseError, "unknown event kind '" + name + "'");
}

const char* distractor_motion_name(DistractorMotion motion) {
    return motion == DistractorMotion::Parallel ? "parallel" : "crossing";
}

DistractorMotion distractor_motion_from_name(const std::string& name) {
    if (name == "parallel") return DistractorMotion::Parallel;
    if (name == "crossing") return DistractorMotion::Crossing;
    throw Error(ErrorCode::ParseError, "unknown distractor motion '" + name + "'");
}

void ScenarioConfig::validate() const {
    if (num_targets < 1) throw Error(ErrorCode::RangeViolation, "targets must be >= 1");
    if (num_frames < 1) throw Error(ErrorCode::RangeViolation, "frames must be >= 1");
    if (!(world_w > 0.0 && world_h > 0.0)) {
        throw Error(ErrorCode::RangeViolation, "world must have positive extent");
    }
    if (noise.sigma_q < 0.0 || noise.sigma_p < 0.0 || noise.sigma_pos < 0.0) {
        throw Error(ErrorCode::RangeViolation, "noise sigmas must be >= 0");
    }
    if (pointer_dim < 1 || pointer_dim > feature_dim) {
        throw Error(ErrorCode::RangeViolation, "pointer_dim must lie in [1, feature_dim]");
    }
    if (!(embed_separation > 0.0 && embed_separation <= 1.0)) {
        throw Error(ErrorCode::RangeViolation, "embed_separation must lie in (0,1]");
    }
    for (const Event& e : events) {
        if (e.target < 0 || e.target >= num_targets) {
            throw Error(ErrorCode::InvalidWindow,
                        "event target " + std::to_string(e.target) + " out of range");
        }
        if (!(e.start >= 0 && e.start < e.end && e.end <= num_frames)) {
            throw Error(ErrorCode::InvalidWindow,
                        "window [" + std::to_string(e.start) + "," + std::to_string(e.end) +
                            ") outside [0," + std::to_string(num_frames) + ")");
        }
        if (!(e.severity >= 0.0 && e.severity <= 1.0)) {
            throw Error(ErrorCode::RangeViolation, "event severity outside [0,1]");
        }
    }
    for (const DistractorSpec& d : distractors) {
        if (!(d.similarity >= 0.0 && d.similarity <= 1.0)) {
            throw Error(ErrorCode::RangeViolation, "distractor similarity outside [0,1]");
        }
        if (!(d.crowding >= 0.0 && d.crowding <= 1.0)) {
            throw Error(ErrorCode::RangeViolation, "distractor crowding outside [0,1]");
        }
        if (d.target < -1 || d.target >= num_targets) {
            throw Error(ErrorCode::RangeViolation, "distractor target out of range");
        }
    }
}

GroundTruth generate(const ScenarioConfig& config) {
    config.validate();
    Rng rng(config.seed);
    const int n = config.num_targets;
    const std::int64_t frames = config.num_frames;

    GroundTruth gt;
    gt.world_w = config.world_w;
    gt.world_h = config.world_h;

    // Identity embeddings, redrawn until pairwise separation holds.
    gt.identity_embeddings.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        while (true) {
            FeatureVec candidate = FeatureVec::unchecked(rng.unit_vector(config.feature_dim));
            bool separated = true;
            for (const FeatureVec& existing : gt.identity_embeddings) {
                if (std::abs(candidate.dot(existing)) > config.embed_separation) {
                    separated = false;
                    break;
                }
            }
            if (separated) {
                gt.identity_embeddings.push_back(std::move(candidate));
                break;
            }
        }
    }
    gt.pairwise_abs_cos.assign(static_cast<std::size_t>(n), std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            gt.pairwise_abs_cos[i][j] =
                std::abs(gt.identity_embeddings[i].dot(gt.identity_embeddings[j]));
        }
    }

    std::vector<Body> bodies(static_cast<std::size_t>(n));
    for (Body& b : bodies) {
        b.radius = rng.uniform(kRadiusMin, kRadiusMax);
        b.x = rng.uniform(b.radius, std::max(b.radius, config.world_w - b.radius));
        b.y = rng.uniform(b.radius, std::max(b.radius, config.world_h - b.radius));
        double speed = rng.uniform(kSpeedMin, kSpeedMax);
        double angle = rng.uniform(0.0, kTwoPi);
        b.vx = speed * std::cos(angle);
        b.vy = speed * std::sin(angle);
    }

    // Distractor embeddings: exact target cosine, random orthogonal part.
    const int nd = static_cast<int>(config.distractors.size());
    std::vector<int> distractor_target(static_cast<std::size_t>(nd), 0);
    for (int d = 0; d < nd; ++d) {
        const DistractorSpec& spec = config.distractors[static_cast<std::size_t>(d)];
        int target = spec.target >= 0 ? spec.target : d % n;
        distractor_target[static_cast<std::size_t>(d)] = target;
        const FeatureVec& e_t = gt.identity_embeddings[static_cast<std::size_t>(target)];
        FeatureVec perp = orthogonal_component(e_t, rng, config.feature_dim);
        std::vector<double> mixed(config.feature_dim);
        double rho = spec.similarity;
        double w = std::sqrt(std::max(0.0, 1.0 - rho * rho));
        for (std::size_t i = 0; i < config.feature_dim; ++i) {
            mixed[i] = rho * e_t[i] + w * perp[i];
        }
        gt.distractor_embeddings.push_back(FeatureVec::normalized(std::move(mixed)));
        gt.distractor_crowding.push_back(spec.crowding);
    }

    // Crossing distractors get a straight path through their target's
    // projected position at a staggered crossing time.
    struct DistractorBody {
        bool parallel = true;
        double offset_x = 0.0, offset_y = 0.0;  // parallel: lateral offset
        Body body;                              // crossing: own trajectory
    };
    std::vector<DistractorBody> dbodies(static_cast<std::size_t>(nd));

    gt.identity_frames.assign(static_cast<std::size_t>(frames),
                              std::vector<GtState>(static_cast<std::size_t>(n)));
    gt.distractor_frames.assign(static_cast<std::size_t>(frames),
                                std::vector<GtState>(static_cast<std::size_t>(nd)));

    // Integrate identity trajectories with events applied.
    std::vector<Body> state = bodies;
    for (std::int64_t t = 0; t < frames; ++t) {
        for (int i = 0; i < n; ++i) {
            Body& b = state[static_cast<std::size_t>(i)];
            double visibility = 1.0;
            for (const Event& e : config.events) {
                if (e.target != i || t < e.start || t >= e.end) continue;
                switch (e.kind) {
                    case EventKind::Occlusion: visibility *= (1.0 - e.severity); break;
                    case EventKind::ExitReentry: visibility = 0.0; break;
                    case EventKind::RapidMotion: break;
                }
            }
            GtState& out = gt.identity_frames[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
            out.mask = MaskGeom::unchecked(b.x, b.y, b.radius, visibility);
            out.visibility = visibility;
        }

        // Advance to the next frame.
        for (int i = 0; i < n; ++i) {
            Body& b = state[static_cast<std::size_t>(i)];
            double speed_scale = 1.0;
            for (const Event& e : config.events) {
                if (e.kind == EventKind::RapidMotion && e.target == i && t >= e.start && t < e.end) {
                    speed_scale *= (1.0 + 10.0 * e.severity);
                }
            }
            b.x += b.vx * speed_scale;
            b.y += b.vy * speed_scale;
            reflect_into(b, config.world_w, config.world_h);
            // Re-entry from elsewhere: relocate when an absence window closes.
            for (const Event& e : config.events) {
                if (e.kind != EventKind::ExitReentry || e.target != i || t + 1 != e.end) continue;
                double min_dist = kRelocationFraction * std::min(config.world_w, config.world_h);
                double old_x = b.x, old_y = b.y;
                for (int attempt = 0; attempt < 1024; ++attempt) {
                    double nx = rng.uniform(b.radius, std::max(b.radius, config.world_w - b.radius));
                    double ny = rng.uniform(b.radius, std::max(b.radius, config.world_h - b.radius));
                    double dx = nx - old_x, dy = ny - old_y;
                    if (std::sqrt(dx * dx + dy * dy) >= min_dist || attempt == 1023) {
                        b.x = nx;
                        b.y = ny;
                        break;
                    }
                }
                double speed = std::sqrt(b.vx * b.vx + b.vy * b.vy);
                double angle = rng.uniform(0.0, kTwoPi);
                b.vx = speed * std::cos(angle);
                b.vy = speed * std::sin(angle);
            }
        }

        // Distractor geometry for this frame (computed after identities so
        // parallel distractors shadow the already-recorded positions).
        for (int d = 0; d < nd; ++d) {
            const DistractorSpec& spec = config.distractors[static_cast<std::size_t>(d)];
            DistractorBody& db = dbodies[static_cast<std::size_t>(d)];
            int target = distractor_target[static_cast<std::size_t>(d)];
            const GtState& tgt = gt.identity_frames[static_cast<std::size_t>(t)][static_cast<std::size_t>(target)];
            if (t == 0) {
                db.parallel = spec.motion == DistractorMotion::Parallel;
                db.body.radius = tgt.mask.radius;
                if (db.parallel) {
                    // Lateral offset perpendicular to the target's velocity,
                    // close enough for persistent heavy overlap.
                    const Body& tb = bodies[static_cast<std::size_t>(target)];
                    double speed = std::sqrt(tb.vx * tb.vx + tb.vy * tb.vy);
                    double px = speed > 0.0 ? -tb.vy / speed : 1.0;
                    double py = speed > 0.0 ? tb.vx / speed : 0.0;
                    double gap = 0.25 * (tgt.mask.radius + db.body.radius);
                    db.offset_x = px * gap;
                    db.offset_y = py * gap;
                } else {
                    // Straight line through the target's projected position
                    // at mid-run, staggered per distractor.
                    const Body& tb = bodies[static_cast<std::size_t>(target)];
                    std::int64_t t_cross = frames * (d + 1) / (nd + 1);
                    if (t_cross < 1) t_cross = 1;
                    double cx = tb.x + tb.vx * static_cast<double>(t_cross);
                    double cy = tb.y + tb.vy * static_cast<double>(t_cross);
                    double speed = std::sqrt(tb.vx * tb.vx + tb.vy * tb.vy);
                    if (speed <= 0.0) speed = kSpeedMin;
                    double dir_x = speed > 0.0 ? -tb.vy / speed : 1.0;
                    double dir_y = speed > 0.0 ? tb.vx / speed : 0.0;
                    double cross_speed = 1.2 * speed;
                    db.body.x = cx - dir_x * cross_speed * static_cast<double>(t_cross);
                    db.body.y = cy - dir_y * cross_speed * static_cast<double>(t_cross);
                    db.body.vx = dir_x * cross_speed;
                    db.body.vy = dir_y * cross_speed;
                }
            }
            GtState& out = gt.distractor_frames[static_cast<std::size_t>(t)][static_cast<std::size_t>(d)];
            if (db.parallel) {
                out.mask = MaskGeom::unchecked(tgt.mask.center_x + db.offset_x,
                                               tgt.mask.center_y + db.offset_y,
                                               db.body.radius, 1.0);
            } else {
                out.mask = MaskGeom::unchecked(db.body.x, db.body.y, db.body.radius, 1.0);
                db.body.x += db.body.vx;
                db.body.y += db.body.vy;
            }
            out.visibility = 1.0;
        }
    }

    return gt;
}

FrameInput perceive(const GroundTruth& gt, std::int64_t t, const ScenarioConfig& config, Rng& rng) {
    if (t < 0 || t >= gt.num_frames()) {
        throw Error(ErrorCode::FrameRangeMismatch,
                    "frame " + std::to_string(t) + " outside generated range");
    }
    const auto& identities = gt.identity_frames[static_cast<std::size_t>(t)];
    const auto& distractors = gt.distractor_frames[static_cast<std::size_t>(t)];

    FrameInput frame;
    frame.t = t;
    double max_visibility = 0.0;

    for (std::size_t i = 0; i < identities.size(); ++i) {
        const GtState& state = identities[i];
        const double v = state.visibility;
        max_visibility = std::max(max_visibility, v);

        double crowd = 0.0;
        for (std::size_t d = 0; d < distractors.size(); ++d) {
            double cos_sim = gt.identity_embeddings[i].dot(gt.distractor_embeddings[d]);
            double term = gt.distractor_crowding[d] * cos_sim *
                          disc_overlap(state.mask, distractors[d].mask);
            crowd = std::max(crowd, term);
        }

        double q = std::clamp(v * (1.0 - crowd) + rng.gaussian(config.noise.sigma_q), 0.0, 1.0);
        double cx = state.mask.center_x + rng.gaussian(config.noise.sigma_pos);
        double cy = state.mask.center_y + rng.gaussian(config.noise.sigma_pos);

        Observation obs;
        obs.slot = static_cast<int>(i);
        obs.mask = MaskGeom(cx, cy, state.mask.radius, v);
        obs.embedding = v > 0.0 ? gt.identity_embeddings[i]
                                : FeatureVec::unchecked(rng.unit_vector(config.feature_dim));
        obs.quality = Score(q);
        frame.observations.push_back(std::move(obs));
    }

    frame.presence = Score(std::clamp(max_visibility + rng.gaussian(config.noise.sigma_p), 0.0, 1.0));
    return frame;
}

std::vector<FrameInput> make_stream(const GroundTruth& gt, const ScenarioConfig& config) {
    Rng rng(derive_seed(config.seed, 0x70657263ull));  // perception stream
    std::vector<FrameInput> stream;
    stream.reserve(static_cast<std::size_t>(gt.num_frames()));
    for (std::int64_t t = 0; t < gt.num_frames(); ++t) {
        stream.push_back(perceive(gt, t, config, rng));
    }
    return stream;
}

ArchetypePreset archetype(const std::string& name, std::uint64_t seed) {
    ArchetypePreset preset;
    preset.name = name;
    ScenarioConfig& sc = preset.scenario;
    TrackerConfig& tc = preset.tracker;
    sc.seed = seed;
    tc.encoder_noise_seed = seed;
    tc.policy = PolicyConfig(0.5, PolicyKind::Coupled);

    auto finish = [&]() {
        tc.feature_dim = sc.feature_dim;
        tc.pointer_dim = sc.pointer_dim;
        sc.validate();
        tc.validate();
        return preset;
    };

    if (name == "reentry") {
        // One target absent for 2K frames (full FIFO flush at K=7) while the
        // rest stay fully visible; noiseless so the drift is deterministic.
        sc.num_targets = 3;
        sc.num_frames = 40;
        sc.feature_dim = 64;
        sc.noise = NoiseModel{0.0, 0.0, 0.0};
        sc.events.push_back({EventKind::ExitReentry, 0, 10,
                             10 + 2 * static_cast<std::int64_t>(kDefaultBankCapacity), 1.0});
        tc.mode = Mode::Pvs;
        return finish();
    }
    if (name == "occlusion") {
        // Heavy occlusion pollutes the bank under the coupled rule, then a
        // brief total loss makes the resulting drift observable.
        sc.num_targets = 3;
        sc.num_frames = 50;
        sc.events.push_back({EventKind::Occlusion, 0, 10, 24, 0.8});
        sc.events.push_back({EventKind::ExitReentry, 0, 24, 28, 1.0});
        tc.mode = Mode::Pcs;
        return finish();
    }
    if (name == "distractor_parallel") {
        sc.num_targets = 3;
        sc.num_frames = 50;
        sc.distractors.push_back({0.9, DistractorMotion::Parallel, 1.0, 0});
        sc.distractors.push_back({0.9, DistractorMotion::Parallel, 1.0, 1});
        tc.mode = Mode::Pcs;
        return finish();
    }
    if (name == "distractor_crossing") {
        sc.num_targets = 3;
        sc.num_frames = 50;
        sc.distractors.push_back({0.9, DistractorMotion::Crossing, 1.0, 0});
        sc.distractors.push_back({0.9, DistractorMotion::Crossing, 1.0, 1});
        tc.mode = Mode::Pcs;
        return finish();
    }
    if (name == "rapid_motion") {
        // A short absence first (pollutes the coupled bank), then a burst of
        // gate-breaking motion that forces appearance-based re-binding.
        sc.num_targets = 3;
        sc.num_frames = 50;
        sc.events.push_back({EventKind::ExitReentry, 0, 8, 16, 1.0});
        sc.events.push_back({EventKind::RapidMotion, 0, 20, 23, 0.8});
        tc.mode = Mode::Pcs;
        return finish();
    }
    if (name.rfind("density(", 0) == 0 && name.back() == ')') {
        int n = 0;
        try {
            n = std::stoi(name.substr(8, name.size() - 9));
        } catch (const std::exception&) {
            throw Error(ErrorCode::UnknownArchetype, name);
        }
        if (n < 1) throw Error(ErrorCode::UnknownArchetype, name);
        sc.num_targets = n;
        sc.num_frames = 90;
        sc.feature_dim = 64;
        const int reentries = (n + 2) / 3;  // one per ceil(N/3) targets
        for (int k = 0; k < reentries; ++k) {
            std::int64_t start = 10 + 16 * static_cast<std::int64_t>(k);
            sc.events.push_back({EventKind::ExitReentry, k, start,
                                 start + 2 * static_cast<std::int64_t>(kDefaultBankCapacity), 1.0});
        }
        tc.mode = Mode::Pvs;
        return finish();
    }
    throw Error(ErrorCode::UnknownArchetype, name);
}

}  // namespace memtrack
