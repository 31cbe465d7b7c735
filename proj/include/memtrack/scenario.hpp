#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memtrack/core.hpp"
#include "memtrack/policy.hpp"
#include "memtrack/rng.hpp"
#include "memtrack/tracker_config.hpp"

namespace memtrack {

enum class EventKind { Occlusion, ExitReentry, RapidMotion };

const char* event_kind_name(EventKind kind);
EventKind event_kind_from_name(const std::string& name);

/// A scripted disturbance on one target over [start, end).
/// Occlusion scales visibility by (1 - severity); ExitReentry zeroes
/// visibility and relocates the target at window end; RapidMotion scales
/// velocity by (1 + 10 * severity) inside the window.
struct Event {
    EventKind kind = EventKind::Occlusion;
    int target = 0;
    std::int64_t start = 0;
    std::int64_t end = 0;
    double severity = 1.0;
};

enum class DistractorMotion { Parallel, Crossing };

const char* distractor_motion_name(DistractorMotion motion);
DistractorMotion distractor_motion_from_name(const std::string& name);

/// A non-target object resembling one target: embedding cosine `similarity`
/// to the shadowed target, suppressing its quality score via crowding.
struct DistractorSpec {
    double similarity = 0.9;
    DistractorMotion motion = DistractorMotion::Parallel;
    double crowding = 1.0;
    int target = -1;  // -1: assigned round-robin at generation
};

struct NoiseModel {
    double sigma_q = 0.02;
    double sigma_p = 0.02;
    double sigma_pos = 0.5;
};

struct ScenarioConfig {
    int num_targets = 1;
    std::int64_t num_frames = 1;
    double world_w = 100.0;
    double world_h = 100.0;
    std::uint64_t seed = 0;
    std::vector<Event> events;
    std::vector<DistractorSpec> distractors;
    NoiseModel noise;
    std::size_t feature_dim = kDefaultFeatureDim;
    std::size_t pointer_dim = kDefaultPointerDim;
    /// Identity embeddings are redrawn until pairwise |cos| stays at or
    /// below this bound (keeps re-id thresholds unambiguous).
    double embed_separation = 0.4;

    void validate() const;
};

/// Per-frame ground-truth state of one identity or distractor.
struct GtState {
    MaskGeom mask;           // raw geometry; visibility kept separately
    double visibility = 1.0; // in [0,1]
};

/// Seeded ground-truth world: frozen identity embeddings plus per-frame
/// geometry and visibility for identities and distractors.
struct GroundTruth {
    double world_w = 0.0;
    double world_h = 0.0;
    std::vector<FeatureVec> identity_embeddings;          // [identity]
    std::vector<FeatureVec> distractor_embeddings;        // [distractor]
    std::vector<double> distractor_crowding;              // kappa per distractor
    std::vector<std::vector<GtState>> identity_frames;    // [frame][identity]
    std::vector<std::vector<GtState>> distractor_frames;  // [frame][distractor]
    std::vector<std::vector<double>> pairwise_abs_cos;    // metadata, [i][j]

    std::int64_t num_frames() const { return static_cast<std::int64_t>(identity_frames.size()); }
    int num_identities() const {
        return identity_frames.empty() ? static_cast<int>(identity_embeddings.size())
                                       : static_cast<int>(identity_frames.front().size());
    }
};

/// Builds the deterministic world: uniform initial positions, constant
/// velocity with reflective bounds, events applied per their definitions.
GroundTruth generate(const ScenarioConfig& config);

/// Perception frontend for one frame: quality scores from visibility and
/// distractor crowding, jittered mask centers, identity embeddings when
/// visible, presence = max visibility, all noise from `rng`.
FrameInput perceive(const GroundTruth& gt, std::int64_t t, const ScenarioConfig& config, Rng& rng);

/// generate + perceive over every frame.
std::vector<FrameInput> make_stream(const GroundTruth& gt, const ScenarioConfig& config);

/// Canned scenario plus tracker settings for one failure archetype.
struct ArchetypePreset {
    std::string name;
    ScenarioConfig scenario;
    TrackerConfig tracker;
};

/// Canonical configs for the case studies: occlusion, reentry,
/// distractor_parallel, distractor_crossing, rapid_motion, density(N).
ArchetypePreset archetype(const std::string& name, std::uint64_t seed);

}  // namespace memtrack
