#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "memtrack/core.hpp"
#include "memtrack/manifest.hpp"
#include "memtrack/policy.hpp"
#include "memtrack/tracker_config.hpp"

namespace memtrack {

/// Per-track output of one frame.
struct TrackOutput {
    int track_id = 0;
    int slot = 0;
    MaskGeom mask;
    Score quality;
    SelectionDecision decision;

    bool operator==(const TrackOutput& other) const {
        return track_id == other.track_id && slot == other.slot && mask == other.mask &&
               quality == other.quality && decision == other.decision;
    }
};

struct FrameResult {
    std::int64_t t = 0;
    Score presence;
    std::vector<TrackOutput> outputs;  // sorted by track_id
    std::vector<int> new_track_ids;

    bool operator==(const FrameResult& other) const {
        return t == other.t && presence == other.presence && outputs == other.outputs &&
               new_track_ids == other.new_track_ids;
    }
};

/// Full deterministic trace of one run; the unit of persistence and
/// evaluation.
struct RunRecord {
    RunManifest manifest;
    std::vector<FrameResult> frames;

    bool operator==(const RunRecord& other) const {
        return manifest == other.manifest && frames == other.frames;
    }
};

/// Synthetic stand-in for the learned memory encoder: the observation
/// embedding weighted by mask visibility plus seeded unit noise for the
/// invisible remainder, renormalized. v = 1 reproduces the embedding
/// exactly; v = 0 is pure noise. The noise vector is drawn on every call so
/// the stream advances identically regardless of v. The pointer is the
/// renormalized leading slice of the feature.
std::pair<FeatureVec, FeatureVec> encode_feature(const Observation& obs, Rng& rng,
                                                 std::size_t feature_dim,
                                                 std::size_t pointer_dim);

/// Max cosine between the query embedding and any stored feature.
double readout(const MemoryBank& bank, const FeatureVec& embedding);

/// Re-identification readout: max cosine over non-conditioning entries,
/// falling back to the conditioning entry only when it is the sole entry.
/// Keeps a fully flushed (polluted) bank unable to reclaim its identity.
double reid_readout(const MemoryBank& bank, const FeatureVec& embedding);

struct Association {
    std::vector<std::pair<std::size_t, std::size_t>> matches;  // (obs idx, track idx)
    std::vector<std::size_t> unmatched_observations;
    std::vector<std::size_t> unobserved_tracks;
};

/// Associates real observations to live tracks. PVS: slot-bound, gated by
/// center distance <= gate * (r_obs + r_last). PCS: greedy over
/// gate-passing pairs by descending readout similarity (>= assoc
/// threshold), ties by lowest slot then lowest track id. Indices refer to
/// the input spans; non-live tracks are skipped.
Association associate(std::span<const Observation> observations, std::span<const Track> tracks,
                      const TrackerConfig& config);

/// Picks the candidate with the highest reid_readout at or above the
/// threshold (ties by lowest track id); nullopt means a fresh identity.
std::optional<int> reidentify(const Observation& obs, std::span<const Track* const> candidates,
                              double reid_threshold);

/// The per-frame inference loop. Frames must arrive with strictly
/// increasing indices; the evaluation order inside a frame is fixed
/// (validate, associate, re-identify, init, encode, decide, update) and all
/// iteration is in ascending slot / track-id order, which makes a run a
/// pure function of (config, frame stream).
class Tracker {
public:
    explicit Tracker(const TrackerConfig& config);

    FrameResult step(const FrameInput& frame);

    const TrackerConfig& config() const { return config_; }
    const std::vector<Track>& tracks() const { return tracks_; }
    const std::vector<Group>& groups() const { return groups_; }
    const Track* find_track(int track_id) const;

private:
    TrackerConfig config_;
    std::vector<Track> tracks_;
    std::vector<Group> groups_;
    std::unordered_map<int, std::size_t> id_to_index_;
    std::unordered_map<int, std::size_t> id_to_group_;
    std::unordered_set<int> used_ids_;
    std::unordered_set<int> known_slots_;
    int next_fresh_id_ = 0;
    std::int64_t last_t_ = -1;
    bool first_frame_done_ = false;

    int allocate_id(int preferred);
    std::size_t create_track(const Observation& obs, std::int64_t t);
};

/// Folds step over the stream.
RunRecord run(std::span<const FrameInput> frames, const TrackerConfig& config);

}  // namespace memtrack
