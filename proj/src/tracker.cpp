#include "memtrack/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "memtrack/geometry.hpp"
#include "memtrack/log.hpp"

namespace memtrack {

const char* mode_name(Mode mode) { return mode == Mode::Pvs ? "pvs" : "pcs"; }

Mode mode_from_name(const std::string& name) {
    if (name == "pvs") return Mode::Pvs;
    if (name == "pcs") return Mode::Pcs;
    throw Error(ErrorCode::ParseError, "unknown mode '" + name + "'");
}

std::pair<FeatureVec, FeatureVec> encode_feature(const Observation& obs, Rng& rng,
                                                 std::size_t feature_dim,
                                                 std::size_t pointer_dim) {
    if (obs.embedding.dim() != feature_dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "observation embedding dim " + std::to_string(obs.embedding.dim()) +
                        " != feature dim " + std::to_string(feature_dim));
    }
    // Drawn unconditionally so the per-track stream advances the same way
    // for every visibility value.
    std::vector<double> noise = rng.unit_vector(feature_dim);
    const double v = obs.mask.visible_fraction;

    FeatureVec feature;
    if (v == 1.0) {
        feature = obs.embedding;
    } else if (v == 0.0) {
        feature = FeatureVec::unchecked(std::move(noise));
    } else {
        std::vector<double> mixed(feature_dim);
        for (std::size_t i = 0; i < feature_dim; ++i) {
            mixed[i] = v * obs.embedding[i] + (1.0 - v) * noise[i];
        }
        feature = FeatureVec::normalized(std::move(mixed));
    }

    std::vector<double> head(feature.components().begin(),
                             feature.components().begin() + static_cast<std::ptrdiff_t>(pointer_dim));
    double norm_sq = 0.0;
    for (double c : head) norm_sq += c * c;
    FeatureVec pointer;
    if (norm_sq > 1e-24) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (double& c : head) c *= inv;
        pointer = FeatureVec::unchecked(std::move(head));
    } else {
        // Degenerate leading slice; canonical axis keeps the pointer valid.
        std::vector<double> axis(pointer_dim, 0.0);
        axis[0] = 1.0;
        pointer = FeatureVec::unchecked(std::move(axis));
    }
    return {std::move(feature), std::move(pointer)};
}

double readout(const MemoryBank& bank, const FeatureVec& embedding) {
    if (bank.empty()) throw Error(ErrorCode::EmptyBank, "readout over empty bank");
    double best = -1.0;
    for (const MemoryEntry& entry : bank.entries()) {
        best = std::max(best, entry.feature.dot(embedding));
    }
    return best;
}

double reid_readout(const MemoryBank& bank, const FeatureVec& embedding) {
    if (bank.empty()) throw Error(ErrorCode::EmptyBank, "reid_readout over empty bank");
    if (bank.size() == 1) return bank.entries().front().feature.dot(embedding);
    double best = -1.0;
    for (const MemoryEntry& entry : bank.entries()) {
        if (entry.conditioning) continue;
        best = std::max(best, entry.feature.dot(embedding));
    }
    return best;
}

namespace {

bool gate_passes(const Observation& obs, const Track& track, double gate) {
    double allowed = gate * (obs.mask.radius + track.last_mask.radius);
    return center_distance(obs.mask, track.last_mask) <= allowed;
}

}  // namespace

Association associate(std::span<const Observation> observations, std::span<const Track> tracks,
                      const TrackerConfig& config) {
    Association result;
    std::vector<bool> obs_taken(observations.size(), false);
    std::vector<bool> track_taken(tracks.size(), false);

    if (config.mode == Mode::Pvs) {
        for (std::size_t oi = 0; oi < observations.size(); ++oi) {
            const Observation& obs = observations[oi];
            // The slot's live track; at most one exists by construction.
            std::size_t best = tracks.size();
            for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
                if (!tracks[ti].live || tracks[ti].slot != obs.slot) continue;
                if (best == tracks.size() || tracks[ti].track_id < tracks[best].track_id) best = ti;
            }
            if (best < tracks.size() && gate_passes(obs, tracks[best], config.motion_gate)) {
                result.matches.emplace_back(oi, best);
                obs_taken[oi] = true;
                track_taken[best] = true;
            }
        }
    } else {
        struct Candidate {
            double similarity;
            int slot;
            int track_id;
            std::size_t oi, ti;
        };
        std::vector<Candidate> candidates;
        for (std::size_t oi = 0; oi < observations.size(); ++oi) {
            for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
                const Track& track = tracks[ti];
                if (!track.live || track.bank.empty()) continue;
                if (!gate_passes(observations[oi], track, config.motion_gate)) continue;
                double sim = readout(track.bank, observations[oi].embedding);
                if (sim < config.assoc_threshold) continue;
                candidates.push_back({sim, observations[oi].slot, track.track_id, oi, ti});
            }
        }
        std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
            if (a.similarity != b.similarity) return a.similarity > b.similarity;
            if (a.slot != b.slot) return a.slot < b.slot;
            return a.track_id < b.track_id;
        });
        for (const Candidate& c : candidates) {
            if (obs_taken[c.oi] || track_taken[c.ti]) continue;
            result.matches.emplace_back(c.oi, c.ti);
            obs_taken[c.oi] = true;
            track_taken[c.ti] = true;
        }
        std::sort(result.matches.begin(), result.matches.end());
    }

    for (std::size_t oi = 0; oi < observations.size(); ++oi) {
        if (!obs_taken[oi]) result.unmatched_observations.push_back(oi);
    }
    for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
        if (tracks[ti].live && !track_taken[ti]) result.unobserved_tracks.push_back(ti);
    }
    return result;
}

std::optional<int> reidentify(const Observation& obs, std::span<const Track* const> candidates,
                              double reid_threshold) {
    const Track* best = nullptr;
    double best_score = -2.0;
    for (const Track* track : candidates) {
        if (track->bank.empty()) continue;
        double score = reid_readout(track->bank, obs.embedding);
        if (score > best_score ||
            (score == best_score && best != nullptr && track->track_id < best->track_id)) {
            best = track;
            best_score = score;
        }
    }
    if (best != nullptr && best_score >= reid_threshold) return best->track_id;
    return std::nullopt;
}

Tracker::Tracker(const TrackerConfig& config) : config_(config) { config_.validate(); }

const Track* Tracker::find_track(int track_id) const {
    auto it = id_to_index_.find(track_id);
    return it == id_to_index_.end() ? nullptr : &tracks_[it->second];
}

int Tracker::allocate_id(int preferred) {
    int id = preferred;
    if (used_ids_.count(id) != 0) id = next_fresh_id_;
    used_ids_.insert(id);
    next_fresh_id_ = std::max(next_fresh_id_, id + 1);
    return id;
}

std::size_t Tracker::create_track(const Observation& obs, std::int64_t t) {
    Track track;
    track.track_id = allocate_id(obs.slot);
    track.slot = obs.slot;
    track.bank = MemoryBank(config_.bank_capacity);
    track.active = true;
    track.last_seen = t;
    track.created_at = t;
    track.live = true;
    track.last_mask = obs.mask;
    track.rng = Rng(derive_seed(config_.encoder_noise_seed, static_cast<std::uint64_t>(obs.slot),
                                static_cast<std::uint64_t>(t)));

    // The prompt-frame entry, written unconditionally and never evicted.
    auto [feature, pointer] = encode_feature(obs, track.rng, config_.feature_dim, config_.pointer_dim);
    MemoryEntry conditioning;
    conditioning.t = t;
    conditioning.feature = std::move(feature);
    conditioning.pointer = std::move(pointer);
    track.bank.set_conditioning(std::move(conditioning));

    known_slots_.insert(obs.slot);
    tracks_.push_back(std::move(track));
    std::size_t index = tracks_.size() - 1;
    id_to_index_[tracks_[index].track_id] = index;
    return index;
}

FrameResult Tracker::step(const FrameInput& frame) {
    if (frame.t <= last_t_) {
        throw Error(ErrorCode::NonMonotonicFrameIndex,
                    "frame " + std::to_string(frame.t) + " after " + std::to_string(last_t_));
    }
    validate_frame(frame);
    const std::int64_t t = frame.t;

    // Blank masks are non-detections: they never associate, re-identify, or
    // initialize; their q feeds the synthesized observation of their slot.
    std::vector<Observation> detections;
    std::unordered_map<int, Score> blank_quality;
    for (const Observation& obs : frame.observations) {
        if (obs.mask.blank()) {
            blank_quality.emplace(obs.slot, obs.quality);
        } else {
            detections.push_back(obs);
        }
    }
    std::sort(detections.begin(), detections.end(),
              [](const Observation& a, const Observation& b) { return a.slot < b.slot; });

    Association assoc = associate(detections, tracks_, config_);

    // obs index -> matched track index (from association, then re-id).
    std::vector<std::ptrdiff_t> obs_track(detections.size(), -1);
    std::vector<bool> track_matched(tracks_.size(), false);
    for (auto [oi, ti] : assoc.matches) {
        obs_track[oi] = static_cast<std::ptrdiff_t>(ti);
        track_matched[ti] = true;
    }

    // Re-identification for unmatched real observations, in slot order.
    std::vector<std::size_t> init_requests;
    for (std::size_t oi : assoc.unmatched_observations) {
        std::vector<const Track*> candidates;
        for (std::size_t ti = 0; ti < tracks_.size(); ++ti) {
            if (tracks_[ti].live && !track_matched[ti]) candidates.push_back(&tracks_[ti]);
        }
        std::optional<int> reid =
            candidates.empty() ? std::nullopt
                               : reidentify(detections[oi], candidates, config_.reid_threshold);
        if (reid.has_value()) {
            std::size_t ti = id_to_index_.at(*reid);
            obs_track[oi] = static_cast<std::ptrdiff_t>(ti);
            track_matched[ti] = true;
        } else {
            init_requests.push_back(oi);
        }
    }

    // Track initialization: everything at the first frame; afterwards PCS
    // accepts emerging objects freely while PVS only re-mints identities for
    // slots it has tracked before (drift), keeping the target set fixed.
    std::vector<int> new_track_ids;
    std::vector<std::size_t> new_track_indices;
    for (std::size_t oi : init_requests) {
        const Observation& obs = detections[oi];
        bool allowed = !first_frame_done_ || config_.mode == Mode::Pcs ||
                       known_slots_.count(obs.slot) != 0;
        if (!allowed) {
            log_warn("dropping observation for unknown slot " + std::to_string(obs.slot) +
                     " in PVS mode at frame " + std::to_string(t));
            continue;
        }
        // A drift successor supersedes any live unmatched track on the slot.
        for (std::size_t ti = 0; ti < tracks_.size(); ++ti) {
            Track& old_track = tracks_[ti];
            if (old_track.live && !track_matched[ti] && old_track.slot == obs.slot) {
                old_track.live = false;
                old_track.active = false;
            }
        }
        std::size_t index = create_track(obs, t);
        track_matched.resize(tracks_.size(), true);
        obs_track[oi] = static_cast<std::ptrdiff_t>(index);
        new_track_ids.push_back(tracks_[index].track_id);
        new_track_indices.push_back(index);
    }
    if (!new_track_indices.empty()) {
        Group group;
        group.created_at = t;
        for (std::size_t index : new_track_indices) {
            group.member_track_ids.push_back(tracks_[index].track_id);
        }
        groups_.push_back(group);
        for (int id : group.member_track_ids) id_to_group_[id] = groups_.size() - 1;
    }

    // Update match state on tracks.
    for (std::size_t oi = 0; oi < detections.size(); ++oi) {
        if (obs_track[oi] < 0) continue;
        Track& track = tracks_[static_cast<std::size_t>(obs_track[oi])];
        track.active = true;
        track.last_seen = t;
        track.slot = detections[oi].slot;
        track.last_mask = detections[oi].mask;
    }
    for (std::size_t ti = 0; ti < tracks_.size(); ++ti) {
        if (tracks_[ti].live && !track_matched[ti]) tracks_[ti].active = false;
    }

    // Choose the frame observation for every live track: the matched real
    // observation, or a synthesized blank carrying the slot's reported q.
    struct PerTrack {
        std::size_t track_index;
        Observation obs;
        bool is_new;
    };
    std::vector<PerTrack> per_track;
    for (std::size_t ti = 0; ti < tracks_.size(); ++ti) {
        if (!tracks_[ti].live) continue;
        PerTrack entry;
        entry.track_index = ti;
        entry.is_new = tracks_[ti].created_at == t;
        std::ptrdiff_t matched_oi = -1;
        for (std::size_t oi = 0; oi < detections.size(); ++oi) {
            if (obs_track[oi] == static_cast<std::ptrdiff_t>(ti)) {
                matched_oi = static_cast<std::ptrdiff_t>(oi);
                break;
            }
        }
        if (matched_oi >= 0) {
            entry.obs = detections[static_cast<std::size_t>(matched_oi)];
        } else {
            const Track& track = tracks_[ti];
            Observation blank;
            blank.slot = track.slot;
            blank.mask = MaskGeom(track.last_mask.center_x, track.last_mask.center_y,
                                  track.last_mask.radius, 0.0);
            std::vector<double> axis(config_.feature_dim, 0.0);
            axis[0] = 1.0;
            blank.embedding = FeatureVec::unchecked(std::move(axis));
            auto it = blank_quality.find(track.slot);
            blank.quality = it != blank_quality.end() ? it->second : Score(0.0);
            entry.obs = std::move(blank);
        }
        per_track.push_back(std::move(entry));
    }
    std::sort(per_track.begin(), per_track.end(), [this](const PerTrack& a, const PerTrack& b) {
        return tracks_[a.track_index].track_id < tracks_[b.track_index].track_id;
    });

    // Encode features for every live track, in track-id order.
    std::vector<std::pair<FeatureVec, FeatureVec>> encoded;
    encoded.reserve(per_track.size());
    for (const PerTrack& entry : per_track) {
        encoded.push_back(encode_feature(entry.obs, tracks_[entry.track_index].rng,
                                         config_.feature_dim, config_.pointer_dim));
    }

    // Decide per group and apply updates; creation-frame tracks already hold
    // their conditioning entry and skip the thresholded save.
    std::vector<SelectionDecision> decision_by_position(per_track.size());
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
        std::vector<std::size_t> positions;
        for (std::size_t pos = 0; pos < per_track.size(); ++pos) {
            const Track& track = tracks_[per_track[pos].track_index];
            auto it = id_to_group_.find(track.track_id);
            if (it != id_to_group_.end() && it->second == gi) positions.push_back(pos);
        }
        if (positions.empty()) continue;
        std::vector<Score> qualities;
        std::vector<int> ids;
        for (std::size_t pos : positions) {
            qualities.push_back(per_track[pos].obs.quality);
            ids.push_back(tracks_[per_track[pos].track_index].track_id);
        }
        std::vector<SelectionDecision> decisions =
            decide(config_.policy, qualities, frame.presence, ids);
        std::vector<Track*> update_tracks;
        std::vector<std::pair<FeatureVec, FeatureVec>> update_features;
        std::vector<SelectionDecision> update_decisions;
        for (std::size_t k = 0; k < positions.size(); ++k) {
            decision_by_position[positions[k]] = decisions[k];
            const PerTrack& entry = per_track[positions[k]];
            if (entry.is_new) continue;  // conditioning entry already written
            update_tracks.push_back(&tracks_[entry.track_index]);
            update_features.push_back(encoded[positions[k]]);
            update_decisions.push_back(decisions[k]);
        }
        apply_updates(std::span<Track* const>(update_tracks), update_features, update_decisions, t);
    }

    FrameResult result;
    result.t = t;
    result.presence = frame.presence;
    result.new_track_ids = std::move(new_track_ids);
    for (std::size_t pos = 0; pos < per_track.size(); ++pos) {
        const Track& track = tracks_[per_track[pos].track_index];
        TrackOutput out;
        out.track_id = track.track_id;
        out.slot = per_track[pos].obs.slot;
        out.mask = per_track[pos].obs.mask;
        out.quality = per_track[pos].obs.quality;
        out.decision = decision_by_position[pos];
        result.outputs.push_back(std::move(out));
    }

    last_t_ = t;
    first_frame_done_ = true;
    return result;
}

RunRecord run(std::span<const FrameInput> frames, const TrackerConfig& config) {
    Tracker tracker(config);
    RunRecord record;
    record.manifest.policy = config.policy.kind;
    record.manifest.seed = config.encoder_noise_seed;
    record.frames.reserve(frames.size());
    for (const FrameInput& frame : frames) {
        record.frames.push_back(tracker.step(frame));
    }
    return record;
}

}  // namespace memtrack
