#include "memtrack/policy.hpp"

namespace memtrack {

const char* policy_kind_name(PolicyKind kind) {
    return kind == PolicyKind::Coupled ? "coupled" : "decoupled";
}

PolicyKind policy_kind_from_name(const std::string& name) {
    if (name == "coupled") return PolicyKind::Coupled;
    if (name == "decoupled") return PolicyKind::Decoupled;
    throw Error(ErrorCode::ParseError, "unknown policy '" + name + "'");
}

double group_score(std::span<const Score> qualities, Score presence) {
    if (qualities.empty()) {
        throw Error(ErrorCode::EmptyGroup, "group_score over zero targets");
    }
    double sum = 0.0;
    for (const Score& q : qualities) sum += q.value();
    return (sum / static_cast<double>(qualities.size())) * presence.value();
}

double per_target_score(Score quality, Score presence) {
    return quality.value() * presence.value();
}

std::vector<SelectionDecision> decide(const PolicyConfig& config,
                                      std::span<const Score> qualities,
                                      Score presence,
                                      std::span<const int> track_ids) {
    if (qualities.empty()) {
        throw Error(ErrorCode::EmptyGroup, "decide over zero targets");
    }
    if (!track_ids.empty() && track_ids.size() != qualities.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(track_ids.size()) + " ids for " +
                        std::to_string(qualities.size()) + " qualities");
    }
    std::vector<SelectionDecision> decisions(qualities.size());
    if (config.kind == PolicyKind::Coupled) {
        const double s = group_score(qualities, presence);
        const bool saved = s > config.tau;
        for (std::size_t i = 0; i < qualities.size(); ++i) {
            decisions[i] = {track_ids.empty() ? static_cast<int>(i) : track_ids[i], s, saved};
        }
    } else {
        for (std::size_t i = 0; i < qualities.size(); ++i) {
            const double s = per_target_score(qualities[i], presence);
            decisions[i] = {track_ids.empty() ? static_cast<int>(i) : track_ids[i], s,
                            s > config.tau};
        }
    }
    return decisions;
}

void apply_updates(std::span<Track* const> tracks,
                   std::span<const std::pair<FeatureVec, FeatureVec>> features,
                   std::span<const SelectionDecision> decisions,
                   std::int64_t t) {
    if (tracks.size() != features.size() || tracks.size() != decisions.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    "tracks=" + std::to_string(tracks.size()) +
                        " features=" + std::to_string(features.size()) +
                        " decisions=" + std::to_string(decisions.size()));
    }
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (!decisions[i].saved) continue;
        MemoryEntry entry;
        entry.t = t;
        entry.feature = features[i].first;
        entry.pointer = features[i].second;
        entry.conditioning = false;
        tracks[i]->bank.push(std::move(entry));
    }
}

void apply_updates(std::span<Track> tracks,
                   std::span<const std::pair<FeatureVec, FeatureVec>> features,
                   std::span<const SelectionDecision> decisions,
                   std::int64_t t) {
    std::vector<Track*> pointers;
    pointers.reserve(tracks.size());
    for (Track& track : tracks) pointers.push_back(&track);
    apply_updates(std::span<Track* const>(pointers), features, decisions, t);
}

}  // namespace memtrack
