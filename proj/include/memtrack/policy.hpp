#pragma once

#include <span>
#include <string>
#include <vector>

#include "memtrack/core.hpp"

namespace memtrack {

/// Which memory-selection rule a run uses.
///
/// Coupled: one thresholded decision on the group-average confidence drives
/// every bank in the group — all updated together or not at all.
/// Decoupled: each target thresholds its own confidence independently, so
/// update frequencies are individualized.
enum class PolicyKind { Coupled, Decoupled };

const char* policy_kind_name(PolicyKind kind);
PolicyKind policy_kind_from_name(const std::string& name);

struct PolicyConfig {
    double tau = 0.5;
    PolicyKind kind = PolicyKind::Coupled;

    PolicyConfig() = default;
    PolicyConfig(double tau_, PolicyKind kind_) : tau(tau_), kind(kind_) {
        if (!(tau > 0.0 && tau < 1.0)) {
            throw Error(ErrorCode::RangeViolation, "tau must lie in (0,1)");
        }
    }
};

/// Group-average frame confidence: S = mean(qualities) * presence.
/// Summation runs in index order for bit-stable results.
double group_score(std::span<const Score> qualities, Score presence);

/// Per-target confidence: S_i = q_i * presence.
double per_target_score(Score quality, Score presence);

/// Runs the configured selection rule over one group. Decision i carries
/// the score that was thresholded and saved = (score > tau), uniform across
/// the group under Coupled, independent per target under Decoupled.
/// track_ids, when provided, label the decisions; otherwise indices are used.
std::vector<SelectionDecision> decide(const PolicyConfig& config,
                                      std::span<const Score> qualities,
                                      Score presence,
                                      std::span<const int> track_ids = {});

/// Applies one frame's decisions: every track whose decision is saved gains
/// a non-conditioning entry (FIFO eviction when full); the rest are
/// untouched. Lists are aligned by index.
void apply_updates(std::span<Track> tracks,
                   std::span<const std::pair<FeatureVec, FeatureVec>> features,
                   std::span<const SelectionDecision> decisions,
                   std::int64_t t);

/// Same, over non-contiguous tracks.
void apply_updates(std::span<Track* const> tracks,
                   std::span<const std::pair<FeatureVec, FeatureVec>> features,
                   std::span<const SelectionDecision> decisions,
                   std::int64_t t);

}  // namespace memtrack
