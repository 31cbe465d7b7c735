#include "memtrack/core.hpp"

#include <unordered_set>

namespace memtrack {

const FrameInput& validate_frame(const FrameInput& input) {
    if (input.t < 0) {
        throw Error(ErrorCode::RangeViolation, "frame index " + std::to_string(input.t) + " < 0");
    }
    if (!input.presence.valid()) {
        throw Error(ErrorCode::ScoreOutOfRange,
                    "presence " + std::to_string(input.presence.value()) + " outside [0,1]");
    }
    std::unordered_set<int> seen;
    for (const Observation& obs : input.observations) {
        if (!seen.insert(obs.slot).second) {
            throw Error(ErrorCode::DuplicateSlot, "slot " + std::to_string(obs.slot));
        }
        if (!obs.quality.valid()) {
            throw Error(ErrorCode::ScoreOutOfRange,
                        "q " + std::to_string(obs.quality.value()) + " at slot " +
                            std::to_string(obs.slot));
        }
        if (!obs.embedding.valid()) {
            throw Error(ErrorCode::NonUnitEmbedding, "embedding at slot " + std::to_string(obs.slot));
        }
        if (!(obs.mask.radius > 0.0)) {
            throw Error(ErrorCode::RangeViolation, "radius at slot " + std::to_string(obs.slot));
        }
        if (!(obs.mask.visible_fraction >= 0.0 && obs.mask.visible_fraction <= 1.0)) {
            throw Error(ErrorCode::RangeViolation,
                        "visible_fraction at slot " + std::to_string(obs.slot));
        }
    }
    return input;
}

}  // namespace memtrack
