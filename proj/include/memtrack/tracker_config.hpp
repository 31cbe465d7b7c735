#pragma once

#include <cstdint>
#include <string>

#include "memtrack/core.hpp"
#include "memtrack/policy.hpp"

namespace memtrack {

/// PVS: a fixed target set prompted at frame 0, association bound to slots.
/// PCS: open target set, association by appearance; new objects may emerge
/// mid-video and form their own same-timestamp groups.
enum class Mode { Pvs, Pcs };

const char* mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

struct TrackerConfig {
    PolicyConfig policy;
    double reid_threshold = 0.6;
    double assoc_threshold = 0.5;
    double motion_gate = 2.0;  // multiples of summed radii
    Mode mode = Mode::Pvs;
    std::uint64_t encoder_noise_seed = 0;
    std::size_t bank_capacity = kDefaultBankCapacity;
    std::size_t feature_dim = kDefaultFeatureDim;
    std::size_t pointer_dim = kDefaultPointerDim;

    void validate() const {
        if (!(reid_threshold > 0.0 && reid_threshold < 1.0)) {
            throw Error(ErrorCode::RangeViolation, "reid_threshold must lie in (0,1)");
        }
        if (!(assoc_threshold > 0.0 && assoc_threshold < 1.0)) {
            throw Error(ErrorCode::RangeViolation, "assoc_threshold must lie in (0,1)");
        }
        if (!(motion_gate > 0.0)) {
            throw Error(ErrorCode::RangeViolation, "motion_gate must be > 0");
        }
        if (bank_capacity < 2) {
            throw Error(ErrorCode::RangeViolation, "bank capacity must be >= 2");
        }
        if (pointer_dim < 1 || pointer_dim > feature_dim) {
            throw Error(ErrorCode::RangeViolation, "pointer_dim must lie in [1, feature_dim]");
        }
        if (!(policy.tau > 0.0 && policy.tau < 1.0)) {
            throw Error(ErrorCode::RangeViolation, "tau must lie in (0,1)");
        }
    }
};

}  // namespace memtrack
