#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memtrack/error.hpp"
#include "memtrack/rng.hpp"

namespace memtrack {

inline constexpr std::size_t kDefaultFeatureDim = 16;
inline constexpr std::size_t kDefaultPointerDim = 4;
inline constexpr std::size_t kDefaultBankCapacity = 7;

/// Scalar confidence in [0,1]. Houses both the per-target segmentation
/// quality and the frame-level presence score.
class Score {
public:
    Score() = default;

    explicit Score(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw Error(ErrorCode::ScoreOutOfRange,
                        "score " + std::to_string(value) + " outside [0,1]");
        }
    }

    /// Bypasses range checking; for deserialization and tests feeding
    /// validate_frame. Anything built this way must pass validation before
    /// reaching the tracker.
    static Score unchecked(double value) {
        Score s;
        s.value_ = value;
        return s;
    }

    double value() const { return value_; }
    bool valid() const { return value_ >= 0.0 && value_ <= 1.0; }

    bool operator==(const Score& other) const { return value_ == other.value_; }

private:
    double value_ = 0.0;
};

/// Unit-normalized real vector; fixed dimension within a run.
class FeatureVec {
public:
    FeatureVec() = default;

    /// Requires components already unit-normalized (within 1e-9).
    explicit FeatureVec(std::vector<double> components) : components_(std::move(components)) {
        if (!valid()) {
            throw Error(ErrorCode::NonUnitEmbedding,
                        "vector of dim " + std::to_string(components_.size()) + " is not unit norm");
        }
    }

    /// Normalizes arbitrary components to unit length.
    static FeatureVec normalized(std::vector<double> components) {
        double norm_sq = 0.0;
        for (double c : components) norm_sq += c * c;
        if (norm_sq < 1e-24) {
            throw Error(ErrorCode::NonUnitEmbedding, "cannot normalize a near-zero vector");
        }
        double inv = 1.0 / std::sqrt(norm_sq);
        for (double& c : components) c *= inv;
        FeatureVec v;
        v.components_ = std::move(components);
        return v;
    }

    static FeatureVec unchecked(std::vector<double> components) {
        FeatureVec v;
        v.components_ = std::move(components);
        return v;
    }

    std::size_t dim() const { return components_.size(); }
    const std::vector<double>& components() const { return components_; }
    double operator[](std::size_t i) const { return components_[i]; }

    bool valid() const {
        if (components_.empty()) return false;
        double norm_sq = 0.0;
        for (double c : components_) norm_sq += c * c;
        return std::abs(std::sqrt(norm_sq) - 1.0) <= 1e-9;
    }

    double dot(const FeatureVec& other) const {
        if (other.dim() != dim()) {
            throw Error(ErrorCode::DimensionMismatch,
                        "dot of dims " + std::to_string(dim()) + " and " + std::to_string(other.dim()));
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < components_.size(); ++i) acc += components_[i] * other.components_[i];
        return acc;
    }

    bool operator==(const FeatureVec& other) const { return components_ == other.components_; }

private:
    std::vector<double> components_;
};

/// Analytic disc mask in world units. visible_fraction = 0 denotes a blank
/// mask (a non-detection); the visible region is modeled as the concentric
/// disc of area visible_fraction * pi * radius^2.
struct MaskGeom {
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 1.0;
    double visible_fraction = 1.0;

    MaskGeom() = default;
    MaskGeom(double cx, double cy, double r, double vf)
        : center_x(cx), center_y(cy), radius(r), visible_fraction(vf) {
        if (!(radius > 0.0)) {
            throw Error(ErrorCode::RangeViolation, "mask radius must be > 0");
        }
        if (!(visible_fraction >= 0.0 && visible_fraction <= 1.0)) {
            throw Error(ErrorCode::RangeViolation, "visible_fraction outside [0,1]");
        }
    }

    static MaskGeom unchecked(double cx, double cy, double r, double vf) {
        MaskGeom m;
        m.center_x = cx;
        m.center_y = cy;
        m.radius = r;
        m.visible_fraction = vf;
        return m;
    }

    bool blank() const { return visible_fraction == 0.0; }
    /// Radius of the concentric visible disc.
    double effective_radius() const { return radius * std::sqrt(visible_fraction); }

    bool operator==(const MaskGeom& other) const {
        return center_x == other.center_x && center_y == other.center_y &&
               radius == other.radius && visible_fraction == other.visible_fraction;
    }
};

/// One per-slot perception output for a frame: mask, appearance embedding,
/// and the per-target quality score.
struct Observation {
    int slot = 0;
    MaskGeom mask;
    FeatureVec embedding;
    Score quality;

    bool operator==(const Observation& other) const {
        return slot == other.slot && mask == other.mask &&
               embedding == other.embedding && quality == other.quality;
    }
};

/// One simulated frame: frame-level presence score plus the per-slot
/// observations, in slot-sorted order.
struct FrameInput {
    std::int64_t t = 0;
    Score presence;
    std::vector<Observation> observations;

    bool operator==(const FrameInput& other) const {
        return t == other.t && presence == other.presence && observations == other.observations;
    }
};

/// Validates every type invariant of a frame. Returns the input unchanged on
/// success; names the offending slot or field otherwise.
const FrameInput& validate_frame(const FrameInput& input);

/// One stored (feature, pointer) pair. The conditioning entry is the one
/// written at track creation; it is exempt from eviction.
struct MemoryEntry {
    std::int64_t t = 0;
    FeatureVec feature;
    FeatureVec pointer;
    bool conditioning = false;

    bool operator==(const MemoryEntry& other) const {
        return t == other.t && feature == other.feature && pointer == other.pointer &&
               conditioning == other.conditioning;
    }
};

/// Bounded insertion-ordered store of memory entries per track. Holds at
/// most `capacity` entries; the conditioning entry (first, smallest t) is
/// never evicted; eviction is FIFO over non-conditioning entries.
class MemoryBank {
public:
    MemoryBank() : capacity_(kDefaultBankCapacity) {}

    explicit MemoryBank(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ < 2) {
            throw Error(ErrorCode::RangeViolation, "bank capacity must be >= 2");
        }
    }

    /// Seeds the bank with its conditioning entry. Must be called exactly
    /// once, before any push.
    void set_conditioning(MemoryEntry entry) {
        if (!entries_.empty()) {
            throw Error(ErrorCode::RangeViolation, "conditioning entry must be first");
        }
        entry.conditioning = true;
        entries_.push_back(std::move(entry));
    }

    /// Appends a non-conditioning entry, evicting the oldest
    /// non-conditioning entry first when the bank is full.
    void push(MemoryEntry entry) {
        if (entries_.empty()) {
            throw Error(ErrorCode::RangeViolation, "bank has no conditioning entry");
        }
        entry.conditioning = false;
        if (entries_.size() == capacity_) {
            entries_.erase(entries_.begin() + 1);  // oldest non-conditioning
        }
        entries_.push_back(std::move(entry));
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<MemoryEntry>& entries() const { return entries_; }
    const MemoryEntry& conditioning_entry() const {
        if (entries_.empty()) throw Error(ErrorCode::EmptyBank, "no conditioning entry");
        return entries_.front();
    }

    bool invariants_hold() const {
        if (entries_.size() > capacity_) return false;
        std::size_t conditioning_count = 0;
        for (const auto& e : entries_) conditioning_count += e.conditioning ? 1 : 0;
        if (entries_.empty()) return conditioning_count == 0;
        if (conditioning_count != 1 || !entries_.front().conditioning) return false;
        for (const auto& e : entries_) {
            if (e.t < entries_.front().t) return false;
        }
        return true;
    }

    bool operator==(const MemoryBank& other) const {
        return capacity_ == other.capacity_ && entries_ == other.entries_;
    }

private:
    std::size_t capacity_;
    std::vector<MemoryEntry> entries_;
};

/// Outcome of one memory-selection decision for one track: the confidence S
/// that was thresholded and whether the bank update fired (S > tau strictly).
struct SelectionDecision {
    int track_id = 0;
    double score_s = 0.0;
    bool saved = false;

    bool operator==(const SelectionDecision& other) const {
        return track_id == other.track_id && score_s == other.score_s && saved == other.saved;
    }
};

/// One tracked target. The id is immutable for the life of the run; `slot`
/// is the perception slot of the last matched observation; `active` means
/// an observation was matched at `last_seen`; `live` means the track is in
/// the per-frame decision loop (cleared when a drift successor claims the
/// slot). Each track owns its seeded encoder-noise stream.
struct Track {
    int track_id = 0;
    int slot = 0;
    MemoryBank bank;
    bool active = false;
    std::int64_t last_seen = -1;
    std::int64_t created_at = 0;
    bool live = true;
    MaskGeom last_mask;
    Rng rng{0};

    bool operator==(const Track& other) const {
        return track_id == other.track_id && slot == other.slot && bank == other.bank &&
               active == other.active && last_seen == other.last_seen &&
               created_at == other.created_at && live == other.live && last_mask == other.last_mask;
    }
};

/// Targets initialized at the same frame; the unit over which the coupled
/// policy averages.
struct Group {
    std::int64_t created_at = 0;
    std::vector<int> member_track_ids;

    bool operator==(const Group& other) const {
        return created_at == other.created_at && member_track_ids == other.member_track_ids;
    }
};

}  // namespace memtrack
