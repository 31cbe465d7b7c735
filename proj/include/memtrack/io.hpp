#pragma once

#include <string>
#include <utility>
#include <vector>

#include "memtrack/manifest.hpp"
#include "memtrack/metrics.hpp"
#include "memtrack/scenario.hpp"
#include "memtrack/tracker.hpp"

namespace memtrack {

/// Canonical real formatting: 17 significant digits (%.17g), which
/// round-trips every finite double exactly; negative zero keeps its sign.
std::string fmt_real(double value);

/// FNV-1a 64-bit of the canonicalized config serialization, as 16 hex chars.
/// Identical configs yield identical digests regardless of file formatting.
std::string config_digest(const ScenarioConfig& scenario, const TrackerConfig& tracker);

std::string utc_now_iso8601();

struct ParsedConfig {
    ScenarioConfig scenario;
    TrackerConfig tracker;
};

/// Parses the documented config schema. Unknown keys are rejected; absent
/// optional fields take the documented defaults (tau 0.5, capacity 7,
/// reid_threshold 0.6, feature_dim 16, ...).
ParsedConfig parse_config(const std::string& path);
ParsedConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

/// Canonical config serialization (sorted keys, canonical reals); the digest
/// input and the documented on-disk schema.
std::string config_to_json(const ScenarioConfig& scenario, const TrackerConfig& tracker);

/// Line-delimited run records: one manifest header line, then one frame per
/// line; UTF-8, keys sorted, reals exact. read(write(x)) == x field-exact.
void write_run(const RunRecord& record, const std::string& path);
RunRecord read_run(const std::string& path);

std::string run_to_text(const RunRecord& record);
RunRecord run_from_text(const std::string& text);

/// Ground-truth persistence in the same line-delimited style.
void write_gt(const GroundTruth& gt, const std::string& path);
GroundTruth read_gt(const std::string& path);

/// Single-value record forms for the remaining domain types (state dumps,
/// debugging, tests). Same canonical emission rules; reals bit-exact. A
/// track's encoder-noise stream is runtime state and is not serialized.
std::string to_json(const Observation& obs);
std::string to_json(const FrameInput& frame);
std::string to_json(const MemoryEntry& entry);
std::string to_json(const MemoryBank& bank);
std::string to_json(const Track& track);
std::string to_json(const Group& group);
Observation observation_from_json(const std::string& text);
FrameInput frame_input_from_json(const std::string& text);
MemoryEntry memory_entry_from_json(const std::string& text);
MemoryBank memory_bank_from_json(const std::string& text);
Track track_from_json(const std::string& text);
Group group_from_json(const std::string& text);

std::string gt_to_text(const GroundTruth& gt);
GroundTruth gt_from_text(const std::string& text);

/// Blanks the created_at value so files from different invocations can be
/// compared byte-for-byte.
std::string strip_created_at(const std::string& file_contents);

/// RFC-4180 CSV emission for the report surfaces. Fields are reals so that
/// summary rows can carry means of integer quantities.
struct CompareRow {
    std::string archetype;
    std::string policy;  // policy name, or "delta" for the summary delta row
    std::string seed;    // seed number, "mean", or blank
    double hota = 0.0;
    double deta = 0.0;
    double assa = 0.0;
    double j = 0.0;
    double f = 0.0;
    double idsw = 0.0;

    static CompareRow from_report(std::string archetype, std::string policy, std::string seed,
                                  const MetricsReport& report);
};
std::string compare_csv(const std::vector<CompareRow>& rows);
std::string sweep_csv(const std::vector<DensityGapRow>& rows);
std::string eval_csv(const MetricsReport& report);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace memtrack
