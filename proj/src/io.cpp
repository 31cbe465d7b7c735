#include "memtrack/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace memtrack {

using nlohmann::json;

std::string fmt_real(double value) {
    if (value == 0.0 && std::signbit(value)) return "-0.0";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

std::string fmt_int(std::int64_t value) { return std::to_string(value); }

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += "\"";
    return out;
}

std::string json_real_array(const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) out += ",";
        out += fmt_real(values[i]);
    }
    out += "]";
    return out;
}

std::string json_mask(const MaskGeom& m) {
    return "{\"cx\":" + fmt_real(m.center_x) + ",\"cy\":" + fmt_real(m.center_y) +
           ",\"r\":" + fmt_real(m.radius) + ",\"v\":" + fmt_real(m.visible_fraction) + "}";
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t hash = 0xCBF29CE484222325ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001B3ull;
    }
    return hash;
}

double get_real(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw Error(ErrorCode::CorruptLine, where + ": missing real '" + key + "'");
    }
    return j[key].get<double>();
}

std::int64_t get_int(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
        throw Error(ErrorCode::CorruptLine, where + ": missing integer '" + key + "'");
    }
    return j[key].get<std::int64_t>();
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw Error(ErrorCode::CorruptLine, where + ": missing string '" + key + "'");
    }
    return j[key].get<std::string>();
}

bool get_bool(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_boolean()) {
        throw Error(ErrorCode::CorruptLine, where + ": missing bool '" + key + "'");
    }
    return j[key].get<bool>();
}

MaskGeom mask_from(const json& j, const std::string& where) {
    return MaskGeom::unchecked(get_real(j, "cx", where), get_real(j, "cy", where),
                               get_real(j, "r", where), get_real(j, "v", where));
}

std::vector<double> reals_from(const json& j, const std::string& where) {
    if (!j.is_array()) throw Error(ErrorCode::CorruptLine, where + ": expected array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw Error(ErrorCode::CorruptLine, where + ": expected real");
        out.push_back(v.get<double>());
    }
    return out;
}

json parse_line(const std::string& line, std::size_t line_number) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw Error(ErrorCode::CorruptLine, "line " + std::to_string(line_number));
    }
    return j;
}

}  // namespace

std::string utc_now_iso8601() {
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string config_to_json(const ScenarioConfig& sc, const TrackerConfig& tc) {
    std::string out = "{";
    out += "\"assoc_threshold\":" + fmt_real(tc.assoc_threshold);
    out += ",\"capacity\":" + fmt_int(static_cast<std::int64_t>(tc.bank_capacity));
    out += ",\"distractors\":[";
    for (std::size_t i = 0; i < sc.distractors.size(); ++i) {
        const DistractorSpec& d = sc.distractors[i];
        if (i != 0) out += ",";
        out += "{\"crowding\":" + fmt_real(d.crowding);
        out += ",\"motion\":" + json_string(distractor_motion_name(d.motion));
        out += ",\"similarity\":" + fmt_real(d.similarity);
        out += ",\"target\":" + fmt_int(d.target) + "}";
    }
    out += "]";
    out += ",\"embed_separation\":" + fmt_real(sc.embed_separation);
    out += ",\"encoder_seed\":" + fmt_int(static_cast<std::int64_t>(tc.encoder_noise_seed));
    out += ",\"events\":[";
    for (std::size_t i = 0; i < sc.events.size(); ++i) {
        const Event& e = sc.events[i];
        if (i != 0) out += ",";
        out += "{\"end\":" + fmt_int(e.end);
        out += ",\"kind\":" + json_string(event_kind_name(e.kind));
        out += ",\"severity\":" + fmt_real(e.severity);
        out += ",\"start\":" + fmt_int(e.start);
        out += ",\"target\":" + fmt_int(e.target) + "}";
    }
    out += "]";
    out += ",\"feature_dim\":" + fmt_int(static_cast<std::int64_t>(sc.feature_dim));
    out += ",\"frames\":" + fmt_int(sc.num_frames);
    out += ",\"mode\":" + json_string(mode_name(tc.mode));
    out += ",\"motion_gate\":" + fmt_real(tc.motion_gate);
    out += ",\"noise\":{\"sigma_p\":" + fmt_real(sc.noise.sigma_p) +
           ",\"sigma_pos\":" + fmt_real(sc.noise.sigma_pos) +
           ",\"sigma_q\":" + fmt_real(sc.noise.sigma_q) + "}";
    out += ",\"pointer_dim\":" + fmt_int(static_cast<std::int64_t>(sc.pointer_dim));
    out += ",\"policy\":" + json_string(policy_kind_name(tc.policy.kind));
    out += ",\"reid_threshold\":" + fmt_real(tc.reid_threshold);
    out += ",\"seed\":" + fmt_int(static_cast<std::int64_t>(sc.seed));
    out += ",\"targets\":" + fmt_int(sc.num_targets);
    out += ",\"tau\":" + fmt_real(tc.policy.tau);
    out += ",\"world\":{\"height\":" + fmt_real(sc.world_h) +
           ",\"width\":" + fmt_real(sc.world_w) + "}";
    out += "}";
    return out;
}

std::string config_digest(const ScenarioConfig& scenario, const TrackerConfig& tracker) {
    std::uint64_t hash = fnv1a64(config_to_json(scenario, tracker));
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, hash);
    return buf;
}

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw Error(ErrorCode::UnknownKey, where + ": '" + key + "'");
    }
}

double require_range(double value, double lo, double hi, bool exclusive, const std::string& key) {
    bool ok = exclusive ? (value > lo && value < hi) : (value >= lo && value <= hi);
    if (!ok) {
        throw Error(ErrorCode::RangeViolation,
                    key + " = " + fmt_real(value) + " outside " + (exclusive ? "(" : "[") +
                        fmt_real(lo) + "," + fmt_real(hi) + (exclusive ? ")" : "]"));
    }
    return value;
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, origin + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::ParseError, origin + ": not an object");
    reject_unknown_keys(j,
                        {"assoc_threshold", "capacity", "distractors", "embed_separation",
                         "encoder_seed", "events", "feature_dim", "frames", "mode", "motion_gate",
                         "noise", "pointer_dim", "policy", "reid_threshold", "seed", "targets",
                         "tau", "world"},
                        origin);

    ParsedConfig out;
    ScenarioConfig& sc = out.scenario;
    TrackerConfig& tc = out.tracker;

    for (const char* required : {"targets", "frames", "seed"}) {
        if (!j.contains(required)) {
            throw Error(ErrorCode::ParseError, origin + ": missing required key '" +
                                                   std::string(required) + "'");
        }
    }
    sc.num_targets = static_cast<int>(get_int(j, "targets", origin));
    sc.num_frames = get_int(j, "frames", origin);
    sc.seed = static_cast<std::uint64_t>(get_int(j, "seed", origin));
    tc.encoder_noise_seed =
        j.contains("encoder_seed") ? static_cast<std::uint64_t>(get_int(j, "encoder_seed", origin))
                                   : sc.seed;

    if (j.contains("world")) {
        reject_unknown_keys(j["world"], {"width", "height"}, origin + ".world");
        sc.world_w = get_real(j["world"], "width", origin);
        sc.world_h = get_real(j["world"], "height", origin);
    }
    if (j.contains("noise")) {
        reject_unknown_keys(j["noise"], {"sigma_q", "sigma_p", "sigma_pos"}, origin + ".noise");
        if (j["noise"].contains("sigma_q")) sc.noise.sigma_q = get_real(j["noise"], "sigma_q", origin);
        if (j["noise"].contains("sigma_p")) sc.noise.sigma_p = get_real(j["noise"], "sigma_p", origin);
        if (j["noise"].contains("sigma_pos")) {
            sc.noise.sigma_pos = get_real(j["noise"], "sigma_pos", origin);
        }
    }
    if (j.contains("tau")) {
        tc.policy.tau = require_range(get_real(j, "tau", origin), 0.0, 1.0, true, "tau");
    }
    if (j.contains("policy")) {
        tc.policy.kind = policy_kind_from_name(get_string(j, "policy", origin));
    }
    if (j.contains("mode")) tc.mode = mode_from_name(get_string(j, "mode", origin));
    if (j.contains("capacity")) {
        std::int64_t capacity = get_int(j, "capacity", origin);
        if (capacity < 2) throw Error(ErrorCode::RangeViolation, "capacity must be >= 2");
        tc.bank_capacity = static_cast<std::size_t>(capacity);
    }
    if (j.contains("feature_dim")) {
        std::int64_t dim = get_int(j, "feature_dim", origin);
        if (dim < 1) throw Error(ErrorCode::RangeViolation, "feature_dim must be >= 1");
        sc.feature_dim = static_cast<std::size_t>(dim);
    }
    if (j.contains("pointer_dim")) {
        std::int64_t dim = get_int(j, "pointer_dim", origin);
        if (dim < 1) throw Error(ErrorCode::RangeViolation, "pointer_dim must be >= 1");
        sc.pointer_dim = static_cast<std::size_t>(dim);
    }
    if (j.contains("reid_threshold")) {
        tc.reid_threshold =
            require_range(get_real(j, "reid_threshold", origin), 0.0, 1.0, true, "reid_threshold");
    }
    if (j.contains("assoc_threshold")) {
        tc.assoc_threshold = require_range(get_real(j, "assoc_threshold", origin), 0.0, 1.0, true,
                                           "assoc_threshold");
    }
    if (j.contains("motion_gate")) {
        double gate = get_real(j, "motion_gate", origin);
        if (!(gate > 0.0)) throw Error(ErrorCode::RangeViolation, "motion_gate must be > 0");
        tc.motion_gate = gate;
    }
    if (j.contains("embed_separation")) {
        sc.embed_separation =
            require_range(get_real(j, "embed_separation", origin), 0.0, 1.0, true,
                          "embed_separation");
    }
    if (j.contains("events")) {
        for (const auto& ej : j["events"]) {
            reject_unknown_keys(ej, {"kind", "target", "start", "end", "severity"},
                                origin + ".events");
            Event e;
            e.kind = event_kind_from_name(get_string(ej, "kind", origin));
            e.target = static_cast<int>(get_int(ej, "target", origin));
            e.start = get_int(ej, "start", origin);
            e.end = get_int(ej, "end", origin);
            e.severity = ej.contains("severity")
                             ? require_range(get_real(ej, "severity", origin), 0.0, 1.0, false,
                                             "severity")
                             : 1.0;
            sc.events.push_back(e);
        }
    }
    if (j.contains("distractors")) {
        for (const auto& dj : j["distractors"]) {
            reject_unknown_keys(dj, {"similarity", "motion", "crowding", "target"},
                                origin + ".distractors");
            DistractorSpec d;
            d.similarity = require_range(get_real(dj, "similarity", origin), 0.0, 1.0, false,
                                         "similarity");
            d.motion = distractor_motion_from_name(get_string(dj, "motion", origin));
            d.crowding =
                require_range(get_real(dj, "crowding", origin), 0.0, 1.0, false, "crowding");
            if (dj.contains("target")) d.target = static_cast<int>(get_int(dj, "target", origin));
            sc.distractors.push_back(d);
        }
    }

    tc.feature_dim = sc.feature_dim;
    tc.pointer_dim = sc.pointer_dim;
    try {
        sc.validate();
        tc.validate();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidWindow) throw;
        throw Error(ErrorCode::RangeViolation, origin + ": " + e.what());
    }
    return out;
}

ParsedConfig parse_config(const std::string& path) {
    return parse_config_text(read_text_file(path), path);
}

namespace {

std::string manifest_line(const RunManifest& m) {
    std::string out = "{";
    out += "\"created_at\":" + json_string(m.created_at);
    out += ",\"digest\":" + json_string(m.digest);
    out += ",\"policy\":" + json_string(policy_kind_name(m.policy));
    out += ",\"schema\":" + fmt_int(m.schema);
    out += ",\"seed\":" + fmt_int(static_cast<std::int64_t>(m.seed));
    out += ",\"version\":" + json_string(m.version);
    out += "}";
    return out;
}

std::string frame_line(const FrameResult& frame) {
    std::string out = "{\"new\":[";
    for (std::size_t i = 0; i < frame.new_track_ids.size(); ++i) {
        if (i != 0) out += ",";
        out += fmt_int(frame.new_track_ids[i]);
    }
    out += "],\"p\":" + fmt_real(frame.presence.value());
    out += ",\"t\":" + fmt_int(frame.t);
    out += ",\"tracks\":[";
    for (std::size_t i = 0; i < frame.outputs.size(); ++i) {
        const TrackOutput& o = frame.outputs[i];
        if (i != 0) out += ",";
        out += "{\"id\":" + fmt_int(o.track_id);
        out += ",\"mask\":" + json_mask(o.mask);
        out += ",\"q\":" + fmt_real(o.quality.value());
        out += ",\"saved\":" + std::string(o.decision.saved ? "true" : "false");
        out += ",\"score\":" + fmt_real(o.decision.score_s);
        out += ",\"slot\":" + fmt_int(o.slot) + "}";
    }
    out += "]}";
    return out;
}

}  // namespace

std::string run_to_text(const RunRecord& record) {
    std::string out = manifest_line(record.manifest) + "\n";
    for (const FrameResult& frame : record.frames) out += frame_line(frame) + "\n";
    return out;
}

RunRecord run_from_text(const std::string& text) {
    RunRecord record;
    std::istringstream in(text);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        json j = parse_line(line, line_number);
        const std::string where = "line " + std::to_string(line_number);
        if (line_number == 1) {
            std::int64_t schema = get_int(j, "schema", where);
            if (schema != kRunSchemaVersion) {
                throw Error(ErrorCode::SchemaVersionMismatch,
                            "run schema " + std::to_string(schema) + " != " +
                                std::to_string(kRunSchemaVersion));
            }
            record.manifest.schema = static_cast<int>(schema);
            record.manifest.created_at = get_string(j, "created_at", where);
            record.manifest.digest = get_string(j, "digest", where);
            record.manifest.policy = policy_kind_from_name(get_string(j, "policy", where));
            record.manifest.seed = static_cast<std::uint64_t>(get_int(j, "seed", where));
            record.manifest.version = get_string(j, "version", where);
            continue;
        }
        FrameResult frame;
        frame.t = get_int(j, "t", where);
        frame.presence = Score::unchecked(get_real(j, "p", where));
        if (!j.contains("new") || !j["new"].is_array() || !j.contains("tracks") ||
            !j["tracks"].is_array()) {
            throw Error(ErrorCode::CorruptLine, where);
        }
        for (const auto& idj : j["new"]) {
            if (!idj.is_number_integer()) throw Error(ErrorCode::CorruptLine, where);
            frame.new_track_ids.push_back(idj.get<int>());
        }
        for (const auto& tj : j["tracks"]) {
            TrackOutput out;
            out.track_id = static_cast<int>(get_int(tj, "id", where));
            out.slot = static_cast<int>(get_int(tj, "slot", where));
            if (!tj.contains("mask")) throw Error(ErrorCode::CorruptLine, where);
            out.mask = mask_from(tj["mask"], where);
            out.quality = Score::unchecked(get_real(tj, "q", where));
            out.decision.track_id = out.track_id;
            out.decision.score_s = get_real(tj, "score", where);
            out.decision.saved = get_bool(tj, "saved", where);
            frame.outputs.push_back(std::move(out));
        }
        record.frames.push_back(std::move(frame));
    }
    if (line_number == 0) throw Error(ErrorCode::CorruptLine, "empty run file");
    return record;
}

void write_run(const RunRecord& record, const std::string& path) {
    write_text_file(path, run_to_text(record));
}

RunRecord read_run(const std::string& path) { return run_from_text(read_text_file(path)); }

std::string gt_to_text(const GroundTruth& gt) {
    std::string out = "{\"distractor_crowding\":" + json_real_array(gt.distractor_crowding);
    out += ",\"distractor_embeddings\":[";
    for (std::size_t i = 0; i < gt.distractor_embeddings.size(); ++i) {
        if (i != 0) out += ",";
        out += json_real_array(gt.distractor_embeddings[i].components());
    }
    out += "],\"embeddings\":[";
    for (std::size_t i = 0; i < gt.identity_embeddings.size(); ++i) {
        if (i != 0) out += ",";
        out += json_real_array(gt.identity_embeddings[i].components());
    }
    out += "],\"frames\":" + fmt_int(gt.num_frames());
    out += ",\"kind\":\"gt\",\"schema\":" + fmt_int(kRunSchemaVersion);
    out += ",\"world_h\":" + fmt_real(gt.world_h);
    out += ",\"world_w\":" + fmt_real(gt.world_w) + "}\n";

    for (std::int64_t t = 0; t < gt.num_frames(); ++t) {
        std::string line = "{\"distractors\":[";
        const auto& dstates = gt.distractor_frames[static_cast<std::size_t>(t)];
        for (std::size_t d = 0; d < dstates.size(); ++d) {
            if (d != 0) line += ",";
            line += json_mask(dstates[d].mask);
        }
        line += "],\"ids\":[";
        const auto& states = gt.identity_frames[static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (i != 0) line += ",";
            MaskGeom m = states[i].mask;
            m.visible_fraction = states[i].visibility;
            line += json_mask(m);
        }
        line += "],\"t\":" + fmt_int(t) + "}";
        out += line + "\n";
    }
    return out;
}

GroundTruth gt_from_text(const std::string& text) {
    GroundTruth gt;
    std::istringstream in(text);
    std::string line;
    std::size_t line_number = 0;
    std::int64_t expected_frames = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        json j = parse_line(line, line_number);
        const std::string where = "line " + std::to_string(line_number);
        if (line_number == 1) {
            std::int64_t schema = get_int(j, "schema", where);
            if (schema != kRunSchemaVersion) {
                throw Error(ErrorCode::SchemaVersionMismatch,
                            "gt schema " + std::to_string(schema));
            }
            gt.world_w = get_real(j, "world_w", where);
            gt.world_h = get_real(j, "world_h", where);
            expected_frames = get_int(j, "frames", where);
            for (const auto& ej : j["embeddings"]) {
                gt.identity_embeddings.push_back(FeatureVec::unchecked(reals_from(ej, where)));
            }
            for (const auto& ej : j["distractor_embeddings"]) {
                gt.distractor_embeddings.push_back(FeatureVec::unchecked(reals_from(ej, where)));
            }
            gt.distractor_crowding = reals_from(j["distractor_crowding"], where);
            continue;
        }
        if (!j.contains("ids") || !j["ids"].is_array()) throw Error(ErrorCode::CorruptLine, where);
        std::vector<GtState> states;
        for (const auto& mj : j["ids"]) {
            GtState s;
            s.mask = mask_from(mj, where);
            s.visibility = s.mask.visible_fraction;
            states.push_back(s);
        }
        gt.identity_frames.push_back(std::move(states));
        std::vector<GtState> dstates;
        if (j.contains("distractors")) {
            for (const auto& mj : j["distractors"]) {
                GtState s;
                s.mask = mask_from(mj, where);
                s.visibility = 1.0;
                dstates.push_back(s);
            }
        }
        gt.distractor_frames.push_back(std::move(dstates));
    }
    if (line_number == 0) throw Error(ErrorCode::CorruptLine, "empty gt file");
    if (gt.num_frames() != expected_frames) {
        throw Error(ErrorCode::CorruptLine,
                    "gt declares " + std::to_string(expected_frames) + " frames, has " +
                        std::to_string(gt.num_frames()));
    }
    const int n = gt.num_identities();
    gt.pairwise_abs_cos.assign(static_cast<std::size_t>(n), std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            gt.pairwise_abs_cos[i][k] =
                std::abs(gt.identity_embeddings[i].dot(gt.identity_embeddings[k]));
        }
    }
    return gt;
}

void write_gt(const GroundTruth& gt, const std::string& path) {
    write_text_file(path, gt_to_text(gt));
}

GroundTruth read_gt(const std::string& path) { return gt_from_text(read_text_file(path)); }

namespace {

std::string json_observation(const Observation& obs) {
    return "{\"emb\":" + json_real_array(obs.embedding.components()) +
           ",\"mask\":" + json_mask(obs.mask) + ",\"q\":" + fmt_real(obs.quality.value()) +
           ",\"slot\":" + fmt_int(obs.slot) + "}";
}

Observation observation_from(const json& j, const std::string& where) {
    Observation obs;
    obs.slot = static_cast<int>(get_int(j, "slot", where));
    obs.mask = mask_from(j["mask"], where);
    obs.embedding = FeatureVec::unchecked(reals_from(j["emb"], where));
    obs.quality = Score::unchecked(get_real(j, "q", where));
    return obs;
}

std::string json_memory_entry(const MemoryEntry& entry) {
    return "{\"cond\":" + std::string(entry.conditioning ? "true" : "false") +
           ",\"feat\":" + json_real_array(entry.feature.components()) +
           ",\"ptr\":" + json_real_array(entry.pointer.components()) +
           ",\"t\":" + fmt_int(entry.t) + "}";
}

MemoryEntry memory_entry_from(const json& j, const std::string& where) {
    MemoryEntry entry;
    entry.conditioning = get_bool(j, "cond", where);
    entry.feature = FeatureVec::unchecked(reals_from(j["feat"], where));
    entry.pointer = FeatureVec::unchecked(reals_from(j["ptr"], where));
    entry.t = get_int(j, "t", where);
    return entry;
}

std::string json_bank(const MemoryBank& bank) {
    std::string out = "{\"capacity\":" + fmt_int(static_cast<std::int64_t>(bank.capacity()));
    out += ",\"entries\":[";
    for (std::size_t i = 0; i < bank.entries().size(); ++i) {
        if (i != 0) out += ",";
        out += json_memory_entry(bank.entries()[i]);
    }
    out += "]}";
    return out;
}

MemoryBank bank_from(const json& j, const std::string& where) {
    MemoryBank bank(static_cast<std::size_t>(get_int(j, "capacity", where)));
    bool first = true;
    for (const auto& ej : j["entries"]) {
        MemoryEntry entry = memory_entry_from(ej, where);
        if (first) {
            bank.set_conditioning(std::move(entry));
            first = false;
        } else {
            bank.push(std::move(entry));
        }
    }
    return bank;
}

}  // namespace

std::string to_json(const Observation& obs) { return json_observation(obs); }

std::string to_json(const FrameInput& frame) {
    std::string out = "{\"obs\":[";
    for (std::size_t i = 0; i < frame.observations.size(); ++i) {
        if (i != 0) out += ",";
        out += json_observation(frame.observations[i]);
    }
    out += "],\"p\":" + fmt_real(frame.presence.value()) + ",\"t\":" + fmt_int(frame.t) + "}";
    return out;
}

std::string to_json(const MemoryEntry& entry) { return json_memory_entry(entry); }

std::string to_json(const MemoryBank& bank) { return json_bank(bank); }

std::string to_json(const Track& track) {
    std::string out = "{\"active\":" + std::string(track.active ? "true" : "false");
    out += ",\"bank\":" + json_bank(track.bank);
    out += ",\"created_at\":" + fmt_int(track.created_at);
    out += ",\"id\":" + fmt_int(track.track_id);
    out += ",\"last_mask\":" + json_mask(track.last_mask);
    out += ",\"last_seen\":" + fmt_int(track.last_seen);
    out += ",\"live\":" + std::string(track.live ? "true" : "false");
    out += ",\"slot\":" + fmt_int(track.slot) + "}";
    return out;
}

std::string to_json(const Group& group) {
    std::string out = "{\"created_at\":" + fmt_int(group.created_at) + ",\"members\":[";
    for (std::size_t i = 0; i < group.member_track_ids.size(); ++i) {
        if (i != 0) out += ",";
        out += fmt_int(group.member_track_ids[i]);
    }
    out += "]}";
    return out;
}

Observation observation_from_json(const std::string& text) {
    return observation_from(parse_line(text, 1), "observation");
}

FrameInput frame_input_from_json(const std::string& text) {
    json j = parse_line(text, 1);
    FrameInput frame;
    frame.t = get_int(j, "t", "frame");
    frame.presence = Score::unchecked(get_real(j, "p", "frame"));
    for (const auto& oj : j["obs"]) frame.observations.push_back(observation_from(oj, "frame"));
    return frame;
}

MemoryEntry memory_entry_from_json(const std::string& text) {
    return memory_entry_from(parse_line(text, 1), "entry");
}

MemoryBank memory_bank_from_json(const std::string& text) {
    return bank_from(parse_line(text, 1), "bank");
}

Track track_from_json(const std::string& text) {
    json j = parse_line(text, 1);
    Track track;
    track.active = get_bool(j, "active", "track");
    track.bank = bank_from(j["bank"], "track");
    track.created_at = get_int(j, "created_at", "track");
    track.track_id = static_cast<int>(get_int(j, "id", "track"));
    track.last_mask = mask_from(j["last_mask"], "track");
    track.last_seen = get_int(j, "last_seen", "track");
    track.live = get_bool(j, "live", "track");
    track.slot = static_cast<int>(get_int(j, "slot", "track"));
    return track;
}

Group group_from_json(const std::string& text) {
    json j = parse_line(text, 1);
    Group group;
    group.created_at = get_int(j, "created_at", "group");
    for (const auto& m : j["members"]) group.member_track_ids.push_back(m.get<int>());
    return group;
}

std::string strip_created_at(const std::string& file_contents) {
    const std::string key = "\"created_at\":\"";
    std::string out = file_contents;
    std::size_t pos = out.find(key);
    if (pos == std::string::npos) return out;
    std::size_t start = pos + key.size();
    std::size_t end = out.find('"', start);
    if (end == std::string::npos) return out;
    out.erase(start, end - start);
    return out;
}

CompareRow CompareRow::from_report(std::string archetype, std::string policy, std::string seed,
                                   const MetricsReport& report) {
    CompareRow row;
    row.archetype = std::move(archetype);
    row.policy = std::move(policy);
    row.seed = std::move(seed);
    row.hota = report.hota;
    row.deta = report.deta;
    row.assa = report.assa;
    row.j = report.j;
    row.f = report.f;
    row.idsw = static_cast<double>(report.idsw);
    return row;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
    std::string out = "schema,archetype,policy,seed,hota,deta,assa,j,f,idsw\r\n";
    for (const CompareRow& r : rows) {
        out += std::to_string(kCsvSchemaVersion) + "," + r.archetype + "," + r.policy + "," +
               r.seed + "," + fmt_real(r.hota) + "," + fmt_real(r.deta) + "," + fmt_real(r.assa) +
               "," + fmt_real(r.j) + "," + fmt_real(r.f) + "," + fmt_real(r.idsw) + "\r\n";
    }
    return out;
}

std::string sweep_csv(const std::vector<DensityGapRow>& rows) {
    std::string out =
        "schema,targets,seeds,hota_coupled,hota_decoupled,delta_hota,se_delta_hota,"
        "idsw_coupled,idsw_decoupled,delta_idsw,se_delta_idsw\r\n";
    for (const DensityGapRow& r : rows) {
        out += std::to_string(kCsvSchemaVersion) + "," + std::to_string(r.num_targets) + "," +
               std::to_string(r.seeds) + "," + fmt_real(r.hota_coupled) + "," +
               fmt_real(r.hota_decoupled) + "," + fmt_real(r.delta_hota) + "," +
               fmt_real(r.se_delta_hota) + "," + fmt_real(r.idsw_coupled) + "," +
               fmt_real(r.idsw_decoupled) + "," + fmt_real(r.delta_idsw) + "," +
               fmt_real(r.se_delta_idsw) + "\r\n";
    }
    return out;
}

std::string eval_csv(const MetricsReport& report) {
    std::string out = "schema,j,f,jf,hota,deta,assa,idsw\r\n";
    out += std::to_string(kCsvSchemaVersion) + "," + fmt_real(report.j) + "," +
           fmt_real(report.f) + "," + fmt_real(report.jf) + "," + fmt_real(report.hota) + "," +
           fmt_real(report.deta) + "," + fmt_real(report.assa) + "," +
           std::to_string(report.idsw) + "\r\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace memtrack
