#include <cmath>

#include "doctest.h"
#include "memtrack/tracker.hpp"

using namespace memtrack;

namespace {

FeatureVec axis(std::size_t dim, std::size_t k) {
    std::vector<double> v(dim, 0.0);
    v[k % dim] = 1.0;
    return FeatureVec(std::move(v));
}

Observation obs_at(int slot, double x, double y, double q = 1.0, double v = 1.0,
                   FeatureVec embedding = axis(16, 0)) {
    Observation obs;
    obs.slot = slot;
    obs.mask = MaskGeom(x, y, 2.0, v);
    obs.embedding = std::move(embedding);
    obs.quality = Score(q);
    return obs;
}

TrackerConfig base_config(Mode mode = Mode::Pvs, PolicyKind kind = PolicyKind::Decoupled) {
    TrackerConfig config;
    config.policy = PolicyConfig(0.5, kind);
    config.mode = mode;
    config.encoder_noise_seed = 11;
    return config;
}

FrameInput frame_of(std::int64_t t, Score p, std::vector<Observation> observations) {
    FrameInput frame;
    frame.t = t;
    frame.presence = p;
    frame.observations = std::move(observations);
    return frame;
}

MemoryBank bank_of(std::initializer_list<FeatureVec> features, std::size_t capacity = 7) {
    MemoryBank bank(capacity);
    std::int64_t t = 0;
    for (const FeatureVec& f : features) {
        MemoryEntry e;
        e.t = t;
        e.feature = f;
        e.pointer = FeatureVec(std::vector<double>{1.0, 0.0, 0.0, 0.0});
        if (t == 0) {
            bank.set_conditioning(e);
        } else {
            bank.push(e);
        }
        ++t;
    }
    return bank;
}

}  // namespace

TEST_SUITE("tracker") {

TEST_CASE("encode at full visibility returns the embedding exactly") {
    Rng rng(5);
    Observation obs = obs_at(0, 0, 0, 1.0, 1.0, axis(16, 3));
    auto [feature, pointer] = encode_feature(obs, rng, 16, 4);
    CHECK(feature == obs.embedding);  // bit-exact
    CHECK(pointer.dim() == 4);
}

TEST_CASE("encode at zero visibility is pure noise, uncorrelated on average") {
    // Analytic E|cos| for random unit pairs in dim 16 is about 0.2026.
    Rng rng(7);
    FeatureVec e = axis(16, 0);
    double sum_abs_cos = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        Observation obs = obs_at(0, 0, 0, 0.0, 0.0, e);
        auto [feature, pointer] = encode_feature(obs, rng, 16, 4);
        sum_abs_cos += std::abs(feature.dot(e));
    }
    double mean_abs_cos = sum_abs_cos / draws;
    CHECK(mean_abs_cos < 0.5);
    CHECK(mean_abs_cos == doctest::Approx(0.2026).epsilon(0.05));
}

TEST_CASE("encode is deterministic under an identical rng state") {
    Rng a(42), b(42);
    Observation obs = obs_at(1, 3, 4, 0.8, 0.37, axis(16, 5));
    auto ra = encode_feature(obs, a, 16, 4);
    auto rb = encode_feature(obs, b, 16, 4);
    CHECK(ra.first == rb.first);
    CHECK(ra.second == rb.second);
}

TEST_CASE("partial visibility mixes embedding and noise, renormalized") {
    Rng rng(3);
    Observation obs = obs_at(0, 0, 0, 1.0, 0.5, axis(16, 2));
    auto [feature, pointer] = encode_feature(obs, rng, 16, 4);
    CHECK(feature.valid());
    double cos_e = feature.dot(obs.embedding);
    CHECK(cos_e > 0.2);  // half the mass is the true embedding
    CHECK(cos_e < 1.0);
}

TEST_CASE("readout is the max cosine over all entries") {
    FeatureVec e0 = axis(4, 0), e1 = axis(4, 1), e2 = axis(4, 2);
    MemoryBank bank = bank_of({e0, e1});
    CHECK(readout(bank, e1) == doctest::Approx(1.0));
    CHECK(readout(bank, e2) == doctest::Approx(0.0));
    // A single polluted entry does not mask the clean one.
    CHECK(readout(bank, e0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(readout(MemoryBank(4), e0), Error);
}

TEST_CASE("reid readout ignores the conditioning entry once recents exist") {
    FeatureVec clean = axis(4, 0), noise = axis(4, 1);
    MemoryBank polluted = bank_of({clean, noise, noise});
    CHECK(readout(polluted, clean) == doctest::Approx(1.0));
    CHECK(reid_readout(polluted, clean) == doctest::Approx(0.0));
    MemoryBank fresh = bank_of({clean});
    CHECK(reid_readout(fresh, clean) == doctest::Approx(1.0));  // sole-entry fallback
}

TEST_CASE("pvs association is slot-bound and motion-gated") {
    TrackerConfig config = base_config(Mode::Pvs);
    Tracker tracker(config);
    tracker.step(frame_of(0, Score(1.0), {obs_at(0, 10, 10), obs_at(1, 50, 50, 1.0, 1.0, axis(16, 1))}));

    // Continuation at the last-seen position stays matched to its own slot.
    std::vector<Observation> near{obs_at(0, 10.5, 10.0), obs_at(1, 50.0, 50.5, 1.0, 1.0, axis(16, 1))};
    Association assoc = associate(near, tracker.tracks(), config);
    REQUIRE(assoc.matches.size() == 2);
    CHECK(assoc.matches[0] == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(assoc.matches[1] == std::pair<std::size_t, std::size_t>{1, 1});

    // A jump of ten gate radii goes unmatched.
    std::vector<Observation> far{obs_at(0, 10.0 + 10.0 * config.motion_gate * 8.0, 10.0)};
    Association assoc_far = associate(far, tracker.tracks(), config);
    CHECK(assoc_far.matches.empty());
    CHECK(assoc_far.unmatched_observations.size() == 1);
}

TEST_CASE("pcs association is greedy by similarity") {
    // Two observations, two tracks, similarity matrix {(a,T1)=0.9,(a,T2)=0.3,
    // (b,T1)=0.4,(b,T2)=0.8} -> a-T1, b-T2.
    TrackerConfig config = base_config(Mode::Pcs);
    config.assoc_threshold = 0.25;
    std::vector<double> ea{0.9, std::sqrt(1.0 - 0.81), 0, 0}, eb{0.4, 0, std::sqrt(1.0 - 0.16), 0};
    // Track banks hold axis features; craft observation embeddings with the
    // wanted cosines against them.
    std::vector<double> a_raw(16, 0.0), b_raw(16, 0.0);
    a_raw[0] = 0.9;
    a_raw[2] = 0.3;
    a_raw[3] = std::sqrt(1.0 - 0.81 - 0.09);
    b_raw[0] = 0.4;
    b_raw[2] = 0.8;
    b_raw[3] = std::sqrt(1.0 - 0.16 - 0.64);
    Observation a = obs_at(0, 10, 10, 1.0, 1.0, FeatureVec(a_raw));
    Observation b = obs_at(1, 12, 10, 1.0, 1.0, FeatureVec(b_raw));

    Tracker tracker(config);
    tracker.step(frame_of(0, Score(1.0),
                          {obs_at(0, 10, 10, 1.0, 1.0, axis(16, 0)),
                           obs_at(1, 12, 10, 1.0, 1.0, axis(16, 2))}));
    Association assoc = associate(std::vector<Observation>{a, b}, tracker.tracks(), config);
    REQUIRE(assoc.matches.size() == 2);
    CHECK(assoc.matches[0] == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(assoc.matches[1] == std::pair<std::size_t, std::size_t>{1, 1});
}

TEST_CASE("reidentify restores the original id from a clean bank") {
    Track track;
    track.track_id = 2;
    track.bank = bank_of({axis(16, 4), axis(16, 4)});
    std::vector<const Track*> candidates{&track};
    Observation obs = obs_at(0, 0, 0, 1.0, 1.0, axis(16, 4));
    auto reid = reidentify(obs, candidates, 0.6);
    REQUIRE(reid.has_value());
    CHECK(*reid == 2);
}

TEST_CASE("reidentify mints a fresh identity when the bank was flushed to noise") {
    // Coupled-policy absence pollution: recent entries are noise vectors.
    Rng rng(123);
    int new_track_outcomes = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        FeatureVec identity = FeatureVec(rng.unit_vector(16));
        MemoryBank bank(7);
        MemoryEntry cond;
        cond.t = 0;
        cond.feature = identity;  // clean prompt frame
        cond.pointer = FeatureVec(rng.unit_vector(4));
        bank.set_conditioning(cond);
        for (int t = 1; t <= 7; ++t) {  // K consecutive blank-mask saves
            MemoryEntry e;
            e.t = t;
            e.feature = FeatureVec(rng.unit_vector(16));
            e.pointer = FeatureVec(rng.unit_vector(4));
            bank.push(e);
        }
        Track track;
        track.track_id = 0;
        track.bank = bank;
        std::vector<const Track*> candidates{&track};
        Observation obs = obs_at(0, 0, 0, 1.0, 1.0, identity);
        if (!reidentify(obs, candidates, 0.6).has_value()) ++new_track_outcomes;
    }
    // The tail of a 16-dim cosine crosses 0.6 rarely; most trials must drift.
    CHECK(new_track_outcomes >= trials * 9 / 10);
}

TEST_CASE("reidentify with no candidates is a fresh identity") {
    std::vector<const Track*> none;
    Observation obs = obs_at(0, 0, 0);
    CHECK_FALSE(reidentify(obs, none, 0.6).has_value());
}

TEST_CASE("first frame initializes one group with conditioning-only banks") {
    Tracker tracker(base_config(Mode::Pvs));
    FrameResult result = tracker.step(frame_of(
        0, Score(1.0),
        {obs_at(0, 10, 10), obs_at(1, 30, 10, 1.0, 1.0, axis(16, 1)),
         obs_at(2, 50, 10, 1.0, 1.0, axis(16, 2))}));
    CHECK(result.new_track_ids == std::vector<int>{0, 1, 2});
    REQUIRE(tracker.groups().size() == 1);
    CHECK(tracker.groups()[0].member_track_ids == std::vector<int>{0, 1, 2});
    for (const Track& track : tracker.tracks()) {
        CHECK(track.bank.size() == 1);
        CHECK(track.bank.entries().front().conditioning);
    }
    REQUIRE(result.outputs.size() == 3);
}

TEST_CASE("pcs objects emerging mid-video form their own group") {
    Tracker tracker(base_config(Mode::Pcs));
    tracker.step(frame_of(0, Score(1.0), {obs_at(0, 10, 10)}));
    for (std::int64_t t = 1; t < 5; ++t) {
        tracker.step(frame_of(t, Score(1.0), {obs_at(0, 10, 10)}));
    }
    FrameResult result = tracker.step(
        frame_of(5, Score(1.0), {obs_at(0, 10, 10), obs_at(1, 80, 80, 1.0, 1.0, axis(16, 7))}));
    REQUIRE(result.new_track_ids.size() == 1);
    REQUIRE(tracker.groups().size() == 2);
    CHECK(tracker.groups()[1].created_at == 5);
    CHECK(tracker.groups()[1].member_track_ids.size() == 1);
}

TEST_CASE("pvs rejects a brand-new slot appearing mid-video") {
    Tracker tracker(base_config(Mode::Pvs));
    tracker.step(frame_of(0, Score(1.0), {obs_at(0, 10, 10)}));
    FrameResult result = tracker.step(
        frame_of(5, Score(1.0), {obs_at(0, 10, 10), obs_at(7, 80, 80, 1.0, 1.0, axis(16, 7))}));
    CHECK(result.new_track_ids.empty());
    CHECK(tracker.tracks().size() == 1);
}

TEST_CASE("blank frames: coupled saves the absent target, decoupled skips it") {
    // Two strong targets keep the frame confidence high while slot 0 goes
    // blank; the coupled rule stores its noise feature, the decoupled rule
    // refuses.
    for (PolicyKind kind : {PolicyKind::Coupled, PolicyKind::Decoupled}) {
        Tracker tracker(base_config(Mode::Pvs, kind));
        tracker.step(frame_of(0, Score(1.0),
                              {obs_at(0, 10, 10), obs_at(1, 30, 10, 1.0, 1.0, axis(16, 1)),
                               obs_at(2, 50, 10, 1.0, 1.0, axis(16, 2))}));
        FrameResult result = tracker.step(
            frame_of(1, Score(1.0),
                     {obs_at(0, 10, 10, 0.0, 0.0), obs_at(1, 30, 10, 1.0, 1.0, axis(16, 1)),
                      obs_at(2, 50, 10, 1.0, 1.0, axis(16, 2))}));
        REQUIRE(result.outputs.size() == 3);
        const TrackOutput& absent = result.outputs[0];
        CHECK(absent.track_id == 0);
        CHECK(absent.mask.blank());
        if (kind == PolicyKind::Coupled) {
            CHECK(absent.decision.saved);
            CHECK(absent.decision.score_s == doctest::Approx(2.0 / 3.0));
            CHECK(tracker.find_track(0)->bank.size() == 2);  // noise entered
        } else {
            CHECK_FALSE(absent.decision.saved);
            CHECK(absent.decision.score_s == 0.0);
            CHECK(tracker.find_track(0)->bank.size() == 1);  // conditioning only
        }
    }
}

TEST_CASE("frame indices must increase strictly") {
    Tracker tracker(base_config());
    tracker.step(frame_of(0, Score(1.0), {obs_at(0, 10, 10)}));
    CHECK_THROWS_AS(tracker.step(frame_of(0, Score(1.0), {obs_at(0, 10, 10)})), Error);
}

TEST_CASE("empty stream yields an empty record; same inputs, same record") {
    TrackerConfig config = base_config();
    CHECK(run({}, config).frames.empty());

    std::vector<FrameInput> frames;
    for (std::int64_t t = 0; t < 6; ++t) {
        frames.push_back(frame_of(t, Score(1.0),
                                  {obs_at(0, 10.0 + t, 10), obs_at(1, 40, 10.0 + t, 1.0, 1.0, axis(16, 1))}));
    }
    RunRecord a = run(frames, config);
    RunRecord b = run(frames, config);
    CHECK(a == b);
}

TEST_CASE("single-target runs are identical under both policies") {
    std::vector<FrameInput> frames;
    for (std::int64_t t = 0; t < 10; ++t) {
        double q = t % 3 == 0 ? 0.4 : 0.9;
        frames.push_back(frame_of(t, Score(0.9), {obs_at(0, 10.0 + t, 10, q)}));
    }
    RunRecord coupled = run(frames, base_config(Mode::Pvs, PolicyKind::Coupled));
    RunRecord decoupled = run(frames, base_config(Mode::Pvs, PolicyKind::Decoupled));
    REQUIRE(coupled.frames.size() == decoupled.frames.size());
    for (std::size_t k = 0; k < coupled.frames.size(); ++k) {
        CHECK(coupled.frames[k] == decoupled.frames[k]);
    }
}

TEST_CASE("one-by-one equivalence holds under decoupled, fails under coupled") {
    // Simultaneous multi-target run versus isolated per-slot runs over the
    // same filtered stream.
    const int n = 3;
    std::vector<FrameInput> frames;
    Rng stream_rng(404);
    for (std::int64_t t = 0; t < 12; ++t) {
        std::vector<Observation> observations;
        for (int s = 0; s < n; ++s) {
            double q = 0.55 + 0.45 * stream_rng.uniform();
            if (s == 1 && t >= 4 && t < 8) q = 0.1;  // one weak target
            observations.push_back(
                obs_at(s, 10.0 + 20.0 * s + t, 10, q, 1.0, axis(16, static_cast<std::size_t>(s))));
        }
        frames.push_back(frame_of(t, Score(1.0), std::move(observations)));
    }
    auto filter_slot = [&](int slot) {
        std::vector<FrameInput> filtered;
        for (const FrameInput& f : frames) {
            FrameInput g;
            g.t = f.t;
            g.presence = f.presence;  // shared frame-level score
            for (const Observation& obs : f.observations) {
                if (obs.slot == slot) g.observations.push_back(obs);
            }
            filtered.push_back(std::move(g));
        }
        return filtered;
    };

    TrackerConfig decoupled = base_config(Mode::Pvs, PolicyKind::Decoupled);
    Tracker simultaneous(decoupled);
    std::vector<FrameResult> sim_frames;
    for (const FrameInput& f : frames) sim_frames.push_back(simultaneous.step(f));

    for (int slot = 0; slot < n; ++slot) {
        Tracker isolated(decoupled);
        std::vector<FrameResult> iso_frames;
        for (const FrameInput& f : filter_slot(slot)) iso_frames.push_back(isolated.step(f));
        for (std::size_t k = 0; k < frames.size(); ++k) {
            const TrackOutput* sim_out = nullptr;
            for (const TrackOutput& out : sim_frames[k].outputs) {
                if (out.slot == slot) sim_out = &out;
            }
            REQUIRE(iso_frames[k].outputs.size() == 1);
            REQUIRE(sim_out != nullptr);
            CHECK(*sim_out == iso_frames[k].outputs[0]);  // bit-exact
        }
        CHECK(*simultaneous.find_track(slot) == *isolated.find_track(slot));
    }

    // Coupled: the weak target's bank differs between the runs.
    TrackerConfig coupled = base_config(Mode::Pvs, PolicyKind::Coupled);
    Tracker sim_coupled(coupled);
    for (const FrameInput& f : frames) sim_coupled.step(f);
    Tracker iso_coupled(coupled);
    for (const FrameInput& f : filter_slot(1)) iso_coupled.step(f);
    CHECK_FALSE(sim_coupled.find_track(1)->bank == iso_coupled.find_track(1)->bank);
}

TEST_CASE("encode rejects a mismatched embedding dimension") {
    Rng rng(1);
    Observation obs = obs_at(0, 0, 0, 1.0, 1.0, axis(8, 0));
    CHECK_THROWS_AS(encode_feature(obs, rng, 16, 4), Error);
}

TEST_CASE("pcs greedy tie-break prefers the lowest slot, then lowest id") {
    TrackerConfig config = base_config(Mode::Pcs);
    config.assoc_threshold = 0.3;
    Tracker tracker(config);
    tracker.step(frame_of(0, Score(1.0),
                          {obs_at(0, 10, 10, 1.0, 1.0, axis(16, 0)),
                           obs_at(1, 14, 10, 1.0, 1.0, axis(16, 1))}));
    // One embedding equally similar to both banks: cos = 1/sqrt(2) each.
    std::vector<double> mixed(16, 0.0);
    mixed[0] = mixed[1] = 1.0 / std::sqrt(2.0);
    FeatureVec both(mixed);
    std::vector<Observation> observations{obs_at(0, 10, 10, 1.0, 1.0, both),
                                          obs_at(1, 14, 10, 1.0, 1.0, both)};
    Association assoc = associate(observations, tracker.tracks(), config);
    REQUIRE(assoc.matches.size() == 2);
    CHECK(assoc.matches[0] == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(assoc.matches[1] == std::pair<std::size_t, std::size_t>{1, 1});
}

TEST_CASE("pcs similarity below the association threshold goes to re-id") {
    TrackerConfig config = base_config(Mode::Pcs);
    Tracker tracker(config);
    tracker.step(frame_of(0, Score(1.0), {obs_at(0, 10, 10, 1.0, 1.0, axis(16, 0))}));
    // Same slot and position, orthogonal appearance: association must not
    // bind it, and with re-id failing a fresh identity supersedes the track.
    FrameResult result = tracker.step(
        frame_of(1, Score(1.0), {obs_at(0, 10.5, 10, 1.0, 1.0, axis(16, 5))}));
    REQUIRE(result.new_track_ids.size() == 1);
    CHECK(result.new_track_ids[0] == 1);
    CHECK_FALSE(tracker.find_track(0)->live);
}

TEST_CASE("a missing slot synthesizes a blank with q zero") {
    Tracker tracker(base_config(Mode::Pvs, PolicyKind::Coupled));
    tracker.step(frame_of(0, Score(1.0),
                          {obs_at(0, 10, 10), obs_at(1, 30, 10, 1.0, 1.0, axis(16, 1)),
                           obs_at(2, 50, 10, 1.0, 1.0, axis(16, 2))}));
    // Slot 0 vanishes from the input entirely (no blank carrier observation).
    FrameResult result = tracker.step(frame_of(
        1, Score(1.0),
        {obs_at(1, 30, 10, 1.0, 1.0, axis(16, 1)), obs_at(2, 50, 10, 1.0, 1.0, axis(16, 2))}));
    REQUIRE(result.outputs.size() == 3);
    CHECK(result.outputs[0].track_id == 0);
    CHECK(result.outputs[0].quality.value() == 0.0);
    CHECK(result.outputs[0].mask.blank());
    CHECK(result.outputs[0].mask.center_x == 10.0);  // parked at last position
    // Coupled group mean (0+1+1)/3 still clears tau, so the blank is saved.
    CHECK(result.outputs[0].decision.saved);
}

TEST_CASE("minimal bank capacity of two works through the tracker") {
    TrackerConfig config = base_config(Mode::Pvs, PolicyKind::Decoupled);
    config.bank_capacity = 2;
    Tracker tracker(config);
    for (std::int64_t t = 0; t < 6; ++t) {
        tracker.step(frame_of(t, Score(1.0), {obs_at(0, 10.0 + t, 10)}));
    }
    const Track* track = tracker.find_track(0);
    REQUIRE(track != nullptr);
    CHECK(track->bank.size() == 2);
    CHECK(track->bank.entries().front().conditioning);
    CHECK(track->bank.entries().back().t == 5);
    CHECK(track->bank.invariants_hold());
}

TEST_CASE("track ids are never reused or mutated") {
    Tracker tracker(base_config(Mode::Pcs));
    tracker.step(frame_of(0, Score(1.0), {obs_at(0, 10, 10)}));
    // Force a drift: absence, then re-entry far away with a fresh embedding.
    for (std::int64_t t = 1; t <= 9; ++t) {
        tracker.step(frame_of(t, Score(1.0), {obs_at(0, 10, 10, 0.0, 0.0)}));
    }
    FrameResult result =
        tracker.step(frame_of(10, Score(1.0), {obs_at(0, 80, 80, 1.0, 1.0, axis(16, 9))}));
    REQUIRE(result.new_track_ids.size() == 1);
    CHECK(result.new_track_ids[0] == 1);  // fresh id, 0 never reused
    CHECK(tracker.find_track(0) != nullptr);
    CHECK_FALSE(tracker.find_track(0)->live);
    CHECK(tracker.find_track(1)->live);
}

TEST_CASE("after a coupled drift the singleton successor recovers by itself") {
    // First absence: the frame-0 pair keeps the group mean high, the bank is
    // flushed with noise, and re-entry mints a fresh id. The successor then
    // lives in a singleton group where the coupled rule degenerates to the
    // per-target rule, so later absences stay out of its bank and it rebinds
    // cleanly; the superseded track is never resurrected.
    TrackerConfig config = base_config(Mode::Pvs, PolicyKind::Coupled);
    config.feature_dim = 64;
    Tracker tracker(config);
    FeatureVec identity = FeatureVec(Rng(99).unit_vector(64));
    FeatureVec partner_a = FeatureVec(Rng(100).unit_vector(64));
    FeatureVec partner_b = FeatureVec(Rng(101).unit_vector(64));

    auto visible = [&](int slot, double x, const FeatureVec& e) {
        Observation obs;
        obs.slot = slot;
        obs.mask = MaskGeom(x, 50.0, 2.0, 1.0);
        obs.embedding = e;
        obs.quality = Score(1.0);
        return obs;
    };
    auto blank = [&](int slot, double x) {
        Observation obs;
        obs.slot = slot;
        obs.mask = MaskGeom(x, 50.0, 2.0, 0.0);
        obs.embedding = identity;
        obs.quality = Score(0.0);
        return obs;
    };

    // Two steady partners keep the frame-0 group mean at 2/3 > tau while the
    // target is absent.
    std::int64_t t = 0;
    double x = 10.0;
    tracker.step(frame_of(t++, Score(1.0), {visible(0, x, identity), visible(1, 200.0, partner_a),
                                            visible(2, 240.0, partner_b)}));
    std::vector<std::vector<int>> new_ids_per_cycle;
    for (int cycle = 0; cycle < 3; ++cycle) {
        for (int k = 0; k < 14; ++k) {  // 2K absence
            tracker.step(frame_of(t++, Score(1.0),
                                  {blank(0, x), visible(1, 200.0, partner_a),
                                   visible(2, 240.0, partner_b)}));
        }
        x += 60.0;  // re-entry far beyond the motion gate
        FrameResult result = tracker.step(
            frame_of(t++, Score(1.0), {visible(0, x, identity), visible(1, 200.0, partner_a),
                                       visible(2, 240.0, partner_b)}));
        new_ids_per_cycle.push_back(result.new_track_ids);
    }
    CHECK(new_ids_per_cycle[0] == std::vector<int>{3});  // drift: group-mates polluted the bank
    CHECK(new_ids_per_cycle[1].empty());                 // singleton group: no pollution, rebind
    CHECK(new_ids_per_cycle[2].empty());
    CHECK_FALSE(tracker.find_track(0)->live);  // superseded, never resurrected
    int live_on_slot0 = 0;
    for (const Track& track : tracker.tracks()) {
        if (track.live && track.slot == 0) {
            ++live_on_slot0;
            CHECK(track.track_id == 3);
        }
    }
    CHECK(live_on_slot0 == 1);
}

}  // TEST_SUITE
