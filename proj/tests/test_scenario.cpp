#include <cmath>

#include "doctest.h"
#include "memtrack/geometry.hpp"
#include "memtrack/policy.hpp"
#include "memtrack/scenario.hpp"

using namespace memtrack;

namespace {

ScenarioConfig tiny(int targets, std::int64_t frames, std::uint64_t seed) {
    ScenarioConfig config;
    config.num_targets = targets;
    config.num_frames = frames;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("single identity, single frame, fully visible") {
    GroundTruth gt = generate(tiny(1, 1, 9));
    REQUIRE(gt.num_frames() == 1);
    REQUIRE(gt.num_identities() == 1);
    CHECK(gt.identity_frames[0][0].visibility == 1.0);
    CHECK(gt.identity_embeddings[0].valid());
}

TEST_CASE("exit-reentry zeroes visibility exactly inside the window") {
    ScenarioConfig config = tiny(1, 10, 5);
    config.events.push_back({EventKind::ExitReentry, 0, 3, 7, 1.0});
    GroundTruth gt = generate(config);
    for (std::int64_t t = 0; t < 10; ++t) {
        double v = gt.identity_frames[static_cast<std::size_t>(t)][0].visibility;
        if (t >= 3 && t < 7) {
            CHECK(v == 0.0);
        } else {
            CHECK(v == 1.0);
        }
    }
}

TEST_CASE("reentry relocates the target far from its exit position") {
    ScenarioConfig config = tiny(1, 30, 5);
    config.events.push_back({EventKind::ExitReentry, 0, 3, 7, 1.0});
    GroundTruth gt = generate(config);
    const MaskGeom& before = gt.identity_frames[6][0].mask;
    const MaskGeom& after = gt.identity_frames[7][0].mask;
    CHECK(center_distance(before, after) >= 0.3 * std::min(config.world_w, config.world_h));
}

TEST_CASE("generation is deterministic in the seed") {
    ScenarioConfig config = tiny(4, 25, 77);
    config.events.push_back({EventKind::Occlusion, 1, 5, 15, 0.6});
    GroundTruth a = generate(config);
    GroundTruth b = generate(config);
    REQUIRE(a.num_frames() == b.num_frames());
    for (std::int64_t t = 0; t < a.num_frames(); ++t) {
        for (int i = 0; i < 4; ++i) {
            CHECK(a.identity_frames[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)].mask ==
                  b.identity_frames[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)].mask);
        }
    }
    for (int i = 0; i < 4; ++i) CHECK(a.identity_embeddings[static_cast<std::size_t>(i)] ==
                                      b.identity_embeddings[static_cast<std::size_t>(i)]);
    std::vector<FrameInput> sa = make_stream(a, config);
    std::vector<FrameInput> sb = make_stream(b, config);
    REQUIRE(sa.size() == sb.size());
    for (std::size_t k = 0; k < sa.size(); ++k) CHECK(sa[k] == sb[k]);
}

TEST_CASE("invalid event windows are rejected") {
    ScenarioConfig config = tiny(1, 10, 1);
    config.events.push_back({EventKind::Occlusion, 0, 7, 12, 0.5});
    CHECK_THROWS_AS(generate(config), Error);
    config.events[0] = {EventKind::Occlusion, 0, 7, 7, 0.5};
    CHECK_THROWS_AS(generate(config), Error);
}

TEST_CASE("noiseless perception reproduces visibility exactly") {
    ScenarioConfig config = tiny(2, 8, 21);
    config.noise = NoiseModel{0.0, 0.0, 0.0};
    config.events.push_back({EventKind::Occlusion, 0, 2, 6, 0.75});
    GroundTruth gt = generate(config);
    Rng rng(1);
    for (std::int64_t t = 0; t < 8; ++t) {
        FrameInput frame = perceive(gt, t, config, rng);
        for (const Observation& obs : frame.observations) {
            double v = gt.identity_frames[static_cast<std::size_t>(t)]
                                         [static_cast<std::size_t>(obs.slot)].visibility;
            CHECK(obs.quality.value() == v);
            CHECK(obs.mask.visible_fraction == v);
        }
        CHECK(frame.presence.value() == 1.0);  // the other identity stays visible
    }
}

TEST_CASE("the wrongly-saved precondition: absent target, confident frame") {
    // One target out of view while another is fully visible: its q collapses
    // to zero, the frame presence stays at one.
    ScenarioConfig config = tiny(2, 6, 33);
    config.noise = NoiseModel{0.0, 0.0, 0.0};
    config.events.push_back({EventKind::ExitReentry, 0, 1, 5, 1.0});
    GroundTruth gt = generate(config);
    Rng rng(1);
    for (std::int64_t t = 0; t < 6; ++t) {
        FrameInput frame = perceive(gt, t, config, rng);
        if (t >= 1 && t < 5) {
            CHECK(frame.observations[0].quality.value() == 0.0);
            CHECK(frame.presence.value() == 1.0);
        }
    }
}

TEST_CASE("a fully overlapping similar distractor suppresses q to one minus rho") {
    ScenarioConfig config = tiny(1, 3, 15);
    config.noise = NoiseModel{0.0, 0.0, 0.0};
    config.distractors.push_back({0.9, DistractorMotion::Parallel, 1.0, 0});
    GroundTruth gt = generate(config);
    // Force exact full overlap and exact cosine for the formula check.
    for (auto& frame : gt.distractor_frames) {
        frame[0].mask = gt.identity_frames[0][0].mask;
    }
    gt.distractor_frames[1][0].mask = gt.identity_frames[1][0].mask;
    gt.distractor_frames[2][0].mask = gt.identity_frames[2][0].mask;
    Rng rng(1);
    FrameInput frame = perceive(gt, 0, config, rng);
    double cos_sim = gt.identity_embeddings[0].dot(gt.distractor_embeddings[0]);
    CHECK(cos_sim == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(frame.observations[0].quality.value() == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("perception never leaves the unit interval and embeddings stay unit") {
    ScenarioConfig config = tiny(5, 40, 1234);
    config.noise = NoiseModel{0.3, 0.3, 2.0};  // deliberately loud
    config.events.push_back({EventKind::ExitReentry, 2, 5, 20, 1.0});
    config.events.push_back({EventKind::Occlusion, 0, 10, 30, 0.9});
    GroundTruth gt = generate(config);
    std::vector<FrameInput> stream = make_stream(gt, config);
    for (const FrameInput& frame : stream) {
        CHECK(frame.presence.value() >= 0.0);
        CHECK(frame.presence.value() <= 1.0);
        for (const Observation& obs : frame.observations) {
            CHECK(obs.quality.value() >= 0.0);
            CHECK(obs.quality.value() <= 1.0);
            CHECK(obs.embedding.valid());
        }
    }
}

TEST_CASE("identity embeddings respect the separation bound") {
    ScenarioConfig config = tiny(8, 1, 2);
    GroundTruth gt = generate(config);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            if (i == j) continue;
            CHECK(gt.pairwise_abs_cos[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] <=
                  config.embed_separation + 1e-12);
        }
    }
}

TEST_CASE("reentry archetype: the group stays confident while the target is absent") {
    // Frame-by-frame: group_score over tau while the absent target's own
    // score is exactly zero.
    ArchetypePreset preset = archetype("reentry", 42);
    CHECK(preset.scenario.num_targets == 3);
    REQUIRE(preset.scenario.events.size() == 1);
    CHECK(preset.scenario.events[0].end - preset.scenario.events[0].start == 14);  // 2K, K=7
    GroundTruth gt = generate(preset.scenario);
    std::vector<FrameInput> stream = make_stream(gt, preset.scenario);
    for (const FrameInput& frame : stream) {
        if (frame.t < preset.scenario.events[0].start || frame.t >= preset.scenario.events[0].end) {
            continue;
        }
        std::vector<Score> qualities;
        for (const Observation& obs : frame.observations) qualities.push_back(obs.quality);
        CHECK(group_score(qualities, frame.presence) > preset.tracker.policy.tau);
        CHECK(per_target_score(frame.observations[0].quality, frame.presence) == 0.0);
    }
}

TEST_CASE("density archetype scales the target count and staggers reentries") {
    ArchetypePreset preset = archetype("density(10)", 3);
    CHECK(preset.scenario.num_targets == 10);
    CHECK(preset.scenario.events.size() == 4);  // ceil(10/3)
    for (std::size_t a = 0; a < preset.scenario.events.size(); ++a) {
        for (std::size_t b = a + 1; b < preset.scenario.events.size(); ++b) {
            bool disjoint = preset.scenario.events[a].end <= preset.scenario.events[b].start ||
                            preset.scenario.events[b].end <= preset.scenario.events[a].start;
            CHECK(disjoint);
        }
    }
    CHECK(archetype("density(3)", 0).scenario.events.size() == 1);
}

TEST_CASE("occlusion archetype declares one occlusion event at severity 0.8") {
    ArchetypePreset preset = archetype("occlusion", 7);
    int occlusion_events = 0;
    for (const Event& e : preset.scenario.events) {
        if (e.kind == EventKind::Occlusion) {
            ++occlusion_events;
            CHECK(e.severity == 0.8);
        }
    }
    CHECK(occlusion_events == 1);
}

TEST_CASE("unknown archetype names are rejected") {
    CHECK_THROWS_AS(archetype("nonesuch", 0), Error);
    CHECK_THROWS_AS(archetype("density(x)", 0), Error);
    CHECK_THROWS_AS(archetype("density(0)", 0), Error);
}

}  // TEST_SUITE
