#include "doctest.h"
#include "memtrack/core.hpp"

using namespace memtrack;

namespace {

FeatureVec unit_axis(std::size_t dim, std::size_t axis) {
    std::vector<double> v(dim, 0.0);
    v[axis] = 1.0;
    return FeatureVec(std::move(v));
}

Observation make_obs(int slot, double q = 1.0, double v = 1.0) {
    Observation obs;
    obs.slot = slot;
    obs.mask = MaskGeom(10.0 + slot * 10.0, 10.0, 2.0, v);
    obs.embedding = unit_axis(16, static_cast<std::size_t>(slot) % 16);
    obs.quality = Score(q);
    return obs;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("score rejects values outside [0,1]") {
    CHECK(Score(0.0).value() == 0.0);
    CHECK(Score(1.0).value() == 1.0);
    CHECK_THROWS_AS(Score(1.2), Error);
    CHECK_THROWS_AS(Score(-0.1), Error);
    try {
        Score(1.2);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ScoreOutOfRange);
    }
}

TEST_CASE("feature vec enforces unit norm at construction") {
    CHECK_THROWS_AS(FeatureVec(std::vector<double>{0.5, 0.5}), Error);
    FeatureVec v = FeatureVec::normalized({3.0, 4.0});
    CHECK(v[0] == doctest::Approx(0.6));
    CHECK(v[1] == doctest::Approx(0.8));
    CHECK(v.valid());
    CHECK_THROWS_AS(FeatureVec::normalized({0.0, 0.0}), Error);
}

TEST_CASE("mask geometry invariants") {
    CHECK_THROWS_AS(MaskGeom(0, 0, 0.0, 1.0), Error);
    CHECK_THROWS_AS(MaskGeom(0, 0, 1.0, 1.5), Error);
    MaskGeom blank(0, 0, 2.0, 0.0);
    CHECK(blank.blank());
    CHECK(blank.effective_radius() == 0.0);
    MaskGeom half(0, 0, 2.0, 0.25);
    CHECK(half.effective_radius() == doctest::Approx(1.0));
}

TEST_CASE("validate_frame passes a clean frame through unchanged") {
    FrameInput frame;
    frame.t = 0;
    frame.presence = Score(1.0);
    frame.observations = {make_obs(0), make_obs(1), make_obs(2)};
    const FrameInput& same = validate_frame(frame);
    CHECK(same == frame);
}

TEST_CASE("validate_frame names the duplicated slot") {
    FrameInput frame;
    frame.presence = Score(1.0);
    frame.observations = {make_obs(0), make_obs(0)};
    try {
        validate_frame(frame);
        FAIL("expected DuplicateSlot");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateSlot);
        CHECK(std::string(e.what()).find("0") != std::string::npos);
    }
}

TEST_CASE("validate_frame catches out-of-range scores from unchecked inputs") {
    FrameInput frame;
    frame.presence = Score(1.0);
    Observation obs = make_obs(0);
    obs.quality = Score::unchecked(1.2);
    frame.observations = {obs};
    try {
        validate_frame(frame);
        FAIL("expected ScoreOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ScoreOutOfRange);
    }
}

TEST_CASE("validate_frame catches non-unit embeddings") {
    FrameInput frame;
    frame.presence = Score(1.0);
    Observation obs = make_obs(0);
    obs.embedding = FeatureVec::unchecked({0.5, 0.5});
    frame.observations = {obs};
    CHECK_THROWS_AS(validate_frame(frame), Error);
}

TEST_CASE("memory bank keeps the conditioning entry and evicts FIFO") {
    MemoryBank bank(3);
    MemoryEntry cond;
    cond.t = 0;
    cond.feature = unit_axis(4, 0);
    cond.pointer = unit_axis(4, 0);
    bank.set_conditioning(cond);
    CHECK(bank.size() == 1);
    CHECK(bank.entries().front().conditioning);

    for (int t = 1; t <= 4; ++t) {
        MemoryEntry e;
        e.t = t;
        e.feature = unit_axis(4, static_cast<std::size_t>(t) % 4);
        e.pointer = unit_axis(4, 0);
        bank.push(e);
        CHECK(bank.size() <= 3);
        CHECK(bank.invariants_hold());
    }
    // capacity 3: conditioning plus the two newest non-conditioning entries
    REQUIRE(bank.size() == 3);
    CHECK(bank.entries()[0].t == 0);
    CHECK(bank.entries()[1].t == 3);
    CHECK(bank.entries()[2].t == 4);
}

TEST_CASE("memory bank rejects a second conditioning entry and tiny capacity") {
    CHECK_THROWS_AS(MemoryBank(1), Error);
    MemoryBank bank(2);
    MemoryEntry cond;
    cond.feature = unit_axis(4, 0);
    cond.pointer = unit_axis(4, 0);
    bank.set_conditioning(cond);
    CHECK_THROWS_AS(bank.set_conditioning(cond), Error);
    MemoryBank empty(2);
    MemoryEntry e;
    e.feature = unit_axis(4, 1);
    e.pointer = unit_axis(4, 1);
    CHECK_THROWS_AS(empty.push(e), Error);
}

}  // TEST_SUITE
