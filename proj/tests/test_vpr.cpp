#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "tnr/errors.hpp"
#include "tnr/vpr.hpp"

using namespace tnr;

namespace {

struct Fixture {
    SimConfig config;
    SimWorld world;
    PathGeometry route;
    TaughtPath map;

    Fixture() {
        config.seed = 31;
        route = route_geometry({{0, 0, 0}, {19, 0, 0}});
        world = build_world(config, {{0, 0, 0}, {19, 0, 0}});
        map = testing::keyframes_every_metre(config, world, route, 20);
    }
    FeatureSet view_at(double s, std::uint64_t frame = 0) const {
        Pose p = route.arc_position(s).pose;
        p.position.z() += config.camera_height;
        return render_features(world, p, config.camera, {}, frame);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

}  // namespace

TEST_CASE("filtering returns the exhaustive cosine top-K") {
    const Fixture& f = fixture();
    for (double s : {0.0, 3.4, 9.9, 17.2}) {
        const FeatureSet q = f.view_at(s);
        std::vector<std::size_t> order(f.map.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<double> sim(f.map.size());
        for (std::size_t i = 0; i < f.map.size(); ++i)
            sim[i] = cosine_similarity(q.global_descriptor, f.map.keyframes[i].features.global_descriptor);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sim[a] > sim[b]; });
        order.resize(5);
        CHECK(filter_candidates(q.global_descriptor, f.map, 5) == order);
    }
    CHECK(filter_candidates(f.view_at(2.0).global_descriptor, f.map, 100).size() == f.map.size());
}

TEST_CASE("a keyframe's own image is its best match") {
    const Fixture& f = fixture();
    for (std::size_t k : {std::size_t{0}, std::size_t{6}, std::size_t{13}, std::size_t{19}}) {
        const VprResult r = recognize(f.map.keyframes[k].features, f.map, {});
        REQUIRE_FALSE(r.empty());
        CHECK(r.best().keyframe == k);
        CHECK(r.best().shift.shift().norm() == 0.0);
        for (std::size_t i = 1; i < r.candidates.size(); ++i)
            CHECK(r.candidates[i - 1].similarity >= r.candidates[i].similarity);
    }
}

TEST_CASE("a view between keyframes 7 and 8 ranks one of them first") {
    const Fixture& f = fixture();
    const VprResult r = recognize(f.view_at(7.5, 99), f.map, {});
    REQUIRE_FALSE(r.empty());
    const std::size_t best = r.best().keyframe;
    CHECK((best == 7 || best == 8));
    CHECK(r.score_of(best).value() == r.best().similarity);
    CHECK_FALSE(r.score_of(999).has_value());
}

TEST_CASE("without filtering only the arc-length window is scored") {
    const Fixture& f = fixture();
    VprConfig cfg;
    cfg.filtering_enabled = false;
    cfg.neighborhood_window = 2.0;
    cfg.candidate_count = 100;
    const VprResult r = recognize(f.view_at(12.0), f.map, cfg, 10.0);
    CHECK(r.candidates.size() == 5);  // keyframes 8..12
    for (const ScoredCandidate& c : r.candidates) {
        CHECK(c.keyframe >= 8);
        CHECK(c.keyframe <= 12);
    }
    CHECK(r.best().keyframe == 12);
    CHECK_THROWS_AS(recognize(f.view_at(1.0), f.map, cfg), ConfigError);
}

TEST_CASE("candidate count caps the result") {
    VprConfig cfg;
    cfg.candidate_count = 3;
    CHECK(recognize(fixture().view_at(4.0), fixture().map, cfg).candidates.size() == 3);
}
