#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "tnr/errors.hpp"
#include "tnr/feature_io.hpp"
#include "tnr/features.hpp"

using namespace tnr;
using doctest::Approx;

namespace {

Eigen::VectorXf unit(std::mt19937_64& rng, int dim) {
    std::normal_distribution<float> g;
    Eigen::VectorXf v(dim);
    for (int i = 0; i < dim; ++i) v[i] = g(rng);
    return v.normalized();
}

FeatureSet random_set(std::uint64_t seed, std::size_t n, int dim = 16) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.f, 639.f);
    FeatureSet s;
    s.image_size = {640, 480};
    for (std::size_t i = 0; i < n; ++i) s.features.push_back({{u(rng), u(rng) * 0.75f}, u(rng) / 639.f, unit(rng, dim)});
    s.global_descriptor = n ? global_descriptor_from_locals(s.features, 32) : Eigen::VectorXf::Zero(32);
    return s;
}

Feature one_hot(int i, int dim, float x = 0.f) {
    Eigen::VectorXf d = Eigen::VectorXf::Zero(dim);
    d[i] = 1.f;
    return {{x, 0.f}, 1.f, d};
}

}  // namespace

TEST_CASE("identical sets match every feature to itself") {
    const FeatureSet s = random_set(1, 40);
    const auto m = match_mutual_nn(s, s);
    REQUIRE(m.size() == 40);
    for (const Match& x : m) {
        CHECK(x.query_index == x.reference_index);
        CHECK(x.displacement.norm() == 0.0);
    }
}

TEST_CASE("a one-sided nearest neighbour is not a mutual match") {
    // q0 -> r0, but r0 is closer to q1.
    FeatureSet q;
    FeatureSet r;
    q.image_size = r.image_size = {640, 480};
    Eigen::VectorXf a(2), b(2), c(2), d(2), e(2);
    a << 1.0f, 0.0f;
    b << 0.9f, 0.1f;
    c << 0.0f, 1.0f;
    d << 0.98f, 0.05f;
    e << -1.0f, 0.0f;
    q.features = {{{0, 0}, 1, a}, {{0, 0}, 1, d}, {{0, 0}, 1, c}};
    r.features = {{{0, 0}, 1, b}, {{0, 0}, 1, e}, {{0, 0}, 1, c}};
    const auto m = match_mutual_nn(q, r);
    const auto oracle = testing::brute_force_mutual_nn(q, r);
    std::vector<std::pair<std::size_t, std::size_t>> got;
    for (const Match& x : m) got.emplace_back(x.query_index, x.reference_index);
    CHECK(got == oracle);
    CHECK(std::find(got.begin(), got.end(), std::make_pair<std::size_t, std::size_t>(0, 0)) == got.end());
}

TEST_CASE("empty inputs give no matches; mismatched dimensions are rejected") {
    const FeatureSet s = random_set(2, 5);
    CHECK(match_mutual_nn(FeatureSet{}, s).empty());
    CHECK(match_mutual_nn(s, FeatureSet{}).empty());
    CHECK_THROWS_AS(match_mutual_nn(s, random_set(3, 5, 8)), ConfigError);
}

TEST_CASE("match weight and displacement") {
    FeatureSet q;
    FeatureSet r;
    q.features = {one_hot(0, 4, 10.f)};
    r.features = {one_hot(0, 4, 25.f)};
    q.features[0].score = 0.25f;
    r.features[0].score = 0.5f;
    const auto m = match_mutual_nn(q, r);
    REQUIRE(m.size() == 1);
    CHECK(m[0].weight == Approx(0.75));
    CHECK(m[0].displacement.x() == Approx(15.0));
}

TEST_CASE("mutual matching equals the brute-force oracle") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const FeatureSet a = random_set(seed, 60, 8);
        const FeatureSet b = random_set(seed + 100, 45, 8);
        std::vector<std::pair<std::size_t, std::size_t>> got;
        for (const Match& x : match_mutual_nn(a, b)) got.emplace_back(x.query_index, x.reference_index);
        CHECK(got == testing::brute_force_mutual_nn(a, b));
    }
}

TEST_CASE("global descriptor pooling") {
    std::mt19937_64 rng(9);
    SUBCASE("single feature is truncated and renormalized") {
        Feature f{{0, 0}, 1, unit(rng, 64)};
        const Eigen::VectorXf g = global_descriptor_from_locals({&f, 1}, 16);
        CHECK(g.isApprox(f.descriptor.head(16).normalized()));
        const Eigen::VectorXf padded = global_descriptor_from_locals({&f, 1}, 100);
        CHECK(padded.head(64).isApprox(f.descriptor));
        CHECK(padded.tail(36).norm() == 0.0f);
    }
    SUBCASE("cancelling descriptors cannot be normalized") {
        const Eigen::VectorXf d = unit(rng, 8);
        std::vector<Feature> fs{{{0, 0}, 1, d}, {{0, 0}, 1, -d}};
        CHECK_THROWS_AS(global_descriptor_from_locals(fs, 8), UnusableFrameError);
        CHECK_THROWS_AS(global_descriptor_from_locals({}, 8), UnusableFrameError);
    }
    SUBCASE("50 random features equal mean-then-normalize") {
        std::vector<Feature> fs;
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(64);
        for (int i = 0; i < 50; ++i) {
            fs.push_back({{0, 0}, 1, unit(rng, 64)});
            mean += fs.back().descriptor.cast<double>();
        }
        mean /= 50.0;
        const Eigen::VectorXd expect = mean.normalized();
        const Eigen::VectorXf g = global_descriptor_from_locals(fs, 64);
        CHECK((g.cast<double>() - expect).norm() < 1e-6);  // stored as float32
    }
}

TEST_CASE("cosine similarity") {
    std::mt19937_64 rng(4);
    const Eigen::VectorXf a = unit(rng, 32);
    CHECK(cosine_similarity(a, a) == Approx(1.0));
    Eigen::VectorXf x = Eigen::VectorXf::Zero(4), y = Eigen::VectorXf::Zero(4);
    x[0] = 1;
    y[1] = 1;
    CHECK(cosine_similarity(x, y) == 0.0);
    const Eigen::VectorXf b = unit(rng, 32);
    double dot = 0.0;
    for (int i = 0; i < 32; ++i) dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    CHECK(std::abs(cosine_similarity(a, b) - dot) < 1e-12);
    CHECK_THROWS_AS(cosine_similarity(a, x), ConfigError);
}

TEST_CASE("feature set validation") {
    FeatureSet s = random_set(5, 3);
    CHECK_NOTHROW(s.validate());
    s.features[1].descriptor *= 2.0f;
    CHECK_THROWS(s.validate());
}

TEST_CASE("feature file round trip is bit exact") {
    const FeatureSet s = random_set(6, 37, 64);
    const std::vector<std::uint8_t> bytes = encode_feature_file(s, 3);
    CHECK(bytes.size() == 24 + 4 * 32 + 37 * 4 * (3 + 64));
    const FeatureFile back = decode_feature_file(bytes);
    CHECK(back.flags == 3);
    CHECK(back.set == s);
    CHECK(encode_feature_file(back.set, 3) == bytes);
}

TEST_CASE("feature file header is little-endian") {
    const std::vector<std::uint8_t> bytes = encode_feature_file(random_set(7, 2, 4));
    CHECK(bytes[0] == 'T');
    CHECK(bytes[1] == 'R');
    CHECK(bytes[2] == 'F');
    CHECK(bytes[3] == 'V');
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(bytes[8] == (640 & 0xff));
    CHECK(bytes[9] == (640 >> 8));
}

TEST_CASE("corrupt feature files are rejected with offsets") {
    const std::vector<std::uint8_t> good = encode_feature_file(random_set(8, 5, 8));
    SUBCASE("bad magic") {
        auto b = good;
        b[0] = 'X';
        try {
            decode_feature_file(b, "x.trfv");
            FAIL("accepted");
        } catch (const ParseError& e) {
            CHECK(e.offset() == 0);
            CHECK(e.source() == "x.trfv");
        }
    }
    SUBCASE("bad version") {
        auto b = good;
        b[4] = 9;
        try {
            decode_feature_file(b);
            FAIL("accepted");
        } catch (const ParseError& e) {
            CHECK(e.offset() == 4);
        }
    }
    SUBCASE("every truncation") {
        for (std::size_t n = 0; n < good.size(); n += 7) {
            const std::vector<std::uint8_t> b(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(n));
            CHECK_THROWS_AS(decode_feature_file(b), ParseError);
        }
    }
    SUBCASE("trailing bytes") {
        auto b = good;
        b.push_back(0);
        CHECK_THROWS_AS(decode_feature_file(b), ParseError);
    }
}
