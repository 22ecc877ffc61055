#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stratkit/minnorm.hpp"
#include "testutil.hpp"

using namespace stratkit;

namespace {

MetricPointSet make_set(int dim, std::vector<Rat> metric, std::vector<std::vector<Rat>> points) {
    MetricPointSet s;
    s.dim = dim;
    s.metric = std::move(metric);
    s.points = std::move(points);
    return s;
}

MetricPointSet random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim_dist(1, 6);
    std::uniform_int_distribution<int> num_dist(-2, 2);
    std::uniform_int_distribution<int> den_dist(1, 3);
    const int dim = dim_dist(rng);
    std::uniform_int_distribution<int> count_dist(1, 8);
    const int count = count_dist(rng);
    MetricPointSet s;
    s.dim = dim;
    for (int j = 0; j < dim; ++j) s.metric.emplace_back(den_dist(rng), den_dist(rng));
    for (int v = 0; v < count; ++v) {
        std::vector<Rat> p;
        for (int j = 0; j < dim; ++j) p.emplace_back(num_dist(rng), den_dist(rng));
        s.points.push_back(std::move(p));
    }
    return s;
}

}  // namespace

TEST_CASE("min_norm_point on the examples") {
    const auto symm = min_norm_point(
        make_set(2, {Rat(1), Rat(1)}, {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}));
    CHECK(symm.point == std::vector<Rat>{Rat(1, 2), Rat(1, 2)});
    CHECK(symm.normsq == Rat(1, 2));

    const auto origin = min_norm_point(
        make_set(2, {Rat(1), Rat(1)}, {{Rat(1), Rat(0)}, {Rat(-1), Rat(0)}}));
    CHECK(origin.point == std::vector<Rat>{Rat(0), Rat(0)});
    CHECK(origin.normsq == Rat(0));

    const auto chain = min_norm_point(make_set(3, {Rat(1, 2), Rat(1, 2), Rat(1, 2)},
                                               {{Rat(1), Rat(0), Rat(-1)},
                                                {Rat(0), Rat(1), Rat(-1)}}));
    CHECK(chain.point == std::vector<Rat>{Rat(1, 2), Rat(1, 2), Rat(-1)});
    CHECK(chain.normsq == Rat(3, 4));
}

TEST_CASE("affinely dependent generators are handled") {
    // e1-e3 = (e1-e2) + (e2-e3): the chain hull in dimension 3
    const auto s = make_set(3, {Rat(1, 2), Rat(1, 2), Rat(1, 2)},
                            {{Rat(1), Rat(-1), Rat(0)},
                             {Rat(0), Rat(1), Rat(-1)},
                             {Rat(1), Rat(0), Rat(-1)}});
    const auto face = min_norm_face_search(s);
    const auto wolfe = min_norm_wolfe(s);
    CHECK(face.point == std::vector<Rat>{Rat(1, 2), Rat(0), Rat(-1, 2)});
    CHECK(face.normsq == Rat(1, 4));
    CHECK(wolfe.point == face.point);
    CHECK(wolfe.normsq == face.normsq);
}

TEST_CASE("certificates validate on every output") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        const auto s = random_instance(rng);
        const auto cert = min_norm_point(s);
        CHECK(certificate_valid(s, cert));
    }
}

TEST_CASE("wolfe agrees with the exhaustive face search") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 300; ++i) {
        const auto s = random_instance(rng);
        const auto face = min_norm_face_search(s);
        const auto wolfe = min_norm_wolfe(s);
        CHECK(wolfe.normsq == face.normsq);
        CHECK(wolfe.point == face.point);
        CHECK(certificate_valid(s, wolfe));
    }
}

TEST_CASE("scaling the metric moves the norm, not the point") {
    std::mt19937_64 rng(123);
    for (int i = 0; i < 50; ++i) {
        auto s = random_instance(rng);
        const auto base = min_norm_point(s);
        auto scaled = s;
        const Rat c(7, 3);
        for (Rat& w : scaled.metric) w *= c;
        const auto after = min_norm_point(scaled);
        CHECK(after.point == base.point);
        CHECK(after.normsq == c * base.normsq);
    }
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(min_norm_point(make_set(2, {Rat(1), Rat(0)}, {{Rat(1), Rat(1)}})),
                    input_error);
    CHECK_THROWS_AS(min_norm_point(make_set(2, {Rat(1), Rat(1)}, {})), input_error);
    CHECK_THROWS_AS(min_norm_point(make_set(2, {Rat(1), Rat(1)}, {{Rat(1)}})), input_error);
}
