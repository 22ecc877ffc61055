#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "merge_oracle.hpp"
#include "stratkit/filtcalc.hpp"
#include "testutil.hpp"

using namespace stratkit;

namespace {

FAtom atom(const std::string& id, long long rank = 1, long long degree = 0) {
    return FAtom{id, rank, degree};
}

Layer layer(std::vector<std::pair<long long, FAtom>> entries) {
    Layer l;
    for (auto& [m, a] : entries) l.push_back(LayerEntry{m, a});
    return l;
}

FiltSpec spec(std::vector<Layer> layers) { return make_filt_spec(std::move(layers)); }

DeltaFilt one_chain(FiltSpec f) {
    std::vector<int> all;
    for (int k = 1; k <= static_cast<int>(f.layers.size()); ++k) all.push_back(k);
    return DeltaFilt{std::move(f), {all}};
}

std::vector<std::pair<std::string, long long>> gr_ids(const Layer& g) {
    std::vector<std::pair<std::string, long long>> out;
    for (const auto& e : g) out.emplace_back(e.atom.id, e.mult);
    return out;
}

}  // namespace

TEST_CASE("gr_of on the examples") {
    CHECK(gr_ids(gr_of(spec({layer({{1, atom("a")}}), layer({{1, atom("b")}})}))) ==
          std::vector<std::pair<std::string, long long>>{{"a", 1}, {"b", 1}});
    CHECK(gr_ids(gr_of(spec({layer({{2, atom("a")}})}))) ==
          std::vector<std::pair<std::string, long long>>{{"a", 2}});
    CHECK(gr_ids(gr_of(spec({layer({{1, atom("a")}}),
                             layer({{1, atom("a")}, {1, atom("b")}})}))) ==
          std::vector<std::pair<std::string, long long>>{{"a", 2}, {"b", 1}});
    CHECK_THROWS_AS(gr_of(spec({layer({{1, atom("a", 1, 1)}, {1, atom("b", 1, 0)}})})),
                    input_error);
}

TEST_CASE("direct_sum on the examples") {
    const auto ab = spec({layer({{1, atom("a")}}), layer({{1, atom("b")}})});
    const auto cd = spec({layer({{1, atom("c")}}), layer({{1, atom("d")}})});
    const auto c = spec({layer({{1, atom("c")}})});

    const auto max_equal = direct_sum(ab, cd, SumMode::max);
    REQUIRE(max_equal.layers.size() == 2);
    CHECK(gr_ids(max_equal.layers[0]) ==
          std::vector<std::pair<std::string, long long>>{{"a", 1}, {"c", 1}});
    CHECK(gr_ids(max_equal.layers[1]) ==
          std::vector<std::pair<std::string, long long>>{{"b", 1}, {"d", 1}});

    const auto max_short = direct_sum(ab, c, SumMode::max);
    REQUIRE(max_short.layers.size() == 2);
    CHECK(gr_ids(max_short.layers[0]) ==
          std::vector<std::pair<std::string, long long>>{{"a", 1}, {"c", 1}});
    CHECK(gr_ids(max_short.layers[1]) ==
          std::vector<std::pair<std::string, long long>>{{"b", 1}});

    const auto min_short = direct_sum(ab, c, SumMode::min);
    REQUIRE(min_short.layers.size() == 2);
    CHECK(gr_ids(min_short.layers[0]) ==
          std::vector<std::pair<std::string, long long>>{{"a", 1}});
    CHECK(gr_ids(min_short.layers[1]) ==
          std::vector<std::pair<std::string, long long>>{{"b", 1}, {"c", 1}});

    CHECK_THROWS_AS(direct_sum(ab, spec({layer({{1, atom("z", 1, 1)}})}), SumMode::max),
                    input_error);
}

TEST_CASE("dualize on the examples") {
    const auto ab = spec({layer({{1, atom("a", 1, 2)}}), layer({{1, atom("b", 1, 2)}})});
    const auto dual = dualize(ab);
    REQUIRE(dual.layers.size() == 2);
    CHECK(dual.layers[0][0].atom.id == "b*");
    CHECK(dual.layers[0][0].atom.degree == -2);
    CHECK(dual.layers[1][0].atom.id == "a*");

    const auto abc = spec({layer({{1, atom("a")}}), layer({{1, atom("b")}}),
                           layer({{1, atom("c")}})});
    CHECK(dualize(dualize(abc)) == abc);

    const auto two = dualize(spec({layer({{2, atom("a")}})}));
    CHECK(gr_ids(two.layers[0]) ==
          std::vector<std::pair<std::string, long long>>{{"a*", 2}});
}

TEST_CASE("gr invariance and conservation under direct sums") {
    const auto x = spec({layer({{1, atom("a")}, {1, atom("b")}}), layer({{2, atom("a")}})});
    const auto y = spec({layer({{1, atom("c")}}), layer({{1, atom("a")}}),
                         layer({{1, atom("d")}})});
    for (auto mode : {SumMode::max, SumMode::min}) {
        const auto s = direct_sum(x, y, mode);
        CHECK(gr_ids(gr_of(s)) == gr_ids(detail::merge_layers(gr_of(x), gr_of(y))));
        CHECK(s.total_rank() == x.total_rank() + y.total_rank());
        CHECK(s.total_degree() == x.total_degree() + y.total_degree());
    }
}

TEST_CASE("duality exchanges the maximal and minimal sum laws") {
    const auto x = spec({layer({{1, atom("a", 2, 0)}}), layer({{1, atom("b", 1, 0)}}),
                         layer({{1, atom("c", 1, 0)}})});
    const auto y = spec({layer({{1, atom("d", 1, 0)}}), layer({{1, atom("e", 3, 0)}})});
    CHECK(dualize(direct_sum(x, y, SumMode::max)) ==
          direct_sum(dualize(x), dualize(y), SumMode::min));
    CHECK(dualize(direct_sum(x, y, SumMode::min)) ==
          direct_sum(dualize(x), dualize(y), SumMode::max));
}

TEST_CASE("classify on the examples") {
    // 2-chain of ranks (1,1): balanced with inverse-square triviality 1/2
    const auto r1 = classify(one_chain(spec({layer({{1, atom("d1")}}),
                                             layer({{1, atom("e1")}})})));
    CHECK(r1.balanced);
    CHECK(r1.inv_triviality_sq == Rat(1, 2));
    CHECK(r1.hn_shadow == make_hn_type({{2, 0}}));
    REQUIRE(r1.pivot.has_value());
    CHECK(r1.pivot->k1_min == 1);
    CHECK(r1.pivot->k1_max == 2);

    // the 4-step refinement with equal rank ratios is not balanced
    const auto filt2 = DeltaFilt{spec({layer({{1, atom("d1")}}), layer({{1, atom("d2")}}),
                                       layer({{1, atom("e1")}}), layer({{1, atom("e2")}})}),
                                 {{1, 3}, {2, 4}}};
    const auto r2 = classify(filt2);
    CHECK_FALSE(r2.balanced);
    CHECK(r2.inv_triviality_sq == Rat(1));

    // 2-layer ranks (2,1): eps = 1/3, inverse-square triviality 2/3
    const auto r3 = classify(one_chain(spec({layer({{1, atom("d", 2, 0)}}),
                                             layer({{1, atom("e", 1, 0)}})})));
    CHECK(r3.balanced);
    CHECK(r3.eps == std::vector<Rat>{Rat(1, 3)});
    CHECK(r3.inv_triviality_sq == Rat(2, 3));
}

TEST_CASE("classify reports the beta norm with a genus context") {
    // slope 3 > g - 1 = 1, so the weight factor is positive
    const auto r = classify(one_chain(spec({layer({{1, atom("d1", 1, 3)}}),
                                            layer({{1, atom("e1", 1, 3)}})})),
                            Genus(2));
    CHECK(r.balanced);
    REQUIRE(r.beta_normsq.has_value());
    // factor 1 - 2 + 3 = 2; inv triviality 1/2; |beta|^2 = 1/(2 * 1/2) = 1
    CHECK(*r.beta_normsq == Rat(1));
}

TEST_CASE("classify's beta norm matches the beta module on the induced partition") {
    // three-layer chain of rank-one atoms at slope 4, genus 2, factor 1-2+4 = 3
    const auto filt = one_chain(spec({layer({{1, atom("a", 1, 4)}}),
                                      layer({{1, atom("b", 1, 4)}}),
                                      layer({{1, atom("c", 1, 4)}})}));
    const auto rep = classify(filt, Genus(2));
    REQUIRE(rep.balanced);
    REQUIRE(rep.beta_normsq.has_value());

    const auto ws = build_weight_system(Genus(2), 3, 12, {1, 1, 1}, {1, 1, 1});
    IndexedPartition part;
    part.components.push_back(PartitionComponent{-1, {{1}, {2}, {3}}});
    const auto bd = beta_from_partition(part, ws);
    CHECK(*rep.beta_normsq == bd.normsq);
    CHECK(Rat(1) / bd.normsq == Rat(3) * rep.inv_triviality_sq);
}

TEST_CASE("classify shadows multi-slope filtrations") {
    const auto r = classify(DeltaFilt{spec({layer({{1, atom("a", 1, 1)}}),
                                            layer({{2, atom("b", 1, 0)}})}),
                                      {{1}, {2}}});
    CHECK_FALSE(r.balanced);
    CHECK(r.hn_shadow == make_hn_type({{1, 1}, {2, 0}}));
}

TEST_CASE("balanced_merge on the examples") {
    // equal rank ratios amalgamate into a two-step filtration
    const auto e = one_chain(spec({layer({{1, atom("d1")}}), layer({{1, atom("e1")}})}));
    const auto f = one_chain(spec({layer({{1, atom("d2")}}), layer({{1, atom("f2")}})}));
    const auto merged = balanced_merge(e, f);
    CHECK(merged.amalgamated == 1);
    REQUIRE(merged.filt.spec.layers.size() == 2);
    CHECK(gr_ids(merged.filt.spec.layers[0]) ==
          std::vector<std::pair<std::string, long long>>{{"d1", 1}, {"d2", 1}});
    CHECK(classify(merged.filt).balanced);

    // ranks (1,1) against (1,2): the larger-eps component steps first
    const auto f2 = one_chain(spec({layer({{1, atom("d2")}}), layer({{1, atom("f2", 2, 0)}})}));
    const auto interleaved = balanced_merge(e, f2);
    CHECK(interleaved.amalgamated == 0);
    REQUIRE(interleaved.filt.spec.layers.size() == 4);
    CHECK(interleaved.filt.spec.layers[0][0].atom.id == "d2");
    CHECK(interleaved.filt.spec.layers[1][0].atom.id == "d1");
    CHECK(interleaved.filt.spec.layers[2][0].atom.id == "f2");
    CHECK(interleaved.filt.spec.layers[3][0].atom.id == "e1");
    CHECK(interleaved.filt.components == std::vector<std::vector<int>>{{1, 3}, {2, 4}});
    CHECK(classify(interleaved.filt).balanced);

    // the empty filtration is the identity
    const DeltaFilt zero{};
    CHECK(balanced_merge(e, zero).filt == e);
    CHECK(balanced_merge(zero, f).filt == f);
}

TEST_CASE("with unequal rank ratios exactly one four-step refinement is balanced") {
    // E has subquotient ranks (1,1), F has (1,2); of the two interleavings of
    // their chains only the one stepping the larger-eps component first is
    // balanced, and it attains the merge's triviality
    const auto f_first = DeltaFilt{spec({layer({{1, atom("d2")}}), layer({{1, atom("d1")}}),
                                         layer({{1, atom("f2", 2, 0)}}),
                                         layer({{1, atom("e1")}})}),
                                   {{1, 3}, {2, 4}}};
    const auto e_first = DeltaFilt{spec({layer({{1, atom("d1")}}), layer({{1, atom("d2")}}),
                                         layer({{1, atom("e1")}}),
                                         layer({{1, atom("f2", 2, 0)}})}),
                                   {{1, 3}, {2, 4}}};
    const auto good = classify(f_first);
    const auto bad = classify(e_first);
    CHECK(good.balanced);
    CHECK_FALSE(bad.balanced);
    CHECK(good.inv_triviality_sq == Rat(7, 6));  // 1/2 from E plus 2/3 from F
    CHECK(good.inv_triviality_sq == bad.inv_triviality_sq);
}

TEST_CASE("balanced_merge handles multi-component inputs and is associative") {
    const auto a = one_chain(spec({layer({{1, atom("a1")}}), layer({{1, atom("a2")}})}));
    const auto b = one_chain(spec({layer({{1, atom("b1", 2, 0)}}), layer({{1, atom("b2")}})}));
    const auto c = one_chain(spec({layer({{1, atom("c1")}}), layer({{1, atom("c2", 3, 0)}})}));
    const auto left = balanced_merge(balanced_merge(a, b).filt, c).filt;
    const auto right = balanced_merge(a, balanced_merge(b, c).filt).filt;
    CHECK(left == right);
    CHECK(classify(left).balanced);
    CHECK(left.spec.total_rank() ==
          a.spec.total_rank() + b.spec.total_rank() + c.spec.total_rank());
}

TEST_CASE("balanced_merge rejects unbalanced inputs") {
    const auto bad = DeltaFilt{spec({layer({{1, atom("d1")}}), layer({{1, atom("d2")}}),
                                     layer({{1, atom("e1")}}), layer({{1, atom("e2")}})}),
                               {{1, 3}, {2, 4}}};
    const auto ok = one_chain(spec({layer({{1, atom("z")}})}));
    CHECK_THROWS_AS(balanced_merge(bad, ok), input_error);
}

TEST_CASE("balanced_merge attains the maximal triviality over interleavings") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> len_dist(1, 3);
    std::uniform_int_distribution<long long> rank_dist(1, 3);
    int next_id = 0;
    auto random_chain = [&]() {
        std::vector<Layer> layers;
        const int len = len_dist(rng);
        for (int i = 0; i < len; ++i)
            layers.push_back(layer({{1, atom("x" + std::to_string(next_id++), rank_dist(rng), 0)}}));
        return one_chain(spec(std::move(layers)));
    };
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto x = random_chain();
        const auto y = random_chain();
        const auto merged = balanced_merge(x, y);
        const auto rep = classify(merged.filt);
        REQUIRE(rep.balanced);
        const Rat bound = testutil::min_interleaving_inv_triviality(x, y);
        REQUIRE(rep.inv_triviality_sq <= bound);
        ++checked;
    }
    CHECK(checked == 60);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(spec({layer({})}), input_error);  // empty layer
    CHECK_THROWS_AS(spec({layer({{1, atom("a", 1, 0)}}), layer({{1, atom("a", 2, 0)}})}),
                    input_error);  // id reused with a different shape
    CHECK_THROWS_AS(validate_delta_filt(DeltaFilt{spec({layer({{1, atom("a")}})}), {}}),
                    input_error);  // uncovered layer
    CHECK_THROWS_AS(
        validate_delta_filt(DeltaFilt{spec({layer({{1, atom("a")}})}), {{1, 1}}}),
        input_error);  // repeated layer
}
