// Acceptance suite: one pass/fail line per criterion, exact checks,
// stated wall-clock budgets enforced.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "merge_oracle.hpp"
#include "stratkit/beta.hpp"
#include "stratkit/census.hpp"
#include "stratkit/filtcalc.hpp"
#include "stratkit/hn.hpp"
#include "stratkit/minnorm.hpp"
#include "stratkit/series.hpp"
#include "testutil.hpp"

using namespace stratkit;
namespace oracle = testutil::oracle;

namespace {

struct Checker {
    long long failures = 0;
    long long checks = 0;

    void expect(bool ok, const char* what) {
        ++checks;
        if (!ok) {
            ++failures;
            std::printf("    check failed: %s\n", what);
        }
    }
};

#define EXPECT(c, cond) (c).expect((cond), #cond)

bool criterion_1(Checker& c) {
    for (int g : {2, 3, 4})
        for (long long d : {0LL, 1LL, 7LL, -5LL}) {
            const auto m = poincare_M(1, d, Genus(g));
            const auto expect = oracle::binom_pow(1, 2 * g, m.truncation());
            for (int i = 0; i <= m.truncation(); ++i)
                EXPECT(c, m[i] == expect[static_cast<std::size_t>(i)]);
        }
    return c.failures == 0;
}

bool criterion_2(Checker& c) {
    const int K = 12;
    // closed form (1+t)^4 ((1+t^3)^4 - t^4 (1+t)^4) / ((1-t^2)(1-t^4)),
    // expanded by the independent polynomial oracle
    auto numerator = oracle::sub(oracle::binom_pow(3, 4, K),
                                 oracle::shift(oracle::binom_pow(1, 4, K), 4));
    numerator = oracle::mul(oracle::binom_pow(1, 4, K), numerator);
    auto expect = oracle::mul(numerator, oracle::mul(oracle::geom(2, K), oracle::geom(4, K)));
    const auto m = poincare_M(2, 1, Genus(2), K);
    for (int i = 0; i <= K; ++i) EXPECT(c, m[i] == expect[static_cast<std::size_t>(i)]);
    EXPECT(c, m[11] == 0);
    EXPECT(c, m[12] == 0);
    return c.failures == 0;
}

bool criterion_3(Checker& c) {
    for (int g : {2, 3})
        for (auto [n, d] : std::vector<std::pair<long long, long long>>{{2, 1}, {3, 1}, {3, 2}}) {
            const auto m = poincare_M(n, d, Genus(g));
            const long long top = 2 * (n * n * (g - 1) + 1);
            EXPECT(c, m[0] == 1);
            EXPECT(c, m[1] == 2 * g);
            EXPECT(c, m[static_cast<int>(top)] != 0);
            for (long long i = 0; i <= top; ++i) {
                EXPECT(c, m[static_cast<int>(i)] >= 0);
                EXPECT(c, m[static_cast<int>(i)] == m[static_cast<int>(top - i)]);
            }
            for (int i = static_cast<int>(top) + 1; i <= m.truncation(); ++i)
                EXPECT(c, m[i] == 0);
        }
    return c.failures == 0;
}

// runs fn(i) for i in [0, count) across hardware threads; returns the number
// of indices where fn returned false
template <class Fn>
long long parallel_count_failures(long long count, Fn fn) {
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<long long> next{0}, failures{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (long long i = next++; i < count; i = next++)
                if (!fn(i)) ++failures;
        });
    for (auto& t : pool) t.join();
    return failures.load();
}

bool criterion_4(Checker& c) {
    std::vector<std::pair<WeightSystem, IndexedPartition>> cases;
    testutil::for_each_suite_case(5, 4, [&](const WeightSystem& ws, const IndexedPartition& p) {
        cases.emplace_back(ws, p);
    });
    const long long failures =
        parallel_count_failures(static_cast<long long>(cases.size()), [&](long long i) {
            const auto& [ws, p] = cases[static_cast<std::size_t>(i)];
            const auto bd = beta_from_partition(p, ws);
            const auto cert = min_norm_point(testutil::support_point_set(p, ws));
            return cert.point == bd.coords && cert.normsq == bd.normsq;
        });
    c.checks += static_cast<long long>(cases.size());
    std::printf("    (%zu partitions)\n", cases.size());
    EXPECT(c, cases.size() > 1000);
    EXPECT(c, failures == 0);
    return c.failures == 0;
}

bool criterion_5(Checker& c) {
    testutil::for_each_suite_case(5, 4, [&](const WeightSystem& ws, const IndexedPartition& p) {
        const auto bd = beta_from_partition(p, ws);
        const auto table = pairing_table(bd);
        // direct evaluation for one representative of each cell pair
        std::vector<long long> rep;
        for (int k = 1; k <= bd.chart.t; ++k) {
            const auto& cell = bd.chart.cells[static_cast<std::size_t>(k - 1)];
            const auto& comp = bd.part.components[static_cast<std::size_t>(cell.h - 1)];
            rep.push_back(comp.cells[static_cast<std::size_t>(cell.m - comp.m_lo)].front());
        }
        bool ok = true;
        for (int k1 = 1; k1 <= bd.chart.t; ++k1)
            for (int k2 = 1; k2 <= bd.chart.t; ++k2) {
                const long long i = rep[static_cast<std::size_t>(k1 - 1)];
                const long long j = rep[static_cast<std::size_t>(k2 - 1)];
                const Rat value = bd.coords[static_cast<std::size_t>(i - 1)] / ws.weight_p(i) -
                                  bd.coords[static_cast<std::size_t>(j - 1)] / ws.weight_p(j);
                const PairingClass cls = table.at({k1, k2});
                if (value == bd.normsq && cls != PairingClass::equal) ok = false;
                if (value > bd.normsq && cls != PairingClass::greater) ok = false;
                if (value < bd.normsq && cls != PairingClass::less) ok = false;
            }
        EXPECT(c, ok);
    });
    return c.failures == 0;
}

bool criterion_6(Checker& c) {
    testutil::for_each_suite_case(5, 4, [&](const WeightSystem& ws, const IndexedPartition& p) {
        const auto bd = beta_from_partition(p, ws);
        Rat from_weights = 0, from_ranks = 0;
        for (std::size_t h = 0; h < p.components.size(); ++h) {
            const auto& comp = p.components[h];
            for (std::size_t i = 0; i < comp.cells.size(); ++i) {
                Rat r = 0, rank = 0;
                for (long long j : comp.cells[i]) {
                    r += ws.weight_p(j);
                    rank += Rat(ws.atoms[ws.atom_of(j)].rank);
                }
                const Rat diff = Rat(comp.m_lo + static_cast<long long>(i)) - bd.chart.eps[h];
                from_weights += diff * diff * r;
                from_ranks += diff * diff * rank;
            }
        }
        // suite weight systems have p_i = n_i, i.e. the factor 1 - g + d/n is 1
        EXPECT(c, Rat(1) / bd.normsq == from_weights);
        EXPECT(c, from_weights == Rat(1) * from_ranks);
    });
    return c.failures == 0;
}

bool criterion_7(Checker& c) {
    for (long long n = 1; n <= 4; ++n)
        for (int g : {2, 3}) {
            std::vector<std::pair<long long, long long>> blocks;
            std::function<void(long long)> rec = [&](long long nr) {
                if (nr == 0) {
                    if (blocks.empty()) return;
                    long long dtot = 0;
                    bool ok = true;
                    for (std::size_t i = 0; i + 1 < blocks.size(); ++i)
                        if (!(Rat(blocks[i].second, blocks[i].first) >
                              Rat(blocks[i + 1].second, blocks[i + 1].first)))
                            ok = false;
                    for (const auto& [np, dp] : blocks) dtot += dp;
                    if (!ok || std::abs(dtot) > 4) return;
                    JHIndex x;
                    for (const auto& [np, dp] : blocks)
                        x.blocks.push_back(JHBlock{dp, np, {np}, {{1}}});
                    const long long shadow = hn_codim(hn_shadow(x), Genus(g));
                    EXPECT(c, jh_codim(x, Genus(g), CodimVariant::statement) == shadow);
                    EXPECT(c, jh_codim(x, Genus(g), CodimVariant::proof) == shadow);
                    return;
                }
                for (long long n1 = 1; n1 <= nr; ++n1)
                    for (long long dd = -4; dd <= 4; ++dd) {
                        blocks.emplace_back(n1, dd);
                        rec(nr - n1);
                        blocks.pop_back();
                    }
            };
            rec(n);
        }
    return c.failures == 0;
}

bool criterion_8(Checker& c) {
    const auto c21 = enumerate_reductive_classes(2, 1);
    EXPECT(c, c21.size() == 1);
    EXPECT(c, c21[0].pairs == (std::vector<std::pair<long long, long long>>{{1, 2}}));
    EXPECT(c, enumerate_reductive_classes(2, 0).size() == 3);
    const auto gd = group_data(make_reductive_class({{1, 1}, {1, 1}}, 2, 0), 8, Genus(2));
    EXPECT(c, gd.dim_N0 == 18);
    EXPECT(c, gd.pi0.size() == 1 && gd.pi0[0].second == 2);
    return c.failures == 0;
}

bool criterion_9(Checker& c) {
    std::mt19937_64 rng(90901);
    std::uniform_int_distribution<int> len_dist(1, 3);
    std::uniform_int_distribution<long long> rank_dist(1, 3);
    std::uniform_int_distribution<int> deg_dist(-2, 2);
    std::uniform_int_distribution<int> mult_dist(1, 2);
    int next_id = 0;

    auto random_spec = [&](int len, Rat slope) {
        std::vector<Layer> layers;
        for (int i = 0; i < len; ++i) {
            Layer l;
            const int entries = mult_dist(rng);
            for (int e = 0; e < entries; ++e) {
                const long long rank = rank_dist(rng) * to_ll(rat_den(slope));
                const long long degree = to_ll(rat_num(slope) * rank / rat_den(slope));
                l.push_back(LayerEntry{mult_dist(rng),
                                       FAtom{"a" + std::to_string(next_id++), rank, degree}});
            }
            layers.push_back(l);
        }
        return make_filt_spec(std::move(layers));
    };

    for (int trial = 0; trial < 100; ++trial) {
        const Rat slope(deg_dist(rng), 1);
        const auto x = random_spec(len_dist(rng), slope);
        const auto y = random_spec(len_dist(rng), slope);
        for (auto mode : {SumMode::max, SumMode::min}) {
            const auto s = direct_sum(x, y, mode);
            EXPECT(c, gr_of(s) == detail::merge_layers(gr_of(x), gr_of(y)));
            EXPECT(c, s.total_rank() == x.total_rank() + y.total_rank());
            EXPECT(c, s.total_degree() == x.total_degree() + y.total_degree());
        }
        EXPECT(c, dualize(direct_sum(x, y, SumMode::max)) ==
                      direct_sum(dualize(x), dualize(y), SumMode::min));
        EXPECT(c, dualize(direct_sum(x, y, SumMode::min)) ==
                      direct_sum(dualize(x), dualize(y), SumMode::max));
        EXPECT(c, dualize(dualize(x)) == x);
    }

    // merge minimality against the exhaustive interleaving enumerator
    auto one_chain = [&](const FiltSpec& f) {
        std::vector<int> all;
        for (int k = 1; k <= static_cast<int>(f.layers.size()); ++k) all.push_back(k);
        return DeltaFilt{f, {all}};
    };
    for (int trial = 0; trial < 80; ++trial) {
        const auto x = one_chain(random_spec(len_dist(rng), Rat(0)));
        const auto y = one_chain(random_spec(len_dist(rng), Rat(0)));
        const auto merged = balanced_merge(x, y);
        const auto rep = classify(merged.filt);
        EXPECT(c, rep.balanced);
        EXPECT(c, merged.filt.spec.total_rank() ==
                      x.spec.total_rank() + y.spec.total_rank());
        EXPECT(c, rep.inv_triviality_sq <= testutil::min_interleaving_inv_triviality(x, y));
    }
    return c.failures == 0;
}

bool criterion_10(Checker& c) {
    // roundtrip on the criterion-4 suite
    testutil::for_each_suite_case(5, 4, [&](const WeightSystem& ws, const IndexedPartition& p) {
        const auto bd = beta_from_partition(p, ws);
        EXPECT(c, partition_from_beta(bd.coords, ws) == p);
    });

    std::mt19937_64 rng(1010);
    // canonicalize_partition idempotence on fuzzed raw partitions
    std::uniform_int_distribution<long long> m_dist(1, 6);
    std::uniform_int_distribution<int> off_dist(-3, 3);
    std::uniform_int_distribution<int> h_dist(1, 3);
    std::uniform_int_distribution<long long> p_dist(1, 3);
    long long canonical_cases = 0;
    for (int trial = 0; trial < 60000 && canonical_cases < 10000; ++trial) {
        const long long M = m_dist(rng);
        std::vector<WeightAtom> atoms;
        for (long long j = 0; j < M; ++j) atoms.push_back(WeightAtom{1, 1, Rat(p_dist(rng))});
        const WeightSystem ws = weight_system_from_p(std::move(atoms));
        RawPartition raw;
        std::map<std::pair<int, long long>, std::vector<long long>> cells;
        for (long long j = 1; j <= M; ++j)
            cells[{h_dist(rng), off_dist(rng)}].push_back(j);
        for (auto& [key, members] : cells)
            raw.push_back(RawPartitionCell{key.first, key.second, members});
        IndexedPartition canon;
        try {
            canon = canonicalize_partition(raw, ws);
        } catch (const input_error&) {
            continue;  // gaps that cannot amalgamate are rejected deterministically
        }
        ++canonical_cases;
        RawPartition again;
        for (std::size_t h = 0; h < canon.components.size(); ++h)
            for (std::size_t i = 0; i < canon.components[h].cells.size(); ++i)
                again.push_back(RawPartitionCell{
                    static_cast<int>(h + 1),
                    canon.components[h].m_lo + static_cast<long long>(i),
                    canon.components[h].cells[i]});
        EXPECT(c, canonicalize_partition(again, ws) == canon);
    }
    std::printf("    (%lld canonicalizable raw partitions)\n", canonical_cases);
    EXPECT(c, canonical_cases >= 10000);

    // validate_jh_index idempotence on fuzzed valid indices
    std::uniform_int_distribution<int> q_dist(1, 3), r_dist(1, 3), s_dist(1, 2);
    std::uniform_int_distribution<long long> small(0, 2);
    for (int trial = 0; trial < 10000; ++trial) {
        JHIndex x;
        const int s = s_dist(rng);
        long long slope = 3;
        for (int k = 0; k < s; ++k) {
            JHBlock b;
            const int q = q_dist(rng), r = r_dist(rng);
            b.mult.assign(q, std::vector<long long>(r, 0));
            b.atom_ranks.assign(q, 0);
            for (int i = 0; i < q; ++i) {
                b.atom_ranks[static_cast<std::size_t>(i)] = 1 + small(rng);
                b.mult[static_cast<std::size_t>(i)][static_cast<std::size_t>(
                    std::uniform_int_distribution<int>(0, r - 1)(rng))] = 1 + small(rng);
                for (int j = 0; j < r; ++j)
                    if (small(rng) == 0) b.mult[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += small(rng);
            }
            // make every layer nonempty by padding the first atom
            for (int j = 0; j < r; ++j) {
                long long col = 0;
                for (int i = 0; i < q; ++i) col += b.mult[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (col == 0) b.mult[0][static_cast<std::size_t>(j)] = 1;
            }
            b.n = 0;
            for (int i = 0; i < q; ++i) {
                long long row = 0;
                for (int j = 0; j < r; ++j) row += b.mult[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                b.n += row * b.atom_ranks[static_cast<std::size_t>(i)];
            }
            slope -= 1 + small(rng);  // strictly decreasing integer slopes
            b.d = slope * b.n;        // integer slope keeps every d_ik integral
            x.blocks.push_back(std::move(b));
        }
        const JHIndex v = validate_jh_index(x);
        EXPECT(c, validate_jh_index(v) == v);
    }
    return c.failures == 0;
}

bool criterion_11(Checker& c) {
    std::mt19937_64 rng(111111);
    std::uniform_int_distribution<int> dim_dist(1, 6);
    std::uniform_int_distribution<int> num_dist(-2, 2);
    std::uniform_int_distribution<int> den_dist(1, 3);
    std::vector<MetricPointSet> instances;
    for (int trial = 0; trial < 10000; ++trial) {
        MetricPointSet s;
        s.dim = dim_dist(rng);
        std::uniform_int_distribution<int> count_dist(1, 8);
        for (int j = 0; j < s.dim; ++j) s.metric.emplace_back(den_dist(rng), den_dist(rng));
        const int count = count_dist(rng);
        for (int v = 0; v < count; ++v) {
            std::vector<Rat> p;
            for (int j = 0; j < s.dim; ++j) p.emplace_back(num_dist(rng), den_dist(rng));
            s.points.push_back(std::move(p));
        }
        instances.push_back(std::move(s));
    }
    const long long failures =
        parallel_count_failures(static_cast<long long>(instances.size()), [&](long long i) {
            const auto& s = instances[static_cast<std::size_t>(i)];
            const auto face = min_norm_face_search(s);
            const auto wolfe = min_norm_wolfe(s);
            return certificate_valid(s, face) && certificate_valid(s, wolfe) &&
                   face.point == wolfe.point && face.normsq == wolfe.normsq;
        });
    c.checks += 4 * static_cast<long long>(instances.size());
    EXPECT(c, failures == 0);
    return c.failures == 0;
}

}  // namespace

int main() {
    struct Entry {
        int number;
        const char* text;
        double budget_seconds;  // 0 = unlimited
        std::function<bool(Checker&)> run;
    };
    const std::vector<Entry> criteria = {
        {1, "rank-one sanity: P(M(1,d)) = (1+t)^2g for g in {2,3,4}", 1.0, criterion_1},
        {2, "Betti numbers of M(2,1), g=2 against the closed-form oracle", 1.0, criterion_2},
        {3, "Poincare duality suite for (2,1),(3,1),(3,2), g in {2,3}", 30.0, criterion_3},
        {4, "closed form vs min-norm oracle on the exhaustive partition suite", 60.0, criterion_4},
        {5, "pairing table matches direct rational evaluation", 0.0, criterion_5},
        {6, "norm identities from weights and ranks agree", 0.0, criterion_6},
        {7, "jh codimension degenerates to hn codimension on trivial blocks", 0.0, criterion_7},
        {8, "reductive census and group data", 0.0, criterion_8},
        {9, "filtration calculus laws and merge maximal triviality", 10.0, criterion_9},
        {10, "roundtrips and idempotence on fuzzed corpora", 0.0, criterion_10},
        {11, "min-norm certificates and face-search agreement on fuzzed corpus", 0.0,
         criterion_11},
    };

    int failed = 0;
    for (const auto& entry : criteria) {
        Checker checker;
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = entry.run(checker);
        } catch (const std::exception& e) {
            std::printf("    exception: %s\n", e.what());
            ok = false;
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (entry.budget_seconds > 0 && seconds > entry.budget_seconds) ok = false;
        std::printf("%s  criterion %2d: %s (%lld checks, %.2fs%s)\n", ok ? "PASS" : "FAIL",
                    entry.number, entry.text, checker.checks, seconds,
                    entry.budget_seconds > 0
                        ? (std::string(" / budget ") + std::to_string(entry.budget_seconds) + "s")
                              .c_str()
                        : "");
        std::fflush(stdout);
        if (!ok) ++failed;
    }
    if (failed > 0) {
        std::printf("%d criterion(s) failed\n", failed);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
