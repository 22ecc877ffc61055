#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <tuple>
#include <vector>

#include "stratkit/errors.hpp"
#include "stratkit/hn.hpp"
#include "stratkit/rational.hpp"

namespace stratkit {

// Conjugacy class of a reductive stabiliser: an unordered sequence of pairs
// (m_i, n_i) with sum m_i n_i = n and n | n_i d, kept sorted by (n_i, m_i).
struct ReductiveClass {
    std::vector<std::pair<long long, long long>> pairs;  // (m_i, n_i)
    long long n = 0, d = 0;

    bool operator==(const ReductiveClass& o) const {
        return pairs == o.pairs && n == o.n && d == o.d;
    }
    bool operator<(const ReductiveClass& o) const { return pairs < o.pairs; }
};

inline ReductiveClass make_reductive_class(std::vector<std::pair<long long, long long>> pairs,
                                           long long n, long long d) {
    require_input(!pairs.empty(), "reductive_class", "need at least one pair");
    long long total = 0;
    for (auto& [m, ni] : pairs) {
        require_input(m >= 1 && ni >= 1, "reductive_class", "pair entries must be positive");
        require_input((ni * d) % n == 0, "reductive_class", "n must divide n_i d");
        total += m * ni;
    }
    require_input(total == n, "reductive_class", "sum of m_i n_i must equal n");
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
    return ReductiveClass{std::move(pairs), n, d};
}

inline std::vector<ReductiveClass> enumerate_reductive_classes(long long n, long long d) {
    require_input(n >= 1, "reductive_class", "rank must be positive");
    auto admissible = [&](long long ni) { return (ni * d) % n == 0; };
    std::vector<ReductiveClass> out;
    std::vector<std::pair<long long, long long>> acc;
    // pairs chosen in nondecreasing (n_i, m_i) order so each multiset appears once
    auto rec = [&](auto&& self, long long remaining, std::pair<long long, long long> min_pair) -> void {
        if (remaining == 0) {
            out.push_back(ReductiveClass{acc, n, d});
            return;
        }
        for (long long ni = 1; ni <= remaining; ++ni) {
            if (!admissible(ni)) continue;
            for (long long m = 1; m * ni <= remaining; ++m) {
                if (std::make_pair(ni, m) < min_pair) continue;
                acc.emplace_back(m, ni);
                self(self, remaining - m * ni, std::make_pair(ni, m));
                acc.pop_back();
            }
        }
    };
    rec(rec, n, std::make_pair(0LL, 0LL));
    std::sort(out.begin(), out.end());
    return out;
}

// Normaliser data in the large-degree regime: p = d_eff + n(1-g),
// p_i = n_i p / n, dim N_0 = sum (m_i^2 + p_i^2 - 1), and pi_0(N) a product
// of symmetric groups, one factor per repeated (m, n_i) pair class.
struct GroupData {
    long long p = 0;
    std::vector<long long> p_values;                                 // aligned with pairs
    long long dim_N0 = 0;
    std::vector<std::pair<std::pair<long long, long long>, long long>> pi0;  // ((m, n_i), count)
};

inline GroupData group_data(const ReductiveClass& c, long long d_eff, Genus g) {
    require_input(d_eff > c.n * (2 * g.value - 1), "group_data",
                  "d_eff too small: twist by a line bundle of degree l (an isomorphism "
                  "onto degree d + n l) until d_eff > n(2g-1)");
    GroupData out;
    out.p = d_eff + c.n * (1 - g.value);
    std::map<std::pair<long long, long long>, long long> classes;
    for (const auto& [m, ni] : c.pairs) {
        require_input((ni * d_eff) % c.n == 0, "group_data", "n must divide n_i d_eff");
        const long long pi = ni * out.p / c.n;
        out.p_values.push_back(pi);
        out.dim_N0 += m * m + pi * pi - 1;
        ++classes[{m, ni}];
    }
    out.pi0.assign(classes.begin(), classes.end());
    return out;
}

// One slope block of a refined index [d, n, m]: atoms of rank n_{ik} with a
// q_k x r_k multiplicity matrix.
struct JHBlock {
    long long d = 0, n = 0;
    std::vector<long long> atom_ranks;              // n_{ik}
    std::vector<std::vector<long long>> mult;       // rows follow atom_ranks

    bool operator==(const JHBlock& o) const {
        return d == o.d && n == o.n && atom_ranks == o.atom_ranks && mult == o.mult;
    }
    bool operator<(const JHBlock& o) const {
        return std::tie(d, n, atom_ranks, mult) < std::tie(o.d, o.n, o.atom_ranks, o.mult);
    }
};

struct JHIndex {
    std::vector<JHBlock> blocks;

    long long total_rank() const {
        long long n = 0;
        for (const auto& b : blocks) n += b.n;
        return n;
    }
    long long total_degree() const {
        long long d = 0;
        for (const auto& b : blocks) d += b.d;
        return d;
    }
    bool operator==(const JHIndex& o) const { return blocks == o.blocks; }
    bool operator<(const JHIndex& o) const { return blocks < o.blocks; }
};

inline HNType hn_shadow(const JHIndex& x) {
    std::vector<std::pair<long long, long long>> blocks;
    for (const auto& b : x.blocks) blocks.emplace_back(b.n, b.d);
    return make_hn_type(std::move(blocks));
}

// Checks every constraint of the refined index set and returns the canonical
// orbit representative (atoms sorted by (rank, multiplicity row)).
inline JHIndex validate_jh_index(const JHIndex& raw) {
    require_input(!raw.blocks.empty(), "jh_index", "need at least one block");
    JHIndex x = raw;
    for (auto& b : x.blocks) {
        require_input(!b.atom_ranks.empty(), "jh_index", "block needs at least one atom");
        require_input(b.mult.size() == b.atom_ranks.size(), "jh_index",
                      "one multiplicity row per atom");
        const std::size_t r = b.mult.front().size();
        require_input(r >= 1, "jh_index", "multiplicity rows must be nonempty");
        long long n_sum = 0;
        for (std::size_t i = 0; i < b.atom_ranks.size(); ++i) {
            require_input(b.atom_ranks[i] >= 1, "jh_index", "atom ranks must be positive");
            require_input(b.mult[i].size() == r, "jh_index", "ragged multiplicity matrix");
            long long row = 0;
            for (long long m : b.mult[i]) {
                require_input(m >= 0, "jh_index", "multiplicities must be nonnegative");
                row += m;
            }
            require_input(row > 0, "zero_atom", "atom with zero total multiplicity");
            n_sum += b.atom_ranks[i] * row;
        }
        require_input(n_sum == b.n, "jh_index", "block rank must equal sum n_ik m_ijk");
        for (std::size_t j = 0; j < r; ++j) {
            long long col = 0;
            for (std::size_t i = 0; i < b.mult.size(); ++i) col += b.mult[i][j];
            require_input(col > 0, "empty_layer", "empty filtration layer in a block");
        }
        for (long long ni : b.atom_ranks)
            require_input((b.d * ni) % b.n == 0, "divisibility",
                          "d_k n_ik / n_k must be an integer");
        // canonical representative under the symmetric group on atoms
        std::vector<std::size_t> order(b.atom_ranks.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
            return std::tie(b.atom_ranks[a], b.mult[a]) < std::tie(b.atom_ranks[c], b.mult[c]);
        });
        std::vector<long long> ranks;
        std::vector<std::vector<long long>> mult;
        for (std::size_t i : order) {
            ranks.push_back(b.atom_ranks[i]);
            mult.push_back(b.mult[i]);
        }
        b.atom_ranks = std::move(ranks);
        b.mult = std::move(mult);
    }
    for (std::size_t k = 0; k + 1 < x.blocks.size(); ++k) {
        Rat a(x.blocks[k].d, x.blocks[k].n);
        Rat b(x.blocks[k + 1].d, x.blocks[k + 1].n);
        require_input(a > b, "slope_order", "block slopes must strictly decrease");
    }
    return x;
}

enum class CodimVariant { statement, proof };

// Per-block codimension
//   sum_i sum_{j<r} m_ij m_{i,j+1}
//   + (g-1)( sum_{i1,i2} sum_{j1<=j2} m_{i1 j1} m_{i2 j2} n_{i1} n_{i2} - T )
// where T is sum (m_ij n_i)^2 for the statement variant and
// sum over occupied cells of n_i^2 for the proof variant (equal whenever all
// m_ij <= 1).  The total adds the Harder-Narasimhan cross terms.
inline long long jh_codim(const JHIndex& x, Genus g,
                          CodimVariant variant = CodimVariant::statement) {
    long long total = 0;
    const auto& blocks = x.blocks;
    for (std::size_t k1 = 0; k1 < blocks.size(); ++k1)
        for (std::size_t k2 = 0; k2 < k1; ++k2)
            total += blocks[k1].n * blocks[k2].d - blocks[k2].n * blocks[k1].d +
                     blocks[k1].n * blocks[k2].n * (g.value - 1);
    for (const auto& b : blocks) {
        const std::size_t q = b.atom_ranks.size();
        const std::size_t r = b.mult.front().size();
        long long ext = 0;
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = 0; j + 1 < r; ++j) ext += b.mult[i][j] * b.mult[i][j + 1];
        long long cross = 0;
        std::vector<long long> level(r, 0);  // rank of layer j
        for (std::size_t j = 0; j < r; ++j)
            for (std::size_t i = 0; i < q; ++i) level[j] += b.mult[i][j] * b.atom_ranks[i];
        for (std::size_t j1 = 0; j1 < r; ++j1)
            for (std::size_t j2 = j1; j2 < r; ++j2) cross += level[j1] * level[j2];
        long long sub = 0;
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = 0; j < r; ++j) {
                if (variant == CodimVariant::statement) {
                    const long long mn = b.mult[i][j] * b.atom_ranks[i];
                    sub += mn * mn;
                } else if (b.mult[i][j] > 0) {
                    sub += b.atom_ranks[i] * b.atom_ranks[i];
                }
            }
        total += ext + (g.value - 1) * (cross - sub);
    }
    return total;
}

namespace detail {

inline long long block_aut_square(const JHBlock& b) {
    long long acc = 0;
    for (const auto& row : b.mult) {
        long long s = std::accumulate(row.begin(), row.end(), 0LL);
        acc += s * s;
    }
    return acc;
}

// Branch 2 of the semistable refinement order: a >= b when the atoms match
// rank-for-rank with equal row totals and the partial sums of a's rows
// dominate b's (with r_a <= r_b).
inline bool refines_ge(const JHBlock& a, const JHBlock& b) {
    if (a.atom_ranks.size() != b.atom_ranks.size()) return false;
    if (a.mult.front().size() > b.mult.front().size()) return false;
    const std::size_t q = a.atom_ranks.size();
    std::vector<std::size_t> perm(q);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end());
    do {
        bool ok = true;
        for (std::size_t i = 0; i < q && ok; ++i) {
            if (a.atom_ranks[i] != b.atom_ranks[perm[i]]) {
                ok = false;
                break;
            }
            const auto& ra = a.mult[i];
            const auto& rb = b.mult[perm[i]];
            long long pa = 0, pb = 0;
            for (std::size_t j = 0; j < rb.size(); ++j) {
                if (j < ra.size()) pa += ra[j];
                pb += rb[j];
                if (j + 1 < rb.size() ? pa < pb : pa != pb) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

inline OrderRelation block_compare(const JHBlock& a, const JHBlock& b) {
    const long long aa = block_aut_square(a), ab = block_aut_square(b);
    if (aa > ab) return OrderRelation::greater;
    if (aa < ab) return OrderRelation::less;
    if (a == b) return OrderRelation::equal;
    const bool ge = refines_ge(a, b), le = refines_ge(b, a);
    if (ge && !le) return OrderRelation::greater;
    if (le && !ge) return OrderRelation::less;
    if (ge && le) return OrderRelation::equal;
    return OrderRelation::incomparable;
}

}  // namespace detail

// Two-level order: Harder-Narasimhan shadows first, then the semistable
// refinement rule blockwise on equal shadows.
inline OrderRelation jh_compare(const JHIndex& x, const JHIndex& y) {
    require_input(x.total_rank() == y.total_rank() && x.total_degree() == y.total_degree(),
                  "jh_compare", "indices must share ambient rank and degree");
    const OrderRelation shadow = hn_compare(hn_shadow(x), hn_shadow(y));
    if (shadow != OrderRelation::equal) return shadow;
    bool any_greater = false, any_less = false;
    for (std::size_t k = 0; k < x.blocks.size(); ++k) {
        switch (detail::block_compare(x.blocks[k], y.blocks[k])) {
            case OrderRelation::greater: any_greater = true; break;
            case OrderRelation::less: any_less = true; break;
            case OrderRelation::equal: break;
            case OrderRelation::incomparable: return OrderRelation::incomparable;
        }
    }
    if (any_greater && any_less) return OrderRelation::incomparable;
    if (any_greater) return OrderRelation::greater;
    if (any_less) return OrderRelation::less;
    return OrderRelation::equal;
}

namespace detail {

// All canonical refinements of one slope block (n, d) whose per-block
// codimension (statement variant) stays within the budget.
inline std::vector<JHBlock> enumerate_block_refinements(long long n, long long d, Genus g,
                                                        long long budget) {
    std::vector<JHBlock> out;
    // n | n_i d forces atom ranks to be multiples of n / gcd(n, d).
    const long long step = n / std::gcd(n, std::llabs(d) % n);
    const long long max_cells = n / step;
    for (long long r = 1; r <= max_cells; ++r) {
        std::vector<long long> ranks;
        std::vector<std::vector<long long>> mult;
        auto emit = [&]() {
            std::vector<long long> col(static_cast<std::size_t>(r), 0);
            for (const auto& row : mult)
                for (std::size_t j = 0; j < row.size(); ++j) col[j] += row[j];
            for (long long c : col)
                if (c == 0) return;
            JHBlock b{d, n, ranks, mult};
            if (jh_codim(JHIndex{{b}}, g) - hn_codim(hn_shadow(JHIndex{{b}}), g) <= budget)
                out.push_back(std::move(b));
        };
        // atoms in nondecreasing (rank, row) order; rows sum to >= 1
        auto rec = [&](auto&& self, long long remaining) -> void {
            if (remaining == 0) {
                emit();
                return;
            }
            for (long long ni = step; ni <= remaining; ni += step) {
                std::vector<long long> row(static_cast<std::size_t>(r), 0);
                auto fill = [&](auto&& fself, std::size_t pos, long long used) -> void {
                    if (pos == row.size()) {
                        if (used == 0) return;
                        if (!ranks.empty() &&
                            std::tie(ranks.back(), mult.back()) > std::tie(ni, row))
                            return;
                        ranks.push_back(ni);
                        mult.push_back(row);
                        self(self, remaining - ni * used);
                        ranks.pop_back();
                        mult.pop_back();
                        return;
                    }
                    for (long long m = 0; ni * (used + m) <= remaining; ++m) {
                        row[pos] = m;
                        fself(fself, pos + 1, used + m);
                    }
                    row[pos] = 0;
                };
                fill(fill, 0, 0);
            }
        };
        rec(rec, n);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// All canonical indices of rank n and degree d with statement-variant
// codimension at most max_codim; the single-atom stable index is always
// present.
inline std::vector<JHIndex> enumerate_jh_indices(long long n, long long d, Genus g,
                                                 long long max_codim) {
    require_input(n >= 1, "enumerate", "rank must be positive");
    require_input(max_codim >= 0, "enumerate", "max_codim must be nonnegative");
    std::vector<JHIndex> out;
    for (const HNType& shadow : enumerate_hn_types(n, d, g, max_codim)) {
        const long long cross = hn_codim(shadow, g);
        std::vector<std::vector<JHBlock>> choices;
        for (const auto& [np, dp] : shadow.blocks)
            choices.push_back(detail::enumerate_block_refinements(np, dp, g, max_codim - cross));
        std::vector<JHBlock> acc;
        auto rec = [&](auto&& self, std::size_t k, long long used) -> void {
            if (k == choices.size()) {
                out.push_back(JHIndex{acc});
                return;
            }
            for (const JHBlock& b : choices[k]) {
                const long long c =
                    jh_codim(JHIndex{{b}}, g) - hn_codim(hn_shadow(JHIndex{{b}}), g);
                if (used + c > max_codim - cross) continue;
                acc.push_back(b);
                self(self, k + 1, used + c);
                acc.pop_back();
            }
        };
        rec(rec, 0, 0);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace stratkit
