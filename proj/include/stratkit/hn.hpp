#pragma once

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "stratkit/errors.hpp"
#include "stratkit/rational.hpp"

namespace stratkit {

struct Genus {
    int value;

    explicit Genus(int g) : value(g) {
        require_input(g >= 2, "genus", "genus must be at least 2");
    }
};

enum class OrderRelation { greater, less, equal, incomparable };

inline const char* order_relation_name(OrderRelation r) {
    switch (r) {
        case OrderRelation::greater: return "greater";
        case OrderRelation::less: return "less";
        case OrderRelation::equal: return "equal";
        case OrderRelation::incomparable: return "incomparable";
    }
    return "?";
}

// A Harder-Narasimhan type: ordered blocks (rank, degree) with strictly
// decreasing slopes.  As a slope vector in Q^n each slope is repeated
// rank-many times.
struct HNType {
    std::vector<std::pair<long long, long long>> blocks;  // (n_p, d_p)

    long long total_rank() const {
        long long n = 0;
        for (const auto& b : blocks) n += b.first;
        return n;
    }

    long long total_degree() const {
        long long d = 0;
        for (const auto& b : blocks) d += b.second;
        return d;
    }

    bool semistable() const { return blocks.size() == 1; }

    std::vector<Rat> slope_vector() const {
        std::vector<Rat> v;
        for (const auto& b : blocks) {
            Rat slope(b.second, b.first);
            for (long long i = 0; i < b.first; ++i) v.push_back(slope);
        }
        return v;
    }

    bool operator==(const HNType& o) const { return blocks == o.blocks; }
    bool operator<(const HNType& o) const { return blocks < o.blocks; }
};

inline HNType make_hn_type(std::vector<std::pair<long long, long long>> blocks) {
    require_input(!blocks.empty(), "hn_type", "a type needs at least one block");
    for (const auto& b : blocks)
        require_input(b.first >= 1, "hn_type", "block ranks must be positive");
    for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
        Rat a(blocks[i].second, blocks[i].first);
        Rat b(blocks[i + 1].second, blocks[i + 1].first);
        require_input(a > b, "hn_type", "block slopes must strictly decrease");
    }
    return HNType{std::move(blocks)};
}

// d_mu = sum_{i>j} (n_i d_j - n_j d_i + n_i n_j (g-1)), over ordered block
// pairs with i later than j.  Zero exactly for single-block types.
inline long long hn_codim(const HNType& mu, Genus g) {
    long long total = 0;
    const auto& b = mu.blocks;
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            total += b[i].first * b[j].second - b[j].first * b[i].second +
                     b[i].first * b[j].first * (g.value - 1);
    return total;
}

// sigma >= tau iff every proper partial sum of the slope vector of sigma
// dominates that of tau.
inline OrderRelation hn_compare(const HNType& sigma, const HNType& tau) {
    require_input(sigma.total_rank() == tau.total_rank() &&
                      sigma.total_degree() == tau.total_degree(),
                  "hn_compare", "types must share rank and degree");
    const auto s = sigma.slope_vector();
    const auto t = tau.slope_vector();
    bool ge = true, le = true;
    Rat ps = 0, pt = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        ps += s[i];
        pt += t[i];
        if (ps < pt) ge = false;
        if (ps > pt) le = false;
    }
    if (ge && le) return OrderRelation::equal;
    if (ge) return OrderRelation::greater;
    if (le) return OrderRelation::less;
    return OrderRelation::incomparable;
}

struct CoarseType {
    long long n1, d1;  // first Harder-Narasimhan step
    long long n, d;    // ambient rank and degree
};

// delta_{n1,d1} = n d1 - n1 d + n1 (n - n1)(g - 1).
inline long long coarse_codim(const CoarseType& c, Genus g) {
    require_input(c.n1 >= 1 && c.n1 <= c.n, "coarse_type", "need 0 < n1 <= n");
    return c.n * c.d1 - c.n1 * c.d + c.n1 * (c.n - c.n1) * (g.value - 1);
}

namespace detail {

// Enumerates types block by block.  The cross terms of the first block
// against all later ones sum to the coarse codimension
//   delta = n d1 - n1 d + n1 (n - n1)(g - 1)
// of (n1, d1) inside the current remainder (n, d), and d_mu telescopes as
// the sum of these stage contributions.  Each cross term is >= g - 1 >= 1,
// so delta <= budget yields the finite degree window
//   n1 d / n < d1 <= (budget + n1 d - n1 (n - n1)(g - 1)) / n
// for the leading block, and the recursion on the remainder terminates.
inline void enumerate_hn_rec(long long n, long long d, Genus g, long long budget,
                             const Rat* slope_cap,
                             std::vector<std::pair<long long, long long>>& prefix,
                             std::vector<HNType>& out) {
    if (n == 0) {
        if (d == 0 && !prefix.empty()) out.push_back(HNType{prefix});
        return;
    }
    for (long long n1 = 1; n1 <= n; ++n1) {
        if (n1 == n) {
            Rat slope(d, n1);
            if (!slope_cap || slope < *slope_cap) {
                prefix.emplace_back(n1, d);
                out.push_back(HNType{prefix});
                prefix.pop_back();
            }
            continue;
        }
        // d1 window: strict instability n*d1 > n1*d and stage codim <= budget.
        const long long lo_excl_num = n1 * d;  // n*d1 > n1*d
        long long d1_lo = to_ll(floor_div(lo_excl_num, n)) + 1;
        Int hi_num = Int(budget) + Int(n1) * d - Int(n1) * (n - n1) * (g.value - 1);
        Int d1_hi_int = floor_div(hi_num, Int(n));
        long long d1_hi = d1_hi_int < d1_lo ? d1_lo - 1 : to_ll(d1_hi_int);
        for (long long d1 = d1_lo; d1 <= d1_hi; ++d1) {
            Rat slope(d1, n1);
            if (slope_cap && !(slope < *slope_cap)) continue;
            long long delta = n * d1 - n1 * d + n1 * (n - n1) * (g.value - 1);
            if (delta > budget) continue;
            prefix.emplace_back(n1, d1);
            enumerate_hn_rec(n - n1, d - d1, g, budget - delta, &slope, prefix, out);
            prefix.pop_back();
        }
    }
}

}  // namespace detail

// All types of rank n and degree d with d_mu <= max_codim, sorted
// canonically.  Always contains the single-block type.
inline std::vector<HNType> enumerate_hn_types(long long n, long long d, Genus g,
                                              long long max_codim) {
    require_input(n >= 1, "enumerate", "rank must be positive");
    require_input(max_codim >= 0, "enumerate", "max_codim must be nonnegative");
    std::vector<HNType> out;
    std::vector<std::pair<long long, long long>> prefix;
    detail::enumerate_hn_rec(n, d, g, max_codim, nullptr, prefix, out);
    std::sort(out.begin(), out.end());
    return out;
}

struct MumfordEntry {
    long long n_hat, d_hat;
    long long r_min, r_max;  // closed integer window of Chern class indices
    long long D;             // 2(n_hat^2 g - n_hat^2 + 1)
};

// Integer census of the generalised Mumford relation ranges: pairs
// 0 < n_hat < n with d/n < d_hat/n_hat < d/n + 1 and the window
//   n n_hat (g-1) - d n_hat + d_hat n < r < n n_hat (g+1) - d n_hat + d_hat n
// emitted as a closed integer interval.  D is the real dimension of the
// rank-n_hat stable moduli space.  The lower threshold uses the
// bundle-rank form n n_hat(g-1) - d n_hat + d_hat n; the sign-flipped
// variant n n_hat(g-1) + n_hat d - n d_hat defines a different window and
// is not used here.
inline std::vector<MumfordEntry> mumford_census(long long n, long long d, Genus g) {
    require_input(n >= 1, "mumford", "rank must be positive");
    require_input(std::gcd(n, d) == 1, "mumford", "rank and degree must be coprime");
    std::vector<MumfordEntry> out;
    for (long long n_hat = 1; n_hat < n; ++n_hat) {
        // d/n < d_hat/n_hat < d/n + 1
        long long lo = to_ll(floor_div(Int(n_hat) * d, Int(n))) + 1;
        long long hi = to_ll(ceil_rat(Rat(Int(n_hat) * (d + n), Int(n)))) - 1;
        for (long long d_hat = lo; d_hat <= hi; ++d_hat) {
            long long base = -d * n_hat + d_hat * n;
            long long a = n * n_hat * (g.value - 1) + base;
            long long b = n * n_hat * (g.value + 1) + base;
            out.push_back(MumfordEntry{n_hat, d_hat, a + 1, b - 1,
                                       2 * (n_hat * n_hat * (g.value - 1) + 1)});
        }
    }
    std::sort(out.begin(), out.end(), [](const MumfordEntry& x, const MumfordEntry& y) {
        return std::tie(x.n_hat, x.d_hat) < std::tie(y.n_hat, y.d_hat);
    });
    return out;
}

}  // namespace stratkit
