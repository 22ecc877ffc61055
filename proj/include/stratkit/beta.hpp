#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "stratkit/census.hpp"
#include "stratkit/errors.hpp"
#include "stratkit/hn.hpp"
#include "stratkit/minnorm.hpp"
#include "stratkit/rational.hpp"

namespace stratkit {

// Weights e_1..e_M of the standard torus representation, grouped by atoms:
// atom i contributes mult_i consecutive weights, each with |e_j|^2 = 1/p_i.
struct WeightAtom {
    long long mult = 0;
    long long rank = 0;
    Rat p;
};

struct WeightSystem {
    std::vector<WeightAtom> atoms;

    long long total_weights() const {
        long long m = 0;
        for (const auto& a : atoms) m += a.mult;
        return m;
    }

    // 1-based weight index -> 0-based atom index
    std::size_t atom_of(long long j) const {
        long long acc = 0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            acc += atoms[i].mult;
            if (j <= acc) return i;
        }
        throw internal_error("weight index out of range");
    }

    Rat weight_p(long long j) const { return atoms[atom_of(j)].p; }
};

inline WeightSystem weight_system_from_p(std::vector<WeightAtom> atoms) {
    require_input(!atoms.empty(), "weight_system", "need at least one atom");
    for (const auto& a : atoms) {
        require_input(a.mult >= 1 && a.rank >= 1, "weight_system",
                      "atom multiplicities and ranks must be positive");
        require_input(a.p > 0, "weight_system", "weights need positive p_i");
    }
    return WeightSystem{std::move(atoms)};
}

// p_i = n_i (1 - g + d/n); positivity needs d/n > g - 1.
inline WeightSystem build_weight_system(Genus g, long long n, long long d,
                                        const std::vector<long long>& mults,
                                        const std::vector<long long>& ranks) {
    require_input(n >= 1, "weight_system", "rank must be positive");
    require_input(mults.size() == ranks.size() && !mults.empty(), "weight_system",
                  "need matching atom multiplicities and ranks");
    const Rat factor = Rat(1) - g.value + Rat(d, n);
    require_input(factor > 0, "weight_system",
                  "d/n must exceed g-1: twist by a line bundle of degree l (an "
                  "isomorphism onto degree d + n l) first");
    std::vector<WeightAtom> atoms;
    for (std::size_t i = 0; i < mults.size(); ++i) {
        require_input((ranks[i] * d) % n == 0, "weight_system", "n must divide n_i d");
        atoms.push_back(WeightAtom{mults[i], ranks[i], ranks[i] * factor});
    }
    return weight_system_from_p(std::move(atoms));
}

// Partition of {1..M} indexed by J = {(h,m): 1<=h<=L, l1(h)<=m<=l2(h)}, with
// components in strictly decreasing epsilon order.  cells[i] holds the
// members at level m_lo + i.
struct PartitionComponent {
    long long m_lo = 0;
    std::vector<std::vector<long long>> cells;
};

struct IndexedPartition {
    std::vector<PartitionComponent> components;

    bool operator==(const IndexedPartition& o) const {
        if (components.size() != o.components.size()) return false;
        for (std::size_t h = 0; h < components.size(); ++h)
            if (components[h].m_lo != o.components[h].m_lo ||
                components[h].cells != o.components[h].cells)
                return false;
        return true;
    }
};

struct CellKey {
    int h = 0;      // 1-based component
    long long m = 0;
};

// Hebrew-lexicographic chart of a cell system: phi, delta, delta', the sign
// change positions k-, k+ and the inverse square norm.
struct Chart {
    std::vector<Rat> eps;            // per component
    int t = 0;
    std::vector<CellKey> cells;      // position k-1 -> (h, m)
    std::vector<int> delta;          // delta[k-1]
    std::vector<int> delta_prime;    // delta'[k-1]
    int k_minus = 0, k_plus = 0;
    Rat inv_normsq;                  // sum (m - eps)^2 * weight
};

namespace detail {

// comps[h] = (m_lo, cell weights in m order); validates the epsilon window
// and strict decrease across components.
inline Chart build_chart(const std::vector<std::pair<long long, std::vector<Rat>>>& comps) {
    Chart chart;
    chart.inv_normsq = 0;
    for (std::size_t h = 0; h < comps.size(); ++h) {
        const auto& [m_lo, weights] = comps[h];
        require_internal(!weights.empty(), "chart component without cells");
        Rat total = 0, moment = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            require_internal(weights[i] > 0, "chart cell with nonpositive weight");
            total += weights[i];
            moment += Rat(m_lo + static_cast<long long>(i)) * weights[i];
        }
        const Rat eps = moment / total;
        require_input(eps >= Rat(-1, 2) && eps < Rat(1, 2), "epsilon_range",
                      "epsilon must lie in [-1/2, 1/2)");
        if (h > 0)
            require_input(eps < chart.eps.back(), "epsilon_order",
                          "epsilon must strictly decrease across components");
        chart.eps.push_back(eps);
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const Rat diff = Rat(m_lo + static_cast<long long>(i)) - eps;
            chart.inv_normsq += diff * diff * weights[i];
            chart.cells.push_back(CellKey{static_cast<int>(h) + 1,
                                          m_lo + static_cast<long long>(i)});
        }
    }
    std::sort(chart.cells.begin(), chart.cells.end(), [](const CellKey& a, const CellKey& b) {
        return std::tie(a.m, a.h) < std::tie(b.m, b.h);
    });
    chart.t = static_cast<int>(chart.cells.size());
    chart.delta.resize(chart.cells.size());
    chart.delta_prime.resize(chart.cells.size());
    for (int k = 0; k < chart.t; ++k) {
        const CellKey& c = chart.cells[static_cast<std::size_t>(k)];
        int d = 0, dp = 0;
        for (const CellKey& o : chart.cells) {
            if (o.m < c.m + 1 || (o.m == c.m + 1 && o.h < c.h)) ++d;
            if (o.m < c.m - 1 || (o.m == c.m - 1 && o.h <= c.h)) ++dp;
        }
        chart.delta[static_cast<std::size_t>(k)] = d;
        chart.delta_prime[static_cast<std::size_t>(k)] = dp + 1;
    }
    int nonneg = 0, pos = 0;
    for (const CellKey& c : chart.cells) {
        const Rat v = chart.eps[static_cast<std::size_t>(c.h - 1)] - c.m;
        if (v >= 0) ++nonneg;
        if (v > 0) ++pos;
    }
    chart.k_minus = nonneg;
    chart.k_plus = pos + 1;
    return chart;
}

}  // namespace detail

struct BetaData {
    IndexedPartition part;
    Chart chart;
    std::vector<Rat> coords;  // beta in the basis e_1..e_M
    Rat normsq;
    std::vector<std::vector<long long>> cell_sizes;  // [atom i][k-1] = m_i^k
};

namespace detail {

inline void check_partitions_weights(const IndexedPartition& p, const WeightSystem& ws) {
    const long long M = ws.total_weights();
    std::vector<bool> seen(static_cast<std::size_t>(M) + 1, false);
    long long count = 0;
    require_input(!p.components.empty(), "partition", "partition needs a component");
    for (const auto& comp : p.components) {
        require_input(!comp.cells.empty(), "partition", "component without cells");
        for (const auto& cell : comp.cells) {
            require_input(!cell.empty(), "partition", "empty cell");
            for (long long j : cell) {
                require_input(j >= 1 && j <= M, "partition", "member index out of range");
                require_input(!seen[static_cast<std::size_t>(j)], "partition",
                              "member repeated across cells");
                seen[static_cast<std::size_t>(j)] = true;
                ++count;
            }
        }
    }
    require_input(count == M, "partition", "cells must cover all weights");
}

inline std::vector<std::pair<long long, std::vector<Rat>>> component_weights(
    const IndexedPartition& p, const WeightSystem& ws) {
    std::vector<std::pair<long long, std::vector<Rat>>> comps;
    for (const auto& comp : p.components) {
        std::vector<Rat> w;
        for (const auto& cell : comp.cells) {
            Rat r = 0;
            for (long long j : cell) r += ws.weight_p(j);
            w.push_back(r);
        }
        comps.emplace_back(comp.m_lo, std::move(w));
    }
    return comps;
}

}  // namespace detail

// Closed form of the stratum label: beta / |beta|^2 = sum (eps(h) - m) e_j / |e_j|^2
// over the cells, with 1/|beta|^2 = sum (m - eps)^2 r_{h,m}.
inline BetaData beta_from_partition(const IndexedPartition& p, const WeightSystem& ws) {
    detail::check_partitions_weights(p, ws);
    BetaData bd;
    bd.part = p;
    bd.chart = detail::build_chart(detail::component_weights(p, ws));
    require_input(bd.chart.inv_normsq > 0, "zero_beta",
                  "partition labels the zero vector, not a stratum");
    bd.normsq = Rat(1) / bd.chart.inv_normsq;
    const long long M = ws.total_weights();
    bd.coords.assign(static_cast<std::size_t>(M), Rat(0));
    for (std::size_t h = 0; h < p.components.size(); ++h) {
        const auto& comp = p.components[h];
        for (std::size_t i = 0; i < comp.cells.size(); ++i) {
            const Rat factor =
                bd.normsq * (bd.chart.eps[h] - Rat(comp.m_lo + static_cast<long long>(i)));
            for (long long j : comp.cells[i])
                bd.coords[static_cast<std::size_t>(j - 1)] = factor * ws.weight_p(j);
        }
    }
    // m_i^k tables
    bd.cell_sizes.assign(ws.atoms.size(),
                         std::vector<long long>(static_cast<std::size_t>(bd.chart.t), 0));
    std::map<std::pair<int, long long>, int> cell_pos;
    for (int k = 0; k < bd.chart.t; ++k) {
        const CellKey& c = bd.chart.cells[static_cast<std::size_t>(k)];
        cell_pos[{c.h, c.m}] = k;
    }
    for (std::size_t h = 0; h < p.components.size(); ++h) {
        const auto& comp = p.components[h];
        for (std::size_t i = 0; i < comp.cells.size(); ++i) {
            const int k = cell_pos[{static_cast<int>(h) + 1,
                                    comp.m_lo + static_cast<long long>(i)}];
            for (long long j : comp.cells[i])
                ++bd.cell_sizes[ws.atom_of(j)][static_cast<std::size_t>(k)];
        }
    }
    return bd;
}

// Inverse of beta_from_partition: the cell of weight j is read off from
// (eps - m) = beta_j / (|beta|^2 p_j), m being the unique integer putting the
// value into [-1/2, 1/2).
inline IndexedPartition partition_from_beta(const std::vector<Rat>& coords,
                                            const WeightSystem& ws) {
    const long long M = ws.total_weights();
    require_input(static_cast<long long>(coords.size()) == M, "coords",
                  "coordinate length must equal the number of weights");
    Rat normsq = 0;
    for (long long j = 1; j <= M; ++j)
        normsq += coords[static_cast<std::size_t>(j - 1)] *
                  coords[static_cast<std::size_t>(j - 1)] / ws.weight_p(j);
    require_input(normsq != 0, "coords", "coordinates must be nonzero");

    std::map<Rat, std::map<long long, std::vector<long long>>, std::greater<Rat>> grouped;
    for (long long j = 1; j <= M; ++j) {
        const Rat v = coords[static_cast<std::size_t>(j - 1)] / (normsq * ws.weight_p(j));
        const Int m = -floor_rat(v + Rat(1, 2));
        const Rat eps = v + Rat(m);
        grouped[eps][to_ll(m)].push_back(j);
    }
    IndexedPartition p;
    for (auto& [eps, cells] : grouped) {
        PartitionComponent comp;
        comp.m_lo = cells.begin()->first;
        long long expect = comp.m_lo;
        for (auto& [m, members] : cells) {
            require_input(m == expect, "shape",
                          "coordinates are not of the required closed form");
            ++expect;
            std::sort(members.begin(), members.end());
            comp.cells.push_back(std::move(members));
        }
        p.components.push_back(std::move(comp));
    }
    BetaData check;
    try {
        check = beta_from_partition(p, ws);
    } catch (const input_error&) {
        throw input_error("shape", "coordinates are not of the required closed form");
    }
    require_input(check.coords == coords, "shape",
                  "coordinates are not of the required closed form");
    return p;
}

// One cell of a raw partition, arbitrary m-offsets and component order.
struct RawPartitionCell {
    int h = 0;
    long long m = 0;
    std::vector<long long> members;
};

using RawPartition = std::vector<RawPartitionCell>;

// Shifts each component's m-range into the epsilon window, amalgamates
// components with equal epsilon (cells aligned by m - eps offset), and sorts
// components by strictly decreasing epsilon.  Idempotent.
inline IndexedPartition canonicalize_partition(const RawPartition& raw, const WeightSystem& ws) {
    require_input(!raw.empty(), "partition", "partition needs at least one cell");
    const long long M = ws.total_weights();
    std::vector<bool> seen(static_cast<std::size_t>(M) + 1, false);
    long long count = 0;
    for (const auto& cell : raw) {
        require_input(!cell.members.empty(), "partition", "empty cell");
        for (long long j : cell.members) {
            require_input(j >= 1 && j <= M, "partition", "member index out of range");
            require_input(!seen[static_cast<std::size_t>(j)], "partition",
                          "member repeated across cells");
            seen[static_cast<std::size_t>(j)] = true;
            ++count;
        }
    }
    require_input(count == M, "partition", "cells must cover all weights");

    // collect components, merging duplicate (h, m) cells
    std::map<int, std::map<long long, std::vector<long long>>> comps;
    for (const auto& cell : raw) {
        auto& members = comps[cell.h][cell.m];
        members.insert(members.end(), cell.members.begin(), cell.members.end());
    }

    // shift into the window, then group by epsilon
    std::map<Rat, std::map<long long, std::vector<long long>>, std::greater<Rat>> grouped;
    for (auto& [h, cells] : comps) {
        Rat total = 0, moment = 0;
        for (const auto& [m, members] : cells) {
            Rat r = 0;
            for (long long j : members) r += ws.weight_p(j);
            total += r;
            moment += Rat(m) * r;
        }
        const Rat eps_raw = moment / total;
        const long long shift = to_ll(floor_rat(eps_raw + Rat(1, 2)));
        const Rat eps = eps_raw - shift;
        auto& target = grouped[eps];
        for (auto& [m, members] : cells) {
            auto& cell = target[m - shift];
            cell.insert(cell.end(), members.begin(), members.end());
        }
    }

    IndexedPartition out;
    for (auto& [eps, cells] : grouped) {
        PartitionComponent comp;
        comp.m_lo = cells.begin()->first;
        long long expect = comp.m_lo;
        for (auto& [m, members] : cells) {
            require_input(m == expect, "structure",
                          "amalgamation left a gap in a component's m-range");
            ++expect;
            std::sort(members.begin(), members.end());
            comp.cells.push_back(std::move(members));
        }
        out.components.push_back(std::move(comp));
    }
    return out;
}

struct LambdaEntry {
    long long i = 0, j = 0;
    Rat value;
};

struct VerifyResult {
    bool ok = false;
    std::string reason;
    std::vector<LambdaEntry> lambda;
};

// Converse check of the closed form: every support pair must pair to
// |beta|^2 and the explicit convex coefficients must be nonnegative, sum to
// one and reconstruct beta.
inline VerifyResult verify_beta(const BetaData& bd, const WeightSystem& ws) {
    VerifyResult res;
    const auto comps = detail::component_weights(bd.part, ws);
    auto dot_beta = [&](long long a) {
        return bd.coords[static_cast<std::size_t>(a - 1)] / ws.weight_p(a);
    };
    const long long M = ws.total_weights();
    std::vector<Rat> recon(static_cast<std::size_t>(M), Rat(0));
    Rat lambda_total = 0;
    for (std::size_t h = 0; h < bd.part.components.size(); ++h) {
        const auto& comp = bd.part.components[h];
        const auto& weights = comps[h].second;
        const Rat eps = bd.chart.eps[h];
        Rat prefix = 0;  // sum_{k<=m} (eps - k) r_{h,k}
        for (std::size_t i = 0; i + 1 < comp.cells.size(); ++i) {
            const Rat m(comp.m_lo + static_cast<long long>(i));
            prefix += (eps - m) * weights[i];
            for (long long a : comp.cells[i])
                for (long long b : comp.cells[i + 1]) {
                    if (dot_beta(a) - dot_beta(b) != bd.normsq) {
                        res.reason = "support pairing is not |beta|^2";
                        return res;
                    }
                    const Rat lam = bd.normsq * ws.weight_p(a) * ws.weight_p(b) * prefix /
                                    (weights[i] * weights[i + 1]);
                    if (lam < 0) {
                        res.reason = "negative convex coefficient";
                        return res;
                    }
                    res.lambda.push_back(LambdaEntry{a, b, lam});
                    lambda_total += lam;
                    recon[static_cast<std::size_t>(a - 1)] += lam;
                    recon[static_cast<std::size_t>(b - 1)] -= lam;
                }
        }
    }
    if (lambda_total != 1) {
        res.reason = "convex coefficients do not sum to 1";
        res.lambda.clear();
        return res;
    }
    if (recon != bd.coords) {
        res.reason = "convex combination does not reconstruct beta";
        res.lambda.clear();
        return res;
    }
    res.ok = true;
    return res;
}

enum class PairingClass { equal, greater, less };

inline const char* pairing_class_name(PairingClass c) {
    switch (c) {
        case PairingClass::equal: return "equal";
        case PairingClass::greater: return "greater";
        case PairingClass::less: return "less";
    }
    return "?";
}

// Classification of beta.(e_i - e_j) against |beta|^2 for cell pairs: the
// value is |beta|^2 ((eps(h)-m) - (eps(h')-m')).
inline std::map<std::pair<int, int>, PairingClass> pairing_table(const BetaData& bd) {
    std::map<std::pair<int, int>, PairingClass> out;
    for (int k1 = 1; k1 <= bd.chart.t; ++k1)
        for (int k2 = 1; k2 <= bd.chart.t; ++k2) {
            const CellKey& c1 = bd.chart.cells[static_cast<std::size_t>(k1 - 1)];
            const CellKey& c2 = bd.chart.cells[static_cast<std::size_t>(k2 - 1)];
            const Rat diff = (bd.chart.eps[static_cast<std::size_t>(c1.h - 1)] - c1.m) -
                             (bd.chart.eps[static_cast<std::size_t>(c2.h - 1)] - c2.m);
            PairingClass cls = diff == 1  ? PairingClass::equal
                               : diff > 1 ? PairingClass::greater
                                          : PairingClass::less;
            out[{k1, k2}] = cls;
        }
    return out;
}

// Admissible pivot starts: (delta'(k_-), k_+); nonempty since
// delta'(k_-) <= k_- <= k_+.
inline std::pair<int, int> pivot_range(const Chart& chart) {
    const int lo = chart.delta_prime[static_cast<std::size_t>(chart.k_minus - 1)];
    return {lo, chart.k_plus};
}

inline std::pair<int, int> pivot_range(const BetaData& bd) { return pivot_range(bd.chart); }

struct JHBetaResult {
    bool full_group = false;
    std::optional<BetaData> beta;
    std::optional<MinNormCertificate> certificate;
};

// beta[n,m] of a one-block index: the min-norm point of the hull of weights
// e_a - e_b with a in multiplicity block (i1, j1), b in (i2, j2), j1 < j2.
// Indices with a single layer label the full-group stratum instead.
inline JHBetaResult beta_of_jh_index(const JHIndex& x, const WeightSystem& ws) {
    const JHIndex v = validate_jh_index(x);
    require_input(v.blocks.size() == 1, "jh_beta", "index must have a single slope block");
    const JHBlock& b = v.blocks.front();
    require_input(ws.atoms.size() == b.atom_ranks.size(), "jh_beta",
                  "weight system atoms must match the index");
    for (std::size_t i = 0; i < ws.atoms.size(); ++i) {
        long long row = std::accumulate(b.mult[i].begin(), b.mult[i].end(), 0LL);
        require_input(ws.atoms[i].mult == row && ws.atoms[i].rank == b.atom_ranks[i],
                      "jh_beta", "weight system atoms must match the index");
    }
    const std::size_t r = b.mult.front().size();
    if (r == 1) return JHBetaResult{true, std::nullopt, std::nullopt};

    // global weight index layout: atom blocks in order, layers inside an atom
    const long long M = ws.total_weights();
    std::vector<std::vector<std::vector<long long>>> slot(b.atom_ranks.size());
    long long next = 1;
    for (std::size_t i = 0; i < b.atom_ranks.size(); ++i) {
        slot[i].resize(r);
        for (std::size_t j = 0; j < r; ++j)
            for (long long c = 0; c < b.mult[i][j]; ++c) slot[i][j].push_back(next++);
    }
    MetricPointSet ms;
    ms.dim = static_cast<int>(M);
    for (long long j = 1; j <= M; ++j) ms.metric.push_back(Rat(1) / ws.weight_p(j));
    for (std::size_t i1 = 0; i1 < slot.size(); ++i1)
        for (std::size_t i2 = 0; i2 < slot.size(); ++i2)
            for (std::size_t j1 = 0; j1 < r; ++j1)
                for (std::size_t j2 = j1 + 1; j2 < r; ++j2)
                    for (long long a : slot[i1][j1])
                        for (long long bidx : slot[i2][j2]) {
                            std::vector<Rat> pt(static_cast<std::size_t>(M), Rat(0));
                            pt[static_cast<std::size_t>(a - 1)] = 1;
                            pt[static_cast<std::size_t>(bidx - 1)] = -1;
                            ms.points.push_back(std::move(pt));
                        }
    const MinNormCertificate cert = min_norm_point(ms);
    IndexedPartition part;
    try {
        part = partition_from_beta(cert.point, ws);
    } catch (const input_error& e) {
        throw internal_error(std::string("min-norm point is not of closed form: ") + e.what());
    }
    JHBetaResult res;
    res.full_group = false;
    res.beta = beta_from_partition(part, ws);
    res.certificate = cert;
    return res;
}

}  // namespace stratkit
