#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stratkit/beta.hpp"
#include "stratkit/errors.hpp"
#include "stratkit/hn.hpp"
#include "stratkit/rational.hpp"

namespace stratkit {

// A stable atom in the symbolic calculus.  Ids are opaque: equal id means
// the same bundle, distinct ids are never isomorphic.  The dual of "a" is
// written "a*".
struct FAtom {
    std::string id;
    long long rank = 0;
    long long degree = 0;

    bool operator==(const FAtom& o) const {
        return id == o.id && rank == o.rank && degree == o.degree;
    }
    bool operator<(const FAtom& o) const {
        return std::tie(id, rank, degree) < std::tie(o.id, o.rank, o.degree);
    }
};

inline FAtom dual_atom(const FAtom& a) {
    FAtom d = a;
    d.degree = -a.degree;
    if (!a.id.empty() && a.id.back() == '*')
        d.id = a.id.substr(0, a.id.size() - 1);
    else
        d.id = a.id + "*";
    return d;
}

struct LayerEntry {
    long long mult = 0;
    FAtom atom;

    bool operator==(const LayerEntry& o) const { return mult == o.mult && atom == o.atom; }
};

using Layer = std::vector<LayerEntry>;  // canonical: sorted by atom, merged

namespace detail {

inline Layer canonical_layer(Layer layer) {
    std::map<FAtom, long long> acc;
    for (const auto& e : layer) {
        require_input(e.mult >= 1, "filt", "multiplicities must be positive");
        require_input(e.atom.rank >= 1, "filt", "atom ranks must be positive");
        acc[e.atom] += e.mult;
    }
    Layer out;
    for (const auto& [atom, mult] : acc) out.push_back(LayerEntry{mult, atom});
    return out;
}

inline Layer merge_layers(const Layer& a, const Layer& b) {
    Layer joined = a;
    joined.insert(joined.end(), b.begin(), b.end());
    return canonical_layer(joined);
}

}  // namespace detail

// Symbolic filtration, bottom layer first: layers[j] is the multiset of
// stable summands of E_{j+1}/E_j.
struct FiltSpec {
    std::vector<Layer> layers;

    bool operator==(const FiltSpec& o) const { return layers == o.layers; }

    long long total_rank() const {
        long long n = 0;
        for (const auto& layer : layers)
            for (const auto& e : layer) n += e.mult * e.atom.rank;
        return n;
    }
    long long total_degree() const {
        long long d = 0;
        for (const auto& layer : layers)
            for (const auto& e : layer) d += e.mult * e.atom.degree;
        return d;
    }
};

inline long long layer_rank(const Layer& layer) {
    long long n = 0;
    for (const auto& e : layer) n += e.mult * e.atom.rank;
    return n;
}

inline FiltSpec make_filt_spec(std::vector<Layer> layers) {
    FiltSpec f;
    std::map<std::string, std::pair<long long, long long>> table;
    for (auto& layer : layers) {
        Layer c = detail::canonical_layer(std::move(layer));
        require_input(!c.empty(), "filt", "empty filtration layer");
        for (const auto& e : c) {
            auto [it, inserted] = table.try_emplace(e.atom.id, e.atom.rank, e.atom.degree);
            require_input(inserted || (it->second.first == e.atom.rank &&
                                       it->second.second == e.atom.degree),
                          "atom_conflict", "atom id reused with different rank or degree");
        }
        f.layers.push_back(std::move(c));
    }
    return f;
}

// Common slope of a semistable spec; input error if slopes mix.
inline Rat common_slope(const FiltSpec& f) {
    std::optional<Rat> slope;
    for (const auto& layer : f.layers)
        for (const auto& e : layer) {
            Rat s(e.atom.degree, e.atom.rank);
            if (!slope) slope = s;
            require_input(*slope == s, "slope", "atoms must share one slope");
        }
    require_input(slope.has_value(), "slope", "empty filtration has no slope");
    return *slope;
}

// Layerwise multiset sum; independent of the layer order.
inline Layer gr_of(const FiltSpec& f) {
    common_slope(f);
    Layer acc;
    for (const auto& layer : f.layers) acc = detail::merge_layers(acc, layer);
    return acc;
}

enum class SumMode { max, min };

// Direct-sum law for maximal (align at the bottom, shorter extended
// trivially at the top) and minimal (align at the top) filtrations.
inline FiltSpec direct_sum(const FiltSpec& x, const FiltSpec& y, SumMode mode) {
    if (x.layers.empty()) return y;
    if (y.layers.empty()) return x;
    require_input(common_slope(x) == common_slope(y), "slope_mismatch",
                  "direct sum requires equal slopes");
    const std::size_t lx = x.layers.size(), ly = y.layers.size();
    const std::size_t len = std::max(lx, ly);
    std::vector<Layer> out(len);
    for (std::size_t j = 0; j < len; ++j) {
        const auto pick = [&](const FiltSpec& f, std::size_t l) -> const Layer* {
            if (mode == SumMode::max) return j < l ? &f.layers[j] : nullptr;
            return j + l >= len ? &f.layers[j + l - len] : nullptr;
        };
        const Layer* a = pick(x, lx);
        const Layer* b = pick(y, ly);
        if (a && b)
            out[j] = detail::merge_layers(*a, *b);
        else
            out[j] = a ? *a : *b;
    }
    return make_filt_spec(std::move(out));
}

// Kernels of the duals of the inclusions: reversed layers, dual atoms.
inline FiltSpec dualize(const FiltSpec& f) {
    std::vector<Layer> out;
    for (auto it = f.layers.rbegin(); it != f.layers.rend(); ++it) {
        Layer layer;
        for (const auto& e : *it) layer.push_back(LayerEntry{e.mult, dual_atom(e.atom)});
        out.push_back(std::move(layer));
    }
    return make_filt_spec(std::move(out));
}

// A filtration with split-range bookkeeping: components group the layers
// into chains whose consecutive members are not asserted split; everything
// between consecutive cells of one chain is trivial.  m-offsets are the
// canonical ones (epsilon in [-1/2, 1/2)).
struct DeltaFilt {
    FiltSpec spec;
    std::vector<std::vector<int>> components;  // 1-based layer indices, increasing

    bool operator==(const DeltaFilt& o) const {
        return spec == o.spec && components == o.components;
    }
};

inline void validate_delta_filt(const DeltaFilt& d) {
    const int t = static_cast<int>(d.spec.layers.size());
    std::vector<bool> seen(static_cast<std::size_t>(t) + 1, false);
    int count = 0;
    for (const auto& comp : d.components) {
        require_input(!comp.empty(), "delta_filt", "empty component");
        for (std::size_t i = 0; i < comp.size(); ++i) {
            const int k = comp[i];
            require_input(k >= 1 && k <= t, "delta_filt", "layer index out of range");
            require_input(!seen[static_cast<std::size_t>(k)], "delta_filt",
                          "layer repeated across components");
            seen[static_cast<std::size_t>(k)] = true;
            require_input(i == 0 || comp[i - 1] < k, "delta_filt",
                          "component layers must increase");
            ++count;
        }
    }
    require_input(count == t, "delta_filt", "components must cover all layers");
}

struct PivotData {
    int k1_min = 0, k1_max = 0;       // admissible pivot starts
    std::vector<int> layers;          // k1-1 .. delta(k1) for k1 = k1_min
};

struct ClassifyReport {
    bool balanced = false;
    Rat inv_triviality_sq;            // sum (m - eps)^2 rank(E_k/E_{k-1})
    HNType hn_shadow;
    std::vector<Rat> eps;             // per component, decreasing when balanced
    std::vector<int> delta;           // only when balanced
    std::optional<PivotData> pivot;   // only when balanced
    std::optional<Rat> beta_normsq;   // only with genus context and positive factor
};

namespace detail {

struct FiltComponent {
    Rat eps;
    long long m_lo = 0;
    std::vector<int> layers;  // chain in m order
};

// Canonical m-offsets: positions 0..len-1 shifted so epsilon lands in the
// window.
inline FiltComponent component_data(const FiltSpec& spec, const std::vector<int>& layers) {
    Rat total = 0, moment = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Rat r(layer_rank(spec.layers[static_cast<std::size_t>(layers[i] - 1)]));
        total += r;
        moment += Rat(static_cast<long long>(i)) * r;
    }
    const Rat eps_raw = moment / total;
    const long long shift = to_ll(floor_rat(eps_raw + Rat(1, 2)));
    return FiltComponent{eps_raw - shift, -shift, layers};
}

}  // namespace detail

// Balancedness, the triviality measure (reported as the rational inverse
// square), the Harder-Narasimhan shadow, and pivot data for balanced
// filtrations.  With a genus context the induced |beta|^2 is included when
// 1 - g + d/n > 0.
inline ClassifyReport classify(const DeltaFilt& d, std::optional<Genus> genus = std::nullopt) {
    validate_delta_filt(d);
    require_input(!d.spec.layers.empty(), "delta_filt", "empty filtration");
    ClassifyReport rep;

    // Harder-Narasimhan shadow: maximal runs of equal-slope layers.
    std::vector<std::pair<long long, long long>> shadow_blocks;
    std::optional<Rat> prev_slope;
    for (const auto& layer : d.spec.layers) {
        std::optional<Rat> slope;
        long long rank = 0, degree = 0;
        for (const auto& e : layer) {
            Rat s(e.atom.degree, e.atom.rank);
            require_input(!slope || *slope == s, "mixed_layer",
                          "layer mixes atoms of different slopes");
            slope = s;
            rank += e.mult * e.atom.rank;
            degree += e.mult * e.atom.degree;
        }
        if (prev_slope && *prev_slope == *slope) {
            shadow_blocks.back().first += rank;
            shadow_blocks.back().second += degree;
        } else {
            require_input(!prev_slope || *prev_slope > *slope, "slope_order",
                          "layer slopes must be nonincreasing");
            shadow_blocks.emplace_back(rank, degree);
        }
        prev_slope = slope;
    }
    rep.hn_shadow = make_hn_type(std::move(shadow_blocks));
    const bool semistable = rep.hn_shadow.blocks.size() == 1;

    std::vector<detail::FiltComponent> comps;
    for (const auto& c : d.components) comps.push_back(detail::component_data(d.spec, c));
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.eps > b.eps; });

    rep.inv_triviality_sq = 0;
    for (const auto& c : comps) {
        rep.eps.push_back(c.eps);
        for (std::size_t i = 0; i < c.layers.size(); ++i) {
            const Rat diff = Rat(c.m_lo + static_cast<long long>(i)) - c.eps;
            rep.inv_triviality_sq +=
                diff * diff * layer_rank(d.spec.layers[static_cast<std::size_t>(c.layers[i] - 1)]);
        }
    }

    // balanced: strictly decreasing epsilon and the layer order is the
    // Hebrew-lexicographic order of (h, m)
    bool balanced = semistable;
    for (std::size_t h = 0; h + 1 < comps.size() && balanced; ++h)
        if (!(comps[h].eps > comps[h + 1].eps)) balanced = false;
    if (balanced) {
        std::vector<std::tuple<long long, std::size_t, int>> order;  // (m, h, layer)
        for (std::size_t h = 0; h < comps.size(); ++h)
            for (std::size_t i = 0; i < comps[h].layers.size(); ++i)
                order.emplace_back(comps[h].m_lo + static_cast<long long>(i), h,
                                   comps[h].layers[i]);
        std::sort(order.begin(), order.end());
        for (std::size_t k = 0; k < order.size(); ++k)
            if (std::get<2>(order[k]) != static_cast<int>(k) + 1) balanced = false;
    }
    rep.balanced = balanced;

    if (balanced) {
        std::vector<std::pair<long long, std::vector<Rat>>> chart_comps;
        for (const auto& c : comps) {
            std::vector<Rat> weights;
            for (int layer : c.layers)
                weights.emplace_back(layer_rank(d.spec.layers[static_cast<std::size_t>(layer - 1)]));
            chart_comps.emplace_back(c.m_lo, std::move(weights));
        }
        const Chart chart = detail::build_chart(chart_comps);
        rep.delta = chart.delta;
        if (chart.inv_normsq > 0) {
            const auto [lo, hi] = pivot_range(chart);
            PivotData pv;
            pv.k1_min = lo;
            pv.k1_max = hi;
            for (int k = lo - 1; k <= chart.delta[static_cast<std::size_t>(lo - 1)]; ++k)
                pv.layers.push_back(k);
            rep.pivot = pv;
            if (genus) {
                const Rat factor = Rat(1) - genus->value +
                                   Rat(d.spec.total_degree(), d.spec.total_rank());
                if (factor > 0) rep.beta_normsq = Rat(1) / (factor * rep.inv_triviality_sq);
            }
        }
    }
    return rep;
}

struct MergeResult {
    DeltaFilt filt;
    int amalgamated = 0;  // equal-epsilon component pairs united
};

// Direct-sum of balanced filtrations: components keep their cells, equal-eps
// components amalgamate cell-by-cell (their m-ranges both contain 0, so the
// union is contiguous), and the output layers follow the Hebrew order.
inline MergeResult balanced_merge(const DeltaFilt& x, const DeltaFilt& y) {
    if (x.spec.layers.empty()) return MergeResult{y, 0};
    if (y.spec.layers.empty()) return MergeResult{x, 0};
    require_input(common_slope(x.spec) == common_slope(y.spec), "slope_mismatch",
                  "merge requires equal slopes");
    for (const DeltaFilt* input : {&x, &y})
        require_input(classify(*input).balanced, "not_balanced",
                      "inputs must be balanced filtrations");

    // component cells as m -> layer content
    std::map<Rat, std::map<long long, Layer>, std::greater<Rat>> groups;
    int amalgamated = 0;
    for (const DeltaFilt* input : {&x, &y}) {
        for (const auto& comp : input->components) {
            const auto data = detail::component_data(input->spec, comp);
            std::map<long long, Layer> cells;
            for (std::size_t i = 0; i < comp.size(); ++i)
                cells[data.m_lo + static_cast<long long>(i)] =
                    input->spec.layers[static_cast<std::size_t>(comp[i] - 1)];
            auto [it, inserted] = groups.try_emplace(data.eps, std::move(cells));
            if (!inserted) {
                ++amalgamated;
                for (auto& [m, layer] : cells) {
                    auto [cit, fresh] = it->second.try_emplace(m, layer);
                    if (!fresh) cit->second = detail::merge_layers(cit->second, layer);
                }
            }
        }
    }

    // Hebrew order: cells by (m, h)
    std::vector<std::tuple<long long, std::size_t, const Layer*>> order;
    std::size_t h = 0;
    for (const auto& [eps, cells] : groups) {
        for (const auto& [m, layer] : cells) order.emplace_back(m, h, &layer);
        ++h;
    }
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) {
                  return std::tie(std::get<0>(a), std::get<1>(a)) <
                         std::tie(std::get<0>(b), std::get<1>(b));
              });
    std::vector<Layer> layers;
    std::vector<std::vector<int>> components(groups.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        layers.push_back(*std::get<2>(order[k]));
        components[std::get<1>(order[k])].push_back(static_cast<int>(k) + 1);
    }
    MergeResult res;
    res.filt = DeltaFilt{make_filt_spec(std::move(layers)), std::move(components)};
    res.amalgamated = amalgamated;
    return res;
}

}  // namespace stratkit
