#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stratkit/beta.hpp"
#include "stratkit/census.hpp"
#include "stratkit/errors.hpp"
#include "stratkit/filtcalc.hpp"
#include "stratkit/hn.hpp"
#include "stratkit/minnorm.hpp"
#include "stratkit/series.hpp"

namespace stratkit {

using json = nlohmann::json;

// nlohmann objects keep keys sorted, so dumps are canonical byte-for-byte.
inline std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

namespace jio {

inline json rat(const Rat& r) { return format_rat(r); }

inline Rat rat_from(const json& j) {
    if (j.is_number_integer()) return Rat(j.get<long long>());
    require_input(j.is_string(), "json", "rationals must be 'p/q' strings");
    return parse_rat(j.get<std::string>());
}

inline std::vector<Rat> rat_vector_from(const json& j) {
    require_input(j.is_array(), "json", "expected an array of rationals");
    std::vector<Rat> v;
    for (const auto& e : j) v.push_back(rat_from(e));
    return v;
}

inline json rat_vector(const std::vector<Rat>& v) {
    json a = json::array();
    for (const Rat& r : v) a.push_back(rat(r));
    return a;
}

}  // namespace jio

inline json to_json(const HNType& t) {
    json blocks = json::array();
    for (const auto& [n, d] : t.blocks) blocks.push_back(json::array({n, d}));
    return json{{"blocks", blocks}};
}

inline HNType hn_from_json(const json& j) {
    require_input(j.is_object() && j.contains("blocks") && j["blocks"].is_array(), "json",
                  "expected {\"blocks\": [[n,d],...]}");
    std::vector<std::pair<long long, long long>> blocks;
    for (const auto& b : j["blocks"]) {
        require_input(b.is_array() && b.size() == 2, "json", "blocks entries are [n, d]");
        blocks.emplace_back(b[0].get<long long>(), b[1].get<long long>());
    }
    return make_hn_type(std::move(blocks));
}

inline json to_json(const MumfordEntry& e) {
    return json{{"D", e.D}, {"d_hat", e.d_hat}, {"n_hat", e.n_hat},
                {"r_max", e.r_max}, {"r_min", e.r_min}};
}

inline json to_json(const TruncatedSeries& s) {
    json coeffs = json::array();
    for (const Int& c : s.coeffs()) coeffs.push_back(to_ll(c));
    return json{{"coeffs", coeffs}, {"truncation", s.truncation()}};
}

inline json to_json(const ReductiveClass& c) {
    json pairs = json::array();
    for (const auto& [m, ni] : c.pairs) pairs.push_back(json::array({m, ni}));
    return json{{"d", c.d}, {"n", c.n}, {"pairs", pairs}};
}

inline ReductiveClass reductive_class_from_json(const json& j) {
    require_input(j.is_object() && j.contains("pairs") && j.contains("n"), "json",
                  "expected {\"n\":..., \"d\":..., \"pairs\": [[m,n_i],...]}");
    std::vector<std::pair<long long, long long>> pairs;
    for (const auto& p : j["pairs"]) {
        require_input(p.is_array() && p.size() == 2, "json", "pairs entries are [m, n_i]");
        pairs.emplace_back(p[0].get<long long>(), p[1].get<long long>());
    }
    return make_reductive_class(std::move(pairs), j["n"].get<long long>(),
                                j.value("d", 0LL));
}

inline json to_json(const GroupData& g) {
    std::vector<long long> sizes;
    for (const auto& [cls, count] : g.pi0) sizes.push_back(count);
    std::sort(sizes.rbegin(), sizes.rend());
    return json{{"dim_N0", g.dim_N0},
                {"p", g.p},
                {"p_values", g.p_values},
                {"pi0_factor_sizes", sizes}};
}

inline json to_json(const JHIndex& x) {
    json blocks = json::array();
    for (const auto& b : x.blocks)
        blocks.push_back(json{{"atoms", b.atom_ranks}, {"d", b.d}, {"mult", b.mult}, {"n", b.n}});
    return json{{"blocks", blocks}};
}

inline JHIndex jh_index_from_json(const json& j) {
    require_input(j.is_object() && j.contains("blocks") && j["blocks"].is_array(), "json",
                  "expected {\"blocks\":[{\"d\":..,\"n\":..,\"atoms\":[..],\"mult\":[[..]]},..]}");
    JHIndex x;
    for (const auto& b : j["blocks"]) {
        JHBlock blk;
        blk.d = b.at("d").get<long long>();
        blk.n = b.at("n").get<long long>();
        blk.atom_ranks = b.at("atoms").get<std::vector<long long>>();
        blk.mult = b.at("mult").get<std::vector<std::vector<long long>>>();
        x.blocks.push_back(std::move(blk));
    }
    return x;
}

inline json to_json(const OrderRelation& r) { return json{{"relation", order_relation_name(r)}}; }

inline json to_json(const WeightSystem& ws) {
    json atoms = json::array();
    for (const auto& a : ws.atoms)
        atoms.push_back(json{{"mult", a.mult}, {"p", jio::rat(a.p)}, {"rank", a.rank}});
    return json{{"atoms", atoms}};
}

// Accepts either explicit per-atom p values or a (g, n, d) context.
inline WeightSystem weight_system_from_json(const json& j) {
    require_input(j.is_object() && j.contains("atoms") && j["atoms"].is_array(), "json",
                  "expected {\"atoms\":[{\"mult\":..,\"rank\":..[,\"p\":..]},..][, g, n, d]}");
    std::vector<long long> mults, ranks;
    bool explicit_p = true;
    std::vector<Rat> ps;
    for (const auto& a : j["atoms"]) {
        mults.push_back(a.at("mult").get<long long>());
        ranks.push_back(a.value("rank", 1LL));
        if (a.contains("p"))
            ps.push_back(jio::rat_from(a["p"]));
        else
            explicit_p = false;
    }
    if (explicit_p && ps.size() == mults.size()) {
        std::vector<WeightAtom> atoms;
        for (std::size_t i = 0; i < mults.size(); ++i)
            atoms.push_back(WeightAtom{mults[i], ranks[i], ps[i]});
        return weight_system_from_p(std::move(atoms));
    }
    require_input(j.contains("g") && j.contains("n") && j.contains("d"), "json",
                  "weight system needs per-atom p values or a (g, n, d) context");
    return build_weight_system(Genus(j["g"].get<int>()), j["n"].get<long long>(),
                               j["d"].get<long long>(), mults, ranks);
}

inline json to_json(const IndexedPartition& p) {
    json cells = json::array();
    for (std::size_t h = 0; h < p.components.size(); ++h) {
        const auto& comp = p.components[h];
        for (std::size_t i = 0; i < comp.cells.size(); ++i)
            cells.push_back(json{{"h", h + 1},
                                 {"m", comp.m_lo + static_cast<long long>(i)},
                                 {"members", comp.cells[i]}});
    }
    return json{{"L", p.components.size()}, {"cells", cells}};
}

inline RawPartition raw_partition_from_json(const json& j) {
    require_input(j.is_object() && j.contains("cells") && j["cells"].is_array(), "json",
                  "expected {\"L\":..., \"cells\":[{\"h\":..,\"m\":..,\"members\":[..]},..]}");
    RawPartition raw;
    for (const auto& c : j["cells"]) {
        RawPartitionCell cell;
        cell.h = c.at("h").get<int>();
        cell.m = c.at("m").get<long long>();
        cell.members = c.at("members").get<std::vector<long long>>();
        raw.push_back(std::move(cell));
    }
    return raw;
}

// Strict form: cells must already be the canonical representative.
inline IndexedPartition partition_from_json(const json& j) {
    const RawPartition raw = raw_partition_from_json(j);
    std::map<int, std::map<long long, std::vector<long long>>> comps;
    for (const auto& cell : raw) {
        require_input(comps[cell.h].emplace(cell.m, cell.members).second, "partition",
                      "duplicate (h, m) cell");
    }
    IndexedPartition p;
    int expected_h = 1;
    for (auto& [h, cells] : comps) {
        require_input(h == expected_h++, "partition", "component indices must be 1..L");
        PartitionComponent comp;
        comp.m_lo = cells.begin()->first;
        long long expect = comp.m_lo;
        for (auto& [m, members] : cells) {
            require_input(m == expect, "partition", "cell levels must be contiguous");
            ++expect;
            std::sort(members.begin(), members.end());
            comp.cells.push_back(std::move(members));
        }
        p.components.push_back(std::move(comp));
    }
    require_input(!p.components.empty(), "partition", "partition needs at least one cell");
    return p;
}

inline json to_json(const BetaData& bd) {
    json cell_sizes = json::array();
    for (const auto& row : bd.cell_sizes) cell_sizes.push_back(row);
    json phi = json::array();
    for (int k = 1; k <= bd.chart.t; ++k) {
        const CellKey& cell = bd.chart.cells[static_cast<std::size_t>(k - 1)];
        phi.push_back(json{{"h", cell.h}, {"k", k}, {"m", cell.m}});
    }
    return json{{"cell_sizes", cell_sizes},
                {"coords", jio::rat_vector(bd.coords)},
                {"delta", bd.chart.delta},
                {"delta_prime", bd.chart.delta_prime},
                {"eps", jio::rat_vector(bd.chart.eps)},
                {"k_minus", bd.chart.k_minus},
                {"k_plus", bd.chart.k_plus},
                {"normsq", jio::rat(bd.normsq)},
                {"partition", to_json(bd.part)},
                {"phi", phi}};
}

// Rebuilds the chart from the partition; coordinates and norm are taken as
// claimed so inconsistent data can be fed to verification.
inline BetaData beta_data_from_json(const json& j, const WeightSystem& ws) {
    require_input(j.is_object() && j.contains("partition") && j.contains("coords"), "json",
                  "expected {\"partition\":..., \"coords\":[...]}");
    BetaData bd;
    bd.part = partition_from_json(j["partition"]);
    detail::check_partitions_weights(bd.part, ws);
    bd.chart = detail::build_chart(detail::component_weights(bd.part, ws));
    bd.coords = jio::rat_vector_from(j["coords"]);
    require_input(static_cast<long long>(bd.coords.size()) == ws.total_weights(), "json",
                  "coords length must match the weight system");
    Rat normsq = 0;
    for (long long i = 1; i <= ws.total_weights(); ++i)
        normsq += bd.coords[static_cast<std::size_t>(i - 1)] *
                  bd.coords[static_cast<std::size_t>(i - 1)] / ws.weight_p(i);
    bd.normsq = normsq;
    return bd;
}

inline json to_json(const MetricPointSet& s) {
    json points = json::array();
    for (const auto& p : s.points) points.push_back(jio::rat_vector(p));
    return json{{"dim", s.dim}, {"metric", jio::rat_vector(s.metric)}, {"points", points}};
}

inline MetricPointSet point_set_from_json(const json& j) {
    require_input(j.is_object() && j.contains("dim") && j.contains("metric") &&
                      j.contains("points"),
                  "json", "expected {\"dim\":..., \"metric\":[...], \"points\":[[...],...]}");
    MetricPointSet s;
    s.dim = j["dim"].get<int>();
    s.metric = jio::rat_vector_from(j["metric"]);
    for (const auto& p : j["points"]) s.points.push_back(jio::rat_vector_from(p));
    validate(s);
    return s;
}

inline json to_json(const MinNormCertificate& c) {
    return json{{"coefficients", jio::rat_vector(c.coefficients)},
                {"normsq", jio::rat(c.normsq)},
                {"point", jio::rat_vector(c.point)}};
}

inline json to_json(const VerifyResult& v) {
    json lambda = json::array();
    for (const auto& e : v.lambda)
        lambda.push_back(json{{"i", e.i}, {"j", e.j}, {"value", jio::rat(e.value)}});
    json out{{"lambda", lambda}, {"ok", v.ok}};
    if (!v.ok) out["reason"] = v.reason;
    return out;
}

inline json to_json(const FAtom& a) {
    return json{{"degree", a.degree}, {"id", a.id}, {"rank", a.rank}};
}

inline json to_json(const Layer& layer) {
    json out = json::array();
    for (const auto& e : layer) out.push_back(json{{"atom", to_json(e.atom)}, {"mult", e.mult}});
    return out;
}

inline json to_json(const FiltSpec& f) {
    json layers = json::array();
    for (const auto& layer : f.layers) layers.push_back(to_json(layer));
    return json{{"layers", layers}};
}

inline FiltSpec filt_spec_from_json(const json& j) {
    require_input(j.is_object() && j.contains("layers") && j["layers"].is_array(), "json",
                  "expected {\"layers\":[[{\"mult\":..,\"atom\":{..}},..],..]}");
    std::vector<Layer> layers;
    for (const auto& jl : j["layers"]) {
        Layer layer;
        for (const auto& je : jl) {
            const auto& ja = je.at("atom");
            layer.push_back(LayerEntry{je.at("mult").get<long long>(),
                                       FAtom{ja.at("id").get<std::string>(),
                                             ja.at("rank").get<long long>(),
                                             ja.at("degree").get<long long>()}});
        }
        layers.push_back(std::move(layer));
    }
    return make_filt_spec(std::move(layers));
}

inline json to_json(const DeltaFilt& d) {
    return json{{"components", d.components}, {"spec", to_json(d.spec)}};
}

inline DeltaFilt delta_filt_from_json(const json& j) {
    require_input(j.is_object() && j.contains("spec") && j.contains("components"), "json",
                  "expected {\"spec\":{...}, \"components\":[[...],...]}");
    DeltaFilt d;
    d.spec = filt_spec_from_json(j["spec"]);
    d.components = j["components"].get<std::vector<std::vector<int>>>();
    validate_delta_filt(d);
    return d;
}

inline json to_json(const PivotData& p) {
    return json{{"k1_max", p.k1_max}, {"k1_min", p.k1_min}, {"layers", p.layers}};
}

inline json to_json(const ClassifyReport& r) {
    json out{{"balanced", r.balanced},
             {"eps", jio::rat_vector(r.eps)},
             {"hn_shadow", to_json(r.hn_shadow)},
             {"inv_triviality_sq", jio::rat(r.inv_triviality_sq)}};
    if (r.balanced) out["delta"] = r.delta;
    if (r.pivot) out["pivot"] = to_json(*r.pivot);
    if (r.beta_normsq) out["beta_normsq"] = jio::rat(*r.beta_normsq);
    return out;
}

inline json to_json(const JHBetaResult& r) {
    json out{{"full_group", r.full_group}};
    if (r.beta) out["beta"] = to_json(*r.beta);
    if (r.certificate) out["certificate"] = to_json(*r.certificate);
    return out;
}

}  // namespace stratkit
