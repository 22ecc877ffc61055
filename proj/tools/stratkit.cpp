#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "stratkit/hasse.hpp"
#include "stratkit/json_io.hpp"

namespace {

using stratkit::json;

struct JsonInput {
    std::string inline_json;
    std::string file;

    void attach(CLI::App* cmd, const std::string& prefix = "") {
        const std::string dash = prefix.empty() ? "" : "-";
        cmd->add_option("--" + prefix + dash + "json", inline_json,
                        "inline JSON " + (prefix.empty() ? "input" : prefix));
        cmd->add_option("--" + prefix + dash + "file", file,
                        "path to a JSON file " + (prefix.empty() ? "input" : prefix));
    }

    json load(const std::string& what) const {
        stratkit::require_input(inline_json.empty() != file.empty(), "cli",
                                "provide exactly one of --json/--file for " + what);
        std::string text = inline_json;
        if (!file.empty()) {
            std::ifstream in(file);
            stratkit::require_input(static_cast<bool>(in), "cli", "cannot open " + file);
            std::ostringstream buf;
            buf << in.rdbuf();
            text = buf.str();
        }
        json j = json::parse(text, nullptr, false);
        stratkit::require_input(!j.is_discarded(), "json", "malformed JSON for " + what);
        return j;
    }
};

void emit(const json& j) { std::cout << stratkit::dump_canonical(j); }

int env_truncation(int fallback) {
    if (const char* env = std::getenv("STRATKIT_TRUNCATION")) {
        try {
            return std::stoi(env);
        } catch (...) {
            throw stratkit::input_error("cli", "STRATKIT_TRUNCATION must be an integer");
        }
    }
    return fallback;
}

template <class T, class Cmp>
void emit_hasse(const std::vector<T>& elems, Cmp cmp, const std::string& format) {
    stratkit::require_input(format == "dot" || format == "json", "cli",
                            "--format must be dot or json");
    std::vector<std::string> labels;
    for (const T& e : elems) labels.push_back(stratkit::to_json(e).dump());
    const auto edges = stratkit::covering_edges(elems, cmp);
    if (format == "dot") {
        std::cout << stratkit::to_dot(labels, edges);
        return;
    }
    json jedges = json::array();
    for (const auto& [a, b] : edges) jedges.push_back(json::array({labels[a], labels[b]}));
    emit(json{{"edges", jedges}, {"nodes", labels}});
}

}  // namespace

int main(int argc, char** argv) {
    using namespace stratkit;
    CLI::App app{"exact invariants of the Yang-Mills stratification over a curve"};
    app.require_subcommand(1);

    long long n = 0, d = 0, d1 = 0, n1 = 0, d_eff = 0, max_codim = 0;
    int g = 2, truncation = -1;
    std::string format = "dot", variant = "statement", series_kind = "M", mode = "max";
    JsonInput input, input_a, input_b, input_ws;

    // ---- hn ----
    auto* hn = app.add_subcommand("hn", "Harder-Narasimhan types");
    auto* hn_enum = hn->add_subcommand("enumerate", "types up to a codimension bound");
    hn_enum->add_option("--n", n, "rank")->required();
    hn_enum->add_option("--d", d, "degree")->required();
    hn_enum->add_option("--g", g, "genus")->required();
    hn_enum->add_option("--max-codim", max_codim, "codimension bound")->required();
    hn_enum->callback([&] {
        json types = json::array();
        for (const HNType& t : enumerate_hn_types(n, d, Genus(g), max_codim))
            types.push_back(to_json(t));
        emit(json{{"types", types}});
    });

    auto* hn_codim_cmd = hn->add_subcommand("codim", "stratum codimension of a type");
    input.attach(hn_codim_cmd);
    hn_codim_cmd->add_option("--g", g, "genus")->required();
    hn_codim_cmd->callback([&] {
        emit(json{{"codim", hn_codim(hn_from_json(input.load("type")), Genus(g))}});
    });

    auto* hn_coarse = hn->add_subcommand("coarse-codim", "codimension of a coarse type");
    hn_coarse->add_option("--n1", n1, "first step rank")->required();
    hn_coarse->add_option("--d1", d1, "first step degree")->required();
    hn_coarse->add_option("--n", n, "ambient rank")->required();
    hn_coarse->add_option("--d", d, "ambient degree")->required();
    hn_coarse->add_option("--g", g, "genus")->required();
    hn_coarse->callback([&] {
        emit(json{{"codim", coarse_codim(CoarseType{n1, d1, n, d}, Genus(g))}});
    });

    auto* hn_cmp = hn->add_subcommand("compare", "partial order on types");
    input_a.attach(hn_cmp, "a");
    input_b.attach(hn_cmp, "b");
    hn_cmp->callback([&] {
        emit(to_json(hn_compare(hn_from_json(input_a.load("a")),
                                hn_from_json(input_b.load("b")))));
    });

    auto* hn_hasse = hn->add_subcommand("hasse", "covering relations of the type poset");
    hn_hasse->add_option("--n", n, "rank")->required();
    hn_hasse->add_option("--d", d, "degree")->required();
    hn_hasse->add_option("--g", g, "genus")->required();
    hn_hasse->add_option("--max-codim", max_codim, "codimension bound")->required();
    hn_hasse->add_option("--format", format, "dot or json");
    hn_hasse->callback([&] {
        emit_hasse(enumerate_hn_types(n, d, Genus(g), max_codim),
                   [](const HNType& a, const HNType& b) { return hn_compare(a, b); }, format);
    });

    auto* hn_mumford = hn->add_subcommand(
        "mumford",
        "integer census of the generalised Mumford relation ranges (lower threshold in the "
        "bundle-rank form n*n_hat*(g-1) - d*n_hat + d_hat*n)");
    hn_mumford->add_option("--n", n, "rank")->required();
    hn_mumford->add_option("--d", d, "degree")->required();
    hn_mumford->add_option("--g", g, "genus")->required();
    hn_mumford->callback([&] {
        json entries = json::array();
        for (const MumfordEntry& e : mumford_census(n, d, Genus(g))) entries.push_back(to_json(e));
        emit(json{{"entries", entries}});
    });

    // ---- poincare ----
    auto* poincare = app.add_subcommand("poincare", "Poincare series");
    poincare->add_option("--n", n, "rank")->required();
    poincare->add_option("--d", d, "degree");
    poincare->add_option("--g", g, "genus")->required();
    poincare->add_option("--series", series_kind, "M (default), BG or Css");
    poincare->add_option("--truncation", truncation, "truncation degree override");
    poincare->callback([&] {
        const int def = poincare_M_default_truncation(n, Genus(g));
        const int K = truncation >= 0 ? truncation : env_truncation(def);
        if (series_kind == "M")
            emit(to_json(poincare_M(n, d, Genus(g), K)));
        else if (series_kind == "BG")
            emit(to_json(poincare_BG(static_cast<int>(n), Genus(g), K)));
        else if (series_kind == "Css")
            emit(to_json(poincare_Css(n, d, Genus(g), K)));
        else
            throw input_error("cli", "--series must be M, BG or Css");
    });

    // ---- census ----
    auto* census = app.add_subcommand("census", "reductive stabiliser classes");
    auto* census_red = census->add_subcommand("reductive", "enumerate classes");
    census_red->add_option("--n", n, "rank")->required();
    census_red->add_option("--d", d, "degree")->required();
    census_red->callback([&] {
        json classes = json::array();
        for (const ReductiveClass& c : enumerate_reductive_classes(n, d))
            classes.push_back(to_json(c));
        emit(json{{"classes", classes}});
    });

    auto* census_gd = census->add_subcommand("group-data", "normaliser data of a class");
    input.attach(census_gd);
    census_gd->add_option("--d-eff", d_eff, "effective degree (large twist)")->required();
    census_gd->add_option("--g", g, "genus")->required();
    census_gd->callback([&] {
        emit(to_json(group_data(reductive_class_from_json(input.load("class")), d_eff, Genus(g))));
    });

    // ---- jh ----
    auto* jh = app.add_subcommand("jh", "refined Jordan-Holder indices");
    auto* jh_enum = jh->add_subcommand("enumerate", "indices up to a codimension bound");
    jh_enum->add_option("--n", n, "rank")->required();
    jh_enum->add_option("--d", d, "degree")->required();
    jh_enum->add_option("--g", g, "genus")->required();
    jh_enum->add_option("--max-codim", max_codim, "codimension bound")->required();
    jh_enum->callback([&] {
        json indices = json::array();
        for (const JHIndex& x : enumerate_jh_indices(n, d, Genus(g), max_codim))
            indices.push_back(to_json(x));
        emit(json{{"indices", indices}});
    });

    auto* jh_validate = jh->add_subcommand("validate", "canonical representative of an index");
    input.attach(jh_validate);
    jh_validate->callback([&] {
        emit(to_json(validate_jh_index(jh_index_from_json(input.load("index")))));
    });

    auto* jh_codim_cmd = jh->add_subcommand("codim", "stratum codimension of an index");
    input.attach(jh_codim_cmd);
    jh_codim_cmd->add_option("--g", g, "genus")->required();
    jh_codim_cmd->add_option("--variant", variant, "statement (default) or proof");
    jh_codim_cmd->callback([&] {
        require_input(variant == "statement" || variant == "proof", "cli",
                      "--variant must be statement or proof");
        const JHIndex x = validate_jh_index(jh_index_from_json(input.load("index")));
        emit(json{{"codim", jh_codim(x, Genus(g),
                                     variant == "proof" ? CodimVariant::proof
                                                        : CodimVariant::statement)},
                  {"variant", variant}});
    });

    auto* jh_cmp = jh->add_subcommand("compare", "partial order on indices");
    input_a.attach(jh_cmp, "a");
    input_b.attach(jh_cmp, "b");
    jh_cmp->callback([&] {
        emit(to_json(jh_compare(validate_jh_index(jh_index_from_json(input_a.load("a"))),
                                validate_jh_index(jh_index_from_json(input_b.load("b"))))));
    });

    auto* jh_hasse = jh->add_subcommand("hasse", "covering relations of the index poset");
    jh_hasse->add_option("--n", n, "rank")->required();
    jh_hasse->add_option("--d", d, "degree")->required();
    jh_hasse->add_option("--g", g, "genus")->required();
    jh_hasse->add_option("--max-codim", max_codim, "codimension bound")->required();
    jh_hasse->add_option("--format", format, "dot or json");
    jh_hasse->callback([&] {
        emit_hasse(enumerate_jh_indices(n, d, Genus(g), max_codim),
                   [](const JHIndex& a, const JHIndex& b) { return jh_compare(a, b); }, format);
    });

    // ---- beta ----
    auto* beta = app.add_subcommand("beta", "Prop-5.1 index combinatorics");
    auto* beta_fp = beta->add_subcommand("from-partition", "beta vector of an indexed partition");
    input.attach(beta_fp);
    input_ws.attach(beta_fp, "ws");
    beta_fp->callback([&] {
        const WeightSystem ws = weight_system_from_json(input_ws.load("weight system"));
        emit(to_json(beta_from_partition(partition_from_json(input.load("partition")), ws)));
    });

    auto* beta_canon = beta->add_subcommand("canonicalize", "canonical form of a raw partition");
    input.attach(beta_canon);
    input_ws.attach(beta_canon, "ws");
    beta_canon->callback([&] {
        const WeightSystem ws = weight_system_from_json(input_ws.load("weight system"));
        emit(to_json(canonicalize_partition(raw_partition_from_json(input.load("partition")), ws)));
    });

    auto* beta_idx = beta->add_subcommand("of-index", "beta[n,m] of a one-block index");
    input.attach(beta_idx);
    beta_idx->add_option("--g", g, "genus")->required();
    beta_idx->add_option("--n", n, "ambient rank")->required();
    beta_idx->add_option("--d", d, "ambient degree")->required();
    beta_idx->callback([&] {
        const JHIndex x = validate_jh_index(jh_index_from_json(input.load("index")));
        require_input(x.total_rank() == n && x.total_degree() == d, "jh_beta",
                      "index rank/degree must match --n/--d");
        require_input(x.blocks.size() == 1, "jh_beta", "index must have a single block");
        std::vector<long long> mults, ranks;
        for (std::size_t i = 0; i < x.blocks[0].atom_ranks.size(); ++i) {
            long long row = 0;
            for (long long m : x.blocks[0].mult[i]) row += m;
            mults.push_back(row);
            ranks.push_back(x.blocks[0].atom_ranks[i]);
        }
        const WeightSystem ws = build_weight_system(Genus(g), n, d, mults, ranks);
        emit(to_json(beta_of_jh_index(x, ws)));
    });

    auto* beta_verify = beta->add_subcommand("verify", "certificate check of beta data");
    input.attach(beta_verify);
    input_ws.attach(beta_verify, "ws");
    beta_verify->callback([&] {
        const WeightSystem ws = weight_system_from_json(input_ws.load("weight system"));
        emit(to_json(verify_beta(beta_data_from_json(input.load("beta data"), ws), ws)));
    });

    auto* beta_mn = beta->add_subcommand("minnorm", "minimum-norm point in a hull");
    input.attach(beta_mn);
    beta_mn->callback([&] {
        emit(to_json(min_norm_point(point_set_from_json(input.load("point set")))));
    });

    auto* beta_pr = beta->add_subcommand("pivot-range", "admissible pivot starts");
    input.attach(beta_pr);
    input_ws.attach(beta_pr, "ws");
    beta_pr->callback([&] {
        const WeightSystem ws = weight_system_from_json(input_ws.load("weight system"));
        const BetaData bd = beta_data_from_json(input.load("beta data"), ws);
        const auto [lo, hi] = pivot_range(bd);
        emit(json{{"hi", hi}, {"lo", lo}});
    });

    // ---- filt ----
    auto* filt = app.add_subcommand("filt", "symbolic filtration calculus");
    auto* filt_gr = filt->add_subcommand("gr", "associated graded multiset");
    input.attach(filt_gr);
    filt_gr->callback([&] {
        emit(json{{"summands", to_json(gr_of(filt_spec_from_json(input.load("filtration"))))}});
    });

    auto* filt_sum = filt->add_subcommand("sum", "direct sum of filtrations");
    input_a.attach(filt_sum, "a");
    input_b.attach(filt_sum, "b");
    filt_sum->add_option("--mode", mode, "max (default) or min")->required();
    filt_sum->callback([&] {
        require_input(mode == "max" || mode == "min", "cli", "--mode must be max or min");
        emit(to_json(direct_sum(filt_spec_from_json(input_a.load("a")),
                                filt_spec_from_json(input_b.load("b")),
                                mode == "max" ? SumMode::max : SumMode::min)));
    });

    auto* filt_dual = filt->add_subcommand("dual", "dual filtration");
    input.attach(filt_dual);
    filt_dual->callback([&] {
        emit(to_json(dualize(filt_spec_from_json(input.load("filtration")))));
    });

    auto* filt_merge = filt->add_subcommand("merge", "balanced merge of two filtrations");
    input_a.attach(filt_merge, "a");
    input_b.attach(filt_merge, "b");
    filt_merge->callback([&] {
        const MergeResult r = balanced_merge(delta_filt_from_json(input_a.load("a")),
                                             delta_filt_from_json(input_b.load("b")));
        emit(json{{"amalgamated", r.amalgamated}, {"filt", to_json(r.filt)}});
    });

    auto* filt_classify = filt->add_subcommand("classify", "balancedness, triviality, pivots");
    input.attach(filt_classify);
    auto* gopt = filt_classify->add_option("--g", g, "genus context for |beta|^2");
    filt_classify->callback([&] {
        std::optional<Genus> genus;
        if (gopt->count() > 0) genus = Genus(g);
        emit(to_json(classify(delta_filt_from_json(input.load("filtration")), genus)));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit(json{{"error", {{"code", "cli"}, {"message", e.what()}}}});
        return 1;
    } catch (const input_error& e) {
        emit(json{{"error", {{"code", e.code()}, {"message", e.what()}}}});
        return 1;
    } catch (const std::exception& e) {
        emit(json{{"error", {{"code", "internal"}, {"message", e.what()}}}});
        return 2;
    }
    return 0;
}
