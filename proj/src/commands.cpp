#include "ptune/commands.hpp"

#include "ptune/datasets.hpp"
#include "ptune/polygon.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace ptune {

Json OracleReport::to_json() const
{
    Rational rate = samples == 0 ? Rational(1)
                                 : make_rational(static_cast<std::int64_t>(agreements), static_cast<std::int64_t>(samples));
    return {{"regions", regions},
            {"samples", samples},
            {"agreements", agreements},
            {"agreement_rate", encode(rate)},
            {"passed", passed()}};
}

namespace {

Json header(const char* command)
{
    return {{"schema_version", schema_version}, {"command", command}};
}

Json encode_merges(const std::vector<ClusterPair>& merges)
{
    Json out = Json::array();
    for (const auto& [a, b] : merges) {
        out.push_back({a, b});
    }
    return out;
}

} // namespace

Json cluster_regions(const ClusteringInstance& inst, const MergeFamily& fam, const RunOptions& opts,
                     OracleReport* oracle)
{
    inst.validate();
    const std::size_t d = fam.dimension();
    ConvexCell parent = d == 0 ? ConvexCell{0, {}, Vec{}} : simplex_cell(d);
    ExecutionTreeNode root = build_execution_tree(inst, fam, parent);
    auto leaves = collect_leaves(root);
    const bool scored = !inst.target.empty();

    Json doc = header("cluster-regions");
    doc["family"] = encode(fam);
    doc["dimension"] = d;
    doc["parent"] = encode(parent);
    Json regions = Json::array();
    std::optional<std::size_t> best;
    std::vector<Rational> losses;
    for (std::size_t k = 0; k < leaves.size(); ++k) {
        const auto* leaf = leaves[k];
        Json r{{"label", Json::array({k})}, {"cell", encode(leaf->region)}, {"merges", encode_merges(leaf->merges)}};
        if (scored) {
            Rational loss = hamming_loss(ClusterTree{inst.size(), leaf->merges}, inst.target, inst.k);
            r["loss"] = encode(loss);
            if (!best || loss < losses[*best]) {
                best = k;
            }
            losses.push_back(std::move(loss));
        }
        regions.push_back(std::move(r));
    }
    doc["regions"] = std::move(regions);
    if (best) {
        const auto* leaf = leaves[*best];
        doc["best"] = {{"label", Json::array({*best})},
                       {"rho", leaf->region.witness ? encode(*leaf->region.witness) : Json::array()},
                       {"loss", encode(losses[*best])},
                       {"accuracy", encode(1 - losses[*best])}};
    }

    if (opts.oracle) {
        OracleReport rep;
        for (const auto* leaf : leaves) {
            ++rep.regions;
            for (const auto& rho : interior_samples(leaf->region, opts.oracle_density, opts.seed)) {
                ++rep.samples;
                rep.agreements += simulate_linkage(inst, fam, rho).merges == leaf->merges;
            }
        }
        doc["oracle"] = rep.to_json();
        if (oracle) {
            *oracle = rep;
        }
    }
    return doc;
}

AlignMethod parse_align_method(std::string_view name)
{
    if (name == "dag") return AlignMethod::dag;
    if (name == "ray") return AlignMethod::ray;
    if (name == "both") return AlignMethod::both;
    throw std::invalid_argument("unknown alignment method: " + std::string(name));
}

std::vector<Rational> angular_breaks(const AlignmentPartition& partition)
{
    if (partition.domain.dimension != 2) {
        throw std::invalid_argument("angular partitions need two features");
    }
    struct Span {
        Rational lo, hi;
        const std::vector<std::int64_t>* features;
    };
    std::vector<Span> spans;
    for (const auto& piece : partition.pieces) {
        std::optional<Rational> lo, hi;
        for (const auto& v : polygon_vertices(piece.cell)) {
            Rational total = v[0] + v[1];
            if (sgn(total) == 0) {
                continue;
            }
            Rational s = v[0] / total;
            if (!lo || s < *lo) lo = s;
            if (!hi || s > *hi) hi = s;
        }
        if (lo && *lo < *hi) {
            spans.push_back({*lo, *hi, &piece.alignment.features});
        }
    }
    std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
        return std::tie(a.lo, a.hi) < std::tie(b.lo, b.hi);
    });
    std::vector<Rational> out;
    for (std::size_t k = 1; k < spans.size(); ++k) {
        if (*spans[k].features != *spans[k - 1].features && (out.empty() || out.back() != spans[k].lo)) {
            out.push_back(spans[k].lo);
        }
    }
    return out;
}

Json align_regions(const AlignmentSpec& spec, const std::string& s1, const std::string& s2, const Rational& box,
                   AlignMethod method, const RunOptions& opts, OracleReport* oracle)
{
    spec.validate();
    ConvexCell domain = alignment_domain(spec.dimension(), box);
    if (method != AlignMethod::dag && spec.dimension() != 2) {
        throw std::invalid_argument("ray search needs a spec with exactly two features");
    }

    Json doc = header("align-regions");
    doc["spec"] = encode(spec);
    doc["s1"] = s1;
    doc["s2"] = s2;
    doc["dimension"] = spec.dimension();
    doc["parent"] = encode(domain);
    doc["method"] = method == AlignMethod::dag ? "dag" : method == AlignMethod::ray ? "ray" : "both";

    std::optional<AlignmentPartition> dag;
    std::optional<RaySearchResult> rays;
    if (method != AlignMethod::ray) {
        DagStats stats;
        dag = build_execution_dag(spec, s1, s2, domain, &stats);
        doc["dag_stats"] = {{"nodes", stats.nodes}, {"overlay_cells", stats.overlay_cells}, {"max_pieces", stats.max_pieces}};
    }
    if (method != AlignMethod::dag) {
        rays = ray_search_2d(spec, s1, s2);
        Json sectors = Json::array();
        for (const auto& a : rays->alignments) {
            sectors.push_back(encode(a));
        }
        Json breaks = Json::array();
        for (const auto& b : rays->breaks) {
            breaks.push_back(encode(b));
        }
        doc["ray_search"] = {{"breaks", std::move(breaks)}, {"alignments", std::move(sectors)}, {"dp_solves", rays->dp_solves}};
    }
    if (dag && rays) {
        doc["ray_search"]["agrees_with_dag"] = angular_breaks(*dag) == rays->breaks;
    }

    const AlignmentPartition part = dag ? *dag : rays->to_partition(domain);
    Json regions = Json::array();
    for (std::size_t k = 0; k < part.pieces.size(); ++k) {
        const auto& p = part.pieces[k];
        regions.push_back({{"label", Json::array({k})},
                           {"component", p.component},
                           {"cell", encode(p.cell)},
                           {"alignment", encode(p.alignment)}});
    }
    doc["regions"] = std::move(regions);
    doc["logical_regions"] = part.logical_count();

    if (opts.oracle) {
        OracleReport rep;
        for (const auto& p : part.pieces) {
            ++rep.regions;
            for (const auto& rho : interior_samples(p.cell, opts.oracle_density, opts.seed)) {
                ++rep.samples;
                rep.agreements += dp_solve(spec, s1, s2, rho).cost[0] == p.alignment.cost(rho);
            }
        }
        doc["oracle"] = rep.to_json();
        if (oracle) {
            *oracle = rep;
        }
    }
    return doc;
}

Json tariff_regions(const TariffInstance& inst, const RunOptions& opts, OracleReport* oracle)
{
    inst.validate();
    Subdivision s = compute_price_regions(inst, opts.seed);
    Json doc = header("tariff-regions");
    Json sub = encode(s);
    for (auto it = sub.begin(); it != sub.end(); ++it) {
        doc[it.key()] = it.value();
    }
    doc["instance"] = encode(inst);
    for (auto& r : doc["regions"]) {
        PurchaseProfile profile = label_profile(decode_tag(r["label"]));
        Json prof = Json::array();
        for (const auto& b : profile) {
            prof.push_back({{"quantity", b.quantity}, {"tariff", b.tariff}});
        }
        r["profile"] = std::move(prof);
        r["revenue_form"] = encode(revenue_form(inst, profile));
    }
    if (inst.menu_length == 1) {
        auto rep = check_piece_bound(inst, s);
        doc["piece_bound"] = {{"regions", rep.regions},
                              {"adjacencies", rep.adjacencies},
                              {"constant", encode(rep.constant)},
                              {"bound", encode(rep.bound)},
                              {"holds", rep.holds},
                              {"sample_lines", Json(rep.sample_lines)},
                              {"line_bound", rep.line_bound},
                              {"lines_hold", rep.lines_hold}};
    }
    if (opts.oracle) {
        OracleReport rep;
        for (const auto& [label, cell] : s.cells) {
            ++rep.regions;
            for (const auto& p : interior_samples(cell, opts.oracle_density, opts.seed)) {
                ++rep.samples;
                rep.agreements += profile_label(purchase_profile(inst, p)) == label;
            }
        }
        doc["oracle"] = rep.to_json();
        if (oracle) {
            *oracle = rep;
        }
    }
    return doc;
}

Json tariff_optimize(const TariffInstance& inst, const RunOptions& opts)
{
    inst.validate();
    Subdivision s = compute_price_regions(inst, opts.seed);
    RevenueOptimum best = maximize_revenue(inst, s, opts.seed);
    Json doc = header("tariff-optimize");
    doc["prices"] = encode(best.prices);
    doc["revenue"] = encode(best.revenue);
    doc["region_label"] = encode(best.label);
    return doc;
}

Json dataset_document(std::string_view name, std::uint64_t seed, std::size_t per_component)
{
    Json doc = header("gen-dataset");
    Json inst = encode(generate_dataset(name, seed, per_component));
    for (auto it = inst.begin(); it != inst.end(); ++it) {
        doc[it.key()] = it.value();
    }
    doc["dataset"] = std::string(name);
    doc["seed"] = seed;
    return doc;
}

std::string plot_csv(const Json& doc)
{
    if (!doc.is_object() || !doc.contains("regions")) {
        throw ParseError("document has no regions");
    }
    std::ostringstream out;
    out << "region,label,vertex,x,y,x_exact,y_exact\n";
    out << std::setprecision(17);
    std::size_t index = 0;
    for (const auto& r : doc.at("regions")) {
        ConvexCell cell = decode_cell(r.at("cell"));
        if (cell.dimension != 2) {
            throw std::invalid_argument("plot-data needs 2D regions");
        }
        auto loop = polygon_vertices(cell);
        std::string label;
        for (const auto& part : r.at("label")) {
            label += (label.empty() ? "" : ":") + part.dump();
        }
        for (std::size_t v = 0; v < loop.size(); ++v) {
            out << index << ',' << label << ',' << v << ',' << to_double(loop[v][0]) << ',' << to_double(loop[v][1])
                << ',' << to_pq_string(loop[v][0]) << ',' << to_pq_string(loop[v][1]) << '\n';
        }
        index += !loop.empty();
    }
    return out.str();
}

namespace {

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

Json load_json(const std::string& path)
{
    return parse_json_text(read_text_file(path));
}

struct ClusterArgs {
    std::string input, dataset, linkages, metrics;
    std::size_t per = 50;
};

struct AlignArgs {
    std::string input, spec, s1, s2, method = "dag", box = "1";
    bool s1_set = false, s2_set = false;
};

struct TariffArgs {
    std::string input;
    std::size_t menu = 0;
};

std::pair<ClusteringInstance, MergeFamily> load_clustering(const ClusterArgs& a, std::uint64_t seed)
{
    Json doc;
    ClusteringInstance inst;
    if (!a.dataset.empty()) {
        inst = generate_dataset(a.dataset, seed, a.per);
    } else {
        if (a.input.empty()) {
            throw ParseError("an instance file or --dataset is required");
        }
        doc = load_json(a.input);
        inst = decode_clustering(doc);
    }
    MergeFamily fam{{Linkage::single, Linkage::complete}};
    if (doc.is_object() && doc.contains("family")) {
        fam = decode_family(doc.at("family"));
    }
    if (!a.linkages.empty()) {
        fam.linkages.clear();
        for (const auto& l : split_list(a.linkages)) {
            fam.linkages.push_back(parse_linkage(l));
        }
    }
    if (!a.metrics.empty()) {
        fam.metrics.clear();
        for (const auto& m : split_list(a.metrics)) {
            fam.metrics.push_back(static_cast<std::size_t>(std::stoul(m)));
        }
    }
    for (auto m : fam.metrics) {
        if (m >= inst.metrics.size()) {
            throw std::invalid_argument("family refers to a missing metric");
        }
    }
    return {std::move(inst), std::move(fam)};
}

struct AlignInput {
    AlignmentSpec spec;
    std::string s1, s2;
    Rational box;
    AlignMethod method;
};

AlignInput load_alignment(const AlignArgs& a)
{
    AlignInput in{preset_spec("mismatch-space"), {}, {}, 0, parse_align_method(a.method)};
    try {
        in.box = parse_rational(a.box);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("--box: ") + e.what());
    }
    std::optional<Json> doc;
    if (!a.input.empty()) {
        std::string text = read_text_file(a.input);
        auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && text[first] == '{') {
            doc = parse_json_text(text);
            in.s1 = doc->value("s1", std::string());
            in.s2 = doc->value("s2", std::string());
        } else {
            std::tie(in.s1, in.s2) = parse_sequences(text);
        }
    } else if (!a.s1_set || !a.s2_set) {
        throw ParseError("give an input file or both --s1 and --s2");
    }
    if (a.s1_set) in.s1 = a.s1;
    if (a.s2_set) in.s2 = a.s2;
    if (!a.spec.empty()) {
        auto presets = preset_names();
        if (std::find(presets.begin(), presets.end(), a.spec) != presets.end()) {
            in.spec = preset_spec(a.spec);
        } else {
            in.spec = decode_alignment_spec(load_json(a.spec));
        }
    } else if (doc && doc->contains("spec")) {
        in.spec = decode_alignment_spec(doc->at("spec"));
    }
    return in;
}

TariffInstance load_tariff(const TariffArgs& a)
{
    TariffInstance inst = decode_tariff(load_json(a.input));
    if (a.menu > 0) {
        inst.menu_length = a.menu;
    }
    return inst;
}

void emit(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << text;
    } else {
        write_text_file(path, text);
    }
}

std::uint64_t default_seed()
{
    if (const char* env = std::getenv(seed_env_var)) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ParseError(std::string(seed_env_var) + " is not an unsigned integer");
        }
    }
    return 1;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact parameter-space partitions for linkage clustering, sequence alignment and two-part tariffs"};
    app.require_subcommand(1);

    RunOptions opts;
    std::string output;
    std::string seed_text;
    auto common = [&](CLI::App* sub, bool oracle) {
        sub->add_option("-o,--output", output, "Output file (default: stdout)");
        sub->add_option("--seed", seed_text, std::string("Seed (default: $") + seed_env_var + " or 1)");
        if (oracle) {
            sub->add_flag("--oracle-check", opts.oracle, "Compare every region with direct evaluation");
            sub->add_option("--density", opts.oracle_density, "Oracle samples per axis")->check(CLI::PositiveNumber);
        }
    };

    ClusterArgs ca;
    auto add_cluster = [&](CLI::App* sub) {
        sub->add_option("instance", ca.input, "Clustering instance JSON");
        sub->add_option("--dataset", ca.dataset, "Generate a synthetic dataset instead of reading a file");
        sub->add_option("--per", ca.per, "Points per generating shape for --dataset");
        sub->add_option("--linkages", ca.linkages, "Comma-separated linkages (default: single,complete)");
        sub->add_option("--metrics", ca.metrics, "Comma-separated metric indices (default: 0)");
    };
    AlignArgs aa;
    auto add_align = [&](CLI::App* sub) {
        sub->add_option("input", aa.input, "JSON {s1, s2, spec} or two sequences (FASTA or plain lines)");
        sub->add_option("--spec", aa.spec, "Preset name or spec JSON file (default: the input's spec, else mismatch-space)");
        sub->add_option("--s1", aa.s1, "First sequence")->each([&](const std::string&) { aa.s1_set = true; });
        sub->add_option("--s2", aa.s2, "Second sequence")->each([&](const std::string&) { aa.s2_set = true; });
        sub->add_option("--method", aa.method, "dag, ray or both")->check(CLI::IsMember({"dag", "ray", "both"}));
        sub->add_option("--box", aa.box, "Upper bound on every parameter");
    };
    TariffArgs ta;
    auto add_tariff = [&](CLI::App* sub) {
        sub->add_option("instance", ta.input, "Tariff instance JSON")->required();
        sub->add_option("--menu", ta.menu, "Menu length L (overrides the file)")->check(CLI::PositiveNumber);
    };

    auto* cluster = app.add_subcommand("cluster-regions", "Execution-tree regions of a linkage family");
    common(cluster, true);
    add_cluster(cluster);
    auto* align = app.add_subcommand("align-regions", "Optimal-alignment regions of an alignment DP");
    common(align, true);
    add_align(align);
    auto* tregions = app.add_subcommand("tariff-regions", "Purchase-profile regions of a tariff instance");
    common(tregions, true);
    add_tariff(tregions);
    auto* topt = app.add_subcommand("tariff-optimize", "Revenue-maximizing tariff or menu");
    common(topt, false);
    add_tariff(topt);

    auto* gen = app.add_subcommand("gen-dataset", "Write a synthetic clustering instance");
    common(gen, false);
    std::string gen_name;
    std::size_t gen_per = 50;
    gen->add_option("name", gen_name, "Rings, Disks, Outliers or BalancedOutliers")->required();
    gen->add_option("--per", gen_per, "Points per generating shape");

    auto* plot = app.add_subcommand("plot-data", "Polygon vertex loops of a 2D regions file as CSV");
    common(plot, false);
    std::string plot_input;
    plot->add_option("regions", plot_input, "Regions JSON")->required();

    auto* check = app.add_subcommand("oracle-check", "Run a region computation and verify it by direct evaluation");
    common(check, false);
    std::string kind;
    check->add_option("kind", kind, "cluster, align or tariff")->required()->check(CLI::IsMember({"cluster", "align", "tariff"}));
    check->add_option("--density", opts.oracle_density, "Oracle samples per axis")->check(CLI::PositiveNumber);
    check->add_option("instance", ca.input, "Instance file");
    check->add_option("--dataset", ca.dataset, "Synthetic dataset for cluster checks");
    check->add_option("--per", ca.per, "Points per generating shape for --dataset");
    check->add_option("--linkages", ca.linkages, "Comma-separated linkages");
    check->add_option("--metrics", ca.metrics, "Comma-separated metric indices");
    check->add_option("--spec", aa.spec, "Alignment preset or spec file");
    check->add_option("--s1", aa.s1, "First sequence")->each([&](const std::string&) { aa.s1_set = true; });
    check->add_option("--s2", aa.s2, "Second sequence")->each([&](const std::string&) { aa.s2_set = true; });
    check->add_option("--menu", ta.menu, "Menu length")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_parse_error;
    }

    try {
        if (seed_text.empty()) {
            opts.seed = default_seed();
        } else if (seed_text.find_first_not_of("0123456789") != std::string::npos) {
            throw ParseError("--seed must be an unsigned integer");
        } else {
            opts.seed = std::stoull(seed_text);
        }
        OracleReport rep;
        Json doc;
        if (cluster->parsed()) {
            auto [inst, fam] = load_clustering(ca, opts.seed);
            doc = cluster_regions(inst, fam, opts, &rep);
        } else if (align->parsed()) {
            auto in = load_alignment(aa);
            doc = align_regions(in.spec, in.s1, in.s2, in.box, in.method, opts, &rep);
        } else if (tregions->parsed()) {
            doc = tariff_regions(load_tariff(ta), opts, &rep);
        } else if (topt->parsed()) {
            doc = tariff_optimize(load_tariff(ta), opts);
        } else if (gen->parsed()) {
            doc = dataset_document(gen_name, opts.seed, gen_per);
        } else if (plot->parsed()) {
            emit(plot_csv(load_json(plot_input)), output, out);
            return exit_ok;
        } else if (check->parsed()) {
            opts.oracle = true;
            Json full;
            if (kind == "cluster") {
                auto [inst, fam] = load_clustering(ca, opts.seed);
                full = cluster_regions(inst, fam, opts, &rep);
            } else if (kind == "align") {
                aa.input = ca.input;
                auto in = load_alignment(aa);
                full = align_regions(in.spec, in.s1, in.s2, in.box, in.method, opts, &rep);
            } else {
                ta.input = ca.input;
                if (ta.input.empty()) {
                    throw ParseError("tariff checks need an instance file");
                }
                full = tariff_regions(load_tariff(ta), opts, &rep);
            }
            doc = header("oracle-check");
            doc["kind"] = kind;
            doc["oracle"] = full.at("oracle");
        }
        emit(dump_canonical(doc), output, out);
        if (opts.oracle && !rep.passed()) {
            err << "oracle check failed: " << rep.agreements << " of " << rep.samples << " samples agree\n";
            return exit_oracle_failure;
        }
        return exit_ok;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return exit_parse_error;
    } catch (const std::invalid_argument& e) {
        err << "infeasible configuration: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace ptune
