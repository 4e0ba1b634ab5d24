#include "ptune/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ptune {

namespace {

const Json& need(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

const Json& need_array(const Json& j, const char* what)
{
    if (!j.is_array()) {
        throw ParseError(std::string(what) + " must be an array");
    }
    return j;
}

template <class F>
auto guarded(F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }
}

std::size_t decode_index(const Json& j, const char* what)
{
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
        throw ParseError(std::string(what) + " must be a nonnegative integer");
    }
    return j.get<std::size_t>();
}

const char* case_names[dp_case_count] = {"origin", "row", "col", "match", "mismatch"};

} // namespace

Json encode(const Rational& r)
{
    return to_pq_string(r);
}

Json encode(const Vec& v)
{
    Json out = Json::array();
    for (const auto& x : v) {
        out.push_back(encode(x));
    }
    return out;
}

Json encode(const Tag& t)
{
    return Json(t.parts);
}

Json encode(const Halfspace& h)
{
    return {{"normal", encode(h.normal)}, {"offset", encode(h.offset)}, {"label", encode(h.label)}};
}

Json encode(const ConvexCell& c)
{
    std::vector<const Halfspace*> order;
    for (const auto& h : c.constraints) {
        order.push_back(&h);
    }
    std::sort(order.begin(), order.end(), [](const Halfspace* a, const Halfspace* b) {
        return std::tie(a->normal, a->offset, a->label) < std::tie(b->normal, b->offset, b->label);
    });
    Json cs = Json::array();
    for (const auto* h : order) {
        cs.push_back(encode(*h));
    }
    Json out{{"dimension", c.dimension}, {"constraints", std::move(cs)}};
    out["witness"] = c.witness ? encode(*c.witness) : Json();
    return out;
}

Json encode(const Subdivision& s)
{
    Json regions = Json::array();
    for (const auto& [label, cell] : s.cells) {
        regions.push_back({{"label", encode(label)}, {"cell", encode(cell)}});
    }
    Json adj = Json::array();
    for (const auto& [a, b] : s.adjacency) {
        adj.push_back({encode(a), encode(b)});
    }
    std::vector<Tag> degenerate = s.degenerate;
    std::sort(degenerate.begin(), degenerate.end());
    Json deg = Json::array();
    for (const auto& t : degenerate) {
        deg.push_back(encode(t));
    }
    return {{"dimension", s.parent.dimension},
            {"parent", encode(s.parent)},
            {"regions", std::move(regions)},
            {"adjacency", std::move(adj)},
            {"degenerate", std::move(deg)}};
}

Json encode(const ClusteringInstance& inst)
{
    Json pts = Json::array();
    for (const auto& p : inst.points) {
        pts.push_back(encode(p));
    }
    Json metrics = Json::array();
    for (std::size_t m = 0; m < inst.metrics.size(); ++m) {
        const std::string& name = inst.metric_names.at(m);
        if (!inst.points.empty() && (name == "euclidean" || name == "manhattan")) {
            metrics.push_back({{"name", name}, {"kind", name}});
            continue;
        }
        Json rows = Json::array();
        for (std::size_t i = 0; i < inst.metrics[m].size(); ++i) {
            Json row = Json::array();
            for (std::size_t j = 0; j < inst.metrics[m].size(); ++j) {
                row.push_back(encode(inst.metrics[m].at(i, j)));
            }
            rows.push_back(std::move(row));
        }
        metrics.push_back({{"name", name}, {"matrix", std::move(rows)}});
    }
    return {{"points", std::move(pts)}, {"metrics", std::move(metrics)}, {"target", Json(inst.target)}, {"k", inst.k}};
}

Json encode(const MergeFamily& fam)
{
    Json ls = Json::array();
    for (auto l : fam.linkages) {
        ls.push_back(to_string(l));
    }
    return {{"linkages", std::move(ls)}, {"metrics", Json(fam.metrics)}};
}

Json encode(const AlignmentSpec& spec)
{
    Json tables = Json::array();
    for (const auto& t : spec.tables) {
        Json cases = Json::object();
        for (std::size_t c = 0; c < dp_case_count; ++c) {
            Json terms = Json::array();
            for (const auto& term : t.cases[c]) {
                terms.push_back({{"weight", Json(term.weight)},
                                 {"table", term.table},
                                 {"di", term.di},
                                 {"dj", term.dj},
                                 {"transform", to_string(term.transform)}});
            }
            cases[case_names[c]] = std::move(terms);
        }
        tables.push_back({{"name", t.name}, {"cases", std::move(cases)}});
    }
    return {{"name", spec.name},
            {"features", Json(spec.features)},
            {"tables", std::move(tables)},
            {"final_table", spec.final_table}};
}

Json encode(const Alignment& a)
{
    return {{"t1", a.t1}, {"t2", a.t2}, {"features", Json(a.features)}};
}

Json encode(const TariffInstance& inst)
{
    Json vals = Json::array();
    for (const auto& v : inst.valuations) {
        vals.push_back(encode(v));
    }
    Json out{{"K", inst.K}, {"menu_length", inst.menu_length}, {"valuations", std::move(vals)}};
    if (inst.price_cap) {
        out["price_cap"] = encode(*inst.price_cap);
    }
    return out;
}

Rational decode_rational(const Json& j)
{
    try {
        if (j.is_string()) {
            return parse_rational(j.get<std::string>());
        }
        if (j.is_number_integer()) {
            return make_rational(j.get<std::int64_t>());
        }
        if (j.is_number_float()) {
            return parse_rational(j.dump());
        }
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    throw ParseError("expected a rational, got " + j.dump());
}

Vec decode_vec(const Json& j)
{
    need_array(j, "vector");
    Vec out;
    for (const auto& x : j) {
        out.push_back(decode_rational(x));
    }
    return out;
}

Tag decode_tag(const Json& j)
{
    return guarded([&] {
        need_array(j, "label");
        return Tag(j.get<std::vector<std::int64_t>>());
    });
}

Halfspace decode_halfspace(const Json& j)
{
    Halfspace h{decode_vec(need(j, "normal")), decode_rational(need(j, "offset")), {}};
    if (j.contains("label")) {
        h.label = decode_tag(j.at("label"));
    }
    if (is_zero(h.normal)) {
        throw ParseError("constraint with a zero normal");
    }
    return h;
}

ConvexCell decode_cell(const Json& j)
{
    ConvexCell c;
    c.dimension = decode_index(need(j, "dimension"), "dimension");
    for (const auto& h : need_array(need(j, "constraints"), "constraints")) {
        c.constraints.push_back(decode_halfspace(h));
        if (c.constraints.back().dimension() != c.dimension) {
            throw ParseError("constraint dimension does not match the cell");
        }
    }
    if (j.contains("witness") && !j.at("witness").is_null()) {
        c.witness = decode_vec(j.at("witness"));
        if (c.witness->size() != c.dimension) {
            throw ParseError("witness dimension does not match the cell");
        }
    }
    return c;
}

Subdivision decode_subdivision(const Json& j)
{
    Subdivision s;
    s.parent = decode_cell(need(j, "parent"));
    for (const auto& r : need_array(need(j, "regions"), "regions")) {
        Tag label = decode_tag(need(r, "label"));
        if (!s.cells.emplace(label, decode_cell(need(r, "cell"))).second) {
            throw ParseError("duplicate region label " + label.to_string());
        }
    }
    if (j.contains("adjacency")) {
        for (const auto& e : need_array(j.at("adjacency"), "adjacency")) {
            if (!e.is_array() || e.size() != 2) {
                throw ParseError("adjacency entries are label pairs");
            }
            Tag a = decode_tag(e[0]), b = decode_tag(e[1]);
            s.adjacency.emplace(std::min(a, b), std::max(a, b));
        }
    }
    if (j.contains("degenerate")) {
        for (const auto& t : need_array(j.at("degenerate"), "degenerate")) {
            s.degenerate.push_back(decode_tag(t));
        }
    }
    return s;
}

ClusteringInstance decode_clustering(const Json& j)
{
    return guarded([&] {
        ClusteringInstance inst;
        if (j.contains("points")) {
            for (const auto& p : need_array(j.at("points"), "points")) {
                inst.points.push_back(decode_vec(p));
            }
        }
        Json metrics = j.contains("metrics") ? j.at("metrics") : Json::array({{{"name", "euclidean"}, {"kind", "euclidean"}}});
        for (const auto& m : need_array(metrics, "metrics")) {
            std::string name = m.is_string() ? m.get<std::string>() : need(m, "name").get<std::string>();
            if (m.is_object() && m.contains("matrix")) {
                std::vector<std::vector<Rational>> rows;
                for (const auto& row : need_array(m.at("matrix"), "matrix")) {
                    rows.push_back(decode_vec(row));
                }
                try {
                    inst.metrics.emplace_back(rows);
                } catch (const std::invalid_argument& e) {
                    throw ParseError(e.what());
                }
            } else {
                std::string kind = m.is_object() && m.contains("kind") ? m.at("kind").get<std::string>() : name;
                if (inst.points.empty()) {
                    throw ParseError("metric \"" + name + "\" needs points");
                }
                if (kind == "euclidean") {
                    inst.metrics.push_back(euclidean_table(inst.points));
                } else if (kind == "manhattan") {
                    inst.metrics.push_back(manhattan_table(inst.points));
                } else {
                    throw ParseError("unknown metric kind \"" + kind + "\"");
                }
            }
            inst.metric_names.push_back(name);
        }
        if (j.contains("target")) {
            inst.target = j.at("target").get<std::vector<std::vector<std::size_t>>>();
        }
        inst.k = j.contains("k") ? decode_index(j.at("k"), "k") : inst.target.size();
        return inst;
    });
}

MergeFamily decode_family(const Json& j)
{
    return guarded([&] {
        MergeFamily fam;
        for (const auto& l : need_array(need(j, "linkages"), "linkages")) {
            try {
                fam.linkages.push_back(parse_linkage(l.get<std::string>()));
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what());
            }
        }
        if (j.contains("metrics")) {
            fam.metrics = j.at("metrics").get<std::vector<std::size_t>>();
        }
        if (fam.linkages.empty() || fam.metrics.empty()) {
            throw ParseError("family needs at least one linkage and one metric");
        }
        return fam;
    });
}

AlignmentSpec decode_alignment_spec(const Json& j)
{
    return guarded([&] {
        if (j.is_string()) {
            return preset_spec(j.get<std::string>());
        }
        if (j.contains("preset")) {
            return preset_spec(j.at("preset").get<std::string>());
        }
        AlignmentSpec spec;
        spec.name = j.value("name", std::string("custom"));
        spec.features = need(j, "features").get<std::vector<std::string>>();
        const Json& tables = need_array(need(j, "tables"), "tables");
        auto table_index = [&](const Json& ref) -> std::size_t {
            if (ref.is_string()) {
                for (std::size_t t = 0; t < tables.size(); ++t) {
                    if (tables[t].value("name", std::string()) == ref.get<std::string>()) {
                        return t;
                    }
                }
                throw ParseError("unknown table \"" + ref.get<std::string>() + "\"");
            }
            return decode_index(ref, "table");
        };
        for (const auto& t : tables) {
            DPTable table;
            table.name = need(t, "name").get<std::string>();
            const Json& cases = need(t, "cases");
            for (auto it = cases.begin(); it != cases.end(); ++it) {
                auto pos = std::find(std::begin(case_names), std::end(case_names), it.key());
                if (pos == std::end(case_names)) {
                    throw ParseError("unknown DP case \"" + it.key() + "\"");
                }
                auto& terms = table.cases[static_cast<std::size_t>(pos - std::begin(case_names))];
                for (const auto& term : need_array(it.value(), "case terms")) {
                    DPTerm d;
                    d.weight = need(term, "weight").get<std::vector<std::int64_t>>();
                    try {
                        d.transform = parse_transform(need(term, "transform").get<std::string>());
                    } catch (const std::invalid_argument& e) {
                        throw ParseError(e.what());
                    }
                    switch (d.transform) {
                    case Transform::extend_match:
                    case Transform::extend_mismatch: d.di = d.dj = 1; break;
                    case Transform::extend_space_1: d.di = 1; break;
                    case Transform::extend_space_2: d.dj = 1; break;
                    default: break;
                    }
                    if (term.contains("di")) d.di = decode_index(term.at("di"), "di");
                    if (term.contains("dj")) d.dj = decode_index(term.at("dj"), "dj");
                    if (term.contains("table")) d.table = table_index(term.at("table"));
                    terms.push_back(std::move(d));
                }
            }
            spec.tables.push_back(std::move(table));
        }
        spec.final_table = j.contains("final_table") ? table_index(j.at("final_table")) : spec.tables.size() - 1;
        return spec;
    });
}

TariffInstance decode_tariff(const Json& j)
{
    return guarded([&] {
        TariffInstance inst;
        for (const auto& v : need_array(need(j, "valuations"), "valuations")) {
            inst.valuations.push_back(decode_vec(v));
        }
        if (inst.valuations.empty()) {
            throw ParseError("no valuation samples");
        }
        inst.K = j.contains("K") ? decode_index(j.at("K"), "K") : inst.valuations.front().size();
        if (j.contains("menu_length")) {
            inst.menu_length = decode_index(j.at("menu_length"), "menu_length");
        }
        if (j.contains("price_cap") && !j.at("price_cap").is_null()) {
            inst.price_cap = decode_rational(j.at("price_cap"));
        }
        return inst;
    });
}

std::pair<std::string, std::string> parse_sequences(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<std::string> seqs;
    bool fasta = false;
    auto trim = [](std::string s) {
        s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
        return s;
    };
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (!t.empty() && t.front() == '>') {
            fasta = true;
            seqs.emplace_back();
            continue;
        }
        if (fasta) {
            seqs.back() += t;
        } else if (!t.empty()) {
            seqs.push_back(t);
        }
    }
    if (seqs.size() != 2) {
        throw ParseError("expected exactly two sequences, found " + std::to_string(seqs.size()));
    }
    return {seqs[0], seqs[1]};
}

std::string dump_canonical(const Json& j)
{
    return j.dump(2) + "\n";
}

Json parse_json_text(std::string_view text)
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

} // namespace ptune
