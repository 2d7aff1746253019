#include "isoprofile/level_graph.hpp"

#include "isoprofile/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace isoprofile::level_graph {

namespace {

const Json& require(const Json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key))
        throw ParseError(where + ": missing \"" + key + "\"");
    return j.at(key);
}

std::string require_string(const Json& j, const char* key, const std::string& where)
{
    const Json& v = require(j, key, where);
    if (!v.is_string())
        throw ParseError(where + "/" + key + ": expected a string");
    return v.get<std::string>();
}

}  // namespace

GraphDescription parse_description(const Json& j)
{
    GraphDescription d;
    if (!j.is_object())
        throw ParseError("/: graph description must be an object");
    if (j.contains("vertices")) {
        const Json& vs = j.at("vertices");
        if (!vs.is_array())
            throw ParseError("/vertices: expected an array");
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const std::string where = "/vertices/" + std::to_string(i);
            GraphDescription::VertexSpec v;
            v.id = require_string(vs[i], "id", where);
            const Json& f = require(vs[i], "f", where);
            if (!f.is_number_integer())
                throw ParseError(where + "/f: expected an integer");
            v.f = f.get<std::int64_t>();
            d.vertices.push_back(std::move(v));
        }
    }
    const Json& es = require(j, "edges", "");
    if (!es.is_array())
        throw ParseError("/edges: expected an array");
    for (std::size_t i = 0; i < es.size(); ++i) {
        const std::string where = "/edges/" + std::to_string(i);
        GraphDescription::EdgeSpec e;
        e.src = require_string(es[i], "src", where);
        e.dst = require_string(es[i], "dst", where);
        if (es[i].contains("id")) {
            if (!es[i].at("id").is_string())
                throw ParseError(where + "/id: expected a string");
            e.id = es[i].at("id").get<std::string>();
        }
        d.edges.push_back(std::move(e));
    }
    if (j.contains("nu")) {
        if (!j.at("nu").is_number_integer())
            throw ParseError("/nu: expected an integer");
        d.nu = j.at("nu").get<int>();
    }
    return d;
}

GraphDescription load_description(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& ex) {
        throw ParseError(path + ": " + ex.what());
    }
    return parse_description(j);
}

Json to_json(const GraphDescription& d)
{
    Json j = Json::object();
    Json vs = Json::array();
    for (const auto& v : d.vertices)
        vs.push_back({{"id", v.id}, {"f", v.f}});
    Json es = Json::array();
    for (const auto& e : d.edges) {
        Json je = Json::object();
        if (!e.id.empty())
            je["id"] = e.id;
        je["src"] = e.src;
        je["dst"] = e.dst;
        es.push_back(std::move(je));
    }
    j["vertices"] = std::move(vs);
    j["edges"] = std::move(es);
    if (d.nu)
        j["nu"] = *d.nu;
    return j;
}

std::optional<std::int64_t> LevelGraph::source_value(std::size_t e) const
{
    const Endpoint& p = edges_.at(e).source;
    if (!p.is_vertex())
        return std::nullopt;
    return vertices_[p.vertex].f;
}

std::optional<std::int64_t> LevelGraph::target_value(std::size_t e) const
{
    const Endpoint& p = edges_.at(e).target;
    if (!p.is_vertex())
        return std::nullopt;
    return vertices_[p.vertex].f;
}

std::vector<std::size_t> LevelGraph::crossing(const Rational& t) const
{
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto lo = source_value(e);
        const auto hi = target_value(e);
        if ((!lo || Rational(*lo) < t) && (!hi || Rational(*hi) > t))
            out.push_back(e);
    }
    return out;
}

std::vector<Rational> LevelGraph::regular_levels() const
{
    if (vertices_.empty())
        return {Rational(1, 2)};
    std::int64_t lo = vertices_.front().f, hi = lo;
    for (const auto& v : vertices_) {
        lo = std::min(lo, v.f);
        hi = std::max(hi, v.f);
    }
    std::vector<Rational> levels;
    for (std::int64_t n = lo; n <= hi + 1; ++n)
        levels.emplace_back(2 * n - 1, 2);
    return levels;
}

std::optional<std::size_t> LevelGraph::vertex_index(const std::string& id) const
{
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (vertices_[i].id == id)
            return i;
    return std::nullopt;
}

int default_nu(std::size_t n)
{
    int nu = 1;
    while ((std::size_t{1} << nu) < n)
        ++nu;
    return nu;
}

LevelGraph validate_graph(const GraphDescription& d)
{
    LevelGraph g;
    std::map<std::string, std::size_t> index;
    for (const auto& v : d.vertices) {
        if (v.id == "-inf" || v.id == "+inf" || v.id.empty())
            throw MalformedGraph("reserved or empty vertex id '" + v.id + "'");
        if (!index.emplace(v.id, g.vertices_.size()).second)
            throw MalformedGraph("duplicate vertex id '" + v.id + "'");
        g.vertices_.push_back({v.id, v.f, {}, {}});
    }

    std::set<std::string> edge_ids;
    for (std::size_t k = 0; k < d.edges.size(); ++k) {
        const auto& spec = d.edges[k];
        Edge e;
        e.id = spec.id.empty() ? "e" + std::to_string(k) : spec.id;
        if (!edge_ids.insert(e.id).second)
            throw MalformedGraph("duplicate edge id '" + e.id + "'");
        if (spec.src == "-inf") {
            e.source.kind = Endpoint::Kind::minus_infinity;
        } else {
            auto it = index.find(spec.src);
            if (it == index.end())
                throw MalformedGraph("edge " + e.id + ": unknown source '" + spec.src + "'");
            e.source.vertex = it->second;
        }
        if (spec.dst == "+inf" || spec.dst == "inf") {
            e.target.kind = Endpoint::Kind::plus_infinity;
        } else {
            auto it = index.find(spec.dst);
            if (it == index.end())
                throw MalformedGraph("edge " + e.id + ": unknown target '" + spec.dst + "'");
            e.target.vertex = it->second;
        }
        if (e.source.is_vertex() && e.target.is_vertex() &&
            g.vertices_[e.source.vertex].f >= g.vertices_[e.target.vertex].f)
            throw MalformedGraph("edge " + e.id + " is not oriented by increasing value");
        if (e.source.is_vertex())
            g.vertices_[e.source.vertex].out.push_back(g.edges_.size());
        if (e.target.is_vertex())
            g.vertices_[e.target.vertex].in.push_back(g.edges_.size());
        g.edges_.push_back(std::move(e));
    }

    for (const auto& v : g.vertices_) {
        const auto in = v.in.size(), out = v.out.size();
        if (!((in == 1 && out == 2) || (in == 2 && out == 1)))
            throw TrivalenceViolation("vertex '" + v.id + "' has (in,out) degree (" +
                                      std::to_string(in) + "," + std::to_string(out) + ")");
    }

    std::vector<std::int64_t> values;
    for (const auto& v : g.vertices_)
        values.push_back(v.f);
    std::sort(values.begin(), values.end());
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] == values[i - 1])
            throw DuplicateCriticalValue("two vertices at value " + std::to_string(values[i]));
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] != values[i - 1] + 1)
            throw ValueGap("no vertex at value " + std::to_string(values[i - 1] + 1));
    if (!values.empty() && (values.front() > 1 || values.back() < 0))
        throw ValueGap("critical values [" + std::to_string(values.front()) + ", " +
                       std::to_string(values.back()) + "] avoid both 0 and 1");

    bool disconnected = true;
    for (const auto& t : g.regular_levels()) {
        const auto n = g.crossing(t).size();
        if (n == 0)
            throw EmptyLevel("no edge crosses level " + to_string(t));
        if (n < 2)
            disconnected = false;
    }
    g.disconnected_ = disconnected;
    g.n_ = g.crossing(Rational(1, 2)).size();

    if (d.nu) {
        if (*d.nu < 1)
            throw BadParameters("nu must be a positive integer");
        if (*d.nu < 63 && (std::size_t{1} << *d.nu) < g.n_)
            throw NuTooSmall("N=" + std::to_string(g.n_) + " exceeds 2^" + std::to_string(*d.nu));
        g.nu_ = *d.nu;
    } else {
        g.nu_ = default_nu(g.n_);
    }
    return g;
}

Weighting assign_weights(const LevelGraph& g)
{
    const auto& vs = g.vertices();
    std::vector<Rational> w(g.edges().size(), Rational(0));
    const Rational initial(1, static_cast<long>(g.crossing_count()));
    for (auto e : g.crossing(Rational(1, 2)))
        w[e] = initial;

    std::vector<std::size_t> order(vs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vs[a].f < vs[b].f; });

    // above 1/2: split halves, merge sums
    for (auto i : order) {
        const Vertex& v = vs[i];
        if (v.f < 1)
            continue;
        if (v.is_split()) {
            const Rational half = w[v.in[0]] / 2;
            for (auto e : v.out)
                w[e] = half;
        } else {
            w[v.out[0]] = w[v.in[0]] + w[v.in[1]];
        }
    }
    // below 1/2, in decreasing order: the mirror rule
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const Vertex& v = vs[*it];
        if (v.f > 0)
            continue;
        if (v.is_split()) {
            w[v.in[0]] = w[v.out[0]] + w[v.out[1]];
        } else {
            const Rational half = w[v.out[0]] / 2;
            for (auto e : v.in)
                w[e] = half;
        }
    }
    for (std::size_t e = 0; e < w.size(); ++e)
        if (sgn(w[e]) <= 0)
            throw MalformedGraph("edge " + g.edges()[e].id + " received no weight");
    return Weighting(std::move(w));
}

long double LevelValue::linear() const
{
    const long double bits = 4.0L * static_cast<long double>(exponent_);
    if (bits > 16000.0L)
        return HUGE_VALL;
    if (bits < -16000.0L)
        return 0.0L;
    return std::ldexp(1.0L, static_cast<int>(4 * exponent_));
}

long double LevelValue::log_value() const
{
    return static_cast<long double>(exponent_) * std::log(16.0L);
}

LevelValue phi(std::int64_t n, int nu)
{
    const std::int64_t mag = n < 0 ? -n : n;
    return LevelValue(n * (mag + nu));
}

std::vector<LevelValue> renormalize_levels(const LevelGraph& g, std::optional<int> nu)
{
    const int use = nu.value_or(g.nu());
    if (use < 1)
        throw BadParameters("nu must be a positive integer");
    if (use < 63 && (std::size_t{1} << use) < g.crossing_count())
        throw NuTooSmall("N=" + std::to_string(g.crossing_count()) + " exceeds 2^" +
                         std::to_string(use));
    std::vector<LevelValue> u;
    u.reserve(g.vertices().size());
    for (const auto& v : g.vertices())
        u.push_back(phi(v.f, use));
    return u;
}

namespace {

double log2_ratio(const Rational& a, const Rational& b)
{
    return static_cast<double>(log2_of(a) - log2_of(b));
}

}  // namespace

VerificationReport check_weight_bounds(const LevelGraph& g, const Weighting& w,
                                       const std::vector<LevelValue>& u)
{
    VerificationReport report("weight_bounds");
    const auto& vs = g.vertices();
    const Rational inv_n(1, static_cast<long>(g.crossing_count()));
    Json margins = Json::array();

    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const Edge& edge = g.edges()[e];
        // anchor: the target when finite, else the source, else the bi-infinite bound
        Rational bound;
        std::string anchor;
        if (edge.target.is_vertex()) {
            const auto f = vs[edge.target.vertex].f;
            bound = inv_n * pow2(-(f < 0 ? -f : f) - 1);
            anchor = vs[edge.target.vertex].id;
        } else if (edge.source.is_vertex()) {
            const auto f = vs[edge.source.vertex].f;
            bound = inv_n * pow2(-(f < 0 ? -f : f) - 1);
            anchor = vs[edge.source.vertex].id;
        } else {
            bound = inv_n / 2;
            anchor = "none";
        }
        const double m1 = log2_ratio(w[e], bound);
        report.add("weight_lower_bound[" + edge.id + "]", w[e] >= bound, m1, 0.0,
                   "anchor " + anchor + ", log2(weight/bound)");

        Json entry = Json::object();
        entry["edge"] = edge.id;
        entry["weight_margin_log2"] = m1;
        if (edge.target.is_vertex()) {
            // binding vertex: the largest u strictly below u(p'')
            const LevelValue top = u[edge.target.vertex];
            std::optional<std::size_t> binding;
            for (std::size_t p = 0; p < vs.size(); ++p)
                if (u[p] < top && (!binding || u[*binding] < u[p]))
                    binding = p;
            if (binding) {
                const Rational lhs = w[e] * top.exact();
                const Rational rhs = 8 * u[*binding].exact();
                const double m2 = log2_ratio(lhs, rhs);
                report.add("value_lower_bound[" + edge.id + "]", lhs >= rhs, m2, 0.0,
                           "against vertex " + vs[*binding].id + ", log2(w u''/(8 u))");
                entry["value_margin_log2"] = m2;
            } else {
                entry["value_margin_log2"] = "vacuous";
            }
        } else {
            entry["value_margin_log2"] = "vacuous";
        }
        margins.push_back(std::move(entry));
    }
    report.data()["margins"] = std::move(margins);
    return report;
}

VerificationReport check_level_sums(const LevelGraph& g, const Weighting& w)
{
    VerificationReport report("level_sums");
    for (const auto& t : g.regular_levels()) {
        Rational sum = 0;
        for (auto e : g.crossing(t))
            sum += w[e];
        report.add("level_sum[" + to_string(t) + "]", sum == 1, static_cast<double>(to_long_double(sum)),
                   0.0, "sum " + to_string(sum));
    }

    // local recursion: expected weight of each edge from its neighbours
    const auto& vs = g.vertices();
    const auto& es = g.edges();
    const Rational initial(1, static_cast<long>(g.crossing_count()));
    std::vector<bool> bad(es.size(), false);
    std::vector<std::vector<std::size_t>> parents(es.size());
    const auto crossing_half = g.crossing(Rational(1, 2));
    std::vector<bool> at_half(es.size(), false);
    for (auto e : crossing_half)
        at_half[e] = true;

    for (std::size_t e = 0; e < es.size(); ++e) {
        Rational expected;
        if (at_half[e]) {
            expected = initial;
        } else if (es[e].source.is_vertex() && vs[es[e].source.vertex].f >= 1) {
            const Vertex& v = vs[es[e].source.vertex];
            parents[e] = v.in;
            expected = v.is_split() ? Rational(w[v.in[0]] / 2) : Rational(w[v.in[0]] + w[v.in[1]]);
        } else {
            const Vertex& v = vs[es[e].target.vertex];
            parents[e] = v.out;
            expected = v.is_split() ? Rational(w[v.out[0]] + w[v.out[1]]) : Rational(w[v.out[0]] / 2);
        }
        bad[e] = w[e] != expected;
    }
    Json pinpointed = Json::array();
    for (std::size_t e = 0; e < es.size(); ++e) {
        if (!bad[e])
            continue;
        bool upstream_bad = false;
        for (auto p : parents[e])
            upstream_bad = upstream_bad || bad[p];
        if (!upstream_bad) {
            pinpointed.push_back(es[e].id);
            report.add("local_recursion[" + es[e].id + "]", false,
                       static_cast<double>(to_long_double(w[e])), 0.0,
                       "weight " + to_string(w[e]) + " breaks the split/merge rule");
        }
    }
    report.data()["pinpointed_edges"] = std::move(pinpointed);
    return report;
}

GraphDescription random_graph(std::mt19937_64& rng, const RandomGraphOptions& opt)
{
    const std::size_t cap = std::max<std::size_t>(2, opt.max_vertices);
    const std::size_t nv = std::uniform_int_distribution<std::size_t>(2, cap)(rng);
    const auto span = static_cast<std::int64_t>(nv);
    const std::int64_t lo = std::uniform_int_distribution<std::int64_t>(2 - span, 0)(rng);
    const std::size_t floor_active = opt.all_levels_disconnected ? 2 : 1;

    GraphDescription d;
    std::vector<std::string> active;  // source labels of the edges currently crossing the sweep
    const std::size_t start = std::uniform_int_distribution<std::size_t>(floor_active, floor_active + 2)(rng);
    active.assign(start, "-inf");

    std::vector<std::string> ids(nv);
    for (std::size_t i = 0; i < nv; ++i)
        ids[i] = "v" + std::to_string(i);
    std::shuffle(ids.begin(), ids.end(), rng);

    for (std::size_t i = 0; i < nv; ++i) {
        const std::string& id = ids[i];
        d.vertices.push_back({id, lo + static_cast<std::int64_t>(i)});
        const bool can_merge = active.size() >= floor_active + 1 && active.size() >= 2;
        const double p_merge = active.size() >= 8 ? 0.7 : 0.4;
        const bool merge = can_merge && std::bernoulli_distribution(p_merge)(rng);
        if (merge) {
            for (int k = 0; k < 2; ++k) {
                const std::size_t j = std::uniform_int_distribution<std::size_t>(0, active.size() - 1)(rng);
                d.edges.push_back({"", active[j], id});
                active.erase(active.begin() + static_cast<std::ptrdiff_t>(j));
            }
            active.push_back(id);
        } else {
            const std::size_t j = std::uniform_int_distribution<std::size_t>(0, active.size() - 1)(rng);
            d.edges.push_back({"", active[j], id});
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(j));
            active.push_back(id);
            active.push_back(id);
        }
    }
    for (const auto& src : active)
        d.edges.push_back({"", src, "+inf"});
    std::shuffle(d.edges.begin(), d.edges.end(), rng);
    for (std::size_t k = 0; k < d.edges.size(); ++k)
        d.edges[k].id = "e" + std::to_string(k);
    return d;
}

GraphDescription two_parallel_ends()
{
    GraphDescription d;
    d.edges.push_back({"A", "-inf", "+inf"});
    d.edges.push_back({"B", "-inf", "+inf"});
    return d;
}

GraphDescription triply_punctured_sphere()
{
    GraphDescription d;
    d.vertices.push_back({"p", 1});
    d.edges.push_back({"below", "-inf", "p"});
    d.edges.push_back({"left", "p", "+inf"});
    d.edges.push_back({"right", "p", "+inf"});
    return d;
}

Json to_json(const LevelGraph& g, const Weighting& w, const std::vector<LevelValue>& u)
{
    Json j = Json::object();
    j["N"] = g.crossing_count();
    j["nu"] = g.nu();
    j["levels_all_disconnected"] = g.levels_all_disconnected();
    Json vs = Json::array();
    for (std::size_t i = 0; i < g.vertices().size(); ++i) {
        const auto& v = g.vertices()[i];
        Json jv = Json::object();
        jv["id"] = v.id;
        jv["f"] = v.f;
        jv["kind"] = v.is_split() ? "split" : "merge";
        if (i < u.size()) {
            jv["u_exponent16"] = u[i].exponent16();
            jv["u"] = json_number(static_cast<double>(u[i].linear()));
        }
        vs.push_back(std::move(jv));
    }
    auto endpoint = [&](const Endpoint& p) -> std::string {
        switch (p.kind) {
        case Endpoint::Kind::minus_infinity: return "-inf";
        case Endpoint::Kind::plus_infinity: return "+inf";
        default: return g.vertices()[p.vertex].id;
        }
    };
    Json es = Json::array();
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const auto& edge = g.edges()[e];
        Json je = Json::object();
        je["id"] = edge.id;
        je["src"] = endpoint(edge.source);
        je["dst"] = endpoint(edge.target);
        if (e < w.size())
            je["weight"] = to_string(w[e]);
        es.push_back(std::move(je));
    }
    j["vertices"] = std::move(vs);
    j["edges"] = std::move(es);
    return j;
}

}  // namespace isoprofile::level_graph
