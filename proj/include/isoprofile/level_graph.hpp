#pragma once

#include "isoprofile/rational.hpp"
#include "isoprofile/report.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace isoprofile::level_graph {

// raw, unvalidated input
struct GraphDescription {
    struct VertexSpec {
        std::string id;
        std::int64_t f = 0;
    };
    struct EdgeSpec {
        std::string id;  // optional; "e<k>" when empty
        std::string src;  // vertex id or "-inf"
        std::string dst;  // vertex id or "+inf"
    };
    std::vector<VertexSpec> vertices;
    std::vector<EdgeSpec> edges;
    std::optional<int> nu;
};

GraphDescription parse_description(const Json& j);
GraphDescription load_description(const std::string& path);
Json to_json(const GraphDescription& d);

struct Endpoint {
    enum class Kind { vertex, minus_infinity, plus_infinity };
    Kind kind = Kind::vertex;
    std::size_t vertex = 0;

    bool is_vertex() const { return kind == Kind::vertex; }
};

struct Vertex {
    std::string id;
    std::int64_t f = 0;
    std::vector<std::size_t> in;
    std::vector<std::size_t> out;

    bool is_split() const { return in.size() == 1; }
};

struct Edge {
    std::string id;
    Endpoint source;
    Endpoint target;
};

class LevelGraph {
public:
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    // number of edges crossing level 1/2
    std::size_t crossing_count() const { return n_; }
    int nu() const { return nu_; }
    bool levels_all_disconnected() const { return disconnected_; }

    // source value as a level; -inf endpoints are reported as nullopt
    std::optional<std::int64_t> source_value(std::size_t e) const;
    std::optional<std::int64_t> target_value(std::size_t e) const;
    // edges crossing the regular level t (t must avoid every vertex value)
    std::vector<std::size_t> crossing(const Rational& t) const;
    // regular levels probed by validation: min-1/2, every half-integer in between, max+1/2
    std::vector<Rational> regular_levels() const;
    std::optional<std::size_t> vertex_index(const std::string& id) const;

private:
    friend LevelGraph validate_graph(const GraphDescription& d);

    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::size_t n_ = 0;
    int nu_ = 1;
    bool disconnected_ = false;
};

LevelGraph validate_graph(const GraphDescription& d);

// exact positive weight per edge
class Weighting {
public:
    Weighting() = default;
    explicit Weighting(std::vector<Rational> w) : w_(std::move(w)) {}

    const Rational& operator[](std::size_t e) const { return w_.at(e); }
    std::size_t size() const { return w_.size(); }
    const std::vector<Rational>& values() const { return w_; }
    // test hook: overwrite one weight
    void set(std::size_t e, Rational w) { w_.at(e) = std::move(w); }

private:
    std::vector<Rational> w_;
};

Weighting assign_weights(const LevelGraph& g);

// phi(n) = 16^{n(|n|+nu)}, kept as the integer exponent of 16
class LevelValue {
public:
    LevelValue() = default;
    explicit LevelValue(std::int64_t exponent16) : exponent_(exponent16) {}

    std::int64_t exponent16() const { return exponent_; }
    Rational exact() const { return pow16(exponent_); }
    long double linear() const;
    long double log_value() const;

    friend bool operator==(LevelValue a, LevelValue b) { return a.exponent_ == b.exponent_; }
    friend auto operator<=>(LevelValue a, LevelValue b) { return a.exponent_ <=> b.exponent_; }

private:
    std::int64_t exponent_ = 0;
};

LevelValue phi(std::int64_t n, int nu);
// least nu >= 1 with N <= 2^nu
int default_nu(std::size_t n);
// one value per vertex; nu defaults to g.nu()
std::vector<LevelValue> renormalize_levels(const LevelGraph& g, std::optional<int> nu = {});

// lower bounds on every edge: weight >= (1/N) 2^{-|f(p'')|-1} and weight*u(p'') >= 8 u(p)
VerificationReport check_weight_bounds(const LevelGraph& g, const Weighting& w,
                                       const std::vector<LevelValue>& u);
// per-level sums equal to 1, plus local recursion checks that pinpoint a bad edge
VerificationReport check_level_sums(const LevelGraph& g, const Weighting& w);

struct RandomGraphOptions {
    std::size_t max_vertices = 40;
    bool all_levels_disconnected = false;
};

GraphDescription random_graph(std::mt19937_64& rng, const RandomGraphOptions& opt = {});

// a few fixed graphs used in tests and by the CLI
GraphDescription two_parallel_ends();
GraphDescription triply_punctured_sphere();

Json to_json(const LevelGraph& g, const Weighting& w, const std::vector<LevelValue>& u);

}  // namespace isoprofile::level_graph
