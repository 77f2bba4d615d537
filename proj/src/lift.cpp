#include "liftchroma/lift.hpp"
#include "liftchroma/errors.hpp"
#include "liftchroma/rng.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace liftchroma {

Lift sample_lift(const BaseGraph& g, int n, std::uint64_t seed)
{
    if (n < 1)
        throw std::invalid_argument("lift fiber size must be >= 1");
    Lift l{g, n, {}, seed};
    l.matchings.resize(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
        auto& p = l.matchings[e];
        p.resize(n);
        std::iota(p.begin(), p.end(), 0);
        Engine eng(derive_seed(seed, 0, static_cast<std::uint64_t>(e)));
        for (int i = n - 1; i > 0; --i)
            std::swap(p[i], p[uniform_below(eng, static_cast<std::uint64_t>(i) + 1)]);
    }
    return l;
}

Lift identity_lift(const BaseGraph& g, int n)
{
    if (n < 1)
        throw std::invalid_argument("lift fiber size must be >= 1");
    Lift l{g, n, {}, std::nullopt};
    std::vector<int> id(n);
    std::iota(id.begin(), id.end(), 0);
    l.matchings.assign(g.num_edges(), id);
    return l;
}

std::uint64_t lift_count(const BaseGraph& g, int n)
{
    constexpr auto top = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t fact = 1;
    for (int i = 2; i <= n; ++i) {
        if (fact > top / i)
            return top;
        fact *= i;
    }
    std::uint64_t total = 1;
    for (int e = 0; e < g.num_edges(); ++e) {
        if (fact != 0 && total > top / fact)
            return top;
        total *= fact;
    }
    return total;
}

void enumerate_lifts(const BaseGraph& g, int n, const std::function<void(const Lift&)>& visit,
                     std::uint64_t cap)
{
    std::uint64_t count = lift_count(g, n);
    if (count > cap)
        throw too_large_error("lift enumeration: " + std::to_string(count) +
                              " lifts exceed cap " + std::to_string(cap));
    Lift l = identity_lift(g, n);
    const int m = g.num_edges();
    for (;;) {
        visit(l);
        int e = m - 1;
        while (e >= 0 && !std::next_permutation(l.matchings[e].begin(), l.matchings[e].end()))
            --e; // next_permutation wrapped this edge back to identity
        if (e < 0)
            return;
    }
}

namespace {

LiftedGraph build(int base_vertices, int n, std::vector<Edge> edges, std::vector<int> edge_base)
{
    LiftedGraph lg;
    lg.base_vertices = base_vertices;
    lg.n = n;
    lg.adj.resize(static_cast<std::size_t>(base_vertices) * n);
    for (int id = 0; id < static_cast<int>(edges.size()); ++id) {
        auto [x, y] = edges[id];
        lg.adj[x].emplace_back(y, id);
        lg.adj[y].emplace_back(x, id);
    }
    lg.edges = std::move(edges);
    lg.edge_base = std::move(edge_base);
    return lg;
}

} // namespace

LiftedGraph expand(const Lift& l)
{
    const int n = l.n;
    std::vector<Edge> edges;
    std::vector<int> eb;
    edges.reserve(static_cast<std::size_t>(l.base.num_edges()) * n);
    for (int e = 0; e < l.base.num_edges(); ++e) {
        auto [t, h] = l.base.edges[e];
        for (int i = 0; i < n; ++i) {
            edges.emplace_back(t * n + i, h * n + l.matchings[e][i]);
            eb.push_back(e);
        }
    }
    return build(l.base.num_vertices, n, std::move(edges), std::move(eb));
}

LiftedGraph make_plain_graph(int num_vertices, const std::vector<Edge>& edges)
{
    for (auto [x, y] : edges)
        if (x < 0 || y < 0 || x >= num_vertices || y >= num_vertices)
            throw std::invalid_argument("plain graph: endpoint out of range");
    return build(1, num_vertices, edges, std::vector<int>(edges.size(), -1));
}

LiftedGraph make_cycle_graph(int len)
{
    std::vector<Edge> edges;
    for (int i = 0; i < len; ++i)
        edges.emplace_back(i, (i + 1) % len);
    return make_plain_graph(len, edges);
}

bool verify_covering(const LiftedGraph& lg, const BaseGraph& g)
{
    if (lg.base_vertices != g.num_vertices || lg.n < 1 ||
        lg.num_vertices() != g.num_vertices * lg.n)
        return false;
    auto a = adjacency_matrix(g);
    std::vector<int> seen(g.num_vertices);
    for (int x = 0; x < lg.num_vertices(); ++x) {
        int v = lg.fiber_of(x);
        std::fill(seen.begin(), seen.end(), 0);
        for (auto [y, e] : lg.adj[x]) {
            if (y == x)
                return false;
            ++seen[lg.fiber_of(y)];
        }
        // neighbour-fiber multiset must equal the base neighbourhood
        for (int w = 0; w < g.num_vertices; ++w)
            if (seen[w] != a[v][w])
                return false;
    }
    return true;
}

namespace {

struct CycleCounter {
    const LiftedGraph& lg;
    int j;
    int start = 0;
    int first_edge = -1;
    std::vector<char> on_path;
    std::uint64_t count = 0;

    void extend(int u, int last_edge, int len)
    {
        for (auto [w, e] : lg.adj[u]) {
            if (e == last_edge)
                continue;
            if (len == j - 1) {
                // closing edge; orientation fixed by first edge id < closing edge id
                if (w == start && e > first_edge)
                    ++count;
                continue;
            }
            if (w <= start || on_path[w])
                continue;
            on_path[w] = 1;
            extend(w, e, len + 1);
            on_path[w] = 0;
        }
    }
};

} // namespace

std::uint64_t count_cycles(const LiftedGraph& lg, int j, int max_j)
{
    if (j < 2 || j > max_j)
        throw std::invalid_argument("cycle length must lie in [2, " + std::to_string(max_j) + "]");
    CycleCounter c{lg, j};
    c.on_path.assign(lg.num_vertices(), 0);
    for (int s = 0; s < lg.num_vertices(); ++s) {
        c.start = s;
        c.on_path[s] = 1;
        for (auto [w, e] : lg.adj[s]) {
            if (w <= s)
                continue;
            c.first_edge = e;
            c.on_path[w] = 1;
            c.extend(w, e, 1);
            c.on_path[w] = 0;
        }
        c.on_path[s] = 0;
    }
    return c.count;
}

nlohmann::json lift_to_json(const Lift& l)
{
    nlohmann::json j;
    j["n"] = l.n;
    if (l.seed)
        j["seed"] = *l.seed;
    j["matchings"] = l.matchings;
    return j;
}

Lift lift_from_json(const nlohmann::json& j, const BaseGraph& g)
{
    Lift l{g, j.at("n").get<int>(), j.at("matchings").get<std::vector<std::vector<int>>>(),
           std::nullopt};
    if (j.contains("seed"))
        l.seed = j["seed"].get<std::uint64_t>();
    if (static_cast<int>(l.matchings.size()) != g.num_edges())
        throw std::invalid_argument("lift json: expected one matching per base edge");
    for (const auto& p : l.matchings) {
        std::vector<char> hit(l.n, 0);
        if (static_cast<int>(p.size()) != l.n)
            throw std::invalid_argument("lift json: matching has wrong length");
        for (int x : p) {
            if (x < 0 || x >= l.n || hit[x])
                throw std::invalid_argument("lift json: matching is not a permutation");
            hit[x] = 1;
        }
    }
    return l;
}

} // namespace liftchroma
