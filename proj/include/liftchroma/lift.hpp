#ifndef LIFTCHROMA_LIFT_HPP
#define LIFTCHROMA_LIFT_HPP

#include "liftchroma/base_graph.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace liftchroma {

// matchings[e][i] is the head-fiber index matched to tail-fiber index i.
struct Lift {
    BaseGraph base;
    int n = 0;
    std::vector<std::vector<int>> matchings;
    std::optional<std::uint64_t> seed;
};

// Lifted vertex (v, i) has id v * n + i. Also used for plain graphs that are
// not lifts (base_vertices = 1, n = number of vertices).
struct LiftedGraph {
    int base_vertices = 0;
    int n = 0;
    std::vector<Edge> edges;
    std::vector<int> edge_base; // base edge index, or -1
    std::vector<std::vector<std::pair<int, int>>> adj; // (neighbour, edge id)

    int num_vertices() const { return static_cast<int>(adj.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    int fiber_of(int x) const { return x / n; }
};

constexpr std::uint64_t default_lift_cap = 10'000'000;
constexpr int default_max_cycle_length = 12;

Lift sample_lift(const BaseGraph& g, int n, std::uint64_t seed);
Lift identity_lift(const BaseGraph& g, int n);

// Number of lifts n!^|E|, saturating at UINT64_MAX.
std::uint64_t lift_count(const BaseGraph& g, int n);

// Calls visit once per lift in lexicographic order of the permutation tuple.
// The Lift passed to visit is reused between calls.
void enumerate_lifts(const BaseGraph& g, int n, const std::function<void(const Lift&)>& visit,
                     std::uint64_t cap = default_lift_cap);

LiftedGraph expand(const Lift& l);
LiftedGraph make_plain_graph(int num_vertices, const std::vector<Edge>& edges);
LiftedGraph make_cycle_graph(int len);

bool verify_covering(const LiftedGraph& lg, const BaseGraph& g);

// Unrooted, unoriented cycles of length exactly j (j >= 2; j = 2 counts
// pairs of parallel edges).
std::uint64_t count_cycles(const LiftedGraph& lg, int j, int max_j = default_max_cycle_length);

nlohmann::json lift_to_json(const Lift& l);
Lift lift_from_json(const nlohmann::json& j, const BaseGraph& g);

} // namespace liftchroma

#endif
