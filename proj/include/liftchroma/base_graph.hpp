#ifndef LIFTCHROMA_BASE_GRAPH_HPP
#define LIFTCHROMA_BASE_GRAPH_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace liftchroma {

using Edge = std::pair<int, int>; // (tail, head)

// Loopless d-regular multigraph with frozen edge orientation. Build through
// make_base_graph so the invariants hold; the raw struct is exposed so that
// validate() can be exercised on malformed input.
struct BaseGraph {
    int num_vertices = 0;
    std::vector<Edge> edges;
    int degree = 0;

    int num_edges() const { return static_cast<int>(edges.size()); }
};

struct SpectralSummary {
    std::vector<double> eigenvalues; // descending
    int degree = 0;
};

class invalid_graph : public std::invalid_argument {
public:
    enum class kind { loop, degree_mismatch, too_few_vertices, bad_index };

    invalid_graph(kind k, const std::string& what)
        : std::invalid_argument(what), kind_(k) {}

    kind which() const { return kind_; }

private:
    kind kind_;
};

// Returns d, or throws invalid_graph naming the violated invariant.
int validate(const BaseGraph& g);

// Sorts edges by (tail, head) keeping insertion order among equals, then
// validates and caches the degree.
BaseGraph make_base_graph(int num_vertices, std::vector<Edge> edges);

BaseGraph make_complete_graph(int m);
BaseGraph make_petersen_graph();

SpectralSummary adjacency_spectrum(const BaseGraph& g);

// Dense symmetric adjacency with multi-edge multiplicity, row-major.
std::vector<std::vector<int>> adjacency_matrix(const BaseGraph& g);

// Text format: "V E" then E lines "tail head".
BaseGraph read_graph(std::istream& in);
void write_graph(std::ostream& out, const BaseGraph& g);

// Accepts "Km" (complete graph), "petersen", or a path to a graph file.
BaseGraph graph_from_spec(const std::string& spec);

} // namespace liftchroma

#endif
