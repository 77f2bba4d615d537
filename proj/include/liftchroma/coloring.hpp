#ifndef LIFTCHROMA_COLORING_HPP
#define LIFTCHROMA_COLORING_HPP

#include "liftchroma/lift.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace liftchroma {

struct EquitableSpec {
    int k = 0;
    int n = 0;
    int q = 0;
    int r = 0;

    EquitableSpec(int n, int k);
    // Colours are 0-based here: colours 0..r-1 get q+1, the rest get q.
    int quota(int colour) const { return colour < r ? q + 1 : q; }
};

constexpr std::uint64_t default_node_budget = 100'000'000;
constexpr int default_count_cap = 40;

// LIFTCHROMA_BUDGET if set, otherwise default_node_budget.
std::uint64_t solver_budget();

struct SolveOptions {
    std::uint64_t budget = 0; // 0 means solver_budget()
    std::uint64_t seed = 0;   // for the local-search certificate pass
    bool local_search = true;
};

// Exact decision. Throws budget_exhausted when the search gives up.
bool is_k_colorable(const LiftedGraph& lg, int k, const SolveOptions& opt = {});

// Returns a proper colouring with at most k colours, or an empty vector.
std::vector<int> find_k_coloring(const LiftedGraph& lg, int k, const SolveOptions& opt = {});

int chromatic_number(const LiftedGraph& lg, const SolveOptions& opt = {});

bool is_proper(const LiftedGraph& lg, const std::vector<int>& colour);

mpz_class count_proper_colorings(const LiftedGraph& lg, int k, int cap = default_count_cap);

// Counts proper colourings meeting the per-fiber quotas of EquitableSpec(n, k).
// by_components selects the per-component usage convolution path.
mpz_class count_strongly_equitable(const Lift& l, int k, int cap = default_count_cap,
                                   bool by_components = false);

} // namespace liftchroma

#endif
