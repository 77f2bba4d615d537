#ifndef LIFTCHROMA_LATTICE_TOOLS_HPP
#define LIFTCHROMA_LATTICE_TOOLS_HPP

#include "liftchroma/asymptotics.hpp"
#include "liftchroma/base_graph.hpp"

#include <Eigen/Dense>
#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace liftchroma {

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

// Vertices are equations, edges are variables. Edge e is oriented
// edges[e].first -> edges[e].second for the signed incidence matrix.
struct ConstraintGraph {
    std::vector<std::string> vertex_labels;
    std::vector<std::string> edge_labels;
    std::vector<Edge> edges;

    int num_vertices() const { return static_cast<int>(vertex_labels.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
};

// Adds a vertex or an edge and returns its index.
int add_vertex(ConstraintGraph& g, std::string label);
int add_edge(ConstraintGraph& g, int u, int v, std::string label);

// Same text format as base graphs ("V E" then edges), without the
// regularity requirement. Labels are the indices.
ConstraintGraph read_constraint_graph(std::istream& in);

// Throws std::invalid_argument on loops, bad indices, or isolated vertices
// (unless allow_isolated).
void validate(const ConstraintGraph& g, bool allow_isolated = false);

// side[v] in {0, 1} if bipartite; empty otherwise.
std::vector<int> bipartition(const ConstraintGraph& g);
bool is_bipartite(const ConstraintGraph& g);

// comp[v] = component index; returns the number of components.
int components(const ConstraintGraph& g, std::vector<int>& comp);

IntMatrix incidence_unsigned(const ConstraintGraph& g);
// orientation[e] = false flips edge e.
IntMatrix incidence_signed(const ConstraintGraph& g, const std::vector<bool>& orientation = {});
// Unsigned when bipartite, signed otherwise.
IntMatrix constraint_matrix(const ConstraintGraph& g);

long long rank_exact(const IntMatrix& d);

// Integer kernel basis (columns) by exact row reduction with denominators
// cleared and each column made primitive.
IntMatrix kernel_basis(const IntMatrix& d);

// Kernel basis of constraint_matrix(g) from the fundamental cycles of a BFS
// spanning forest. Independent of kernel_basis.
IntMatrix cycle_basis(const ConstraintGraph& g);

mpz_class bareiss_determinant(std::vector<std::vector<mpz_class>> m);
// Product over components of the spanning-tree count; multi-edges counted.
mpz_class tau_maximal_forests(const ConstraintGraph& g);

// det(U^T H U) / det(U^T U). Throws std::invalid_argument if U is
// rank-deficient.
double det_restricted(const Eigen::MatrixXd& h, const Eigen::MatrixXd& u);
LogValue log_det_restricted(const Eigen::MatrixXd& h, const Eigen::MatrixXd& u);

ConstraintGraph build_gamma_b(const BaseGraph& g, int k);
ConstraintGraph build_gamma_a(const BaseGraph& g, int k);

// The b solution supported on the colour cycle i -> i+1 (mod k).
Eigen::VectorXd gamma_b_cycle_solution(const BaseGraph& g, int k);

struct LatticeProblem {
    ConstraintGraph gamma;
    std::vector<mpq_class> y;
    std::vector<std::pair<double, double>> box;
    std::function<double(const Eigen::VectorXd&)> phi;
    std::function<double(const Eigen::VectorXd&)> psi;
    std::function<double(double)> log_c_n;
    Eigen::VectorXd xhat;
    // Optional analytic derivatives; central differences are used otherwise.
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

Eigen::MatrixXd problem_hessian(const LatticeProblem& p, const Eigen::VectorXd& x);

// Newton steps restricted to the kernel of the constraint matrix.
Eigen::VectorXd refine_maximizer(const LatticeProblem& p, Eigen::VectorXd x, int iters = 50,
                                 double tol = 1e-14);

// psi(xhat) / (tau^{1/2} det(-H|_V)^{1/2}) (2 pi n)^{r/2} c_n e^{n phi(xhat)}.
// Throws hypothesis_error for maximizers on the boundary of the box and
// numeric_instability when det(-H|_V) <= 0.
LogValue laplace_estimate(const LatticeProblem& p, double n);

// Same as laplace_estimate with the determinant and tau reported.
struct LaplaceParts {
    LogValue estimate;
    double log_tau = 0.0;
    double log_det = 0.0;
    int r = 0;
};
LaplaceParts laplace_parts(const LatticeProblem& p, double n);

LatticeProblem ey_problem(const BaseGraph& g, int k);
LatticeProblem ey2_problem(const BaseGraph& g, int k);
// One component of the EY problem: a single base edge.
LatticeProblem ey_edge_problem(int k);

// Exact term of the single-edge EY sum at integer counts x = n b:
// (n/k)!^{2k} / (n! prod x!). Sums to proper_matchings / n!.
mpq_class ey_edge_term(const std::vector<int>& counts, int n, int k);

struct WindowedSum {
    mpq_class window;
    mpq_class full;
    double ratio = 0.0;
    double radius = 0.0;
    std::uint64_t points_window = 0;
    std::uint64_t points_total = 0;
};

using LatticeTerm = std::function<mpq_class(const std::vector<int>&)>;

// Enumerates the integer points x with D x = n y inside n K. The window is
// ||x/n - xhat||_inf < gamma log n / sqrt n together with the lattice
// points nearest to xhat. Throws too_large_error past cap points.
WindowedSum windowed_sum(const LatticeProblem& p, int n, double gamma, const LatticeTerm& term,
                         std::uint64_t cap = 10'000'000);

} // namespace liftchroma

#endif
