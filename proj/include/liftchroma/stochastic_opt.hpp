#ifndef LIFTCHROMA_STOCHASTIC_OPT_HPP
#define LIFTCHROMA_STOCHASTIC_OPT_HPP

#include "liftchroma/base_graph.hpp"
#include "liftchroma/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace liftchroma {

using Matrix = Eigen::MatrixXd;

// Throws std::invalid_argument unless entries are >= 0 and rows sum to 1.
void check_row_stochastic(const Matrix& m, double tol = 1e-9);

double rho(const Matrix& m);
double entropy_h(const Matrix& m);

// Dirichlet(1, ..., 1) rows.
Matrix random_row_stochastic(int q, int k, Engine& eng);

// q x q, q >= 3, c < c_q.
double an_gap(const Matrix& m, double c);

// q x k -> q x q; the first k columns are scaled by k/q, the rest are 1/q.
Matrix extend_matrix(const Matrix& m);

// q x k with 2 <= k <= q, q >= 3, c < (k-1)/(q-1) c_q.
double rect_gap(const Matrix& m, double c);
// Same inequality written as log k - h/q - c log(1 + ((k/q) rho - 1)/((q-1)(k-1))).
double rect_gap_second_form(const Matrix& m, double c);
// Left-hand side h(M)/q + c log(kq - k - q + (k/q) rho(M)).
double rect_lhs(const Matrix& m, double c);

// Single-colouring profiles: a is |V| x k (rows are fibers), b[e] is k x k
// with the diagonal ignored.
double f_ab(const BaseGraph& g, const Matrix& a, const std::vector<Matrix>& b);
std::vector<Matrix> b_star(const BaseGraph& g, const Matrix& a);
double g_of_a(const Matrix& a, int d, int k);
// sum over edges of log(1 - <a_v, a_v'>)
double overlap_log_sum(const BaseGraph& g, const Matrix& a);
// binom(d+1, 2) log(1 - (d+1)/(dk) + rho(a)/(d(d+1)))
double overlap_log_bound(const Matrix& a, int d, int k);

// Pair profiles: A[v] is k x k (row and column sums 1/k); B[e] is k^2 x k^2
// with row index i*k + j and column index i'*k + j', supported on i != i',
// j != j'.
double f_AB(const BaseGraph& g, const std::vector<Matrix>& A, const std::vector<Matrix>& B);
double F_A(const BaseGraph& g, const std::vector<Matrix>& A);
std::vector<Matrix> F_A_gradient(const BaseGraph& g, const std::vector<Matrix>& A);
std::vector<Matrix> uniform_pair_profile(int num_vertices, int k);
std::vector<Matrix> uniform_pair_edge_profile(int num_edges, int k);

// Projection of a matrix onto {row sums = column sums = 0}.
Matrix tangent_projection(const Matrix& m);
// Alternating row/column rescaling to margins 1/k after clipping negatives.
Matrix rescale_to_margins(Matrix m, double tol = 1e-10, int max_iter = 1000);

enum class Objective { f_bstar, F_A, rect_lhs };

struct MaxOptions {
    int q = 0;         // rect_lhs only
    double c = 0.0;    // rect_lhs only
    int max_iter = 1000;
    double tol = 1e-10;
};

struct MaxReport {
    std::vector<double> best_point;
    double best_value = 0.0;
    double uniform_value = 0.0;
    double gap_to_uniform = 0.0;      // uniform_value - best_value
    double best_distance = 0.0;       // max-norm distance of best point to uniform
    int trials = 0;
};

// Multi-start projected gradient ascent from random feasible points.
MaxReport verify_max_uniform(Objective obj, const BaseGraph& g, int k, int trials,
                             std::uint64_t seed, const MaxOptions& opt = {});

// Norm of the feasible-direction gradient of F_A at A.
double F_A_projected_gradient_norm(const BaseGraph& g, const std::vector<Matrix>& A);

} // namespace liftchroma

#endif
