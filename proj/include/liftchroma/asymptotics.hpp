#ifndef LIFTCHROMA_ASYMPTOTICS_HPP
#define LIFTCHROMA_ASYMPTOTICS_HPP

#include "liftchroma/base_graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace liftchroma {

// value = sign * exp(log)
struct LogValue {
    double log = 0.0;
    int sign = 1;

    double value() const;
};

struct SscmConstants {
    std::vector<double> lambda; // lambda[j-1] = lambda_j
    std::vector<double> delta;
    int J = 0;
    double convergence_ratio = 0.0; // (d-1)/(k-1)^2, the tail decay rate
};

struct MomentConstants {
    double C1 = 0.0;
    double C2 = 0.0;
    double h = 0.0;
    double lambda = 0.0;
    double lambda_prime = 0.0;
};

struct SscmIdentity {
    double lhs = 0.0;          // log(C2 / C1^2)
    double partial = 0.0;      // sum_{j <= J} lambda_j delta_j^2
    double gap = 0.0;          // |lhs - partial|
    double closed_form = 0.0;  // log of the product form of C2 / C1^2
    double closed_rel = 0.0;   // |lhs - closed_form| / |closed_form|
    double tail_bound = 0.0;   // bound on sum_{j > J}
    int J = 0;
};

// s_1..s_J with s_j = alpha s_{j-1} - (d-1) s_{j-2}, s_0 = 2, s_1 = alpha.
std::vector<double> power_sums(double alpha, int d, int J);

// Closed non-backtracking j-walk count from the spectrum.
std::int64_t walk_count_cj(const BaseGraph& g, int j);

// Direct enumeration over directed-edge sequences; the oracle for walk_count_cj.
std::int64_t walk_count_brute(const BaseGraph& g, int j);

SscmConstants sscm_constants(const BaseGraph& g, int k, int J);

double lambda_pair(int k);       // (k-1)^2 + 1
double lambda_prime_pair(int k); // (k-1)^2 - 1

double log_C1(const BaseGraph& g, int k);
double C1(const BaseGraph& g, int k);
double log_h_dk(const BaseGraph& g, int k);
double h_dk(const BaseGraph& g, int k);
double log_C2(const BaseGraph& g, int k);
double C2(const BaseGraph& g, int k);
MomentConstants moment_constants(const BaseGraph& g, int k);

// Product form of log(C2 / C1^2).
double log_C2_over_C1sq_closed(const BaseGraph& g, int k);

// J = 0 extends the truncation until the geometric tail bound is below tol.
SscmIdentity sscm_identity_check(const BaseGraph& g, int k, int J, double tol = 1e-12);

std::int64_t cycle_colorings(int j, int k);

// log(k^|V| ((k-1)/k)^|E|), the per-n exponential rate of E[Y].
double log_growth_rate(const BaseGraph& g, int k);

LogValue EY_asym(const BaseGraph& g, int n, int k);
LogValue EY2_asym(const BaseGraph& g, int n, int k);

double joint_moment_prediction(const BaseGraph& g, int k, int j);
// counts[l] is the multiplicity of l-cycles (entries for l < 3 must be 0).
double joint_moment_prediction(const BaseGraph& g, int k, const std::vector<int>& counts);

// Saddle-point constant of the inner second-moment sum; the exponent of
// ((k-1)^2 + 1) is (k-1)^2.
double log_gamma_nk(double n, int k);
double gamma_nk(double n, int k);

Eigen::MatrixXd build_B(int k);
std::vector<double> B_expected_spectrum(int k); // ascending
bool B_spectrum_check(int k, double tol = 1e-8);

double scaling_factor(const BaseGraph& g, int k, int r);

} // namespace liftchroma

#endif
