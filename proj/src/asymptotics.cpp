#include "liftchroma/asymptotics.hpp"
#include "liftchroma/errors.hpp"
#include "liftchroma/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

namespace liftchroma {

double LogValue::value() const
{
    return sign == 0 ? 0.0 : sign * std::exp(log);
}

std::vector<double> power_sums(double alpha, int d, int J)
{
    if (J < 1)
        throw std::invalid_argument("power_sums needs J >= 1");
    std::vector<double> s(J);
    double prev = 2.0, cur = alpha;
    s[0] = cur;
    for (int j = 2; j <= J; ++j) {
        double next = alpha * cur - (d - 1.0) * prev;
        prev = cur;
        cur = next;
        s[j - 1] = cur;
    }
    return s;
}

namespace {

// c_j for j = 1..J as doubles.
std::vector<double> walk_counts(const BaseGraph& g, int J)
{
    auto spec = adjacency_spectrum(g);
    const double excess = static_cast<double>(g.num_edges() - g.num_vertices);
    std::vector<double> c(J, 0.0);
    for (int j = 1; j <= J; ++j)
        c[j - 1] = excess * (1.0 + (j % 2 == 0 ? 1.0 : -1.0));
    for (double a : spec.eigenvalues) {
        auto s = power_sums(a, spec.degree, J);
        for (int j = 0; j < J; ++j)
            c[j] += s[j];
    }
    return c;
}

} // namespace

std::int64_t walk_count_cj(const BaseGraph& g, int j)
{
    if (j < 1)
        throw std::invalid_argument("walk_count_cj needs j >= 1");
    double c = walk_counts(g, j).back();
    double r = std::round(c);
    if (std::fabs(c - r) > 1e-6 * std::max(1.0, std::fabs(c) * 1e-9) || std::fabs(r) > 9e15)
        throw numeric_instability("walk count c_" + std::to_string(j) + " = " +
                                  std::to_string(c) + " is not close to an integer");
    return static_cast<std::int64_t>(r);
}

std::int64_t walk_count_brute(const BaseGraph& g, int j)
{
    if (j < 1)
        throw std::invalid_argument("walk_count_brute needs j >= 1");
    // arc 2e is tail->head of edge e, arc 2e+1 the reverse
    const int A = 2 * g.num_edges();
    auto tail = [&](int a) { return a % 2 ? g.edges[a / 2].second : g.edges[a / 2].first; };
    auto head = [&](int a) { return a % 2 ? g.edges[a / 2].first : g.edges[a / 2].second; };
    std::vector<std::vector<int>> out(g.num_vertices);
    for (int a = 0; a < A; ++a)
        out[tail(a)].push_back(a);
    std::int64_t count = 0;
    std::function<void(int, int, int)> rec = [&](int first, int last, int len) {
        if (len == j) {
            if (head(last) == tail(first) && first != (last ^ 1))
                ++count;
            return;
        }
        for (int a : out[head(last)])
            if (a != (last ^ 1))
                rec(first, a, len + 1);
    };
    for (int a = 0; a < A; ++a)
        rec(a, a, 1);
    return count;
}

SscmConstants sscm_constants(const BaseGraph& g, int k, int J)
{
    if (J < 1)
        throw std::invalid_argument("sscm_constants needs J >= 1");
    if (k < 2)
        throw std::invalid_argument("sscm_constants needs k >= 2");
    auto c = walk_counts(g, J);
    SscmConstants s;
    s.J = J;
    s.lambda.resize(J);
    s.delta.resize(J);
    for (int j = 1; j <= J; ++j) {
        // counts are integers; snap while doubles still resolve them
        double cj = std::fabs(c[j - 1]) < 4.5e15 ? std::round(c[j - 1]) : c[j - 1];
        s.lambda[j - 1] = std::max(cj, 0.0) / (2.0 * j);
        s.delta[j - 1] = (j % 2 ? -1.0 : 1.0) / std::pow(k - 1.0, j - 1);
    }
    s.convergence_ratio = (g.degree - 1.0) / ((k - 1.0) * (k - 1.0));
    return s;
}

double lambda_pair(int k)
{
    return (k - 1.0) * (k - 1.0) + 1.0;
}

double lambda_prime_pair(int k)
{
    return (k - 1.0) * (k - 1.0) - 1.0;
}

double log_C1(const BaseGraph& g, int k)
{
    if (k < 3)
        throw std::invalid_argument("C1 needs k >= 3");
    validate(g);
    const double V = g.num_vertices, E = g.num_edges();
    return k * V / 2.0 * std::log(k) +
           (k - 1.0) * E / 2.0 * std::log((k - 1.0) * (k - 1.0) / (k * (k - 2.0)));
}

double C1(const BaseGraph& g, int k)
{
    return std::exp(log_C1(g, k));
}

double log_h_dk(const BaseGraph& g, int k)
{
    if (k < 3)
        throw std::invalid_argument("h(d,k) needs k >= 3");
    auto spec = adjacency_spectrum(g);
    const double ll = lambda_pair(k) * lambda_prime_pair(k);
    const double k1sq = (k - 1.0) * (k - 1.0);
    double acc = g.num_vertices * std::log(k * static_cast<double>(k) / ll);
    for (double a : spec.eigenvalues) {
        double f = ll + spec.degree - a * k1sq;
        if (!(f > 0))
            throw std::domain_error("h(d,k): nonpositive factor for eigenvalue " +
                                    std::to_string(a));
        acc += std::log(f);
    }
    return acc;
}

double h_dk(const BaseGraph& g, int k)
{
    return std::exp(log_h_dk(g, k));
}

namespace {

// The C2 display without the d < l_k hypothesis; the identity check uses it
// as an algebraic expression wherever h(d,k) > 0.
double log_C2_formula(const BaseGraph& g, int k)
{
    const double V = g.num_vertices, E = g.num_edges();
    const double k1sq = (k - 1.0) * (k - 1.0);
    return (k * k - k + 1.0) * V * std::log(k) + (2.0 * k * k - 2.0 * k) * E * std::log(k - 1.0) -
           k1sq * E / 2.0 * std::log(lambda_pair(k)) -
           (k * k - 1.0) * E / 2.0 * std::log(lambda_prime_pair(k)) -
           k1sq / 2.0 * log_h_dk(g, k);
}

} // namespace

double log_C2(const BaseGraph& g, int k)
{
    if (k < 3)
        throw std::invalid_argument("C2 needs k >= 3");
    int d = validate(g);
    if (!(d < ell_threshold(k)))
        throw hypothesis_error("C2 needs d < l_k");
    return log_C2_formula(g, k);
}

double C2(const BaseGraph& g, int k)
{
    return std::exp(log_C2(g, k));
}

MomentConstants moment_constants(const BaseGraph& g, int k)
{
    MomentConstants m;
    m.C1 = C1(g, k);
    m.C2 = C2(g, k);
    m.h = h_dk(g, k);
    m.lambda = lambda_pair(k);
    m.lambda_prime = lambda_prime_pair(k);
    return m;
}

double log_C2_over_C1sq_closed(const BaseGraph& g, int k)
{
    auto spec = adjacency_spectrum(g);
    const double V = g.num_vertices, E = g.num_edges();
    const double ll = lambda_pair(k) * lambda_prime_pair(k);
    const double k1sq = (k - 1.0) * (k - 1.0);
    double inner = 4.0 * E * std::log(k - 1.0) - (E - V) * std::log(ll);
    for (double a : spec.eigenvalues) {
        double f = ll + spec.degree - a * k1sq;
        if (!(f > 0))
            throw std::domain_error("closed form: nonpositive factor");
        inner -= std::log(f);
    }
    return k1sq / 2.0 * inner;
}

SscmIdentity sscm_identity_check(const BaseGraph& g, int k, int J, double tol)
{
    int d = validate(g);
    const double k1sq = (k - 1.0) * (k - 1.0);
    if (!(d - 1.0 < k1sq))
        throw divergent_series("sscm series diverges: d - 1 = " + std::to_string(d - 1) +
                               " >= (k-1)^2 = " + std::to_string(k1sq));
    const double r = (d - 1.0) / k1sq;
    const double V = g.num_vertices, E = g.num_edges();
    // |s_j| <= 2 (d-1)^j per eigenvalue, plus the 2|E - V| constant term
    auto tail = [&](int JJ) {
        return (V + std::fabs(E - V)) * k1sq * std::pow(r, JJ + 1) / ((JJ + 1) * (1.0 - r));
    };
    if (J <= 0) {
        J = 200;
        while (tail(J) > tol)
            J += 50;
    }
    auto s = sscm_constants(g, k, J);
    SscmIdentity out;
    out.J = J;
    // summed smallest-first to limit rounding in the long tail
    for (int j = J; j >= 1; --j)
        out.partial += s.lambda[j - 1] * s.delta[j - 1] * s.delta[j - 1];
    out.lhs = log_C2_formula(g, k) - 2.0 * log_C1(g, k);
    out.gap = std::fabs(out.lhs - out.partial);
    out.closed_form = log_C2_over_C1sq_closed(g, k);
    out.closed_rel = std::fabs(out.lhs - out.closed_form) / std::fabs(out.closed_form);
    out.tail_bound = tail(J);
    return out;
}

std::int64_t cycle_colorings(int j, int k)
{
    if (j < 3 || k < 2)
        throw std::invalid_argument("cycle_colorings needs j >= 3 and k >= 2");
    std::int64_t p = 1;
    for (int i = 0; i < j; ++i)
        p *= (k - 1);
    return p + (j % 2 ? -(k - 1) : (k - 1));
}

double log_growth_rate(const BaseGraph& g, int k)
{
    return g.num_vertices * std::log(k) + g.num_edges() * std::log((k - 1.0) / k);
}

LogValue EY_asym(const BaseGraph& g, int n, int k)
{
    if (n < 1 || n % k != 0)
        throw std::invalid_argument("EY_asym needs k | n");
    const double two_pi_n = 2.0 * std::numbers::pi * n;
    return {log_C1(g, k) - (k - 1.0) * g.num_vertices / 2.0 * std::log(two_pi_n) +
                n * log_growth_rate(g, k),
            1};
}

LogValue EY2_asym(const BaseGraph& g, int n, int k)
{
    if (n < 1 || n % k != 0)
        throw std::invalid_argument("EY2_asym needs k | n");
    const double two_pi_n = 2.0 * std::numbers::pi * n;
    return {log_C2(g, k) - (k - 1.0) * g.num_vertices * std::log(two_pi_n) +
                2.0 * n * log_growth_rate(g, k),
            1};
}

double joint_moment_prediction(const BaseGraph& g, int k, int j)
{
    if (j < 3)
        throw std::invalid_argument("joint_moment_prediction needs j >= 3");
    auto s = sscm_constants(g, k, j);
    return s.lambda[j - 1] * (1.0 + s.delta[j - 1]);
}

double joint_moment_prediction(const BaseGraph& g, int k, const std::vector<int>& counts)
{
    double p = 1.0;
    for (int l = 0; l < static_cast<int>(counts.size()); ++l) {
        if (counts[l] == 0)
            continue;
        if (l < 3 || counts[l] < 0)
            throw std::invalid_argument("cycle multiplicities start at length 3");
        p *= std::pow(joint_moment_prediction(g, k, l), counts[l]);
    }
    return p;
}

double log_gamma_nk(double n, int k)
{
    if (k < 3)
        throw std::invalid_argument("gamma(n,k) needs k >= 3");
    const double kk = k;
    const double k1sq = (kk - 1.0) * (kk - 1.0);
    return (3.0 * kk * kk + 1.0) * std::log(kk) + 4.0 * kk * (kk - 1.0) * std::log(kk - 1.0) -
           (2.0 * kk * kk - 1.0) * std::log(2.0 * std::numbers::pi * n) -
           k1sq * std::log(lambda_pair(k)) - (kk * kk - 1.0) * std::log(kk - 2.0);
}

double gamma_nk(double n, int k)
{
    return std::exp(log_gamma_nk(n, k));
}

Eigen::MatrixXd build_B(int k)
{
    if (k < 2)
        throw std::invalid_argument("build_B needs k >= 2");
    const int k2 = k * k;
    Eigen::MatrixXd J = Eigen::MatrixXd::Ones(k, k) - Eigen::MatrixXd::Identity(k, k);
    Eigen::MatrixXd M(k2, k2);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            M.block(a * k, b * k, k, k) = J(a, b) * J;
    Eigen::MatrixXd B = (k - 1.0) * (k - 1.0) * Eigen::MatrixXd::Identity(2 * k2, 2 * k2);
    B.block(0, k2, k2, k2) += M;
    B.block(k2, 0, k2, k2) += M;
    return B;
}

std::vector<double> B_expected_spectrum(int k)
{
    const double k1 = k - 1.0;
    std::vector<double> ev;
    ev.push_back(2.0 * k1 * k1);
    ev.push_back(0.0);
    for (int i = 0; i < 2 * k - 2; ++i) {
        ev.push_back(k1 * (k - 2.0));
        ev.push_back(k * k1);
    }
    for (int i = 0; i < (k - 1) * (k - 1); ++i) {
        ev.push_back(k1 * k1 + 1.0);
        ev.push_back(k1 * k1 - 1.0);
    }
    std::sort(ev.begin(), ev.end());
    return ev;
}

bool B_spectrum_check(int k, double tol)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_B(k), Eigen::EigenvaluesOnly);
    std::vector<double> got(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(got.begin(), got.end());
    auto want = B_expected_spectrum(k);
    if (got.size() != want.size())
        return false;
    for (std::size_t i = 0; i < got.size(); ++i)
        if (std::fabs(got[i] - want[i]) > tol)
            return false;
    return true;
}

double scaling_factor(const BaseGraph& g, int k, int r)
{
    if (r < 0 || r > k - 1)
        throw std::invalid_argument("scaling_factor needs 0 <= r <= k - 1");
    return std::exp(2.0 * r * log_growth_rate(g, k));
}

} // namespace liftchroma
