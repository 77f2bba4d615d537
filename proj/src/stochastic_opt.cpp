#include "liftchroma/stochastic_opt.hpp"
#include "liftchroma/errors.hpp"
#include "liftchroma/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>

namespace liftchroma {

namespace {

double xlogx(double x)
{
    return x > 0 ? x * std::log(x) : 0.0;
}

double safe_log(double x)
{
    return std::log(std::max(x, 1e-300));
}

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

} // namespace

void check_row_stochastic(const Matrix& m, double tol)
{
    if (m.rows() == 0 || m.cols() == 0)
        throw std::invalid_argument("empty matrix");
    if ((m.array() < 0).any())
        throw std::invalid_argument("matrix has a negative entry");
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (std::fabs(m.row(i).sum() - 1.0) > tol)
            throw std::invalid_argument("row " + std::to_string(i) + " does not sum to 1");
}

double rho(const Matrix& m)
{
    return m.squaredNorm();
}

double entropy_h(const Matrix& m)
{
    double h = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i)
        h -= xlogx(m.data()[i]);
    return h;
}

Matrix random_row_stochastic(int q, int k, Engine& eng)
{
    Matrix m(q, k);
    for (int i = 0; i < q; ++i) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) {
            // Exp(1) via inversion; 1 - u avoids log(0)
            m(i, j) = -std::log(1.0 - uniform01(eng));
            s += m(i, j);
        }
        m.row(i) /= s;
    }
    return m;
}

double an_gap(const Matrix& m, double c)
{
    const int q = static_cast<int>(m.rows());
    if (m.cols() != q)
        throw std::invalid_argument("an_gap needs a square matrix");
    if (q < 3)
        throw std::invalid_argument("an_gap needs q >= 3");
    if (!(c < c_q(q)))
        throw hypothesis_error("an_gap needs c < c_q = " + std::to_string(c_q(q)));
    check_row_stochastic(m);
    const double qq = q;
    double rhs = std::log(qq) + c * std::log((qq - 1.0) * (qq - 1.0));
    double lhs = entropy_h(m) / qq + c * std::log(qq * qq - 2.0 * qq + rho(m));
    return rhs - lhs;
}

Matrix extend_matrix(const Matrix& m)
{
    const Eigen::Index q = m.rows(), k = m.cols();
    if (q < k)
        throw std::invalid_argument("extend_matrix needs q >= k");
    Matrix out = Matrix::Constant(q, q, 1.0 / static_cast<double>(q));
    out.leftCols(k) = m * (static_cast<double>(k) / static_cast<double>(q));
    return out;
}

namespace {

void check_rect(const Matrix& m, double c)
{
    const int q = static_cast<int>(m.rows()), k = static_cast<int>(m.cols());
    if (q < 3)
        throw std::invalid_argument("rect_gap needs q >= 3");
    if (k < 2 || k > q)
        throw std::invalid_argument("rect_gap needs 2 <= k <= q");
    double bound = (k - 1.0) / (q - 1.0) * c_q(q);
    if (!(c < bound))
        throw hypothesis_error("rect_gap needs c < (k-1)/(q-1) c_q = " + std::to_string(bound));
    check_row_stochastic(m);
}

} // namespace

double rect_lhs(const Matrix& m, double c)
{
    const double q = static_cast<double>(m.rows()), k = static_cast<double>(m.cols());
    return entropy_h(m) / q + c * std::log(k * q - k - q + k / q * rho(m));
}

double rect_gap(const Matrix& m, double c)
{
    check_rect(m, c);
    const double q = static_cast<double>(m.rows()), k = static_cast<double>(m.cols());
    return std::log(k) + c * std::log((q - 1.0) * (k - 1.0)) - rect_lhs(m, c);
}

double rect_gap_second_form(const Matrix& m, double c)
{
    check_rect(m, c);
    const double q = static_cast<double>(m.rows()), k = static_cast<double>(m.cols());
    return std::log(k) - entropy_h(m) / q -
           c * std::log1p((k / q * rho(m) - 1.0) / ((q - 1.0) * (k - 1.0)));
}

double f_ab(const BaseGraph& g, const Matrix& a, const std::vector<Matrix>& b)
{
    const int k = static_cast<int>(a.cols());
    if (a.rows() != g.num_vertices || static_cast<int>(b.size()) != g.num_edges())
        throw std::invalid_argument("f_ab: profile shape does not match the graph");
    double f = entropy_h(a);
    for (int e = 0; e < g.num_edges(); ++e) {
        auto [v, w] = g.edges[e];
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                if (i == j)
                    continue;
                double x = b[e](i, j);
                if (x <= 0)
                    continue;
                double num = a(v, i) * a(w, j);
                if (num <= 0)
                    return neg_inf;
                f += x * std::log(num / x);
            }
    }
    return f;
}

std::vector<Matrix> b_star(const BaseGraph& g, const Matrix& a)
{
    const int k = static_cast<int>(a.cols());
    std::vector<Matrix> b;
    for (int e = 0; e < g.num_edges(); ++e) {
        auto [v, w] = g.edges[e];
        double z = 1.0 - a.row(v).dot(a.row(w));
        if (!(z > 0))
            throw degenerate_edge("b_star: z_e = 0 on edge " + std::to_string(e));
        Matrix m = a.row(v).transpose() * a.row(w) / z;
        for (int i = 0; i < k; ++i)
            m(i, i) = 0.0;
        b.push_back(std::move(m));
    }
    return b;
}

double g_of_a(const Matrix& a, int d, int k)
{
    return entropy_h(a) + overlap_log_bound(a, d, k);
}

double overlap_log_sum(const BaseGraph& g, const Matrix& a)
{
    double s = 0.0;
    for (auto [v, w] : g.edges)
        s += std::log(1.0 - a.row(v).dot(a.row(w)));
    return s;
}

double overlap_log_bound(const Matrix& a, int d, int k)
{
    const double dd = d;
    return dd * (dd + 1.0) / 2.0 *
           std::log(1.0 - (dd + 1.0) / (dd * k) + rho(a) / (dd * (dd + 1.0)));
}

double f_AB(const BaseGraph& g, const std::vector<Matrix>& A, const std::vector<Matrix>& B)
{
    if (static_cast<int>(A.size()) != g.num_vertices || static_cast<int>(B.size()) != g.num_edges())
        throw std::invalid_argument("f_AB: profile shape does not match the graph");
    const int k = static_cast<int>(A[0].rows());
    double f = 0.0;
    for (const auto& Av : A)
        f += entropy_h(Av);
    for (int e = 0; e < g.num_edges(); ++e) {
        auto [v, w] = g.edges[e];
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                for (int i2 = 0; i2 < k; ++i2)
                    for (int j2 = 0; j2 < k; ++j2) {
                        if (i == i2 || j == j2)
                            continue;
                        double x = B[e](i * k + j, i2 * k + j2);
                        if (x <= 0)
                            continue;
                        double num = A[v](i, j) * A[w](i2, j2);
                        if (num <= 0)
                            return neg_inf;
                        f += x * std::log(num / x);
                    }
    }
    return f;
}

double F_A(const BaseGraph& g, const std::vector<Matrix>& A)
{
    const int d = g.degree;
    const int k = static_cast<int>(A.at(0).rows());
    const double kk = k;
    const double lam = (kk - 1) * (kk - 1) + 1, lamp = (kk - 1) * (kk - 1) - 1;
    const double scale = kk * kk * (kk - 1) * (kk - 1);
    double ent = 0.0;
    for (const auto& Av : A)
        ent -= entropy_h(Av);
    double pen = 0.0;
    const double centre = 2.0 / (kk * kk);
    for (auto [v, w] : g.edges) {
        double s_plus = (A[v].array() + A[w].array() - centre).square().sum();
        double s_minus = (A[v] - A[w]).squaredNorm();
        pen += s_plus / (2 * lam) + s_minus / (2 * lamp) + 2.0 / scale * std::log(1.0 / scale);
    }
    return (d - 1.0) * ent - scale / 2.0 * pen;
}

std::vector<Matrix> F_A_gradient(const BaseGraph& g, const std::vector<Matrix>& A)
{
    const int d = g.degree;
    const int k = static_cast<int>(A.at(0).rows());
    const double kk = k;
    const double lam = (kk - 1) * (kk - 1) + 1, lamp = (kk - 1) * (kk - 1) - 1;
    const double scale = kk * kk * (kk - 1) * (kk - 1);
    const double centre = 1.0 / (kk * kk);
    std::vector<Matrix> grad(A.size());
    for (std::size_t v = 0; v < A.size(); ++v)
        grad[v] = (d - 1.0) * A[v].unaryExpr([](double x) { return safe_log(x) + 1.0; });
    for (auto [v, w] : g.edges) {
        Matrix av = A[v].array() - centre, aw = A[w].array() - centre;
        Matrix gp = (av + aw) / lam;
        Matrix gm = (av - aw) / lamp;
        grad[v] -= scale / 2.0 * (gp + gm);
        grad[w] -= scale / 2.0 * (gp - gm);
    }
    return grad;
}

std::vector<Matrix> uniform_pair_profile(int num_vertices, int k)
{
    return std::vector<Matrix>(num_vertices, Matrix::Constant(k, k, 1.0 / (k * k)));
}

std::vector<Matrix> uniform_pair_edge_profile(int num_edges, int k)
{
    const double b = 1.0 / (k * k * (k - 1.0) * (k - 1.0));
    Matrix m = Matrix::Zero(k * k, k * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            for (int i2 = 0; i2 < k; ++i2)
                for (int j2 = 0; j2 < k; ++j2)
                    if (i != i2 && j != j2)
                        m(i * k + j, i2 * k + j2) = b;
    return std::vector<Matrix>(num_edges, m);
}

Matrix tangent_projection(const Matrix& m)
{
    const double r = static_cast<double>(m.rows()), c = static_cast<double>(m.cols());
    Eigen::VectorXd rm = m.rowwise().mean();
    Eigen::RowVectorXd cm = m.colwise().mean();
    double all = m.mean();
    Matrix p = m;
    p.colwise() -= rm;
    p.rowwise() -= cm;
    p.array() += all;
    (void)r;
    (void)c;
    return p;
}

Matrix rescale_to_margins(Matrix m, double tol, int max_iter)
{
    const double target = 1.0 / static_cast<double>(m.rows());
    m = m.cwiseMax(1e-18);
    for (int it = 0; it < max_iter; ++it) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            m.row(i) *= target / m.row(i).sum();
        double err = 0.0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double s = m.col(j).sum();
            err = std::max(err, std::fabs(s - target));
            m.col(j) *= target / s;
        }
        if (err < tol)
            break;
    }
    return m;
}

namespace {

// Euclidean projection of each row onto the probability simplex.
void project_rows_to_simplex(Matrix& m)
{
    const Eigen::Index k = m.cols();
    std::vector<double> u(k);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < k; ++j)
            u[j] = m(i, j);
        std::sort(u.begin(), u.end(), std::greater<>());
        double cum = 0.0, theta = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) {
            cum += u[j];
            double t = (cum - 1.0) / static_cast<double>(j + 1);
            if (u[j] - t > 0)
                theta = t;
        }
        for (Eigen::Index j = 0; j < k; ++j)
            m(i, j) = std::max(m(i, j) - theta, 0.0);
    }
}

using Point = std::vector<Matrix>;

struct Problem {
    std::function<double(const Point&)> value;
    std::function<Point(const Point&)> grad;
    std::function<Point(const Point&, const Point&, double)> step; // feasible x + eta*dir
};

double max_abs_diff(const Point& x, const Point& y)
{
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        m = std::max(m, (x[i] - y[i]).cwiseAbs().maxCoeff());
    return m;
}

Point ascend(const Problem& p, Point x, const MaxOptions& opt)
{
    double fx = p.value(x);
    double eta = 0.1;
    for (int it = 0; it < opt.max_iter; ++it) {
        Point gr = p.grad(x);
        bool moved = false;
        while (eta > 1e-14) {
            Point y = p.step(x, gr, eta);
            double fy = p.value(y);
            if (fy > fx) {
                double delta = max_abs_diff(x, y);
                x = std::move(y);
                fx = fy;
                eta *= 1.5;
                moved = delta >= opt.tol;
                break;
            }
            eta *= 0.5;
        }
        if (!moved)
            break;
    }
    return x;
}

std::vector<double> flatten(const Point& x)
{
    std::vector<double> out;
    for (const auto& m : x)
        out.insert(out.end(), m.data(), m.data() + m.size());
    return out;
}

Problem make_problem(Objective obj, const BaseGraph& g, int k, const MaxOptions& opt)
{
    Problem p;
    auto simplex_step = [](const Point& x, const Point& dir, double eta) {
        Point y = x;
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] += eta * dir[i];
            project_rows_to_simplex(y[i]);
        }
        return y;
    };
    switch (obj) {
    case Objective::f_bstar:
        p.value = [&g](const Point& x) {
            try {
                return f_ab(g, x[0], b_star(g, x[0]));
            } catch (const degenerate_edge&) {
                return neg_inf;
            }
        };
        p.grad = [&g](const Point& x) {
            const Matrix& a = x[0];
            Matrix gr = a.unaryExpr([](double t) { return -(safe_log(t) + 1.0); });
            for (auto [v, w] : g.edges) {
                double z = 1.0 - a.row(v).dot(a.row(w));
                gr.row(v) -= a.row(w) / z;
                gr.row(w) -= a.row(v) / z;
            }
            return Point{gr};
        };
        p.step = simplex_step;
        break;
    case Objective::F_A:
        p.value = [&g](const Point& x) { return F_A(g, x); };
        p.grad = [&g](const Point& x) { return F_A_gradient(g, x); };
        p.step = [](const Point& x, const Point& dir, double eta) {
            Point y = x;
            for (std::size_t i = 0; i < y.size(); ++i) {
                y[i] += eta * tangent_projection(dir[i]);
                if ((y[i].array() < 0).any())
                    y[i] = rescale_to_margins(y[i]);
            }
            return y;
        };
        break;
    case Objective::rect_lhs: {
        const double c = opt.c;
        p.value = [c](const Point& x) { return rect_lhs(x[0], c); };
        p.grad = [c, k](const Point& x) {
            const Matrix& m = x[0];
            const double q = static_cast<double>(m.rows()), kk = k;
            double s = kk * q - kk - q + kk / q * rho(m);
            Matrix gr = m.unaryExpr([q](double t) { return -(safe_log(t) + 1.0) / q; });
            gr += c * (kk / q) * 2.0 * m / s;
            return Point{gr};
        };
        p.step = simplex_step;
        break;
    }
    }
    return p;
}

} // namespace

MaxReport verify_max_uniform(Objective obj, const BaseGraph& g, int k, int trials,
                             std::uint64_t seed, const MaxOptions& opt)
{
    if (trials < 1)
        throw std::invalid_argument("verify_max_uniform needs trials >= 1");
    if (k < 2)
        throw std::invalid_argument("verify_max_uniform needs k >= 2");
    Point uniform;
    switch (obj) {
    case Objective::f_bstar:
        uniform = {Matrix::Constant(g.num_vertices, k, 1.0 / k)};
        break;
    case Objective::F_A:
        if (k < 3)
            throw std::invalid_argument("F_A needs k >= 3");
        if (!(g.degree < ell_threshold(k)))
            throw hypothesis_error("F_A maximisation needs d < l_k");
        uniform = uniform_pair_profile(g.num_vertices, k);
        break;
    case Objective::rect_lhs:
        if (opt.q < 3 || opt.q < k)
            throw std::invalid_argument("rect_lhs needs q >= max(3, k)");
        if (!(opt.c < (k - 1.0) / (opt.q - 1.0) * c_q(opt.q)))
            throw hypothesis_error("rect_lhs needs c < (k-1)/(q-1) c_q");
        uniform = {Matrix::Constant(opt.q, k, 1.0 / k)};
        break;
    }
    Problem p = make_problem(obj, g, k, opt);
    MaxReport rep;
    rep.trials = trials;
    rep.uniform_value = p.value(uniform);
    rep.best_value = neg_inf;
    Point best;
    for (int t = 0; t < trials; ++t) {
        Engine eng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        Point x;
        switch (obj) {
        case Objective::f_bstar:
            x = {random_row_stochastic(g.num_vertices, k, eng)};
            break;
        case Objective::F_A:
            for (int v = 0; v < g.num_vertices; ++v)
                x.push_back(rescale_to_margins(random_row_stochastic(k, k, eng), 1e-14, 10000));
            break;
        case Objective::rect_lhs:
            x = {random_row_stochastic(opt.q, k, eng)};
            break;
        }
        x = ascend(p, std::move(x), opt);
        double fx = p.value(x);
        if (fx > rep.best_value) {
            rep.best_value = fx;
            best = x;
        }
    }
    rep.gap_to_uniform = rep.uniform_value - rep.best_value;
    rep.best_point = flatten(best);
    rep.best_distance = max_abs_diff(best, uniform);
    return rep;
}

double F_A_projected_gradient_norm(const BaseGraph& g, const std::vector<Matrix>& A)
{
    double s = 0.0;
    for (const auto& m : F_A_gradient(g, A))
        s += tangent_projection(m).squaredNorm();
    return std::sqrt(s);
}

} // namespace liftchroma
