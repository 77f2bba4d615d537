#include "liftchroma/lattice_tools.hpp"
#include "liftchroma/errors.hpp"
#include "liftchroma/moments_exact.hpp"
#include "liftchroma/stochastic_opt.hpp"
#include "liftchroma/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <queue>
#include <set>
#include <string>

namespace liftchroma {

int add_vertex(ConstraintGraph& g, std::string label)
{
    g.vertex_labels.push_back(std::move(label));
    return g.num_vertices() - 1;
}

int add_edge(ConstraintGraph& g, int u, int v, std::string label)
{
    g.edges.emplace_back(u, v);
    g.edge_labels.push_back(std::move(label));
    return g.num_edges() - 1;
}

ConstraintGraph read_constraint_graph(std::istream& in)
{
    int nv = 0, ne = 0;
    if (!(in >> nv >> ne) || nv < 0 || ne < 0)
        throw std::invalid_argument("constraint graph text: expected header \"V E\"");
    ConstraintGraph g;
    for (int v = 0; v < nv; ++v)
        add_vertex(g, std::to_string(v));
    for (int e = 0; e < ne; ++e) {
        int u, v;
        if (!(in >> u >> v))
            throw std::invalid_argument("constraint graph text: expected " + std::to_string(ne) +
                                        " edges, got " + std::to_string(e));
        add_edge(g, u, v, std::to_string(e));
    }
    validate(g, true);
    return g;
}

void validate(const ConstraintGraph& g, bool allow_isolated)
{
    if (g.edge_labels.size() != g.edges.size())
        throw std::invalid_argument("constraint graph: edge labels do not match edges");
    std::vector<int> deg(g.num_vertices(), 0);
    for (auto [u, v] : g.edges) {
        if (u < 0 || v < 0 || u >= g.num_vertices() || v >= g.num_vertices())
            throw std::invalid_argument("constraint graph: bad vertex index");
        if (u == v)
            throw std::invalid_argument("constraint graph: loop at " + g.vertex_labels[u]);
        ++deg[u];
        ++deg[v];
    }
    if (!allow_isolated)
        for (int v = 0; v < g.num_vertices(); ++v)
            if (deg[v] == 0)
                throw std::invalid_argument("constraint graph: isolated vertex " +
                                            g.vertex_labels[v]);
}

namespace {

std::vector<std::vector<std::pair<int, int>>> adjacency(const ConstraintGraph& g)
{
    std::vector<std::vector<std::pair<int, int>>> adj(g.num_vertices());
    for (int e = 0; e < g.num_edges(); ++e) {
        auto [u, v] = g.edges[e];
        adj[u].emplace_back(v, e);
        adj[v].emplace_back(u, e);
    }
    return adj;
}

} // namespace

std::vector<int> bipartition(const ConstraintGraph& g)
{
    auto adj = adjacency(g);
    std::vector<int> side(g.num_vertices(), -1);
    for (int s = 0; s < g.num_vertices(); ++s) {
        if (side[s] >= 0)
            continue;
        side[s] = 0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (auto [w, e] : adj[u]) {
                if (side[w] < 0) {
                    side[w] = 1 - side[u];
                    q.push(w);
                } else if (side[w] == side[u]) {
                    return {};
                }
            }
        }
    }
    return side;
}

bool is_bipartite(const ConstraintGraph& g)
{
    return g.num_vertices() == 0 || !bipartition(g).empty();
}

int components(const ConstraintGraph& g, std::vector<int>& comp)
{
    auto adj = adjacency(g);
    comp.assign(g.num_vertices(), -1);
    int c = 0;
    for (int s = 0; s < g.num_vertices(); ++s) {
        if (comp[s] >= 0)
            continue;
        comp[s] = c;
        std::vector<int> stack{s};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (auto [w, e] : adj[u])
                if (comp[w] < 0) {
                    comp[w] = c;
                    stack.push_back(w);
                }
        }
        ++c;
    }
    return c;
}

IntMatrix incidence_unsigned(const ConstraintGraph& g)
{
    IntMatrix d = IntMatrix::Zero(g.num_vertices(), g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
        d(g.edges[e].first, e) = 1;
        d(g.edges[e].second, e) = 1;
    }
    return d;
}

IntMatrix incidence_signed(const ConstraintGraph& g, const std::vector<bool>& orientation)
{
    if (!orientation.empty() && static_cast<int>(orientation.size()) != g.num_edges())
        throw std::invalid_argument("orientation size does not match the edge count");
    IntMatrix d = IntMatrix::Zero(g.num_vertices(), g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
        long long s = (orientation.empty() || orientation[e]) ? 1 : -1;
        d(g.edges[e].first, e) = s;
        d(g.edges[e].second, e) = -s;
    }
    return d;
}

IntMatrix constraint_matrix(const ConstraintGraph& g)
{
    return is_bipartite(g) ? incidence_unsigned(g) : incidence_signed(g);
}

namespace {

using QMatrix = std::vector<std::vector<mpq_class>>;

// Reduced row echelon form in place; returns the pivot columns.
std::vector<int> rref(QMatrix& m, int cols)
{
    std::vector<int> pivots;
    int row = 0;
    const int rows = static_cast<int>(m.size());
    for (int c = 0; c < cols && row < rows; ++c) {
        int p = -1;
        for (int i = row; i < rows; ++i)
            if (m[i][c] != 0) {
                p = i;
                break;
            }
        if (p < 0)
            continue;
        std::swap(m[p], m[row]);
        mpq_class inv = 1 / m[row][c];
        for (int j = c; j < cols; ++j)
            m[row][j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == row || m[i][c] == 0)
                continue;
            mpq_class f = m[i][c];
            for (int j = c; j < cols; ++j)
                m[i][j] -= f * m[row][j];
        }
        pivots.push_back(c);
        ++row;
    }
    return pivots;
}

QMatrix to_rational(const IntMatrix& d)
{
    QMatrix m(d.rows(), std::vector<mpq_class>(d.cols()));
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j)
            m[i][j] = static_cast<long>(d(i, j));
    return m;
}

long long to_ll(const mpz_class& z)
{
    if (!z.fits_slong_p())
        throw std::overflow_error("kernel basis entry does not fit in 64 bits");
    return z.get_si();
}

} // namespace

long long rank_exact(const IntMatrix& d)
{
    QMatrix m = to_rational(d);
    return static_cast<long long>(rref(m, static_cast<int>(d.cols())).size());
}

IntMatrix kernel_basis(const IntMatrix& d)
{
    const int cols = static_cast<int>(d.cols());
    QMatrix m = to_rational(d);
    auto pivots = rref(m, cols);
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivots)
        is_pivot[c] = true;
    const int nullity = cols - static_cast<int>(pivots.size());
    IntMatrix u(cols, nullity);
    int col = 0;
    for (int f = 0; f < cols; ++f) {
        if (is_pivot[f])
            continue;
        std::vector<mpq_class> v(cols, 0);
        v[f] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = -m[r][f];
        mpz_class den = 1, num = 0;
        for (auto& x : v)
            den = lcm(den, mpz_class(x.get_den()));
        std::vector<mpz_class> z(cols);
        for (int i = 0; i < cols; ++i) {
            mpq_class t = v[i] * den;
            z[i] = t.get_num();
            num = gcd(num, z[i]);
        }
        for (int i = 0; i < cols; ++i)
            u(i, col) = to_ll(z[i] / num);
        ++col;
    }
    // rank-nullity
    if (static_cast<long long>(pivots.size()) + u.cols() != cols)
        throw std::logic_error("kernel_basis: rank-nullity violated");
    return u;
}

IntMatrix cycle_basis(const ConstraintGraph& g)
{
    const bool bip = is_bipartite(g);
    auto adj = adjacency(g);
    const int nv = g.num_vertices();
    std::vector<int> parent(nv, -1), parent_edge(nv, -1), depth(nv, -1);
    std::vector<bool> tree(g.num_edges(), false);
    for (int s = 0; s < nv; ++s) {
        if (depth[s] >= 0)
            continue;
        depth[s] = 0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (auto [w, e] : adj[u])
                if (depth[w] < 0) {
                    depth[w] = depth[u] + 1;
                    parent[w] = u;
                    parent_edge[w] = e;
                    tree[e] = true;
                    q.push(w);
                }
        }
    }
    std::vector<Eigen::Matrix<long long, Eigen::Dynamic, 1>> cols;
    for (int e = 0; e < g.num_edges(); ++e) {
        if (tree[e])
            continue;
        auto [u, v] = g.edges[e];
        // walk u -> v along e, then v back to u through the tree
        std::vector<std::pair<int, int>> up_v, up_u; // (edge, vertex the step starts from)
        int a = v, b = u;
        while (depth[a] > depth[b]) {
            up_v.emplace_back(parent_edge[a], a);
            a = parent[a];
        }
        while (depth[b] > depth[a]) {
            up_u.emplace_back(parent_edge[b], b);
            b = parent[b];
        }
        while (a != b) {
            up_v.emplace_back(parent_edge[a], a);
            a = parent[a];
            up_u.emplace_back(parent_edge[b], b);
            b = parent[b];
        }
        std::vector<std::pair<int, int>> walk{{e, u}};
        walk.insert(walk.end(), up_v.begin(), up_v.end());
        // down from the common ancestor to u: reverse of up_u, starting at the parent side
        for (auto it = up_u.rbegin(); it != up_u.rend(); ++it) {
            int from = g.edges[it->first].first == it->second ? g.edges[it->first].second
                                                              : g.edges[it->first].first;
            walk.emplace_back(it->first, from);
        }
        Eigen::Matrix<long long, Eigen::Dynamic, 1> x =
            Eigen::Matrix<long long, Eigen::Dynamic, 1>::Zero(g.num_edges());
        for (std::size_t i = 0; i < walk.size(); ++i) {
            auto [ed, from] = walk[i];
            long long s;
            if (bip)
                s = (i % 2 == 0) ? 1 : -1;
            else
                s = g.edges[ed].first == from ? 1 : -1;
            x(ed) += s;
        }
        cols.push_back(x);
    }
    IntMatrix u(g.num_edges(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        u.col(static_cast<Eigen::Index>(c)) = cols[c];
    return u;
}

mpz_class bareiss_determinant(std::vector<std::vector<mpz_class>> m)
{
    const int n = static_cast<int>(m.size());
    if (n == 0)
        return 1;
    int sign = 1;
    mpz_class prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m[k][k] == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (m[i][k] != 0) {
                    p = i;
                    break;
                }
            if (p < 0)
                return 0;
            std::swap(m[p], m[k]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                m[i][j] = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

mpz_class tau_maximal_forests(const ConstraintGraph& g)
{
    std::vector<int> comp;
    int nc = components(g, comp);
    std::vector<std::vector<int>> members(nc);
    std::vector<int> local(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) {
        local[v] = static_cast<int>(members[comp[v]].size());
        members[comp[v]].push_back(v);
    }
    std::vector<std::vector<std::vector<mpz_class>>> lap(nc);
    for (int c = 0; c < nc; ++c) {
        int s = static_cast<int>(members[c].size());
        lap[c].assign(s, std::vector<mpz_class>(s, 0));
    }
    for (auto [u, v] : g.edges) {
        auto& l = lap[comp[u]];
        int a = local[u], b = local[v];
        l[a][a] += 1;
        l[b][b] += 1;
        l[a][b] -= 1;
        l[b][a] -= 1;
    }
    mpz_class tau = 1;
    for (auto& l : lap) {
        // drop the last row and column
        l.pop_back();
        for (auto& row : l)
            row.pop_back();
        tau *= bareiss_determinant(std::move(l));
    }
    return tau;
}

namespace {

Eigen::MatrixXd gram_quotient_parts(const Eigen::MatrixXd& h, const Eigen::MatrixXd& u,
                                    double& det_utu)
{
    if (h.rows() != h.cols() || h.rows() != u.rows())
        throw std::invalid_argument("det_restricted: shape mismatch");
    Eigen::MatrixXd utu = u.transpose() * u;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(utu);
    if (lu.rank() < u.cols())
        throw std::invalid_argument("det_restricted: basis is rank-deficient");
    det_utu = lu.determinant();
    return u.transpose() * h * u;
}

LogValue log_abs_det(const Eigen::MatrixXd& m)
{
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const Eigen::MatrixXd& lu_m = lu.matrixLU();
    LogValue out{0.0, static_cast<int>(lu.permutationP().determinant())};
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double x = lu_m(i, i);
        if (x == 0)
            return {-std::numeric_limits<double>::infinity(), 0};
        if (x < 0)
            out.sign = -out.sign;
        out.log += std::log(std::fabs(x));
    }
    return out;
}

} // namespace

LogValue log_det_restricted(const Eigen::MatrixXd& h, const Eigen::MatrixXd& u)
{
    double det_utu = 0.0;
    Eigen::MatrixXd uhu = gram_quotient_parts(h, u, det_utu);
    if (u.cols() == 0)
        return {0.0, 1};
    LogValue num = log_abs_det(uhu);
    LogValue den = log_abs_det(u.transpose() * u);
    return {num.log - den.log, num.sign * den.sign};
}

double det_restricted(const Eigen::MatrixXd& h, const Eigen::MatrixXd& u)
{
    return log_det_restricted(h, u).value();
}

ConstraintGraph build_gamma_b(const BaseGraph& g, int k)
{
    if (k < 3)
        throw std::invalid_argument("build_gamma_b needs k >= 3");
    ConstraintGraph gm;
    const int ne = g.num_edges();
    for (int e = 0; e < ne; ++e) {
        for (int i = 0; i < k; ++i)
            add_vertex(gm, "w_" + std::to_string(e) + ",1," + std::to_string(i));
        for (int i = 0; i < k; ++i)
            add_vertex(gm, "w_" + std::to_string(e) + ",2," + std::to_string(i));
    }
    for (int e = 0; e < ne; ++e)
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (i != j)
                    add_edge(gm, e * 2 * k + i, e * 2 * k + k + j,
                             "b_" + std::to_string(e) + "," + std::to_string(i) + "," +
                                 std::to_string(j));
    // each component is K_{k,k} minus a perfect matching
    std::vector<int> comp;
    if (components(gm, comp) != ne)
        throw std::logic_error("build_gamma_b: wrong component count");
    std::vector<std::set<Edge>> pairs(ne);
    std::vector<int> deg(gm.num_vertices(), 0);
    for (auto [u, v] : gm.edges) {
        pairs[comp[u]].insert({u, v});
        ++deg[u];
        ++deg[v];
    }
    for (int c = 0; c < ne; ++c)
        if (static_cast<int>(pairs[c].size()) != k * (k - 1))
            throw std::logic_error("build_gamma_b: component is not K_{k,k} - M");
    for (int d : deg)
        if (d != k - 1)
            throw std::logic_error("build_gamma_b: component is not K_{k,k} - M");
    return gm;
}

ConstraintGraph build_gamma_a(const BaseGraph& g, int k)
{
    if (k < 3)
        throw std::invalid_argument("build_gamma_a needs k >= 3");
    ConstraintGraph gm;
    const int nv = g.num_vertices;
    for (int v = 0; v < nv; ++v) {
        for (int i = 0; i < k; ++i)
            add_vertex(gm, "w_" + std::to_string(v) + ",1," + std::to_string(i));
        for (int j = 0; j < k; ++j)
            add_vertex(gm, "w_" + std::to_string(v) + ",2," + std::to_string(j));
    }
    for (int v = 0; v < nv; ++v)
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                add_edge(gm, v * 2 * k + i, v * 2 * k + k + j,
                         "a_" + std::to_string(v) + "," + std::to_string(i) + "," +
                             std::to_string(j));
    std::vector<int> comp;
    if (components(gm, comp) != nv)
        throw std::logic_error("build_gamma_a: wrong component count");
    std::vector<std::set<Edge>> pairs(nv);
    for (auto [u, w] : gm.edges)
        pairs[comp[u]].insert({u, w});
    for (int c = 0; c < nv; ++c)
        if (static_cast<int>(pairs[c].size()) != k * k)
            throw std::logic_error("build_gamma_a: component is not K_{k,k}");
    return gm;
}

Eigen::VectorXd gamma_b_cycle_solution(const BaseGraph& g, int k)
{
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.num_edges()) * k * (k - 1));
    int idx = 0;
    for (int e = 0; e < g.num_edges(); ++e)
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                if (i == j)
                    continue;
                if (j == (i + 1) % k)
                    b(idx) = 1.0 / k;
                ++idx;
            }
    return b;
}

Eigen::MatrixXd problem_hessian(const LatticeProblem& p, const Eigen::VectorXd& x)
{
    if (p.hessian)
        return p.hessian(x);
    const Eigen::Index n = x.size();
    const double h = 1e-4;
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            Eigen::VectorXd a = x, b = x, c = x, d = x;
            a(i) += h;
            a(j) += h;
            b(i) += h;
            b(j) -= h;
            c(i) -= h;
            c(j) += h;
            d(i) -= h;
            d(j) -= h;
            out(i, j) = out(j, i) = (p.phi(a) - p.phi(b) - p.phi(c) + p.phi(d)) / (4 * h * h);
        }
    return out;
}

namespace {

Eigen::VectorXd problem_gradient(const LatticeProblem& p, const Eigen::VectorXd& x)
{
    if (p.gradient)
        return p.gradient(x);
    const double h = 1e-6;
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd a = x, b = x;
        a(i) += h;
        b(i) -= h;
        g(i) = (p.phi(a) - p.phi(b)) / (2 * h);
    }
    return g;
}

Eigen::MatrixXd to_double(const IntMatrix& m)
{
    return m.cast<double>();
}

void check_problem(const LatticeProblem& p)
{
    validate(p.gamma);
    const int ne = p.gamma.num_edges(), nv = p.gamma.num_vertices();
    if (static_cast<int>(p.y.size()) != nv || static_cast<int>(p.box.size()) != ne ||
        p.xhat.size() != ne)
        throw std::invalid_argument("lattice problem: shape mismatch");
    if (!p.phi || !p.psi || !p.log_c_n)
        throw std::invalid_argument("lattice problem: missing callback");
    Eigen::VectorXd y(nv);
    for (int v = 0; v < nv; ++v)
        y(v) = p.y[v].get_d();
    Eigen::VectorXd res = to_double(constraint_matrix(p.gamma)) * p.xhat - y;
    if (res.cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("lattice problem: D xhat != y");
    for (int e = 0; e < ne; ++e) {
        auto [lo, hi] = p.box[e];
        if (!(p.xhat(e) > lo && p.xhat(e) < hi))
            throw hypothesis_error("lattice problem: maximizer is not interior to the box (" +
                                   p.gamma.edge_labels[e] + ")");
    }
}

} // namespace

Eigen::VectorXd refine_maximizer(const LatticeProblem& p, Eigen::VectorXd x, int iters,
                                 double tol)
{
    Eigen::MatrixXd u = to_double(kernel_basis(constraint_matrix(p.gamma)));
    if (u.cols() == 0)
        return x;
    for (int it = 0; it < iters; ++it) {
        Eigen::MatrixXd h = problem_hessian(p, x);
        Eigen::VectorXd g = problem_gradient(p, x);
        Eigen::VectorXd step = (u.transpose() * h * u).ldlt().solve(u.transpose() * g);
        Eigen::VectorXd dx = -u * step;
        x += dx;
        if (dx.cwiseAbs().maxCoeff() < tol)
            break;
    }
    return x;
}

LaplaceParts laplace_parts(const LatticeProblem& p, double n)
{
    check_problem(p);
    if (!(n > 0))
        throw std::invalid_argument("laplace_estimate needs n > 0");
    IntMatrix d = constraint_matrix(p.gamma);
    Eigen::MatrixXd u = to_double(kernel_basis(d));
    LaplaceParts out;
    out.r = static_cast<int>(u.cols());
    Eigen::MatrixXd h = problem_hessian(p, p.xhat);
    LogValue det = log_det_restricted(-h, u);
    if (det.sign <= 0)
        throw numeric_instability("laplace_estimate: det(-H|_V) is not positive");
    out.log_det = det.log;
    mpz_class tau = tau_maximal_forests(p.gamma);
    long exp2 = 0;
    double mant = mpz_get_d_2exp(&exp2, tau.get_mpz_t());
    out.log_tau = std::log(mant) + exp2 * std::numbers::ln2;
    double psi = p.psi(p.xhat);
    if (psi == 0) {
        out.estimate = {-std::numeric_limits<double>::infinity(), 0};
        return out;
    }
    out.estimate.sign = psi > 0 ? 1 : -1;
    out.estimate.log = std::log(std::fabs(psi)) - out.log_tau / 2 - out.log_det / 2 +
                       out.r / 2.0 * std::log(2 * std::numbers::pi * n) + p.log_c_n(n) +
                       n * p.phi(p.xhat);
    return out;
}

LogValue laplace_estimate(const LatticeProblem& p, double n)
{
    return laplace_parts(p, n).estimate;
}

namespace {

double sum_xlogx(const Eigen::VectorXd& x)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x(i) > 0)
            s += x(i) * std::log(x(i));
    return s;
}

LatticeProblem ey_problem_for(int nv, int ne, int k)
{
    LatticeProblem p;
    const int kk = k;
    const int num_vars = ne * kk * (kk - 1);
    p.y.assign(2 * kk * ne, mpq_class(1, kk));
    p.box.assign(num_vars, {0.0, 1.0 / kk});
    p.xhat = Eigen::VectorXd::Constant(num_vars, 1.0 / (kk * (kk - 1.0)));
    const double V = nv, E = ne;
    p.phi = [V, E, kk](const Eigen::VectorXd& b) {
        return V * std::log(kk) - 2.0 * E * std::log(kk) - sum_xlogx(b);
    };
    p.psi = [](const Eigen::VectorXd& b) {
        double lg = 0.0;
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            if (!(b(i) > 0))
                return 0.0;
            lg -= 0.5 * std::log(b(i));
        }
        return std::exp(lg);
    };
    const double r = (kk * kk - 3.0 * kk + 1.0) * E;
    p.log_c_n = [V, E, kk, r](double n) {
        return (kk * V / 2.0 - kk * E) * std::log(kk) -
               ((kk - 1.0) * V / 2.0 + r / 2.0) * std::log(2 * std::numbers::pi * n);
    };
    p.gradient = [](const Eigen::VectorXd& b) {
        return Eigen::VectorXd(-(b.array().log() + 1.0));
    };
    p.hessian = [](const Eigen::VectorXd& b) {
        return Eigen::MatrixXd(Eigen::VectorXd(-b.array().inverse()).asDiagonal());
    };
    return p;
}

} // namespace

LatticeProblem ey_problem(const BaseGraph& g, int k)
{
    validate(g);
    LatticeProblem p = ey_problem_for(g.num_vertices, g.num_edges(), k);
    p.gamma = build_gamma_b(g, k);
    return p;
}

LatticeProblem ey_edge_problem(int k)
{
    // the vertex part is dropped: one edge with |V| = 0
    LatticeProblem p = ey_problem_for(0, 1, k);
    BaseGraph single;
    single.num_vertices = 2;
    single.edges = {{0, 1}};
    single.degree = 1;
    p.gamma = build_gamma_b(single, k);
    return p;
}

mpq_class ey_edge_term(const std::vector<int>& counts, int n, int k)
{
    if (n % k != 0)
        throw std::invalid_argument("ey_edge_term needs k | n");
    mpz_class num = 1, den = factorial(n);
    mpz_class fq = factorial(n / k);
    for (int i = 0; i < 2 * k; ++i)
        num *= fq;
    for (int c : counts) {
        if (c < 0)
            return 0;
        den *= factorial(c);
    }
    mpq_class out(num, den);
    out.canonicalize();
    return out;
}

LatticeProblem ey2_problem(const BaseGraph& g, int k)
{
    const int d = validate(g);
    if (k < 3)
        throw std::invalid_argument("ey2_problem needs k >= 3");
    if (!(d < ell_threshold(k)))
        throw hypothesis_error("ey2_problem needs d < l_k");
    LatticeProblem p;
    p.gamma = build_gamma_a(g, k);
    const int nv = g.num_vertices, ne = g.num_edges();
    const int k2 = k * k;
    const int num_vars = nv * k2;
    p.y.assign(2 * k * nv, mpq_class(1, k));
    p.box.assign(num_vars, {0.0, 1.0 / k});
    p.xhat = Eigen::VectorXd::Constant(num_vars, 1.0 / k2);
    auto unpack = [nv, k](const Eigen::VectorXd& x) {
        std::vector<Matrix> a(nv, Matrix(k, k));
        for (int v = 0; v < nv; ++v)
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    a[v](i, j) = x(v * k * k + i * k + j);
        return a;
    };
    BaseGraph base = g;
    p.phi = [base, unpack](const Eigen::VectorXd& x) { return F_A(base, unpack(x)); };
    p.gradient = [base, unpack, nv, k](const Eigen::VectorXd& x) {
        auto gr = F_A_gradient(base, unpack(x));
        Eigen::VectorXd out(x.size());
        for (int v = 0; v < nv; ++v)
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    out(v * k * k + i * k + j) = gr[v](i, j);
        return out;
    };
    const double kk = k;
    const double ll = lambda_pair(k) * lambda_prime_pair(k);
    const double diag_c = d * kk * kk * std::pow(kk - 1, 4) / ll;
    const double off_c = kk * kk * (kk - 1) * (kk - 1) / ll;
    p.hessian = [base, d, k2, diag_c, off_c](const Eigen::VectorXd& x) {
        const Eigen::Index n = x.size();
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            h(i, i) = (d - 1.0) / x(i) - diag_c;
        for (auto [v, w] : base.edges)
            for (int t = 0; t < k2; ++t) {
                h(v * k2 + t, w * k2 + t) += off_c;
                h(w * k2 + t, v * k2 + t) += off_c;
            }
        return h;
    };
    p.psi = [d](const Eigen::VectorXd& x) {
        double lg = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (!(x(i) > 0))
                return 0.0;
            lg += 0.5 * (d - 1.0) * std::log(x(i));
        }
        return std::exp(lg);
    };
    const double V = nv, E = ne;
    p.log_c_n = [V, E, k, kk](double n) {
        return E / 2.0 * log_gamma_nk(n, k) +
               (-(kk * kk - 1.0) * V / 2.0 + (2.0 * kk * kk - 1.0) * E / 2.0) *
                   std::log(2 * std::numbers::pi * n);
    };
    return p;
}

WindowedSum windowed_sum(const LatticeProblem& p, int n, double gamma, const LatticeTerm& term,
                         std::uint64_t cap)
{
    check_problem(p);
    if (n < 1)
        throw std::invalid_argument("windowed_sum needs n >= 1");
    if (gamma < 0)
        throw std::invalid_argument("windowed_sum needs gamma >= 0");
    const ConstraintGraph& gm = p.gamma;
    const int ne = gm.num_edges(), nv = gm.num_vertices();
    IntMatrix d = constraint_matrix(gm);
    const bool nonneg_unsigned = is_bipartite(gm);

    std::vector<long long> target(nv);
    for (int v = 0; v < nv; ++v) {
        mpq_class t = p.y[v] * n;
        if (t.get_den() != 1)
            return {}; // no lattice points
        target[v] = t.get_num().get_si();
    }
    std::vector<long long> lo(ne), hi(ne);
    for (int e = 0; e < ne; ++e) {
        lo[e] = static_cast<long long>(std::ceil(p.box[e].first * n - 1e-9));
        hi[e] = static_cast<long long>(std::floor(p.box[e].second * n + 1e-9));
    }
    // last_of[e]: vertices whose final incident edge (in index order) is e
    std::vector<std::vector<int>> last_of(ne);
    std::vector<int> last(nv, -1);
    for (int e = 0; e < ne; ++e) {
        last[gm.edges[e].first] = e;
        last[gm.edges[e].second] = e;
    }
    for (int v = 0; v < nv; ++v)
        if (last[v] >= 0)
            last_of[last[v]].push_back(v);

    const double radius = gamma * std::log(static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
    struct Point {
        std::vector<int> x;
        double dist;
    };
    std::vector<Point> pts;
    std::vector<long long> partial(nv, 0);
    std::vector<int> x(ne, 0);

    std::function<void(int)> dfs = [&](int e) {
        if (e == ne) {
            if (pts.size() >= cap)
                throw too_large_error("windowed_sum: more than cap lattice points");
            double dist = 0.0;
            for (int i = 0; i < ne; ++i)
                dist = std::max(dist, std::fabs(x[i] / static_cast<double>(n) - p.xhat(i)));
            pts.push_back({x, dist});
            return;
        }
        auto [u, v] = gm.edges[e];
        long long du = d(u, e), dv = d(v, e);
        long long from = lo[e], to = hi[e];
        // forced value when e closes a constraint
        for (int w : last_of[e]) {
            long long coef = d(w, e);
            long long rest = target[w] - partial[w];
            if (rest % coef != 0)
                return;
            long long val = rest / coef;
            from = std::max(from, val);
            to = std::min(to, val);
        }
        for (long long val = from; val <= to; ++val) {
            partial[u] += du * val;
            partial[v] += dv * val;
            bool ok = true;
            if (nonneg_unsigned)
                ok = partial[u] <= target[u] && partial[v] <= target[v];
            for (int w : last_of[e])
                ok = ok && partial[w] == target[w];
            if (ok) {
                x[e] = static_cast<int>(val);
                dfs(e + 1);
            }
            partial[u] -= du * val;
            partial[v] -= dv * val;
            if (nonneg_unsigned && (partial[u] + du * (val + 1) > target[u] ||
                                     partial[v] + dv * (val + 1) > target[v]))
                break;
        }
    };
    dfs(0);

    WindowedSum out;
    out.radius = radius;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& pt : pts)
        nearest = std::min(nearest, pt.dist);
    for (const auto& pt : pts) {
        mpq_class t = term(pt.x);
        out.full += t;
        ++out.points_total;
        if (pt.dist < radius || pt.dist <= nearest + 1e-12) {
            out.window += t;
            ++out.points_window;
        }
    }
    out.ratio = out.full == 0 ? 0.0 : mpq_class(out.window / out.full).get_d();
    return out;
}

} // namespace liftchroma
