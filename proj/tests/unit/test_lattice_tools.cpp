#include <doctest.h>

#include "../oracles.hpp"
#include "liftchroma/asymptotics.hpp"
#include "liftchroma/errors.hpp"
#include "liftchroma/lattice_tools.hpp"
#include "liftchroma/moments_exact.hpp"
#include "liftchroma/rng.hpp"

#include <cmath>
#include <sstream>

using namespace liftchroma;

namespace {

ConstraintGraph complete_bipartite(int k, bool minus_matching)
{
    ConstraintGraph g;
    for (int i = 0; i < 2 * k; ++i)
        add_vertex(g, std::to_string(i));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (!minus_matching || i != j)
                add_edge(g, i, k + j, "e");
    return g;
}

oracle::EdgeList edge_list(const ConstraintGraph& g)
{
    return oracle::EdgeList(g.edges.begin(), g.edges.end());
}

Eigen::MatrixXd to_double(const IntMatrix& m)
{
    Eigen::MatrixXd out = m.cast<double>();
    return out;
}

// D x = 0 checked in exact integers.
bool in_kernel(const IntMatrix& d, const IntMatrix& u)
{
    IntMatrix p = d * u;
    return (p.array() == 0).all();
}

// Random bipartite multigraph with sides a and b, no isolated vertices.
ConstraintGraph random_bipartite(Engine& eng, int a, int b, int m)
{
    ConstraintGraph g;
    for (int i = 0; i < a + b; ++i)
        add_vertex(g, std::to_string(i));
    for (int i = 0; i < a + b; ++i) {
        int u = i < a ? i : static_cast<int>(uniform_below(eng, a));
        int v = i < a ? a + static_cast<int>(uniform_below(eng, b)) : i;
        add_edge(g, u, v, "e");
    }
    for (int e = 0; e < m; ++e)
        add_edge(g, static_cast<int>(uniform_below(eng, a)),
                 a + static_cast<int>(uniform_below(eng, b)), "e");
    return g;
}

double log_mpq(const mpq_class& q)
{
    long en, ed;
    double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
    double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
    return std::log(mn) - std::log(md) + (en - ed) * std::log(2.0);
}

} // namespace

TEST_CASE("incidence matrices")
{
    ConstraintGraph one;
    add_vertex(one, "a");
    add_vertex(one, "b");
    add_edge(one, 0, 1, "x");
    IntMatrix u = incidence_unsigned(one), s = incidence_signed(one);
    CHECK(u(0, 0) == 1);
    CHECK(u(1, 0) == 1);
    CHECK(s(0, 0) == 1);
    CHECK(s(1, 0) == -1);
    CHECK(incidence_signed(one, {false})(0, 0) == -1);
    CHECK(kernel_basis(u).cols() == 0);

    auto gb = build_gamma_b(make_complete_graph(3), 3);
    IntMatrix d = constraint_matrix(gb);
    CHECK(d.rows() == 18);
    CHECK(d.cols() == 18);
    CHECK(rank_exact(d) == 15);
}

TEST_CASE("validation and parsing")
{
    ConstraintGraph g;
    add_vertex(g, "a");
    add_vertex(g, "b");
    add_vertex(g, "c");
    add_edge(g, 0, 1, "x");
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
    CHECK_NOTHROW(validate(g, true));
    add_edge(g, 2, 2, "loop");
    CHECK_THROWS_AS(validate(g, true), std::invalid_argument);

    std::istringstream in("4 4\n0 1\n1 2\n2 3\n3 0\n");
    auto c4 = read_constraint_graph(in);
    CHECK(c4.num_vertices() == 4);
    CHECK(is_bipartite(c4));
    CHECK(tau_maximal_forests(c4) == 4);
}

TEST_CASE("kernel bases")
{
    auto gb = build_gamma_b(make_complete_graph(3), 3);
    IntMatrix d = constraint_matrix(gb);
    IntMatrix ub = kernel_basis(d), uc = cycle_basis(gb);
    CHECK(ub.cols() == 3);
    CHECK(uc.cols() == 3);
    CHECK(in_kernel(d, ub));
    CHECK(in_kernel(d, uc));

    auto ga = build_gamma_a(make_complete_graph(4), 3);
    IntMatrix da = constraint_matrix(ga);
    CHECK(kernel_basis(da).cols() == 16);
    CHECK(cycle_basis(ga).cols() == 16);
    CHECK(in_kernel(da, kernel_basis(da)));

    // a tree has no kernel
    ConstraintGraph tree;
    for (int i = 0; i < 5; ++i)
        add_vertex(tree, std::to_string(i));
    for (int i = 1; i < 5; ++i)
        add_edge(tree, 0, i, "e");
    CHECK(kernel_basis(constraint_matrix(tree)).cols() == 0);
    CHECK(cycle_basis(tree).cols() == 0);

    // odd cycle with a chord: signed incidence is used
    ConstraintGraph odd;
    for (int i = 0; i < 5; ++i)
        add_vertex(odd, std::to_string(i));
    for (int i = 0; i < 5; ++i)
        add_edge(odd, i, (i + 1) % 5, "e");
    add_edge(odd, 0, 2, "chord");
    CHECK_FALSE(is_bipartite(odd));
    IntMatrix dd = constraint_matrix(odd);
    CHECK(in_kernel(dd, kernel_basis(dd)));
    CHECK(in_kernel(dd, cycle_basis(odd)));
    CHECK(kernel_basis(dd).cols() == 2);
}

TEST_CASE("bipartite sign flip keeps the kernel")
{
    auto g = complete_bipartite(4, false);
    auto side = bipartition(g);
    IntMatrix u = incidence_unsigned(g), s = incidence_signed(g);
    // negate the rows of one side
    IntMatrix flipped = u;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (side[v])
            flipped.row(v) *= -1;
    CHECK(flipped == s);
    IntMatrix ku = kernel_basis(u);
    CHECK(in_kernel(s, ku));
    CHECK(rank_exact(u) == rank_exact(s));
}

TEST_CASE("rank of bipartite incidence matrices")
{
    Engine eng(17);
    for (int t = 0; t < 100; ++t) {
        auto g = random_bipartite(eng, 1 + t % 4, 1 + (t / 4) % 4, t % 6);
        std::vector<int> comp;
        int c = components(g, comp);
        CHECK(rank_exact(incidence_unsigned(g)) == g.num_vertices() - c);
    }
}

TEST_CASE("matrix-tree closed forms")
{
    for (int k = 3; k <= 6; ++k) {
        mpz_class full, minus;
        mpz_ui_pow_ui(full.get_mpz_t(), k, 2 * k - 2);
        mpz_class a, b;
        mpz_ui_pow_ui(a.get_mpz_t(), k, k - 2);
        mpz_ui_pow_ui(b.get_mpz_t(), k - 2, k - 1);
        minus = (k - 1) * a * b;
        CHECK(tau_maximal_forests(complete_bipartite(k, false)) == full);
        CHECK(tau_maximal_forests(complete_bipartite(k, true)) == minus);
    }
    CHECK(tau_maximal_forests(complete_bipartite(3, true)) == 6);
    CHECK(tau_maximal_forests(complete_bipartite(3, false)) == 81);
    CHECK(tau_maximal_forests(build_gamma_b(make_complete_graph(3), 3)) == 216);
}

TEST_CASE("maximal forests against subset enumeration")
{
    Engine eng(2);
    for (int t = 0; t < 100; ++t) {
        int a = 1 + static_cast<int>(uniform_below(eng, 4));
        int b = 1 + static_cast<int>(uniform_below(eng, 4));
        auto g = random_bipartite(eng, a, b, static_cast<int>(uniform_below(eng, 7)));
        CHECK(tau_maximal_forests(g) ==
              static_cast<unsigned long>(oracle::maximal_forests(g.num_vertices(), edge_list(g))));
    }
}

TEST_CASE("bareiss determinant")
{
    std::vector<std::vector<mpz_class>> m = {{2, 0, 1}, {1, 3, 2}, {1, 1, 2}};
    CHECK(bareiss_determinant(m) == 6);
    std::vector<std::vector<mpz_class>> z = {{1, 2}, {2, 4}};
    CHECK(bareiss_determinant(z) == 0);
    std::vector<std::vector<mpz_class>> p = {{0, 1}, {1, 0}};
    CHECK(bareiss_determinant(p) == -1);
}

TEST_CASE("restricted determinants")
{
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
    Eigen::MatrixXd u(6, 2);
    u << 1, 0, 2, 1, 0, 3, -1, 1, 4, 0, 1, 1;
    CHECK(det_restricted(id, u) == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::MatrixXd bad(6, 2);
    bad.col(0) = u.col(0);
    bad.col(1) = 2 * u.col(0);
    CHECK_THROWS_AS(det_restricted(id, bad), std::invalid_argument);

    // basis change by random unimodular T
    Engine eng(6);
    auto ga = build_gamma_a(make_complete_graph(3), 3);
    Eigen::MatrixXd base = to_double(kernel_basis(constraint_matrix(ga)));
    auto p = ey2_problem(make_complete_graph(3), 3);
    Eigen::MatrixXd h = -problem_hessian(p, p.xhat);
    double ref = det_restricted(h, base);
    for (int t = 0; t < 20; ++t) {
        const int r = static_cast<int>(base.cols());
        Eigen::MatrixXd tm = Eigen::MatrixXd::Identity(r, r);
        for (int s = 0; s < 3 * r; ++s) {
            int i = static_cast<int>(uniform_below(eng, r)), j = static_cast<int>(uniform_below(eng, r));
            if (i != j)
                tm.col(i) += (uniform_below(eng, 2) ? 1.0 : -1.0) * tm.col(j);
        }
        Eigen::MatrixXd ut = base * tm;
        CHECK(det_restricted(h, ut) == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("Hessian determinants in closed form")
{
    for (auto g : {make_complete_graph(3), make_complete_graph(4)}) {
        const int k = 3;
        auto pb = ey_problem(g, k);
        Eigen::MatrixXd hb = -problem_hessian(pb, pb.xhat);
        Eigen::MatrixXd b1 = to_double(kernel_basis(constraint_matrix(pb.gamma)));
        Eigen::MatrixXd b2 = to_double(cycle_basis(pb.gamma));
        double want = std::pow(k * (k - 1.0), static_cast<double>(b1.cols()));
        CHECK(det_restricted(hb, b1) == doctest::Approx(want).epsilon(1e-12));
        CHECK(det_restricted(hb, b2) == doctest::Approx(want).epsilon(1e-12));

        auto pa = ey2_problem(g, k);
        Eigen::MatrixXd ha = -problem_hessian(pa, pa.xhat);
        Eigen::MatrixXd a1 = to_double(kernel_basis(constraint_matrix(pa.gamma)));
        Eigen::MatrixXd a2 = to_double(cycle_basis(pa.gamma));
        CHECK(a1.cols() == (k - 1) * (k - 1) * g.num_vertices);
        double h4 = (k - 1.0) * (k - 1.0) * log_h_dk(g, k);
        CHECK(std::abs(log_det_restricted(ha, a1).log - h4) / std::abs(h4) < 1e-9);
        CHECK(std::abs(log_det_restricted(ha, a2).log - h4) / std::abs(h4) < 1e-9);
    }
}

TEST_CASE("constraint graph builders")
{
    auto gb = build_gamma_b(make_complete_graph(3), 3);
    CHECK(gb.num_vertices() == 18);
    CHECK(gb.num_edges() == 18);
    std::vector<int> comp;
    CHECK(components(gb, comp) == 3);

    auto ga = build_gamma_a(make_complete_graph(4), 3);
    CHECK(ga.num_vertices() == 24);
    CHECK(ga.num_edges() == 36);
    CHECK(components(ga, comp) == 4);

    for (auto g : {make_complete_graph(3), make_complete_graph(4), make_petersen_graph()})
        for (int k = 3; k <= 5; ++k) {
            auto p = ey_problem(g, k);
            Eigen::VectorXd b = gamma_b_cycle_solution(g, k);
            IntMatrix d = constraint_matrix(p.gamma);
            Eigen::VectorXd lhs = d.cast<double>() * b;
            for (int v = 0; v < p.gamma.num_vertices(); ++v)
                CHECK(lhs(v) == doctest::Approx(p.y[v].get_d()));
        }
}

TEST_CASE("Laplace estimates agree with the closed forms")
{
    for (auto g : {make_complete_graph(3), make_complete_graph(4)})
        for (int n : {30, 60}) {
            auto a = laplace_estimate(ey_problem(g, 3), n);
            auto b = EY_asym(g, n, 3);
            CHECK(std::abs(std::expm1(a.log - b.log)) < 1e-9);
            auto c = laplace_estimate(ey2_problem(g, 3), n);
            auto d = EY2_asym(g, n, 3);
            CHECK(std::abs(std::expm1(c.log - d.log)) < 1e-9);
        }
}

TEST_CASE("Laplace estimate edge cases")
{
    auto p = ey_problem(make_complete_graph(3), 3);
    auto zero = p;
    zero.psi = [](const Eigen::VectorXd&) { return 0.0; };
    CHECK(laplace_estimate(zero, 30).sign == 0);

    auto boundary = p;
    boundary.box.assign(boundary.box.size(), {1.0 / 6, 1.0 / 3});
    CHECK_THROWS_AS(laplace_estimate(boundary, 30), hypothesis_error);

    auto nohess = p;
    nohess.hessian = nullptr;
    auto a = laplace_estimate(nohess, 30), b = laplace_estimate(p, 30);
    CHECK(std::abs(a.log - b.log) < 1e-6);

    auto off = p;
    off.xhat(0) += 1e-3;
    CHECK_THROWS_AS(laplace_estimate(off, 30), std::invalid_argument);
}

TEST_CASE("Newton refinement returns to the maximiser")
{
    auto p = ey_problem(make_complete_graph(3), 3);
    Eigen::MatrixXd u = to_double(kernel_basis(constraint_matrix(p.gamma)));
    Eigen::VectorXd start = p.xhat + 0.01 * u.col(0) / u.col(0).cwiseAbs().maxCoeff();
    Eigen::VectorXd x = refine_maximizer(p, start);
    CHECK((x - p.xhat).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("windowed sums on the single-edge lattice")
{
    const int k = 3;
    auto p = ey_edge_problem(k);
    for (int n : {6, 12, 60}) {
        auto term = [n](const std::vector<int>& x) { return ey_edge_term(x, n, 3); };
        auto w = windowed_sum(p, n, 1.0, term);
        std::vector<int> h(k, n / k);
        mpq_class want(proper_matchings(h, h), factorial(n));
        want.canonicalize();
        CHECK(w.full == want);
        CHECK(w.window <= w.full);
        if (n == 6)
            CHECK(w.ratio == 1.0);
        if (n == 60)
            CHECK(w.ratio > 0.99);
        auto w0 = windowed_sum(p, n, 0.0, term);
        CHECK(w0.points_window >= 1);
        CHECK(w0.ratio < 1.0);
    }
    CHECK_THROWS_AS(windowed_sum(p, 60, 1.0, [](const std::vector<int>& x) { return ey_edge_term(x, 60, 3); }, 10),
                    too_large_error);
}

TEST_CASE("single-edge sum tends to the Laplace value")
{
    auto p = ey_edge_problem(3);
    double prev = 1e300;
    for (int n : {30, 60, 120}) {
        auto term = [n](const std::vector<int>& x) { return ey_edge_term(x, n, 3); };
        auto w = windowed_sum(p, n, 1.0, term);
        double err = std::abs(log_mpq(w.full) - laplace_estimate(p, n).log);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.05);
}
