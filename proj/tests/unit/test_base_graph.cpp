#include <doctest.h>

#include "liftchroma/base_graph.hpp"
#include "liftchroma/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <sstream>

using namespace liftchroma;

namespace {

invalid_graph::kind failure_kind(const BaseGraph& g)
{
    try {
        validate(g);
    } catch (const invalid_graph& e) {
        return e.which();
    }
    FAIL("validate accepted a malformed graph");
    return invalid_graph::kind::bad_index;
}

} // namespace

TEST_CASE("complete graphs")
{
    auto k4 = make_complete_graph(4);
    CHECK(k4.num_vertices == 4);
    CHECK(k4.num_edges() == 6);
    CHECK(k4.degree == 3);
    CHECK(validate(k4) == 3);

    auto k3 = make_complete_graph(3);
    CHECK(k3.num_vertices == 3);
    CHECK(k3.num_edges() == 3);
    CHECK(k3.degree == 2);

    CHECK_THROWS_AS(make_complete_graph(2), std::invalid_argument);
}

TEST_CASE("validate names the violated invariant")
{
    BaseGraph loop{2, {{0, 0}, {0, 1}, {1, 1}}, 0};
    CHECK(failure_kind(loop) == invalid_graph::kind::loop);

    BaseGraph path{3, {{0, 1}, {1, 2}}, 0};
    CHECK(failure_kind(path) == invalid_graph::kind::degree_mismatch);

    BaseGraph tiny{1, {}, 0};
    CHECK(failure_kind(tiny) == invalid_graph::kind::too_few_vertices);

    BaseGraph bad{3, {{0, 1}, {1, 2}, {2, 7}}, 0};
    CHECK(failure_kind(bad) == invalid_graph::kind::bad_index);
}

TEST_CASE("edges are sorted with stable ties")
{
    auto g = make_base_graph(3, {{2, 0}, {0, 1}, {1, 2}, {0, 1}, {2, 0}, {1, 2}});
    CHECK(g.degree == 4);
    CHECK(std::is_sorted(g.edges.begin(), g.edges.end()));
}

TEST_CASE("spectra of small graphs")
{
    auto s4 = adjacency_spectrum(make_complete_graph(4));
    REQUIRE(s4.eigenvalues.size() == 4);
    CHECK(s4.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-12));
    for (int i = 1; i < 4; ++i)
        CHECK(s4.eigenvalues[i] == doctest::Approx(-1.0).epsilon(1e-12));

    auto s3 = adjacency_spectrum(make_complete_graph(3));
    CHECK(s3.eigenvalues[0] == doctest::Approx(2.0));
    CHECK(s3.eigenvalues[1] == doctest::Approx(-1.0));
    CHECK(s3.eigenvalues[2] == doctest::Approx(-1.0));

    // doubled triangle, oracle: independent 3x3 eigensolve of [[0,2,2],[2,0,2],[2,2,0]]
    auto dbl = make_base_graph(3, {{0, 1}, {0, 1}, {1, 2}, {1, 2}, {0, 2}, {0, 2}});
    auto sd = adjacency_spectrum(dbl);
    Eigen::Matrix3d m;
    m << 0, 2, 2, 2, 0, 2, 2, 2, 0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    std::vector<double> want(es.eigenvalues().data(), es.eigenvalues().data() + 3);
    std::sort(want.rbegin(), want.rend());
    for (int i = 0; i < 3; ++i)
        CHECK(sd.eigenvalues[i] == doctest::Approx(want[i]).epsilon(1e-12));
    CHECK(sd.eigenvalues[0] == doctest::Approx(4.0));
    CHECK(sd.eigenvalues[2] == doctest::Approx(-2.0));
}

TEST_CASE("spectrum: top eigenvalue is d and the trace vanishes")
{
    for (auto g : {make_complete_graph(3), make_complete_graph(5), make_complete_graph(7),
                   make_petersen_graph()}) {
        auto s = adjacency_spectrum(g);
        CHECK(std::abs(s.eigenvalues.front() - g.degree) < 1e-9);
        double tr = std::accumulate(s.eigenvalues.begin(), s.eigenvalues.end(), 0.0);
        CHECK(std::abs(tr) < 1e-9);
    }
}

TEST_CASE("spectrum is invariant under vertex relabelling")
{
    auto g = make_petersen_graph();
    auto base = adjacency_spectrum(g).eigenvalues;
    Engine eng(99);
    for (int t = 0; t < 20; ++t) {
        std::vector<int> p(g.num_vertices);
        std::iota(p.begin(), p.end(), 0);
        for (int i = g.num_vertices - 1; i > 0; --i)
            std::swap(p[i], p[uniform_below(eng, i + 1)]);
        std::vector<Edge> e;
        for (auto [u, v] : g.edges)
            e.push_back({p[u], p[v]});
        auto s = adjacency_spectrum(make_base_graph(g.num_vertices, e)).eigenvalues;
        for (int i = 0; i < g.num_vertices; ++i)
            CHECK(std::abs(s[i] - base[i]) < 1e-9);
    }
}

TEST_CASE("petersen graph")
{
    auto g = make_petersen_graph();
    CHECK(g.num_vertices == 10);
    CHECK(g.num_edges() == 15);
    CHECK(g.degree == 3);
    auto s = adjacency_spectrum(g);
    CHECK(s.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(s.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(s.eigenvalues[9] == doctest::Approx(-2.0));
}

TEST_CASE("text round trip and graph specs")
{
    auto g = make_complete_graph(5);
    std::stringstream ss;
    write_graph(ss, g);
    auto h = read_graph(ss);
    CHECK(h.num_vertices == g.num_vertices);
    CHECK(h.edges == g.edges);
    CHECK(graph_from_spec("K4").num_edges() == 6);
    CHECK(graph_from_spec("petersen").num_vertices == 10);
    CHECK_THROWS(graph_from_spec("/nonexistent/graph.txt"));
}
