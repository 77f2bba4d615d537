#include "liftchroma/base_graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>

namespace liftchroma {

int validate(const BaseGraph& g)
{
    using k = invalid_graph::kind;
    if (g.num_vertices < 2)
        throw invalid_graph(k::too_few_vertices, "graph needs at least 2 vertices");

    std::vector<int> deg(g.num_vertices, 0);
    for (const auto& [t, h] : g.edges) {
        if (t < 0 || h < 0 || t >= g.num_vertices || h >= g.num_vertices)
            throw invalid_graph(k::bad_index, "edge endpoint out of range");
        if (t == h)
            throw invalid_graph(k::loop, "loop at vertex " + std::to_string(t));
        ++deg[t];
        ++deg[h];
    }
    for (int v = 1; v < g.num_vertices; ++v)
        if (deg[v] != deg[0])
            throw invalid_graph(k::degree_mismatch,
                                "degree mismatch: vertex 0 has " + std::to_string(deg[0]) +
                                    ", vertex " + std::to_string(v) + " has " +
                                    std::to_string(deg[v]));
    if (deg[0] < 2)
        throw invalid_graph(k::degree_mismatch, "degree must be at least 2");
    return deg[0];
}

BaseGraph make_base_graph(int num_vertices, std::vector<Edge> edges)
{
    std::stable_sort(edges.begin(), edges.end());
    BaseGraph g{num_vertices, std::move(edges), 0};
    g.degree = validate(g);
    return g;
}

BaseGraph make_complete_graph(int m)
{
    if (m < 3)
        throw std::invalid_argument("complete graph needs m >= 3 (degree >= 2)");
    std::vector<Edge> edges;
    for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v)
            edges.emplace_back(u, v);
    return make_base_graph(m, std::move(edges));
}

BaseGraph make_petersen_graph()
{
    std::vector<Edge> edges;
    for (int i = 0; i < 5; ++i) {
        edges.emplace_back(i, (i + 1) % 5);
        edges.emplace_back(i, i + 5);
        edges.emplace_back(5 + i, 5 + (i + 2) % 5);
    }
    for (auto& [t, h] : edges)
        if (t > h)
            std::swap(t, h);
    return make_base_graph(10, std::move(edges));
}

std::vector<std::vector<int>> adjacency_matrix(const BaseGraph& g)
{
    std::vector<std::vector<int>> a(g.num_vertices, std::vector<int>(g.num_vertices, 0));
    for (const auto& [t, h] : g.edges) {
        ++a[t][h];
        ++a[h][t];
    }
    return a;
}

SpectralSummary adjacency_spectrum(const BaseGraph& g)
{
    int d = validate(g);
    auto a = adjacency_matrix(g);
    Eigen::MatrixXd m(g.num_vertices, g.num_vertices);
    for (int i = 0; i < g.num_vertices; ++i)
        for (int j = 0; j < g.num_vertices; ++j)
            m(i, j) = a[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    SpectralSummary s;
    s.degree = d;
    s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + g.num_vertices);
    std::sort(s.eigenvalues.rbegin(), s.eigenvalues.rend());
    return s;
}

BaseGraph read_graph(std::istream& in)
{
    int nv = 0, ne = 0;
    if (!(in >> nv >> ne) || ne < 0)
        throw std::invalid_argument("graph text: expected header \"V E\"");
    std::vector<Edge> edges;
    edges.reserve(ne);
    for (int i = 0; i < ne; ++i) {
        int t, h;
        if (!(in >> t >> h))
            throw std::invalid_argument("graph text: expected " + std::to_string(ne) +
                                        " edges, got " + std::to_string(i));
        edges.emplace_back(t, h);
    }
    return make_base_graph(nv, std::move(edges));
}

void write_graph(std::ostream& out, const BaseGraph& g)
{
    out << g.num_vertices << ' ' << g.num_edges() << '\n';
    for (const auto& [t, h] : g.edges)
        out << t << ' ' << h << '\n';
}

BaseGraph graph_from_spec(const std::string& spec)
{
    static const std::regex km("[Kk]([0-9]+)");
    std::smatch m;
    if (std::regex_match(spec, m, km))
        return make_complete_graph(std::stoi(m[1]));
    if (spec == "petersen" || spec == "Petersen")
        return make_petersen_graph();
    std::ifstream f(spec);
    if (!f)
        throw std::invalid_argument("cannot open graph file: " + spec);
    return read_graph(f);
}

} // namespace liftchroma
