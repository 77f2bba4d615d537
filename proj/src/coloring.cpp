#include "liftchroma/coloring.hpp"
#include "liftchroma/errors.hpp"
#include "liftchroma/rng.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <queue>
#include <string>

namespace liftchroma {

EquitableSpec::EquitableSpec(int n_, int k_) : k(k_), n(n_)
{
    if (k < 1 || n < 1)
        throw std::invalid_argument("equitable spec needs n >= 1 and k >= 1");
    q = n / k;
    r = n % k;
}

std::uint64_t solver_budget()
{
    if (const char* s = std::getenv("LIFTCHROMA_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(s, &end, 10);
        if (end != s && *end == '\0' && v > 0)
            return v;
    }
    return default_node_budget;
}

bool is_proper(const LiftedGraph& lg, const std::vector<int>& colour)
{
    if (static_cast<int>(colour.size()) != lg.num_vertices())
        return false;
    for (auto [x, y] : lg.edges)
        if (x == y || colour[x] == colour[y] || colour[x] < 0)
            return false;
    return std::all_of(colour.begin(), colour.end(), [](int c) { return c >= 0; });
}

namespace {

std::vector<std::vector<int>> components(const LiftedGraph& lg)
{
    std::vector<std::vector<int>> out;
    std::vector<char> seen(lg.num_vertices(), 0);
    for (int s = 0; s < lg.num_vertices(); ++s) {
        if (seen[s])
            continue;
        std::vector<int> comp{s};
        seen[s] = 1;
        for (std::size_t h = 0; h < comp.size(); ++h)
            for (auto [w, e] : lg.adj[comp[h]])
                if (!seen[w]) {
                    seen[w] = 1;
                    comp.push_back(w);
                }
        out.push_back(std::move(comp));
    }
    return out;
}

bool has_loop(const LiftedGraph& lg)
{
    return std::any_of(lg.edges.begin(), lg.edges.end(), [](Edge e) { return e.first == e.second; });
}

std::vector<int> two_colouring(const LiftedGraph& lg)
{
    std::vector<int> col(lg.num_vertices(), -1);
    for (int s = 0; s < lg.num_vertices(); ++s) {
        if (col[s] >= 0)
            continue;
        col[s] = 0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (auto [w, e] : lg.adj[u]) {
                if (col[w] < 0) {
                    col[w] = 1 - col[u];
                    q.push(w);
                } else if (col[w] == col[u]) {
                    return {};
                }
            }
        }
    }
    return col;
}

// Greedy DSATUR colouring; returns colours, number used is max+1.
std::vector<int> dsatur_greedy(const LiftedGraph& lg)
{
    const int nv = lg.num_vertices();
    std::vector<int> col(nv, -1);
    std::vector<std::vector<char>> forb(nv);
    std::vector<int> sat(nv, 0), deg(nv);
    for (int v = 0; v < nv; ++v)
        deg[v] = static_cast<int>(lg.adj[v].size());
    for (int step = 0; step < nv; ++step) {
        int best = -1;
        for (int v = 0; v < nv; ++v)
            if (col[v] < 0 && (best < 0 || sat[v] > sat[best] ||
                               (sat[v] == sat[best] && deg[v] > deg[best])))
                best = v;
        int c = 0;
        while (c < static_cast<int>(forb[best].size()) && forb[best][c])
            ++c;
        col[best] = c;
        for (auto [w, e] : lg.adj[best]) {
            --deg[w];
            if (static_cast<int>(forb[w].size()) <= c)
                forb[w].resize(c + 1, 0);
            if (!forb[w][c]) {
                forb[w][c] = 1;
                ++sat[w];
            }
        }
    }
    return col;
}

int greedy_clique_size(const LiftedGraph& lg)
{
    int best = lg.num_vertices() > 0 ? 1 : 0;
    if (!lg.edges.empty())
        best = 2;
    for (int v = 0; v < lg.num_vertices(); ++v) {
        std::vector<int> clique{v};
        std::vector<int> cand;
        for (auto [w, e] : lg.adj[v])
            if (w != v)
                cand.push_back(w);
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        while (!cand.empty()) {
            int w = cand.front();
            clique.push_back(w);
            std::vector<int> next;
            for (int x : cand)
                if (x != w && std::any_of(lg.adj[w].begin(), lg.adj[w].end(),
                                          [x](auto p) { return p.first == x; }))
                    next.push_back(x);
            cand.swap(next);
        }
        best = std::max(best, static_cast<int>(clique.size()));
    }
    return best;
}

// Tabu search for a proper k-colouring; a success is a certificate, a
// failure proves nothing.
std::vector<int> tabu_search(const LiftedGraph& lg, int k, std::uint64_t seed,
                             std::uint64_t max_iter)
{
    const int nv = lg.num_vertices();
    Engine eng(seed);
    std::vector<int> col = dsatur_greedy(lg);
    for (int& c : col)
        if (c >= k)
            c = static_cast<int>(uniform_below(eng, k));
    std::vector<int> gam(static_cast<std::size_t>(nv) * k, 0);
    std::vector<std::uint64_t> tabu(static_cast<std::size_t>(nv) * k, 0);
    long conflicts = 0;
    for (auto [x, y] : lg.edges) {
        ++gam[x * k + col[y]];
        ++gam[y * k + col[x]];
        if (col[x] == col[y])
            ++conflicts;
    }
    long best_conflicts = conflicts;
    std::vector<int> best = col;
    for (std::uint64_t it = 0; it < max_iter && conflicts > 0; ++it) {
        int mv = -1, mc = -1, md = 0;
        std::uint64_t ties = 0;
        for (int v = 0; v < nv; ++v) {
            int own = gam[v * k + col[v]];
            if (own == 0)
                continue;
            for (int c = 0; c < k; ++c) {
                if (c == col[v])
                    continue;
                int delta = gam[v * k + c] - own;
                bool allowed = tabu[v * k + c] <= it || conflicts + delta < best_conflicts;
                if (!allowed)
                    continue;
                if (mv < 0 || delta < md) {
                    mv = v, mc = c, md = delta;
                    ties = 1;
                } else if (delta == md && uniform_below(eng, ++ties) == 0) {
                    mv = v, mc = c;
                }
            }
        }
        if (mv < 0)
            continue;
        int old = col[mv];
        for (auto [w, e] : lg.adj[mv]) {
            --gam[w * k + old];
            ++gam[w * k + mc];
        }
        col[mv] = mc;
        conflicts += md;
        tabu[mv * k + old] = it + 1 + static_cast<std::uint64_t>(0.6 * conflicts) +
                             uniform_below(eng, 10);
        if (conflicts < best_conflicts) {
            best_conflicts = conflicts;
            best = col;
        }
    }
    if (best_conflicts == 0)
        return best;
    return {};
}

class ExactColourer {
public:
    ExactColourer(const LiftedGraph& lg, int k, std::uint64_t budget)
        : g_(lg), k_(k), budget_(budget), col_(lg.num_vertices(), -1),
          forb_(static_cast<std::size_t>(lg.num_vertices()) * k, 0), sat_(lg.num_vertices(), 0),
          udeg_(lg.num_vertices(), 0)
    {
        for (int v = 0; v < lg.num_vertices(); ++v)
            udeg_[v] = static_cast<int>(lg.adj[v].size());
    }

    bool colour_component(const std::vector<int>& comp)
    {
        comp_ = &comp;
        return search(static_cast<int>(comp.size()), -1);
    }

    const std::vector<int>& colours() const { return col_; }

private:
    bool assign(int v, int c)
    {
        col_[v] = c;
        bool ok = true;
        for (auto [w, e] : g_.adj[v]) {
            --udeg_[w];
            if (forb_[w * k_ + c]++ == 0) {
                ++sat_[w];
                if (col_[w] < 0 && sat_[w] == k_)
                    ok = false;
            }
        }
        return ok;
    }

    void unassign(int v)
    {
        int c = col_[v];
        for (auto [w, e] : g_.adj[v]) {
            ++udeg_[w];
            if (--forb_[w * k_ + c] == 0)
                --sat_[w];
        }
        col_[v] = -1;
    }

    bool search(int remaining, int maxc)
    {
        if (remaining == 0)
            return true;
        if (++nodes_ > budget_)
            throw budget_exhausted("colouring search exceeded " + std::to_string(budget_) +
                                   " nodes");
        int v = -1;
        for (int x : *comp_)
            if (col_[x] < 0 && (v < 0 || sat_[x] > sat_[v] ||
                                (sat_[x] == sat_[v] && udeg_[x] > udeg_[v])))
                v = x;
        int top = std::min(maxc + 1, k_ - 1); // colour symmetry breaking
        for (int c = 0; c <= top; ++c) {
            if (forb_[v * k_ + c])
                continue;
            bool ok = assign(v, c);
            if (ok && search(remaining - 1, std::max(maxc, c)))
                return true;
            unassign(v);
        }
        return false;
    }

    const LiftedGraph& g_;
    int k_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    const std::vector<int>* comp_ = nullptr;
    std::vector<int> col_;
    std::vector<int> forb_;
    std::vector<int> sat_;
    std::vector<int> udeg_;
};

} // namespace

std::vector<int> find_k_coloring(const LiftedGraph& lg, int k, const SolveOptions& opt)
{
    if (k < 1)
        throw std::invalid_argument("k must be >= 1");
    if (has_loop(lg))
        return {};
    if (lg.num_vertices() == 0)
        return std::vector<int>{};
    if (lg.edges.empty())
        return std::vector<int>(lg.num_vertices(), 0);
    if (k == 1)
        return {};
    if (k == 2)
        return two_colouring(lg);
    auto greedy = dsatur_greedy(lg);
    if (*std::max_element(greedy.begin(), greedy.end()) < k)
        return greedy;
    if (greedy_clique_size(lg) > k)
        return {};
    std::uint64_t budget = opt.budget ? opt.budget : solver_budget();
    if (opt.local_search) {
        auto cert = tabu_search(lg, k, derive_seed(opt.seed, 0x7ab0, k),
                                std::max<std::uint64_t>(100'000, 2000ULL * lg.num_vertices()));
        if (!cert.empty())
            return cert;
    }
    ExactColourer ex(lg, k, budget);
    for (const auto& comp : components(lg))
        if (!ex.colour_component(comp))
            return {};
    return ex.colours();
}

bool is_k_colorable(const LiftedGraph& lg, int k, const SolveOptions& opt)
{
    if (lg.num_vertices() == 0)
        return true;
    return !find_k_coloring(lg, k, opt).empty();
}

int chromatic_number(const LiftedGraph& lg, const SolveOptions& opt)
{
    if (has_loop(lg))
        throw std::invalid_argument("graph with a loop has no proper colouring");
    if (lg.num_vertices() == 0)
        return 0;
    if (lg.edges.empty())
        return 1;
    if (!two_colouring(lg).empty())
        return 2;
    auto greedy = dsatur_greedy(lg);
    int upper = *std::max_element(greedy.begin(), greedy.end()) + 1;
    int lower = std::max(3, greedy_clique_size(lg));
    for (int k = lower; k < upper; ++k)
        if (is_k_colorable(lg, k, opt))
            return k;
    return upper;
}

namespace {

mpz_class falling(int k, int m)
{
    mpz_class f = 1;
    for (int i = 0; i < m; ++i)
        f *= k - i;
    return f;
}

// BFS order so each vertex after the first in a component has an earlier
// neighbour.
std::vector<int> bfs_order(const LiftedGraph& lg, const std::vector<int>& verts)
{
    std::vector<char> in(lg.num_vertices(), 0), seen(lg.num_vertices(), 0);
    for (int v : verts)
        in[v] = 1;
    std::vector<int> order;
    for (int s : verts) {
        if (seen[s])
            continue;
        seen[s] = 1;
        std::size_t h = order.size();
        order.push_back(s);
        for (; h < order.size(); ++h)
            for (auto [w, e] : lg.adj[order[h]])
                if (in[w] && !seen[w]) {
                    seen[w] = 1;
                    order.push_back(w);
                }
    }
    return order;
}

struct CountState {
    const LiftedGraph& lg;
    int k;
    std::vector<int> order;
    std::vector<int> col;
    // quota bookkeeping, empty when unconstrained
    std::vector<int> remaining; // fiber * k + colour
    bool symmetric = true;
    std::vector<std::uint64_t> by_used; // canonical counts by colours used
    std::map<std::vector<int>, std::uint64_t>* usage = nullptr;
    std::vector<int> used; // fiber * k + colour usage, for usage tallies

    void run(std::size_t pos, int maxc)
    {
        if (pos == order.size()) {
            if (usage)
                ++(*usage)[used];
            else
                ++by_used[maxc + 1];
            return;
        }
        int v = order[pos];
        int f = lg.fiber_of(v);
        int top = symmetric ? std::min(maxc + 1, k - 1) : k - 1;
        for (int c = 0; c <= top; ++c) {
            if (!remaining.empty() && remaining[f * k + c] == 0)
                continue;
            bool clash = false;
            for (auto [w, e] : lg.adj[v])
                if (col[w] == c) {
                    clash = true;
                    break;
                }
            if (clash)
                continue;
            col[v] = c;
            if (!remaining.empty())
                --remaining[f * k + c];
            if (usage)
                ++used[f * k + c];
            run(pos + 1, std::max(maxc, c));
            if (usage)
                --used[f * k + c];
            if (!remaining.empty())
                ++remaining[f * k + c];
            col[v] = -1;
        }
    }

    mpz_class total() const
    {
        mpz_class t = 0;
        for (std::size_t m = 0; m < by_used.size(); ++m)
            if (by_used[m])
                t += mpz_class(std::to_string(by_used[m])) *
                     (symmetric ? falling(k, static_cast<int>(m)) : mpz_class(1));
        return t;
    }
};

void check_cap(const LiftedGraph& lg, int cap)
{
    if (lg.num_vertices() > cap)
        throw too_large_error("exact colouring count: " + std::to_string(lg.num_vertices()) +
                              " vertices exceed cap " + std::to_string(cap));
}

} // namespace

mpz_class count_proper_colorings(const LiftedGraph& lg, int k, int cap)
{
    if (k < 0)
        throw std::invalid_argument("k must be >= 0");
    check_cap(lg, cap);
    if (has_loop(lg))
        return 0;
    if (k == 0)
        return lg.num_vertices() == 0 ? 1 : 0;
    mpz_class total = 1;
    for (const auto& comp : components(lg)) {
        CountState st{lg, k, bfs_order(lg, comp), std::vector<int>(lg.num_vertices(), -1)};
        st.by_used.assign(k + 1, 0);
        st.run(0, -1);
        total *= st.total();
        if (total == 0)
            break;
    }
    return total;
}

mpz_class count_strongly_equitable(const Lift& l, int k, int cap, bool by_components)
{
    if (k < 1)
        throw std::invalid_argument("k must be >= 1");
    EquitableSpec spec(l.n, k);
    LiftedGraph lg = expand(l);
    check_cap(lg, cap);
    if (has_loop(lg))
        return 0;
    const int nf = lg.base_vertices;
    std::vector<int> quota(static_cast<std::size_t>(nf) * k);
    for (int f = 0; f < nf; ++f)
        for (int c = 0; c < k; ++c)
            quota[f * k + c] = spec.quota(c);
    const bool symmetric = spec.r == 0;

    if (!by_components) {
        CountState st{lg, k, bfs_order(lg, [&] {
                          std::vector<int> all(lg.num_vertices());
                          std::iota(all.begin(), all.end(), 0);
                          return all;
                      }()),
                      std::vector<int>(lg.num_vertices(), -1), quota, symmetric};
        st.by_used.assign(k + 1, 0);
        st.run(0, -1);
        return st.total();
    }

    // Per-component usage tallies convolved across components; the quota
    // vector acts only as an upper bound inside a component.
    std::map<std::vector<int>, mpz_class> acc;
    acc[std::vector<int>(quota.size(), 0)] = 1;
    for (const auto& comp : components(lg)) {
        std::map<std::vector<int>, std::uint64_t> tally;
        CountState st{lg, k, bfs_order(lg, comp), std::vector<int>(lg.num_vertices(), -1), quota,
                      false};
        st.usage = &tally;
        st.used.assign(quota.size(), 0);
        st.run(0, -1);
        std::map<std::vector<int>, mpz_class> next;
        for (const auto& [u0, c0] : acc)
            for (const auto& [u1, c1] : tally) {
                std::vector<int> u(u0.size());
                bool ok = true;
                for (std::size_t i = 0; i < u.size() && ok; ++i) {
                    u[i] = u0[i] + u1[i];
                    ok = u[i] <= quota[i];
                }
                if (ok)
                    next[u] += c0 * mpz_class(std::to_string(c1));
            }
        acc.swap(next);
    }
    auto it = acc.find(quota);
    return it == acc.end() ? mpz_class(0) : it->second;
}

} // namespace liftchroma
