#include "liftchroma/moments_exact.hpp"
#include "liftchroma/coloring.hpp"
#include "liftchroma/errors.hpp"

#include <map>
#include <numeric>
#include <string>

namespace liftchroma {

mpz_class factorial(int n)
{
    if (n < 0)
        throw std::invalid_argument("factorial of a negative number");
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return f;
}

mpz_class multinomial(const std::vector<int>& parts)
{
    int total = std::accumulate(parts.begin(), parts.end(), 0);
    mpz_class m = factorial(total);
    for (int p : parts)
        m /= factorial(p);
    return m;
}

namespace {

using Allowed = std::vector<std::vector<char>>;

Allowed allowed_matrix(int nr, int nc, const std::function<bool(int, int)>& allowed)
{
    Allowed a(nr, std::vector<char>(nc, 0));
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j)
            a[i][j] = allowed(i, j) ? 1 : 0;
    return a;
}

class BijectionDP {
public:
    BijectionDP(const std::vector<int>& rows, const std::vector<int>& cols, Allowed allowed)
        : rows_(rows), allowed_(std::move(allowed))
    {
        int top = 0;
        for (int r : rows)
            top = std::max(top, r);
        for (int c : cols)
            top = std::max(top, c);
        fact_.resize(top + 1);
        for (int i = 0; i <= top; ++i)
            fact_[i] = factorial(i);
    }

    mpz_class eval(std::vector<int> rem)
    {
        return go(0, rem);
    }

private:
    mpz_class go(int i, std::vector<int>& rem)
    {
        if (i == static_cast<int>(rows_.size())) {
            for (int r : rem)
                if (r != 0)
                    return 0;
            return 1;
        }
        auto key = std::make_pair(i, rem);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        mpz_class sum = 0;
        mpz_class denom = 1;
        spread(i, 0, rows_[i], rem, denom, sum);
        memo_.emplace(std::move(key), sum);
        return sum;
    }

    // Splits rows_[i] over the allowed columns; accumulates
    // multinomial(rows_i; split) * go(i + 1, rem - split).
    void spread(int i, int j, int left, std::vector<int>& rem, const mpz_class& denom,
                mpz_class& sum)
    {
        if (j == static_cast<int>(rem.size())) {
            if (left == 0)
                sum += fact_[rows_[i]] / denom * go(i + 1, rem);
            return;
        }
        if (!allowed_[i][j]) {
            spread(i, j + 1, left, rem, denom, sum);
            return;
        }
        int top = std::min(left, rem[j]);
        for (int t = 0; t <= top; ++t) {
            rem[j] -= t;
            spread(i, j + 1, left - t, rem, denom * fact_[t], sum);
            rem[j] += t;
        }
    }

    const std::vector<int>& rows_;
    Allowed allowed_;
    std::vector<mpz_class> fact_;
    std::map<std::pair<int, std::vector<int>>, mpz_class> memo_;
};

void tables_rec(const std::vector<int>& rows, const Allowed& allowed, int i, int j, int left,
                std::vector<int>& rem, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    const int nr = static_cast<int>(rows.size());
    const int nc = static_cast<int>(rem.size());
    if (i == nr) {
        for (int r : rem)
            if (r != 0)
                return;
        out.push_back(cur);
        return;
    }
    if (j == nc) {
        if (left == 0)
            tables_rec(rows, allowed, i + 1, 0, i + 1 < nr ? rows[i + 1] : 0, rem, cur, out);
        return;
    }
    if (!allowed[i][j]) {
        cur[i * nc + j] = 0;
        tables_rec(rows, allowed, i, j + 1, left, rem, cur, out);
        return;
    }
    int top = std::min(left, rem[j]);
    for (int t = 0; t <= top; ++t) {
        rem[j] -= t;
        cur[i * nc + j] = t;
        tables_rec(rows, allowed, i, j + 1, left - t, rem, cur, out);
        rem[j] += t;
    }
    cur[i * nc + j] = 0;
}

// Nonnegative integer matrices with the given margins and support.
std::vector<std::vector<int>> enumerate_tables(const std::vector<int>& rows,
                                               const std::vector<int>& cols, const Allowed& allowed)
{
    std::vector<std::vector<int>> out;
    if (std::accumulate(rows.begin(), rows.end(), 0) != std::accumulate(cols.begin(), cols.end(), 0))
        return out;
    std::vector<int> rem = cols;
    std::vector<int> cur(rows.size() * cols.size(), 0);
    if (rows.empty())
        return {cur};
    tables_rec(rows, allowed, 0, 0, rows[0], rem, cur, out);
    return out;
}

std::vector<std::vector<int>> compositions(int n, int k)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur(k, 0);
    std::function<void(int, int)> rec = [&](int j, int left) {
        if (j == k - 1) {
            cur[j] = left;
            out.push_back(cur);
            return;
        }
        for (int t = 0; t <= left; ++t) {
            cur[j] = t;
            rec(j + 1, left - t);
        }
    };
    rec(0, n);
    return out;
}

void check_points(std::uint64_t labels, int slots, std::uint64_t cap, const char* what)
{
    long double total = 1;
    for (int i = 0; i < slots; ++i)
        total *= static_cast<long double>(labels);
    if (total > static_cast<long double>(cap))
        throw too_large_error(std::string(what) + ": profile lattice has " +
                              std::to_string(static_cast<double>(total)) + " points, cap " +
                              std::to_string(cap));
}

// Sum over labellings L: V -> [labels) of prod_v vw[L(v)] prod_e ew(L(tail), L(head)).
mpz_class labelling_sum(const BaseGraph& g, int labels, const std::vector<mpz_class>& vw,
                        const std::function<const mpz_class&(int, int)>& ew)
{
    const int nv = g.num_vertices;
    std::vector<std::vector<int>> closing(nv); // edges whose later endpoint is v
    for (int e = 0; e < g.num_edges(); ++e) {
        auto [t, h] = g.edges[e];
        closing[std::max(t, h)].push_back(e);
    }
    std::vector<int> lab(nv, 0);
    mpz_class sum = 0;
    std::function<void(int, const mpz_class&)> rec = [&](int v, const mpz_class& acc) {
        if (v == nv) {
            sum += acc;
            return;
        }
        for (int l = 0; l < labels; ++l) {
            lab[v] = l;
            mpz_class next = acc * vw[l];
            for (int e : closing[v]) {
                if (next == 0)
                    break;
                next *= ew(lab[g.edges[e].first], lab[g.edges[e].second]);
            }
            if (next != 0)
                rec(v + 1, next);
        }
    };
    rec(0, mpz_class(1));
    return sum;
}

mpz_class lift_total(const BaseGraph& g, int n)
{
    mpz_class t;
    mpz_pow_ui(t.get_mpz_t(), factorial(n).get_mpz_t(), static_cast<unsigned long>(g.num_edges()));
    return t;
}

std::vector<int> quota_vector(int n, int k)
{
    EquitableSpec spec(n, k);
    std::vector<int> q(k);
    for (int c = 0; c < k; ++c)
        q[c] = spec.quota(c);
    return q;
}

mpq_class ratio(const mpz_class& num, const mpz_class& den)
{
    mpq_class r(num, den);
    r.canonicalize();
    return r;
}

} // namespace

mpz_class count_bijections(const std::vector<int>& rows, const std::vector<int>& cols,
                           const std::function<bool(int, int)>& allowed)
{
    if (std::accumulate(rows.begin(), rows.end(), 0) != std::accumulate(cols.begin(), cols.end(), 0))
        return 0;
    BijectionDP dp(rows, cols,
                   allowed_matrix(static_cast<int>(rows.size()), static_cast<int>(cols.size()),
                                  allowed));
    mpz_class s = dp.eval(cols);
    for (int c : cols)
        s *= factorial(c);
    return s;
}

mpz_class proper_matchings(const std::vector<int>& tail_hist, const std::vector<int>& head_hist)
{
    return count_bijections(tail_hist, head_hist, [](int i, int j) { return i != j; });
}

std::vector<std::vector<int>> enumerate_edge_profiles(const std::vector<int>& rows,
                                                      const std::vector<int>& cols)
{
    return enumerate_tables(rows, cols,
                            allowed_matrix(static_cast<int>(rows.size()),
                                           static_cast<int>(cols.size()),
                                           [](int i, int j) { return i != j; }));
}

mpq_class expected_X_exact(const BaseGraph& g, int n, int k, std::uint64_t cap)
{
    if (n < 1 || k < 1)
        throw std::invalid_argument("expected_X_exact needs n >= 1 and k >= 1");
    auto hist = compositions(n, k);
    const int L = static_cast<int>(hist.size());
    check_points(hist.size(), g.num_vertices, cap, "expected_X_exact");
    std::vector<mpz_class> vw(L);
    for (int l = 0; l < L; ++l)
        vw[l] = multinomial(hist[l]);
    std::vector<mpz_class> ew(static_cast<std::size_t>(L) * L);
    std::vector<char> have(ew.size(), 0);
    auto edge = [&](int a, int b) -> const mpz_class& {
        std::size_t idx = static_cast<std::size_t>(a) * L + b;
        if (!have[idx]) {
            ew[idx] = proper_matchings(hist[a], hist[b]);
            have[idx] = 1;
        }
        return ew[idx];
    };
    return ratio(labelling_sum(g, L, vw, edge), lift_total(g, n));
}

mpq_class expected_Y_exact(const BaseGraph& g, int n, int k, bool factorized, std::uint64_t cap)
{
    if (k < 1 || n < 1 || n % k != 0)
        throw std::invalid_argument("expected_Y_exact needs k | n; use the extended variant");
    std::vector<int> q(k, n / k);
    mpz_class vertex = multinomial(q);
    mpz_class num;
    if (factorized) {
        mpz_class m = proper_matchings(q, q);
        mpz_class vp, ep;
        mpz_pow_ui(vp.get_mpz_t(), vertex.get_mpz_t(), g.num_vertices);
        mpz_pow_ui(ep.get_mpz_t(), m.get_mpz_t(), g.num_edges());
        num = vp * ep;
    } else {
        // Explicit sum over every per-edge profile tuple with a pinned to uniform.
        auto profiles = enumerate_edge_profiles(q, q);
        check_points(profiles.size(), g.num_edges(), cap, "expected_Y_exact");
        mpz_class qf = factorial(n / k);
        mpz_class top;
        mpz_pow_ui(top.get_mpz_t(), qf.get_mpz_t(), 2 * k);
        std::vector<mpz_class> term;
        for (const auto& b : profiles) {
            mpz_class t = top;
            for (int x : b)
                t /= factorial(x);
            term.push_back(t);
        }
        const int E = g.num_edges();
        std::vector<std::size_t> pick(E, 0);
        mpz_class sum = 0;
        for (;;) {
            mpz_class prod = 1;
            for (int e = 0; e < E; ++e)
                prod *= term[pick[e]];
            sum += prod;
            int e = E - 1;
            while (e >= 0 && ++pick[e] == term.size())
                pick[e--] = 0;
            if (e < 0)
                break;
        }
        mpz_class vp;
        mpz_pow_ui(vp.get_mpz_t(), vertex.get_mpz_t(), g.num_vertices);
        num = vp * sum;
    }
    return ratio(num, lift_total(g, n));
}

mpq_class expected_Y_exact_extended(const BaseGraph& g, int n, int k)
{
    auto q = quota_vector(n, k);
    mpz_class vp, ep;
    mpz_class vertex = multinomial(q);
    mpz_class m = proper_matchings(q, q);
    mpz_pow_ui(vp.get_mpz_t(), vertex.get_mpz_t(), g.num_vertices);
    mpz_pow_ui(ep.get_mpz_t(), m.get_mpz_t(), g.num_edges());
    return ratio(vp * ep, lift_total(g, n));
}

mpq_class expected_Y2_exact(const BaseGraph& g, int n, int k, bool extended, std::uint64_t cap)
{
    if (k < 1 || n < 1)
        throw std::invalid_argument("expected_Y2_exact needs n >= 1 and k >= 1");
    if (!extended && n % k != 0)
        return 0;
    auto q = quota_vector(n, k);
    Allowed all(k, std::vector<char>(k, 1));
    auto tables = enumerate_tables(q, q, all);
    const int L = static_cast<int>(tables.size());
    check_points(tables.size(), g.num_vertices, cap, "expected_Y2_exact");
    std::vector<mpz_class> vw(L);
    for (int l = 0; l < L; ++l)
        vw[l] = multinomial(tables[l]);
    auto pair_ok = [k](int a, int b) { return a / k != b / k && a % k != b % k; };
    std::vector<mpz_class> ew(static_cast<std::size_t>(L) * L);
    std::vector<char> have(ew.size(), 0);
    auto edge = [&](int a, int b) -> const mpz_class& {
        std::size_t idx = static_cast<std::size_t>(a) * L + b;
        if (!have[idx]) {
            ew[idx] = count_bijections(tables[a], tables[b], pair_ok);
            have[idx] = 1;
        }
        return ew[idx];
    };
    return ratio(labelling_sum(g, L, vw, edge), lift_total(g, n));
}

mpq_class brute_force_moment(const BaseGraph& g, int n, const LiftStatistic& statistic,
                             std::uint64_t cap)
{
    mpq_class sum = 0;
    enumerate_lifts(g, n, [&](const Lift& l) { sum += statistic(l); }, cap);
    mpq_class r = sum / mpq_class(lift_total(g, n));
    r.canonicalize();
    return r;
}

} // namespace liftchroma
