#include "liftchroma/experiments.hpp"
#include "liftchroma/coloring.hpp"
#include "liftchroma/errors.hpp"
#include "liftchroma/moments_exact.hpp"
#include "liftchroma/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <thread>

namespace liftchroma {

Statistic parse_statistic(const std::string& name)
{
    static const std::regex z_re(R"(Z_([0-9]+))");
    static const std::regex yz_re(R"(Y\*?Z_([0-9]+))");
    std::smatch m;
    Statistic s;
    s.name = name;
    if (name == "chi") {
        s.kind = StatisticKind::chi;
    } else if (name == "Y") {
        s.kind = StatisticKind::Y;
    } else if (name == "X") {
        s.kind = StatisticKind::X;
    } else if (std::regex_match(name, m, z_re)) {
        s.kind = StatisticKind::Z;
        s.j = std::stoi(m[1]);
    } else if (std::regex_match(name, m, yz_re)) {
        s.kind = StatisticKind::YZ;
        s.j = std::stoi(m[1]);
    } else {
        throw invalid_config("unknown statistic: " + name);
    }
    if ((s.kind == StatisticKind::Z || s.kind == StatisticKind::YZ) &&
        (s.j < 2 || s.j > default_max_cycle_length))
        throw invalid_config("cycle length out of range in " + name);
    return s;
}

namespace {

mpz_class count_y(const Lift& l, int k, const StatOptions& opt)
{
    if (l.n % k != 0)
        return 0;
    return count_strongly_equitable(l, k, opt.count_cap);
}

} // namespace

mpq_class evaluate_statistic_exact(const Statistic& s, const Lift& l, int k,
                                   const StatOptions& opt)
{
    switch (s.kind) {
    case StatisticKind::Z:
        return mpz_class(static_cast<unsigned long>(count_cycles(expand(l), s.j)));
    case StatisticKind::chi: {
        SolveOptions so;
        so.budget = opt.budget;
        return chromatic_number(expand(l), so);
    }
    case StatisticKind::Y:
        return count_y(l, k, opt);
    case StatisticKind::X:
        return count_proper_colorings(expand(l), k, opt.count_cap);
    case StatisticKind::YZ: {
        mpz_class y = count_y(l, k, opt);
        if (y == 0)
            return 0;
        return y * static_cast<unsigned long>(count_cycles(expand(l), s.j));
    }
    }
    return 0;
}

double evaluate_statistic(const Statistic& s, const Lift& l, int k, const StatOptions& opt,
                          std::uint64_t solver_seed)
{
    if (s.kind == StatisticKind::chi) {
        SolveOptions so;
        so.budget = opt.budget;
        so.seed = solver_seed;
        return chromatic_number(expand(l), so);
    }
    return evaluate_statistic_exact(s, l, k, opt).get_d();
}

namespace {

struct SampleValue {
    double value = 0.0;
    double aux = 0.0; // second statistic for ratio estimates
    bool censored = false;
};

// Evaluates f(s) for s in [0, samples) on a few worker threads; results are
// indexed by sample so the output does not depend on scheduling.
template <class F>
std::vector<SampleValue> run_samples(int samples, int threads, F f)
{
    std::vector<SampleValue> out(samples);
    int t = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    t = std::clamp(t, 1, std::max(1, samples));
    if (t == 1) {
        for (int s = 0; s < samples; ++s)
            out[s] = f(s);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(t);
    for (int w = 0; w < t; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int s = w; s < samples; s += t)
                    out[s] = f(s);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

} // namespace

EstimateRecord mc_expectation(const BaseGraph& g, int n, int k, const Statistic& stat,
                              int samples, std::uint64_t seed, const StatOptions& opt,
                              std::uint64_t cell)
{
    if (samples < 1)
        throw std::invalid_argument("mc_expectation needs samples >= 1");
    auto start = std::chrono::steady_clock::now();
    auto values = run_samples(samples, opt.threads, [&](int s) {
        std::uint64_t sd = derive_seed(seed, cell, static_cast<std::uint64_t>(s));
        Lift l = sample_lift(g, n, sd);
        SampleValue v;
        try {
            v.value = evaluate_statistic(stat, l, k, opt, sd);
        } catch (const budget_exhausted&) {
            v.censored = true;
        } catch (const too_large_error&) {
            v.censored = true;
        }
        return v;
    });
    EstimateRecord r;
    r.statistic = stat.name;
    r.n = n;
    r.k = k;
    r.samples = samples;
    double sum = 0.0;
    int m = 0;
    for (const auto& v : values) {
        if (v.censored) {
            ++r.censored;
            continue;
        }
        sum += v.value;
        ++m;
    }
    if (m == 0)
        throw std::runtime_error("mc_expectation: all " + std::to_string(samples) +
                                 " samples censored");
    r.mean = sum / m;
    double ss = 0.0;
    for (const auto& v : values)
        if (!v.censored)
            ss += (v.value - r.mean) * (v.value - r.mean);
    r.stderr_ = m > 1 ? std::sqrt(ss / (m - 1) / m) : 0.0;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

mpq_class exact_expectation(const BaseGraph& g, int n, int k, const Statistic& stat,
                            std::uint64_t cap)
{
    StatOptions opt;
    return brute_force_moment(
        g, n, [&](const Lift& l) { return evaluate_statistic_exact(stat, l, k, opt); }, cap);
}

JointRatio joint_ratio_estimate(const BaseGraph& g, int n, int k, int j, int samples,
                                std::uint64_t seed, const StatOptions& opt)
{
    if (samples < 1)
        throw std::invalid_argument("joint_ratio_estimate needs samples >= 1");
    if (n % k != 0)
        throw undefined_ratio("joint ratio: Y is identically 0 when k does not divide n");
    Statistic z = parse_statistic("Z_" + std::to_string(j));
    auto values = run_samples(samples, opt.threads, [&](int s) {
        Lift l = sample_lift(g, n, derive_seed(seed, 0, static_cast<std::uint64_t>(s)));
        SampleValue v;
        v.value = count_y(l, k, opt).get_d();
        v.aux = v.value == 0 ? 0.0 : evaluate_statistic(z, l, k, opt);
        return v;
    });
    double sy = 0.0, syz = 0.0;
    for (const auto& v : values) {
        sy += v.value;
        syz += v.value * v.aux;
    }
    if (sy == 0)
        throw undefined_ratio("joint ratio: every sampled Y is 0");
    JointRatio out;
    out.samples = samples;
    out.ratio = syz / sy;
    // linearised variance of a ratio of means
    const double ybar = sy / samples;
    double ss = 0.0;
    for (const auto& v : values) {
        double t = v.value * (v.aux - out.ratio);
        ss += t * t;
    }
    out.stderr_ = samples > 1 ? std::sqrt(ss / (samples - 1.0) / samples) / ybar : 0.0;
    return out;
}

mpq_class joint_ratio_exact(const BaseGraph& g, int n, int k, int j, std::uint64_t cap)
{
    mpq_class ey = exact_expectation(g, n, k, parse_statistic("Y"), cap);
    if (ey == 0)
        throw undefined_ratio("joint ratio: E[Y] = 0");
    mpq_class eyz = exact_expectation(g, n, k, parse_statistic("Y*Z_" + std::to_string(j)), cap);
    return eyz / ey;
}

void validate(const CampaignConfig& c)
{
    if (c.graph.empty())
        throw invalid_config("graph is required");
    if (c.n.empty())
        throw invalid_config("at least one n is required");
    for (int n : c.n)
        if (n < 1)
            throw invalid_config("n must be positive");
    if (c.k < 2)
        throw invalid_config("k must be at least 2");
    if (c.statistics.empty())
        throw invalid_config("at least one statistic is required");
    for (const auto& s : c.statistics)
        parse_statistic(s);
    if (c.samples < 1)
        throw invalid_config("samples must be at least 1");
    if (!c.seed)
        throw invalid_config("seed is required");
    if (c.count_cap < 1)
        throw invalid_config("count_cap must be positive");
}

CampaignConfig config_from_json(const nlohmann::json& j)
{
    static const std::vector<std::string> known{"graph",  "n",       "k",         "statistics",
                                                "samples", "seed",   "budget",    "count_cap",
                                                "threads", "timing", "output"};
    CampaignConfig c;
    try {
        for (auto it = j.begin(); it != j.end(); ++it)
            if (std::find(known.begin(), known.end(), it.key()) == known.end())
                throw invalid_config("unknown config key: " + it.key());
        c.graph = j.at("graph").get<std::string>();
        if (j.at("n").is_array())
            c.n = j.at("n").get<std::vector<int>>();
        else
            c.n = {j.at("n").get<int>()};
        c.k = j.value("k", 3);
        c.statistics = j.at("statistics").get<std::vector<std::string>>();
        c.samples = j.at("samples").get<int>();
        if (j.contains("seed"))
            c.seed = j.at("seed").get<std::uint64_t>();
        c.budget = j.value("budget", std::uint64_t{0});
        c.count_cap = j.value("count_cap", 40);
        c.threads = j.value("threads", 0);
        c.timing = j.value("timing", false);
        c.output = j.value("output", std::string{});
    } catch (const nlohmann::json::exception& e) {
        throw invalid_config(std::string("config: ") + e.what());
    }
    validate(c);
    return c;
}

nlohmann::json config_to_json(const CampaignConfig& c)
{
    nlohmann::json j;
    j["graph"] = c.graph;
    j["n"] = c.n;
    j["k"] = c.k;
    j["statistics"] = c.statistics;
    j["samples"] = c.samples;
    if (c.seed)
        j["seed"] = *c.seed;
    j["budget"] = c.budget;
    j["count_cap"] = c.count_cap;
    j["timing"] = c.timing;
    j["output"] = c.output;
    // threads is left out: it does not change results
    return j;
}

std::string config_hash(const CampaignConfig& c)
{
    std::string s = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string csv_header()
{
    return "statistic,n,k,mean,stderr,samples,censored,seconds";
}

std::string to_csv_row(const EstimateRecord& r)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g,%.17g,%d,%d,%.6f", r.statistic.c_str(), r.n,
                  r.k, r.mean, r.stderr_, r.samples, r.censored, r.seconds);
    return buf;
}

std::vector<EstimateRecord> run_campaign(const CampaignConfig& c)
{
    validate(c);
    BaseGraph g = graph_from_spec(c.graph);
    StatOptions opt;
    opt.budget = c.budget;
    opt.count_cap = c.count_cap;
    opt.threads = c.threads;
    std::vector<EstimateRecord> records;
    std::uint64_t cell = 0;
    for (const auto& name : c.statistics) {
        Statistic s = parse_statistic(name);
        for (int n : c.n) {
            EstimateRecord r = mc_expectation(g, n, c.k, s, c.samples, *c.seed, opt, cell++);
            if (!c.timing)
                r.seconds = 0.0;
            records.push_back(r);
        }
    }
    if (!c.output.empty()) {
        std::ofstream csv(c.output + ".csv", std::ios::binary);
        std::ofstream jsonl(c.output + ".jsonl", std::ios::binary);
        if (!csv || !jsonl)
            throw std::runtime_error("cannot open output files at " + c.output);
        csv << csv_header() << '\n';
        const std::string hash = config_hash(c);
        const auto cfg = config_to_json(c);
        for (const auto& r : records) {
            csv << to_csv_row(r) << '\n';
            nlohmann::json j;
            j["statistic"] = r.statistic;
            j["n"] = r.n;
            j["k"] = r.k;
            j["mean"] = r.mean;
            j["stderr"] = r.stderr_;
            j["samples"] = r.samples;
            j["censored"] = r.censored;
            j["seconds"] = r.seconds;
            j["config_hash"] = hash;
            j["seed"] = *c.seed;
            j["config"] = cfg;
            jsonl << j.dump() << '\n';
        }
        if (!csv || !jsonl)
            throw std::runtime_error("write failed for " + c.output);
    }
    return records;
}

} // namespace liftchroma
