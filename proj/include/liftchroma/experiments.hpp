#ifndef LIFTCHROMA_EXPERIMENTS_HPP
#define LIFTCHROMA_EXPERIMENTS_HPP

#include "liftchroma/lift.hpp"

#include <gmpxx.h>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace liftchroma {

enum class StatisticKind { Z, chi, Y, X, YZ };

struct Statistic {
    StatisticKind kind = StatisticKind::Z;
    int j = 0; // cycle length for Z and YZ
    std::string name;
};

// Accepts "Z_j", "chi", "Y", "X" and "Y*Z_j" (also "YZ_j").
// Throws invalid_config otherwise.
Statistic parse_statistic(const std::string& name);

// Y counts strongly equitable colourings with quota n/k per colour, so it
// is 0 whenever k does not divide n.
struct StatOptions {
    std::uint64_t budget = 0; // 0 means solver_budget()
    int count_cap = 40;
    int threads = 0;          // 0 means hardware concurrency
};

// Value of the statistic on one lift. Throws budget_exhausted or
// too_large_error when the solver or counter gives up.
double evaluate_statistic(const Statistic& s, const Lift& l, int k, const StatOptions& opt = {},
                          std::uint64_t solver_seed = 0);
mpq_class evaluate_statistic_exact(const Statistic& s, const Lift& l, int k,
                                   const StatOptions& opt = {});

struct EstimateRecord {
    std::string statistic;
    int n = 0;
    int k = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    int samples = 0;
    int censored = 0;
    double seconds = 0.0;
};

// Sample s uses the lift seeded by derive_seed(seed, cell, s). Censored
// samples are excluded from the mean and counted; throws
// std::runtime_error if every sample is censored.
EstimateRecord mc_expectation(const BaseGraph& g, int n, int k, const Statistic& stat,
                              int samples, std::uint64_t seed, const StatOptions& opt = {},
                              std::uint64_t cell = 0);

// Exact expectation over all n!^|E| lifts.
mpq_class exact_expectation(const BaseGraph& g, int n, int k, const Statistic& stat,
                            std::uint64_t cap = default_lift_cap);

struct JointRatio {
    double ratio = 0.0;
    double stderr_ = 0.0;
    int samples = 0;
};

// (sum Y Z_j) / (sum Y) over sampled lifts. Throws undefined_ratio if the
// sampled Y are all 0.
JointRatio joint_ratio_estimate(const BaseGraph& g, int n, int k, int j, int samples,
                                std::uint64_t seed, const StatOptions& opt = {});
mpq_class joint_ratio_exact(const BaseGraph& g, int n, int k, int j,
                            std::uint64_t cap = default_lift_cap);

struct CampaignConfig {
    std::string graph;
    std::vector<int> n;
    int k = 3;
    std::vector<std::string> statistics;
    int samples = 0;
    std::optional<std::uint64_t> seed;
    std::uint64_t budget = 0;
    int count_cap = 40;
    int threads = 0;
    bool timing = false; // wall time in the seconds column; off keeps outputs byte-identical
    std::string output;  // path prefix; <output>.csv and <output>.jsonl
};

// Throws invalid_config.
void validate(const CampaignConfig& c);
CampaignConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const CampaignConfig& c);
// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const CampaignConfig& c);

std::string csv_header();
std::string to_csv_row(const EstimateRecord& r);

// Runs every (statistic, n) cell in that order; cell index c uses the
// per-sample seeds derive_seed(seed, c, s).
std::vector<EstimateRecord> run_campaign(const CampaignConfig& c);

} // namespace liftchroma

#endif
