#ifndef LIFTCHROMA_MOMENTS_EXACT_HPP
#define LIFTCHROMA_MOMENTS_EXACT_HPP

#include "liftchroma/lift.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <vector>

namespace liftchroma {

constexpr std::uint64_t default_profile_cap = 10'000'000;

mpz_class factorial(int n);
mpz_class multinomial(const std::vector<int>& parts);

// Number of bijections from a set split into classes of sizes rows to a set
// split into classes of sizes cols, mapping class i only into classes j with
// allowed(i, j). Equals sum over count matrices B with the given margins of
// prod rows! prod cols! / prod B!.
mpz_class count_bijections(const std::vector<int>& rows, const std::vector<int>& cols,
                           const std::function<bool(int, int)>& allowed);

// Per-edge proper matching count between two fibers coloured with the
// given colour histograms (colours must differ across the edge).
mpz_class proper_matchings(const std::vector<int>& tail_hist, const std::vector<int>& head_hist);

// Explicit list of per-edge count matrices b (k x k, zero diagonal) with
// the given margins, row-major.
std::vector<std::vector<int>> enumerate_edge_profiles(const std::vector<int>& rows,
                                                      const std::vector<int>& cols);

mpq_class expected_X_exact(const BaseGraph& g, int n, int k,
                           std::uint64_t cap = default_profile_cap);

// Requires k | n.
mpq_class expected_Y_exact(const BaseGraph& g, int n, int k, bool factorized = true,
                           std::uint64_t cap = default_profile_cap);

// Quotas q+1 for the first r colours, q for the rest (n = qk + r).
mpq_class expected_Y_exact_extended(const BaseGraph& g, int n, int k);

// With extended = false and k not dividing n the sum is empty and 0 is
// returned; extended = true uses the extended quotas for both colourings.
mpq_class expected_Y2_exact(const BaseGraph& g, int n, int k, bool extended = false,
                            std::uint64_t cap = default_profile_cap);

using LiftStatistic = std::function<mpq_class(const Lift&)>;

mpq_class brute_force_moment(const BaseGraph& g, int n, const LiftStatistic& statistic,
                             std::uint64_t cap = default_lift_cap);

} // namespace liftchroma

#endif
