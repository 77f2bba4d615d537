#ifndef LIFTCHROMA_ERRORS_HPP
#define LIFTCHROMA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace liftchroma {

// Enumeration or exact-count caps exceeded.
struct too_large_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Search budget ran out: the answer is unknown, not negative.
struct budget_exhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A theorem hypothesis does not hold for the supplied parameters.
struct hypothesis_error : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct numeric_instability : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct divergent_series : std::domain_error {
    using std::domain_error::domain_error;
};

struct degenerate_edge : std::domain_error {
    using std::domain_error::domain_error;
};

struct undefined_ratio : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_config : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace liftchroma

#endif
