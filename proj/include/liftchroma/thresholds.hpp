#ifndef LIFTCHROMA_THRESHOLDS_HPP
#define LIFTCHROMA_THRESHOLDS_HPP

#include <string>
#include <vector>

namespace liftchroma {

double u_threshold(int k);
double ell_threshold(int k);
double c_q(int q);
int k_d(int d);

enum class WindowKind { ONE_POINT_K, TWO_POINT, ONE_POINT_K_PLUS_1 };

std::string to_string(WindowKind kind);

struct WindowClassification {
    int d = 0;
    int k = 0;            // window base: d in [u_{k-1}, u_k)
    WindowKind kind = WindowKind::ONE_POINT_K;
    double lower = 0.0;   // d in [lower, upper)
    double upper = 0.0;
    std::vector<int> chi; // predicted support of the chromatic number
};

// Window from u_{k-1} <= d < u_k; ONE_POINT_K_PLUS_1 when the k_d rule
// d > (2k_d - 1) log k_d fires, in which case the bounds are
// ((2k_d - 1) log k_d, 2 k_d log k_d).
WindowClassification classify(int d);

} // namespace liftchroma

#endif
