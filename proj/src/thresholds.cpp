#include "liftchroma/thresholds.hpp"

#include <cmath>
#include <stdexcept>

namespace liftchroma {

double u_threshold(int k)
{
    if (k < 2)
        throw std::invalid_argument("u_k needs k >= 2");
    double lk = std::log(static_cast<double>(k));
    return 2.0 * lk / (lk - std::log(static_cast<double>(k - 1)));
}

double c_q(int q)
{
    if (q < 3)
        throw std::invalid_argument("c_q needs q >= 3");
    double qm = q - 1.0;
    return qm * qm * qm / (q * (q - 2.0)) * std::log(qm);
}

double ell_threshold(int k)
{
    if (k < 3)
        throw std::invalid_argument("l_k needs k >= 3");
    return 2.0 * c_q(k);
}

int k_d(int d)
{
    if (d < 3)
        throw std::invalid_argument("k_d needs d >= 3");
    int k = 2;
    while (!(d < 2.0 * k * std::log(static_cast<double>(k))))
        ++k;
    return k;
}

std::string to_string(WindowKind kind)
{
    switch (kind) {
    case WindowKind::ONE_POINT_K:
        return "ONE_POINT_K";
    case WindowKind::TWO_POINT:
        return "TWO_POINT";
    case WindowKind::ONE_POINT_K_PLUS_1:
        return "ONE_POINT_K_PLUS_1";
    }
    return "?";
}

WindowClassification classify(int d)
{
    if (d < 3)
        throw std::invalid_argument("classify needs d >= 3");
    WindowClassification w;
    w.d = d;
    int k = 3;
    while (!(d < u_threshold(k)))
        ++k;
    w.k = k;
    double l = ell_threshold(k);
    if (d < l) {
        w.kind = WindowKind::ONE_POINT_K;
        w.lower = u_threshold(k - 1);
        w.upper = l;
        w.chi = {k};
    } else {
        w.kind = WindowKind::TWO_POINT;
        w.lower = l;
        w.upper = u_threshold(k);
        w.chi = {k, k + 1};
    }
    int kd = k_d(d);
    double cut = (2.0 * kd - 1.0) * std::log(static_cast<double>(kd));
    if (d > cut) {
        w.kind = WindowKind::ONE_POINT_K_PLUS_1;
        w.lower = cut;
        w.upper = 2.0 * kd * std::log(static_cast<double>(kd));
        w.chi = {kd + 1};
    }
    return w;
}

} // namespace liftchroma
