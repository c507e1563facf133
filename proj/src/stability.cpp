#include "fkg/stability.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fkg {

double StabilityReport::margin() const {
    if (lhs == 0.0) return std::numeric_limits<double>::infinity();
    return threshold / lhs;
}

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double norm2(const Eigen::VectorXd& x) { return x.norm(); }

double frobenius(const Eigen::MatrixXd& A) { return A.norm(); }

double p_bound(const StepOperators& ops) {
    double p = frobenius(ops.K);
    for (const auto& G : ops.G) p += frobenius(G);
    return p;
}

double data_bound_C(const CoefficientField& field) {
    double C = 0.0;
    for (int j = 0; j <= field.J(); ++j) C = std::max(C, norm2(field.at(0, j)));
    for (int i = 0; i <= field.M(); ++i) C = std::max(C, norm2(field.at(i, 0)));
    return C;
}

double admissibility_threshold(double C) {
    if (!(C >= 0.0)) throw std::invalid_argument("admissibility_threshold: C must be nonnegative");
    return std::log((C + 1.0) / (C + 0.5));
}

bool dt_admissible(double dt, double S_inv_frob, double P_sum, double C) {
    if (!(dt >= 0.0) || !(S_inv_frob >= 0.0) || !(P_sum >= 0.0))
        throw std::invalid_argument("dt_admissible: inputs must be nonnegative");
    return dt * S_inv_frob * P_sum <= admissibility_threshold(C);
}

double phi(double f) {
    if (!(f > 0.0) || !std::isfinite(f)) throw std::domain_error("phi: argument must be positive and finite");
    return std::log(2.0 * f / (f + 1.0));
}

double phi_inv(double g) {
    // phi maps (0, inf) onto (-inf, ln 2)
    if (!(g < std::numbers::ln2) || !std::isfinite(g)) throw std::domain_error("phi_inv: argument must be below ln 2");
    return 1.0 / (2.0 * std::exp(-g) - 1.0);
}

MonitorResult monitor(const CoefficientField& field, double C) {
    MonitorResult r;
    r.bound_2C = 2.0 * C;
    for (int i = 0; i <= field.M(); ++i)
        for (int j = 0; j <= field.J(); ++j) {
            const double n = norm2(field.at(i, j));
            if (!std::isfinite(n)) {
                r.max_norm = std::numeric_limits<double>::infinity();
                r.within = false;
                return r;
            }
            r.max_norm = std::max(r.max_norm, n);
        }
    r.within = r.max_norm <= r.bound_2C;
    return r;
}

double amplification(double C) {
    if (!(C >= 0.0)) throw std::invalid_argument("amplification: C must be nonnegative");
    return 1.0 + (1.0 + 4.0 * C) * std::log((C + 1.0) / (C + 0.5));
}

StabilityReport assess(const CoefficientField& field, const GalerkinSystem& sys, double P_sum, double dt) {
    StabilityReport r;
    r.C = data_bound_C(field);
    r.S_inv_frob = frobenius(sys.S_inv);
    r.P_sum = P_sum;
    r.lhs = dt * r.S_inv_frob * P_sum;
    r.threshold = admissibility_threshold(r.C);
    r.dt_admissible = dt_admissible(dt, r.S_inv_frob, P_sum, r.C);
    const auto m = monitor(field, r.C);
    r.max_norm_observed = m.max_norm;
    r.bound_2C = m.bound_2C;
    r.bound_holds = m.within;
    r.amplification = amplification(r.C);
    return r;
}

}  // namespace fkg
