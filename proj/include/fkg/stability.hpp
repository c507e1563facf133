#pragma once

#include <span>

#include <Eigen/Dense>

#include "fkg/field.hpp"
#include "fkg/galerkin.hpp"

namespace fkg {

/// Run-time evaluation of the boundedness theorem for the discrete scheme.
struct StabilityReport {
    double C = 0.0;           // max |V|_2 over the i=0 row and j=0 column
    double S_inv_frob = 0.0;  // |S^{-1}|_F
    double P_sum = 0.0;       // sum of P_j^i over the lattice
    double lhs = 0.0;         // dt |S^{-1}|_F P_sum
    double threshold = 0.0;   // ln((C+1)/(C+1/2))
    bool dt_admissible = false;
    double max_norm_observed = 0.0;  // +inf once any node is non-finite
    double bound_2C = 0.0;
    bool bound_holds = false;
    double amplification = 0.0;

    /// threshold / lhs: >= 1 exactly when dt is admissible.
    double margin() const;
};

double norm2(std::span<const double> x);
double norm2(const Eigen::VectorXd& x);
double frobenius(const Eigen::MatrixXd& A);

/// |K|_F + sum_m |G_m|_F.
double p_bound(const StepOperators& ops);

double data_bound_C(const CoefficientField& field);

double admissibility_threshold(double C);
bool dt_admissible(double dt, double S_inv_frob, double P_sum, double C);

/// ln(2f / (f + 1)) for f > 0.
double phi(double f);
/// 1 / (2 e^{-g} - 1) for g < ln 2.
double phi_inv(double g);

struct MonitorResult {
    double max_norm = 0.0;
    double bound_2C = 0.0;
    bool within = true;
};

MonitorResult monitor(const CoefficientField& field, double C);

/// 1 + (1 + 4C) ln((C+1)/(C+1/2)).
double amplification(double C);

/// Fills every report field from a computed field.
StabilityReport assess(const CoefficientField& field, const GalerkinSystem& sys, double P_sum, double dt);

}  // namespace fkg
