#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "fkg/basis.hpp"

namespace fkg {

/// Structural matrices of the coefficient system, assembled once per (N, ell).
///
///   S(m, n)        = <Psi_n',  Psi_m>             unit upper triangular
///   kappa(m, n)    = <Psi_n''', Psi_m>
///   sigma[m](n, k) = <Psi_n' Psi_k'', Psi_m>
struct GalerkinSystem {
    int N = 0;
    Eigen::MatrixXd S;
    Eigen::MatrixXd S_inv;
    Eigen::MatrixXd kappa;
    std::vector<Eigen::MatrixXd> sigma;
};

/// Exact assembly through polynomial algebra and exponential moments
/// (weight e^{2x} for S and kappa, e^{3x} for sigma). Throws
/// std::runtime_error if S is not unit upper triangular to 1e-9; otherwise
/// its strictly lower part is set to zero.
GalerkinSystem assemble_structure(const BasisSet& basis);

/// Linear and quadratic operators at one lattice node, in month^-1.
///   K    = (mu - rho e^{-K/d}) S + D kappa
///   G[m] = 2 D Pi sigma[m]
struct StepOperators {
    Eigen::MatrixXd K;
    std::vector<Eigen::MatrixXd> G;
};

StepOperators step_operators(const GalerkinSystem& sys, double D_val, double mu_val, double Pi_val, double rho,
                             double Kd_ratio);

/// Same as step_operators, writing into preallocated storage.
void assign_step_operators(StepOperators& out, const GalerkinSystem& sys, double D_val, double mu_val,
                           double Pi_val, double rho, double Kd_ratio);

/// Writes S.csv, S_inv.csv, kappa.csv (row,col,value) and sigma.csv
/// (row,col,slice,value) into dir, 1-based indices.
void write_structure_csv(const GalerkinSystem& sys, const std::filesystem::path& dir);

}  // namespace fkg
