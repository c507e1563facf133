#include "fkg/galerkin.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace fkg {

GalerkinSystem assemble_structure(const BasisSet& basis) {
    const int N = basis.size();
    const double ell = basis.ell();

    std::vector<Polynomial> d0, d1, d2, d3;
    for (int n = 0; n < N; ++n) {
        d0.push_back(basis.poly(n));
        d1.push_back(basis.derivative_poly(n, 1));
        d2.push_back(basis.derivative_poly(n, 2));
        d3.push_back(basis.derivative_poly(n, 3));
    }

    const MomentTable w2(2.0, ell, 2 * (N - 1));
    const MomentTable w3(3.0, ell, 3 * (N - 1));

    GalerkinSystem sys;
    sys.N = N;
    sys.S.resize(N, N);
    sys.kappa.resize(N, N);
    for (int m = 0; m < N; ++m)
        for (int n = 0; n < N; ++n) {
            sys.S(m, n) = w2.integrate(d1[n] * d0[m]);
            sys.kappa(m, n) = w2.integrate(d3[n] * d0[m]);
        }

    sys.sigma.assign(static_cast<std::size_t>(N), Eigen::MatrixXd(N, N));
    for (int n = 0; n < N; ++n)
        for (int k = 0; k < N; ++k) {
            const Polynomial nk = d1[n] * d2[k];
            for (int m = 0; m < N; ++m) sys.sigma[m](n, k) = w3.integrate(nk * d0[m]);
        }

    double defect = 0.0;
    for (int m = 0; m < N; ++m) {
        defect = std::max(defect, std::abs(sys.S(m, m) - 1.0));
        for (int n = 0; n < m; ++n) defect = std::max(defect, std::abs(sys.S(m, n)));
    }
    if (defect > 1e-9) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "assemble_structure: S deviates from unit upper triangular by %.3e", defect);
        throw std::runtime_error(buf);
    }

    // entries below the diagonal vanish analytically; what is left is rounding
    sys.S.triangularView<Eigen::StrictlyLower>().setZero();
    sys.S_inv = sys.S.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(N, N));
    return sys;
}

void assign_step_operators(StepOperators& out, const GalerkinSystem& sys, double D_val, double mu_val,
                           double Pi_val, double rho, double Kd_ratio) {
    if (!(D_val >= 0.0)) throw std::invalid_argument("step_operators: diffusion must be nonnegative");
    if (!(Pi_val >= 0.0 && Pi_val <= 1.0)) throw std::invalid_argument("step_operators: survival must lie in [0, 1]");
    const double linear = mu_val - rho * std::exp(-Kd_ratio);
    out.K.noalias() = linear * sys.S + D_val * sys.kappa;
    const double quad = 2.0 * D_val * Pi_val;
    out.G.resize(sys.sigma.size());
    for (std::size_t m = 0; m < sys.sigma.size(); ++m) out.G[m].noalias() = quad * sys.sigma[m];
}

StepOperators step_operators(const GalerkinSystem& sys, double D_val, double mu_val, double Pi_val, double rho,
                             double Kd_ratio) {
    StepOperators ops;
    assign_step_operators(ops, sys, D_val, mu_val, Pi_val, rho, Kd_ratio);
    return ops;
}

namespace {

void write_matrix(const Eigen::MatrixXd& A, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "row,col,value\n";
    char buf[64];
    for (Eigen::Index r = 0; r < A.rows(); ++r)
        for (Eigen::Index c = 0; c < A.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", A(r, c));
            out << r + 1 << ',' << c + 1 << ',' << buf << '\n';
        }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

void write_structure_csv(const GalerkinSystem& sys, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_matrix(sys.S, dir / "S.csv");
    write_matrix(sys.S_inv, dir / "S_inv.csv");
    write_matrix(sys.kappa, dir / "kappa.csv");

    const auto path = dir / "sigma.csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "row,col,slice,value\n";
    char buf[64];
    for (int m = 0; m < sys.N; ++m)
        for (int n = 0; n < sys.N; ++n)
            for (int k = 0; k < sys.N; ++k) {
                std::snprintf(buf, sizeof buf, "%.17g", sys.sigma[m](n, k));
                out << m + 1 << ',' << n + 1 << ',' << k + 1 << ',' << buf << '\n';
            }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace fkg
