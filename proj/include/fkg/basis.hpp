#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fkg/polynomial.hpp"

namespace fkg {

/// Integral of x^k e^{c x} over [-ell, ell].
double exp_moment(int k, double c, double ell);

/// Cached exp_moment values for one (c, ell) pair and k = 0..max_k.
class MomentTable {
public:
    MomentTable(double c, double ell, int max_k);

    double operator[](int k) const { return moments_.at(static_cast<std::size_t>(k)); }
    int max_k() const noexcept { return static_cast<int>(moments_.size()) - 1; }

    /// Integral of r(x) e^{c x} over [-ell, ell].
    double integrate(const Polynomial& r) const;

private:
    std::vector<double> moments_;
};

/// <p e^{w1 x}, q e^{w2 x}> with w1 + w2 = exp_weight, over [-ell, ell].
double inner_product(const Polynomial& p, const Polynomial& q, int exp_weight, double ell);

/// Orthonormal basis Psi_n(x) = P_n(x) e^x of L2(-ell, ell), obtained by
/// Gram-Schmidt from x^(n-1) e^x. Indices are 0-based in code; index n holds
/// the function numbered n+1 in output files.
class BasisSet {
public:
    static constexpr int kMaxSize = 12;

    int size() const noexcept { return static_cast<int>(polys_.size()); }
    double ell() const noexcept { return ell_; }

    const Polynomial& poly(int n) const { return polys_.at(static_cast<std::size_t>(n)); }
    std::span<const Polynomial> polys() const noexcept { return polys_; }

    /// Q such that d^order/dx^order Psi_n = Q(x) e^x.
    Polynomial derivative_poly(int n, int order) const;

    /// Row n holds d^order Psi_n at each point of xs. order in 0..3, xs in [-ell, ell].
    Eigen::MatrixXd evaluate(int order, std::span<const double> xs) const;

    /// max |<Psi_m, Psi_n> - delta_mn| under the exact inner product.
    double gram_defect() const;

private:
    friend BasisSet build_basis(int N, double ell);

    BasisSet(double ell, std::vector<Polynomial> polys) : ell_(ell), polys_(std::move(polys)) {}

    double ell_;
    std::vector<Polynomial> polys_;
};

/// Modified Gram-Schmidt with one re-orthogonalisation pass on coefficient
/// vectors. Throws std::invalid_argument for N outside [1, 12] or ell <= 0,
/// std::runtime_error if the resulting Gram matrix is off by more than 1e-8.
BasisSet build_basis(int N, double ell);

/// CSV with header n,k,coeff (n is 1-based).
void write_basis_csv(const BasisSet& basis, const std::filesystem::path& path);

}  // namespace fkg
