#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fkg/errors.hpp"

namespace fkg {

/// V_j^i in R^N for 0 <= i <= M, 0 <= j <= J, stored contiguously with the
/// basis index fastest.
class CoefficientField {
public:
    CoefficientField() = default;
    CoefficientField(int M, int J, int N);

    int M() const noexcept { return M_; }
    int J() const noexcept { return J_; }
    int N() const noexcept { return N_; }

    std::span<double> at(int i, int j);
    std::span<const double> at(int i, int j) const;

    Eigen::Map<Eigen::VectorXd> vec(int i, int j);
    Eigen::Map<const Eigen::VectorXd> vec(int i, int j) const;

    bool finite(int i, int j) const;

private:
    std::size_t offset(int i, int j) const;

    int M_ = 0, J_ = 0, N_ = 0;
    std::vector<double> values_;
};

/// u on the (a, x) lattice at one time level. Row j is age a_j, column l is x_l.
struct DensitySlice {
    int i = 0;
    double t = 0.0;
    Eigen::MatrixXd u;
};

struct DensityField {
    std::vector<double> a;
    std::vector<double> x;
    std::vector<DensitySlice> slices;
    /// First node where reconstruction overflowed; those entries hold NaN.
    std::optional<NodeIndex> overflow;
};

}  // namespace fkg
