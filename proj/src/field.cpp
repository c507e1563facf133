#include "fkg/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fkg {

CoefficientField::CoefficientField(int M, int J, int N) : M_(M), J_(J), N_(N) {
    if (M < 0 || J < 0 || N < 1) throw std::invalid_argument("CoefficientField: bad dimensions");
    values_.assign(static_cast<std::size_t>(M + 1) * static_cast<std::size_t>(J + 1) * static_cast<std::size_t>(N), 0.0);
}

std::size_t CoefficientField::offset(int i, int j) const {
    if (i < 0 || i > M_ || j < 0 || j > J_)
        throw std::out_of_range("CoefficientField: node (" + std::to_string(i) + ", " + std::to_string(j) +
                                ") outside lattice");
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(J_ + 1) + static_cast<std::size_t>(j)) *
           static_cast<std::size_t>(N_);
}

std::span<double> CoefficientField::at(int i, int j) {
    return {values_.data() + offset(i, j), static_cast<std::size_t>(N_)};
}

std::span<const double> CoefficientField::at(int i, int j) const {
    return {values_.data() + offset(i, j), static_cast<std::size_t>(N_)};
}

Eigen::Map<Eigen::VectorXd> CoefficientField::vec(int i, int j) { return {values_.data() + offset(i, j), N_}; }

Eigen::Map<const Eigen::VectorXd> CoefficientField::vec(int i, int j) const {
    return {values_.data() + offset(i, j), N_};
}

bool CoefficientField::finite(int i, int j) const {
    const auto v = at(i, j);
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace fkg
