#include "fkg/polynomial.hpp"

#include <algorithm>

namespace fkg {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::monomial(int k, double scale) {
    std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
    c.back() = scale;
    return Polynomial(std::move(c));
}

void Polynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::operator()(double x) const noexcept {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d));
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), 0.0);
    for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), 0.0);
    for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    trim();
    return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
    if (lhs.is_zero() || rhs.is_zero()) return {};
    std::vector<double> out(lhs.coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < lhs.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) out[i + j] += lhs.coeffs_[i] * rhs.coeffs_[j];
    return Polynomial(std::move(out));
}

Polynomial exp_derivative(const Polynomial& p, int order) {
    Polynomial out = p;
    for (int r = 0; r < order; ++r) out = out + out.derivative();
    return out;
}

}  // namespace fkg
