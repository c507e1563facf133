#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fkg {

/// Dense real polynomial, coefficient k multiplies x^k.
///
/// Trailing zero coefficients are trimmed on construction, so the last stored
/// coefficient is nonzero unless the polynomial is identically zero.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);

    static Polynomial monomial(int k, double scale = 1.0);

    /// -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    std::span<const double> coeffs() const noexcept { return coeffs_; }

    /// Coefficient of x^k; zero past the degree.
    double operator[](std::size_t k) const noexcept { return k < coeffs_.size() ? coeffs_[k] : 0.0; }
    double leading() const noexcept { return coeffs_.empty() ? 0.0 : coeffs_.back(); }

    double operator()(double x) const noexcept;

    Polynomial derivative() const;

    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    Polynomial& operator*=(double s);

    friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
    friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
    friend Polynomial operator*(Polynomial p, double s) { return p *= s; }
    friend Polynomial operator*(double s, Polynomial p) { return p *= s; }
    friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);

private:
    void trim();

    std::vector<double> coeffs_;
};

/// Polynomial part of d/dx [p(x) e^x], i.e. p + p'.
Polynomial exp_derivative(const Polynomial& p, int order = 1);

}  // namespace fkg
