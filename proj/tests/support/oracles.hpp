#pragma once

#include <cmath>
#include <functional>

#include <boost/math/differentiation/autodiff.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fkg/basis.hpp"

namespace fkg::testing {

/// Composite 61-point Gauss-Kronrod over `panels` equal pieces of [lo, hi].
inline double integrate(const std::function<double(double)>& f, double lo, double hi, int panels = 32) {
    using boost::math::quadrature::gauss_kronrod;
    const double h = (hi - lo) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * h;
        sum += gauss_kronrod<double, 61>::integrate(f, a, a + h, 0);
    }
    return sum;
}

/// d^order/dx^order of P(x) e^x via forward-mode autodiff on the coefficient
/// list; shares no code with Polynomial::derivative.
inline double psi_derivative(const Polynomial& p, int order, double x) {
    using namespace boost::math::differentiation;
    const auto X = make_fvar<double, 3>(x);
    const auto c = p.coeffs();
    autodiff_fvar<double, 3> acc(0.0);
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * X + c[k];
    const auto psi = acc * exp(X);
    return psi.derivative(static_cast<std::size_t>(order));
}

}  // namespace fkg::testing
