#include "fkg/basis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace fkg {

namespace {

// Taylor expansion of e^{cx}: only terms with k + j even survive the
// symmetric integral, and those all share the sign of c^j, so the sum has no
// cancellation.
double exp_moment_series(int k, double c, double ell) {
    const double z = c * ell;
    const double scale = 2.0 * std::pow(ell, k + 1);
    int j = k % 2;
    double r = (j == 0) ? 1.0 : z;  // z^j / j!
    double sum = 0.0;
    for (int iter = 0; iter < 100000; ++iter, j += 2) {
        const double term = r * scale / static_cast<double>(k + j + 1);
        sum += term;
        if (term == 0.0 || (j > std::abs(z) && std::abs(term) <= 1e-18 * std::abs(sum))) break;
        r *= z * z / (static_cast<double>(j + 1) * static_cast<double>(j + 2));
    }
    return sum;
}

// Integration by parts, I_k = [x^k e^{cx}/c] - (k/c) I_{k-1}. Errors shrink by
// k/|c ell| per step, so this is only used while k <= |c| ell.
double exp_moment_recurrence(int k, double c, double ell) {
    const double ep = std::exp(c * ell);
    const double em = std::exp(-c * ell);
    double I = (ep - em) / c;
    double lp = 1.0;  // ell^m
    double lm = 1.0;  // (-ell)^m
    for (int m = 1; m <= k; ++m) {
        lp *= ell;
        lm *= -ell;
        I = (lp * ep - lm * em) / c - (static_cast<double>(m) / c) * I;
    }
    return I;
}

}  // namespace

double exp_moment(int k, double c, double ell) {
    if (k < 0) throw std::invalid_argument("exp_moment: k must be nonnegative");
    if (c == 0.0) {
        return (std::pow(ell, k + 1) - std::pow(-ell, k + 1)) / static_cast<double>(k + 1);
    }
    if (static_cast<double>(k) <= std::abs(c) * ell) return exp_moment_recurrence(k, c, ell);
    return exp_moment_series(k, c, ell);
}

MomentTable::MomentTable(double c, double ell, int max_k) {
    moments_.reserve(static_cast<std::size_t>(max_k) + 1);
    for (int k = 0; k <= max_k; ++k) moments_.push_back(exp_moment(k, c, ell));
}

double MomentTable::integrate(const Polynomial& r) const {
    if (r.degree() > max_k()) throw std::out_of_range("MomentTable: polynomial degree exceeds table");
    double acc = 0.0;
    const auto c = r.coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * moments_[k];
    return acc;
}

double inner_product(const Polynomial& p, const Polynomial& q, int exp_weight, double ell) {
    const Polynomial r = p * q;
    if (r.is_zero()) return 0.0;
    return MomentTable(static_cast<double>(exp_weight), ell, r.degree()).integrate(r);
}

Polynomial BasisSet::derivative_poly(int n, int order) const { return exp_derivative(poly(n), order); }

Eigen::MatrixXd BasisSet::evaluate(int order, std::span<const double> xs) const {
    if (order < 0 || order > 3) throw std::invalid_argument("evaluate: derivative order must be in 0..3");
    const double tol = 1e-12 * std::max(1.0, ell_);
    for (double x : xs) {
        if (!(x >= -ell_ - tol && x <= ell_ + tol))
            throw std::invalid_argument("evaluate: point " + std::to_string(x) + " outside [-ell, ell]");
    }
    Eigen::MatrixXd out(size(), static_cast<Eigen::Index>(xs.size()));
    for (int n = 0; n < size(); ++n) {
        const Polynomial q = derivative_poly(n, order);
        for (std::size_t l = 0; l < xs.size(); ++l) out(n, static_cast<Eigen::Index>(l)) = q(xs[l]) * std::exp(xs[l]);
    }
    return out;
}

double BasisSet::gram_defect() const {
    const MomentTable w2(2.0, ell_, 2 * (size() - 1));
    double defect = 0.0;
    for (int m = 0; m < size(); ++m)
        for (int n = 0; n < size(); ++n) {
            const double g = w2.integrate(poly(m) * poly(n));
            defect = std::max(defect, std::abs(g - (m == n ? 1.0 : 0.0)));
        }
    return defect;
}

BasisSet build_basis(int N, double ell) {
    if (N < 1 || N > BasisSet::kMaxSize)
        throw std::invalid_argument("build_basis: N must be in [1, " + std::to_string(BasisSet::kMaxSize) + "], got " +
                                    std::to_string(N));
    if (!(ell > 0.0) || !std::isfinite(ell)) throw std::invalid_argument("build_basis: ell must be positive");

    const MomentTable w2(2.0, ell, 2 * (N - 1));
    auto ip = [&](const Polynomial& p, const Polynomial& q) { return w2.integrate(p * q); };

    std::vector<Polynomial> polys;
    polys.reserve(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        Polynomial v = Polynomial::monomial(n);
        for (int pass = 0; pass < 2; ++pass)
            for (const Polynomial& q : polys) v -= ip(v, q) * q;
        const double norm = std::sqrt(ip(v, v));
        if (!(norm > 0.0)) throw std::runtime_error("build_basis: lost linear independence at n=" + std::to_string(n + 1));
        v *= 1.0 / norm;
        if (v.leading() < 0.0) v *= -1.0;
        polys.push_back(std::move(v));
    }

    BasisSet basis(ell, std::move(polys));
    const double defect = basis.gram_defect();
    if (defect > 1e-8) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "build_basis: Gram defect %.3e exceeds 1e-8 (N=%d, ell=%g)", defect, N, ell);
        throw std::runtime_error(buf);
    }
    return basis;
}

void write_basis_csv(const BasisSet& basis, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "n,k,coeff\n";
    char buf[64];
    for (int n = 0; n < basis.size(); ++n) {
        const auto c = basis.poly(n).coeffs();
        for (std::size_t k = 0; k < c.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", c[k]);
            out << n + 1 << ',' << k << ',' << buf << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace fkg
