#include "fkg/stepper.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fkg/errors.hpp"

namespace fkg {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

LineProjector::LineProjector(const BasisSet& basis, std::span<const double> xs, ProjectionRule rule) : rule_(rule) {
    const double ell = basis.ell();
    const double tol = 1e-9 * std::max(1.0, ell);
    if (xs.size() < 3 || std::abs(xs.front() + ell) > tol || std::abs(xs.back() - ell) > tol)
        throw std::invalid_argument("LineProjector: x-grid must span [-ell, ell] of the basis");
    const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    for (std::size_t l = 1; l < xs.size(); ++l)
        if (std::abs(xs[l] - xs[l - 1] - h) > 1e-9 * h) throw std::invalid_argument("LineProjector: x-grid must be uniform");

    psi_ = basis.evaluate(0, xs);
    weights_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(xs.size()), h);
    weights_(0) *= 0.5;
    weights_(weights_.size() - 1) *= 0.5;
    if (rule_ == ProjectionRule::GramCorrected) {
        const Eigen::MatrixXd G = psi_ * weights_.asDiagonal() * psi_.transpose();
        gram_.compute(G);
        if (gram_.info() != Eigen::Success) throw std::runtime_error("LineProjector: trapezoid Gram matrix is singular");
    }
}

Eigen::VectorXd LineProjector::project(std::span<const double> values) const {
    if (values.size() != points())
        throw std::invalid_argument("project: expected " + std::to_string(points()) + " samples, got " +
                                    std::to_string(values.size()));
    const Eigen::Map<const Eigen::VectorXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
    Eigen::VectorXd b = psi_ * weights_.cwiseProduct(v);
    if (rule_ == ProjectionRule::GramCorrected) b = gram_.solve(b);
    return b;
}

Eigen::VectorXd project_line(std::span<const double> values, const BasisSet& basis, double dx, ProjectionRule rule) {
    const double intervals = 2.0 * basis.ell() / dx;
    if (!(dx > 0.0) || std::abs(intervals - std::round(intervals)) > 1e-9 * std::max(1.0, intervals))
        throw std::invalid_argument("project_line: dx does not divide the basis interval");
    const auto n = static_cast<int>(std::lround(intervals));
    if (values.size() != static_cast<std::size_t>(n) + 1)
        throw std::invalid_argument("project_line: " + std::to_string(values.size()) + " samples do not match " +
                                    std::to_string(n + 1) + " grid points");
    std::vector<double> xs(static_cast<std::size_t>(n) + 1);
    for (int l = 0; l <= n; ++l) xs[l] = basis.ell() * static_cast<double>(2 * l - n) / n;
    return LineProjector(basis, xs, rule).project(values);
}

Eigen::VectorXd step(const Eigen::VectorXd& V_prev, const StepOperators& ops, const GalerkinSystem& sys, double dt) {
    // S (V - V_prev) = dt F(V_prev)
    const auto N = V_prev.size();
    Eigen::VectorXd F = ops.K * V_prev;
    for (Eigen::Index m = 0; m < N; ++m) F(m) += V_prev.dot(ops.G[static_cast<std::size_t>(m)] * V_prev);
    Eigen::VectorXd V = V_prev + dt * sys.S.triangularView<Eigen::Upper>().solve(F);
    if (!all_finite(V)) throw BlowUpError("step: non-finite coefficients");
    return V;
}

void fill_boundary(CoefficientField& field, const ModelConfig& cfg, const GridSpec& grid, const LineProjector& proj) {
    std::vector<double> v(grid.x.size());
    for (int j = 0; j <= grid.J(); ++j) {
        for (std::size_t l = 0; l < v.size(); ++l) v[l] = forward_transform(cfg.u0(grid.a[j], grid.x[l]), grid.a[j], cfg);
        field.vec(0, j) = proj.project(v);
    }
    for (int i = 1; i <= grid.M(); ++i) {
        for (std::size_t l = 0; l < v.size(); ++l) v[l] = forward_transform(cfg.u0_bar(grid.t[i], grid.x[l]), 0.0, cfg);
        field.vec(i, 0) = proj.project(v);
    }
}

void node_operators(StepOperators& out, const ModelConfig& cfg, const GalerkinSystem& sys, double t, double a) {
    assign_step_operators(out, sys, eval_diffusion(cfg, t, a), cfg.mortality(a), cfg.survival(a), cfg.rho,
                          cfg.kd_ratio());
}

double lattice_p_sum(const ModelConfig& cfg, const GalerkinSystem& sys, const GridSpec& grid) {
    StepOperators ops;
    double sum = 0.0;
    for (int i = 0; i <= grid.M(); ++i)
        for (int j = 0; j <= grid.J(); ++j) {
            node_operators(ops, cfg, sys, grid.t[i], grid.a[j]);
            sum += p_bound(ops);
        }
    return sum;
}

SolveResult solve(const ModelConfig& cfg, const BasisSet& basis, const GalerkinSystem& sys) {
    require_valid(cfg);
    if (basis.size() != cfg.N || sys.N != cfg.N) throw std::invalid_argument("solve: basis size does not match N");

    SolveResult out;
    out.grid = make_grid(cfg);
    const auto& g = out.grid;
    out.field = CoefficientField(g.M(), g.J(), cfg.N);
    const LineProjector proj(basis, g.x);
    fill_boundary(out.field, cfg, g, proj);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    StepOperators ops;
    double P_sum = 0.0;
    for (int i = 0; i <= g.M(); ++i) {
        for (int j = 0; j <= g.J(); ++j) {
            node_operators(ops, cfg, sys, g.t[i], g.a[j]);
            P_sum += p_bound(ops);
            if (i == g.M() || j == g.J()) continue;
            // (i, j) is the ancestor of (i+1, j+1)
            auto child = out.field.vec(i + 1, j + 1);
            if (!out.field.finite(i, j)) {
                child.setConstant(nan);
                continue;
            }
            const Eigen::VectorXd V_prev = out.field.vec(i, j);
            try {
                child = step(V_prev, ops, sys, g.dt);
            } catch (const BlowUpError&) {
                child.setConstant(nan);
                if (!out.blowup) {
                    out.blowup = NodeIndex{i + 1, j + 1};
                    out.blowup_norm = V_prev.stableNorm();
                }
            }
        }
    }
    out.stability = assess(out.field, sys, P_sum, g.dt);
    return out;
}

StabilityReport stability_precheck(const ModelConfig& cfg, const BasisSet& basis, const GalerkinSystem& sys) {
    require_valid(cfg);
    const GridSpec g = make_grid(cfg);
    CoefficientField field(g.M(), g.J(), cfg.N);
    fill_boundary(field, cfg, g, LineProjector(basis, g.x));

    StabilityReport r;
    r.C = data_bound_C(field);
    r.S_inv_frob = frobenius(sys.S_inv);
    r.P_sum = lattice_p_sum(cfg, sys, g);
    r.lhs = g.dt * r.S_inv_frob * r.P_sum;
    r.threshold = admissibility_threshold(r.C);
    r.dt_admissible = dt_admissible(g.dt, r.S_inv_frob, r.P_sum, r.C);
    r.max_norm_observed = std::numeric_limits<double>::quiet_NaN();
    r.bound_2C = 2.0 * r.C;
    r.bound_holds = false;
    r.amplification = amplification(r.C);
    return r;
}

DensitySlice reconstruct_slice(const CoefficientField& field, int i, const LineProjector& proj, const ModelConfig& cfg,
                               const GridSpec& grid, std::optional<NodeIndex>* overflow) {
    if (i < 0 || i > field.M()) throw std::out_of_range("reconstruct: time index " + std::to_string(i) + " outside 0.." +
                                                        std::to_string(field.M()));
    DensitySlice s;
    s.i = i;
    s.t = grid.t[i];
    s.u.resize(field.J() + 1, static_cast<Eigen::Index>(grid.x.size()));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int j = 0; j <= field.J(); ++j) {
        const Eigen::RowVectorXd v = field.vec(i, j).transpose() * proj.samples();
        for (Eigen::Index l = 0; l < v.size(); ++l) {
            double u = nan;
            if (std::isfinite(v(l))) {
                try {
                    u = inverse_transform(v(l), grid.a[j], cfg);
                } catch (const BlowUpError&) {
                }
            }
            if (std::isnan(u) && overflow && !*overflow) *overflow = NodeIndex{i, j};
            s.u(j, l) = u;
        }
    }
    return s;
}

DensityField reconstruct(const CoefficientField& field, const BasisSet& basis, const ModelConfig& cfg,
                         const GridSpec& grid, std::span<const int> time_indices) {
    DensityField out;
    out.a = grid.a;
    out.x = grid.x;
    const LineProjector proj(basis, grid.x);
    for (int i : time_indices) out.slices.push_back(reconstruct_slice(field, i, proj, cfg, grid, &out.overflow));
    return out;
}

}  // namespace fkg
