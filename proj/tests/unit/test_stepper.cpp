#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fkg/errors.hpp"
#include "fkg/galerkin.hpp"
#include "fkg/postprocess.hpp"
#include "fkg/stepper.hpp"

using namespace fkg;

namespace {

std::vector<double> grid_x(int n, double ell = 1.0) {
    std::vector<double> xs;
    for (int l = 0; l <= n; ++l) xs.push_back(ell * (2.0 * l - n) / n);
    return xs;
}

// small, fast configuration on top of a preset
ModelConfig small(int id, int M = 40) {
    auto s = preset_scalars(id);
    s.T = 1.0;
    s.a_max = 2.0;
    s.M = M;
    return make_preset(id, s);
}

}  // namespace

TEST_CASE("project_line: basis elements and linear combinations") {
    const auto basis = build_basis(6, 1.0);
    const auto xs = grid_x(40);
    const auto psi = basis.evaluate(0, xs);
    std::vector<double> v(xs.size());
    for (std::size_t l = 0; l < xs.size(); ++l) v[l] = psi(0, static_cast<Eigen::Index>(l));
    auto c = project_line(v, basis, 0.05);
    CHECK(std::abs(c(0) - 1.0) <= 1e-4);
    for (int n = 1; n < 6; ++n) CHECK(std::abs(c(n)) <= 1e-4);

    for (std::size_t l = 0; l < xs.size(); ++l)
        v[l] = 2.0 * psi(1, static_cast<Eigen::Index>(l)) + 3.0 * psi(4, static_cast<Eigen::Index>(l));
    c = project_line(v, basis, 0.05);
    const double want[] = {0, 2, 0, 0, 3, 0};
    for (int n = 0; n < 6; ++n) CHECK(std::abs(c(n) - want[n]) <= 1e-4);

    std::fill(v.begin(), v.end(), 0.0);
    CHECK(project_line(v, basis, 0.05).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("project_line: plain trapezoid rule against a fine-grid oracle") {
    // both rules agree with exact inner products as the grid is refined
    const auto basis = build_basis(3, 1.0);
    auto f = [](double x) { return std::sin(2.0 * x) + x * x; };
    auto proj = [&](int n, ProjectionRule rule) {
        const auto xs = grid_x(n);
        std::vector<double> v;
        for (double x : xs) v.push_back(f(x));
        return project_line(v, basis, 2.0 / n, rule);
    };
    const auto fine = proj(4000, ProjectionRule::Trapezoid);
    const auto coarse = proj(40, ProjectionRule::Trapezoid);
    const auto corrected = proj(40, ProjectionRule::GramCorrected);
    CHECK((coarse - fine).cwiseAbs().maxCoeff() <= 1e-2);
    CHECK((corrected - fine).cwiseAbs().maxCoeff() <= 1e-2);
    CHECK((proj(4000, ProjectionRule::GramCorrected) - fine).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("project_line: grid checks") {
    const auto basis = build_basis(2, 1.0);
    std::vector<double> v(40, 1.0);
    CHECK_THROWS_AS(project_line(v, basis, 0.05), std::invalid_argument);
    v.resize(41);
    CHECK_THROWS_AS(project_line(v, basis, 0.3), std::invalid_argument);
    const auto other = build_basis(2, 2.0);
    CHECK_THROWS_AS(LineProjector(other, grid_x(40)), std::invalid_argument);
}

TEST_CASE("step: scalar hand evaluation") {
    GalerkinSystem sys;
    sys.N = 1;
    sys.S = Eigen::MatrixXd::Identity(1, 1);
    StepOperators ops{Eigen::MatrixXd::Constant(1, 1, 1.1), {Eigen::MatrixXd::Constant(1, 1, 1.9338)}};
    const Eigen::VectorXd V = Eigen::VectorXd::Ones(1);
    CHECK(step(V, ops, sys, 0.1)(0) == doctest::Approx(1.30338).epsilon(1e-14));
    CHECK(step(V, ops, sys, 0.0)(0) == 1.0);
}

TEST_CASE("step: zero operators and dt=0 leave V unchanged") {
    const auto sys = assemble_structure(build_basis(6, 1.0));
    const auto zero = step_operators(sys, 0.0, 0.0, 1.0, 0.0, 1.0);
    Eigen::VectorXd V(6);
    V << 0.3, -1.2, 2.0, 0.01, -0.5, 4.0;
    CHECK((step(V, zero, sys, 0.7) - V).cwiseAbs().maxCoeff() == 0.0);
    const auto ops = step_operators(sys, 0.5, 0.2, 0.6, 1.0, 1.0);
    CHECK((step(V, ops, sys, 0.0) - V).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step: non-finite result raises a blow-up") {
    const auto sys = assemble_structure(build_basis(2, 1.0));
    const auto ops = step_operators(sys, 1.0, 0.0, 1.0, 0.0, 1.0);
    Eigen::VectorXd V(2);
    V << 1e200, 1e200;
    CHECK_THROWS_AS(step(V, ops, sys, 1.0), BlowUpError);
}

TEST_CASE("solve: boundary data, compatibility and the recurrence") {
    const auto cfg = small(1);
    const auto basis = build_basis(cfg.N, cfg.ell);
    const auto sys = assemble_structure(basis);
    const auto res = solve(cfg, basis, sys);
    const auto& g = res.grid;
    CHECK(!res.blowup);

    const LineProjector proj(basis, g.x);
    std::vector<double> v(g.x.size());
    for (std::size_t l = 0; l < v.size(); ++l) v[l] = forward_transform(cfg.u0_bar(0.0, g.x[l]), 0.0, cfg);
    CHECK((proj.project(v) - res.field.vec(0, 0)).cwiseAbs().maxCoeff() <= 1e-9);

    StepOperators ops;
    for (int i = 1; i <= g.M(); i += 7)
        for (int j = 1; j <= g.J(); j += 5) {
            node_operators(ops, cfg, sys, g.t[i - 1], g.a[j - 1]);
            const Eigen::VectorXd V = step(res.field.vec(i - 1, j - 1), ops, sys, g.dt);
            CHECK((V - res.field.vec(i, j)).cwiseAbs().maxCoeff() == 0.0);
        }
}

TEST_CASE("solve: trace-back along the diagonal") {
    // S V_j^i = S V_root + dt sum_k F(V_k) over the ancestors
    const auto cfg = small(3);
    const auto basis = build_basis(cfg.N, cfg.ell);
    const auto sys = assemble_structure(basis);
    const auto res = solve(cfg, basis, sys);
    const auto& g = res.grid;
    StepOperators ops;
    for (auto [i, j] : {std::pair{20, 10}, std::pair{10, 30}, std::pair{40, 40}}) {
        const int back = std::min(i, j);
        Eigen::VectorXd acc = sys.S * res.field.vec(i - back, j - back);
        for (int k = back; k >= 1; --k) {
            const int ii = i - k, jj = j - k;
            node_operators(ops, cfg, sys, g.t[ii], g.a[jj]);
            const Eigen::VectorXd V = res.field.vec(ii, jj);
            Eigen::VectorXd F = ops.K * V;
            for (int m = 0; m < cfg.N; ++m) F(m) += V.dot(ops.G[m] * V);
            acc += g.dt * F;
        }
        const Eigen::VectorXd lhs = sys.S * res.field.vec(i, j);
        CHECK((lhs - acc).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, acc.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("solve: diagonal causality") {
    auto cfg = small(2, 20);
    cfg.N = 3;
    const auto basis = build_basis(cfg.N, cfg.ell);
    const auto sys = assemble_structure(basis);
    const auto base = solve(cfg, basis, sys);

    // perturb u0 only at the age node a_j' = 0.25 (j' = 5)
    const double target = 5 * base.grid.dt;
    auto bumped = cfg;
    bumped.u0 = [u0 = cfg.u0, target](double a, double x) {
        return std::abs(a - target) < 1e-12 ? u0(a, x) * 1.01 : u0(a, x);
    };
    const auto pert = solve(bumped, basis, sys);
    for (int i = 0; i <= base.grid.M(); ++i)
        for (int j = 0; j <= base.grid.J(); ++j) {
            const double diff = (pert.field.vec(i, j) - base.field.vec(i, j)).cwiseAbs().maxCoeff();
            if (j - i == 5) CHECK(diff > 0.0);
            else CHECK(diff == 0.0);
        }
}

TEST_CASE("solve: Example 1 at M=200 completes without blow-up") {
    const auto cfg = preset(1);
    const auto basis = build_basis(cfg.N, cfg.ell);
    const auto res = solve(cfg, basis, assemble_structure(basis));
    CHECK(!res.blowup);
    CHECK(std::isfinite(res.stability.max_norm_observed));
    CHECK(res.stability.C > 0.0);
}

TEST_CASE("solve: blow-up is recorded and the run continues") {
    auto s = preset_scalars(1);
    s.M = 800;
    const auto cfg = make_preset(1, s);
    const auto basis = build_basis(cfg.N, cfg.ell);
    const auto res = solve(cfg, basis, assemble_structure(basis));
    REQUIRE(res.blowup);
    CHECK(!res.field.finite(res.blowup->i, res.blowup->j));
    // only the oldest ages, where Pi is tiny, go non-finite
    int bad = 0;
    for (int i = 0; i <= res.grid.M(); ++i)
        for (int j = 0; j <= res.grid.J(); ++j)
            if (!res.field.finite(i, j)) {
                ++bad;
                CHECK(i >= res.blowup->i);
                CHECK(res.grid.a[j] >= 11.8);
            }
    CHECK(bad > 0);
    CHECK(res.field.finite(res.grid.M(), res.grid.J() - 20));
    CHECK(std::isinf(res.stability.max_norm_observed));
    CHECK_FALSE(res.stability.bound_holds);
}

TEST_CASE("reconstruct: zero coefficients give the carrying level") {
    const auto cfg = small(1, 10);
    const auto basis = build_basis(cfg.N, cfg.ell);
    const auto g = make_grid(cfg);
    const CoefficientField zero(g.M(), g.J(), cfg.N);
    const int times[] = {0, 5, 10};
    const auto dens = reconstruct(zero, basis, cfg, g, times);
    REQUIRE(dens.slices.size() == 3);
    for (const auto& s : dens.slices) CHECK((s.u.array() - std::numbers::e).abs().maxCoeff() <= 1e-15);
    const int bad[] = {11};
    CHECK_THROWS_AS(reconstruct(zero, basis, cfg, g, bad), std::out_of_range);
}

TEST_CASE("reconstruct: t=0 reproduces u0 to the truncation error") {
    for (int id = 1; id <= 3; ++id) {
        const auto cfg = preset(id);
        const auto basis = build_basis(cfg.N, cfg.ell);
        const auto res = solve(cfg, basis, assemble_structure(basis));
        const int zero[] = {0};
        const auto dens = reconstruct(res.field, basis, cfg, res.grid, zero);
        Eigen::MatrixXd v_true(res.grid.J() + 1, res.grid.nx()), v_rec(res.grid.J() + 1, res.grid.nx());
        for (int j = 0; j <= res.grid.J(); ++j)
            for (int l = 0; l < res.grid.nx(); ++l) {
                v_true(j, l) = forward_transform(cfg.u0(res.grid.a[j], res.grid.x[l]), res.grid.a[j], cfg);
                v_rec(j, l) = forward_transform(dens.slices[0].u(j, l), res.grid.a[j], cfg);
            }
        const double table1_n6[] = {0.012, 0.160, 0.134};
        const double err = e_max(v_true, v_rec);
        INFO("example " << id << " E_max " << err);
        CHECK(err <= 1.5 * table1_n6[id - 1]);
    }
}

TEST_CASE("reconstruct: top age node within the coefficient-norm bound") {
    const auto cfg = preset(3);
    const auto basis = build_basis(cfg.N, cfg.ell);
    const auto res = solve(cfg, basis, assemble_structure(basis));
    const auto& g = res.grid;
    const int j = g.J();
    const double Pi = cfg.survival(g.a[j]);
    const Eigen::MatrixXd psi = basis.evaluate(0, g.x);
    const double psi_sup = psi.cwiseAbs().maxCoeff();
    const int times[] = {40, 200};
    const auto dens = reconstruct(res.field, basis, cfg, g, times);
    for (const auto& s : dens.slices) {
        // |v| <= sum |V_n| max|Psi| <= sqrt(N) |V|_2 max|Psi|
        const double bound = Pi * std::sqrt(cfg.N) * res.field.vec(s.i, j).norm() * psi_sup;
        for (int l = 0; l < g.nx(); ++l) {
            CHECK(s.u(j, l) <= std::numbers::e * std::exp(bound) * (1 + 1e-12));
            CHECK(s.u(j, l) >= std::numbers::e * std::exp(-bound) * (1 - 1e-12));
        }
    }
}

TEST_CASE("stability_precheck matches the solved report") {
    const auto cfg = small(1);
    const auto basis = build_basis(cfg.N, cfg.ell);
    const auto sys = assemble_structure(basis);
    const auto pre = stability_precheck(cfg, basis, sys);
    const auto res = solve(cfg, basis, sys);
    CHECK(pre.C == res.stability.C);
    CHECK(pre.P_sum == doctest::Approx(res.stability.P_sum).epsilon(1e-14));
    CHECK(pre.dt_admissible == res.stability.dt_admissible);
    CHECK(std::isnan(pre.max_norm_observed));
    CHECK(pre.P_sum == doctest::Approx(lattice_p_sum(cfg, sys, res.grid)).epsilon(1e-14));
}
