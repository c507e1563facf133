#include "fkg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkg {

DensityField solve_reference(const OracleConfig& cfg, std::span<const int> time_indices) {
    const ModelConfig& m = cfg.model;
    if (cfg.time_refine < 1 || cfg.space_refine < 1) throw std::invalid_argument("oracle: refinement factors must be >= 1");
    require_valid(m);
    const GridSpec g = make_grid(m);
    const double t_end = cfg.t_end > 0.0 ? cfg.t_end : m.T;

    const int rt = cfg.time_refine;
    const int rs = cfg.space_refine;
    const double dt = g.dt / rt;
    const double dx = g.dx / rs;
    const int steps = static_cast<int>(std::floor(t_end / dt + 1e-9));
    const int ages = (g.J() + 1) * rt;  // fine nodes k = 0..ages-1, all below a_max
    const int nx = (g.nx() - 1) * rs + 1;

    std::set<int> wanted(time_indices.begin(), time_indices.end());
    for (int i : wanted)
        if (i < 0 || i > g.M() || i * rt > steps)
            throw std::out_of_range("oracle: time index " + std::to_string(i) + " beyond t_end");

    std::vector<double> a(static_cast<std::size_t>(ages)), x(static_cast<std::size_t>(nx));
    for (int k = 0; k < ages; ++k) a[k] = k * dt;
    for (int l = 0; l < nx; ++l) x[l] = -m.ell + 2.0 * m.ell * l / (nx - 1);

    double worst = 0.0;
    for (int n = 0; n < steps; ++n)
        for (int k = 0; k < ages; ++k) worst = std::max(worst, eval_diffusion(m, n * dt, a[k]) * dt / (dx * dx));
    if (worst > 0.5) {
        const int need = static_cast<int>(std::ceil(rt * worst / 0.5));
        throw std::invalid_argument("oracle: CFL number " + std::to_string(worst) +
                                    " exceeds 1/2; use time_refine >= " + std::to_string(need));
    }

    const double level = m.carrying_level();
    const double rate = cfg.source == SourceModel::Original ? m.rho : m.rho / level;
    std::vector<double> mu(static_cast<std::size_t>(ages));
    for (int k = 0; k < ages; ++k) mu[k] = cfg.source == SourceModel::Original ? m.mortality(a[k]) : 0.0;

    DensityField out;
    out.a = g.a;
    out.x = g.x;
    auto sample = [&](const std::vector<double>& u, int i) {
        DensitySlice s;
        s.i = i;
        s.t = g.t[i];
        s.u.resize(g.J() + 1, g.nx());
        for (int j = 0; j <= g.J(); ++j)
            for (int l = 0; l < g.nx(); ++l) s.u(j, l) = u[static_cast<std::size_t>(j * rt) * nx + l * rs];
        out.slices.push_back(std::move(s));
    };

    std::vector<double> u(static_cast<std::size_t>(ages) * nx), next(u.size());
    for (int k = 0; k < ages; ++k)
        for (int l = 0; l < nx; ++l) u[static_cast<std::size_t>(k) * nx + l] = m.u0(a[k], x[l]);
    if (wanted.count(0)) sample(u, 0);

    const double inv_dx2 = 1.0 / (dx * dx);
    for (int n = 0; n < steps; ++n) {
        const double t = n * dt;
        for (int l = 0; l < nx; ++l) next[l] = m.u0_bar(t + dt, x[l]);
        for (int k = 0; k + 1 < ages; ++k) {
            const double D = eval_diffusion(m, t, a[k]);
            const double* row = &u[static_cast<std::size_t>(k) * nx];
            double* dst = &next[static_cast<std::size_t>(k + 1) * nx];
            for (int l = 0; l < nx; ++l) {
                const double left = row[l == 0 ? 1 : l - 1];
                const double right = row[l == nx - 1 ? nx - 2 : l + 1];
                const double lap = (left - 2.0 * row[l] + right) * inv_dx2;
                const double src = -rate * row[l] * std::log(row[l] / level) - mu[k] * row[l];
                dst[l] = row[l] + dt * (D * lap + src);
            }
        }
        u.swap(next);
        if ((n + 1) % rt == 0 && wanted.count((n + 1) / rt)) sample(u, (n + 1) / rt);
    }
    return out;
}

}  // namespace fkg
