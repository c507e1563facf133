#include "fkg/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "fkg/errors.hpp"

namespace fkg {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string out = "invalid configuration";
    for (const auto& p : problems) out += "\n  - " + p;
    return out;
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

double ModelConfig::carrying_level() const { return std::exp(kd_ratio()); }

double survival(double a, double a_max) {
    if (!(a >= 0.0 && a <= a_max)) throw std::invalid_argument(fmt("survival: age %g outside [0, %g]", a, a_max));
    return (a_max - a) / a_max;
}

double forward_transform(double u, double a, const ModelConfig& cfg) {
    if (!(u > 0.0)) throw std::invalid_argument(fmt("forward_transform: density %g is not positive", u));
    const double pi = cfg.survival(a);
    if (!(pi > kSurvivalFloor))
        throw std::invalid_argument(fmt("forward_transform: survival vanishes at a=%g (Pi=%g)", a, pi));
    return (std::log(u) - cfg.kd_ratio()) / pi;
}

double inverse_transform(double v, double a, const ModelConfig& cfg) {
    const double pi = cfg.survival(a);
    if (pi == 0.0) return cfg.carrying_level();
    const double e = pi * v;
    if (!std::isfinite(e) || e > kMaxExponent)
        throw BlowUpError(fmt("inverse_transform: exponent Pi*v = %g at a=%g overflows", e, a));
    return std::exp(cfg.kd_ratio() + e);
}

ModelScalars preset_scalars(int example_id) {
    ModelScalars s;  // ell=1, dx=0.05, T=10, a_max=12, K=d=1, N=6
    switch (example_id) {
        case 1: s.rho = 0.5; break;
        case 2: s.rho = 7.0; break;
        case 3: s.rho = 0.36; break;
        default: throw std::invalid_argument("unknown example id " + std::to_string(example_id) + " (expected 1, 2 or 3)");
    }
    return s;
}

ModelConfig make_preset(int example_id, const ModelScalars& scalars) {
    ModelConfig cfg;
    static_cast<ModelScalars&>(cfg) = scalars;
    cfg.example_id = example_id;
    cfg.label = "example" + std::to_string(example_id);

    const double a_max = scalars.a_max;
    const double T = scalars.T;
    cfg.mortality = [a_max](double a) { return 1.0 / (a_max - a); };
    cfg.survival = [a_max](double a) { return survival(a, a_max); };

    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    switch (example_id) {
        case 1: {
            const double eps = 0.75;
            auto profile = [eps, inv_sqrt_2pi](double s, double x) {
                const double r2 = x * x + (s - 0.15) * (s - 0.15);
                return inv_sqrt_2pi / eps * std::exp(-r2 / (2.0 * eps * eps));
            };
            cfg.u0 = profile;
            cfg.u0_bar = profile;
            // exp(-(a_max/8 - a)^2 / a) -> 0 as a -> 0+.
            cfg.diffusion = [a_max](double, double a) {
                if (a <= 0.0) return 0.03;
                const double s = a_max / 8.0 - a;
                return 0.03 - 0.03 * std::exp(-s * s / a);
            };
            break;
        }
        case 2: {
            const double eps = 0.075;
            cfg.u0 = [eps](double a, double x) { return std::exp(-6.0 * x * x) / (eps + std::cosh(a - 7.0)); };
            cfg.u0_bar = [eps](double t, double x) { return std::exp(-6.0 * x * x) / (eps + std::cosh(3.0 * t - 7.0)); };
            cfg.diffusion = [a_max, T](double t, double a) {
                const double s = t - 8.0 * T;
                return std::exp(-s * s / T) * (a_max - a);
            };
            break;
        }
        case 3: {
            const double eps = 0.5;
            auto profile = [eps, inv_sqrt_2pi](double s, double x) {
                const double hump = 2.0 - std::sin(std::numbers::pi / 4.0 * (s - 3.0));
                return inv_sqrt_2pi / eps * hump * std::exp(-(x - 0.25) * (x - 0.25));
            };
            cfg.u0 = profile;
            cfg.u0_bar = profile;
            cfg.diffusion = [a_max, T](double t, double a) {
                const double st = t - 2.0 * T;
                const double sa = a - 2.0 * a_max;
                return std::exp(-st * st - sa * sa);
            };
            break;
        }
        default: throw std::invalid_argument("unknown example id " + std::to_string(example_id) + " (expected 1, 2 or 3)");
    }
    return cfg;
}

ModelConfig preset(int example_id) { return make_preset(example_id, preset_scalars(example_id)); }

double eval_diffusion(const ModelConfig& cfg, double t, double a) { return cfg.diffusion(t, a); }

namespace {

std::vector<std::string> scalar_problems(const ModelScalars& s) {
    std::vector<std::string> out;
    auto positive = [&](const char* name, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " must be positive and finite, got " + fmt("%g", v));
    };
    positive("T", s.T);
    positive("ell", s.ell);
    positive("a_max", s.a_max);
    positive("dx", s.dx);
    positive("K_gomp", s.K_gomp);
    positive("d_gomp", s.d_gomp);
    if (!(s.rho >= 0.0) || !std::isfinite(s.rho)) out.push_back("rho must be nonnegative and finite, got " + fmt("%g", s.rho));
    if (s.M < 2) out.push_back("M must be at least 2, got " + std::to_string(s.M));
    if (s.N < 1 || s.N > 12) out.push_back("N must be in [1, 12], got " + std::to_string(s.N));
    if (s.ell > 0.0 && s.dx > 0.0 && std::isfinite(s.ell) && std::isfinite(s.dx)) {
        const double intervals = 2.0 * s.ell / s.dx;
        if (std::abs(intervals - std::round(intervals)) > 1e-9 * std::max(1.0, intervals) || std::round(intervals) < 2.0)
            out.push_back(fmt("dx=%g does not divide the interval length 2*ell=%g", s.dx, 2.0 * s.ell));
    }
    return out;
}

}  // namespace

GridSpec make_grid(const ModelConfig& cfg) {
    auto problems = scalar_problems(cfg);
    if (!problems.empty()) throw ConfigError(std::move(problems));

    GridSpec g;
    g.dt = cfg.dt();
    g.t.resize(static_cast<std::size_t>(cfg.M) + 1);
    for (int i = 0; i <= cfg.M; ++i) g.t[i] = i * g.dt;

    const int last_age = static_cast<int>(std::ceil(cfg.a_max / g.dt - 1e-9)) - 1;
    g.a.resize(static_cast<std::size_t>(last_age) + 1);
    for (int j = 0; j <= last_age; ++j) g.a[j] = j * g.dt;

    const int intervals = static_cast<int>(std::lround(2.0 * cfg.ell / cfg.dx));
    g.dx = 2.0 * cfg.ell / intervals;
    g.x.resize(static_cast<std::size_t>(intervals) + 1);
    for (int l = 0; l <= intervals; ++l) g.x[l] = cfg.ell * static_cast<double>(2 * l - intervals) / intervals;
    return g;
}

std::vector<std::string> validate(const ModelConfig& cfg) {
    std::vector<std::string> problems = scalar_problems(cfg);
    if (!cfg.diffusion) problems.emplace_back("D: coefficient function missing");
    if (!cfg.mortality) problems.emplace_back("mu: coefficient function missing");
    if (!cfg.survival) problems.emplace_back("survival: function missing");
    if (!cfg.u0) problems.emplace_back("u0: initial data missing");
    if (!cfg.u0_bar) problems.emplace_back("u0_bar: newborn data missing");
    if (!problems.empty()) return problems;

    const GridSpec g = make_grid(cfg);

    double max_u0 = 0.0, max_gap = 0.0;
    for (double x : g.x) {
        max_u0 = std::max(max_u0, std::abs(cfg.u0(0.0, x)));
        max_gap = std::max(max_gap, std::abs(cfg.u0(0.0, x) - cfg.u0_bar(0.0, x)));
    }
    if (!(max_gap <= 1e-9 * max_u0))
        problems.push_back(fmt("compatibility: max |u0(0,x) - u0_bar(0,x)| = %g exceeds 1e-9 * max|u0(0,x)| = %g", max_gap,
                               1e-9 * max_u0));

    [&] {
        for (double a : g.a)
            for (double x : g.x) {
                const double u = cfg.u0(a, x);
                if (!(u > 0.0) || !std::isfinite(u)) {
                    problems.push_back(fmt("u0: non-positive value at (a=%g, x=%g)", a, x) + fmt(" (u=%g)", u));
                    return;
                }
            }
    }();
    [&] {
        for (double t : g.t)
            for (double x : g.x) {
                const double u = cfg.u0_bar(t, x);
                if (!(u > 0.0) || !std::isfinite(u)) {
                    problems.push_back(fmt("u0_bar: non-positive value at (t=%g, x=%g)", t, x) + fmt(" (u=%g)", u));
                    return;
                }
            }
    }();
    [&] {
        for (double t : g.t)
            for (double a : g.a) {
                const double d = cfg.diffusion(t, a);
                if (!(d >= 0.0) || !std::isfinite(d)) {
                    problems.push_back(fmt("D: negative or non-finite value at (t=%g, a=%g)", t, a) + fmt(" (D=%g)", d));
                    return;
                }
            }
    }();
    [&] {
        for (double a : g.a) {
            const double mu = cfg.mortality(a);
            const double pi = cfg.survival(a);
            if (!std::isfinite(mu)) {
                problems.push_back(fmt("mu: non-finite value at a=%g", a));
                return;
            }
            if (!(pi > kSurvivalFloor && pi <= 1.0)) {
                problems.push_back(fmt("survival: value %g at a=%g outside (0, 1]", pi, a));
                return;
            }
        }
    }();
    return problems;
}

void require_valid(const ModelConfig& cfg) {
    auto problems = validate(cfg);
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

}  // namespace fkg
