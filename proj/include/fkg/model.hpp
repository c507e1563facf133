#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fkg {

/// Scalar parameters of the Gompertz age-structured model.
struct ModelScalars {
    double rho = 0.5;     // net proliferation rate, month^-1
    double K_gomp = 1.0;  // Gompertz growth constant
    double d_gomp = 1.0;  // Gompertz damping constant
    double ell = 1.0;     // half-width of the spatial interval, cm
    double a_max = 12.0;  // maximal age, months
    double T = 10.0;      // final time, months
    int M = 200;          // time steps
    int N = 6;            // retained basis functions
    double dx = 0.05;     // spatial step, cm
};

/// Full problem definition. Coefficient functions must be pure.
struct ModelConfig : ModelScalars {
    int example_id = 0;  // 1..3 for the built-in experiments, 0 otherwise
    std::string label = "custom";

    std::function<double(double t, double a)> diffusion;  // D(t, a), cm^2/month
    std::function<double(double a)> mortality;            // mu(a), month^-1
    std::function<double(double a)> survival;             // exp(-int_0^a mu)
    std::function<double(double a, double x)> u0;         // u(0, a, x)
    std::function<double(double t, double x)> u0_bar;     // u(t, 0, x)

    double dt() const { return T / M; }
    double kd_ratio() const { return K_gomp / d_gomp; }
    /// e^{K/d}, the level the Gompertz source drives u towards.
    double carrying_level() const;
};

/// Closed-form survival (a_max - a) / a_max for mu(a) = 1 / (a_max - a).
double survival(double a, double a_max);

/// v = ln(u e^{-K/d}) / Pi(a). Throws std::invalid_argument for u <= 0 or at
/// ages where Pi vanishes.
double forward_transform(double u, double a, const ModelConfig& cfg);

/// u = e^{K/d} e^{Pi(a) v}. Throws BlowUpError when Pi(a) v exceeds 700 or is
/// not finite.
double inverse_transform(double v, double a, const ModelConfig& cfg);

inline constexpr double kMaxExponent = 700.0;
inline constexpr double kSurvivalFloor = 1e-12;

ModelScalars preset_scalars(int example_id);

/// Builds one of the three built-in experiments on the given scalars (the
/// coefficient functions read T and a_max from them).
ModelConfig make_preset(int example_id, const ModelScalars& scalars);
ModelConfig preset(int example_id);

double eval_diffusion(const ModelConfig& cfg, double t, double a);

/// Lattice of the characteristic scheme. Age nodes a_j = j dt stop strictly
/// below a_max; x nodes are symmetric with x_0 = -ell and x_last = ell.
struct GridSpec {
    double dt = 0.0;
    double dx = 0.0;
    std::vector<double> t;
    std::vector<double> a;
    std::vector<double> x;

    int M() const { return static_cast<int>(t.size()) - 1; }
    int J() const { return static_cast<int>(a.size()) - 1; }
    int nx() const { return static_cast<int>(x.size()); }
};

/// Throws ConfigError if the spatial step does not divide 2 ell or the
/// scalars cannot define a lattice.
GridSpec make_grid(const ModelConfig& cfg);

/// Every problem with the configuration, empty when valid: scalar ranges,
/// grid divisibility, compatibility u0(0,x) = u0_bar(0,x), positivity of the
/// initial data on the lattice, nonnegative diffusion.
std::vector<std::string> validate(const ModelConfig& cfg);

/// Throws ConfigError carrying all problems from validate().
void require_valid(const ModelConfig& cfg);

}  // namespace fkg
