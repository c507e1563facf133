#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fkg/basis.hpp"
#include "fkg/field.hpp"
#include "fkg/model.hpp"
#include "fkg/stability.hpp"

namespace fkg {

/// Total population p(t) at a set of time nodes.
struct ObservableSeries {
    std::vector<double> t;
    std::vector<double> p;
};

/// Composite trapezoid over a then x; u has rows a and columns x.
double trapezoid_2d(const Eigen::MatrixXd& u, std::span<const double> a, std::span<const double> x);

ObservableSeries total_population(const DensityField& field, const GridSpec& grid);

/// p(t_i) for every i = 0..M, reconstructing one slice at a time.
ObservableSeries population_series(const CoefficientField& coeffs, const BasisSet& basis, const ModelConfig& cfg,
                                   const GridSpec& grid);

/// 100 max|ref - trunc| / max|ref|. Throws std::invalid_argument on a shape
/// mismatch or an identically zero reference.
double e_max(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& truncated);

enum class EmaxGrid {
    Paper41,  // a_j = j a_max / 41, j = 0..40
    Dt,       // a_j = 0.05 j, a_j < a_max
};

std::vector<double> emax_ages(EmaxGrid grid, double a_max);
EmaxGrid parse_emax_grid(const std::string& name);
std::string to_string(EmaxGrid grid);

struct TruncationRow {
    int example = 0;
    int N = 0;
    double E_max_percent = 0.0;
};

/// Relative max error between v0 = (ln u0 - K/d) / Pi on the (a, x) grid and
/// its projection onto the first N basis functions.
std::vector<TruncationRow> truncation_study(const ModelConfig& cfg, std::span<const int> N_list,
                                            EmaxGrid grid = EmaxGrid::Paper41);

struct SummaryRow {
    int example = 0;
    int M = 0;
    int N = 0;
    double dt = 0.0;
    StabilityReport stability;
    std::optional<NodeIndex> blowup;
};

/// "%.17g"
std::string format_real(double v);
/// density_t<t with 6 decimals>.csv
std::string density_filename(double t);

void write_density_slice(const DensitySlice& slice, std::span<const double> a, std::span<const double> x,
                         const std::filesystem::path& dir);
void write_population(const ObservableSeries& series, const std::filesystem::path& path);
void write_truncation_study(std::span<const TruncationRow> rows, const std::filesystem::path& path);
void write_summary(std::span<const SummaryRow> rows, const std::filesystem::path& path);

}  // namespace fkg
