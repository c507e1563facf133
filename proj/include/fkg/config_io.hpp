#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fkg/model.hpp"

namespace fkg {

/// Piecewise-linear table y(s), constant outside its range.
class Table1D {
public:
    Table1D(std::vector<double> s, std::vector<double> y);

    double operator()(double s) const;
    /// Exact integral of the interpolant over [0, s].
    double integral_from_zero(double s) const;

private:
    std::vector<double> s_, y_;
};

/// Bilinear table z(s, r) on a rectilinear grid, clamped outside its range.
class Table2D {
public:
    Table2D(std::vector<double> s, std::vector<double> r, std::vector<double> z);

    double operator()(double s, double r) const;

    const std::vector<double>& s_nodes() const noexcept { return s_; }
    const std::vector<double>& r_nodes() const noexcept { return r_; }
    double at(std::size_t is, std::size_t ir) const { return z_[is * r_.size() + ir]; }

private:
    std::vector<double> s_, r_, z_;
};

/// Long-format CSV with header "<s>,<r>,<value>"; rows must cover the full
/// tensor grid exactly once, in any order.
Table2D read_table2d(const std::filesystem::path& path, const std::string& s_name, const std::string& r_name,
                     const std::string& value_name);
/// CSV with header "<s>,<value>".
Table1D read_table1d(const std::filesystem::path& path, const std::string& s_name, const std::string& value_name);

/// Where a configuration comes from before its coefficient functions are
/// bound: either a built-in experiment or tabulated inputs.
struct ConfigSource {
    std::optional<int> example;
    ModelScalars scalars;
    std::optional<std::filesystem::path> u0_table;      // a,x,u
    std::optional<std::filesystem::path> u0_bar_table;  // t,x,u
    std::optional<std::filesystem::path> D_table;       // t,a,D
    std::optional<std::filesystem::path> mu_table;      // a,mu
    std::vector<std::string> missing;                   // scalar keys absent from a custom config
};

ConfigSource preset_source(int example_id);

/// JSON file with keys example, rho, K_gomp, d_gomp, ell, a_max, T, M, N, dx,
/// u0, u0_bar, D, mu. Table paths are relative to the file's directory.
ConfigSource read_config_file(const std::filesystem::path& path);

/// Sets one scalar key from its textual value. Throws ConfigError for unknown
/// keys or unparsable values.
void apply_override(ConfigSource& source, const std::string& key, const std::string& value);

/// Binds coefficient functions. Throws ConfigError listing every problem found
/// in the tables (missing files, non-positive densities with their location,
/// x-range not covering [-ell, ell]).
ModelConfig build_config(const ConfigSource& source);

}  // namespace fkg
