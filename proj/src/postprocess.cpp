#include "fkg/postprocess.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "fkg/stepper.hpp"

namespace fkg {

namespace {

std::vector<double> trapezoid_weights(std::span<const double> s) {
    std::vector<double> w(s.size(), 0.0);
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double h = 0.5 * (s[k + 1] - s[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    return w;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

double trapezoid_2d(const Eigen::MatrixXd& u, std::span<const double> a, std::span<const double> x) {
    if (static_cast<std::size_t>(u.rows()) != a.size() || static_cast<std::size_t>(u.cols()) != x.size())
        throw std::invalid_argument("trapezoid_2d: shape does not match the grid");
    const auto wa = trapezoid_weights(a);
    const auto wx = trapezoid_weights(x);
    const Eigen::Map<const Eigen::VectorXd> Wa(wa.data(), static_cast<Eigen::Index>(wa.size()));
    const Eigen::Map<const Eigen::VectorXd> Wx(wx.data(), static_cast<Eigen::Index>(wx.size()));
    return Wa.dot(u * Wx);
}

ObservableSeries total_population(const DensityField& field, const GridSpec&) {
    ObservableSeries s;
    for (const auto& slice : field.slices) {
        s.t.push_back(slice.t);
        s.p.push_back(trapezoid_2d(slice.u, field.a, field.x));
    }
    return s;
}

ObservableSeries population_series(const CoefficientField& coeffs, const BasisSet& basis, const ModelConfig& cfg,
                                   const GridSpec& grid) {
    const LineProjector proj(basis, grid.x);
    ObservableSeries s;
    for (int i = 0; i <= coeffs.M(); ++i) {
        const auto slice = reconstruct_slice(coeffs, i, proj, cfg, grid);
        s.t.push_back(slice.t);
        s.p.push_back(trapezoid_2d(slice.u, grid.a, grid.x));
    }
    return s;
}

double e_max(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& truncated) {
    if (reference.rows() != truncated.rows() || reference.cols() != truncated.cols())
        throw std::invalid_argument("e_max: fields have different shapes");
    const double ref = reference.cwiseAbs().maxCoeff();
    if (!(ref > 0.0)) throw std::invalid_argument("e_max: reference field is identically zero");
    return 100.0 * (reference - truncated).cwiseAbs().maxCoeff() / ref;
}

std::vector<double> emax_ages(EmaxGrid grid, double a_max) {
    std::vector<double> a;
    if (grid == EmaxGrid::Paper41) {
        for (int j = 0; j <= 40; ++j) a.push_back(j * a_max / 41.0);
    } else {
        for (int j = 0; 0.05 * j < a_max - 1e-12; ++j) a.push_back(0.05 * j);
    }
    return a;
}

EmaxGrid parse_emax_grid(const std::string& name) {
    if (name == "paper41") return EmaxGrid::Paper41;
    if (name == "dt") return EmaxGrid::Dt;
    throw std::invalid_argument("unknown E_max grid '" + name + "' (expected paper41 or dt)");
}

std::string to_string(EmaxGrid grid) { return grid == EmaxGrid::Paper41 ? "paper41" : "dt"; }

std::vector<TruncationRow> truncation_study(const ModelConfig& cfg, std::span<const int> N_list, EmaxGrid grid) {
    const GridSpec g = make_grid(cfg);
    const auto ages = emax_ages(grid, cfg.a_max);

    Eigen::MatrixXd v_true(static_cast<Eigen::Index>(ages.size()), static_cast<Eigen::Index>(g.x.size()));
    for (std::size_t j = 0; j < ages.size(); ++j)
        for (std::size_t l = 0; l < g.x.size(); ++l)
            v_true(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) =
                forward_transform(cfg.u0(ages[j], g.x[l]), ages[j], cfg);

    std::vector<TruncationRow> rows;
    for (int N : N_list) {
        const BasisSet basis = build_basis(N, cfg.ell);
        const LineProjector proj(basis, g.x);
        Eigen::MatrixXd v_N(v_true.rows(), v_true.cols());
        for (Eigen::Index j = 0; j < v_true.rows(); ++j) {
            const Eigen::VectorXd row = v_true.row(j).transpose();
            v_N.row(j) = proj.project(std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))).transpose() *
                         proj.samples();
        }
        rows.push_back({cfg.example_id, N, e_max(v_true, v_N)});
    }
    return rows;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string density_filename(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "density_t%.6f.csv", t);
    return buf;
}

void write_density_slice(const DensitySlice& slice, std::span<const double> a, std::span<const double> x,
                         const std::filesystem::path& dir) {
    const auto path = dir / density_filename(slice.t);
    auto out = open_for_write(path);
    out << "a,x,u\n";
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t l = 0; l < x.size(); ++l)
            out << format_real(a[j]) << ',' << format_real(x[l]) << ','
                << format_real(slice.u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l))) << '\n';
    check_written(out, path);
}

void write_population(const ObservableSeries& series, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "t,p\n";
    for (std::size_t k = 0; k < series.t.size(); ++k) out << format_real(series.t[k]) << ',' << format_real(series.p[k]) << '\n';
    check_written(out, path);
}

void write_truncation_study(std::span<const TruncationRow> rows, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "example,N,E_max_percent\n";
    for (const auto& r : rows) out << r.example << ',' << r.N << ',' << format_real(r.E_max_percent) << '\n';
    check_written(out, path);
}

void write_summary(std::span<const SummaryRow> rows, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "example,M,N,dt,C,S_inv_frob,P_sum,dt_admissible,max_norm_observed,bound_2C,amplification,blowup_node\n";
    for (const auto& r : rows) {
        const auto& s = r.stability;
        out << r.example << ',' << r.M << ',' << r.N << ',' << format_real(r.dt) << ',' << format_real(s.C) << ','
            << format_real(s.S_inv_frob) << ',' << format_real(s.P_sum) << ',' << (s.dt_admissible ? "true" : "false")
            << ',' << format_real(s.max_norm_observed) << ',' << format_real(s.bound_2C) << ','
            << format_real(s.amplification) << ',';
        if (r.blowup) out << r.blowup->i << ':' << r.blowup->j;
        out << '\n';
    }
    check_written(out, path);
}

}  // namespace fkg
