#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fkg/basis.hpp"
#include "fkg/field.hpp"
#include "fkg/galerkin.hpp"
#include "fkg/model.hpp"
#include "fkg/stability.hpp"

namespace fkg {

enum class ProjectionRule {
    Trapezoid,      // <v, Psi_n> by the composite trapezoid rule
    GramCorrected,  // the same, followed by a solve against the trapezoid Gram matrix
};

/// Projects sampled functions on a fixed uniform x-grid onto the basis.
/// Samples Psi_n once; project() is then a small matrix-vector product.
class LineProjector {
public:
    LineProjector(const BasisSet& basis, std::span<const double> xs, ProjectionRule rule = ProjectionRule::GramCorrected);

    Eigen::VectorXd project(std::span<const double> values) const;

    /// N x nx samples of Psi_n.
    const Eigen::MatrixXd& samples() const noexcept { return psi_; }
    int size() const noexcept { return static_cast<int>(psi_.rows()); }
    std::size_t points() const noexcept { return static_cast<std::size_t>(psi_.cols()); }

private:
    ProjectionRule rule_;
    Eigen::MatrixXd psi_;
    Eigen::VectorXd weights_;
    Eigen::LLT<Eigen::MatrixXd> gram_;
};

/// values sampled on the symmetric grid x_l = -ell + l dx. Throws
/// std::invalid_argument if the sample count does not match 2 ell / dx + 1.
Eigen::VectorXd project_line(std::span<const double> values, const BasisSet& basis, double dx,
                             ProjectionRule rule = ProjectionRule::GramCorrected);

/// One explicit step along the characteristic:
///   S V = S V_prev + dt (K V_prev + [V_prev^T G_m V_prev]_m)
/// solved by back substitution. Throws BlowUpError on a non-finite result.
Eigen::VectorXd step(const Eigen::VectorXd& V_prev, const StepOperators& ops, const GalerkinSystem& sys, double dt);

/// Fills the i=0 row from u0 and the j=0 column from u0_bar.
void fill_boundary(CoefficientField& field, const ModelConfig& cfg, const GridSpec& grid, const LineProjector& proj);

/// Operators at lattice node (i, j).
void node_operators(StepOperators& out, const ModelConfig& cfg, const GalerkinSystem& sys, double t, double a);

/// Sum of p_bound over every lattice node.
double lattice_p_sum(const ModelConfig& cfg, const GalerkinSystem& sys, const GridSpec& grid);

struct SolveResult {
    GridSpec grid;
    CoefficientField field;
    std::optional<NodeIndex> blowup;  // first node (in time-major order) that went non-finite
    double blowup_norm = 0.0;         // |V|_2 at its ancestor
    StabilityReport stability;
};

/// Runs the full scheme. A blow-up does not stop the run: the node and its
/// descendants along the same diagonal are left NaN.
SolveResult solve(const ModelConfig& cfg, const BasisSet& basis, const GalerkinSystem& sys);

/// Boundary data, C, P_sum and the dt verdict without stepping.
/// max_norm_observed is NaN in the result.
StabilityReport stability_precheck(const ModelConfig& cfg, const BasisSet& basis, const GalerkinSystem& sys);

DensitySlice reconstruct_slice(const CoefficientField& field, int i, const LineProjector& proj, const ModelConfig& cfg,
                               const GridSpec& grid, std::optional<NodeIndex>* overflow = nullptr);

/// Throws std::out_of_range for time indices outside 0..M.
DensityField reconstruct(const CoefficientField& field, const BasisSet& basis, const ModelConfig& cfg,
                         const GridSpec& grid, std::span<const int> time_indices);

}  // namespace fkg
