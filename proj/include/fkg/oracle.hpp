#pragma once

#include <span>

#include "fkg/field.hpp"
#include "fkg/model.hpp"

namespace fkg {

/// Source term used by the reference solver.
enum class SourceModel {
    Original,         // -rho u ln(u e^{-K/d}) - mu u
    GalerkinReduced,  // -rho e^{-K/d} u ln(u e^{-K/d}), no mortality loss
};

struct OracleConfig {
    ModelConfig model;
    int time_refine = 1;   // oracle dt = model dt / time_refine
    int space_refine = 1;  // oracle dx = model dx / space_refine
    double t_end = 0.0;    // 0 means model.T
    SourceModel source = SourceModel::Original;
};

/// Direct finite differences for u: upwind along t = a, centred second
/// difference in x with zero-flux ghost points, explicit source. Output is
/// sampled on the main solver's lattice at the requested time indices, all of
/// which must satisfy t_i <= t_end. Throws std::invalid_argument if the
/// diffusion CFL number D dt / dx^2 exceeds 1/2 anywhere, naming the
/// time refinement that would fix it.
DensityField solve_reference(const OracleConfig& cfg, std::span<const int> time_indices);

}  // namespace fkg
