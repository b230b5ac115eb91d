#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "blowlab/model.hpp"

namespace blowlab {

/// Uniform grid r_i = 1 + i h, i = 0..n-1, on the truncated domain [1, r_max].
struct RadialGrid {
    double r_max = 10.0;
    std::size_t n = 512;

    static RadialGrid with_spacing(double r_max, double h);

    double h() const { return (r_max - 1.0) / static_cast<double>(n - 1); }
    double r(std::size_t i) const { return 1.0 + static_cast<double>(i) * h(); }
    void validate() const;
};

struct SolverOptions {
    double dt_max = 1e-2;
    /// dt cap grows as max(dt_max, dt_max_rel * t); 0 disables growth.
    double dt_max_rel = 0.0;
    /// Reaction time-scale fraction: dt <= safety * m^{1-p} / (|lambda| (p-1)).
    double safety = 0.05;
    double t_end = 1e4;
    std::size_t max_steps = 20'000'000;
    double blowup_threshold = 1e8;
    double dt_contraction = 1e6;
    /// Hard stop on the max norm regardless of dt.
    double abort_norm = 1e150;
    /// Relative to max|u(0)|, checked on the outer leak_fraction of the grid.
    double leak_tol = 1e-6;
    double leak_fraction = 0.05;
    bool diffusion = true;
    /// Admit zeta = +-pi/2 with tau = 0 (norm-conserving linear step).
    bool dispersive = false;
    double cfl = 0.9;
    bool keep_snapshots = true;
    std::size_t max_snapshots = 2000;
    /// A snapshot is taken when the max norm grows by this factor.
    double snapshot_growth = 1.05;
};

struct Snapshot {
    double t = 0.0;
    std::vector<cplx> u;
};

struct SeriesPoint {
    double t = 0.0;
    double dt = 0.0;
    double maxnorm = 0.0;
};

enum class StopReason { Threshold, AbortNorm, TimeLimit, StepLimit, NonFinite };

const char* to_string(StopReason r);

struct Trajectory {
    RadialGrid grid;
    int dim = 2;
    int tau = 0;
    std::vector<Snapshot> snapshots;
    std::vector<SeriesPoint> series;
    double boundary_leak = 0.0;
    double initial_max = 0.0;
    double dt_initial = 0.0;
    double dt_min = 0.0;
    double t_final = 0.0;
    std::size_t steps = 0;
    StopReason stop = StopReason::TimeLimit;
    std::string kernel_variant;
};

enum class LifespanStatus { BlowUp, SurvivedTo, Inconclusive };

const char* to_string(LifespanStatus s);

struct LifespanEstimate {
    LifespanStatus status = LifespanStatus::Inconclusive;
    double T_est = 0.0;
    double T_lo = 0.0;
    double T_hi = 0.0;
    double t_end = 0.0;
    double threshold_hit = 0.0;
    std::string reason;

    bool operator==(const LifespanEstimate&) const = default;
};

/// Advances the radial problem tau u_tt - Lap u + e^{i zeta} u_t = lambda |u|^p
/// from u(0) = eps f, u_t(0) = eps g with u = 0 at r = 1 and r = r_max.
///
/// tau = 0: reaction by classical RK4 on u' = e^{-i zeta} lambda |u|^p, then
/// implicit diffusion (backward Euler, or Crank-Nicolson in the dispersive
/// mode) via a complex tridiagonal solve.
/// tau = 1: kick-drift-kick leapfrog in (u, v = u_t), damping trapezoidal
/// within each half kick, dt <= cfl * h.
///
/// Throws Error(DomainTooSmall) when the outer band picks up more than
/// leak_tol * max|u(0)|.
Trajectory evolve(const ModelParams& params, const InitialData& data, const RadialGrid& grid,
                  const SolverOptions& opts);

/// Blow-up declared when max|u| reached the threshold and dt contracted by
/// at least dt_contraction. A run that stopped because dt fell below the time
/// resolution of t (after contracting) counts as reaching the threshold. T_est extrapolates m^{-gamma} linearly over the
/// last k samples (gamma = p-1 for tau = 0, (p-1)/2 for tau = 1).
LifespanEstimate detect_blowup(const Trajectory& traj, const ModelParams& params, double threshold = 1e8,
                               double dt_contraction = 1e6, std::size_t k = 8);

/// Exact blow-up time eps^{1-p} / (lambda (p-1)) of u' = lambda u^p, u(0) = eps.
double ode_oracle(const ModelParams& params);

/// Complex tridiagonal solve (Thomas algorithm) in place:
/// lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
void solve_tridiagonal(std::span<const cplx> lower, std::span<const cplx> diag, std::span<const cplx> upper,
                       std::span<cplx> rhs, std::span<cplx> scratch);

}  // namespace blowlab
