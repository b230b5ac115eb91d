#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "blowlab/model.hpp"

namespace blowlab {

/// Cutoff family psi_R = eta(s_R)^{2p'} and psi*_R = eta*(s_R)^{2p'} with
/// s_R(r, t) = ((r - 1)^2 + t) / R.
///
/// eta is 1 on [0, 1/2], 0 on [1, inf), and 1 - q(2s - 1) in between with
/// the quintic smoothstep q(x) = x^3 (10 - 15x + 6x^2), which makes eta
/// globally C^2. eta* agrees with eta on [1/2, inf) and vanishes on [0, 1/2).
class CutoffSpec {
public:
    explicit CutoffSpec(double p, int dim = 2);

    double p() const { return p_; }
    double p_conj() const { return p_ / (p_ - 1.0); }
    /// Exponent 2p'.
    double power() const { return power_; }
    int dim() const { return dim_; }

    static double eta(double s);
    static double eta_d1(double s);
    static double eta_d2(double s);
    static double eta_star(double s);

    /// eta(s)^{2p'} and its first two s-derivatives.
    double psi_s(double s) const;
    double psi_s_d1(double s) const;
    double psi_s_d2(double s) const;
    double psi_star_s(double s) const;

private:
    double p_;
    double power_;
    int dim_;
};

/// Region P(R) in radial coordinates: r in [1, 1 + sqrt R],
/// t in [0, R - (r - 1)^2].
struct ParabolicRegion {
    double R;

    bool contains(double r, double t) const { return r >= 1.0 && t >= 0.0 && (r - 1.0) * (r - 1.0) + t <= R; }
    double r_max() const;
    double t_max(double r) const { return R - (r - 1.0) * (r - 1.0); }
};

inline double s_of(double R, double r, double t) { return ((r - 1.0) * (r - 1.0) + t) / R; }

enum class PsiQuantity { Psi, PsiStar, Dt, Dtt, Dr, Lap };

struct PsiJet {
    double psi = 0.0;
    double psi_star = 0.0;
    double dt = 0.0;
    double dtt = 0.0;
    double dr = 0.0;
    double lap = 0.0;
};

/// All cutoff quantities at (r, t) for scale R. Lap is the radial
/// Laplacian d_rr + (dim - 1)/r d_r. Throws Error(Domain) for r < 1 or t < 0.
PsiJet psi_jet(const CutoffSpec& spec, double R, double r, double t);

double psi_eval(const CutoffSpec& spec, double R, double r, double t, PsiQuantity what);

/// Empirical constants of the derivative bounds, safety factor included:
///   |d_t psi_R|     <= C1 R^-1 (psi*_R)^{1/p}
///   |d_t^2 psi_R|   <= C2 R^-2 (psi*_R)^{1/p}
///   |d_r psi_R|     <= C3 R^-1 r log r (psi*_R)^{1/p}
///   |Lap psi_R|     <= C4 R^-1 (psi*_R)^{1/p}
///   |grad Phi . grad psi_R| <= C3_consumed R^-1 Phi (psi*_R)^{1/p}
struct LemmaConstants {
    double C1 = 0.0;
    double C2 = 0.0;
    double C3 = 0.0;
    double C4 = 0.0;
    double C3_consumed = 0.0;
    double safety = 1.1;
    std::size_t samples = 0;
};

/// The five bound ratios at one point; 0/0 is taken as 0.
struct BoundRatios {
    double dt = 0.0;
    double dtt = 0.0;
    double dr = 0.0;
    double lap = 0.0;
    double consumed = 0.0;
};

BoundRatios bound_ratios(const CutoffSpec& spec, double R, double r, double t,
                         const WeightMode& weight = WeightMode::log2d());

/// Points closer to the boundary than this are excluded from sampling.
inline constexpr double kBoundaryBand = 1e-8;

/// Suprema of the bound ratios over seeded random samples of P(R) for each
/// R in R_list (samples_per_region >= 1000), times `safety`. Samples
/// concentrate towards r = 1, where the r-ratios peak.
LemmaConstants estimate_constants(const CutoffSpec& spec, std::span<const double> R_list,
                                  std::size_t samples_per_region, std::uint64_t seed = 0x5eed,
                                  const WeightMode& weight = WeightMode::log2d(), double safety = 1.1);

/// int_{max(s, 1/2)}^1 eta(sigma)^{2p'} sigma^-1 d sigma; never exceeds log 2.
double layer_integral(const CutoffSpec& spec, double s);

}  // namespace blowlab
