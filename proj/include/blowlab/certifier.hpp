#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "blowlab/cutoff.hpp"
#include "blowlab/model.hpp"
#include "blowlab/odi.hpp"
#include "blowlab/solver.hpp"

namespace blowlab {

struct CertifierOptions {
    /// Lower end of the certified R range; raised to 2 (r_hi - 1)^2 when the
    /// data would otherwise stick out of P(R0 / 2).
    double R0 = 2.718281828459045;
    double margin = 0.1;
    double angle_tol = 1e-9;
    std::vector<double> constant_R_list{10.0, 100.0, 1000.0};
    std::size_t samples = 100000;
    std::uint64_t seed = 0x5eed;
    double constant_safety = 1.1;
    double c6_safety = 1.1;
    double sup_R_max = 1e12;
    std::size_t sup_points = 2000;
    double closed_form_delta0 = 0.1;
    /// Chain rows may undershoot by this fraction of rhs (discretisation).
    double chain_tol = 0.05;
};

/// Lifespan exponents side by side: the epsilon exponent is common; the
/// log exponent produced by the differential-inequality inversion
/// (kappa / theta) and the one in the stated theorem (p - 1) differ for p < 2.
struct ExponentDisplay {
    double eps_exponent = 0.0;
    double inversion_log_exponent = 0.0;
    double theorem_log_exponent = 0.0;
    std::string inversion_shape;
    std::string theorem_shape;
};

struct CertificateReport {
    ModelParams params;
    AngleCertificate angle;
    LemmaConstants constants;
    double R0 = 0.0;
    double C5 = 0.0;
    double C6 = 0.0;
    double sup_ratio = 0.0;
    double theta = 0.0;
    double kappa = 0.0;
    double delta = 0.0;
    odi::ODIParams odi;
    odi::ODIBound bound;
    std::optional<odi::ClosedForm> closed_form;
    std::optional<odi::ODIBound> closed_form_bound;
    /// Constant C in exp(exp(C / eps)) (DoubleExp) or exp(C eps^-a) (SingleExp).
    std::optional<double> eps_constant;
    ExponentDisplay display;
};

/// Harmonic weight Phi of the chosen mode and its use in the test function
/// Phi psi_R: value, radial derivative and radial Laplacian of Phi.
struct WeightPhi {
    WeightMode mode;

    double value(double r) const { return mode.phi(r); }
    double dr(double r) const { return mode.phi_prime(r); }
    double laplacian(double r) const { return mode.phi_second(r) + (mode.dim - 1.0) * mode.phi_prime(r) / r; }
};

/// Certified upper bound for the lifespan from (params, data) alone.
CertificateReport certify(const ModelParams& params, const InitialData& data, const CertifierOptions& opts = {});

struct Functionals {
    double A = 0.0;       ///< iint_{P(R)} |u|^p Phi psi_R
    double A_star = 0.0;  ///< iint_{P(R)} |u|^p Phi psi*_R
};

/// Throws Error(InsufficientHorizon) if the trajectory stops before R
/// without having blown up.
Functionals weighted_functionals(const Trajectory& traj, const ModelParams& params, double R);

/// Weak-form pairing with the test function Phi psi_R:
///   data   = int (tau g psi(0) + f (-tau psi_t(0) + e^{i zeta} psi(0))) Phi dx   (unscaled data)
///   source = lambda iint |u|^p Phi psi_R
///   bulk   = iint u (-Lap(Phi psi_R) + tau d_t^2(Phi psi_R) - e^{i zeta} d_t(Phi psi_R))
/// A solution satisfies eps * data + source = bulk.
struct WeakForm {
    cplx data{};
    cplx source{};
    cplx bulk{};
    double relative_residual = 0.0;
};

WeakForm weak_form(const Trajectory& traj, const ModelParams& params, const InitialData& data, double R);

struct ChainRow {
    double R = 0.0;
    double A = 0.0;
    double A_star = 0.0;
    double lhs = 0.0;   ///< c0 eps + cos(xi0) A
    double mid = 0.0;   ///< Re[lambda^-1 e^{i xi0} bulk]
    double rhs = 0.0;   ///< C5 / (|lambda| R) phi_mass^{1/p'} A*^{1/p}
    double slack = 0.0; ///< rhs - lhs
    double weak_residual = 0.0;
    bool ok = false;
};

struct ChainReport {
    std::vector<ChainRow> rows;
    bool passed = false;
    /// Criterion check with (delta, C6, theta, kappa) on the same functionals.
    odi::CriterionReport criterion;
};

ChainReport inequality_chain(const Trajectory& traj, const ModelParams& params, const InitialData& data,
                             std::span<const double> R_list, const CertificateReport& cert,
                             double chain_tol = 0.05);

nlohmann::json to_json(const CertificateReport& rep);
nlohmann::json to_json(const odi::ODIBound& b);
void write_chain_csv(std::ostream& os, const ChainReport& chain);

}  // namespace blowlab
