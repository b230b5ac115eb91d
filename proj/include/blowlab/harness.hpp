#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "blowlab/certifier.hpp"
#include "blowlab/model.hpp"
#include "blowlab/odi.hpp"
#include "blowlab/solver.hpp"

namespace blowlab {

/// One experiment, read from an INI-style file with sections
/// [model] [data] [grid] [solver] [certifier] [sweep] [output].
struct RunConfig {
    ModelParams model;
    InitialData data;
    RadialGrid grid;
    SolverOptions solver;
    CertifierOptions certifier;
    bool certify = true;
    /// Evaluate the inequality chain on blow-up runs (needs snapshots).
    bool chain = false;
    std::size_t chain_points = 10;
    /// On DomainTooSmall the radial domain grows by this factor (h fixed).
    double r_max_growth = 1.5;
    std::size_t max_enlargements = 16;
    std::vector<double> epsilons;
    std::size_t threads = 0;  ///< 0: hardware concurrency
    std::filesystem::path out_dir;
    bool write_series = true;

    /// Throws Error(Config) naming the offending entry.
    void validate() const;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& file);

struct RunMeta {
    double r_max = 0.0;
    std::size_t n = 0;
    double h = 0.0;
    double dt_initial = 0.0;
    double dt_min = 0.0;
    std::size_t steps = 0;
    double t_final = 0.0;
    double boundary_leak = 0.0;
    std::string stop;
    std::string kernel;
    std::size_t enlargements = 0;
    std::optional<bool> chain_passed;
    std::optional<double> weak_residual;

    bool operator==(const RunMeta&) const = default;
};

struct SweepRecord {
    double epsilon = 0.0;
    LifespanEstimate lifespan;
    std::optional<odi::ODIBound> bound;
    std::optional<double> delta;
    RunMeta meta;
    /// Empty on success; the failure message otherwise.
    std::string error;

    bool operator==(const SweepRecord&) const = default;
};

nlohmann::json to_json(const SweepRecord& rec);
SweepRecord record_from_json(const nlohmann::json& j);

/// model -> solver -> certifier at cfg.model.epsilon. Writes the series CSV
/// and certificate JSON into cfg.out_dir when it is set.
SweepRecord run_single(const RunConfig& cfg);

/// run_single for every epsilon of the sweep block on a worker pool. A
/// failed epsilon is recorded with its error and does not stop the others.
/// Records are returned sorted by epsilon, descending.
std::vector<SweepRecord> sweep(const RunConfig& cfg);

enum class FitModel { PowerLog, ExpExp };

const char* to_string(FitModel m);

struct FitReport {
    FitModel model = FitModel::PowerLog;
    std::size_t n = 0;
    double slope = 0.0;
    double intercept = 0.0;
    /// Coefficient of log log(1/eps) when that regressor was requested.
    std::optional<double> log_log_coef;
    double r2 = 0.0;
    /// (p-1)/(2-p) for PowerLog when p < 2.
    std::optional<double> theory_slope;
    /// Measured T <= certified bound on every blow-up record with a bound.
    bool dominance = true;
    std::vector<double> dominance_violations;
    /// Measured T nonincreasing in epsilon.
    bool monotone = true;
};

/// Needs at least 4 BlowUp records; throws Error(Input) otherwise.
FitReport fit_scaling(const std::vector<SweepRecord>& records, FitModel model, double p = 0.0,
                      bool log_log_regressor = false);

nlohmann::json to_json(const FitReport& fit);

struct ReportPaths {
    std::filesystem::path summary;
    std::filesystem::path csv;
    std::filesystem::path plot;
};

/// summary.json, sweep.csv and a gnuplot script plot.gp (T against eps on
/// log axes with the certified bound overlaid).
ReportPaths emit_report(const std::vector<SweepRecord>& records, const std::vector<FitReport>& fits,
                        const std::filesystem::path& out_dir);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records);
void write_series_csv(std::ostream& os, const Trajectory& traj);

/// Records stored in a summary.json written by emit_report.
std::vector<SweepRecord> load_summary(const std::filesystem::path& file);

}  // namespace blowlab
