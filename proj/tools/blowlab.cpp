#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "blowlab/certifier.hpp"
#include "blowlab/cutoff.hpp"
#include "blowlab/errors.hpp"
#include "blowlab/harness.hpp"
#include "blowlab/odi.hpp"

using namespace blowlab;
using nlohmann::json;

namespace {

int cmd_simulate(const std::string& file) {
    RunConfig cfg = load_config(file);
    cfg.certify = false;
    const SweepRecord rec = run_single(cfg);
    std::cout << to_json(rec).dump(2) << '\n';
    return 0;
}

int cmd_certify(const std::string& file) {
    const RunConfig cfg = load_config(file);
    const CertificateReport rep = certify(cfg.model, cfg.data, cfg.certifier);
    const json j = to_json(rep);
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_sweep(const std::string& file, const std::string& out_override) {
    RunConfig cfg = load_config(file);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (cfg.out_dir.empty()) cfg.out_dir = "out";
    if (cfg.epsilons.empty()) std::cerr << "warning: sweep block lists no epsilon values\n";
    const auto records = sweep(cfg);
    if (records.empty()) return 0;

    std::vector<FitReport> fits;
    const FitModel model = cfg.model.p >= 2.0 ? FitModel::ExpExp : FitModel::PowerLog;
    try {
        fits.push_back(fit_scaling(records, model, cfg.model.p));
    } catch (const Error& e) {
        std::cerr << "warning: " << e.what() << '\n';
    }
    const ReportPaths paths = emit_report(records, fits, cfg.out_dir);
    for (const auto& r : records) {
        std::printf("eps %-12.6g %-12s T_est %-14.6g bound %s%s%s\n", r.epsilon, to_string(r.lifespan.status),
                    r.lifespan.T_est, r.bound ? r.bound->symbolic.c_str() : "-", r.error.empty() ? "" : "  error: ",
                    r.error.c_str());
    }
    for (const auto& f : fits) std::cout << to_json(f).dump() << '\n';
    std::cout << "wrote " << paths.summary.string() << ", " << paths.csv.string() << ", " << paths.plot.string() << '\n';
    for (const auto& f : fits) {
        if (!f.dominance) {
            std::cerr << "measured lifespan exceeds the certified bound\n";
            return exit_code(ErrorKind::Numerical);
        }
    }
    return 0;
}

int cmd_odi(double delta, double c0, double r1, double theta, double kappa, double p) {
    const odi::ODIParams params{delta, c0, r1, theta, kappa, p};
    const odi::ODIBound b = odi::lifespan_bound_numeric(params);
    json j = to_json(b);
    j["rho_at_bound"] = std::isfinite(b.log_T) ? json(odi::rho_of_log_T(params, b.log_T)) : json(nullptr);
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_cutoff(double p, const std::vector<double>& Rs, std::size_t samples, std::uint64_t seed) {
    const CutoffSpec spec(p);
    json rows = json::array();
    std::vector<LemmaConstants> per;
    for (double R : Rs) {
        const double one[] = {R};
        per.push_back(estimate_constants(spec, one, samples, seed));
        const auto& c = per.back();
        rows.push_back({{"R", R}, {"C1", c.C1}, {"C2", c.C2}, {"C3", c.C3}, {"C4", c.C4}, {"C3_consumed", c.C3_consumed}});
    }
    const LemmaConstants all = estimate_constants(spec, Rs, samples, seed);
    auto spread = [&](auto field) {
        double lo = INFINITY, hi = 0.0;
        for (const auto& c : per) {
            lo = std::min(lo, c.*field);
            hi = std::max(hi, c.*field);
        }
        return hi > 0.0 ? (hi - lo) / hi : 0.0;
    };
    const double worst = std::max({spread(&LemmaConstants::C1), spread(&LemmaConstants::C2),
                                   spread(&LemmaConstants::C3), spread(&LemmaConstants::C4)});
    const json j = {
        {"p", p},
        {"samples_per_R", samples},
        {"per_R", rows},
        {"combined",
         {{"C1", all.C1}, {"C2", all.C2}, {"C3", all.C3}, {"C4", all.C4}, {"C3_consumed", all.C3_consumed}}},
        {"max_relative_spread", worst},
        {"stable_5pct", worst <= 0.05},
    };
    std::cout << j.dump(2) << '\n';
    return worst <= 0.05 ? 0 : exit_code(ErrorKind::Numerical);
}

int cmd_report(const std::string& dir, double p) {
    const auto records = load_summary(std::filesystem::path(dir) / "summary.json");
    std::printf("%-12s %-12s %-14s %-14s %s\n", "epsilon", "status", "T_est", "bound_log_T", "case");
    for (const auto& r : records) {
        std::printf("%-12.6g %-12s %-14.6g %-14.6g %s\n", r.epsilon, to_string(r.lifespan.status), r.lifespan.T_est,
                    r.bound ? r.bound->log_T : NAN, r.bound ? odi::to_string(r.bound->case_tag) : "-");
    }
    const FitModel model = p >= 2.0 ? FitModel::ExpExp : FitModel::PowerLog;
    try {
        std::cout << to_json(fit_scaling(records, model, p)).dump(2) << '\n';
    } catch (const Error& e) {
        std::cerr << "no fit: " << e.what() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lifespan simulation and certified upper bounds for small-data blow-up on exterior domains"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;

    auto* sim = app.add_subcommand("simulate", "Evolve one configuration and estimate its lifespan");
    sim->add_option("config", config, "Run configuration file")->required()->check(CLI::ExistingFile);

    auto* cert = app.add_subcommand("certify", "Certified lifespan bound from the configuration's data");
    cert->add_option("config", config, "Run configuration file")->required()->check(CLI::ExistingFile);

    auto* sw = app.add_subcommand("sweep", "Epsilon sweep with scaling fit and report");
    sw->add_option("config", config, "Run configuration file")->required()->check(CLI::ExistingFile);
    sw->add_option("-o,--out", out_dir, "Output directory (overrides [output] dir)");

    double delta = 0.0, c0 = 1.0, r1 = std::exp(1.0), theta = 0.0, kappa = 0.0, p = 2.0;
    auto* ob = app.add_subcommand("odi-bound", "Invert the differential-inequality criterion for T");
    ob->add_option("--delta", delta)->required();
    ob->add_option("--c0", c0)->required();
    ob->add_option("--r1", r1)->capture_default_str();
    ob->add_option("--theta", theta)->required();
    ob->add_option("--kappa", kappa)->required();
    ob->add_option("--p", p)->required();

    double cp = 2.0;
    std::vector<double> r_list{10.0, 100.0, 1000.0};
    std::size_t samples = 100000;
    std::uint64_t seed = 0x5eed;
    auto* cv = app.add_subcommand("cutoff-verify", "Estimate the cutoff derivative constants and their R-stability");
    cv->add_option("--p", cp)->required();
    cv->add_option("--r-list", r_list)->delimiter(',')->capture_default_str();
    cv->add_option("--samples", samples)->capture_default_str();
    cv->add_option("--seed", seed)->capture_default_str();

    std::string report_dir;
    double report_p = 1.5;
    auto* rp = app.add_subcommand("report", "Summarise a sweep directory");
    rp->add_option("dir", report_dir)->required()->check(CLI::ExistingDirectory);
    rp->add_option("--p", report_p, "Exponent used for the theoretical slope")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(ErrorKind::Config);
    }

    try {
        if (*sim) return cmd_simulate(config);
        if (*cert) return cmd_certify(config);
        if (*sw) return cmd_sweep(config, out_dir);
        if (*ob) return cmd_odi(delta, c0, r1, theta, kappa, p);
        if (*cv) return cmd_cutoff(cp, r_list, samples, seed);
        if (*rp) return cmd_report(report_dir, report_p);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(ErrorKind::Numerical);
    }
    return 0;
}
