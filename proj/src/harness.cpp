#include "blowlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "blowlab/errors.hpp"

namespace blowlab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

Error config_error(const std::string& key, const std::string& msg) {
    return Error(ErrorKind::Config, "config key '" + key + "': " + msg);
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Plain number, or a multiple of pi such as "pi/2", "-pi", "0.25pi".
double parse_double(const std::string& key, const std::string& raw) {
    std::string s = trim(raw);
    double sign = 1.0;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        if (s.find("pi") != std::string::npos) {
            sign = s[0] == '-' ? -1.0 : 1.0;
            s = s.substr(1);
        }
    }
    if (const auto pos = s.find("pi"); pos != std::string::npos) {
        double coef = 1.0;
        if (pos > 0) coef = parse_double(key, s.substr(0, pos));
        double den = 1.0;
        const std::string rest = trim(s.substr(pos + 2));
        if (!rest.empty()) {
            if (rest[0] != '/') throw config_error(key, "cannot parse '" + raw + "'");
            den = parse_double(key, rest.substr(1));
        }
        return sign * coef * std::numbers::pi / den;
    }
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (s.empty()) throw config_error(key, "empty value");
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw config_error(key, "not a number: '" + raw + "'");
    return v;
}

std::size_t parse_size(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw config_error(key, "not a nonnegative integer: '" + raw + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    std::uint64_t v = 0;
    int base = 10;
    const char* first = s.data();
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        base = 16;
        first += 2;
    }
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v, base);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw config_error(key, "not an integer: '" + raw + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw config_error(key, "not a boolean: '" + raw + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double(key, item));
    }
    return out;
}

struct ProfileSpec {
    std::string name = "zero";
    double lo = 1.0;
    double hi = 1.0;
    double ramp = 0.0;
    double center = 0.0;
    double sigma = 1.0;
    double amp_re = 1.0;
    double amp_im = 0.0;
    std::vector<double> table_r;
    std::vector<double> table_v;

    RadialProfile build(const std::string& key) const {
        const cplx amp{amp_re, amp_im};
        if (name == "zero") return RadialProfile::zero();
        if (name == "bump") return RadialProfile::bump(lo, hi, amp);
        if (name == "annulus") return RadialProfile::annulus(lo, hi, ramp, amp);
        if (name == "gaussian_ring") return RadialProfile::gaussian_ring(lo, hi, center, sigma, amp);
        if (name == "indicator") return RadialProfile::indicator(lo, hi, amp);
        if (name == "constant") return RadialProfile::constant(amp);
        if (name == "table") {
            if (table_r.size() != table_v.size()) throw config_error(key + "_table_v", "length differs from table_r");
            std::vector<cplx> v(table_v.begin(), table_v.end());
            for (auto& x : v) x *= amp;
            return RadialProfile::table(table_r, std::move(v));
        }
        throw config_error(key, "unknown profile '" + name + "'");
    }
};

using Setter = std::function<void(const std::string& key, const std::string& value)>;

void add_profile_keys(std::map<std::string, Setter>& m, const std::string& pfx, ProfileSpec& ps) {
    m[pfx] = [&ps](const std::string&, const std::string& v) { ps.name = trim(v); };
    m[pfx + "_lo"] = [&ps](const std::string& k, const std::string& v) { ps.lo = parse_double(k, v); };
    m[pfx + "_hi"] = [&ps](const std::string& k, const std::string& v) { ps.hi = parse_double(k, v); };
    m[pfx + "_ramp"] = [&ps](const std::string& k, const std::string& v) { ps.ramp = parse_double(k, v); };
    m[pfx + "_center"] = [&ps](const std::string& k, const std::string& v) { ps.center = parse_double(k, v); };
    m[pfx + "_sigma"] = [&ps](const std::string& k, const std::string& v) { ps.sigma = parse_double(k, v); };
    m[pfx + "_amp"] = [&ps](const std::string& k, const std::string& v) { ps.amp_re = parse_double(k, v); };
    m[pfx + "_amp_im"] = [&ps](const std::string& k, const std::string& v) { ps.amp_im = parse_double(k, v); };
    m[pfx + "_table_r"] = [&ps](const std::string& k, const std::string& v) { ps.table_r = parse_list(k, v); };
    m[pfx + "_table_v"] = [&ps](const std::string& k, const std::string& v) { ps.table_v = parse_list(k, v); };
}

template <class T>
Setter num(T& field) {
    return [&field](const std::string& k, const std::string& v) { field = static_cast<T>(parse_double(k, v)); };
}
Setter integer(int& field) {
    return [&field](const std::string& k, const std::string& v) {
        const double x = parse_double(k, v);
        if (x != std::trunc(x)) throw config_error(k, "not an integer: '" + v + "'");
        field = static_cast<int>(x);
    };
}
Setter size(std::size_t& field) {
    return [&field](const std::string& k, const std::string& v) { field = parse_size(k, v); };
}
Setter flag(bool& field) {
    return [&field](const std::string& k, const std::string& v) { field = parse_bool(k, v); };
}

std::string num_str(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json jnum(double v) {
    if (std::isfinite(v)) return v;
    return num_str(v);
}

double from_jnum(const json& j) {
    if (j.is_null()) return kInf;
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        return std::numeric_limits<double>::quiet_NaN();
    }
    return j.get<double>();
}

const char* status_name(LifespanStatus s) { return to_string(s); }

LifespanStatus status_from(const std::string& s) {
    if (s == "BlowUp") return LifespanStatus::BlowUp;
    if (s == "SurvivedTo") return LifespanStatus::SurvivedTo;
    return LifespanStatus::Inconclusive;
}

odi::BoundCase case_from(const std::string& s) {
    if (s == odi::to_string(odi::BoundCase::SingleExp)) return odi::BoundCase::SingleExp;
    if (s == odi::to_string(odi::BoundCase::DoubleExp)) return odi::BoundCase::DoubleExp;
    return odi::BoundCase::Algebraic;
}

std::string eps_tag(double eps) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6e", eps);
    return buf;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::Io, "cannot create directory " + dir.string());
}

std::ofstream open_out(const fs::path& file) {
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + file.string());
    return os;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

}  // namespace

void RunConfig::validate() const {
    try {
        model.validate(false);
        data.validate();
        grid.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, e.what());
    }
    for (double e : epsilons) {
        if (!(e > 0.0) || !std::isfinite(e)) throw config_error("sweep.epsilons", "values must be positive");
    }
    auto sorted = epsilons;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw config_error("sweep.epsilons", "values must be distinct");
    }
    if (!(r_max_growth > 1.0)) throw config_error("sweep.r_max_growth", "must exceed 1");
    if (chain && chain_points < 2) throw config_error("certifier.chain_points", "needs at least 2");
}

RunConfig parse_config(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error(ErrorKind::Config, std::string("config syntax: ") + e.what());
    }

    RunConfig cfg;
    ProfileSpec fspec, gspec;
    double lambda_re = cfg.model.lambda.real();
    double lambda_im = cfg.model.lambda.imag();
    std::string weight = "log2d";
    int dim = 2;
    std::optional<double> h;
    std::optional<double> eps_min, eps_max;
    std::size_t eps_count = 0;
    std::string out_dir;

    std::map<std::string, std::map<std::string, Setter>> keys;
    auto& model = keys["model"];
    model["tau"] = integer(cfg.model.tau);
    model["zeta"] = num(cfg.model.zeta);
    model["lambda"] = num(lambda_re);
    model["lambda_re"] = num(lambda_re);
    model["lambda_im"] = num(lambda_im);
    model["p"] = num(cfg.model.p);
    model["epsilon"] = num(cfg.model.epsilon);
    model["weight"] = [&weight](const std::string&, const std::string& v) { weight = trim(v); };
    model["dim"] = integer(dim);

    auto& data = keys["data"];
    add_profile_keys(data, "f", fspec);
    add_profile_keys(data, "g", gspec);

    auto& grid = keys["grid"];
    grid["r_max"] = num(cfg.grid.r_max);
    grid["n"] = size(cfg.grid.n);
    grid["h"] = [&h](const std::string& k, const std::string& v) { h = parse_double(k, v); };

    auto& so = keys["solver"];
    auto& s = cfg.solver;
    so["dt_max"] = num(s.dt_max);
    so["dt_max_rel"] = num(s.dt_max_rel);
    so["safety"] = num(s.safety);
    so["t_end"] = num(s.t_end);
    so["max_steps"] = size(s.max_steps);
    so["blowup_threshold"] = num(s.blowup_threshold);
    so["dt_contraction"] = num(s.dt_contraction);
    so["abort_norm"] = num(s.abort_norm);
    so["leak_tol"] = num(s.leak_tol);
    so["leak_fraction"] = num(s.leak_fraction);
    so["diffusion"] = flag(s.diffusion);
    so["dispersive"] = flag(s.dispersive);
    so["cfl"] = num(s.cfl);
    so["snapshots"] = flag(s.keep_snapshots);
    so["max_snapshots"] = size(s.max_snapshots);
    so["snapshot_growth"] = num(s.snapshot_growth);

    auto& ce = keys["certifier"];
    auto& c = cfg.certifier;
    ce["enabled"] = flag(cfg.certify);
    ce["R0"] = num(c.R0);
    ce["margin"] = num(c.margin);
    ce["angle_tol"] = num(c.angle_tol);
    ce["constant_R_list"] = [&c](const std::string& k, const std::string& v) { c.constant_R_list = parse_list(k, v); };
    ce["samples"] = size(c.samples);
    ce["seed"] = [&c](const std::string& k, const std::string& v) { c.seed = parse_u64(k, v); };
    ce["safety"] = num(c.constant_safety);
    ce["c6_safety"] = num(c.c6_safety);
    ce["sup_R_max"] = num(c.sup_R_max);
    ce["sup_points"] = size(c.sup_points);
    ce["delta0"] = num(c.closed_form_delta0);
    ce["chain"] = flag(cfg.chain);
    ce["chain_points"] = size(cfg.chain_points);
    ce["chain_tol"] = num(c.chain_tol);

    auto& sw = keys["sweep"];
    sw["epsilons"] = [&cfg](const std::string& k, const std::string& v) { cfg.epsilons = parse_list(k, v); };
    sw["eps_min"] = [&eps_min](const std::string& k, const std::string& v) { eps_min = parse_double(k, v); };
    sw["eps_max"] = [&eps_max](const std::string& k, const std::string& v) { eps_max = parse_double(k, v); };
    sw["count"] = size(eps_count);
    sw["threads"] = size(cfg.threads);
    sw["r_max_growth"] = num(cfg.r_max_growth);
    sw["max_enlargements"] = size(cfg.max_enlargements);

    auto& out = keys["output"];
    out["dir"] = [&out_dir](const std::string&, const std::string& v) { out_dir = trim(v); };
    out["series"] = flag(cfg.write_series);

    for (const auto& [section, body] : tree) {
        const auto sec = keys.find(section);
        if (sec == keys.end()) {
            if (body.empty()) throw config_error(section, "entry outside any known section");
            throw config_error(section, "unknown section");
        }
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            const auto it = sec->second.find(key);
            if (it == sec->second.end()) throw config_error(full, "unknown key");
            it->second(full, value.data());
        }
    }

    cfg.model.lambda = cplx{lambda_re, lambda_im};
    if (weight == "log2d") {
        cfg.model.weight = WeightMode::log2d();
    } else if (weight == "power") {
        cfg.model.weight = WeightMode::power(dim);
    } else {
        throw config_error("model.weight", "expected log2d or power, got '" + weight + "'");
    }
    cfg.data.f = fspec.build("data.f");
    cfg.data.g = gspec.build("data.g");
    if (h) {
        if (!(*h > 0.0)) throw config_error("grid.h", "must be positive");
        cfg.grid = RadialGrid::with_spacing(cfg.grid.r_max, *h);
    }
    if (eps_min || eps_max || eps_count) {
        if (!eps_min || !eps_max || eps_count == 0) {
            throw config_error("sweep.count", "a log range needs eps_min, eps_max and count");
        }
        if (!cfg.epsilons.empty()) throw config_error("sweep.epsilons", "give either a list or a log range");
        if (!(*eps_min > 0.0) || !(*eps_max >= *eps_min)) throw config_error("sweep.eps_min", "need 0 < eps_min <= eps_max");
        for (std::size_t i = 0; i < eps_count; ++i) {
            const double f = eps_count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(eps_count - 1);
            cfg.epsilons.push_back(std::exp(std::log(*eps_max) + f * (std::log(*eps_min) - std::log(*eps_max))));
        }
    }
    cfg.out_dir = out_dir;
    cfg.validate();
    return cfg;
}

RunConfig load_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::Config, "cannot open config file " + file.string());
    return parse_config(in);
}

SweepRecord run_single(const RunConfig& cfg) {
    SweepRecord rec;
    rec.epsilon = cfg.model.epsilon;
    const std::string ctx = "epsilon = " + num_str(rec.epsilon) + ": ";
    try {
        const ModelParams& params = cfg.model;
        SolverOptions so = cfg.solver;
        so.keep_snapshots = cfg.chain && cfg.solver.keep_snapshots;

        RadialGrid grid = cfg.grid;
        const double h = grid.h();
        Trajectory traj;
        for (std::size_t attempt = 0;; ++attempt) {
            try {
                traj = evolve(params, cfg.data, grid, so);
                break;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::DomainTooSmall || attempt >= cfg.max_enlargements) throw;
                const double r_max = 1.0 + (grid.r_max - 1.0) * cfg.r_max_growth;
                grid = RadialGrid::with_spacing(r_max, h);
                ++rec.meta.enlargements;
            }
        }
        rec.lifespan = detect_blowup(traj, params, so.blowup_threshold, so.dt_contraction);
        auto& m = rec.meta;
        m.r_max = traj.grid.r_max;
        m.n = traj.grid.n;
        m.h = traj.grid.h();
        m.dt_initial = traj.dt_initial;
        m.dt_min = traj.dt_min;
        m.steps = traj.steps;
        m.t_final = traj.t_final;
        m.boundary_leak = traj.boundary_leak;
        m.stop = to_string(traj.stop);
        m.kernel = traj.kernel_variant;

        std::optional<CertificateReport> cert;
        if (cfg.certify && params.lambda != cplx{0.0, 0.0}) {
            cert = certify(params, cfg.data, cfg.certifier);
            rec.bound = cert->bound;
            rec.delta = cert->delta;
        }

        std::optional<ChainReport> chain;
        if (cert && cfg.chain && rec.lifespan.status == LifespanStatus::BlowUp) {
            const double R_hi = rec.lifespan.T_lo;
            if (R_hi > cert->R0) {
                std::vector<double> Rs;
                for (std::size_t i = 0; i < cfg.chain_points; ++i) {
                    const double f = static_cast<double>(i) / static_cast<double>(cfg.chain_points - 1);
                    Rs.push_back(std::exp(std::log(cert->R0) + f * (std::log(R_hi) - std::log(cert->R0))));
                }
                chain = inequality_chain(traj, params, cfg.data, Rs, *cert, cfg.certifier.chain_tol);
                m.chain_passed = chain->passed && chain->criterion.passed;
                double worst = 0.0;
                for (const auto& row : chain->rows) worst = std::max(worst, row.weak_residual);
                m.weak_residual = worst;
            }
        }

        if (!cfg.out_dir.empty()) {
            ensure_dir(cfg.out_dir);
            const std::string tag = eps_tag(rec.epsilon);
            if (cfg.write_series) {
                auto os = open_out(cfg.out_dir / ("series_eps_" + tag + ".csv"));
                write_series_csv(os, traj);
            }
            if (cert) {
                auto os = open_out(cfg.out_dir / ("certificate_eps_" + tag + ".json"));
                os << to_json(*cert).dump(2) << '\n';
            }
            if (chain) {
                auto os = open_out(cfg.out_dir / ("chain_eps_" + tag + ".csv"));
                write_chain_csv(os, *chain);
            }
        }
    } catch (const QuadratureError& e) {
        throw QuadratureError(ctx + e.what(), e.estimate(), e.error_estimate());
    } catch (const Error& e) {
        throw Error(e.kind(), ctx + e.what());
    }
    return rec;
}

std::vector<SweepRecord> sweep(const RunConfig& cfg) {
    std::vector<SweepRecord> out(cfg.epsilons.size());
    if (cfg.epsilons.empty()) return out;

    std::size_t workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, cfg.epsilons.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < cfg.epsilons.size(); i = next++) {
            RunConfig local = cfg;
            local.model.epsilon = cfg.epsilons[i];
            try {
                out[i] = run_single(local);
            } catch (const std::exception& e) {
                SweepRecord rec;
                rec.epsilon = cfg.epsilons[i];
                rec.lifespan.reason = "run failed";
                rec.error = e.what();
                out[i] = std::move(rec);
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::stable_sort(out.begin(), out.end(), [](const SweepRecord& a, const SweepRecord& b) { return a.epsilon > b.epsilon; });
    return out;
}

const char* to_string(FitModel m) { return m == FitModel::PowerLog ? "PowerLog" : "ExpExp"; }

FitReport fit_scaling(const std::vector<SweepRecord>& records, FitModel model, double p, bool log_log_regressor) {
    std::vector<const SweepRecord*> pts;
    for (const auto& r : records) {
        if (r.lifespan.status == LifespanStatus::BlowUp && r.lifespan.T_est > 0.0) pts.push_back(&r);
    }
    if (pts.size() < 4) throw Error(ErrorKind::Input, "scaling fit needs at least 4 blow-up records");
    std::sort(pts.begin(), pts.end(), [](const SweepRecord* a, const SweepRecord* b) { return a->epsilon > b->epsilon; });

    FitReport fit;
    fit.model = model;
    fit.n = pts.size();
    const bool with_ll = model == FitModel::PowerLog && log_log_regressor;
    const Eigen::Index rows = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd X(rows, with_ll ? 3 : 2);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const SweepRecord& r = *pts[static_cast<std::size_t>(i)];
        X(i, 0) = 1.0;
        if (model == FitModel::PowerLog) {
            X(i, 1) = std::log(1.0 / r.epsilon);
            y(i) = std::log(r.lifespan.T_est);
            if (with_ll) {
                if (!(X(i, 1) > 0.0)) throw Error(ErrorKind::Input, "log log(1/eps) regressor needs eps < 1");
                X(i, 2) = std::log(X(i, 1));
            }
        } else {
            if (!(r.lifespan.T_est > 1.0)) throw Error(ErrorKind::Input, "log log T needs T > 1");
            X(i, 1) = 1.0 / r.epsilon;
            y(i) = std::log(std::log(r.lifespan.T_est));
        }
    }
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    fit.intercept = beta(0);
    fit.slope = beta(1);
    if (with_ll) fit.log_log_coef = beta(2);
    const Eigen::VectorXd res = y - X * beta;
    const double mean = y.mean();
    const double ss_tot = (y.array() - mean).square().sum();
    fit.r2 = ss_tot > 0.0 ? 1.0 - res.squaredNorm() / ss_tot : 1.0;
    if (model == FitModel::PowerLog && p > 1.0 && p < 2.0) fit.theory_slope = (p - 1.0) / (2.0 - p);

    for (const SweepRecord* r : pts) {
        if (r->bound && std::log(r->lifespan.T_est) > r->bound->log_T) {
            fit.dominance = false;
            fit.dominance_violations.push_back(r->epsilon);
        }
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i]->lifespan.T_est < pts[i - 1]->lifespan.T_est * (1.0 - 1e-9)) fit.monotone = false;
    }
    return fit;
}

json to_json(const FitReport& fit) {
    json j = {
        {"model", to_string(fit.model)},
        {"n", fit.n},
        {"slope", fit.slope},
        {"intercept", fit.intercept},
        {"r2", fit.r2},
        {"dominance", fit.dominance},
        {"dominance_violations", fit.dominance_violations},
        {"monotone", fit.monotone},
    };
    if (fit.log_log_coef) j["log_log_coef"] = *fit.log_log_coef;
    if (fit.theory_slope) j["theory_slope"] = *fit.theory_slope;
    return j;
}

json to_json(const SweepRecord& rec) {
    const auto& l = rec.lifespan;
    const auto& m = rec.meta;
    json j = {
        {"epsilon", jnum(rec.epsilon)},
        {"lifespan",
         {{"status", status_name(l.status)},
          {"T_est", jnum(l.T_est)},
          {"T_lo", jnum(l.T_lo)},
          {"T_hi", jnum(l.T_hi)},
          {"t_end", jnum(l.t_end)},
          {"threshold_hit", jnum(l.threshold_hit)},
          {"reason", l.reason}}},
        {"meta",
         {{"r_max", jnum(m.r_max)},
          {"n", m.n},
          {"h", jnum(m.h)},
          {"dt_initial", jnum(m.dt_initial)},
          {"dt_min", jnum(m.dt_min)},
          {"steps", m.steps},
          {"t_final", jnum(m.t_final)},
          {"boundary_leak", jnum(m.boundary_leak)},
          {"stop", m.stop},
          {"kernel", m.kernel},
          {"enlargements", m.enlargements}}},
        {"error", rec.error},
    };
    if (m.chain_passed) j["meta"]["chain_passed"] = *m.chain_passed;
    if (m.weak_residual) j["meta"]["weak_residual"] = jnum(*m.weak_residual);
    if (rec.bound) {
        const auto& b = *rec.bound;
        j["bound"] = {{"case", odi::to_string(b.case_tag)},
                      {"T_upper", jnum(b.T_upper)},
                      {"log_T", jnum(b.log_T)},
                      {"log_log_T", jnum(b.log_log_T)},
                      {"budget", jnum(b.budget)},
                      {"symbolic", b.symbolic}};
    }
    if (rec.delta) j["delta"] = jnum(*rec.delta);
    return j;
}

SweepRecord record_from_json(const json& j) {
    try {
        SweepRecord rec;
        rec.epsilon = from_jnum(j.at("epsilon"));
        const auto& l = j.at("lifespan");
        rec.lifespan.status = status_from(l.at("status").get<std::string>());
        rec.lifespan.T_est = from_jnum(l.at("T_est"));
        rec.lifespan.T_lo = from_jnum(l.at("T_lo"));
        rec.lifespan.T_hi = from_jnum(l.at("T_hi"));
        rec.lifespan.t_end = from_jnum(l.at("t_end"));
        rec.lifespan.threshold_hit = from_jnum(l.at("threshold_hit"));
        rec.lifespan.reason = l.at("reason").get<std::string>();
        const auto& m = j.at("meta");
        rec.meta.r_max = from_jnum(m.at("r_max"));
        rec.meta.n = m.at("n").get<std::size_t>();
        rec.meta.h = from_jnum(m.at("h"));
        rec.meta.dt_initial = from_jnum(m.at("dt_initial"));
        rec.meta.dt_min = from_jnum(m.at("dt_min"));
        rec.meta.steps = m.at("steps").get<std::size_t>();
        rec.meta.t_final = from_jnum(m.at("t_final"));
        rec.meta.boundary_leak = from_jnum(m.at("boundary_leak"));
        rec.meta.stop = m.at("stop").get<std::string>();
        rec.meta.kernel = m.at("kernel").get<std::string>();
        rec.meta.enlargements = m.at("enlargements").get<std::size_t>();
        if (m.contains("chain_passed")) rec.meta.chain_passed = m.at("chain_passed").get<bool>();
        if (m.contains("weak_residual")) rec.meta.weak_residual = from_jnum(m.at("weak_residual"));
        rec.error = j.at("error").get<std::string>();
        if (j.contains("bound")) {
            const auto& b = j.at("bound");
            odi::ODIBound bound;
            bound.case_tag = case_from(b.at("case").get<std::string>());
            bound.T_upper = from_jnum(b.at("T_upper"));
            bound.log_T = from_jnum(b.at("log_T"));
            bound.log_log_T = from_jnum(b.at("log_log_T"));
            bound.budget = from_jnum(b.at("budget"));
            bound.symbolic = b.at("symbolic").get<std::string>();
            rec.bound = bound;
        }
        if (j.contains("delta")) rec.delta = from_jnum(j.at("delta"));
        return rec;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, std::string("malformed sweep record: ") + e.what());
    }
}

void write_series_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,dt,maxnorm\n";
    for (const auto& s : traj.series) os << num_str(s.t) << ',' << num_str(s.dt) << ',' << num_str(s.maxnorm) << '\n';
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
    os << "epsilon,status,T_est,T_lo,T_hi,t_end,bound_T,bound_log_T,bound_case,delta,r_max,n,dt_min,steps,error\n";
    for (const auto& r : records) {
        const auto& l = r.lifespan;
        os << num_str(r.epsilon) << ',' << status_name(l.status) << ',' << num_str(l.T_est) << ','
           << num_str(l.T_lo) << ',' << num_str(l.T_hi) << ',' << num_str(l.t_end) << ',';
        if (r.bound) {
            os << num_str(r.bound->T_upper) << ',' << num_str(r.bound->log_T) << ',' << odi::to_string(r.bound->case_tag);
        } else {
            os << ",,";
        }
        os << ',' << (r.delta ? num_str(*r.delta) : "") << ',' << num_str(r.meta.r_max) << ',' << r.meta.n << ','
           << num_str(r.meta.dt_min) << ',' << r.meta.steps << ',' << csv_quote(r.error) << '\n';
    }
}

ReportPaths emit_report(const std::vector<SweepRecord>& records, const std::vector<FitReport>& fits,
                        const fs::path& out_dir) {
    if (records.empty()) throw Error(ErrorKind::Input, "report needs at least one record");
    ensure_dir(out_dir);
    ReportPaths paths{out_dir / "summary.json", out_dir / "sweep.csv", out_dir / "plot.gp"};

    json summary;
    summary["records"] = json::array();
    for (const auto& r : records) summary["records"].push_back(to_json(r));
    if (!fits.empty()) {
        summary["fits"] = json::array();
        for (const auto& f : fits) summary["fits"].push_back(to_json(f));
    }
    {
        auto os = open_out(paths.summary);
        os << summary.dump(2) << '\n';
    }
    {
        auto os = open_out(paths.csv);
        write_sweep_csv(os, records);
    }
    {
        auto os = open_out(paths.plot);
        os << "# gnuplot -p plot.gp\n"
              "set datafile separator ','\n"
              "set logscale xy\n"
              "set xlabel 'epsilon'\n"
              "set ylabel 'lifespan T'\n"
              "set key top right\n"
              "set format y '10^{%L}'\n"
              "plot 'sweep.csv' every ::1 using 1:3 with linespoints pt 7 title 'measured T', \\\n"
              "     'sweep.csv' every ::1 using 1:7 with lines lw 2 title 'certified bound'\n";
    }
    return paths;
}

std::vector<SweepRecord> load_summary(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, std::string("malformed summary: ") + e.what());
    }
    std::vector<SweepRecord> out;
    for (const auto& r : j.value("records", json::array())) out.push_back(record_from_json(r));
    return out;
}

}  // namespace blowlab
