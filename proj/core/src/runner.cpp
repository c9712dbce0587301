#include "hawkesim/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "hawkesim/errors.hpp"
#include "hawkesim/parallel.hpp"
#include "hawkesim/rng.hpp"

#ifndef HAWKESIM_VERSION
#define HAWKESIM_VERSION "0.0.0"
#endif
#ifndef HAWKESIM_GIT_REV
#define HAWKESIM_GIT_REV "unknown"
#endif

namespace hawkes {
namespace {

using nlohmann::json;

std::string format17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string format_g(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);  // binary: identical bytes on any platform
    if (!out) throw ConfigError("cannot open output file: " + path);
    return out;
}

std::string timestamp_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json params_to_json(const AsymptoticParams& p) {
    return json{{"mu", p.mu},
                {"kernel_l1", p.kernel_l1},
                {"mark_mean", p.mark_mean},
                {"mark_second_moment", p.mark_second_moment},
                {"gamma2", p.gamma2},
                {"zeta2", p.zeta2},
                {"varpi", p.varpi},
                {"psi_l1", p.psi_l1},
                {"offspring_bound", p.offspring_bound}};
}

json conventions_json() {
    return json{
        {"insertion_atom",
         "the shifted path carries a deterministic event at the insertion time with unit mark; "
         "it is excluded from all mark statistics"},
        {"functionals",
         json{{"F", "(mark sum - E[X] * compensator) / sqrt(T)"},
              {"Gamma", "(mark sum - varpi * T) / sqrt(T)"},
              {"V", "(mark sum - E[X] * integrated mean intensity) / sqrt(T)"},
              {"raw", "mark sum / sqrt(T)"}}},
        {"debias",
         "reported distance = statistic on the sample minus the mean of the same statistic over "
         "matched-size Gaussian calibration samples"},
        {"rng", "Philox4x32-10 counter streams keyed by (seed, purpose, context, replication)"},
        {"csv_float_format", "%.17g"}};
}

// Every subcommand drops the same echo: the canonical config, derived
// quantities, fixed conventions, and run metadata.  Timestamps appear
// only here, so data files stay byte-reproducible.
void write_config_echo(const ExperimentConfig& config, const RunContext& ctx,
                       const std::string& subcommand, json derived) {
    if (ctx.output_dir.empty()) return;
    json root;
    root["config"] = json::parse(config.to_json_text());
    root["derived"] = std::move(derived);
    root["conventions"] = conventions_json();
    root["run"] = json{{"subcommand", subcommand},
                       {"timestamp_utc", timestamp_utc()},
                       {"threads", ctx.threads},
                       {"seed", config.seed},
                       {"version", HAWKESIM_VERSION},
                       {"git_rev", HAWKESIM_GIT_REV},
                       {"config_fingerprint", config_fingerprint(config)}};
    auto out = open_output(ctx.output_dir, "config.json");
    out << root.dump(2) << "\n";
}

json derived_base(const ExperimentConfig& config) {
    const auto params = AsymptoticParams::from(config.kernel, config.mu, config.marks);
    json derived;
    derived["params"] = params_to_json(params);
    derived["psi_step"] = config.psi_step_resolved();
    derived["psi_horizon"] = config.psi_horizon_resolved();
    derived["psi_tol"] = config.psi.tol;
    return derived;
}

// One stream per replication, shared across horizons: under thinning the
// path at a shorter horizon is then an exact prefix of the longer one, so
// per-horizon estimates share their Monte Carlo noise and rate fits see
// far less scatter (common random numbers).
PathResult simulate_one(const Simulator& sim, const ExperimentConfig& config, double T,
                        std::uint64_t replication) {
    const bool cluster = config.sim.method == "cluster";
    RngStream rng(config.seed, cluster ? StreamPurpose::cluster : StreamPurpose::simulate, 0,
                  replication);
    return cluster ? sim.simulate_cluster(T, rng) : sim.simulate_thinning(T, rng);
}

}  // namespace

PsiRunResult run_psi(const ExperimentConfig& config, const RunContext& ctx) {
    PsiRunResult result;
    result.step = config.psi_step_resolved();
    result.horizon = config.psi_horizon_resolved();
    result.tol = config.psi.tol;
    result.table = solve_psi(config.kernel, result.step, result.horizon, result.tol);
    const double l1 = config.kernel.l1_norm();
    result.psi_l1_exact = l1 / (1.0 - l1);

    if (!ctx.output_dir.empty()) {
        ensure_dir(ctx.output_dir);
        auto out = open_output(ctx.output_dir, "psi.csv");
        out << "t,psi\n";
        for (std::size_t j = 0; j < result.table.values.size(); ++j) {
            out << format17(static_cast<double>(j) * result.table.step) << ","
                << format17(result.table.values[j]) << "\n";
        }
        json derived = derived_base(config);
        derived["psi_residual"] = result.table.residual;
        derived["psi_l1_estimate"] = result.table.l1_estimate;
        derived["psi_l1_exact"] = result.psi_l1_exact;
        derived["psi_tail_bound"] = result.table.tail_bound;
        derived["psi_iterations"] = result.table.iterations;
        write_config_echo(config, ctx, "psi", std::move(derived));
    }
    return result;
}

SimRunResult run_sim(const ExperimentConfig& config, const RunContext& ctx) {
    const Simulator sim(config.kernel, config.mu, config.marks);
    const std::size_t reps = config.replications;
    SimRunResult result;
    result.rows.resize(config.horizons.size() * reps);

    std::vector<EventLog> logs;
    if (config.sim.persist_events) logs.resize(result.rows.size());

    for (std::size_t h = 0; h < config.horizons.size(); ++h) {
        const double T = config.horizons[h];
        parallel_for(reps, ctx.threads, [&](std::size_t i) {
            PathResult path = simulate_one(sim, config, T, i);
            SimPathRow& row = result.rows[h * reps + i];
            row.horizon = T;
            row.replication = i;
            row.count = path.count;
            row.mark_sum = path.mark_sum;
            row.compensator = path.compensator;
            row.martingale = path.martingale;
            if (config.sim.persist_events) logs[h * reps + i] = std::move(path.log);
        });
    }

    if (!ctx.output_dir.empty()) {
        ensure_dir(ctx.output_dir);
        auto out = open_output(ctx.output_dir, "paths.csv");
        out << "horizon,replication,count,mark_sum,compensator,martingale\n";
        for (const SimPathRow& row : result.rows) {
            out << format_g(row.horizon) << "," << row.replication << "," << format17(row.count)
                << "," << format17(row.mark_sum) << "," << format17(row.compensator) << ","
                << format17(row.martingale) << "\n";
        }
        if (config.sim.persist_events) {
            for (std::size_t h = 0; h < config.horizons.size(); ++h) {
                for (std::size_t i = 0; i < reps; ++i) {
                    const EventLog& log = logs[h * reps + i];
                    auto ev = open_output(ctx.output_dir,
                                          "events_T" + format_g(config.horizons[h]) + "_rep" +
                                              std::to_string(i) + ".csv");
                    ev << "time,mark\n";
                    for (std::size_t k = 0; k < log.times.size(); ++k) {
                        ev << format17(log.times[k]) << "," << format17(log.marks[k]) << "\n";
                    }
                    ++result.events_persisted;
                }
            }
        }
        write_config_echo(config, ctx, "sim", derived_base(config));
    }
    return result;
}

RatesRunResult run_rates(const ExperimentConfig& config, const RunContext& ctx) {
    const Simulator sim(config.kernel, config.mu, config.marks);
    RatesRunResult result;
    result.params = AsymptoticParams::from(config.kernel, config.mu, config.marks);
    result.tag = functional_tag_from_name(config.functional);
    result.distance_kind = config.distance;
    result.target_variance = target_variance(result.tag, result.params);

    // The mean-centered functional needs the integrated mean intensity,
    // hence the renewal density out to the largest horizon.
    std::optional<PsiTable> psi;
    const bool needs_psi = result.tag == FunctionalTag::mean_centered &&
                           config.kernel.family() != Kernel::Family::zero;
    if (needs_psi) {
        const double horizon = std::max(config.psi_horizon_resolved(), config.max_horizon());
        psi = solve_psi(config.kernel, config.psi_step_resolved(), horizon, config.psi.tol);
    }

    SurrogateDictionary dictionary;
    if (result.distance_kind == "smooth-surrogate") {
        dictionary = SurrogateDictionary::default_dictionary();
        dictionary.certify();
    }

    const std::size_t reps = config.replications;
    std::vector<RatePoint> points;
    for (std::size_t h = 0; h < config.horizons.size(); ++h) {
        const double T = config.horizons[h];
        double center = 0.0;
        switch (result.tag) {
            case FunctionalTag::compensated:
            case FunctionalTag::raw:
                break;
            case FunctionalTag::drift:
                center = result.params.varpi * T;
                break;
            case FunctionalTag::mean_centered: {
                static const PsiTable kEmpty{};
                const PsiTable& table = psi ? *psi : kEmpty;
                center = result.params.mark_mean *
                         integrated_mean_intensity(config.kernel, config.mu, table, T);
                break;
            }
        }

        Sample sample;
        sample.horizon = T;
        sample.values.resize(reps);
        const double root_T = std::sqrt(T);
        const double mark_mean = result.params.mark_mean;
        const bool compensated = result.tag == FunctionalTag::compensated;
        parallel_for(reps, ctx.threads, [&](std::size_t i) {
            const PathResult path = simulate_one(sim, config, T, i);
            const double centered =
                path.mark_sum - center - (compensated ? mark_mean * path.compensator : 0.0);
            sample.values[i] = centered / root_T;
        });

        DebiasOptions debias;
        debias.replicates = config.debias_replicates;
        debias.seed = config.seed;
        debias.stream_context = h;

        HorizonSummary summary;
        summary.horizon = T;
        summary.distance =
            result.distance_kind == "smooth-surrogate"
                ? smooth_distance_surrogate(sample, result.target_variance, dictionary, debias)
                : wasserstein1_to_normal(sample, result.target_variance, debias);
        summary.cumulants = k_cumulants(sample, config.bootstrap_resamples, config.seed, h);
        result.horizons.push_back(summary);
        points.push_back({T, summary.distance.debiased});
    }
    std::size_t positive_points = 0;
    for (const RatePoint& p : points) positive_points += p.distance > 0.0 ? 1 : 0;
    if (positive_points >= 3) {
        result.fit = fit_rate(points);
    } else {
        // Too few positive distances for a log-log fit; keep the per-horizon
        // outputs and mark the fit coefficients as absent.
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        result.fit.slope = nan;
        result.fit.intercept = nan;
        result.fit.slope_se = nan;
        result.fit.r2 = nan;
        for (const RatePoint& p : points) {
            if (!(p.distance > 0.0)) result.fit.dropped.push_back(p);
        }
    }

    if (!ctx.output_dir.empty()) {
        ensure_dir(ctx.output_dir);
        {
            auto out = open_output(ctx.output_dir, "distances.csv");
            out << "horizon,sample_size,functional,distance,raw,offset,debiased,se,"
                   "target_variance,small_sample_advisory\n";
            for (const HorizonSummary& s : result.horizons) {
                out << format_g(s.horizon) << "," << s.distance.sample_size << ","
                    << functional_tag_name(result.tag) << "," << result.distance_kind << ","
                    << format17(s.distance.raw) << "," << format17(s.distance.offset) << ","
                    << format17(s.distance.debiased) << "," << format17(s.distance.se) << ","
                    << format17(s.distance.target_variance) << ","
                    << (s.distance.small_sample_advisory ? 1 : 0) << "\n";
            }
        }
        {
            auto out = open_output(ctx.output_dir, "cumulants.csv");
            out << "horizon,sample_size,k1,se1,k2,se2,k3,se3,k4,se4\n";
            for (const HorizonSummary& s : result.horizons) {
                const CumulantEstimates& c = s.cumulants;
                out << format_g(s.horizon) << "," << c.sample_size << "," << format17(c.k1) << ","
                    << format17(c.se1) << "," << format17(c.k2) << "," << format17(c.se2) << ","
                    << format17(c.k3) << "," << format17(c.se3) << "," << format17(c.k4) << ","
                    << format17(c.se4) << "\n";
            }
        }
        {
            json fit;
            fit["functional"] = functional_tag_name(result.tag);
            fit["distance"] = result.distance_kind;
            fit["slope"] = result.fit.slope;
            fit["intercept"] = result.fit.intercept;
            fit["slope_se"] = result.fit.slope_se;
            fit["r2"] = result.fit.r2;
            auto points_json = [](const std::vector<RatePoint>& pts) {
                json arr = json::array();
                for (const RatePoint& p : pts) {
                    arr.push_back(json{{"horizon", p.horizon}, {"distance", p.distance}});
                }
                return arr;
            };
            fit["points_used"] = points_json(result.fit.used);
            fit["points_dropped"] = points_json(result.fit.dropped);
            auto out = open_output(ctx.output_dir, "ratefit.json");
            out << fit.dump(2) << "\n";
        }
        json derived = derived_base(config);
        derived["target_variance"] = result.target_variance;
        derived["psi_used"] = needs_psi;
        if (psi) {
            derived["psi_residual"] = psi->residual;
            derived["psi_l1_estimate"] = psi->l1_estimate;
            derived["psi_tail_bound"] = psi->tail_bound;
            derived["psi_iterations"] = psi->iterations;
        }
        write_config_echo(config, ctx, "rates", std::move(derived));
    }
    return result;
}

VerifyRunResult run_verify(const ExperimentConfig& config, const RunContext& ctx) {
    ModelConfig model{config.kernel, config.mu, config.marks};
    const VerifySection& v = config.verify;
    const auto per = [](std::size_t total, std::size_t parts) {
        return std::max<std::size_t>(total / std::max<std::size_t>(parts, 1), 1);
    };

    VerifyRunResult result;
    auto run_all = [&](bool control) {
        VerifyOptions options;
        options.seed = config.seed;
        options.threads = ctx.threads;
        options.negative_control = control;
        result.reports.push_back(check_ibp(model, v.T, v.replications, options));
        result.reports.push_back(check_derivative_positivity(model, v.T, v.insertions,
                                                             per(v.replications, v.insertions),
                                                             options));
        result.reports.push_back(check_offspring_bound(model, v.T, v.strata,
                                                       per(v.replications, v.strata), options));
        result.reports.push_back(
            check_martingale(model, v.T, v.checkpoints, v.replications, options));
        result.reports.push_back(
            check_remainder_R(model, config.horizons, v.replications, options));
        result.reports.push_back(check_R_third_moment(model, config.horizons, v.strata,
                                                      per(v.replications, v.strata), options));
    };
    run_all(false);
    if (v.negative_controls) run_all(true);

    result.ok = true;
    for (const LemmaReport& report : result.reports) {
        if (report.negative_control) {
            if (report.verdict != "fail") result.ok = false;
        } else if (report.verdict != "pass") {
            result.ok = false;
        }
    }

    if (!ctx.output_dir.empty()) {
        ensure_dir(ctx.output_dir);
        json root;
        root["ok"] = result.ok;
        json reports = json::array();
        for (const LemmaReport& report : result.reports) {
            json stats = json::array();
            for (const StatLine& s : report.statistics) {
                stats.push_back(json{{"name", s.name},
                                     {"value", s.value},
                                     {"se", s.se},
                                     {"lo", s.lo},
                                     {"hi", s.hi},
                                     {"pass", s.pass},
                                     {"informational", s.informational}});
            }
            reports.push_back(json{{"check", report.check},
                                   {"config", report.config_summary},
                                   {"replications", report.replications},
                                   {"negative_control", report.negative_control},
                                   {"verdict", report.verdict},
                                   {"notes", report.notes},
                                   {"statistics", std::move(stats)}});
        }
        root["reports"] = std::move(reports);
        auto out = open_output(ctx.output_dir, "lemmas.json");
        out << root.dump(2) << "\n";
        write_config_echo(config, ctx, "verify", derived_base(config));
    }
    return result;
}

std::string lemma_report_text(const LemmaReport& report) {
    std::ostringstream out;
    out << report.check << (report.negative_control ? " [negative control]" : "") << ": "
        << report.verdict << "\n";
    out << "  " << report.config_summary << "  replications=" << report.replications << "\n";
    if (!report.notes.empty()) out << "  note: " << report.notes << "\n";
    char line[256];
    for (const StatLine& s : report.statistics) {
        const char* flag = s.informational ? "info" : (s.pass ? "ok" : "FAIL");
        std::snprintf(line, sizeof(line), "  %-34s %14.6g  se=%-12.6g in [%.6g, %.6g]  %s\n",
                      s.name.c_str(), s.value, s.se, s.lo, s.hi, flag);
        out << line;
    }
    return out.str();
}

std::string rates_summary_text(const RatesRunResult& result) {
    std::ostringstream out;
    char line[256];
    out << "functional=" << functional_tag_name(result.tag) << " distance=" << result.distance_kind
        << " target_variance=" << format_g(result.target_variance) << "\n";
    out << "  horizon      raw distance     debiased           se        k2\n";
    for (const HorizonSummary& s : result.horizons) {
        std::snprintf(line, sizeof(line), "  %8g  %14.6g  %14.6g  %10.3g  %10.6g%s\n", s.horizon,
                      s.distance.raw, s.distance.debiased, s.distance.se, s.cumulants.k2,
                      s.distance.small_sample_advisory ? "  (small sample)" : "");
        out << line;
    }
    if (result.fit.used.size() >= 3) {
        std::snprintf(line, sizeof(line), "  fit: slope=%.4f +/- %.4f  intercept=%.4f  r2=%.4f\n",
                      result.fit.slope, result.fit.slope_se, result.fit.intercept, result.fit.r2);
        out << line;
    } else {
        out << "  fit: not estimated (needs at least 3 positive distances)\n";
    }
    if (!result.fit.dropped.empty()) {
        out << "  warning: " << result.fit.dropped.size()
            << " non-positive distance(s) excluded from the fit\n";
    }
    return out.str();
}

std::string summarize_run_directory(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir);
    std::ostringstream out;
    bool found = false;

    auto slurp = [](const fs::path& path) {
        std::ifstream in(path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    };

    const fs::path config_path = fs::path(dir) / "config.json";
    if (fs::exists(config_path)) {
        found = true;
        try {
            const json root = json::parse(slurp(config_path));
            const json& run = root.at("run");
            out << "run: subcommand=" << run.at("subcommand").get<std::string>()
                << " seed=" << run.at("seed").dump() << " threads=" << run.at("threads").dump()
                << " at " << run.at("timestamp_utc").get<std::string>() << "\n";
            out << "  version=" << run.at("version").get<std::string>()
                << " rev=" << run.at("git_rev").get<std::string>()
                << " fingerprint=" << run.at("config_fingerprint").get<std::string>() << "\n";
            if (root.contains("derived") && root["derived"].contains("params")) {
                const json& p = root["derived"]["params"];
                out << "  mu=" << p.at("mu").dump() << " kernel_l1=" << p.at("kernel_l1").dump()
                    << " gamma2=" << p.at("gamma2").dump() << " zeta2=" << p.at("zeta2").dump()
                    << "\n";
            }
        } catch (const json::exception& err) {
            throw ConfigError(std::string("malformed config.json in run directory: ") + err.what());
        }
    }

    for (const char* name : {"distances.csv", "cumulants.csv"}) {
        const fs::path path = fs::path(dir) / name;
        if (!fs::exists(path)) continue;
        found = true;
        out << name << ":\n";
        std::istringstream rows(slurp(path));
        std::string row;
        while (std::getline(rows, row)) out << "  " << row << "\n";
    }

    const fs::path fit_path = fs::path(dir) / "ratefit.json";
    if (fs::exists(fit_path)) {
        found = true;
        try {
            const json fit = json::parse(slurp(fit_path));
            out << "rate fit: slope=" << fit.at("slope").dump()
                << " +/- " << fit.at("slope_se").dump() << " r2=" << fit.at("r2").dump()
                << " (points used: " << fit.at("points_used").size()
                << ", dropped: " << fit.at("points_dropped").size() << ")\n";
        } catch (const json::exception& err) {
            throw ConfigError(std::string("malformed ratefit.json in run directory: ") + err.what());
        }
    }

    const fs::path lemmas_path = fs::path(dir) / "lemmas.json";
    if (fs::exists(lemmas_path)) {
        found = true;
        try {
            const json root = json::parse(slurp(lemmas_path));
            out << "checks (ok=" << root.at("ok").dump() << "):\n";
            for (const json& report : root.at("reports")) {
                out << "  " << report.at("check").get<std::string>()
                    << (report.at("negative_control").get<bool>() ? " [negative control]" : "")
                    << ": " << report.at("verdict").get<std::string>() << "\n";
            }
        } catch (const json::exception& err) {
            throw ConfigError(std::string("malformed lemmas.json in run directory: ") + err.what());
        }
    }

    for (const char* name : {"psi.csv", "paths.csv"}) {
        const fs::path path = fs::path(dir) / name;
        if (!fs::exists(path)) continue;
        found = true;
        std::istringstream rows(slurp(path));
        std::string row;
        std::size_t count = 0;
        while (std::getline(rows, row)) ++count;
        out << name << ": " << (count > 0 ? count - 1 : 0) << " rows\n";
    }

    if (!found) throw ConfigError("no run artifacts found in " + dir);
    return out.str();
}

}  // namespace hawkes
