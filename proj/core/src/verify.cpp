#include "hawkesim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hawkesim/errors.hpp"
#include "hawkesim/parallel.hpp"
#include "hawkesim/stats.hpp"
#include "hawkesim/theory.hpp"

namespace hawkes {

namespace {

constexpr double kPositivityTol = 1e-12;
constexpr double kZ99 = 2.3263478740408408;  // standard normal 99% quantile
constexpr double kInf = std::numeric_limits<double>::infinity();

// Stream contexts, one block per check so reusing a seed across checks
// never aliases streams.
constexpr std::uint64_t kCtxIbp = 1;
constexpr std::uint64_t kCtxPositivity = 2;
constexpr std::uint64_t kCtxOffspring = 3;
constexpr std::uint64_t kCtxMartingale = 4;
constexpr std::uint64_t kCtxMartingaleCoupled = 5;
constexpr std::uint64_t kCtxRemainder = 8;   // + horizon index
constexpr std::uint64_t kCtxThirdMoment = 16;  // + horizon index

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    const auto n = static_cast<double>(xs.size());
    for (double x : xs) out.mean += x;
    out.mean /= n;
    double acc = 0.0;
    for (double x : xs) acc += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(acc / (n - 1.0)) / std::sqrt(n);
    return out;
}

std::string summarize(const ModelConfig& model, const std::string& extra) {
    std::ostringstream oss;
    oss << model.kernel.family_name();
    switch (model.kernel.family()) {
        case Kernel::Family::exponential:
        case Kernel::Family::erlang:
            oss << "(" << model.kernel.alpha() << "," << model.kernel.beta() << ")";
            break;
        case Kernel::Family::tabulated:
            oss << "(step=" << model.kernel.table_step()
                << ",nodes=" << model.kernel.table_values().size() << ")";
            break;
        case Kernel::Family::zero:
            break;
    }
    oss << " mu=" << model.mu << " marks=" << model.marks.family_name();
    if (!extra.empty()) oss << " " << extra;
    return oss.str();
}

std::string verdict_from(const std::vector<StatLine>& lines, bool inconclusive) {
    for (const auto& line : lines) {
        if (!line.informational && !line.pass) return "fail";
    }
    return inconclusive ? "inconclusive" : "pass";
}

double count_at(const std::vector<double>& times, double s) {
    return static_cast<double>(std::upper_bound(times.begin(), times.end(), s) - times.begin());
}

}  // namespace

const StatLine* LemmaReport::find(const std::string& name) const {
    for (const auto& line : statistics) {
        if (line.name == name) return &line;
    }
    return nullptr;
}

LemmaReport check_ibp(const ModelConfig& model, double T, std::size_t replications,
                      const VerifyOptions& options) {
    if (replications < 100) throw ConfigError("check_ibp: need at least 100 replications");
    const Simulator sim(model.kernel, model.mu, model.marks);
    const std::size_t strata = std::min<std::size_t>(replications, 64);

    std::vector<double> lhs(replications), rhs(replications);
    parallel_for(replications, options.threads, [&](std::size_t i) {
        RngStream rng(options.seed, StreamPurpose::coupled, kCtxIbp, i);
        const auto j = static_cast<double>(i % strata);
        const double t0 = T * (j + rng.uniform01_open()) / static_cast<double>(strata);
        const CoupledPathResult c = sim.simulate_coupled_addpoint(T, t0, rng);
        const double lambda0 = sim.intensity(c.base.log, t0);
        lhs[i] = c.base.count * c.base.martingale;
        const double one = options.negative_control ? 0.0 : 1.0;
        rhs[i] = T * lambda0 * (one + c.extra_count);
    });

    const MeanSe L = mean_se(lhs);
    const MeanSe R = mean_se(rhs);
    const double joint = std::sqrt(L.se * L.se + R.se * R.se);
    const double diff = L.mean - R.mean;
    const bool pass = std::abs(diff) <= 3.0 * joint;
    const bool wide = 3.0 * joint > 0.2 * std::abs(L.mean);

    LemmaReport report;
    report.check = "ibp";
    report.config_summary = summarize(model, "T=" + std::to_string(T));
    report.replications = replications;
    report.negative_control = options.negative_control;
    report.statistics.push_back({"lhs_count_times_martingale", L.mean, L.se, -kInf, kInf, true, true});
    report.statistics.push_back({"rhs_intensity_weighted_derivative", R.mean, R.se, -kInf, kInf, true, true});
    report.statistics.push_back({"lhs_minus_rhs", diff, joint, -3.0 * joint, 3.0 * joint, pass, false});
    report.verdict = verdict_from(report.statistics, pass && wide);
    report.notes =
        "rhs stratifies the insertion time over [0, T]; its '+1' term restates the "
        "first-moment balance E[H_T] = E[int lambda], so that identity is covered here";
    if (options.negative_control) report.notes += "; negative control drops the '+1' term";
    return report;
}

LemmaReport check_derivative_positivity(const ModelConfig& model, double T,
                                        std::size_t insertion_count,
                                        std::size_t replications_per_insertion,
                                        const VerifyOptions& options) {
    if (insertion_count == 0 || replications_per_insertion == 0) {
        throw ConfigError("check_derivative_positivity: need insertions and replications");
    }
    const Simulator sim(model.kernel, model.mu, model.marks);
    const std::size_t total = insertion_count * replications_per_insertion;

    CoupledOptions copts;
    copts.decouple_thinning = options.negative_control;

    std::vector<double> mins(total, 0.0);
    std::vector<char> contained(total, 1);
    std::vector<double> insertion_times(total, 0.0);
    parallel_for(total, options.threads, [&](std::size_t idx) {
        const std::size_t j = idx / replications_per_insertion;
        RngStream rng(options.seed, StreamPurpose::coupled, kCtxPositivity, idx);
        const double t0 =
            T * static_cast<double>(j + 1) / static_cast<double>(insertion_count + 1);
        const CoupledPathResult c = sim.simulate_coupled_addpoint(T, t0, rng, copts);
        mins[idx] = c.min_lambda_hat;
        contained[idx] = c.containment_ok ? 1 : 0;
        insertion_times[idx] = t0;
    });

    double global_min = 0.0;
    std::size_t worst = 0;
    std::size_t violations = 0;
    for (std::size_t i = 0; i < total; ++i) {
        if (mins[i] < global_min) {
            global_min = mins[i];
            worst = i;
        }
        if (!contained[i]) ++violations;
    }
    const bool min_ok = global_min >= -kPositivityTol;
    const bool contain_ok = violations == 0;

    LemmaReport report;
    report.check = "derivative_positivity";
    report.config_summary = summarize(model, "T=" + std::to_string(T));
    report.replications = total;
    report.negative_control = options.negative_control;
    report.statistics.push_back(
        {"min_lambda_hat", global_min, 0.0, -kPositivityTol, kInf, min_ok, false});
    report.statistics.push_back({"containment_violations", static_cast<double>(violations), 0.0,
                                 0.0, 0.0, contain_ok, false});
    report.verdict = verdict_from(report.statistics, false);
    if (!min_ok || !contain_ok) {
        std::ostringstream oss;
        oss << "offending path: replication " << worst << ", insertion t0=" << insertion_times[worst]
            << ", min lambda_hat=" << mins[worst];
        report.notes = oss.str();
    }
    return report;
}

LemmaReport check_offspring_bound(const ModelConfig& model, double T, std::size_t strata,
                                  std::size_t replications_per_stratum,
                                  const VerifyOptions& options) {
    if (strata == 0 || replications_per_stratum < 10) {
        throw ConfigError("check_offspring_bound: need strata and >= 10 replications each");
    }
    const Simulator sim(model.kernel, model.mu, model.marks);
    const double l1 = model.kernel.l1_norm();

    // |psi|_1 from the solver, horizon extended until the reported tail is
    // negligible against the bound comparison.
    double psi_l1 = 0.0;
    if (l1 > 0.0) {
        const double step = psi_default_step(model.kernel);
        double horizon = 20.0;
        for (int attempt = 0; attempt < 6; ++attempt) {
            const PsiTable psi = solve_psi(model.kernel, step, horizon);
            if (psi.tail_bound <= 1e-9 || attempt == 5) {
                psi_l1 = psi.l1_estimate + psi.tail_bound;
                break;
            }
            horizon *= 2.0;
        }
    }
    const double bound =
        options.negative_control ? offspring_bound(l1, 0.0) : offspring_bound(l1, psi_l1);

    const std::size_t total = strata * replications_per_stratum;
    std::vector<double> gaps(total, 0.0);
    parallel_for(total, options.threads, [&](std::size_t idx) {
        const std::size_t j = idx / replications_per_stratum;
        RngStream rng(options.seed, StreamPurpose::coupled, kCtxOffspring, idx);
        const double t0 =
            T * (static_cast<double>(j) + rng.uniform01_open()) / static_cast<double>(strata);
        const CoupledPathResult c = sim.simulate_coupled_addpoint(T, t0, rng);
        gaps[idx] = c.intensity_gap_integral;
    });

    LemmaReport report;
    report.check = "offspring_bound";
    report.config_summary = summarize(model, "T=" + std::to_string(T));
    report.replications = total;
    report.negative_control = options.negative_control;

    double earliest_mean = 0.0;
    for (std::size_t j = 0; j < strata; ++j) {
        const std::vector<double> slice(gaps.begin() + j * replications_per_stratum,
                                        gaps.begin() + (j + 1) * replications_per_stratum);
        const MeanSe stat = mean_se(slice);
        if (j == 0) earliest_mean = stat.mean;
        const double ucl = stat.mean + kZ99 * stat.se;
        const bool pass = ucl <= bound + 3.0 * stat.se;
        std::ostringstream name;
        name << "gap_integral_stratum" << j;
        report.statistics.push_back(
            {name.str(), stat.mean, stat.se, 0.0, bound + (3.0 - kZ99) * stat.se, pass, false});
    }
    report.statistics.push_back({"bound", bound, 0.0, -kInf, kInf, true, true});
    // Longest window first: stratum 0 inserts earliest, so its mean is the
    // saturation diagnostic used by the long-window acceptance run.
    report.statistics.push_back(
        {"approach_ratio", bound > 0.0 ? earliest_mean / bound : 0.0, 0.0, -kInf, kInf, true, true});
    report.verdict = verdict_from(report.statistics, false);
    if (options.negative_control) report.notes = "negative control compares against |psi|_1 = 0";
    return report;
}

LemmaReport check_martingale(const ModelConfig& model, double T,
                             const std::vector<double>& checkpoints, std::size_t replications,
                             const VerifyOptions& options) {
    if (checkpoints.empty()) throw ConfigError("check_martingale: need checkpoints");
    for (double s : checkpoints) {
        if (!(s > 0.0) || s > T) throw ConfigError("check_martingale: checkpoints must lie in (0, T]");
    }
    if (replications < 100) throw ConfigError("check_martingale: need at least 100 replications");
    const Simulator sim(model.kernel, model.mu, model.marks);
    const double t0 = T / 4.0;
    const bool drop_kernel_terms = options.negative_control;

    const std::size_t nc = checkpoints.size();
    std::vector<double> plain(replications * nc, 0.0);
    std::vector<double> hat(replications * nc, 0.0);
    parallel_for(replications, options.threads, [&](std::size_t i) {
        RngStream rng(options.seed, StreamPurpose::simulate, kCtxMartingale, i);
        const PathResult path = sim.simulate_thinning(T, rng);
        RngStream rng2(options.seed, StreamPurpose::coupled, kCtxMartingaleCoupled, i);
        const CoupledPathResult c = sim.simulate_coupled_addpoint(T, t0, rng2);
        for (std::size_t k = 0; k < nc; ++k) {
            const double s = checkpoints[k];
            const double compensator = drop_kernel_terms
                                           ? model.mu * s
                                           : compensator_integral_at(path.log, model.kernel,
                                                                     model.mu, s);
            plain[i * nc + k] = count_at(path.log.times, s) - compensator;
            if (s > c.insertion_time) {
                const double gap =
                    drop_kernel_terms
                        ? 0.0
                        : compensator_integral_at(c.shifted.log, model.kernel, model.mu, s) -
                              compensator_integral_at(c.base.log, model.kernel, model.mu, s);
                hat[i * nc + k] = count_at(c.extra_times, s) - gap;
            }
        }
    });

    LemmaReport report;
    report.check = "martingale";
    report.config_summary = summarize(model, "T=" + std::to_string(T));
    report.replications = replications;
    report.negative_control = options.negative_control;
    for (std::size_t k = 0; k < nc; ++k) {
        std::vector<double> col(replications);
        for (std::size_t i = 0; i < replications; ++i) col[i] = plain[i * nc + k];
        const MeanSe stat = mean_se(col);
        std::ostringstream name;
        name << "martingale_mean_at_" << checkpoints[k];
        report.statistics.push_back({name.str(), stat.mean, stat.se, -4.0 * stat.se, 4.0 * stat.se,
                                     std::abs(stat.mean) <= 4.0 * stat.se, false});
    }
    for (std::size_t k = 0; k < nc; ++k) {
        if (!(checkpoints[k] > t0)) continue;
        std::vector<double> col(replications);
        for (std::size_t i = 0; i < replications; ++i) col[i] = hat[i * nc + k];
        const MeanSe stat = mean_se(col);
        std::ostringstream name;
        name << "shifted_martingale_mean_at_" << checkpoints[k];
        report.statistics.push_back({name.str(), stat.mean, stat.se, -4.0 * stat.se, 4.0 * stat.se,
                                     std::abs(stat.mean) <= 4.0 * stat.se, false});
    }
    report.verdict = verdict_from(report.statistics, false);
    report.notes = "insertion for the shifted martingale at t0 = T/4";
    if (drop_kernel_terms) report.notes += "; negative control drops kernel compensator terms";
    return report;
}

LemmaReport check_remainder_R(const ModelConfig& model, const std::vector<double>& horizons,
                              std::size_t replications_per_horizon,
                              const VerifyOptions& options) {
    if (horizons.size() < 3) throw ConfigError("check_remainder_R: need at least 3 horizons");
    if (replications_per_horizon < 100) {
        throw ConfigError("check_remainder_R: need at least 100 replications per horizon");
    }
    const Simulator sim(model.kernel, model.mu, model.marks);
    const double l1 = model.kernel.l1_norm();
    const double factor = options.negative_control ? 1.0 : 1.0 / (1.0 - l1);
    const double max_T = *std::max_element(horizons.begin(), horizons.end());

    PsiTable psi;
    if (l1 > 0.0) psi = solve_psi(model.kernel, psi_default_step(model.kernel), max_T);

    LemmaReport report;
    report.check = "remainder_r";
    report.config_summary = summarize(model, "");
    report.replications = horizons.size() * replications_per_horizon;
    report.negative_control = options.negative_control;

    std::vector<RatePoint> points;
    std::vector<double> se_log;
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        const double T = horizons[h];
        const double centering = integrated_mean_intensity(model.kernel, model.mu, psi, T);
        const double sqrt_T = std::sqrt(T);
        std::vector<double> sq(replications_per_horizon);
        parallel_for(replications_per_horizon, options.threads, [&](std::size_t i) {
            RngStream rng(options.seed, StreamPurpose::simulate, kCtxRemainder + h, i);
            const PathResult path = sim.simulate_thinning(T, rng);
            const double y = (path.count - centering) / sqrt_T;
            const double r = y - path.martingale * factor / sqrt_T;
            sq[i] = r * r;
        });
        const MeanSe stat = mean_se(sq);
        std::ostringstream name;
        name << "mean_squared_remainder_T" << T;
        report.statistics.push_back({name.str(), stat.mean, stat.se, -kInf, kInf, true, true});
        points.push_back({T, stat.mean});
        if (stat.mean > 0.0) se_log.push_back(stat.se / stat.mean);
    }

    bool all_zero = true;
    for (const auto& p : points) {
        if (p.distance > 0.0) all_zero = false;
    }
    if (all_zero) {
        // The remainder vanishes identically for the zero kernel.
        report.statistics.push_back({"log_log_slope", 0.0, 0.0, -kInf, kInf, true, true});
        report.verdict = "pass";
        report.notes = "remainder is identically zero for this configuration";
        return report;
    }
    const RateFit fit = fit_rate(points);
    const bool pass = fit.slope <= -0.8;
    report.statistics.push_back({"log_log_slope", fit.slope, fit.slope_se, -kInf, -0.8, pass, false});

    double lo = kInf, hi = -kInf;
    for (const auto& p : fit.used) {
        lo = std::min(lo, std::log(p.distance));
        hi = std::max(hi, std::log(p.distance));
    }
    double mean_se_log = 0.0;
    for (double s : se_log) mean_se_log += s;
    mean_se_log /= se_log.empty() ? 1.0 : static_cast<double>(se_log.size());
    const bool wide = mean_se_log > 0.5 * (hi - lo);
    report.verdict = verdict_from(report.statistics, pass && wide);
    if (options.negative_control) {
        report.notes = "negative control omits the 1/(1 - |phi|_1) martingale scaling";
    }
    return report;
}

LemmaReport check_R_third_moment(const ModelConfig& model, const std::vector<double>& horizons,
                                 std::size_t strata, std::size_t replications_per_stratum,
                                 const VerifyOptions& options) {
    if (horizons.size() < 3) throw ConfigError("check_R_third_moment: need at least 3 horizons");
    if (strata == 0 || replications_per_stratum < 50) {
        throw ConfigError("check_R_third_moment: need strata and >= 50 replications each");
    }
    const Simulator sim(model.kernel, model.mu, model.marks);
    const double mark_mean = model.marks.moments().mean;

    CoupledOptions copts;
    copts.decouple_thinning = options.negative_control;

    LemmaReport report;
    report.check = "r_third_moment";
    report.config_summary = summarize(model, "");
    report.replications = horizons.size() * strata * replications_per_stratum;
    report.negative_control = options.negative_control;

    std::vector<RatePoint> points;
    std::vector<double> se_log;
    bool degenerate = false;
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        const double T = horizons[h];
        const std::size_t total = strata * replications_per_stratum;
        std::vector<double> cubes(total);
        parallel_for(total, options.threads, [&](std::size_t idx) {
            const std::size_t j = idx / replications_per_stratum;
            RngStream rng(options.seed, StreamPurpose::coupled, kCtxThirdMoment + h, idx);
            const double t0 =
                T * (static_cast<double>(j) + rng.uniform01_open()) / static_cast<double>(strata);
            const CoupledPathResult c = sim.simulate_coupled_addpoint(T, t0, rng, copts);
            double mark_total = 0.0;
            for (double x : c.extra_marks) mark_total += x;
            const double r = mark_total - mark_mean * c.intensity_gap_integral;
            const double a = std::abs(r);
            cubes[idx] = a * a * a;
        });
        double best_mean = -kInf;
        double best_se = 0.0;
        for (std::size_t j = 0; j < strata; ++j) {
            const std::vector<double> slice(cubes.begin() + j * replications_per_stratum,
                                            cubes.begin() + (j + 1) * replications_per_stratum);
            const MeanSe stat = mean_se(slice);
            if (stat.mean > best_mean) {
                best_mean = stat.mean;
                best_se = stat.se;
            }
        }
        std::ostringstream name;
        name << "max_mean_abs_cubed_T" << T;
        report.statistics.push_back({name.str(), best_mean, best_se, -kInf, kInf, true, true});
        if (best_mean <= 0.0) degenerate = true;
        points.push_back({T, best_mean});
        if (best_mean > 0.0) se_log.push_back(best_se / best_mean);
    }

    if (degenerate) {
        bool all_zero = true;
        for (const auto& p : points) {
            if (p.distance > 0.0) all_zero = false;
        }
        if (all_zero) {
            // No shifted-only events at any horizon: R vanishes identically
            // (the zero-kernel case), so boundedness holds trivially.
            report.statistics.push_back({"log_log_slope", 0.0, 0.0, -0.15, 0.15, true, true});
            report.verdict = "pass";
            report.notes = "remainder is identically zero for this configuration";
            return report;
        }
        report.verdict = "inconclusive";
        report.notes = "a horizon produced no usable third-moment statistic";
        return report;
    }
    const RateFit fit = fit_rate(points);

    // Propagate the per-point Monte Carlo errors through the least-squares
    // slope: slope = sum w_i log(d_i) with w_i = (x_i - xbar) / sum (x - xbar)^2,
    // and se(log d_i) = se_i / d_i.  The cubed statistic is heavy tailed, so
    // this dominates the residual-based fit error at realistic budgets.
    double xbar = 0.0;
    for (const auto& p : fit.used) xbar += std::log(p.horizon);
    xbar /= static_cast<double>(fit.used.size());
    double sxx = 0.0;
    for (const auto& p : fit.used) {
        const double d = std::log(p.horizon) - xbar;
        sxx += d * d;
    }
    double propagated_var = 0.0;
    for (std::size_t i = 0; i < fit.used.size() && i < se_log.size(); ++i) {
        const double w = (std::log(fit.used[i].horizon) - xbar) / sxx;
        propagated_var += w * w * se_log[i] * se_log[i];
    }
    const double slope_sigma = std::max(fit.slope_se, std::sqrt(propagated_var));

    // Pass needs the point estimate inside the band AND enough resolution to
    // trust it; confident growth (lower confidence bound above the band)
    // fails even on wide data, which keeps the negative control decisive.
    const bool in_band = std::abs(fit.slope) <= 0.15;
    const bool wide = slope_sigma > 0.15;
    const bool confident_growth = fit.slope - 2.0 * slope_sigma > 0.15;
    if (confident_growth) {
        report.verdict = "fail";
    } else if (in_band && !wide) {
        report.verdict = "pass";
    } else {
        report.verdict = "inconclusive";
        if (wide) report.notes = "slope uncertainty exceeds the acceptance band half-width";
    }
    report.statistics.push_back(
        {"log_log_slope", fit.slope, slope_sigma, -0.15, 0.15, report.verdict != "fail", false});
    if (options.negative_control) {
        report.notes = "negative control thins the shifted path with independent theta draws";
    }
    return report;
}

}  // namespace hawkes
