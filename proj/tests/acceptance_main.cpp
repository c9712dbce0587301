// Full-budget verification gates for the toolkit.  Each gate exercises one
// advertised behavior end to end at its production sample sizes and prints a
// single [PASS]/[FAIL] line with the measured numbers and the pinned
// tolerances.  The process exits 0 only if every gate passes.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hawkesim/config.hpp"
#include "hawkesim/engine.hpp"
#include "hawkesim/kernel.hpp"
#include "hawkesim/marks.hpp"
#include "hawkesim/rng.hpp"
#include "hawkesim/runner.hpp"
#include "hawkesim/stats.hpp"
#include "hawkesim/theory.hpp"
#include "hawkesim/verify.hpp"

namespace fs = std::filesystem;
using namespace hawkes;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct MomentSummary {
    double mean = 0.0;
    double var = 0.0;
    double var_of_var = 0.0;  // delta-method variance of the sample variance
    std::size_t n = 0;
};

MomentSummary summarize(const std::vector<double>& xs) {
    MomentSummary s;
    s.n = xs.size();
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(s.n);
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - s.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(s.n);
    m4 /= static_cast<double>(s.n);
    s.var = m2 * static_cast<double>(s.n) / static_cast<double>(s.n - 1);
    s.var_of_var = (m4 - m2 * m2) / static_cast<double>(s.n);
    return s;
}

std::string fmt(const char* format, ...) {
    va_list args;
    va_start(args, format);
    char buf[512];
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return std::string(buf);
}

ExperimentConfig drift_rate_config() {
    ExperimentConfig cfg;
    cfg.seed = 29;
    cfg.mu = 1.0;
    cfg.kernel = Kernel::exponential(1.0, 2.0);
    cfg.marks = MarkDistribution::dirac(1.0);
    cfg.horizons = {50.0, 100.0, 200.0, 400.0, 800.0};
    cfg.replications = 20000;
    cfg.functional = "F";
    cfg.distance = "wasserstein";
    cfg.debias_replicates = 64;
    cfg.bootstrap_resamples = 200;
    return cfg;
}

// Gate 1: the renewal-density solver reproduces the closed form
// psi(t) = alpha exp(-(beta - alpha) t) for the exponential kernel.
Outcome gate_renewal_density() {
    const Kernel k = Kernel::exponential(1.0, 2.0);
    const PsiTable psi = solve_psi(k, 0.01, 10.0);
    double sup = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        const double t = psi.step * static_cast<double>(i);
        sup = std::max(sup, std::abs(psi.values[i] - std::exp(-t)));
    }
    const double l1_err = std::abs(psi.l1_estimate - 1.0);
    const bool pass = sup <= 1e-4 && l1_err <= 1e-3;
    return {pass, fmt("sup|psi - exp(-t)| = %.3e (tol 1e-4), |l1 - 1| = %.3e (tol 1e-3)",
                      sup, l1_err)};
}

// Gate 2: simulated mean counts match the renewal mean law, and the thinning
// and cluster samplers agree in mean and variance.
Outcome gate_mean_law() {
    const Kernel k = Kernel::exponential(1.0, 2.0);
    const Simulator sim(k, 1.0, MarkDistribution::dirac(1.0));
    const std::size_t reps = 10000;

    std::vector<double> counts(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        RngStream rng(11, StreamPurpose::simulate, 0, i);
        counts[i] = sim.simulate_thinning(100.0, rng).count;
    }
    const MomentSummary a = summarize(counts);
    const PsiTable psi = solve_psi(k, 0.01, 100.0);
    const double target = integrated_mean_intensity(k, 1.0, psi, 100.0);
    const double se = std::sqrt(a.var / static_cast<double>(reps));
    const double mean_gap = std::abs(a.mean - target);
    const bool mean_ok = mean_gap <= 3.0 * se;

    std::vector<double> thin(reps), clus(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        RngStream r1(11, StreamPurpose::simulate, 1, i);
        RngStream r2(11, StreamPurpose::cluster, 1, i);
        thin[i] = sim.simulate_thinning(50.0, r1).count;
        clus[i] = sim.simulate_cluster(50.0, r2).count;
    }
    const MomentSummary t = summarize(thin);
    const MomentSummary c = summarize(clus);
    const double n = static_cast<double>(reps);
    const double se_mean = std::sqrt(t.var / n + c.var / n);
    const double se_var = std::sqrt(t.var_of_var + c.var_of_var);
    const bool cross_ok = std::abs(t.mean - c.mean) <= 3.0 * se_mean &&
                          std::abs(t.var - c.var) <= 3.0 * se_var;

    return {mean_ok && cross_ok,
            fmt("mean gap %.3f (3se %.3f); thinning-cluster mean gap %.3f (3se %.3f), "
                "variance gap %.2f (3se %.2f)",
                mean_gap, 3.0 * se, std::abs(t.mean - c.mean), 3.0 * se_mean,
                std::abs(t.var - c.var), 3.0 * se_var)};
}

// Gate 3: debiased W1 distance of the compensator-centered functional decays
// at the advertised rate and its variance matches gamma^2 = 2.
Outcome gate_w1_rate(std::optional<RateFit>& fit_out) {
    const ExperimentConfig cfg = drift_rate_config();
    const RatesRunResult r = run_rates(cfg, {"", 1});
    fit_out = r.fit;
    const double k2 = r.horizons.back().cumulants.k2;
    const bool slope_ok = r.fit.slope >= -0.65 && r.fit.slope <= -0.35;
    const bool r2_ok = r.fit.r2 >= 0.9;
    const bool k2_ok = std::abs(k2 - 2.0) <= 0.1;
    return {slope_ok && r2_ok && k2_ok,
            fmt("slope %.3f (band [-0.65, -0.35]), R^2 %.3f (min 0.9), "
                "k2(T=800) %.3f (2 +- 0.1)",
                r.fit.slope, r.fit.r2, k2)};
}

// Gate 4: under centered marks the smooth-dictionary distance of S_T/sqrt(T)
// decays strictly faster than the W1 distance of gate 3.
Outcome gate_fast_rate(const std::optional<RateFit>& w1_fit) {
    if (!w1_fit) throw std::runtime_error("needs the fit from the W1 rate gate");
    ExperimentConfig cfg = drift_rate_config();
    cfg.marks = MarkDistribution::rademacher();
    cfg.functional = "raw";
    cfg.distance = "smooth-surrogate";
    cfg.replications = 50000;
    const RatesRunResult r = run_rates(cfg, {"", 1});
    const double gap = w1_fit->slope - r.fit.slope;
    const bool pass = r.fit.slope <= -0.7 && gap >= 0.2;
    return {pass, fmt("slope %.3f (max -0.7), steeper than the W1 slope %.3f by %.3f (min 0.2), "
                      "%zu of 5 points fit",
                      r.fit.slope, w1_fit->slope, gap, r.fit.used.size())};
}

// Gate 5: the drift-centered functional converges to variance
// zeta^2 = 8 and its W1 distance decays inside the advertised band.
Outcome gate_drift_variance() {
    ExperimentConfig cfg = drift_rate_config();
    cfg.functional = "Gamma";
    const RatesRunResult r = run_rates(cfg, {"", 1});
    const double k2 = r.horizons.back().cumulants.k2;
    const bool k2_ok = std::abs(k2 - 8.0) <= 0.4;
    const bool slope_ok = r.fit.slope >= -0.65 && r.fit.slope <= -0.35;
    return {k2_ok && slope_ok,
            fmt("k2(T=800) %.3f (8 +- 0.4), slope %.3f (band [-0.65, -0.35])", k2, r.fit.slope)};
}

// Gate 6: the coupled add-point intensity difference is nonnegative on every
// sampled path and base events stay contained in the shifted path.
Outcome gate_positivity() {
    VerifyOptions opt;
    opt.seed = 7;
    std::string detail;
    bool pass = true;
    for (const Kernel& k : {Kernel::exponential(1.0, 2.0), Kernel::erlang(1.0, 2.0)}) {
        const ModelConfig model{k, 1.0, MarkDistribution::dirac(1.0)};
        const LemmaReport r = check_derivative_positivity(model, 20.0, 5, 2000, opt);
        const StatLine* min_line = r.find("min_lambda_hat");
        const StatLine* viol = r.find("containment_violations");
        const bool ok = r.verdict == "pass" && min_line != nullptr &&
                        min_line->value >= -1e-12 && viol != nullptr && viol->value == 0.0;
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += fmt("%s: min lambda_hat %.2e, violations %g", k.family_name().c_str(),
                      min_line ? min_line->value : -1.0, viol ? viol->value : -1.0);
    }
    return {pass, detail + " (tol -1e-12, 10000 paths each)"};
}

// Gate 7: the conditional offspring integral stays below l1 (1 + |psi|_1)
// in every insertion stratum and saturates the bound for early insertions.
Outcome gate_offspring_bound() {
    VerifyOptions opt;
    opt.seed = 7;
    struct Case {
        Kernel kernel;
        double T;
    };
    // Horizons chosen so the earliest stratum's expected gap sits ~5% below
    // the bound: far enough under it that the upper-confidence test clears by
    // several standard errors, close enough that the approach ratio stays
    // above 0.9 by a similar margin (the approach is exponential in the
    // insertion window, so both margins move together).
    const std::vector<Case> cases = {{Kernel::exponential(1.0, 2.0), 3.5},
                                     {Kernel::exponential(0.8, 1.0), 16.5}};
    std::string detail;
    bool pass = true;
    for (const Case& c : cases) {
        const ModelConfig model{c.kernel, 1.0, MarkDistribution::dirac(1.0)};
        const LemmaReport r = check_offspring_bound(model, c.T, 8, 40000, opt);
        const StatLine* ratio = r.find("approach_ratio");
        const bool ok = r.verdict == "pass" && ratio != nullptr && ratio->value >= 0.9;
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += fmt("l1=%.1f: verdict %s, approach ratio %.3f (min 0.9)",
                      c.kernel.l1_norm(), r.verdict.c_str(), ratio ? ratio->value : 0.0);
    }
    return {pass, detail};
}

// Gate 8: the pathwise balance identity holds for the homogeneous control
// (with a deterministic right side) and the self-exciting case, and the
// corrupted estimator is rejected.
Outcome gate_pathwise_balance() {
    VerifyOptions opt;
    opt.seed = 5;
    VerifyOptions bad = opt;
    bad.negative_control = true;

    const ModelConfig poisson{Kernel::zero(), 1.0, MarkDistribution::dirac(1.0)};
    const LemmaReport p = check_ibp(poisson, 10.0, 100000, opt);
    const StatLine* rhs = p.find("rhs_intensity_weighted_derivative");
    const bool poisson_ok = p.verdict == "pass" && rhs != nullptr && rhs->se == 0.0;
    const LemmaReport pn = check_ibp(poisson, 10.0, 100000, bad);

    const ModelConfig hawkes_model{Kernel::exponential(1.0, 2.0), 1.0,
                                   MarkDistribution::dirac(1.0)};
    const LemmaReport h = check_ibp(hawkes_model, 10.0, 100000, opt);
    const LemmaReport hn = check_ibp(hawkes_model, 10.0, 100000, bad);

    const bool pass = poisson_ok && pn.verdict == "fail" && h.verdict == "pass" &&
                      hn.verdict == "fail";
    return {pass, fmt("homogeneous: %s (rhs se %.1f), corrupted: %s; self-exciting: %s, "
                      "corrupted: %s",
                      p.verdict.c_str(), rhs ? rhs->se : -1.0, pn.verdict.c_str(),
                      h.verdict.c_str(), hn.verdict.c_str())};
}

// Gate 9: the mean squared martingale remainder decays at least like 1/T.
Outcome gate_remainder_decay() {
    VerifyOptions opt;
    opt.seed = 5;
    const ModelConfig model{Kernel::exponential(1.0, 2.0), 1.0, MarkDistribution::dirac(1.0)};
    const LemmaReport r =
        check_remainder_R(model, {50.0, 100.0, 200.0, 400.0, 800.0}, 10000, opt);
    const StatLine* slope = r.find("log_log_slope");
    const bool pass = r.verdict == "pass" && slope != nullptr && slope->value <= -0.8;
    return {pass, fmt("verdict %s, log-log slope %.3f (max -0.8)", r.verdict.c_str(),
                      slope ? slope->value : 0.0)};
}

// Gate 10: rate-experiment outputs are byte-identical across thread counts.
Outcome gate_determinism() {
    const ExperimentConfig cfg = drift_rate_config();
    const fs::path base = fs::temp_directory_path() / "hawkesim_acceptance";
    const fs::path d1 = base / "threads1";
    const fs::path d8 = base / "threads8";
    fs::remove_all(d1);
    fs::remove_all(d8);
    (void)run_rates(cfg, {d1.string(), 1});
    (void)run_rates(cfg, {d8.string(), 8});
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream out;
        out << in.rdbuf();
        return out.str();
    };
    const std::string a = slurp(d1 / "distances.csv");
    const std::string b = slurp(d8 / "distances.csv");
    const bool same = !a.empty() && a == b;
    const bool cumulants_same = slurp(d1 / "cumulants.csv") == slurp(d8 / "cumulants.csv");
    fs::remove_all(base);
    return {same && cumulants_same,
            fmt("distances.csv %s (%zu bytes), cumulants.csv %s",
                same ? "identical" : "DIFFERS", a.size(),
                cumulants_same ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
    struct Gate {
        const char* name;
        std::function<Outcome()> run;
    };
    std::optional<RateFit> w1_fit;

    const std::vector<Gate> gates = {
        {"renewal density", [] { return gate_renewal_density(); }},
        {"mean law and sampler agreement", [] { return gate_mean_law(); }},
        {"W1 decay of the compensated functional", [&] { return gate_w1_rate(w1_fit); }},
        {"fast decay under centered marks", [&] { return gate_fast_rate(w1_fit); }},
        {"drift-centered variance", [] { return gate_drift_variance(); }},
        {"add-point derivative positivity", [] { return gate_positivity(); }},
        {"offspring integral bound", [] { return gate_offspring_bound(); }},
        {"pathwise balance identity", [] { return gate_pathwise_balance(); }},
        {"remainder decay", [] { return gate_remainder_decay(); }},
        {"thread-count determinism", [] { return gate_determinism(); }},
    };

    bool all_pass = true;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = gates[i].run();
        } catch (const std::exception& err) {
            out = {false, std::string("exception: ") + err.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] gate %zu (%s): %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", i + 1,
                    gates[i].name, out.detail.c_str(), secs);
        std::fflush(stdout);
        all_pass = all_pass && out.pass;
    }
    std::printf("%s\n", all_pass ? "ALL GATES PASSED" : "GATE FAILURES PRESENT");
    return all_pass ? 0 : 1;
}
