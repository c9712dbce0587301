#include "hawkesim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hawkesim/errors.hpp"

namespace hawkes {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
    throw ConfigError(message);
}

std::string joined(std::initializer_list<const char*> keys) {
    std::string out;
    for (const char* k : keys) {
        if (!out.empty()) out += ", ";
        out += k;
    }
    return out;
}

// Strict schema: every object may only carry keys we know about.
void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            fail("unknown key \"" + it.key() + "\" in " + where + " (allowed: " + joined(allowed) + ")");
        }
    }
}

const json& get_field(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where + " is missing required key \"" + key + "\"");
    return *it;
}

double as_double(const json& value, const std::string& where) {
    if (!value.is_number()) fail(where + " must be a number");
    const double x = value.get<double>();
    if (!std::isfinite(x)) fail(where + " must be finite");
    return x;
}

std::uint64_t as_uint(const json& value, const std::string& where) {
    if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
        fail(where + " must be a nonnegative integer");
    }
    return value.get<std::uint64_t>();
}

std::string as_string(const json& value, const std::string& where) {
    if (!value.is_string()) fail(where + " must be a string");
    return value.get<std::string>();
}

bool as_bool(const json& value, const std::string& where) {
    if (!value.is_boolean()) fail(where + " must be a boolean");
    return value.get<bool>();
}

std::vector<double> as_double_array(const json& value, const std::string& where) {
    if (!value.is_array()) fail(where + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        out.push_back(as_double(value[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

Kernel kernel_from_json(const json& obj) {
    if (!obj.is_object()) fail("kernel must be an object");
    const std::string family = as_string(get_field(obj, "kernel", "family"), "kernel.family");
    if (family == "zero") {
        check_keys(obj, "kernel", {"family"});
        return Kernel::zero();
    }
    if (family == "exponential" || family == "erlang") {
        check_keys(obj, "kernel", {"family", "alpha", "beta"});
        const double alpha = as_double(get_field(obj, "kernel", "alpha"), "kernel.alpha");
        const double beta = as_double(get_field(obj, "kernel", "beta"), "kernel.beta");
        return family == "exponential" ? Kernel::exponential(alpha, beta) : Kernel::erlang(alpha, beta);
    }
    if (family == "tabulated") {
        check_keys(obj, "kernel", {"family", "step", "values"});
        const double step = as_double(get_field(obj, "kernel", "step"), "kernel.step");
        auto values = as_double_array(get_field(obj, "kernel", "values"), "kernel.values");
        return Kernel::tabulated(step, std::move(values));
    }
    fail("kernel.family \"" + family + "\" is not one of zero, exponential, erlang, tabulated");
}

json kernel_to_json(const Kernel& kernel) {
    json obj;
    obj["family"] = kernel.family_name();
    switch (kernel.family()) {
        case Kernel::Family::zero:
            break;
        case Kernel::Family::exponential:
        case Kernel::Family::erlang:
            obj["alpha"] = kernel.alpha();
            obj["beta"] = kernel.beta();
            break;
        case Kernel::Family::tabulated:
            obj["step"] = kernel.table_step();
            obj["values"] = kernel.table_values();
            break;
    }
    return obj;
}

MarkDistribution marks_from_json(const json& obj) {
    if (!obj.is_object()) fail("marks must be an object");
    const std::string family = as_string(get_field(obj, "marks", "family"), "marks.family");
    if (family == "dirac") {
        check_keys(obj, "marks", {"family", "value"});
        return MarkDistribution::dirac(as_double(get_field(obj, "marks", "value"), "marks.value"));
    }
    if (family == "rademacher") {
        check_keys(obj, "marks", {"family"});
        return MarkDistribution::rademacher();
    }
    if (family == "centered_normal") {
        check_keys(obj, "marks", {"family", "variance"});
        return MarkDistribution::centered_normal(as_double(get_field(obj, "marks", "variance"), "marks.variance"));
    }
    if (family == "two_point") {
        check_keys(obj, "marks", {"family", "p", "a", "b"});
        return MarkDistribution::two_point(as_double(get_field(obj, "marks", "p"), "marks.p"),
                                           as_double(get_field(obj, "marks", "a"), "marks.a"),
                                           as_double(get_field(obj, "marks", "b"), "marks.b"));
    }
    if (family == "discrete") {
        check_keys(obj, "marks", {"family", "values", "probabilities"});
        return MarkDistribution::discrete(
            as_double_array(get_field(obj, "marks", "values"), "marks.values"),
            as_double_array(get_field(obj, "marks", "probabilities"), "marks.probabilities"));
    }
    fail("marks.family \"" + family + "\" is not one of dirac, rademacher, centered_normal, two_point, discrete");
}

json marks_to_json(const MarkDistribution& marks) {
    json obj;
    obj["family"] = marks.family_name();
    switch (marks.family()) {
        case MarkDistribution::Family::dirac:
            obj["value"] = marks.params()[0];
            break;
        case MarkDistribution::Family::rademacher:
            break;
        case MarkDistribution::Family::centered_normal:
            obj["variance"] = marks.params()[0];
            break;
        case MarkDistribution::Family::two_point:
            obj["p"] = marks.params()[0];
            obj["a"] = marks.params()[1];
            obj["b"] = marks.params()[2];
            break;
        case MarkDistribution::Family::discrete:
            obj["values"] = marks.values();
            obj["probabilities"] = marks.probabilities();
            break;
    }
    return obj;
}

PsiSection psi_from_json(const json& obj) {
    if (!obj.is_object()) fail("psi must be an object");
    check_keys(obj, "psi", {"step", "horizon", "tol"});
    PsiSection out;
    if (auto it = obj.find("step"); it != obj.end()) {
        out.step = as_double(*it, "psi.step");
        if (out.step < 0.0) fail("psi.step must be nonnegative (0 derives it from the kernel)");
    }
    if (auto it = obj.find("horizon"); it != obj.end()) {
        out.horizon = as_double(*it, "psi.horizon");
        if (out.horizon < 0.0) fail("psi.horizon must be nonnegative (0 derives it from the horizons list)");
    }
    if (auto it = obj.find("tol"); it != obj.end()) {
        out.tol = as_double(*it, "psi.tol");
        if (out.tol <= 0.0) fail("psi.tol must be positive");
    }
    return out;
}

SimSection sim_from_json(const json& obj) {
    if (!obj.is_object()) fail("sim must be an object");
    check_keys(obj, "sim", {"method", "persist_events"});
    SimSection out;
    if (auto it = obj.find("method"); it != obj.end()) {
        out.method = as_string(*it, "sim.method");
        if (out.method != "thinning" && out.method != "cluster") {
            fail("sim.method must be thinning or cluster");
        }
    }
    if (auto it = obj.find("persist_events"); it != obj.end()) {
        out.persist_events = as_bool(*it, "sim.persist_events");
    }
    return out;
}

VerifySection verify_from_json(const json& obj) {
    if (!obj.is_object()) fail("verify must be an object");
    check_keys(obj, "verify", {"T", "replications", "strata", "insertions", "checkpoints", "negative_controls"});
    VerifySection out;
    if (auto it = obj.find("T"); it != obj.end()) {
        out.T = as_double(*it, "verify.T");
        if (out.T <= 0.0) fail("verify.T must be positive");
    }
    if (auto it = obj.find("replications"); it != obj.end()) {
        out.replications = as_uint(*it, "verify.replications");
        if (out.replications == 0) fail("verify.replications must be positive");
    }
    if (auto it = obj.find("strata"); it != obj.end()) {
        out.strata = as_uint(*it, "verify.strata");
        if (out.strata == 0) fail("verify.strata must be positive");
    }
    if (auto it = obj.find("insertions"); it != obj.end()) {
        out.insertions = as_uint(*it, "verify.insertions");
        if (out.insertions == 0) fail("verify.insertions must be positive");
    }
    if (auto it = obj.find("checkpoints"); it != obj.end()) {
        out.checkpoints = as_double_array(*it, "verify.checkpoints");
        if (out.checkpoints.empty()) fail("verify.checkpoints must be nonempty");
        for (std::size_t i = 0; i < out.checkpoints.size(); ++i) {
            if (out.checkpoints[i] <= 0.0) fail("verify.checkpoints entries must be positive");
            if (i > 0 && out.checkpoints[i] <= out.checkpoints[i - 1]) {
                fail("verify.checkpoints must be strictly increasing");
            }
        }
    }
    if (auto it = obj.find("negative_controls"); it != obj.end()) {
        out.negative_controls = as_bool(*it, "verify.negative_controls");
    }
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& err) {
        // Covers syntax errors and numeric overflow (out_of_range 406) alike.
        fail(std::string("config is not valid JSON: ") + err.what());
    }
    if (!root.is_object()) fail("config root must be a JSON object");
    check_keys(root, "config",
               {"schema_version", "seed", "mu", "kernel", "marks", "horizons", "replications",
                "functional", "distance", "debias_replicates", "bootstrap_resamples", "output_dir",
                "psi", "sim", "verify"});

    ExperimentConfig cfg;
    cfg.schema_version = static_cast<int>(as_uint(get_field(root, "config", "schema_version"), "schema_version"));
    if (cfg.schema_version != 1) fail("schema_version must be 1");

    if (auto it = root.find("seed"); it != root.end()) cfg.seed = as_uint(*it, "seed");

    if (auto it = root.find("mu"); it != root.end()) cfg.mu = as_double(*it, "mu");
    if (cfg.mu <= 0.0) fail("mu must be positive");

    if (auto it = root.find("kernel"); it != root.end()) cfg.kernel = kernel_from_json(*it);
    if (const StabilityReport stability = stability_check(cfg.kernel); !stability.ok) {
        fail("kernel: " + stability.violation);
    }
    if (auto it = root.find("marks"); it != root.end()) cfg.marks = marks_from_json(*it);

    if (auto it = root.find("horizons"); it != root.end()) {
        cfg.horizons = as_double_array(*it, "horizons");
    }
    if (cfg.horizons.empty()) fail("horizons must be nonempty");
    for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
        if (cfg.horizons[i] <= 0.0) fail("horizons entries must be positive");
        if (i > 0 && cfg.horizons[i] <= cfg.horizons[i - 1]) fail("horizons must be strictly increasing");
    }

    if (auto it = root.find("replications"); it != root.end()) {
        cfg.replications = as_uint(*it, "replications");
    }
    if (cfg.replications < 100) fail("replications must be at least 100");

    if (auto it = root.find("functional"); it != root.end()) {
        cfg.functional = as_string(*it, "functional");
        if (cfg.functional != "F" && cfg.functional != "Gamma" && cfg.functional != "V" &&
            cfg.functional != "raw") {
            fail("functional must be one of F, Gamma, V, raw");
        }
    }
    if (auto it = root.find("distance"); it != root.end()) {
        cfg.distance = as_string(*it, "distance");
        if (cfg.distance != "wasserstein" && cfg.distance != "smooth-surrogate") {
            fail("distance must be wasserstein or smooth-surrogate");
        }
    }
    if (auto it = root.find("debias_replicates"); it != root.end()) {
        cfg.debias_replicates = as_uint(*it, "debias_replicates");
        if (cfg.debias_replicates < 2) fail("debias_replicates must be at least 2");
    }
    if (auto it = root.find("bootstrap_resamples"); it != root.end()) {
        cfg.bootstrap_resamples = as_uint(*it, "bootstrap_resamples");
        if (cfg.bootstrap_resamples < 2) fail("bootstrap_resamples must be at least 2");
    }
    if (auto it = root.find("output_dir"); it != root.end()) {
        cfg.output_dir = as_string(*it, "output_dir");
    }
    if (auto it = root.find("psi"); it != root.end()) cfg.psi = psi_from_json(*it);
    if (auto it = root.find("sim"); it != root.end()) cfg.sim = sim_from_json(*it);
    if (auto it = root.find("verify"); it != root.end()) cfg.verify = verify_from_json(*it);
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string ExperimentConfig::to_json_text() const {
    json root;
    root["schema_version"] = schema_version;
    root["seed"] = seed;
    root["mu"] = mu;
    root["kernel"] = kernel_to_json(kernel);
    root["marks"] = marks_to_json(marks);
    root["horizons"] = horizons;
    root["replications"] = replications;
    root["functional"] = functional;
    root["distance"] = distance;
    root["debias_replicates"] = debias_replicates;
    root["bootstrap_resamples"] = bootstrap_resamples;
    if (!output_dir.empty()) root["output_dir"] = output_dir;
    root["psi"] = {{"step", psi.step}, {"horizon", psi.horizon}, {"tol", psi.tol}};
    root["sim"] = {{"method", sim.method}, {"persist_events", sim.persist_events}};
    root["verify"] = {{"T", verify.T},
                      {"replications", verify.replications},
                      {"strata", verify.strata},
                      {"insertions", verify.insertions},
                      {"checkpoints", verify.checkpoints},
                      {"negative_controls", verify.negative_controls}};
    return root.dump(2) + "\n";
}

double ExperimentConfig::max_horizon() const {
    return horizons.back();
}

double ExperimentConfig::psi_step_resolved() const {
    return psi.step > 0.0 ? psi.step : psi_default_step(kernel);
}

double ExperimentConfig::psi_horizon_resolved() const {
    return psi.horizon > 0.0 ? psi.horizon : max_horizon();
}

std::string config_fingerprint(const ExperimentConfig& config) {
    const std::string text = config.to_json_text();
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

}  // namespace hawkes
