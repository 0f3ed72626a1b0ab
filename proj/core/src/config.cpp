#include "relent/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "relent/builtins.hpp"
#include "relent/report_io.hpp"

namespace relent {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError(path + ": " + message);
}

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
    }
}

double get_num(const json& j, const std::string& path, const std::string& key, double def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number()) fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key, int def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return j[key].get<int>();
}

std::string get_str(const json& j, const std::string& path, const std::string& key,
                    const std::string& def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_string()) fail(path + "." + key, "expected a string");
    return j[key].get<std::string>();
}

std::vector<double> get_num_list(const json& j, const std::string& path, const std::string& key,
                                 std::vector<double> def, bool positive) {
    if (!j.contains(key)) return def;
    const json& v = j[key];
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(v.get<double>());
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                fail(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
    } else {
        fail(path + "." + key, "expected a number or an array of numbers");
    }
    if (positive) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (!(out[i] > 0.0))
                fail(path + "." + key + "[" + std::to_string(i) + "]", "must be positive");
        }
    }
    return out;
}

InitialData parse_initial(const json& j, const std::string& path) {
    InitialData d;
    if (j.is_null()) return d;
    reject_unknown(j, path, {"preset", "base", "amplitude", "wavenumber", "phase", "center", "width"});
    d.preset = get_str(j, path, "preset", "constant");
    static const std::set<std::string> presets{"constant", "sine", "gaussian-bump",
                                               "two-state-smooth"};
    if (!presets.count(d.preset)) fail(path + ".preset", "unknown initial-data preset '" + d.preset + "'");
    d.base = get_num_list(j, path, "base", {}, false);
    d.amplitude = get_num_list(j, path, "amplitude", {}, false);
    d.wavenumber = get_num(j, path, "wavenumber", 1.0);
    d.phase = get_num(j, path, "phase", 0.0);
    d.center = get_num(j, path, "center", 0.0);
    d.width = get_num(j, path, "width", 0.0);
    return d;
}

SystemConfig parse_system(const json& j, const std::string& path) {
    SystemConfig s;
    if (j.is_null()) return s;
    reject_unknown(j, path, {"kind", "kappa", "gamma", "a_profile", "rho_min", "kernel", "base"});
    s.kind = get_str(j, path, "kind", "scalar_sanity");
    static const std::set<std::string> kinds{"scalar_sanity", "duct_gas", "memory_scalar",
                                             "selfsimilar"};
    if (!kinds.count(s.kind)) fail(path + ".kind", "unknown system kind '" + s.kind + "'");

    s.kappa = get_num(j, path, "kappa", 1.0);
    s.gamma = get_num(j, path, "gamma", 2.0);
    s.rho_min = get_num(j, path, "rho_min", 1e-8);
    if (!(s.kappa > 0.0)) fail(path + ".kappa", "must be positive");
    if (!(s.gamma > 1.0)) fail(path + ".gamma", "must exceed 1");
    if (!(s.rho_min > 0.0)) fail(path + ".rho_min", "must be positive");

    if (j.contains("a_profile")) {
        const json& a = j["a_profile"];
        reject_unknown(a, path + ".a_profile", {"preset", "base", "amplitude"});
        s.a_preset = get_str(a, path + ".a_profile", "preset", "sin");
        if (s.a_preset != "sin" && s.a_preset != "constant")
            fail(path + ".a_profile.preset", "expected 'constant' or 'sin'");
        s.a_base = get_num(a, path + ".a_profile", "base", 2.0);
        s.a_amplitude = get_num(a, path + ".a_profile", "amplitude", 0.3);
        if (!(s.a_base - std::abs(s.a_amplitude) > 0.0))
            fail(path + ".a_profile", "profile must stay positive");
    }
    if (j.contains("kernel")) {
        const json& k = j["kernel"];
        reject_unknown(k, path + ".kernel", {"preset", "rate", "T", "dt"});
        s.kernel_preset = get_str(k, path + ".kernel", "preset", "exp");
        if (s.kernel_preset != "exp") fail(path + ".kernel.preset", "expected 'exp'");
        s.kernel_rate = get_num(k, path + ".kernel", "rate", 1.0);
        s.kernel_T = get_num(k, path + ".kernel", "T", 10.0);
        s.kernel_dt = get_num(k, path + ".kernel", "dt", 1e-3);
        if (!(s.kernel_rate > 0.0)) fail(path + ".kernel.rate", "must be positive");
        if (!(s.kernel_dt > 0.0)) fail(path + ".kernel.dt", "must be positive");
    }
    if (j.contains("base")) {
        const json& b = j["base"];
        reject_unknown(b, path + ".base", {"kind"});
        s.base_kind = get_str(b, path + ".base", "kind", "scalar_sanity");
        if (s.base_kind != "scalar_sanity" && s.base_kind != "duct_gas")
            fail(path + ".base.kind", "selfsimilar wraps 'scalar_sanity' or 'duct_gas'");
    }
    return s;
}

SolverBlock parse_solver(const json& j, const std::string& path, std::vector<double>* eps_list) {
    SolverBlock s;
    if (j.is_null()) return s;
    reject_unknown(j, path,
                   {"N", "L", "cfl", "scheme", "integrator", "t_end", "snapshots", "newton_tol",
                    "newton_iters", "epsilon", "initial"});
    s.N = get_int(j, path, "N", 128);
    if (s.N < 8) fail(path + ".N", "need at least 8 cells");
    s.L = get_num(j, path, "L", s.L);
    if (!(s.L > 0.0)) fail(path + ".L", "must be positive");
    s.cfl = get_num(j, path, "cfl", 0.4);
    if (!(s.cfl > 0.0 && s.cfl <= 1.0)) fail(path + ".cfl", "must lie in (0, 1]");
    s.scheme = get_str(j, path, "scheme", "central");
    if (s.scheme != "central" && s.scheme != "local-lax-friedrichs" && s.scheme != "llf")
        fail(path + ".scheme", "expected 'central' or 'local-lax-friedrichs'");
    s.integrator = get_str(j, path, "integrator", "ssp-rk2");
    if (s.integrator != "ssp-rk2" && s.integrator != "rk4")
        fail(path + ".integrator", "expected 'ssp-rk2' or 'rk4'");
    s.t_end = get_num(j, path, "t_end", 0.5);
    if (s.t_end < 0.0) fail(path + ".t_end", "must be nonnegative");
    s.snapshots = get_int(j, path, "snapshots", 17);
    s.newton_tol = get_num(j, path, "newton_tol", 1e-12);
    s.newton_iters = get_int(j, path, "newton_iters", 50);

    std::vector<double> eps = get_num_list(j, path, "epsilon", {0.0}, false);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (eps[i] < 0.0) fail(path + ".epsilon[" + std::to_string(i) + "]", "must be nonnegative");
    }
    s.epsilon = eps.front();
    if (eps_list) *eps_list = eps;

    if (j.contains("initial")) s.initial = parse_initial(j["initial"], path + ".initial");
    return s;
}

ExperimentBlock parse_experiment(const json& j, const std::string& path) {
    ExperimentBlock e;
    if (j.is_null()) return e;
    reject_unknown(j, path,
                   {"epsilons", "grids", "delta", "t_end", "snapshots", "ratio_cap",
                    "gronwall_tol", "slope_window", "plateau_tol", "mismatch", "grid_budget",
                    "saturation_tol", "order_min", "ws_order_min", "shock_gradient_factor",
                    "samples", "state_box", "M", "U_max", "shells", "pair_samples", "xt_points",
                    "T", "hp2_directions", "growth_p", "required"});
    e.epsilons = get_num_list(j, path, "epsilons", {}, true);
    if (j.contains("grids")) {
        if (!j["grids"].is_array()) fail(path + ".grids", "expected an array");
        e.grids.clear();
        for (std::size_t i = 0; i < j["grids"].size(); ++i) {
            if (!j["grids"][i].is_number_integer())
                fail(path + ".grids[" + std::to_string(i) + "]", "expected an integer");
            const int N = j["grids"][i].get<int>();
            if (N < 8) fail(path + ".grids[" + std::to_string(i) + "]", "need at least 8 cells");
            e.grids.push_back(N);
        }
        if (e.grids.empty()) fail(path + ".grids", "must not be empty");
    }
    e.delta = get_num(j, path, "delta", 1e-3);
    e.t_end = get_num(j, path, "t_end", 0.5);
    e.snapshots = get_int(j, path, "snapshots", 33);
    if (e.snapshots < 10) fail(path + ".snapshots", "need at least 10 snapshots");
    e.ratio_cap = get_num(j, path, "ratio_cap", 2.0);
    e.gronwall_tol = get_num(j, path, "gronwall_tol", 0.05);
    if (j.contains("slope_window")) {
        const json& w = j["slope_window"];
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
            fail(path + ".slope_window", "expected [lo, hi]");
        e.slope_lo = w[0].get<double>();
        e.slope_hi = w[1].get<double>();
    }
    e.plateau_tol = get_num(j, path, "plateau_tol", 0.10);
    e.mismatch = get_num(j, path, "mismatch", 0.0);
    e.grid_budget = get_int(j, path, "grid_budget", 4096);
    e.saturation_tol = get_num(j, path, "saturation_tol", 0.05);
    e.order_min = get_num(j, path, "order_min", 1.7);
    e.ws_order_min = get_num(j, path, "ws_order_min", 0.8);
    e.shock_gradient_factor = get_num(j, path, "shock_gradient_factor", 50.0);
    e.samples = get_int(j, path, "samples", 10000);
    if (j.contains("state_box")) {
        const json& b = j["state_box"];
        if (!b.is_array()) fail(path + ".state_box", "expected [[lo,hi],...]");
        std::vector<std::array<double, 2>> box;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const std::string p = path + ".state_box[" + std::to_string(i) + "]";
            if (!b[i].is_array() || b[i].size() != 2 || !b[i][0].is_number() ||
                !b[i][1].is_number())
                fail(p, "expected [lo, hi]");
            box.push_back({b[i][0].get<double>(), b[i][1].get<double>()});
            if (!(box.back()[0] < box.back()[1])) fail(p, "lo must be below hi");
        }
        e.state_box = box;
    }
    e.M = get_num(j, path, "M", 2.0);
    e.U_max = get_num(j, path, "U_max", 40.0);
    e.shells = get_int(j, path, "shells", 4);
    e.pair_samples = get_int(j, path, "pair_samples", 512);
    e.xt_points = get_int(j, path, "xt_points", 8);
    e.T = get_num(j, path, "T", 1.0);
    e.hp2_directions = get_int(j, path, "hp2_directions", 64);
    e.growth_p = get_num(j, path, "growth_p", 2.0);
    if (j.contains("required")) {
        if (!j["required"].is_array()) fail(path + ".required", "expected an array of ids");
        e.required.clear();
        for (const auto& r : j["required"]) {
            if (!r.is_string()) fail(path + ".required", "expected strings");
            e.required.push_back(r.get<std::string>());
        }
    }
    return e;
}

json initial_to_json(const InitialData& d) {
    json j;
    j["preset"] = d.preset;
    j["base"] = d.base;
    j["amplitude"] = d.amplitude;
    j["wavenumber"] = d.wavenumber;
    j["phase"] = d.phase;
    j["center"] = d.center;
    j["width"] = d.width;
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError(".: config must be a JSON object");
    reject_unknown(j, "", {"version", "command", "seed", "output", "system", "solver",
                           "experiment", "tolerances"});

    RunConfig c;
    c.version = get_str(j, "", "version", "1");
    c.command = get_str(j, "", "command", "");
    if (!c.command.empty()) {
        static const std::set<std::string> commands{"audit",     "solve",       "identity",
                                                    "stability", "convergence", "weakstrong"};
        if (!commands.count(c.command)) fail(".command", "unknown command '" + c.command + "'");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            fail(".seed", "expected a nonnegative integer");
        const auto s = j["seed"].get<std::int64_t>();
        if (s < 0) fail(".seed", "expected a nonnegative integer");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("output")) {
        reject_unknown(j["output"], ".output", {"dir"});
        c.out_dir = get_str(j["output"], ".output", "dir", "out");
    }
    c.system = parse_system(j.value("system", json()), ".system");
    std::vector<double> eps_list;
    c.solver = parse_solver(j.value("solver", json()), ".solver", &eps_list);
    c.experiment = parse_experiment(j.value("experiment", json()), ".experiment");
    if (c.experiment.epsilons.empty()) {
        for (double e : eps_list)
            if (e > 0.0) c.experiment.epsilons.push_back(e);
    }
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        reject_unknown(t, ".tolerances", {"h1_min_det", "h2_residual", "uniformity_spread_cap"});
        c.tolerances.h1_min_det = get_num(t, ".tolerances", "h1_min_det", 1e-8);
        c.tolerances.h2_residual = get_num(t, ".tolerances", "h2_residual", 1e-8);
        c.tolerances.uniformity_spread_cap =
            get_num(t, ".tolerances", "uniformity_spread_cap", 10.0);
    }
    c.echo_json = serialize_config(c);
    return c;
}

std::string serialize_config(const RunConfig& c) {
    json j;
    j["version"] = c.version;
    if (!c.command.empty()) j["command"] = c.command;
    j["seed"] = c.seed;
    j["output"] = {{"dir", c.out_dir}};

    json sys;
    sys["kind"] = c.system.kind;
    if (c.system.kind == "duct_gas" || c.system.base_kind == "duct_gas") {
        sys["kappa"] = c.system.kappa;
        sys["gamma"] = c.system.gamma;
        sys["rho_min"] = c.system.rho_min;
        sys["a_profile"] = {{"preset", c.system.a_preset},
                            {"base", c.system.a_base},
                            {"amplitude", c.system.a_amplitude}};
    }
    if (c.system.kind == "memory_scalar") {
        sys["kernel"] = {{"preset", c.system.kernel_preset},
                         {"rate", c.system.kernel_rate},
                         {"T", c.system.kernel_T},
                         {"dt", c.system.kernel_dt}};
    }
    if (c.system.kind == "selfsimilar") sys["base"] = {{"kind", c.system.base_kind}};
    j["system"] = sys;

    j["solver"] = {{"N", c.solver.N},
                   {"L", c.solver.L},
                   {"cfl", c.solver.cfl},
                   {"scheme", c.solver.scheme},
                   {"integrator", c.solver.integrator},
                   {"t_end", c.solver.t_end},
                   {"snapshots", c.solver.snapshots},
                   {"newton_tol", c.solver.newton_tol},
                   {"newton_iters", c.solver.newton_iters},
                   {"epsilon", c.solver.epsilon},
                   {"initial", initial_to_json(c.solver.initial)}};

    json e;
    e["epsilons"] = c.experiment.epsilons;
    e["grids"] = c.experiment.grids;
    e["delta"] = c.experiment.delta;
    e["t_end"] = c.experiment.t_end;
    e["snapshots"] = c.experiment.snapshots;
    e["ratio_cap"] = c.experiment.ratio_cap;
    e["gronwall_tol"] = c.experiment.gronwall_tol;
    e["slope_window"] = {c.experiment.slope_lo, c.experiment.slope_hi};
    e["plateau_tol"] = c.experiment.plateau_tol;
    e["mismatch"] = c.experiment.mismatch;
    e["grid_budget"] = c.experiment.grid_budget;
    e["saturation_tol"] = c.experiment.saturation_tol;
    e["order_min"] = c.experiment.order_min;
    e["ws_order_min"] = c.experiment.ws_order_min;
    e["shock_gradient_factor"] = c.experiment.shock_gradient_factor;
    e["samples"] = c.experiment.samples;
    if (c.experiment.state_box) {
        json box = json::array();
        for (const auto& b : *c.experiment.state_box) box.push_back({b[0], b[1]});
        e["state_box"] = box;
    }
    e["M"] = c.experiment.M;
    e["U_max"] = c.experiment.U_max;
    e["shells"] = c.experiment.shells;
    e["pair_samples"] = c.experiment.pair_samples;
    e["xt_points"] = c.experiment.xt_points;
    e["T"] = c.experiment.T;
    e["hp2_directions"] = c.experiment.hp2_directions;
    e["growth_p"] = c.experiment.growth_p;
    e["required"] = c.experiment.required;
    j["experiment"] = e;

    j["tolerances"] = {{"h1_min_det", c.tolerances.h1_min_det},
                       {"h2_residual", c.tolerances.h2_residual},
                       {"uniformity_spread_cap", c.tolerances.uniformity_spread_cap}};
    return j.dump(2);
}

std::string apply_override(const std::string& text, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects key.path=value, got '" + assignment + "'");
    const std::string keypath = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    json* node = &j;
    std::size_t start = 0;
    std::vector<std::string> keys;
    while (true) {
        const auto dot = keypath.find('.', start);
        keys.push_back(keypath.substr(start, dot == std::string::npos ? dot : dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) node = &(*node)[keys[i]];

    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // bare strings pass through
    }
    (*node)[keys.back()] = parsed;
    return j.dump();
}

SystemSpec build_system(const SystemConfig& c) {
    if (c.kind == "scalar_sanity") return make_scalar_sanity();
    if (c.kind == "duct_gas") {
        DuctProfile profile = c.a_preset == "constant" ? constant_profile(c.a_base)
                                                       : sin_profile(c.a_base, c.a_amplitude);
        return make_duct_gas(c.kappa, c.gamma, std::move(profile), c.rho_min);
    }
    if (c.kind == "memory_scalar") {
        const double rate = c.kernel_rate;
        return make_memory_scalar([rate](double s) { return std::exp(-rate * s); }, c.kernel_T,
                                  c.kernel_dt);
    }
    if (c.kind == "selfsimilar") {
        SystemConfig base = c;
        base.kind = c.base_kind;
        SystemSpec inner = build_system(base);
        return make_selfsimilar(std::move(inner), identity_btilde(inner.n, inner.d));
    }
    throw ConfigError(".system.kind: unknown system kind '" + c.kind + "'");
}

namespace {

ManufacturedTarget default_target(int n, const InitialData& init) {
    std::vector<double> base = init.base;
    std::vector<double> amp = init.amplitude;
    base.resize(n, base.empty() ? 1.0 : base.back());
    amp.resize(n, amp.empty() ? 0.1 : amp.back());
    if (base[0] == 0.0) base[0] = 1.0;  // keep density-like components away from zero
    for (int i = 0; i < n; ++i)
        if (amp[i] == 0.0) amp[i] = 0.1;

    auto phase = [](int i) { return 0.5 * M_PI * i; };
    ManufacturedTarget t;
    t.value = [=](double x, double s) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = base[i] + amp[i] * std::sin(x - s + phase(i));
        return v;
    };
    t.ddt = [=](double x, double s) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = -amp[i] * std::cos(x - s + phase(i));
        return v;
    };
    t.ddx = [=](double x, double s) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = amp[i] * std::cos(x - s + phase(i));
        return v;
    };
    t.ddxx = [=](double x, double s) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = -amp[i] * std::sin(x - s + phase(i));
        return v;
    };
    return t;
}

ExperimentConfig to_experiment_config(const RunConfig& c) {
    ExperimentConfig ec;
    const SystemConfig sysconf = c.system;
    ec.system_factory = [sysconf] { return build_system(sysconf); };
    ec.system = ec.system_factory();

    ec.epsilons = c.experiment.epsilons;
    ec.grids = c.experiment.grids;
    ec.L = c.solver.L;
    ec.t_end = c.experiment.t_end;
    ec.snapshots = c.experiment.snapshots;
    ec.cfl = c.solver.cfl;
    ec.integrator = c.solver.integrator == "rk4" ? Integrator::Rk4 : Integrator::SspRk2;
    ec.initial = c.solver.initial;
    if (ec.initial.base.empty() && ec.initial.amplitude.empty()) {
        if (ec.initial.preset == "constant") ec.initial.preset = "sine";
        ec.initial.base.assign(ec.system.n, 0.0);
        ec.initial.base[0] = 1.0;
        ec.initial.amplitude.assign(ec.system.n, 0.1);
    }
    ec.delta = c.experiment.delta;
    ec.ratio_cap = c.experiment.ratio_cap;
    ec.gronwall_tol = c.experiment.gronwall_tol;
    ec.slope_lo = c.experiment.slope_lo;
    ec.slope_hi = c.experiment.slope_hi;
    ec.plateau_tol = c.experiment.plateau_tol;
    ec.mismatch = c.experiment.mismatch;
    ec.grid_budget = c.experiment.grid_budget;
    ec.saturation_tol = c.experiment.saturation_tol;
    ec.order_min = c.experiment.order_min;
    ec.ws_order_min = c.experiment.ws_order_min;
    ec.shock_gradient_factor = c.experiment.shock_gradient_factor;

    ec.target = default_target(ec.system.n, ec.initial);
    ec.has_target = true;

    ec.cloud.state_samples = c.experiment.samples;
    ec.cloud.state_box = c.experiment.state_box;
    ec.cloud.M = c.experiment.M;
    ec.cloud.U_max = c.experiment.U_max;
    ec.cloud.shells = c.experiment.shells;
    ec.cloud.pair_samples = c.experiment.pair_samples;
    ec.cloud.xt_points = c.experiment.xt_points;
    ec.cloud.T = c.experiment.T;
    ec.cloud.domain_length = c.solver.L;
    ec.cloud.seed = c.seed;

    ec.audit.h1_min_det = c.tolerances.h1_min_det;
    ec.audit.h2_residual_tol = c.tolerances.h2_residual;
    ec.audit.uniformity_spread_cap = c.tolerances.uniformity_spread_cap;
    ec.audit.hp2_directions = c.experiment.hp2_directions;
    ec.audit.growth_p = c.experiment.growth_p;
    ec.required_hypotheses = c.experiment.required;

    ec.seed = c.seed;
    return ec;
}

ExperimentReport run_solve_command(const RunConfig& c) {
    ExperimentReport rep;
    rep.kind = "solve";

    SystemSpec sys = build_system(c.system);
    const Grid1D grid = Grid1D::make(c.solver.N, c.solver.L);
    InitialData init = c.solver.initial;
    if (init.base.empty()) {
        init.base.assign(sys.n, 0.0);
        init.base[0] = 1.0;
    }
    const Field U0 = make_initial(grid, sys.n, init);

    SolverConfig sc;
    sc.epsilon = c.solver.epsilon;
    sc.cfl = c.solver.cfl;
    sc.scheme = (c.solver.scheme == "central") ? Scheme::Central : Scheme::LocalLaxFriedrichs;
    sc.integrator = c.solver.integrator == "rk4" ? Integrator::Rk4 : Integrator::SspRk2;
    sc.t_end = c.solver.t_end;
    sc.snapshots = c.solver.snapshots;
    sc.newton_tol = c.solver.newton_tol;
    sc.newton_iters = c.solver.newton_iters;

    const Trajectory traj = solve(sys, U0, sc);

    for (std::size_t k = 0; k < traj.fields.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "snapshot_%03zu", k);
        Series s{name, {"x"}, {}};
        for (int comp = 0; comp < sys.n; ++comp)
            s.columns.push_back("U_" + std::to_string(comp + 1));
        for (int i = 0; i < grid.N; ++i) {
            std::vector<double> row{grid.center(i)};
            for (int comp = 0; comp < sys.n; ++comp) row.push_back(traj.fields[k].U[i][comp]);
            s.rows.push_back(std::move(row));
        }
        rep.series.push_back(std::move(s));
        rep.metrics["t[" + std::to_string(k) + "]"] = traj.times[k];
    }
    rep.metrics["steps"] = static_cast<double>(traj.dt_log.size());
    rep.metrics["entropy_final"] =
        traj.fields.empty() ? 0.0 : total_entropy(sys, traj.fields.back());
    if (!traj.fields.empty()) {
        rep.figures.push_back({"solution", rep.series.back().name, "x",
                               rep.series.back().columns.size() > 2
                                   ? std::vector<std::string>{"U_1", "U_2"}
                                   : std::vector<std::string>{"U_1"},
                               false, ""});
    }
    if (traj.failure) {
        rep.verdict = "fail";
        rep.notes.push_back("solver failure at t=" + std::to_string(traj.failure->time) + ": " +
                            traj.failure->what);
    } else {
        rep.verdict = "pass";
    }
    return rep;
}

}  // namespace

int dispatch(const RunConfig& config) {
    ExperimentReport report;
    int code = 3;
    try {
        if (config.command == "audit") {
            report = run_hypothesis_audit(to_experiment_config(config));
        } else if (config.command == "solve") {
            report = run_solve_command(config);
        } else if (config.command == "identity") {
            report = run_identity_check(to_experiment_config(config));
        } else if (config.command == "stability") {
            report = run_stability(to_experiment_config(config));
        } else if (config.command == "convergence") {
            report = run_convergence(to_experiment_config(config));
        } else if (config.command == "weakstrong") {
            report = run_weak_strong(to_experiment_config(config));
        } else {
            throw ConfigError(".command: no command selected");
        }
        if (report.verdict == "pass" || report.verdict == "degenerate")
            code = 0;
        else if (report.verdict == "fail")
            code = 1;
        else if (report.verdict == "inconclusive")
            code = 2;
        else
            code = 3;
    } catch (const Error& e) {
        report.kind = config.command.empty() ? "unknown" : config.command;
        report.verdict = "error";
        report.notes.push_back(e.what());
        code = 3;
    }
    emit_outputs(report, config.echo_json, config.out_dir);
    return code;
}

}  // namespace relent
