#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ksbox/experiments.hpp"
#include "ksbox/io.hpp"

namespace {

namespace fs = std::filesystem;
using jsonv = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

const jsonv& need(const jsonv& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(join(path, key) + ": missing");
    return it.value();
}

const jsonv* maybe(const jsonv& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    auto it = j.find(key);
    return it == j.end() ? nullptr : &it.value();
}

double num_at(const jsonv& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path + ": expected a finite number");
    return v;
}

int int_at(const jsonv& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
    return j.get<int>();
}

std::uint64_t uint_at(const jsonv& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
        throw ConfigError(path + ": expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

std::string str_at(const jsonv& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path + ": expected a string");
    return j.get<std::string>();
}

bool bool_at(const jsonv& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path + ": expected a boolean");
    return j.get<bool>();
}

std::vector<double> numlist_at(const jsonv& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(num_at(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<int> intlist_at(const jsonv& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(int_at(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

struct InitialCfg {
    std::string kind = "mode";
    bool random_shape = false;
    std::vector<std::pair<std::vector<int>, double>> modes;
    double decay_exponent = 3.0;
    double amplitude = 1.0;
    std::uint64_t seed = 1;
};

struct AppConfig {
    ksbox::DomainSpec dom;
    std::vector<int> res;
    InitialCfg init;
    ksbox::SolverConfig solver;
    bool cs_estimate = true;
    double cs = 0.0;
    ksbox::ExponentMode mode = ksbox::ExponentMode::dimension_ncubed;
    std::string out_dir;
    int verify_samples = 1000;
    int estimate_trials = 200;
    std::vector<std::vector<double>> axis_lengths;
    std::vector<double> amplitudes;
    double decay_cut = 1e-6;
    double bound_cap = 1.01;
};

int default_resolution(int n) {
    if (n <= 2) return 32;
    if (n == 3) return 16;
    return 8;
}

std::vector<std::pair<std::vector<int>, double>> parse_modes(const jsonv& params,
                                                             const std::string& path, int n) {
    std::vector<std::pair<std::vector<int>, double>> out;
    if (const jsonv* modes = maybe(params, path, "modes")) {
        const std::string mp = join(path, "modes");
        if (!modes->is_array() || modes->empty()) throw ConfigError(mp + ": expected a non-empty array");
        for (std::size_t i = 0; i < modes->size(); ++i) {
            const std::string ep = mp + "[" + std::to_string(i) + "]";
            const jsonv& entry = (*modes)[i];
            auto idx = intlist_at(need(entry, ep, "index"), join(ep, "index"));
            double w = 1.0;
            if (const jsonv* wj = maybe(entry, ep, "weight")) w = num_at(*wj, join(ep, "weight"));
            out.emplace_back(std::move(idx), w);
        }
    } else if (const jsonv* idx = maybe(params, path, "index")) {
        out.emplace_back(intlist_at(*idx, join(path, "index")), 1.0);
    } else {
        out.emplace_back(std::vector<int>(static_cast<std::size_t>(n), 1), 1.0);
    }
    return out;
}

AppConfig parse_config(const jsonv& root) {
    AppConfig cfg;

    const jsonv& dom = need(root, "", "domain");
    const int n = int_at(need(dom, "domain", "n"), "domain.n");
    auto lengths = numlist_at(need(dom, "domain", "lengths"), "domain.lengths");
    if (static_cast<int>(lengths.size()) != n)
        throw ConfigError("domain.lengths: expected " + std::to_string(n) + " entries");
    cfg.dom = ksbox::DomainSpec(lengths);
    try {
        ksbox::validate(cfg.dom);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("domain: ") + e.what());
    }

    if (const jsonv* res = maybe(root, "", "resolution")) {
        if (res->is_array()) {
            cfg.res = intlist_at(*res, "resolution");
            if (static_cast<int>(cfg.res.size()) != n)
                throw ConfigError("resolution: expected " + std::to_string(n) + " entries");
        } else {
            cfg.res.assign(static_cast<std::size_t>(n), int_at(*res, "resolution"));
        }
        for (int N : cfg.res)
            if (N < 1) throw ConfigError("resolution: entries must be >= 1");
    } else {
        cfg.res.assign(static_cast<std::size_t>(n), default_resolution(n));
    }

    if (const jsonv* init = maybe(root, "", "initial")) {
        if (const jsonv* kind = maybe(*init, "initial", "kind")) {
            cfg.init.kind = str_at(*kind, "initial.kind");
            if (cfg.init.kind != "mode" && cfg.init.kind != "random" &&
                cfg.init.kind != "scalar-potential")
                throw ConfigError("initial.kind: expected mode, random, or scalar-potential");
        }
        if (const jsonv* amp = maybe(*init, "initial", "amplitude"))
            cfg.init.amplitude = num_at(*amp, "initial.amplitude");
        if (const jsonv* seed = maybe(*init, "initial", "seed"))
            cfg.init.seed = uint_at(*seed, "initial.seed");
        const jsonv empty = jsonv::object();
        const jsonv* params = maybe(*init, "initial", "parameters");
        if (!params) params = &empty;
        if (cfg.init.kind == "random") {
            cfg.init.random_shape = true;
        } else if (cfg.init.kind == "scalar-potential") {
            if (const jsonv* rnd = maybe(*params, "initial.parameters", "random"))
                cfg.init.random_shape = bool_at(*rnd, "initial.parameters.random");
        }
        if (cfg.init.random_shape) {
            if (const jsonv* q = maybe(*params, "initial.parameters", "decay_exponent"))
                cfg.init.decay_exponent = num_at(*q, "initial.parameters.decay_exponent");
        } else {
            cfg.init.modes = parse_modes(*params, "initial.parameters", n);
        }
    } else {
        cfg.init.modes.emplace_back(std::vector<int>(static_cast<std::size_t>(n), 1), 1.0);
    }

    if (const jsonv* solver = maybe(root, "", "solver")) {
        if (const jsonv* v = maybe(*solver, "solver", "dt")) cfg.solver.dt = num_at(*v, "solver.dt");
        if (const jsonv* v = maybe(*solver, "solver", "t_end"))
            cfg.solver.t_end = num_at(*v, "solver.t_end");
        if (const jsonv* v = maybe(*solver, "solver", "scheme")) {
            const std::string s = str_at(*v, "solver.scheme");
            if (s == "etdrk4")
                cfg.solver.scheme = ksbox::Scheme::etdrk4;
            else if (s == "etd1")
                cfg.solver.scheme = ksbox::Scheme::etd1;
            else
                throw ConfigError("solver.scheme: expected etdrk4 or etd1");
        }
        if (const jsonv* v = maybe(*solver, "solver", "record_every")) {
            cfg.solver.record_every = int_at(*v, "solver.record_every");
            if (cfg.solver.record_every < 0) throw ConfigError("solver.record_every: must be >= 0");
        }
        if (const jsonv* v = maybe(*solver, "solver", "blowup_factor"))
            cfg.solver.blowup_factor = num_at(*v, "solver.blowup_factor");
        if (const jsonv* v = maybe(*solver, "solver", "energy_floor"))
            cfg.solver.energy_floor = num_at(*v, "solver.energy_floor");
        if (const jsonv* v = maybe(*solver, "solver", "nonlinear"))
            cfg.solver.nonlinear = bool_at(*v, "solver.nonlinear");
    }

    if (const jsonv* consts = maybe(root, "", "constants")) {
        if (const jsonv* cs = maybe(*consts, "constants", "cs")) {
            if (cs->is_string()) {
                if (cs->get<std::string>() != "estimate")
                    throw ConfigError("constants.cs: expected a number or \"estimate\"");
                cfg.cs_estimate = true;
            } else {
                cfg.cs = num_at(*cs, "constants.cs");
                if (!(cfg.cs > 0.0)) throw ConfigError("constants.cs: must be positive");
                cfg.cs_estimate = false;
            }
        }
        if (const jsonv* m = maybe(*consts, "constants", "exponent_mode")) {
            const std::string s = str_at(*m, "constants.exponent_mode");
            if (s == "dimension_ncubed")
                cfg.mode = ksbox::ExponentMode::dimension_ncubed;
            else if (s == "seven_cubed")
                cfg.mode = ksbox::ExponentMode::seven_cubed;
            else
                throw ConfigError("constants.exponent_mode: expected dimension_ncubed or seven_cubed");
        }
    }

    if (const jsonv* out = maybe(root, "", "output"))
        if (const jsonv* dir = maybe(*out, "output", "dir")) cfg.out_dir = str_at(*dir, "output.dir");

    if (const jsonv* ver = maybe(root, "", "verify"))
        if (const jsonv* s = maybe(*ver, "verify", "samples")) {
            cfg.verify_samples = int_at(*s, "verify.samples");
            if (cfg.verify_samples < 1) throw ConfigError("verify.samples: must be >= 1");
        }

    if (const jsonv* est = maybe(root, "", "estimate"))
        if (const jsonv* t = maybe(*est, "estimate", "trials")) {
            cfg.estimate_trials = int_at(*t, "estimate.trials");
            if (cfg.estimate_trials < 1) throw ConfigError("estimate.trials: must be >= 1");
        }

    if (const jsonv* sweep = maybe(root, "", "sweep")) {
        if (const jsonv* axes = maybe(*sweep, "sweep", "axis_lengths")) {
            if (!axes->is_array()) throw ConfigError("sweep.axis_lengths: expected an array");
            if (static_cast<int>(axes->size()) != n)
                throw ConfigError("sweep.axis_lengths: expected " + std::to_string(n) + " axis lists");
            for (std::size_t i = 0; i < axes->size(); ++i)
                cfg.axis_lengths.push_back(
                    numlist_at((*axes)[i], "sweep.axis_lengths[" + std::to_string(i) + "]"));
        }
        if (const jsonv* amps = maybe(*sweep, "sweep", "amplitudes"))
            cfg.amplitudes = numlist_at(*amps, "sweep.amplitudes");
        if (const jsonv* v = maybe(*sweep, "sweep", "decay_cut"))
            cfg.decay_cut = num_at(*v, "sweep.decay_cut");
        if (const jsonv* v = maybe(*sweep, "sweep", "bound_cap"))
            cfg.bound_cap = num_at(*v, "sweep.bound_cap");
    }

    return cfg;
}

ksbox::InitialShape to_shape(const InitialCfg& init) {
    ksbox::InitialShape shape;
    if (init.random_shape) {
        shape.kind = ksbox::InitialShape::Kind::random;
        shape.seed = init.seed;
        shape.decay_exponent = init.decay_exponent;
    } else {
        shape.kind = ksbox::InitialShape::Kind::modes;
        shape.modes = init.modes;
    }
    return shape;
}

// cs resolution; "estimate" runs 200 trials at the configured resolution and
// doubles the observed maximum.
double resolve_cs(const AppConfig& cfg, ksbox::EmbeddingEstimate* est_out = nullptr) {
    if (!cfg.cs_estimate) return cfg.cs;
    auto est = ksbox::estimate_embedding_constant(cfg.dom, cfg.res, 200, cfg.init.seed);
    if (est_out) *est_out = est;
    return est.working_value;
}

double gradient_delta_energy(const ksbox::NonlinearOperator& op, const ksbox::SpectralField& phi) {
    double acc = 0.0;
    for (const auto& c : op.gradient_initial_data(phi)) acc += ksbox::norms(c).lap_sq;
    return acc;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open " + p.string());
    out << text;
}

int cmd_check(const AppConfig& cfg, bool quiet, const std::string& out_dir) {
    ksbox::EmbeddingEstimate est;
    const double cs = resolve_cs(cfg, &est);
    ksbox::NonlinearOperator op(cfg.dom, cfg.res);
    const auto phi = ksbox::build_potential(cfg.dom, cfg.res, to_shape(cfg.init), cfg.init.amplitude);
    const double e0 = gradient_delta_energy(op, phi);
    const auto rep = ksbox::check_conditions(cfg.dom, e0, cs, cfg.mode);

    jsonv out;
    out["a"] = rep.a;
    out["theta"] = rep.theta;
    out["geometric_ok"] = rep.geometric_ok;
    out["e0"] = e0;
    out["smallness_margin"] = rep.smallness_margin;
    out["smallness_ok"] = rep.smallness_ok;
    out["decay_rate"] = rep.decay_rate;
    out["cs"] = cs;
    out["cs_estimated"] = cfg.cs_estimate;
    out["exponent_mode"] = ksbox::to_string(cfg.mode);

    if (!quiet) {
        std::printf("a = %.6g, theta = %.6g -> geometric condition %s\n", rep.a, rep.theta,
                    rep.geometric_ok ? "holds" : "fails");
        std::printf("E0 = %.6g, cs = %.6g%s, margin = %.6g -> smallness condition %s\n", e0, cs,
                    cfg.cs_estimate ? " (estimated)" : "", rep.smallness_margin,
                    rep.smallness_ok ? "holds" : "fails");
        if (rep.geometric_ok) std::printf("guaranteed decay rate: %.6g\n", rep.decay_rate);
    }
    std::cout << out.dump(2) << "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "check.json", out.dump(2) + "\n");
    }
    if (!rep.geometric_ok) return 2;
    if (!rep.smallness_ok) return 3;
    return 0;
}

int cmd_simulate(const AppConfig& cfg, bool quiet, const std::string& out_dir) {
    ksbox::NonlinearOperator op(cfg.dom, cfg.res);
    const auto phi = ksbox::build_potential(cfg.dom, cfg.res, to_shape(cfg.init), cfg.init.amplitude);
    ksbox::RunResult run;
    if (cfg.init.kind == "scalar-potential")
        run = ksbox::simulate(op, true, ksbox::gradient_state(op, phi), cfg.solver);
    else
        run = ksbox::simulate(op, phi, cfg.solver);

    const fs::path dir = out_dir.empty() ? fs::path("ks_out") : fs::path(out_dir);
    fs::create_directories(dir);
    ksbox::write_energy_csv((dir / "energy.csv").string(), run.records);

    bool finite = true;
    for (const auto& c : run.final_state.comps)
        for (std::size_t i = 0; i < c.coeffs.size(); ++i)
            if (!std::isfinite(c.coeffs[i])) finite = false;

    {
        std::ofstream log(dir / "run.jsonl");
        if (!log) throw std::runtime_error("cannot open run.jsonl");
        char buf[40];
        auto num = [&buf](double v) {
            std::snprintf(buf, sizeof buf, "%.16e", v);
            return std::string(buf);
        };
        for (const auto& rec : run.records)
            log << "{\"t\":" << num(rec.time) << ",\"delta_energy\":" << num(ksbox::delta_energy(rec))
                << ",\"h2\":" << num(ksbox::h2_sq(rec.total)) << ",\"curl\":" << num(rec.curl)
                << "}\n";
        log << "{\"status\":\"" << ksbox::to_string(run.status) << "\",\"steps\":" << run.steps_taken
            << ",\"components\":" << run.final_state.comps.size()
            << ",\"finite\":" << (finite ? "true" : "false") << "}\n";
    }

    jsonv decay;
    decay["predicted_rate"] = ksbox::predicted_decay_rate(cfg.dom);
    try {
        const auto fit = ksbox::decay_fit(run.records, ksbox::predicted_decay_rate(cfg.dom));
        decay["fitted_rate"] = fit.fitted_rate;
        decay["bound_violation"] = fit.bound_violation;
        decay["monotone"] = fit.monotone;
    } catch (const std::invalid_argument&) {
        decay["fitted_rate"] = nullptr;
        decay["bound_violation"] = nullptr;
        decay["monotone"] = nullptr;
    }
    write_text(dir / "decay.json", decay.dump(2) + "\n");

    for (std::size_t i = 0; i < run.final_state.comps.size(); ++i)
        ksbox::write_state((dir / ("state_" + std::to_string(i + 1) + ".txt")).string(),
                           run.final_state.comps[i]);

    if (!quiet) {
        std::printf("status: %s after %d steps (t = %.6g)\n", ksbox::to_string(run.status),
                    run.steps_taken, run.final_state.time);
        std::printf("final delta-energy: %.16e\n", ksbox::delta_energy(run.records.back()));
        if (!finite) std::printf("warning: final state contains non-finite coefficients\n");
        std::printf("outputs in %s: energy.csv run.jsonl decay.json state_*.txt\n",
                    dir.string().c_str());
    }
    return run.status == ksbox::RunStatus::blowup ? 4 : 0;
}

int cmd_sweep(const AppConfig& cfg, bool quiet, const std::string& out_dir) {
    ksbox::SweepSpec spec;
    if (cfg.axis_lengths.empty())
        for (double L : cfg.dom.lengths) spec.axis_lengths.push_back({L});
    else
        spec.axis_lengths = cfg.axis_lengths;
    spec.amplitudes = cfg.amplitudes.empty() ? std::vector<double>{cfg.init.amplitude} : cfg.amplitudes;
    spec.shape = to_shape(cfg.init);
    spec.cell.resolution = cfg.res;
    spec.cell.solver = cfg.solver;
    spec.cell.cs = resolve_cs(cfg);
    spec.cell.exponent_mode = cfg.mode;
    spec.cell.decay_cut = cfg.decay_cut;
    spec.cell.bound_cap = cfg.bound_cap;

    const fs::path dir = out_dir.empty() ? fs::path("ks_out") : fs::path(out_dir);
    fs::create_directories(dir);
    spec.csv_path = (dir / "sweep.csv").string();

    const auto rows = ksbox::run_sweep(spec);
    if (!quiet) {
        for (const auto& r : rows) {
            std::string lens;
            for (double L : r.lengths) lens += (lens.empty() ? "" : ",") + std::to_string(L);
            std::printf("L=(%s) amp=%.6g -> %s%s%s\n", lens.c_str(), r.amplitude, r.status.c_str(),
                        r.error.empty() ? "" : ": ", r.error.c_str());
        }
        std::printf("%zu cells -> %s\n", rows.size(), spec.csv_path.c_str());
    }
    return 0;
}

ksbox::SlackReport ode_suite(std::uint64_t seed, int samples) {
    std::vector<ksbox::detail::SlackSample> out(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        std::mt19937_64 rng(ksbox::detail::derive_seed(seed, 0x0de0000ull + static_cast<std::uint64_t>(i)));
        auto unit = [&]() { return 0.5 * (ksbox::detail::unit_draw(rng) + 1.0); };
        const double alpha = 0.5 + 4.5 * unit();
        const double k = 0.1 + 1.9 * unit();
        const int n_exp = 1 + static_cast<int>(rng() % 4);
        const double f0 = std::pow(0.95 * unit() * alpha / k, 1.0 / n_exp);
        const double t_end = 0.5 + 4.5 * unit();
        const auto c = ksbox::ode_comparison_check(alpha, k, n_exp, f0, t_end);
        const double slack = c.applicable ? (f0 - c.max_f) / f0 : -1.0;
        out[static_cast<std::size_t>(i)] = {slack, "sample " + std::to_string(i)};
    }
    return ksbox::detail::reduce_slacks("ode_comparison", out);
}

ksbox::SlackReport gronwall_suite(std::uint64_t seed, int samples) {
    std::vector<ksbox::detail::SlackSample> out(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        std::mt19937_64 rng(ksbox::detail::derive_seed(seed, 0x6e0000ull + static_cast<std::uint64_t>(i)));
        auto unit = [&]() { return 0.5 * (ksbox::detail::unit_draw(rng) + 1.0); };
        const double t_end = 0.5 + 2.5 * unit();
        std::vector<double> ts{0.0, t_end};
        for (int m = 0; m < 4; ++m) ts.push_back(t_end * unit());
        std::sort(ts.begin(), ts.end());
        ksbox::TimeSamples a, b;
        for (double t : ts) {
            a.emplace_back(t, -2.0 + 3.0 * unit());
            b.emplace_back(t, 2.0 * unit());
        }
        const double u0 = 0.1 + 1.9 * unit();
        const auto c = ksbox::gronwall_check(a, b, u0, t_end);
        const double scale = std::max(1.0, std::abs(c.bound_final));
        const double slack = (c.bound_final * (1.0 + 1e-8) + 1e-300 - c.u_final) / scale;
        out[static_cast<std::size_t>(i)] = {slack, "sample " + std::to_string(i)};
    }
    return ksbox::detail::reduce_slacks("gronwall", out);
}

int cmd_verify(const AppConfig& cfg, bool /*quiet*/, const std::string& out_dir) {
    std::vector<ksbox::SlackReport> reports;
    reports.push_back(ksbox::verify_steklov(cfg.dom, cfg.res, cfg.verify_samples, cfg.init.seed));
    reports.push_back(ksbox::verify_chain(cfg.dom, cfg.res, cfg.verify_samples, cfg.init.seed));
    reports.push_back(ksbox::verify_equivalences(cfg.dom, cfg.res, cfg.verify_samples, cfg.init.seed));
    reports.push_back(ode_suite(cfg.init.seed, 100));
    reports.push_back(gronwall_suite(cfg.init.seed, 50));

    ksbox::write_slack_lines(std::cout, reports);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream json_out(fs::path(out_dir) / "slacks.json");
        if (!json_out) throw std::runtime_error("cannot open slacks.json");
        ksbox::write_slack_json(json_out, reports);
    }
    for (const auto& r : reports)
        if (r.applicable && !r.pass) return 1;
    return 0;
}

int cmd_estimate(const AppConfig& cfg, bool quiet, const std::string& out_dir) {
    const auto est =
        ksbox::estimate_embedding_constant(cfg.dom, cfg.res, cfg.estimate_trials, cfg.init.seed);
    jsonv out;
    out["cs_hat"] = est.cs_hat;
    out["working_value"] = est.working_value;
    out["trials"] = est.trials;
    out["best_trial"] = est.best_trial;
    out["best_seed"] = est.best_seed;
    if (!quiet)
        std::printf("cs_hat = %.16e over %d trials (best trial %d), working value %.16e\n",
                    est.cs_hat, est.trials, est.best_trial, est.working_value);
    std::cout << out.dump(2) << "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "cs.json", out.dump(2) + "\n");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kuramoto-Sivashinsky box solver: condition checks, simulations, sweeps, and "
                 "inequality verification (KS_THREADS caps workers)"};
    app.require_subcommand(1);

    std::string config_path, out_override, seed_str;
    bool quiet = false;
    for (const auto& [name, desc] :
         std::vector<std::pair<const char*, const char*>>{
             {"check", "evaluate the geometric and smallness conditions"},
             {"simulate", "run one configured simulation and persist its outputs"},
             {"sweep", "classify a grid of domain lengths and amplitudes"},
             {"verify", "sampled certificates for the supporting inequalities"},
             {"estimate-cs", "sampled lower bound for the embedding constant"}}) {
        auto* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--seed", seed_str, "override initial.seed");
        sub->add_option("--out", out_override, "override output.dir");
        sub->add_flag("--quiet", quiet, "suppress human-readable output");
    }
    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "config error: cannot open " << config_path << "\n";
            return 1;
        }
        jsonv root;
        try {
            root = jsonv::parse(in);
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 1;
        }
        AppConfig cfg = parse_config(root);
        if (!seed_str.empty()) cfg.init.seed = std::stoull(seed_str);
        const std::string out_dir = !out_override.empty() ? out_override : cfg.out_dir;

        if (app.got_subcommand("check")) return cmd_check(cfg, quiet, out_dir);
        if (app.got_subcommand("simulate")) return cmd_simulate(cfg, quiet, out_dir);
        if (app.got_subcommand("sweep")) return cmd_sweep(cfg, quiet, out_dir);
        if (app.got_subcommand("verify")) return cmd_verify(cfg, quiet, out_dir);
        if (app.got_subcommand("estimate-cs")) return cmd_estimate(cfg, quiet, out_dir);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
