#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ksbox/diagnostics.hpp"
#include "ksbox/verify.hpp"

namespace ksbox {

// Scalar potential template; the sweep scales it by each amplitude and seeds
// the vector run with its banded gradient.
struct InitialShape {
    enum class Kind { modes, random };
    Kind kind = Kind::modes;
    std::vector<std::pair<std::vector<int>, double>> modes;  // (index, weight) pairs
    std::uint64_t seed = 1;
    double decay_exponent = 3.0;
};

inline SpectralField build_potential(const DomainSpec& dom, const std::vector<int>& res,
                                     const InitialShape& shape, double amplitude) {
    if (shape.kind == InitialShape::Kind::random) {
        SpectralField f = random_field(dom, res, shape.seed, shape.decay_exponent);
        for (std::size_t i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] *= amplitude;
        return f;
    }
    if (shape.modes.empty()) throw std::invalid_argument("build_potential: empty mode list");
    SpectralField f = make_field(dom, res);
    for (const auto& [k, w] : shape.modes) {
        if (static_cast<int>(k.size()) != dom.n)
            throw std::invalid_argument("build_potential: mode rank does not match domain");
        std::vector<int> idx(k.size());
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (k[i] < 1 || k[i] > res[i])
                throw std::invalid_argument("build_potential: mode index outside the band");
            idx[i] = k[i] - 1;
        }
        f.coeffs.at(idx) += amplitude * w;
    }
    return f;
}

// Everything one sweep cell needs besides its lengths and amplitude.
struct CellConfig {
    std::vector<int> resolution;
    SolverConfig solver;
    double cs = 0.5;
    ExponentMode exponent_mode = ExponentMode::dimension_ncubed;
    double decay_cut = 1e-6;   // decayed when final energy < cut * E0
    double bound_cap = 1.01;   // or when the decay bound holds within this factor
};

struct SweepRow {
    std::vector<double> lengths;
    double amplitude = 0.0;
    double a = 0.0;
    double theta = 0.0;
    double e0 = 0.0;
    double predicted_rate = 0.0;
    double smallness_margin = 0.0;
    double fitted_rate = std::numeric_limits<double>::quiet_NaN();  // NaN: undefined
    double bound_violation = 0.0;
    std::string status;  // decayed | sustained | blowup | error
    std::string error;
};

// One simulated cell; never throws, failures land in the row's error field.
inline SweepRow classify_cell(const DomainSpec& dom, const InitialShape& shape, double amplitude,
                              const CellConfig& cell) {
    SweepRow row;
    row.lengths = dom.lengths;
    row.amplitude = amplitude;
    try {
        const auto cond = check_conditions(dom, 0.0, cell.cs, cell.exponent_mode);
        row.a = cond.a;
        row.theta = cond.theta;
        row.predicted_rate = cond.decay_rate;

        NonlinearOperator op(dom, cell.resolution);
        auto phi = build_potential(dom, cell.resolution, shape, amplitude);
        auto init = gradient_state(op, phi);
        auto run = simulate(op, true, init, cell.solver);

        row.e0 = delta_energy(run.records.front());
        row.smallness_margin = check_conditions(dom, row.e0, cell.cs, cell.exponent_mode).smallness_margin;

        const double final_e = delta_energy(run.records.back());
        if (row.e0 > 0.0) {
            try {
                auto rep = decay_fit(run.records, row.predicted_rate);
                row.fitted_rate = rep.fitted_rate;
                row.bound_violation = rep.bound_violation;
            } catch (const std::invalid_argument&) {
                // too few live records to fit; classification still proceeds
            }
        }
        // The bound path only exists in the decay regime (theta > 0).
        const bool bound_holds = cond.geometric_ok && row.bound_violation > 0.0 &&
                                 row.bound_violation <= cell.bound_cap;
        if (run.status == RunStatus::blowup) {
            row.status = "blowup";
        } else if (row.e0 == 0.0 || run.status == RunStatus::decayed_below_floor ||
                   final_e < cell.decay_cut * row.e0 || bound_holds) {
            row.status = "decayed";
        } else {
            row.status = "sustained";
        }
    } catch (const std::exception& e) {
        row.status = "error";
        row.error = e.what();
    }
    return row;
}

struct SweepSpec {
    std::vector<std::vector<double>> axis_lengths;  // per-axis candidate lengths
    std::vector<double> amplitudes;
    InitialShape shape;
    CellConfig cell;
    std::string csv_path;  // empty: in-memory only; sidecar is csv_path + ".jsonl"
};

namespace detail {

inline void sweep_cell(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    out << buf;
}

} // namespace detail

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, int n) {
    for (int i = 1; i <= n; ++i) out << 'L' << i << ',';
    out << "a,theta,E0,predicted_rate,smallness_margin,fitted_rate,bound_violation,status\n";
    for (const auto& r : rows) {
        for (double L : r.lengths) {
            detail::sweep_cell(out, L);
            out << ',';
        }
        detail::sweep_cell(out, r.a);
        out << ',';
        detail::sweep_cell(out, r.theta);
        out << ',';
        detail::sweep_cell(out, r.e0);
        out << ',';
        detail::sweep_cell(out, r.predicted_rate);
        out << ',';
        detail::sweep_cell(out, r.smallness_margin);
        out << ',';
        detail::sweep_cell(out, r.fitted_rate);
        out << ',';
        detail::sweep_cell(out, r.bound_violation);
        out << ',' << r.status << '\n';
    }
}

// Provenance sidecar: one JSON object per row with the full cell config.
inline void write_sweep_jsonl(std::ostream& out, const SweepSpec& spec,
                              const std::vector<SweepRow>& rows) {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.16e", v);
        return std::string(buf);
    };
    for (const auto& r : rows) {
        out << "{\"lengths\":[";
        for (std::size_t i = 0; i < r.lengths.size(); ++i)
            out << (i ? "," : "") << num(r.lengths[i]);
        out << "],\"amplitude\":" << num(r.amplitude);
        out << ",\"resolution\":[";
        for (std::size_t i = 0; i < spec.cell.resolution.size(); ++i)
            out << (i ? "," : "") << spec.cell.resolution[i];
        out << "],\"dt\":" << num(spec.cell.solver.dt) << ",\"t_end\":" << num(spec.cell.solver.t_end)
            << ",\"scheme\":\"" << to_string(spec.cell.solver.scheme) << "\""
            << ",\"record_every\":" << spec.cell.solver.record_every
            << ",\"cs\":" << num(spec.cell.cs) << ",\"exponent_mode\":\""
            << to_string(spec.cell.exponent_mode) << "\""
            << ",\"shape_seed\":" << spec.shape.seed << ",\"status\":\"" << r.status << "\"";
        if (!r.error.empty()) {
            out << ",\"error\":\"";
            for (char c : r.error) {
                if (c == '"' || c == '\\') out << '\\';
                out << c;
            }
            out << '"';
        }
        out << "}\n";
    }
}

// Cartesian product of per-axis lengths and amplitudes, amplitudes innermost,
// cells evaluated in parallel and emitted in deterministic index order.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    if (spec.axis_lengths.empty()) throw std::invalid_argument("run_sweep: no axes");
    for (const auto& ax : spec.axis_lengths) {
        if (ax.empty()) throw std::invalid_argument("run_sweep: empty length list");
        for (double L : ax)
            if (!(L > 0.0)) throw std::invalid_argument("run_sweep: lengths must be positive");
    }
    if (spec.amplitudes.empty()) throw std::invalid_argument("run_sweep: no amplitudes");
    const std::size_t n = spec.axis_lengths.size();
    if (spec.cell.resolution.size() != n)
        throw std::invalid_argument("run_sweep: resolution rank mismatch");

    std::size_t cells = spec.amplitudes.size();
    for (const auto& ax : spec.axis_lengths) cells *= ax.size();

    std::vector<SweepRow> rows(cells);
    detail::sample_map(cells, [&](std::size_t flat) {
        std::size_t rest = flat;
        const double amp = spec.amplitudes[rest % spec.amplitudes.size()];
        rest /= spec.amplitudes.size();
        std::vector<double> lengths(n);
        for (std::size_t ax = n; ax-- > 0;) {
            const auto& list = spec.axis_lengths[ax];
            lengths[ax] = list[rest % list.size()];
            rest /= list.size();
        }
        rows[flat] = classify_cell(DomainSpec{lengths}, spec.shape, amp, spec.cell);
    });

    if (!spec.csv_path.empty()) {
        std::ofstream csv(spec.csv_path);
        if (!csv) throw std::runtime_error("run_sweep: cannot open " + spec.csv_path);
        write_sweep_csv(csv, rows, static_cast<int>(n));
        std::ofstream jsonl(spec.csv_path + ".jsonl");
        if (!jsonl) throw std::runtime_error("run_sweep: cannot open " + spec.csv_path + ".jsonl");
        write_sweep_jsonl(jsonl, spec, rows);
    }
    return rows;
}

// Bisection on a monotone decay classifier; returns the last amplitude known
// to decay and the number of refinement steps.
template <class Pred>
inline std::pair<double, int> bisect_boundary(double lo, double hi, double tol, Pred&& decays) {
    if (!(lo < hi) || !(tol > 0.0)) throw std::invalid_argument("bisect_boundary: bad bracket");
    int steps = 0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (decays(mid))
            lo = mid;
        else
            hi = mid;
        ++steps;
    }
    return {lo, steps};
}

struct StabilityBoundary {
    double amp_star_empirical = 0.0;
    double amp_star_theory = 0.0;
    int bisection_steps = 0;
};

// Locates the empirical decay/no-decay amplitude boundary and compares it to
// the guaranteed threshold translated into amplitude via E0(amp) = amp^2 E0(1).
inline StabilityBoundary stability_boundary(const DomainSpec& dom, const InitialShape& shape,
                                            double amp_lo, double amp_hi, const CellConfig& cell,
                                            double tol) {
    if (!(amp_lo >= 0.0) || !(amp_lo < amp_hi))
        throw std::invalid_argument("stability_boundary: bad amplitude bracket");
    auto decays = [&](double amp) {
        const auto row = classify_cell(dom, shape, amp, cell);
        if (row.status == "error") throw std::runtime_error("stability_boundary: " + row.error);
        return row.status == "decayed";
    };
    if (!decays(amp_lo) || decays(amp_hi))
        throw std::runtime_error("stability_boundary: no bracket");

    StabilityBoundary out;
    auto [star, steps] = bisect_boundary(amp_lo, amp_hi, tol, decays);
    out.amp_star_empirical = star;
    out.bisection_steps = steps;

    const double unit_e0 = [&]() {
        NonlinearOperator op(dom, cell.resolution);
        auto comps = op.gradient_initial_data(build_potential(dom, cell.resolution, shape, 1.0));
        double acc = 0.0;
        for (const auto& c : comps) acc += norms(c).lap_sq;
        return acc;
    }();
    if (unit_e0 > 0.0) {
        const double e_star = max_initial_energy(dom, cell.cs, cell.exponent_mode);
        out.amp_star_theory = std::sqrt(e_star / unit_e0);
    }
    return out;
}

} // namespace ksbox
