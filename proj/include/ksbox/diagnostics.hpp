#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksbox/dynamics.hpp"

namespace ksbox {

struct DecayReport {
    double fitted_rate = 0.0;
    double predicted_rate = 0.0;
    // max over records of E(t) / (E(0) exp(-predicted_rate (t - t0))); 0 when E(0) = 0
    double bound_violation = 0.0;
    bool monotone = false;  // delta-energy totals non-increasing across records
};

// Least-squares slope of log delta-energy against time.  Records at or below
// 1e-28 are excluded: below that the log tracks roundoff, not the trajectory.
inline DecayReport decay_fit(const std::vector<EnergyRecord>& records, double predicted_rate) {
    std::vector<double> ts, ys;
    for (const auto& r : records) {
        const double e = delta_energy(r);
        if (e > 1e-28) {
            ts.push_back(r.time);
            ys.push_back(std::log(e));
        }
    }
    if (ts.size() < 3)
        throw std::invalid_argument("decay_fit: fewer than 3 records above the noise floor");

    double tbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        tbar += ts[i];
        ybar += ys[i];
    }
    tbar /= static_cast<double>(ts.size());
    ybar /= static_cast<double>(ts.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        num += (ts[i] - tbar) * (ys[i] - ybar);
        den += (ts[i] - tbar) * (ts[i] - tbar);
    }

    DecayReport rep;
    rep.predicted_rate = predicted_rate;
    rep.fitted_rate = den > 0.0 ? -num / den : 0.0;
    rep.monotone = true;
    for (std::size_t i = 1; i < records.size(); ++i)
        if (delta_energy(records[i]) > delta_energy(records[i - 1])) rep.monotone = false;
    const double e0 = delta_energy(records.front());
    const double t0 = records.front().time;
    if (e0 > 0.0) {
        for (const auto& r : records) {
            const double cap = e0 * std::exp(-predicted_rate * (r.time - t0));
            rep.bound_violation = std::max(rep.bound_violation, delta_energy(r) / cap);
        }
    }
    return rep;
}

struct DissipationLedger {
    double lhs = 0.0;        // final delta-energy plus the integrated bilap energy
    double rhs_bound = 0.0;  // initial delta-energy, the comparison reference
    double ratio = 0.0;      // empirical constant lhs / rhs_bound; 0 when the reference is 0
};

// Trapezoid quadrature on the record times; refine via record_every, not here.
inline DissipationLedger dissipation_ledger(const std::vector<EnergyRecord>& records,
                                            double initial_energy) {
    if (records.empty()) throw std::invalid_argument("dissipation_ledger: no records");
    double integral = 0.0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const double h = records[i].time - records[i - 1].time;
        integral += 0.5 * h * (records[i].total.bilap_sq + records[i - 1].total.bilap_sq);
    }
    DissipationLedger led;
    led.lhs = delta_energy(records.back()) + integral;
    led.rhs_bound = initial_energy;
    led.ratio = initial_energy > 0.0 ? led.lhs / initial_energy : 0.0;
    return led;
}

struct TwinDivergence {
    std::vector<double> times;
    std::vector<double> diff_sq;   // sum over components of the squared l2 difference
    std::vector<double> envelope;  // diff_sq(0) * exp(growth_constant * integrated dissipation)
    double growth_constant = 0.0;
    bool within_envelope = true;
};

// Runs the two trajectories in lockstep and compares the squared l2 distance
// against the integral envelope built from their own recorded dissipation.
// The envelope constant is 8 n cs^2 / theta with the configured embedding
// constant cs; theta comes from the operator's domain.
inline TwinDivergence twin_run_divergence(const NonlinearOperator& op, const GradientState& u0,
                                          const GradientState& v0, const SolverConfig& cfg,
                                          double embedding_constant) {
    const auto& dom = op.domain();
    const auto& res = op.resolution();
    auto matches = [&](const GradientState& s) {
        if (s.comps.size() != static_cast<std::size_t>(dom.n)) return false;
        for (const auto& c : s.comps)
            if (c.domain.lengths != dom.lengths || c.resolution != res) return false;
        return true;
    };
    if (!matches(u0) || !matches(v0))
        throw std::invalid_argument("twin_run_divergence: discretizations do not match");
    if (!(embedding_constant > 0.0) || !std::isfinite(embedding_constant))
        throw std::invalid_argument("twin_run_divergence: embedding constant must be positive");
    if (!(cfg.t_end >= 0) || !std::isfinite(cfg.t_end))
        throw std::invalid_argument("twin_run_divergence: bad t_end");
    if (cfg.record_every < 0)
        throw std::invalid_argument("twin_run_divergence: record_every must be >= 0");

    const double theta = damping_margin(dom).theta;
    if (!(theta > 0.0))
        throw std::invalid_argument("twin_run_divergence: needs a positive damping margin");

    TwinDivergence out;
    out.growth_constant =
        8.0 * static_cast<double>(dom.n) * embedding_constant * embedding_constant / theta;

    Integrator a(op, true, u0, cfg);
    Integrator b(op, true, v0, cfg);

    auto diff_l2 = [&]() {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.state().comps.size(); ++j) {
            SpectralField w = a.state().comps[j];
            const auto& cv = b.state().comps[j].coeffs;
            for (std::size_t i = 0; i < w.coeffs.size(); ++i) w.coeffs[i] -= cv[i];
            acc += norms(w).l2_sq;
        }
        return acc;
    };
    auto dissipation = [&]() {
        double acc = 0.0;
        for (const auto& c : a.state().comps) acc += norms(c).bilap_sq;
        for (const auto& c : b.state().comps) acc += norms(c).bilap_sq;
        return acc;
    };

    const double w0 = diff_l2();
    double accum = 0.0;  // trapezoid integral of the dissipation over record times
    double prev_t = a.time();
    double prev_d = dissipation();
    out.times.push_back(prev_t);
    out.diff_sq.push_back(w0);
    out.envelope.push_back(w0);

    auto record = [&]() {
        const double t = a.time();
        const double d = dissipation();
        accum += 0.5 * (t - prev_t) * (d + prev_d);
        prev_t = t;
        prev_d = d;
        out.times.push_back(t);
        out.diff_sq.push_back(diff_l2());
        out.envelope.push_back(w0 * std::exp(out.growth_constant * accum));
    };

    const std::size_t whole = static_cast<std::size_t>(std::floor(cfg.t_end / cfg.dt + 1e-9));
    const double remainder = cfg.t_end - static_cast<double>(whole) * cfg.dt;
    for (std::size_t s = 1; s <= whole; ++s) {
        a.step();
        b.step();
        if (cfg.record_every > 0 && s % static_cast<std::size_t>(cfg.record_every) == 0 &&
            !(s == whole && remainder <= 1e-12 * cfg.dt))
            record();
    }
    if (remainder > 1e-12 * cfg.dt) {
        SolverConfig tail = cfg;
        tail.dt = remainder;
        Integrator at(op, true, a.state(), tail);
        Integrator bt(op, true, b.state(), tail);
        at.step();
        bt.step();
        a.state() = at.state();
        b.state() = bt.state();
    }
    if (out.times.back() < a.time()) record();

    for (std::size_t i = 0; i < out.diff_sq.size(); ++i)
        if (out.diff_sq[i] > out.envelope[i] * (1.0 + 1e-9)) out.within_envelope = false;
    return out;
}

namespace detail {

inline void csv_cell(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    out << ',' << buf;
}

} // namespace detail

// One row per record: t, the five squared norms per component, then the totals.
inline void write_energy_csv(std::ostream& out, const std::vector<EnergyRecord>& records) {
    if (records.empty()) throw std::invalid_argument("write_energy_csv: no records");
    const std::size_t m = records.front().comps.size();
    out << 't';
    auto block = [&](const std::string& tag) {
        out << ",l2_" << tag << ",grad_" << tag << ",lap_" << tag << ",gradlap_" << tag
            << ",bilap_" << tag;
    };
    for (std::size_t j = 1; j <= m; ++j) block(std::to_string(j));
    block("total");
    out << '\n';
    for (const auto& r : records) {
        if (r.comps.size() != m)
            throw std::invalid_argument("write_energy_csv: ragged component counts");
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.16e", r.time);
        out << buf;
        auto cells = [&](const SpectralNorms& s) {
            detail::csv_cell(out, s.l2_sq);
            detail::csv_cell(out, s.grad_sq);
            detail::csv_cell(out, s.lap_sq);
            detail::csv_cell(out, s.gradlap_sq);
            detail::csv_cell(out, s.bilap_sq);
        };
        for (const auto& s : r.comps) cells(s);
        cells(r.total);
        out << '\n';
    }
}

inline void write_energy_csv(const std::string& path, const std::vector<EnergyRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_energy_csv: cannot open " + path);
    write_energy_csv(out, records);
}

} // namespace ksbox
