#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ksbox/galerkin.hpp"

namespace ksbox {

enum class Scheme { etdrk4, etd1 };
enum class RunStatus { completed, decayed_below_floor, blowup };

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::decayed_below_floor: return "decayed_below_floor";
        case RunStatus::blowup: return "blowup";
    }
    return "unknown";
}

inline const char* to_string(Scheme s) { return s == Scheme::etdrk4 ? "etdrk4" : "etd1"; }

struct SolverConfig {
    double dt = 1e-2;
    double t_end = 1.0;
    Scheme scheme = Scheme::etdrk4;
    int record_every = 1;         // snapshot cadence in steps; 0 disables interior records
    double blowup_factor = 1e6;   // stop once delta-energy exceeds factor * E0
    double energy_floor = 1e-30;  // stop once delta-energy falls below this
    bool nonlinear = true;        // false: pure linear flow (diagnostics)
};

// One or several sine-band components advanced in lockstep: a scalar run
// carries a single component, a vector run carries one per axis.
struct GradientState {
    std::vector<SpectralField> comps;
    double time = 0.0;
    bool gradient_consistent = false;  // set when built from a scalar potential
};

struct EnergyRecord {
    double time = 0.0;
    std::vector<SpectralNorms> comps;  // one entry per state component
    SpectralNorms total;               // componentwise sums
    double curl = 0.0;                 // banded curl residual; 0 for scalar runs
};

inline double h2_sq(const SpectralNorms& s) { return s.l2_sq + s.grad_sq + s.lap_sq; }

// The decay estimates track the squared lap norm; "energy" below means this.
inline double delta_energy(const EnergyRecord& r) { return r.total.lap_sq; }

struct RunResult {
    RunStatus status = RunStatus::completed;
    std::vector<EnergyRecord> records;
    GradientState final_state;
    std::size_t steps_taken = 0;
};

namespace detail {

// phi_j(z) = (e^z - sum_{m<j} z^m/m!) / z^j, j = 1..3.  Taylor series near 0,
// expm1-based closed forms elsewhere (no cancellation for z < 0 since the
// polynomial part then dominates).
inline double phi1(double z) {
    if (std::abs(z) < 0.5) {
        double term = 1.0, acc = 0.0;
        for (int m = 0; m < 20; ++m) {
            if (m > 0) term *= z / m;
            acc += term / (m + 1);
        }
        return acc;
    }
    return std::expm1(z) / z;
}

inline double phi2(double z) {
    if (std::abs(z) < 0.5) {
        double term = 1.0, acc = 0.0;
        for (int m = 0; m < 20; ++m) {
            if (m > 0) term *= z / m;
            acc += term / ((m + 1) * (m + 2));
        }
        return acc;
    }
    return (std::expm1(z) - z) / (z * z);
}

inline double phi3(double z) {
    if (std::abs(z) < 0.5) {
        double term = 1.0, acc = 0.0;
        for (int m = 0; m < 20; ++m) {
            if (m > 0) term *= z / m;
            acc += term / ((m + 1) * (m + 2) * (m + 3));
        }
        return acc;
    }
    return (std::expm1(z) - z - 0.5 * z * z) / (z * z * z);
}

} // namespace detail

// Exponential time differencing for  c_k' = s_k c_k + [N(u)]_k  with the
// diagonal symbol s_k = mu_k - mu_k^2.  Coefficient tensors depend only on
// dt and the mode lattice, so they are precomputed per integrator.
class Integrator {
public:
    Integrator(const NonlinearOperator& op, bool system, GradientState init, const SolverConfig& cfg)
        : op_(&op), system_(system), cfg_(cfg), state_(std::move(init)) {
        if (!(cfg.dt > 0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("solver: dt must be positive");
        if (!(cfg.blowup_factor > 1)) throw std::invalid_argument("solver: blowup_factor must exceed 1");
        const int want = system ? op.domain().n : 1;
        if (static_cast<int>(state_.comps.size()) != want)
            throw std::invalid_argument("solver: component count does not match run kind");
        const auto& res = op.resolution();
        exp_full_ = Tensor(res);
        exp_half_ = Tensor(res);
        q_half_ = Tensor(res);
        f1_ = Tensor(res);
        f2_ = Tensor(res);
        f3_ = Tensor(res);
        q1_ = Tensor(res);
        detail::for_each_mode(op.domain(), res, [&](std::size_t i, double mu) {
            const double s = mu - mu * mu;
            const double z = cfg.dt * s;
            exp_full_[i] = std::exp(z);
            exp_half_[i] = std::exp(0.5 * z);
            q_half_[i] = 0.5 * cfg.dt * detail::phi1(0.5 * z);
            const double p1 = detail::phi1(z), p2 = detail::phi2(z), p3 = detail::phi3(z);
            f1_[i] = cfg.dt * (p1 - 3.0 * p2 + 4.0 * p3);
            f2_[i] = cfg.dt * (p2 - 2.0 * p3);
            f3_[i] = cfg.dt * (4.0 * p3 - p2);
            q1_[i] = cfg.dt * p1;
        });
    }

    const GradientState& state() const { return state_; }
    GradientState& state() { return state_; }
    double time() const { return state_.time; }
    double dt() const { return cfg_.dt; }

    void step() {
        if (cfg_.scheme == Scheme::etdrk4)
            step_etdrk4();
        else
            step_etd1();
        state_.time += cfg_.dt;
    }

    EnergyRecord snapshot() const {
        EnergyRecord r;
        r.time = state_.time;
        for (const auto& c : state_.comps) {
            const auto s = norms(c);
            r.comps.push_back(s);
            r.total.l2_sq += s.l2_sq;
            r.total.grad_sq += s.grad_sq;
            r.total.lap_sq += s.lap_sq;
            r.total.gradlap_sq += s.gradlap_sq;
            r.total.bilap_sq += s.bilap_sq;
        }
        r.curl = state_.comps.size() > 1 ? op_->curl_residual(state_.comps) : 0.0;
        return r;
    }

    double energy() const {
        double e = 0.0;
        for (const auto& c : state_.comps) e += norms(c).lap_sq;
        return e;
    }

private:
    using State = std::vector<Tensor>;

    State eval_rhs(const std::vector<SpectralField>& comps) const {
        State out;
        out.reserve(comps.size());
        if (!cfg_.nonlinear) {
            for (const auto& c : comps) out.emplace_back(Tensor(op_->resolution()));
            return out;
        }
        if (system_) {
            auto r = op_->system_rhs(comps);
            for (auto& f : r) out.push_back(std::move(f.coeffs));
        } else {
            out.push_back(op_->scalar_rhs(comps[0]).coeffs);
        }
        return out;
    }

    static void axpy_inplace(Tensor& dst, const Tensor& mulA, const Tensor& a, const Tensor& mulB,
                             const Tensor& b) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = mulA[i] * a[i] + mulB[i] * b[i];
    }

    std::vector<SpectralField> wrap(const State& t) const {
        std::vector<SpectralField> f;
        f.reserve(t.size());
        for (const auto& c : t) f.push_back(SpectralField{op_->domain(), op_->resolution(), c});
        return f;
    }

    void step_etd1() {
        const auto n1 = eval_rhs(state_.comps);
        for (std::size_t j = 0; j < state_.comps.size(); ++j) {
            Tensor& c = state_.comps[j].coeffs;
            for (std::size_t i = 0; i < c.size(); ++i)
                c[i] = exp_full_[i] * c[i] + q1_[i] * n1[j][i];
        }
    }

    void step_etdrk4() {
        const std::size_t m = state_.comps.size();
        const auto n1 = eval_rhs(state_.comps);

        State a(m, Tensor(op_->resolution()));
        for (std::size_t j = 0; j < m; ++j)
            axpy_inplace(a[j], exp_half_, state_.comps[j].coeffs, q_half_, n1[j]);
        const auto n2 = eval_rhs(wrap(a));

        State b(m, Tensor(op_->resolution()));
        for (std::size_t j = 0; j < m; ++j)
            axpy_inplace(b[j], exp_half_, state_.comps[j].coeffs, q_half_, n2[j]);
        const auto n3 = eval_rhs(wrap(b));

        State c(m, Tensor(op_->resolution()));
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < c[j].size(); ++i)
                c[j][i] = exp_half_[i] * a[j][i] + q_half_[i] * (2.0 * n3[j][i] - n1[j][i]);
        }
        const auto n4 = eval_rhs(wrap(c));

        for (std::size_t j = 0; j < m; ++j) {
            Tensor& u = state_.comps[j].coeffs;
            for (std::size_t i = 0; i < u.size(); ++i)
                u[i] = exp_full_[i] * u[i] + f1_[i] * n1[j][i] + 2.0 * f2_[i] * (n2[j][i] + n3[j][i]) +
                       f3_[i] * n4[j][i];
        }
    }

    const NonlinearOperator* op_;
    bool system_;
    SolverConfig cfg_;
    GradientState state_;
    Tensor exp_full_, exp_half_, q_half_, f1_, f2_, f3_, q1_;
};

// Fixed-step run to t_end (a shortened final step covers any remainder).
// Records are taken at t = 0, every `record_every` steps, and at the end.
inline RunResult simulate(const NonlinearOperator& op, bool system, GradientState init,
                          const SolverConfig& cfg) {
    if (!(cfg.t_end >= 0) || !std::isfinite(cfg.t_end)) throw std::invalid_argument("solver: bad t_end");
    if (cfg.dt > cfg.t_end && cfg.t_end > 0) throw std::invalid_argument("solver: dt exceeds t_end");
    if (cfg.record_every < 0) throw std::invalid_argument("solver: record_every must be >= 0");

    RunResult out;
    const std::size_t whole = static_cast<std::size_t>(std::floor(cfg.t_end / cfg.dt + 1e-9));
    const double remainder = cfg.t_end - static_cast<double>(whole) * cfg.dt;

    Integrator intg(op, system, std::move(init), cfg);
    out.records.push_back(intg.snapshot());
    const double e0 = delta_energy(out.records.front());
    const double ceiling = e0 > 0 ? cfg.blowup_factor * e0 : std::numeric_limits<double>::infinity();
    const bool floor_active = e0 >= cfg.energy_floor;  // zero data stays zero, status completed

    auto check_state = [&](double e) {
        if (!std::isfinite(e) || e > ceiling) {
            out.status = RunStatus::blowup;
            return false;
        }
        if (floor_active && e < cfg.energy_floor) {
            out.status = RunStatus::decayed_below_floor;
            return false;
        }
        return true;
    };

    bool stopped = false;
    for (std::size_t s = 1; s <= whole && !stopped; ++s) {
        intg.step();
        ++out.steps_taken;
        const double e = intg.energy();
        if (!check_state(e)) {
            stopped = true;
        } else if (cfg.record_every > 0 && s % static_cast<std::size_t>(cfg.record_every) == 0 &&
                   !(s == whole && remainder <= 1e-12 * cfg.dt)) {
            out.records.push_back(intg.snapshot());
        }
    }
    if (!stopped && remainder > 1e-12 * cfg.dt) {
        SolverConfig tail = cfg;
        tail.dt = remainder;
        Integrator last(op, system, intg.state(), tail);
        last.step();
        ++out.steps_taken;
        intg.state() = last.state();
        check_state(intg.energy());
    }
    if (out.steps_taken > 0) out.records.push_back(intg.snapshot());
    out.final_state = intg.state();
    return out;
}

// Scalar run: a single component evolved under the scalar quadratic term.
inline RunResult simulate(const NonlinearOperator& op, const SpectralField& phi0,
                          const SolverConfig& cfg) {
    GradientState init;
    init.comps.push_back(phi0);
    return simulate(op, false, std::move(init), cfg);
}

// Vector run seeded by the banded gradient of a scalar potential.
inline GradientState gradient_state(const NonlinearOperator& op, const SpectralField& phi0) {
    GradientState s;
    s.comps = op.gradient_initial_data(phi0);
    s.gradient_consistent = true;
    return s;
}

} // namespace ksbox
