#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ksbox/spectral.hpp"

namespace ksbox {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// per-sample seed stream; stable across thread counts and platforms
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

// uniform in [-1, 1) from the top 53 bits; fixed mapping keeps outputs
// byte-identical across standard libraries
inline double unit_draw(std::mt19937_64& rng) {
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

inline unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("KS_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = static_cast<unsigned>(std::min<long>(cap, hw));
    }
    return hw;
}

// out-of-place parallel map over sample indices; per-index results land in
// caller-owned storage, so the reduction order never depends on thread count
template <class Fn>
void sample_map(std::size_t count, Fn&& fn) {
    const unsigned workers = std::min<std::size_t>(worker_count(), count ? count : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace detail

// Seeded band-limited field with algebraically damped tails:
// c_k = g_k / (1 + mu_k)^q, g_k uniform in [-1, 1).
inline SpectralField random_field(const DomainSpec& dom, const std::vector<int>& res,
                                  std::uint64_t seed, double decay_exponent = 3.0) {
    SpectralField f = make_field(dom, res);
    std::mt19937_64 rng(seed);
    detail::for_each_mode(dom, res, [&](std::size_t flat, double mu) {
        f.coeffs[flat] = detail::unit_draw(rng) / std::pow(1.0 + mu, decay_exponent);
    });
    return f;
}

struct SlackReport {
    std::string id;
    int samples = 0;
    double min_slack = 0.0;
    std::string worst_case;
    bool applicable = true;
    bool pass = false;  // applicable and min_slack >= -1e-10
};

inline constexpr double slack_tolerance = -1e-10;

// Normalized margins, (rhs - lhs) / rhs with rhs the dominating side; the
// inequalities are exact in the spectral representation, so anything below
// -1e-10 is a genuine failure, not roundoff.

inline double steklov_slack(const SpectralField& f) {
    const auto s = norms(f);
    const double a = steklov_constant(f.domain);
    return s.grad_sq > 0.0 ? (s.grad_sq - a * s.l2_sq) / s.grad_sq : 0.0;
}

inline std::array<double, 5> chain_slacks(const SpectralField& f) {
    const auto s = norms(f);
    const double a = steklov_constant(f.domain);
    auto rel = [](double rhs, double lhs) { return rhs > 0.0 ? (rhs - lhs) / rhs : 0.0; };
    return {rel(s.grad_sq, a * s.l2_sq), rel(s.lap_sq, a * a * s.l2_sq),
            rel(s.lap_sq, a * s.grad_sq), rel(s.bilap_sq, a * a * s.lap_sq),
            rel(s.bilap_sq / a, s.gradlap_sq)};
}

inline std::array<double, 2> equivalence_slacks(const SpectralField& f) {
    const auto s = norms(f);
    const double h2 = s.l2_sq + s.grad_sq + s.lap_sq;
    const double h4 = h2 + s.gradlap_sq + s.bilap_sq;
    auto rel = [](double rhs, double lhs) { return rhs > 0.0 ? (rhs - lhs) / rhs : 0.0; };
    return {rel(3.0 * s.lap_sq, h2), rel(5.0 * s.bilap_sq, h4)};
}

namespace detail {

struct SlackSample {
    double slack = 0.0;
    std::string tag;
};

inline SlackReport reduce_slacks(std::string id, const std::vector<SlackSample>& per_sample) {
    SlackReport rep;
    rep.id = std::move(id);
    rep.samples = static_cast<int>(per_sample.size());
    rep.min_slack = 0.0;
    bool first = true;
    for (const auto& s : per_sample) {
        if (first || s.slack < rep.min_slack) {
            rep.min_slack = s.slack;
            rep.worst_case = s.tag;
            first = false;
        }
    }
    rep.pass = rep.min_slack >= slack_tolerance;
    return rep;
}

} // namespace detail

// Poincare-type lower bound on the gradient: per-axis 1D restrictions with
// a_i = (pi/L_i)^2 plus the full form with a = sum_i (pi/L_i)^2.
inline SlackReport verify_steklov(const DomainSpec& dom, const std::vector<int>& res, int samples,
                                  std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("verify_steklov: samples must be >= 1");
    const std::size_t n = static_cast<std::size_t>(dom.n);
    std::vector<detail::SlackSample> out(static_cast<std::size_t>(samples));
    detail::sample_map(out.size(), [&](std::size_t i) {
        const std::uint64_t base = i * (n + 1);
        double best = 0.0;
        std::string tag;
        {
            auto f = random_field(dom, res, detail::derive_seed(seed, base));
            best = steklov_slack(f);
            tag = "sample " + std::to_string(i) + " full";
        }
        for (std::size_t ax = 0; ax < n; ++ax) {
            DomainSpec line{dom.lengths[ax]};
            auto f = random_field(line, {res[ax]}, detail::derive_seed(seed, base + 1 + ax));
            const double s = steklov_slack(f);
            if (s < best) {
                best = s;
                tag = "sample " + std::to_string(i) + " axis " + std::to_string(ax);
            }
        }
        out[i] = {best, std::move(tag)};
    });
    return detail::reduce_slacks("steklov", out);
}

inline SlackReport verify_chain(const DomainSpec& dom, const std::vector<int>& res, int samples,
                                std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("verify_chain: samples must be >= 1");
    std::vector<detail::SlackSample> out(static_cast<std::size_t>(samples));
    detail::sample_map(out.size(), [&](std::size_t i) {
        auto f = random_field(dom, res, detail::derive_seed(seed, i));
        const auto s = chain_slacks(f);
        std::size_t worst = 0;
        for (std::size_t j = 1; j < s.size(); ++j)
            if (s[j] < s[worst]) worst = j;
        out[i] = {s[worst], "sample " + std::to_string(i) + " link " + std::to_string(worst)};
    });
    return detail::reduce_slacks("chain", out);
}

// Norm equivalences need a > 1; domains without that margin are reported
// inapplicable rather than failed.
inline SlackReport verify_equivalences(const DomainSpec& dom, const std::vector<int>& res,
                                       int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("verify_equivalences: samples must be >= 1");
    if (!(steklov_constant(dom) > 1.0)) {
        SlackReport rep;
        rep.id = "equivalences";
        rep.applicable = false;
        rep.worst_case = "requires a > 1";
        return rep;
    }
    std::vector<detail::SlackSample> out(static_cast<std::size_t>(samples));
    detail::sample_map(out.size(), [&](std::size_t i) {
        auto f = random_field(dom, res, detail::derive_seed(seed, i));
        const auto s = equivalence_slacks(f);
        const bool h4 = s[1] < s[0];
        out[i] = {h4 ? s[1] : s[0],
                  "sample " + std::to_string(i) + (h4 ? " h4" : " h2")};
    });
    return detail::reduce_slacks("equivalences", out);
}

struct EmbeddingEstimate {
    double cs_hat = 0.0;         // max observed sup|f| / ||lap^2 f||, a lower bound
    double working_value = 0.0;  // 2 * cs_hat; safety factor for the smallness check
    int trials = 0;
    int best_trial = -1;
    std::uint64_t best_seed = 0;
};

inline EmbeddingEstimate estimate_embedding_constant(const DomainSpec& dom,
                                                     const std::vector<int>& res, int trials,
                                                     std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("estimate_embedding_constant: trials must be >= 1");
    std::vector<double> ratio(static_cast<std::size_t>(trials), 0.0);
    std::vector<std::uint64_t> used(static_cast<std::size_t>(trials), 0);
    detail::sample_map(ratio.size(), [&](std::size_t t) {
        std::uint64_t s = detail::derive_seed(seed, t);
        for (;;) {
            auto f = random_field(dom, res, s);
            const double den = norms(f).bilap_sq;
            if (den > 0.0) {
                ratio[t] = sup_norm(f, 8) / std::sqrt(den);
                used[t] = s;
                return;
            }
            s = detail::splitmix64(s);  // degenerate draw; take the next stream
        }
    });
    EmbeddingEstimate est;
    est.trials = trials;
    for (std::size_t t = 0; t < ratio.size(); ++t) {
        if (ratio[t] > est.cs_hat) {
            est.cs_hat = ratio[t];
            est.best_trial = static_cast<int>(t);
            est.best_seed = used[t];
        }
    }
    est.working_value = 2.0 * est.cs_hat;
    return est;
}

struct OdeCheck {
    double max_f = 0.0;
    bool pass = false;
    bool applicable = false;
};

// Comparison dynamics f' = -(alpha - k f^n) f; under alpha > k f0^n the
// solution must stay strictly below its initial value for all t > 0.
inline OdeCheck ode_comparison_check(double alpha, double k, int n_exp, double f0, double t_end) {
    OdeCheck r;
    if (!(k > 0.0) || !(f0 > 0.0) || n_exp < 1 || !(t_end > 0.0)) return r;
    if (!(alpha - k * std::pow(f0, n_exp) > 0.0)) return r;
    r.applicable = true;

    const double dt = std::min(1e-3, t_end / 1e4);
    auto rhs = [&](double f) { return -(alpha - k * std::pow(f, n_exp)) * f; };
    double f = f0;
    double t = 0.0;
    r.max_f = -std::numeric_limits<double>::infinity();
    while (t < t_end - 1e-12 * t_end) {
        const double h = std::min(dt, t_end - t);
        const double k1 = rhs(f);
        const double k2 = rhs(f + 0.5 * h * k1);
        const double k3 = rhs(f + 0.5 * h * k2);
        const double k4 = rhs(f + h * k3);
        f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        r.max_f = std::max(r.max_f, f);
    }
    r.pass = r.max_f < f0;
    return r;
}

// Piecewise-linear time samples (t strictly increasing, constant outside).
using TimeSamples = std::vector<std::pair<double, double>>;

namespace detail {

inline double pl_eval(const TimeSamples& s, double t) {
    if (s.empty()) throw std::invalid_argument("gronwall_check: empty sample list");
    if (t <= s.front().first) return s.front().second;
    if (t >= s.back().first) return s.back().second;
    std::size_t hi = 1;
    while (s[hi].first < t) ++hi;
    const auto& [t0, v0] = s[hi - 1];
    const auto& [t1, v1] = s[hi];
    const double w = (t - t0) / (t1 - t0);
    return v0 + w * (v1 - v0);
}

// exact integral of the piecewise-linear interpolant from 0 to t
inline double pl_integral(const TimeSamples& s, double t) {
    double acc = 0.0, prev_t = 0.0;
    double prev_v = pl_eval(s, 0.0);
    for (const auto& [tb, vb] : s) {
        if (tb <= 0.0) continue;
        const double seg_t = std::min(tb, t);
        if (seg_t > prev_t) {
            const double v_end = pl_eval(s, seg_t);
            acc += 0.5 * (seg_t - prev_t) * (prev_v + v_end);
            prev_t = seg_t;
            prev_v = v_end;
        }
        if (tb >= t) break;
    }
    if (t > prev_t) acc += (t - prev_t) * pl_eval(s, t);  // constant extension
    return acc;
}

} // namespace detail

struct GronwallCheck {
    double u_final = 0.0;
    double bound_final = 0.0;
    bool pass = false;
};

// Equality case u' = a(t)u + b(t) against the integral bound
// u0 e^{A(t)} + int_0^t e^{A(t)-A(s)} b(s) ds with A the exact integral of a.
// Steps align with breakpoints so both integrators see smooth pieces.
inline GronwallCheck gronwall_check(const TimeSamples& a, const TimeSamples& b, double u0,
                                    double t_end) {
    if (a.empty() || b.empty()) throw std::invalid_argument("gronwall_check: empty sample list");
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("gronwall_check: bad t_end");
    for (const auto* s : {&a, &b})
        for (std::size_t i = 1; i < s->size(); ++i)
            if (!((*s)[i].first > (*s)[i - 1].first))
                throw std::invalid_argument("gronwall_check: sample times must increase");

    std::vector<double> grid{0.0, t_end};
    for (const auto* s : {&a, &b})
        for (const auto& [t, v] : *s)
            if (t > 0.0 && t < t_end) grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const double h_target = std::min(1e-3, t_end / 1e3);
    GronwallCheck r;
    double u = u0;
    double integ = 0.0;  // int_0^t e^{-A(s)} b(s) ds, Simpson per substep
    r.pass = true;

    auto fa = [&](double t) { return detail::pl_eval(a, t); };
    auto fb = [&](double t) { return detail::pl_eval(b, t); };
    auto expo = [&](double t) { return detail::pl_integral(a, t); };

    auto check = [&](double t) {
        const double bound = std::exp(expo(t)) * (u0 + integ);
        if (u > bound * (1.0 + 1e-8) + 1e-300) r.pass = false;
        r.u_final = u;
        r.bound_final = bound;
    };
    check(0.0);

    for (std::size_t g = 1; g < grid.size(); ++g) {
        const double span = grid[g] - grid[g - 1];
        const int sub = std::max(1, static_cast<int>(std::ceil(span / h_target)));
        const double h = span / sub;
        for (int s = 0; s < sub; ++s) {
            const double t0 = grid[g - 1] + s * h;
            const double tm = t0 + 0.5 * h;
            const double t1 = t0 + h;
            const double k1 = fa(t0) * u + fb(t0);
            const double u2 = u + 0.5 * h * k1;
            const double k2 = fa(tm) * u2 + fb(tm);
            const double u3 = u + 0.5 * h * k2;
            const double k3 = fa(tm) * u3 + fb(tm);
            const double u4 = u + h * k3;
            const double k4 = fa(t1) * u4 + fb(t1);
            u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            integ += h / 6.0 *
                     (std::exp(-expo(t0)) * fb(t0) + 4.0 * std::exp(-expo(tm)) * fb(tm) +
                      std::exp(-expo(t1)) * fb(t1));
            check(t1);
        }
    }
    return r;
}

// Line-oriented report next to a machine-readable JSON array; the JSON
// objects carry exactly {id, samples, min_slack, pass}.
inline void write_slack_lines(std::ostream& out, const std::vector<SlackReport>& reports) {
    for (const auto& r : reports) {
        if (!r.applicable) {
            out << r.id << ": inapplicable (" << r.worst_case << ")\n";
            continue;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.16e", r.min_slack);
        out << r.id << ": samples=" << r.samples << " min_slack=" << buf
            << (r.pass ? " pass" : " FAIL");
        if (!r.worst_case.empty()) out << " (worst: " << r.worst_case << ")";
        out << '\n';
    }
}

inline void write_slack_json(std::ostream& out, const std::vector<SlackReport>& reports) {
    out << "[";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.16e", r.min_slack);
        out << (i ? "," : "") << "\n  {\"id\":\"" << r.id << "\",\"samples\":" << r.samples
            << ",\"min_slack\":" << buf << ",\"pass\":" << (r.pass ? "true" : "false") << "}";
    }
    out << "\n]\n";
}

} // namespace ksbox
