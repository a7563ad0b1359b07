#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksbox {

inline constexpr double pi = 3.14159265358979323846;

// Axis-aligned box (0,L_1) x ... x (0,L_n).
struct DomainSpec {
    int n = 0;
    std::vector<double> lengths;

    DomainSpec() = default;
    DomainSpec(std::initializer_list<double> Ls) : n(static_cast<int>(Ls.size())), lengths(Ls) {}
    explicit DomainSpec(std::vector<double> Ls) : n(static_cast<int>(Ls.size())), lengths(std::move(Ls)) {}
};

inline void validate(const DomainSpec& dom) {
    if (dom.n < 1 || dom.n > 7) throw std::invalid_argument("DomainSpec: n must be in [1,7]");
    if (static_cast<int>(dom.lengths.size()) != dom.n)
        throw std::invalid_argument("DomainSpec: lengths/n mismatch");
    for (double L : dom.lengths)
        if (!(L > 0.0) || !std::isfinite(L))
            throw std::invalid_argument("DomainSpec: lengths must be positive and finite");
}

// Multiplier p in the small-data condition: the worst-case constant fixes
// p = 7^3; the dimension-dependent variant uses p = n^3.
enum class ExponentMode { seven_cubed, dimension_ncubed };

inline std::string to_string(ExponentMode m) {
    return m == ExponentMode::seven_cubed ? "seven_cubed" : "dimension_ncubed";
}

inline double exponent_multiplier(ExponentMode mode, int n) {
    if (mode == ExponentMode::seven_cubed) return 343.0;
    return static_cast<double>(n) * n * n;
}

// Sharp constant a = sum_i pi^2 / L_i^2 in a ||v||^2 <= ||grad v||^2 for the
// mixed Dirichlet/Navier sine basis on the box.
inline double steklov_constant(const DomainSpec& dom) {
    validate(dom);
    double a = 0.0;
    for (double L : dom.lengths) a += pi * pi / (L * L);
    return a;
}

struct DampingMargin {
    double a = 0.0;
    double theta = 0.0;      // 1 - 1/a
    bool geometric_ok = false;  // theta > 0
};

// theta > 0 is the geometric condition: the fourth-order dissipation
// dominates the backward heat term with margin theta on every mode.
inline DampingMargin damping_margin(const DomainSpec& dom) {
    DampingMargin r;
    r.a = steklov_constant(dom);
    r.theta = 1.0 - 1.0 / r.a;
    r.geometric_ok = r.theta > 0.0;
    return r;
}

struct SmallnessMargin {
    double margin = 0.0;  // theta - (2 cs^2 p / (a theta)) E0
    bool ok = false;      // margin > 0
};

// Small-data condition at Laplacian energy E0 = sum_j ||lap u_j(0)||^2.
// Requires a damping margin (theta > 0) and a positive embedding constant.
inline SmallnessMargin smallness_check(const DomainSpec& dom, double E0, double cs,
                                       ExponentMode mode = ExponentMode::dimension_ncubed) {
    if (!(cs > 0.0)) throw std::invalid_argument("smallness_check: cs must be positive");
    if (!(E0 >= 0.0)) throw std::invalid_argument("smallness_check: E0 must be nonnegative");
    DampingMargin dm = damping_margin(dom);
    if (!(dm.theta > 0.0)) throw std::invalid_argument("smallness_check: theta <= 0, no decay regime");
    const double p = exponent_multiplier(mode, dom.n);
    SmallnessMargin r;
    r.margin = dm.theta - (2.0 * cs * cs * p / (dm.a * dm.theta)) * E0;
    r.ok = r.margin > 0.0;
    return r;
}

// Largest E0 with zero smallness margin: E* = a theta^2 / (2 cs^2 p).
inline double max_initial_energy(const DomainSpec& dom, double cs,
                                 ExponentMode mode = ExponentMode::dimension_ncubed) {
    if (!(cs > 0.0)) throw std::invalid_argument("max_initial_energy: cs must be positive");
    DampingMargin dm = damping_margin(dom);
    if (!(dm.theta > 0.0)) throw std::invalid_argument("max_initial_energy: theta <= 0, no decay regime");
    const double p = exponent_multiplier(mode, dom.n);
    return dm.a * dm.theta * dm.theta / (2.0 * cs * cs * p);
}

// Full condition report for one domain and one initial energy.
struct ConditionReport {
    double a = 0.0;
    double theta = 0.0;
    bool geometric_ok = false;
    double smallness_margin = 0.0;
    bool smallness_ok = false;
    double decay_rate = 0.0;  // a^2 theta / 2, meaningful when geometric_ok
    double cs_used = 0.0;
    ExponentMode exponent_mode = ExponentMode::dimension_ncubed;
};

inline ConditionReport check_conditions(const DomainSpec& dom, double E0, double cs,
                                        ExponentMode mode = ExponentMode::dimension_ncubed) {
    ConditionReport rep;
    DampingMargin dm = damping_margin(dom);
    rep.a = dm.a;
    rep.theta = dm.theta;
    rep.geometric_ok = dm.geometric_ok;
    rep.decay_rate = dm.a * dm.a * dm.theta / 2.0;
    rep.cs_used = cs;
    rep.exponent_mode = mode;
    if (dm.geometric_ok) {
        SmallnessMargin sm = smallness_check(dom, E0, cs, mode);
        rep.smallness_margin = sm.margin;
        rep.smallness_ok = sm.ok;
    } else {
        // Reported as failed, not fatal: callers decide how to proceed.
        rep.smallness_margin = -std::numeric_limits<double>::infinity();
        rep.smallness_ok = false;
    }
    return rep;
}

inline double predicted_decay_rate(const DomainSpec& dom) {
    DampingMargin dm = damping_margin(dom);
    return dm.a * dm.a * dm.theta / 2.0;
}

} // namespace ksbox
