// End-to-end tour on a thin box: check the admissibility conditions, run the
// gradient system from a smooth potential, and compare the observed decay
// against the certified envelope.

#include <cmath>
#include <cstdio>

#include "ksbox/diagnostics.hpp"
#include "ksbox/domain.hpp"
#include "ksbox/dynamics.hpp"
#include "ksbox/experiments.hpp"
#include "ksbox/verify.hpp"

using namespace ksbox;

int main() {
    const DomainSpec dom{2.0, 2.0};
    const std::vector<int> res{16, 16};

    // Lower-bound estimate of the embedding constant, doubled for safety.
    const auto est = estimate_embedding_constant(dom, res, 200, 1);
    const double cs = est.working_value;

    const auto cond = check_conditions(dom, 0.0, cs, ExponentMode::dimension_ncubed);
    const double estar = max_initial_energy(dom, cs, ExponentMode::dimension_ncubed);
    std::printf("domain (2,2): a = %.4f, theta = %.4f, decay rate = %.4f\n", cond.a,
                cond.theta, cond.decay_rate);
    std::printf("embedding estimate %.5f -> admissible energy threshold %.4f\n", cs, estar);

    // Tensor potential 10 sin - 5 sin3 + sin5 per axis, scaled to half the
    // admissible energy.
    InitialShape shape;
    shape.kind = InitialShape::Kind::modes;
    const std::vector<std::pair<int, double>> axis{{1, 10.0}, {3, -5.0}, {5, 1.0}};
    for (const auto& [i, wi] : axis)
        for (const auto& [j, wj] : axis) shape.modes.push_back({{i, j}, wi * wj});

    NonlinearOperator op(dom, res);
    const double unit = [&] {
        double acc = 0.0;
        for (const auto& c : gradient_state(op, build_potential(dom, res, shape, 1.0)).comps)
            acc += norms(c).lap_sq;
        return acc;
    }();
    const double amp = std::sqrt(0.5 * estar / unit);
    std::printf("unit-amplitude energy %.4e -> amplitude %.4e for E0 = %.4f\n\n", unit, amp,
                0.5 * estar);

    SolverConfig cfg;
    cfg.dt = 5e-4;
    cfg.t_end = 1.0;
    cfg.record_every = 1;
    cfg.energy_floor = 0.0;
    const auto run = simulate(op, true, gradient_state(op, build_potential(dom, res, shape, amp)), cfg);

    const double e0 = delta_energy(run.records.front());
    std::printf("   t        energy        bound         curl\n");
    for (std::size_t i = 0; i < run.records.size(); i += 200) {
        const auto& r = run.records[i];
        std::printf("%5.2f  %12.5e  %12.5e  %9.2e\n", r.time, delta_energy(r),
                    e0 * std::exp(-cond.decay_rate * r.time), r.curl);
    }
    if ((run.records.size() - 1) % 200 != 0) {
        const auto& last = run.records.back();
        std::printf("%5.2f  %12.5e  %12.5e  %9.2e\n", last.time, delta_energy(last),
                    e0 * std::exp(-cond.decay_rate * last.time), last.curl);
    }
    std::printf("\n");

    const auto fit = decay_fit(run.records, cond.decay_rate);
    const auto led = dissipation_ledger(run.records, e0);
    std::printf("fitted rate %.4f vs certified %.4f, bound factor %.6f, monotone %d\n",
                fit.fitted_rate, fit.predicted_rate, fit.bound_violation, fit.monotone ? 1 : 0);
    std::printf("dissipation ledger C = %.4f (budget %.4f)\n", led.ratio,
                2.0 / cond.theta + 1.0);
    return 0;
}
