#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ksbox/domain.hpp"
#include "ksbox/tensor.hpp"

namespace ksbox {

// Tensor-product sine expansion on the box:
//   f(x) = sum_k c_k prod_i sin(k_i pi x_i / L_i),  k_i = 1..N_i.
// Every basis function satisfies f = lap f = 0 on the boundary and is an
// eigenfunction of -lap with eigenvalue mu_k = sum_i (k_i pi / L_i)^2.
struct SpectralField {
    DomainSpec domain;
    std::vector<int> resolution;  // modes per axis
    Tensor coeffs;                // extents == resolution, index k_i - 1
};

// Values at the interior collocation nodes x_i^(m) = m L_i/(N_i+1), m = 1..N_i.
struct GridField {
    DomainSpec domain;
    std::vector<int> resolution;  // interior nodes per axis
    Tensor values;
};

inline void validate_resolution(const DomainSpec& dom, const std::vector<int>& res) {
    validate(dom);
    if (dom.n > 4) throw std::invalid_argument("field resolution: grids support n <= 4");
    if (static_cast<int>(res.size()) != dom.n)
        throw std::invalid_argument("field resolution: axis count mismatch");
    for (int N : res)
        if (N < 1) throw std::invalid_argument("field resolution: need at least one mode per axis");
}

inline SpectralField make_field(const DomainSpec& dom, const std::vector<int>& res) {
    validate_resolution(dom, res);
    return SpectralField{dom, res, Tensor(res)};
}

inline double eigenvalue_mu(const DomainSpec& dom, const std::vector<int>& k) {
    validate(dom);
    if (static_cast<int>(k.size()) != dom.n) throw std::invalid_argument("eigenvalue_mu: index size");
    double mu = 0.0;
    for (int i = 0; i < dom.n; ++i) {
        if (k[static_cast<std::size_t>(i)] < 1) throw std::invalid_argument("eigenvalue_mu: modes start at 1");
        const double w = k[static_cast<std::size_t>(i)] * pi / dom.lengths[static_cast<std::size_t>(i)];
        mu += w * w;
    }
    return mu;
}

namespace detail {

// sin(pi k m / P) with the angle reduced in exact integer arithmetic first;
// boundary rows (m = 0 or m = P) come out exactly zero.
inline double sine_entry(std::int64_t k, std::int64_t m, std::int64_t P) {
    const std::int64_t r = (k * m) % (2 * P);
    if (r == 0 || r == P) return 0.0;
    return std::sin(pi * static_cast<double>(r) / static_cast<double>(P));
}

inline double cosine_entry(std::int64_t k, std::int64_t m, std::int64_t P) {
    const std::int64_t r = (k * m) % (2 * P);
    if (r == 0) return 1.0;
    if (r == P) return (k * m / P) % 2 == 0 ? 1.0 : -1.0;  // cos(j pi)
    return std::cos(pi * static_cast<double>(r) / static_cast<double>(P));
}

// Interior synthesis matrix, rows m = 1..N, cols k = 1..N, entries sin(k pi m/(N+1)).
inline std::vector<double> sine_synth_interior(int N) {
    std::vector<double> M(static_cast<std::size_t>(N) * N);
    for (int m = 1; m <= N; ++m)
        for (int k = 1; k <= N; ++k)
            M[static_cast<std::size_t>(m - 1) * N + (k - 1)] = sine_entry(k, m, N + 1);
    return M;
}

// Inverse of the above: A = (2/(N+1)) S^T; S is symmetric so this is a rescale.
inline std::vector<double> sine_analysis_interior(int N) {
    std::vector<double> M = sine_synth_interior(N);
    const double s = 2.0 / (N + 1);
    for (double& v : M) v *= s;
    return M;
}

// d/dx synthesis on the interior grid: rows m, cols k, (k pi/L) cos(k pi m/(N+1)).
inline std::vector<double> cosine_deriv_synth_interior(int N, double L) {
    std::vector<double> M(static_cast<std::size_t>(N) * N);
    for (int m = 1; m <= N; ++m)
        for (int k = 1; k <= N; ++k)
            M[static_cast<std::size_t>(m - 1) * N + (k - 1)] =
                (k * pi / L) * cosine_entry(k, m, N + 1);
    return M;
}

// Per-axis 1D eigenvalues (k pi / L)^2, k = 1..N.
inline std::vector<double> axis_mu(int N, double L) {
    std::vector<double> mu(static_cast<std::size_t>(N));
    for (int k = 1; k <= N; ++k) {
        const double w = k * pi / L;
        mu[static_cast<std::size_t>(k - 1)] = w * w;
    }
    return mu;
}

// Calls fn(flat_index, mu_k) for every multi-index of the coefficient tensor.
template <class Fn>
inline void for_each_mode(const DomainSpec& dom, const std::vector<int>& res, Fn&& fn) {
    const int n = dom.n;
    std::vector<std::vector<double>> mu(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        mu[static_cast<std::size_t>(i)] =
            axis_mu(res[static_cast<std::size_t>(i)], dom.lengths[static_cast<std::size_t>(i)]);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::size_t flat = 0, total = 1;
    for (int N : res) total *= static_cast<std::size_t>(N);
    for (; flat < total; ++flat) {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m += mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        fn(flat, m);
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < res[static_cast<std::size_t>(i)]) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
}

inline double parseval_weight(const DomainSpec& dom) {
    double w = 1.0;
    for (double L : dom.lengths) w *= L / 2.0;  // integral of sin^2 over (0,L)
    return w;
}

} // namespace detail

inline GridField synthesize(const SpectralField& f) {
    validate_resolution(f.domain, f.resolution);
    Tensor t = f.coeffs;
    for (int ax = 0; ax < f.domain.n; ++ax) {
        const int N = f.resolution[static_cast<std::size_t>(ax)];
        auto M = detail::sine_synth_interior(N);
        t = detail::apply_axis(M.data(), N, N, t, ax);
    }
    return GridField{f.domain, f.resolution, std::move(t)};
}

inline SpectralField analyze(const GridField& g) {
    validate_resolution(g.domain, g.resolution);
    Tensor t = g.values;
    for (int ax = 0; ax < g.domain.n; ++ax) {
        const int N = g.resolution[static_cast<std::size_t>(ax)];
        auto M = detail::sine_analysis_interior(N);
        t = detail::apply_axis(M.data(), N, N, t, ax);
    }
    return SpectralField{g.domain, g.resolution, std::move(t)};
}

inline SpectralField laplacian(const SpectralField& f) {
    SpectralField out = f;
    detail::for_each_mode(f.domain, f.resolution,
                          [&](std::size_t i, double mu) { out.coeffs[i] = -mu * f.coeffs[i]; });
    return out;
}

inline SpectralField biharmonic(const SpectralField& f) {
    SpectralField out = f;
    detail::for_each_mode(f.domain, f.resolution,
                          [&](std::size_t i, double mu) { out.coeffs[i] = mu * mu * f.coeffs[i]; });
    return out;
}

// d f / d x_axis sampled on the interior grid (cosine factor along `axis`).
inline GridField gradient_component(const SpectralField& f, int axis) {
    validate_resolution(f.domain, f.resolution);
    if (axis < 0 || axis >= f.domain.n) throw std::invalid_argument("gradient_component: bad axis");
    Tensor t = f.coeffs;
    for (int ax = 0; ax < f.domain.n; ++ax) {
        const int N = f.resolution[static_cast<std::size_t>(ax)];
        const double L = f.domain.lengths[static_cast<std::size_t>(ax)];
        auto M = ax == axis ? detail::cosine_deriv_synth_interior(N, L)
                            : detail::sine_synth_interior(N);
        t = detail::apply_axis(M.data(), N, N, t, ax);
    }
    return GridField{f.domain, f.resolution, std::move(t)};
}

// Squared norms by Parseval: prod_i(L_i/2) * sum_k mu_k^s c_k^2, s = 0..4.
struct SpectralNorms {
    double l2_sq = 0.0;       // ||f||^2
    double grad_sq = 0.0;     // ||grad f||^2
    double lap_sq = 0.0;      // ||lap f||^2
    double gradlap_sq = 0.0;  // ||grad lap f||^2
    double bilap_sq = 0.0;    // ||lap^2 f||^2
};

inline SpectralNorms norms(const SpectralField& f) {
    validate_resolution(f.domain, f.resolution);
    SpectralNorms s;
    detail::for_each_mode(f.domain, f.resolution, [&](std::size_t i, double mu) {
        const double c2 = f.coeffs[i] * f.coeffs[i];
        s.l2_sq += c2;
        s.grad_sq += mu * c2;
        s.lap_sq += mu * mu * c2;
        s.gradlap_sq += mu * mu * mu * c2;
        s.bilap_sq += mu * mu * mu * mu * c2;
    });
    const double w = detail::parseval_weight(f.domain);
    s.l2_sq *= w;
    s.grad_sq *= w;
    s.lap_sq *= w;
    s.gradlap_sq *= w;
    s.bilap_sq *= w;
    return s;
}

// Grid maximum of |f| on the synthesis grid refined `oversample` times per
// axis (a lower bound on the true sup norm).
inline double sup_norm(const SpectralField& f, int oversample = 1) {
    validate_resolution(f.domain, f.resolution);
    if (oversample < 1) throw std::invalid_argument("sup_norm: oversample >= 1");
    Tensor t = f.coeffs;
    for (int ax = 0; ax < f.domain.n; ++ax) {
        const int N = f.resolution[static_cast<std::size_t>(ax)];
        const int P = oversample * (N + 1);
        std::vector<double> M(static_cast<std::size_t>(P - 1) * N);
        for (int m = 1; m <= P - 1; ++m)
            for (int k = 1; k <= N; ++k)
                M[static_cast<std::size_t>(m - 1) * N + (k - 1)] = detail::sine_entry(k, m, P);
        t = detail::apply_axis(M.data(), P - 1, N, t, ax);
    }
    double mx = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) mx = std::max(mx, std::abs(t[i]));
    return mx;
}

} // namespace ksbox
