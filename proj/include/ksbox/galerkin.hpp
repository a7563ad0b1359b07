#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ksbox/spectral.hpp"

namespace ksbox {

namespace detail {

// Sine synthesis on the closed padded grid x = m L / P, m = 0..P (boundary
// rows are exact zeros).  Rows m = 0..P, cols k = 1..N.
inline std::vector<double> sine_synth_closed(int N, int P) {
    std::vector<double> M(static_cast<std::size_t>(P + 1) * N);
    for (int m = 0; m <= P; ++m)
        for (int k = 1; k <= N; ++k)
            M[static_cast<std::size_t>(m) * N + (k - 1)] = sine_entry(k, m, P);
    return M;
}

// d/dx of the sine basis on the closed padded grid; nonzero at the boundary.
inline std::vector<double> cosine_deriv_synth_closed(int N, int P, double L) {
    std::vector<double> M(static_cast<std::size_t>(P + 1) * N);
    for (int m = 0; m <= P; ++m)
        for (int k = 1; k <= N; ++k)
            M[static_cast<std::size_t>(m) * N + (k - 1)] = (k * pi / L) * cosine_entry(k, m, P);
    return M;
}

// DCT-I analysis on the closed grid: recovers d_p of sum d_p cos(p pi x/L)
// exactly whenever the cosine band is at most P.  Rows p = 0..P, cols m = 0..P.
inline std::vector<double> dct1_analysis(int P) {
    std::vector<double> M(static_cast<std::size_t>(P + 1) * (P + 1));
    for (int p = 0; p <= P; ++p) {
        const double wp = (p == 0 || p == P) ? 1.0 : 2.0;
        for (int m = 0; m <= P; ++m) {
            const double wm = (m == 0 || m == P) ? 0.5 : 1.0;
            M[static_cast<std::size_t>(p) * (P + 1) + m] = (wp / P) * wm * cosine_entry(p, m, P);
        }
    }
    return M;
}

// L2 projection of cos(p pi x/L) onto sin(k pi x/L):
//   (2/L) int_0^L cos sin = 4k / (pi (k^2 - p^2)) when k+p is odd, else 0.
// Dimensionless.  Rows k = 1..N, cols p = 0..P.
inline std::vector<double> cosine_to_sine(int N, int P) {
    std::vector<double> M(static_cast<std::size_t>(N) * (P + 1));
    for (int k = 1; k <= N; ++k)
        for (int p = 0; p <= P; ++p)
            M[static_cast<std::size_t>(k - 1) * (P + 1) + p] =
                (k + p) % 2 == 1 ? 4.0 * k / (pi * (static_cast<double>(k) * k - static_cast<double>(p) * p))
                                 : 0.0;
    return M;
}

// Band-limited derivative: L2 projection of d/dx of the sine basis back onto
// the sine band.  Rows k, cols q: 4 k q / (L (k^2 - q^2)) when k+q odd, else 0.
inline std::vector<double> sine_deriv_project(int N, double L) {
    std::vector<double> M(static_cast<std::size_t>(N) * N);
    for (int k = 1; k <= N; ++k)
        for (int q = 1; q <= N; ++q)
            M[static_cast<std::size_t>(k - 1) * N + (q - 1)] =
                (k + q) % 2 == 1
                    ? 4.0 * k * q / (L * (static_cast<double>(k) * k - static_cast<double>(q) * q))
                    : 0.0;
    return M;
}

} // namespace detail

// Galerkin projections of the quadratic terms.  Products of band-N sine
// polynomials have cosine band 2N per axis, so sampling them on a closed grid
// with P >= 2N+2 panels and analyzing with DCT-I reproduces the continuum
// inner products exactly (up to rounding); no dealiasing error remains.
class NonlinearOperator {
public:
    NonlinearOperator(const DomainSpec& dom, std::vector<int> res, double padding_factor = 2.0)
        : dom_(dom), res_(std::move(res)) {
        validate_resolution(dom_, res_);
        if (!(padding_factor >= 2.0) || !std::isfinite(padding_factor))
            throw std::invalid_argument("NonlinearOperator: padding_factor must be >= 2");
        const int n = dom_.n;
        panels_.resize(static_cast<std::size_t>(n));
        sine_closed_.resize(static_cast<std::size_t>(n));
        dcos_closed_.resize(static_cast<std::size_t>(n));
        dct_.resize(static_cast<std::size_t>(n));
        cs_.resize(static_cast<std::size_t>(n));
        pd_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const int N = res_[static_cast<std::size_t>(i)];
            const double L = dom_.lengths[static_cast<std::size_t>(i)];
            const int P = std::max(2 * N + 2, static_cast<int>(std::lround(padding_factor * (N + 1))));
            panels_[static_cast<std::size_t>(i)] = P;
            sine_closed_[static_cast<std::size_t>(i)] = detail::sine_synth_closed(N, P);
            dcos_closed_[static_cast<std::size_t>(i)] = detail::cosine_deriv_synth_closed(N, P, L);
            dct_[static_cast<std::size_t>(i)] = detail::dct1_analysis(P);
            cs_[static_cast<std::size_t>(i)] = detail::cosine_to_sine(N, P);
            pd_[static_cast<std::size_t>(i)] = detail::sine_deriv_project(N, L);
        }
    }

    const DomainSpec& domain() const { return dom_; }
    const std::vector<int>& resolution() const { return res_; }
    const std::vector<int>& panels() const { return panels_; }

    // Projection of -1/2 |grad phi|^2 onto the sine band.
    SpectralField scalar_rhs(const SpectralField& phi) const {
        check(phi);
        const int n = dom_.n;
        Tensor q = squares_accumulate([&](int i) { return closed_values(phi, i); }, n);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] *= -0.5;
        return SpectralField{dom_, res_, project_all(analyze_closed(std::move(q)))};
    }

    // Projection of -1/2 d/dx_j (sum_i u_i^2) for every j.  The product is
    // expanded once; each component then picks its own axis-j integration by
    // parts:  coefficient k of component j is
    //   (k_j pi / L_j) * sum over cosine indices p with p_j = k_j of
    //   d_p prod_{l != j} cs[k_l, p_l].
    std::vector<SpectralField> system_rhs(const std::vector<SpectralField>& u) const {
        check_state(u);
        const int n = dom_.n;
        Tensor q = squares_accumulate([&](int i) { return closed_values(u[static_cast<std::size_t>(i)], -1); }, n);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] *= 0.5;
        const Tensor d = analyze_closed(std::move(q));
        std::vector<SpectralField> out;
        out.reserve(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            Tensor t = d;
            for (int ax = 0; ax < n; ++ax) {
                const int N = res_[static_cast<std::size_t>(ax)];
                const int P = panels_[static_cast<std::size_t>(ax)];
                if (ax == j) {
                    std::vector<double> sel(static_cast<std::size_t>(N) * (P + 1), 0.0);
                    const double L = dom_.lengths[static_cast<std::size_t>(ax)];
                    for (int k = 1; k <= N; ++k)
                        sel[static_cast<std::size_t>(k - 1) * (P + 1) + k] = k * pi / L;
                    t = detail::apply_axis(sel.data(), N, P + 1, t, ax);
                } else {
                    t = detail::apply_axis(cs_[static_cast<std::size_t>(ax)].data(), N, P + 1, t, ax);
                }
            }
            out.push_back(SpectralField{dom_, res_, std::move(t)});
        }
        return out;
    }

    // L2 projection of d f / d x_axis onto the sine band.
    SpectralField project_derivative(const SpectralField& f, int axis) const {
        check(f);
        if (axis < 0 || axis >= dom_.n) throw std::invalid_argument("project_derivative: bad axis");
        const int N = res_[static_cast<std::size_t>(axis)];
        Tensor t = detail::apply_axis(pd_[static_cast<std::size_t>(axis)].data(), N, N, f.coeffs, axis);
        return SpectralField{dom_, res_, std::move(t)};
    }

    // Band-limited gradient of a scalar potential, one component per axis.
    std::vector<SpectralField> gradient_initial_data(const SpectralField& phi) const {
        check(phi);
        std::vector<SpectralField> u;
        u.reserve(static_cast<std::size_t>(dom_.n));
        for (int j = 0; j < dom_.n; ++j) u.push_back(project_derivative(phi, j));
        return u;
    }

    // max over pairs i != j of || P d_j u_i - P d_i u_j || / max(1, max_i ||grad u_i||).
    // Zero (to rounding) exactly when u is a band-limited gradient.
    double curl_residual(const std::vector<SpectralField>& u) const {
        check_state(u);
        const int n = dom_.n;
        double denom = 1.0;
        for (const auto& ui : u) denom = std::max(denom, std::sqrt(norms(ui).grad_sq));
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                SpectralField a = project_derivative(u[static_cast<std::size_t>(i)], j);
                const SpectralField b = project_derivative(u[static_cast<std::size_t>(j)], i);
                for (std::size_t m = 0; m < a.coeffs.size(); ++m) a.coeffs[m] -= b.coeffs[m];
                worst = std::max(worst, std::sqrt(norms(a).l2_sq));
            }
        return worst / denom;
    }

private:
    void check(const SpectralField& f) const {
        if (f.domain.n != dom_.n || f.resolution != res_)
            throw std::invalid_argument("operator/field shape mismatch");
        for (int i = 0; i < dom_.n; ++i)
            if (f.domain.lengths[static_cast<std::size_t>(i)] != dom_.lengths[static_cast<std::size_t>(i)])
                throw std::invalid_argument("operator/field domain mismatch");
    }

    void check_state(const std::vector<SpectralField>& u) const {
        if (static_cast<int>(u.size()) != dom_.n)
            throw std::invalid_argument("vector state needs one component per axis");
        for (const auto& f : u) check(f);
    }

    // Values on the closed padded grid; deriv_axis >= 0 swaps in the cosine
    // derivative factors along that axis.
    Tensor closed_values(const SpectralField& f, int deriv_axis) const {
        Tensor t = f.coeffs;
        for (int ax = 0; ax < dom_.n; ++ax) {
            const int N = res_[static_cast<std::size_t>(ax)];
            const int P = panels_[static_cast<std::size_t>(ax)];
            const auto& M = ax == deriv_axis ? dcos_closed_[static_cast<std::size_t>(ax)]
                                             : sine_closed_[static_cast<std::size_t>(ax)];
            t = detail::apply_axis(M.data(), P + 1, N, t, ax);
        }
        return t;
    }

    template <class Fields>
    Tensor squares_accumulate(Fields&& field_at, int count) const {
        Tensor acc = field_at(0);
        for (std::size_t m = 0; m < acc.size(); ++m) acc[m] *= acc[m];
        for (int i = 1; i < count; ++i) {
            Tensor v = field_at(i);
            for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += v[m] * v[m];
        }
        return acc;
    }

    Tensor analyze_closed(Tensor values) const {
        for (int ax = 0; ax < dom_.n; ++ax) {
            const int P = panels_[static_cast<std::size_t>(ax)];
            values = detail::apply_axis(dct_[static_cast<std::size_t>(ax)].data(), P + 1, P + 1, values, ax);
        }
        return values;
    }

    Tensor project_all(Tensor dct_coeffs) const {
        for (int ax = 0; ax < dom_.n; ++ax) {
            const int N = res_[static_cast<std::size_t>(ax)];
            const int P = panels_[static_cast<std::size_t>(ax)];
            dct_coeffs = detail::apply_axis(cs_[static_cast<std::size_t>(ax)].data(), N, P + 1, dct_coeffs, ax);
        }
        return dct_coeffs;
    }

    DomainSpec dom_;
    std::vector<int> res_;
    std::vector<int> panels_;
    std::vector<std::vector<double>> sine_closed_, dcos_closed_, dct_, cs_, pd_;
};

} // namespace ksbox
