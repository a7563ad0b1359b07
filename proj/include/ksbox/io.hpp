#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksbox/spectral.hpp"

namespace ksbox {

// Text dump: one header line "n N1..Nn L1..Ln", then the coefficient tensor
// in row-major order, one value per line, 17 significant digits (lossless).
inline void write_state(std::ostream& out, const SpectralField& f) {
    char buf[40];
    out << f.domain.n;
    for (int N : f.resolution) out << ' ' << N;
    for (double L : f.domain.lengths) {
        std::snprintf(buf, sizeof buf, "%.16e", L);
        out << ' ' << buf;
    }
    out << '\n';
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.16e", f.coeffs[i]);
        out << buf << '\n';
    }
}

inline void write_state(const std::string& path, const SpectralField& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_state: cannot open " + path);
    write_state(out, f);
}

inline SpectralField read_state(std::istream& in) {
    int n = 0;
    if (!(in >> n) || n < 1 || n > 7) throw std::runtime_error("read_state: bad dimension");
    std::vector<int> res(n);
    for (int& N : res)
        if (!(in >> N) || N < 1) throw std::runtime_error("read_state: bad resolution");
    std::vector<double> lengths(n);
    for (double& L : lengths)
        if (!(in >> L) || !(L > 0.0) || !std::isfinite(L))
            throw std::runtime_error("read_state: bad length");
    SpectralField f = make_field(DomainSpec{lengths}, res);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        if (!(in >> f.coeffs[i]) || !std::isfinite(f.coeffs[i]))
            throw std::runtime_error("read_state: bad coefficient");
    }
    double extra;
    if (in >> extra) throw std::runtime_error("read_state: trailing data");
    return f;
}

inline SpectralField read_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_state: cannot open " + path);
    return read_state(in);
}

} // namespace ksbox
