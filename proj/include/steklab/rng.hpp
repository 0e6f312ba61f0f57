#pragma once

// =============================================================================
// Deterministic random generation. std::mt19937_64 supplies the bit stream;
// the value mappings (uniform doubles, Box-Muller normals, orthogonal
// factors) are spelled out here so output never depends on the standard
// library's distribution implementations.
// =============================================================================

#include <cmath>
#include <cstdint>
#include <random>

#include "steklab/linalg.hpp"

namespace steklab {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Matrix normal_matrix(std::size_t rows, std::size_t cols) {
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = normal();
        return m;
    }

    /// Random orthogonal n x n factor, modified Gram-Schmidt on a Gaussian
    /// matrix with a deterministic sign convention.
    Matrix orthogonal(std::size_t n) {
        Matrix a = normal_matrix(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < j; ++k) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += a(i, k) * a(i, j);
                for (std::size_t i = 0; i < n; ++i) a(i, j) -= s * a(i, k);
            }
            double nrm = 0.0;
            for (std::size_t i = 0; i < n; ++i) nrm += a(i, j) * a(i, j);
            nrm = std::sqrt(nrm);
            if (nrm < 1e-12) {  // regenerate a degenerate column
                for (std::size_t i = 0; i < n; ++i) a(i, j) = normal();
                --j;
                continue;
            }
            const double sgn = a(j, j) >= 0.0 ? 1.0 : -1.0;
            for (std::size_t i = 0; i < n; ++i) a(i, j) *= sgn / nrm;
        }
        return a;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace steklab
