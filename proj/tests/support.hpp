#pragma once

// Shared helpers for the test suites: seeded random matrices, a fixed-step
// RK4 integrator (the independent oracle for the propagation closed forms),
// and small numeric utilities.

#include <functional>
#include <random>

#include "vesselkit/vessel.hpp"

namespace vesselkit::testing {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double real(double lo = -1.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }

    Complex scalar() { return {real(), real()}; }

    ComplexMatrix matrix(Eigen::Index rows, Eigen::Index cols) {
        ComplexMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scalar();
        return m;
    }

    /// Invertible by construction: random + diagonal shift, retried on ill condition.
    ComplexMatrix invertible(Eigen::Index n) {
        for (;;) {
            ComplexMatrix m = matrix(n, n) + 2.0 * ComplexMatrix::Identity(n, n);
            if (smallest_singular_value(m) > 0.3) return m;
        }
    }

  private:
    std::mt19937_64 gen_;
};

/// Random vessel with disjoint spectra (A shifted right, A_zeta shifted so
/// -spec(A_zeta) stays left of spec(A)).
inline Realization random_realization(Rng& rng, Eigen::Index n = 2, Eigen::Index e = 2) {
    const ComplexMatrix a = rng.matrix(n, n) + 2.0 * ComplexMatrix::Identity(n, n);
    const ComplexMatrix a_zeta = rng.matrix(n, n) + 2.0 * ComplexMatrix::Identity(n, n);
    VesselParameters p{rng.invertible(e), rng.matrix(e, e), rng.matrix(e, e)};
    return make_realization(a, a_zeta, rng.matrix(n, e), rng.matrix(e, n), p);
}

/// Gentler exponential rates; grids with dx, dt ~ 1e-2 resolve these flows,
/// which keeps finite-difference sweeps in their asymptotic regime.
inline Realization mild_realization(Rng& rng, Eigen::Index n = 2, Eigen::Index e = 2) {
    const ComplexMatrix a = 0.3 * rng.matrix(n, n) + ComplexMatrix::Identity(n, n);
    const ComplexMatrix a_zeta = 0.3 * rng.matrix(n, n) + 1.3 * ComplexMatrix::Identity(n, n);
    VesselParameters p{rng.invertible(e), 0.5 * rng.matrix(e, e), 0.5 * rng.matrix(e, e)};
    return make_realization(a, a_zeta, rng.matrix(n, e), rng.matrix(e, n), p);
}

/// Classic RK4 with fixed step count over [0, span].
inline ComplexMatrix rk4(const std::function<ComplexMatrix(double, const ComplexMatrix&)>& f,
                         ComplexMatrix y0, double span, int steps) {
    const double h = span / steps;
    ComplexMatrix y = std::move(y0);
    double s = 0.0;
    for (int i = 0; i < steps; ++i) {
        const ComplexMatrix k1 = f(s, y);
        const ComplexMatrix k2 = f(s + h / 2, y + (h / 2) * k1);
        const ComplexMatrix k3 = f(s + h / 2, y + (h / 2) * k2);
        const ComplexMatrix k4 = f(s + h, y + h * k3);
        y += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s += h;
    }
    return y;
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Centered first difference of a matrix-valued function of one variable.
template <typename Fn>
ComplexMatrix central_diff(Fn&& fn, double at, double h = 1e-5) {
    return (fn(at + h) - fn(at - h)) / (2.0 * h);
}

}  // namespace vesselkit::testing
