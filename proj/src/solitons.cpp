#include "vesselkit/solitons.hpp"

#include <cmath>

namespace vesselkit {

namespace {

constexpr Complex kI{0.0, 1.0};

Complex principal_sqrt(Complex z) {
    Complex r = std::sqrt(z);
    if (r.real() < 0.0 || (r.real() == 0.0 && r.imag() < 0.0)) r = -r;
    return r;
}

ComplexMatrix scalar1x1(Complex z) {
    ComplexMatrix m(1, 1);
    m(0, 0) = z;
    return m;
}

void require(bool ok, const char* what) {
    if (!ok) throw InvariantViolation(what);
}

}  // namespace

Complex NlsSoliton::h12(double x, double t) const {
    const Complex s = a_op + a_zeta;
    const Complex denom =
        b1 * c1 + b2 * c2 * std::exp(2.0 * kI * s * (gamma11 * t + a * (a_op * t - a_zeta * t - kI * x)));
    return -s * c1 * b2 * std::exp(2.0 * (a * a_op + gamma11) * (x + kI * a_op * t)) / denom;
}

Complex NlsSoliton::h21(double x, double t) const {
    const Complex s = a_op + a_zeta;
    const Complex denom =
        b1 * c1 + b2 * c2 * std::exp(2.0 * kI * s * (gamma11 * t + a * (a_op * t - a_zeta * t - kI * x)));
    return -s * b1 * c2 * std::exp(2.0 * (a * a_zeta - gamma11) * (x - kI * a_zeta * t)) / denom;
}

NlsSoliton build_nls_soliton(const SolitonSpec& spec) {
    require(spec.kind == SolitonKind::GeneralizedNLS, "build_nls_soliton: wrong kind");
    Complex a_zeta = spec.a_zeta;
    Complex b1 = spec.b1, c1 = spec.c1, c2 = spec.c2;
    Complex gamma11 = spec.gamma.size() == 4 ? spec.gamma(0, 0) : Complex{};
    if (spec.gamma.size() == 4) {
        require(std::abs(spec.gamma(0, 0) + spec.gamma(1, 1)) < 1e-12, "build_nls_soliton: gamma not traceless");
        require(std::abs(spec.gamma(0, 1)) < 1e-12 && std::abs(spec.gamma(1, 0)) < 1e-12,
                "build_nls_soliton: only the gamma12 = gamma21 = 0 preset is supported");
    }
    if (spec.symmetric) {
        a_zeta = std::conj(spec.a_op);
        b1 = 1.0;
        c2 = c1;
        require(std::abs(spec.a.imag()) < 1e-12, "build_nls_soliton: symmetric preset needs real a");
        require(std::abs((kI * gamma11).imag()) < 1e-12,
                "build_nls_soliton: symmetric preset needs i*gamma11 real");
    }
    require(std::abs(spec.a_op + a_zeta) > 1e-12, "build_nls_soliton: A + A_zeta must not vanish");

    NlsSoliton out;
    out.a = spec.a;
    out.gamma11 = gamma11;
    out.a_op = spec.a_op;
    out.a_zeta = a_zeta;
    out.b1 = b1;
    out.b2 = spec.b2;
    out.c1 = c1;
    out.c2 = c2;
    out.k = spec.a_op * spec.a + gamma11;
    out.k_zeta = -a_zeta * spec.a + gamma11;

    ComplexMatrix sigma2 = ComplexMatrix::Zero(2, 2);
    sigma2(0, 0) = spec.a;
    sigma2(1, 1) = -spec.a;
    ComplexMatrix gamma = ComplexMatrix::Zero(2, 2);
    gamma(0, 0) = gamma11;
    gamma(1, 1) = -gamma11;

    ComplexMatrix b0(1, 2);
    b0 << b1, spec.b2;
    ComplexMatrix c0(2, 1);
    c0 << c1, c2;
    out.realization = make_realization(scalar1x1(spec.a_op), scalar1x1(a_zeta), b0, c0,
                                       {ComplexMatrix::Identity(2, 2), sigma2, gamma});
    return out;
}

Complex KdvSoliton::b2(double x, double t) const {
    const Complex arg = k * x + kI * a_op * k * t;
    return std::cosh(arg) * b1c + std::sinh(arg) * b2c;
}

Complex KdvSoliton::b1(double x, double t) const {
    const Complex arg = k * x + kI * a_op * k * t;
    const Complex db2 = k * (std::sinh(arg) * b1c + std::cosh(arg) * b2c);
    return (-db2 + gamma(0, 0) * b2(x, t)) / gamma(0, 1);
}

Complex KdvSoliton::c1(double x, double t) const {
    const Complex arg = k_zeta * x - kI * a_zeta * k_zeta * t;
    return std::cosh(arg) * c1c + std::sinh(arg) * c2c;
}

Complex KdvSoliton::c2(double x, double t) const {
    const Complex arg = k_zeta * x - kI * a_zeta * k_zeta * t;
    const Complex dc1 = k_zeta * (std::sinh(arg) * c1c + std::cosh(arg) * c2c);
    return (dc1 - gamma(0, 0) * c1(x, t)) / gamma(0, 1);
}

Complex KdvSoliton::x_op(double x, double t) const {
    return -(b1(x, t) * c1(x, t) + b2(x, t) * c2(x, t)) / (a_op + a_zeta);
}

Complex KdvSoliton::h12(double x, double t) const { return c1(x, t) * b2(x, t) / x_op(x, t); }

KdvSoliton build_kdv_soliton(const SolitonSpec& spec) {
    require(spec.kind == SolitonKind::GeneralizedKdV, "build_kdv_soliton: wrong kind");
    if (spec.gamma.rows() != 2 || spec.gamma.cols() != 2)
        throw DimensionError("build_kdv_soliton: gamma must be 2x2");
    require(std::abs(spec.gamma(0, 0) + spec.gamma(1, 1)) < 1e-12,
            "build_kdv_soliton: gamma must be traceless");
    if (std::abs(spec.gamma(0, 1)) < 1e-14)
        throw GammaTwelveZero("build_kdv_soliton: gamma12 must be nonzero");
    require(std::abs(spec.a_op + spec.a_zeta) > 1e-12, "build_kdv_soliton: A + A_zeta must not vanish");

    KdvSoliton out;
    out.gamma = spec.gamma;
    out.a_op = spec.a_op;
    out.a_zeta = spec.a_zeta;
    out.b1c = spec.b1;
    out.b2c = spec.b2;
    out.c1c = spec.c1;
    out.c2c = spec.c2;
    const Complex det_gamma = spec.gamma.determinant();
    out.k = principal_sqrt(spec.a_op * spec.gamma(0, 1) - det_gamma);
    // k_zeta is the rate of both the cosh and sinh parts of c1.
    out.k_zeta = principal_sqrt(-spec.a_zeta * spec.gamma(0, 1) - det_gamma);

    ComplexMatrix sigma2 = ComplexMatrix::Zero(2, 2);
    sigma2(1, 0) = 1.0;
    ComplexMatrix b0(1, 2);
    b0 << out.b1(0.0, 0.0), out.b2(0.0, 0.0);
    ComplexMatrix c0(2, 1);
    c0 << out.c1(0.0, 0.0), out.c2(0.0, 0.0);
    out.realization = make_realization(scalar1x1(spec.a_op), scalar1x1(spec.a_zeta), b0, c0,
                                       {ComplexMatrix::Identity(2, 2), sigma2, spec.gamma});
    return out;
}

}  // namespace vesselkit
