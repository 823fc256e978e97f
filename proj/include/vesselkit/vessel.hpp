#pragma once

#include <variant>
#include <vector>

#include "vesselkit/params.hpp"

namespace vesselkit {

/// Finite-dimensional seed of a regular vessel: inner operators, couplings at
/// the anchor, parameters. Immutable after construction; all evaluation
/// functions are pure.
struct Realization {
    ComplexMatrix a;       // n x n
    ComplexMatrix a_zeta;  // n x n
    ComplexMatrix b0;      // n x E
    ComplexMatrix c0;      // E x n
    VesselParameters params;
    double x0 = 0.0;
    double t0 = 0.0;

    // Derived at construction.
    ComplexMatrix x_anchor;      // Sylvester solution at the anchor
    Complex det_x_anchor{};
    bool anchor_invertible = false;

    Eigen::Index inner_dim() const { return a.rows(); }
    Eigen::Index outer_dim() const { return params.dim(); }
};

/// Validates dimensions, sigma1 invertibility, spectra disjointness (via the
/// lifted Sylvester solve) and fixes X at the anchor to the unique Sylvester
/// solution of A X + X A_zeta + B0 sigma1 C0 = 0.
Realization make_realization(ComplexMatrix a, ComplexMatrix a_zeta, ComplexMatrix b0,
                             ComplexMatrix c0, VesselParameters params, double x0 = 0.0,
                             double t0 = 0.0);

/// Closed-form propagation of the couplings: single matrix exponential on the
/// vectorized equation (the x and t Kronecker generators commute).
ComplexMatrix propagate_B(const Realization& r, double x, double t);
ComplexMatrix propagate_C(const Realization& r, double x, double t);

/// The two commuting Kronecker generators of each coupling flow, exposed for
/// the commutation and integration tests.
struct CouplingGenerators {
    ComplexMatrix b_x, b_t;  // d/dx vec(B) = b_x vec(B), d/dt vec(B) = b_t vec(B)
    ComplexMatrix c_x, c_t;
};
CouplingGenerators coupling_generators(const Realization& r);

/// Pointwise X from the Sylvester equation A X + X A_zeta = -B sigma1 C.
ComplexMatrix recover_X(const Realization& r, const ComplexMatrix& b, const ComplexMatrix& c);

struct VesselEvaluation {
    double x = 0.0, t = 0.0;
    ComplexMatrix b, c, x_op, x_inv;
    Complex tau{};
    bool tau_normalized = true;  // false when X at the anchor is singular
    ComplexMatrix h0;
    ComplexMatrix gamma_star;
};

/// Full pointwise evaluation. Throws SingularX when |tau| < tau_min
/// (equivalently (x,t) lies outside the invertibility region).
VesselEvaluation evaluate(const Realization& r, double x, double t, double tau_min = 1e-10);

/// Moments H_0..H_N, H_n = C X^-1 A^n B.
std::vector<ComplexMatrix> moments(const Realization& r, double x, double t, int n_max,
                                   double tau_min = 1e-10);

struct TransferPair {
    ComplexMatrix s;
    ComplexMatrix s_inv;
};

/// S = I - C X^-1 (lambda I - A)^-1 B sigma1 and its Schur-complement inverse.
/// Throws PoleAtLambda when lambda is numerically on spec(A) or -spec(A_zeta).
TransferPair transfer_function(const Realization& r, Complex lambda, double x, double t,
                               double tau_min = 1e-10);

/// Joint solution of the input LDE pair
///   sigma1 u_x = (lambda sigma2 + gamma) u,   u_t = i lambda u_x:
///   u(x,t) = exp(sigma1^-1 (lambda sigma2 + gamma) (x + i lambda t)) u0.
ComplexVector input_wave(const VesselParameters& p, Complex lambda, const ComplexVector& u0,
                         double x, double t);

/// y = S(lambda,x,t) u_lambda(x,t); satisfies the output pair
///   sigma1 y_x = (lambda sigma2 + gamma*) y,   y_t = i lambda y_x + i (H0)_x sigma1 y.
ComplexVector backlund_output(const Realization& r, Complex lambda, const ComplexVector& u0,
                              double x, double t, double tau_min = 1e-10);

struct FirstKind {
    ComplexMatrix u, v;
};
struct SecondKind {
    Complex k2{}, k{};
};
/// A -> V A V^-1, A_zeta -> U A_zeta U^-1, B0 -> V B0, C0 -> C0 U^-1.
struct Internal {
    ComplexMatrix u, v;
};
using TransformSpec = std::variant<FirstKind, SecondKind, Internal>;

Realization transform_realization(const Realization& r, const TransformSpec& spec);

}  // namespace vesselkit
