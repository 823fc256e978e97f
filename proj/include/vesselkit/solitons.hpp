#pragma once

#include "vesselkit/vessel.hpp"

namespace vesselkit {

enum class SolitonKind { GeneralizedNLS, GeneralizedKdV };

/// One-dimensional (n = 1) soliton seed for either canonical class.
/// NLS uses the gamma12 = gamma21 = 0 preset; gamma carries (gamma11, -gamma11).
struct SolitonSpec {
    SolitonKind kind = SolitonKind::GeneralizedKdV;
    Complex a_op{};       // inner operator A (scalar)
    Complex a_zeta{};     // inner operator A_zeta (scalar)
    Complex a{};          // NLS parameter a, sigma2 = diag(a, -a)
    ComplexMatrix gamma;  // 2x2 traceless
    Complex b1{}, b2{}, c1{}, c2{};
    bool symmetric = false;  // NLS only: A_zeta = conj(A), B1 = 1, C1 = C2, a real, i gamma11 real
};

/// Generalized NLS soliton: realization plus the explicit h12/h21 functions.
/// `sign` is the recorded global factor relating the printed closed forms to
/// the Lyapunov-consistent vessel values (always +1 here; the printed minus
/// signs already match X = -B sigma1 C / (A + A_zeta)).
struct NlsSoliton {
    Realization realization;
    Complex k{}, k_zeta{};
    int sign = 1;
    Complex a{}, gamma11{}, a_op{}, a_zeta{};
    Complex b1{}, b2{}, c1{}, c2{};

    Complex h12(double x, double t) const;
    Complex h21(double x, double t) const;
};

/// Generalized KdV soliton: realization plus the explicit h12 function built
/// from the cosh/sinh couplings and the Lyapunov-consistent X.
struct KdvSoliton {
    Realization realization;
    Complex k{}, k_zeta{};
    int sign = 1;
    ComplexMatrix gamma;
    Complex a_op{}, a_zeta{};
    Complex b1c{}, b2c{}, c1c{}, c2c{};  // the four seed constants

    // Coupling components and the scalar X, as closed forms.
    Complex b1(double x, double t) const;
    Complex b2(double x, double t) const;
    Complex c1(double x, double t) const;
    Complex c2(double x, double t) const;
    Complex x_op(double x, double t) const;
    Complex h12(double x, double t) const;
};

NlsSoliton build_nls_soliton(const SolitonSpec& spec);
KdvSoliton build_kdv_soliton(const SolitonSpec& spec);

}  // namespace vesselkit
