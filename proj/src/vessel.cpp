#include "vesselkit/vessel.hpp"

#include <cmath>

namespace vesselkit {

namespace {

constexpr Complex kI{0.0, 1.0};

bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

}  // namespace

Realization make_realization(ComplexMatrix a, ComplexMatrix a_zeta, ComplexMatrix b0,
                             ComplexMatrix c0, VesselParameters params, double x0, double t0) {
    validate_parameters(params);
    const Eigen::Index n = a.rows();
    const Eigen::Index e = params.dim();
    if (a.cols() != n || a_zeta.rows() != n || a_zeta.cols() != n)
        throw DimensionError("make_realization: A and A_zeta must be n x n");
    if (b0.rows() != n || b0.cols() != e || c0.rows() != e || c0.cols() != n)
        throw DimensionError("make_realization: B0 must be n x E and C0 E x n");

    Realization r;
    r.a = std::move(a);
    r.a_zeta = std::move(a_zeta);
    r.b0 = std::move(b0);
    r.c0 = std::move(c0);
    r.params = std::move(params);
    r.x0 = x0;
    r.t0 = t0;
    // Throws SpectraOverlap when spec(A) meets spec(-A_zeta).
    r.x_anchor = solve_sylvester(r.a, r.a_zeta, -(r.b0 * r.params.sigma1 * r.c0));
    r.det_x_anchor = r.x_anchor.determinant();
    Eigen::FullPivLU<ComplexMatrix> lu(r.x_anchor);
    r.anchor_invertible = lu.isInvertible();
    return r;
}

CouplingGenerators coupling_generators(const Realization& r) {
    const Eigen::Index n = r.inner_dim();
    const Eigen::Index e = r.outer_dim();
    const ComplexMatrix id_n = ComplexMatrix::Identity(n, n);
    const ComplexMatrix id_e = ComplexMatrix::Identity(e, e);
    const ComplexMatrix s1_inv = r.params.sigma1.inverse();

    CouplingGenerators g;
    g.b_x = -(kron((r.params.sigma2 * s1_inv).transpose(), r.a) +
              kron((r.params.gamma * s1_inv).transpose(), id_n));
    g.b_t = kI * kron(id_e, r.a) * g.b_x;
    g.c_x = kron(id_n, s1_inv * r.params.gamma) - kron(r.a_zeta.transpose(), s1_inv * r.params.sigma2);
    g.c_t = -kI * kron(r.a_zeta.transpose(), id_e) * g.c_x;
    return g;
}

ComplexMatrix propagate_B(const Realization& r, double x, double t) {
    const CouplingGenerators g = coupling_generators(r);
    const ComplexMatrix flow = g.b_x * (x - r.x0) + g.b_t * (t - r.t0);
    return unvec(mat_exp(flow) * vec(r.b0), r.inner_dim(), r.outer_dim());
}

ComplexMatrix propagate_C(const Realization& r, double x, double t) {
    const CouplingGenerators g = coupling_generators(r);
    const ComplexMatrix flow = g.c_x * (x - r.x0) + g.c_t * (t - r.t0);
    return unvec(mat_exp(flow) * vec(r.c0), r.outer_dim(), r.inner_dim());
}

ComplexMatrix recover_X(const Realization& r, const ComplexMatrix& b, const ComplexMatrix& c) {
    return solve_sylvester(r.a, r.a_zeta, -(b * r.params.sigma1 * c));
}

VesselEvaluation evaluate(const Realization& r, double x, double t, double tau_min) {
    VesselEvaluation ev;
    ev.x = x;
    ev.t = t;
    ev.b = propagate_B(r, x, t);
    ev.c = propagate_C(r, x, t);
    if (!all_finite(ev.b) || !all_finite(ev.c))
        throw SingularX("evaluate: couplings overflowed, (x,t) out of range");
    ev.x_op = recover_X(r, ev.b, ev.c);

    const Complex det_x = ev.x_op.determinant();
    ev.tau_normalized = r.anchor_invertible;
    ev.tau = ev.tau_normalized ? det_x / r.det_x_anchor : det_x;
    if (std::abs(ev.tau) < tau_min) throw SingularX("evaluate: |tau| below tau_min, outside Omega");

    Eigen::FullPivLU<ComplexMatrix> lu(ev.x_op);
    if (!lu.isInvertible()) throw SingularX("evaluate: X not invertible");
    ev.x_inv = lu.inverse();
    ev.h0 = ev.c * ev.x_inv * ev.b;
    const auto& p = r.params;
    ev.gamma_star = p.gamma + p.sigma2 * ev.h0 * p.sigma1 - p.sigma1 * ev.h0 * p.sigma2;
    return ev;
}

std::vector<ComplexMatrix> moments(const Realization& r, double x, double t, int n_max,
                                   double tau_min) {
    const VesselEvaluation ev = evaluate(r, x, t, tau_min);
    const ComplexMatrix left = ev.c * ev.x_inv;
    std::vector<ComplexMatrix> h;
    h.reserve(static_cast<size_t>(n_max) + 1);
    ComplexMatrix power = ev.b;
    for (int n = 0; n <= n_max; ++n) {
        h.push_back(left * power);
        power = r.a * power;
    }
    return h;
}

TransferPair transfer_function(const Realization& r, Complex lambda, double x, double t,
                               double tau_min) {
    const Eigen::Index n = r.inner_dim();
    const Eigen::Index e = r.outer_dim();
    const ComplexMatrix id_n = ComplexMatrix::Identity(n, n);
    const ComplexMatrix res_a = lambda * id_n - r.a;
    const ComplexMatrix res_z = lambda * id_n + r.a_zeta;

    const double pole_tol = 1e-10 * (1.0 + std::abs(lambda) + matrix_scale(r.a) + matrix_scale(r.a_zeta));
    if (smallest_singular_value(res_a) < pole_tol || smallest_singular_value(res_z) < pole_tol)
        throw PoleAtLambda("transfer_function: lambda on spec(A) or -spec(A_zeta)");

    const VesselEvaluation ev = evaluate(r, x, t, tau_min);
    TransferPair out;
    out.s = ComplexMatrix::Identity(e, e) -
            ev.c * ev.x_inv * res_a.partialPivLu().solve(ev.b) * r.params.sigma1;
    out.s_inv = ComplexMatrix::Identity(e, e) +
                ev.c * res_z.partialPivLu().solve(ev.x_inv * ev.b) * r.params.sigma1;
    return out;
}

ComplexVector input_wave(const VesselParameters& p, Complex lambda, const ComplexVector& u0,
                         double x, double t) {
    if (u0.size() != p.dim()) throw DimensionError("input_wave: u0 must have length E");
    const ComplexMatrix gen = p.sigma1.inverse() * (lambda * p.sigma2 + p.gamma);
    return mat_exp(gen * (Complex(x) + kI * lambda * t)) * u0;
}

ComplexVector backlund_output(const Realization& r, Complex lambda, const ComplexVector& u0,
                              double x, double t, double tau_min) {
    const TransferPair tp = transfer_function(r, lambda, x, t, tau_min);
    return tp.s * input_wave(r.params, lambda, u0, x, t);
}

Realization transform_realization(const Realization& r, const TransformSpec& spec) {
    if (const auto* first = std::get_if<FirstKind>(&spec)) {
        Eigen::FullPivLU<ComplexMatrix> lu_u(first->u);
        Eigen::FullPivLU<ComplexMatrix> lu_v(first->v);
        if (!lu_u.isInvertible() || !lu_v.isInvertible())
            throw InvalidTransform("transform_realization: singular U or V");
        return make_realization(r.a, r.a_zeta, r.b0 * lu_u.inverse(), lu_v.inverse() * r.c0,
                                external_first(r.params, first->u, first->v), r.x0, r.t0);
    }
    if (const auto* second = std::get_if<SecondKind>(&spec)) {
        // The proof's V(x,t), U(x,t) dressing factors equal I at the anchor.
        return make_realization(r.a, r.a_zeta, r.b0, r.c0,
                                external_second(r.params, second->k2, second->k), r.x0, r.t0);
    }
    const auto& internal = std::get<Internal>(spec);
    Eigen::FullPivLU<ComplexMatrix> lu_u(internal.u);
    Eigen::FullPivLU<ComplexMatrix> lu_v(internal.v);
    if (!lu_u.isInvertible() || !lu_v.isInvertible())
        throw InvalidTransform("transform_realization: singular U or V");
    return make_realization(internal.v * r.a * lu_v.inverse(), internal.u * r.a_zeta * lu_u.inverse(),
                            internal.v * r.b0, r.c0 * lu_u.inverse(), r.params, r.x0, r.t0);
}

}  // namespace vesselkit
