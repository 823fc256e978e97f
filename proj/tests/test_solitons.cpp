#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "support.hpp"
#include "vesselkit/pdecheck.hpp"
#include "vesselkit/solitons.hpp"

using namespace vesselkit;
using testing::central_diff;
using testing::max_abs;

namespace {

const Complex kI{0.0, 1.0};

NlsSoliton symmetric_nls_preset() {
    SolitonSpec spec;
    spec.kind = SolitonKind::GeneralizedNLS;
    spec.a_op = Complex{1.0, 1.0};
    spec.a = -0.5;
    spec.b1 = 1.0;
    spec.b2 = 1.0;
    spec.c1 = 1.0;
    spec.c2 = 1.0;
    spec.symmetric = true;
    return build_nls_soliton(spec);
}

KdvSoliton classical_preset_kdv() {
    SolitonSpec spec;
    spec.kind = SolitonKind::GeneralizedKdV;
    spec.a_op = 1.0;
    spec.a_zeta = 2.0;
    spec.gamma = ComplexMatrix::Zero(2, 2);
    spec.gamma(0, 1) = kI;
    spec.b1 = 1.0;
    spec.c1 = 1.0;
    return build_kdv_soliton(spec);
}

KdvSoliton general_gamma_kdv() {
    SolitonSpec spec;
    spec.kind = SolitonKind::GeneralizedKdV;
    spec.a_op = 1.0;
    spec.a_zeta = 2.0;
    spec.gamma = ComplexMatrix(2, 2);
    spec.gamma << Complex{0.2, 0.0}, kI, Complex{0.3, -0.1}, Complex{-0.2, 0.0};
    spec.b1 = 1.0;
    spec.b2 = 0.3;
    spec.c1 = 1.0;
    spec.c2 = 0.2;
    return build_kdv_soliton(spec);
}

void check_vessel_equations(const Realization& r, double x, double t) {
    const auto& p = r.params;
    const double h = 1e-5;
    const ComplexMatrix b = propagate_B(r, x, t);
    const ComplexMatrix bx = central_diff([&](double s) { return propagate_B(r, s, t); }, x, h);
    const ComplexMatrix bt = central_diff([&](double s) { return propagate_B(r, x, s); }, t, h);
    CHECK(max_abs(bx * p.sigma1 + r.a * b * p.sigma2 + b * p.gamma) < 1e-7);
    CHECK(max_abs(bt - kI * r.a * bx) < 1e-7);
    const ComplexMatrix c = propagate_C(r, x, t);
    const ComplexMatrix cx = central_diff([&](double s) { return propagate_C(r, s, t); }, x, h);
    const ComplexMatrix ct = central_diff([&](double s) { return propagate_C(r, x, s); }, t, h);
    CHECK(max_abs(p.sigma1 * cx + p.sigma2 * c * r.a_zeta - p.gamma * c) < 1e-7);
    CHECK(max_abs(ct + kI * cx * r.a_zeta) < 1e-7);
    // Lyapunov at the anchor, by construction.
    CHECK(max_abs(r.a * r.x_anchor + r.x_anchor * r.a_zeta + r.b0 * p.sigma1 * r.c0) <
          1e-10 * std::max(1.0, max_abs(r.x_anchor)));
}

}  // namespace

TEST_CASE("nls soliton: symmetric preset gives h21 = conj(h12)") {
    const NlsSoliton sol = symmetric_nls_preset();
    CHECK(sol.sign == 1);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            const double x = -0.4 + 0.2 * i;
            const double t = -0.3 + 0.15 * j;
            const VesselEvaluation ev = evaluate(sol.realization, x, t);
            CHECK(std::abs(std::conj(ev.h0(0, 1)) - ev.h0(1, 0)) < 1e-10);
            CHECK(std::abs(std::conj(sol.h12(x, t)) - sol.h21(x, t)) < 1e-10);
        }
    }
}

TEST_CASE("nls soliton: a = 0 freezes the couplings") {
    SolitonSpec spec;
    spec.kind = SolitonKind::GeneralizedNLS;
    spec.a_op = Complex{1.0, 0.5};
    spec.a_zeta = Complex{2.0, -0.5};
    spec.a = 0.0;
    spec.b1 = 1.0;
    spec.b2 = 0.4;
    spec.c1 = 0.7;
    spec.c2 = 0.3;
    const NlsSoliton sol = build_nls_soliton(spec);
    CHECK(std::abs(sol.k) < 1e-15);
    CHECK(std::abs(sol.k_zeta) < 1e-15);
    const VesselEvaluation e0 = evaluate(sol.realization, 0.0, 0.0);
    const VesselEvaluation e1 = evaluate(sol.realization, 1.3, -0.8);
    CHECK(max_abs(e1.b - e0.b) < 1e-12);
    CHECK(max_abs(e1.c - e0.c) < 1e-12);
    CHECK(max_abs(e1.h0 - e0.h0) < 1e-11);
}

TEST_CASE("nls soliton: closed form matches the vessel H0 on a 5x5 grid") {
    const NlsSoliton sol = symmetric_nls_preset();
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            const double x = -0.5 + 0.25 * i;
            const double t = -0.4 + 0.2 * j;
            const VesselEvaluation ev = evaluate(sol.realization, x, t);
            const double scale = std::max(1.0, std::abs(ev.h0(0, 1)));
            CHECK(std::abs(sol.h12(x, t) - ev.h0(0, 1)) < 1e-9 * scale);
            CHECK(std::abs(sol.h21(x, t) - ev.h0(1, 0)) < 1e-9 * scale);
        }
    }
}

TEST_CASE("nls soliton: realization satisfies the vessel equations") {
    const NlsSoliton sol = symmetric_nls_preset();
    check_vessel_equations(sol.realization, 0.3, 0.2);
}

TEST_CASE("nls soliton: NLS-type equation residual converges") {
    const NlsSoliton sol = symmetric_nls_preset();
    const Grid g{-0.4, -0.2, 0.02, 0.02, 25, 13};
    auto run = [&](const Grid& grid, FdAccuracy acc) {
        const VesselFieldSet vf = sample_vessel(sol.realization, grid);
        const ScalarField h12 = entry_field(vf.h0, 0, 1);
        const ScalarField h21 = entry_field(vf.h0, 1, 0);
        PdeFields fields;
        fields.h12 = &h12;
        fields.h21 = &h21;
        PdeConstants constants;
        constants.a = -0.5;
        constants.gamma = ComplexMatrix::Zero(2, 2);
        return residual_pde(EquationId::NlsGen, fields, constants, acc);
    };
    const double r2 = run(g, {2, 2}).max_abs / run(g.halved(), {2, 2}).max_abs;
    CHECK(r2 > 3.0);
    CHECK(r2 < 5.0);
    const double r4 = run(g, {4, 4}).max_abs / run(g.halved(), {4, 4}).max_abs;
    CHECK(r4 > 12.0);
    CHECK(r4 < 20.0);
}

TEST_CASE("kdv soliton: preconditions") {
    SolitonSpec bad;
    bad.kind = SolitonKind::GeneralizedKdV;
    bad.a_op = 1.0;
    bad.a_zeta = -1.0;  // A + A_zeta = 0
    bad.gamma = ComplexMatrix::Zero(2, 2);
    bad.gamma(0, 1) = kI;
    CHECK_THROWS_AS(build_kdv_soliton(bad), InvariantViolation);

    bad.a_zeta = 2.0;
    bad.gamma(0, 1) = 0.0;
    CHECK_THROWS_AS(build_kdv_soliton(bad), GammaTwelveZero);
}

TEST_CASE("kdv soliton: gamma = [[0,i],[0,0]] gives b1 = i (b2)_x") {
    const KdvSoliton sol = classical_preset_kdv();
    CHECK(std::abs(sol.k * sol.k - kI) < 1e-14);  // k = sqrt(i A gamma12) with A=1
    const double x = 0.3, t = 0.1;
    const Complex b2x = central_diff([&](double s) { return ComplexMatrix::Constant(1, 1, sol.b2(s, t)); },
                                     x, 1e-6)(0, 0);
    CHECK(std::abs(sol.b1(x, t) - kI * b2x) < 1e-8);
}

TEST_CASE("kdv soliton: closed form matches the vessel H0") {
    for (const KdvSoliton& sol : {classical_preset_kdv(), general_gamma_kdv()}) {
        CHECK(sol.sign == 1);
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                const double x = 0.3 + 0.15 * i;
                const double t = 0.05 + 0.1 * j;
                const VesselEvaluation ev = evaluate(sol.realization, x, t);
                CHECK(std::abs(sol.h12(x, t) - ev.h0(0, 1)) <
                      1e-9 * std::max(1.0, std::abs(ev.h0(0, 1))));
            }
        }
    }
}

TEST_CASE("kdv soliton: realization satisfies the vessel equations") {
    check_vessel_equations(classical_preset_kdv().realization, 0.4, 0.15);
    check_vessel_equations(general_gamma_kdv().realization, 0.4, 0.15);
}

TEST_CASE("kdv soliton: generalized KdV residual converges") {
    const KdvSoliton sol = general_gamma_kdv();
    const Grid g{0.3, 0.1, 0.02, 0.02, 25, 11};
    auto run = [&](const Grid& grid, FdAccuracy acc) {
        const VesselFieldSet vf = sample_vessel(sol.realization, grid);
        const ScalarField h12 = entry_field(vf.h0, 0, 1);
        PdeFields fields;
        fields.h12 = &h12;
        PdeConstants constants;
        constants.gamma = sol.gamma;
        return residual_pde(EquationId::KdvGen, fields, constants, acc);
    };
    const double r2 = run(g, {2, 2}).max_abs / run(g.halved(), {2, 2}).max_abs;
    CHECK(r2 > 3.0);
    CHECK(r2 < 5.0);
}

TEST_CASE("kdv soliton: x-derivative of the KdV-type residual also vanishes") {
    // The f = (h12)_x substitution: differentiating the residual field in x
    // keeps it at the stencil's order.
    const KdvSoliton sol = classical_preset_kdv();
    auto residual_field = [&](const Grid& grid) {
        const VesselFieldSet vf = sample_vessel(sol.realization, grid);
        const ScalarField h = entry_field(vf.h0, 0, 1);
        const ScalarField ht = fd_partial(h, Var::T, 1, 2);
        const ScalarField hx = fd_partial(h, Var::X, 1, 2);
        const ScalarField hxxx = fd_partial(h, Var::X, 3, 2);
        ScalarField out = make_scalar_field(grid);
        for (int idx = 0; idx < grid.size(); ++idx) {
            out.mask[idx] = ht.mask[idx] && hx.mask[idx] && hxxx.mask[idx];
            if (out.mask[idx])
                out.values[idx] = 4.0 * kI * kI * ht.values[idx] +
                                  6.0 * hx.values[idx] * hx.values[idx] + hxxx.values[idx];
        }
        return out;
    };
    const Grid g{0.6, 0.1, 0.02, 0.02, 25, 11};
    const ScalarField r1 = fd_partial(residual_field(g), Var::X, 1, 2);
    const ScalarField r2 = fd_partial(residual_field(g.halved()), Var::X, 1, 2);
    const double ratio = summarize(r1, "df").max_abs / summarize(r2, "df").max_abs;
    CHECK(summarize(r1, "df").max_abs < 5.0);
    CHECK(ratio > 2.5);
    CHECK(ratio < 6.5);
}

TEST_CASE("kdv soliton: H1 entries and the (h21)_x elimination identity") {
    // Closed forms for the H1 entries and (h21)_x in terms of h12 derivatives,
    // with the tr(H0) term retained (tr H0 = -(A + A_zeta) for n = 1).
    const KdvSoliton sol = general_gamma_kdv();
    const Realization& r = sol.realization;
    const Complex g11 = sol.gamma(0, 0), g12 = sol.gamma(0, 1), g21 = sol.gamma(1, 0);
    const double x = 0.4, t = 0.15, h = 1e-4;

    const auto mom = moments(r, x, t, 1);
    const Complex trace = mom[0](0, 0) + mom[0](1, 1);
    CHECK(std::abs(trace + (sol.a_op + sol.a_zeta)) < 1e-10);

    auto h12_at = [&](double xx) { return evaluate(r, xx, t).h0(0, 1); };
    auto h21_at = [&](double xx) { return evaluate(r, xx, t).h0(1, 0); };
    const Complex h12 = mom[0](0, 1);
    const Complex h21 = mom[0](1, 0);
    const Complex h12x = (h12_at(x + h) - h12_at(x - h)) / (2 * h);
    const Complex h12xx = (h12_at(x + h) - 2.0 * h12 + h12_at(x - h)) / (h * h);
    const Complex h12xxx =
        (h12_at(x + 2 * h) - 2.0 * h12_at(x + h) + 2.0 * h12_at(x - h) - h12_at(x - 2 * h)) /
        (2 * h * h * h);
    const Complex h21x = (h21_at(x + h) - h21_at(x - h)) / (2 * h);

    // h11 carries half the trace on top of the printed traceless expression.
    const Complex h11_formula =
        -(-2.0 * g11 * h12 + h12 * h12 + h12x) / (2.0 * g12) + trace / 2.0;
    CHECK(std::abs(h11_formula - mom[0](0, 0)) < 1e-7);

    const Complex k12_formula = -(trace / 2.0) * h12 - g11 * h12 * h12 / g12 - g11 * h12x / g12 +
                                g12 * h21 - g21 * h12 + h12 * h12 * h12 / (2.0 * g12) +
                                3.0 * h12 * h12x / (2.0 * g12) + h12xx / (2.0 * g12);
    CHECK(std::abs(k12_formula - mom[1](0, 1)) < 1e-6);

    const Complex k22_formula =
        trace * g11 * h12 / g12 - trace * h12 * h12 / (2.0 * g12) - trace * h12x / (2.0 * g12) +
        2.0 * g11 * g11 * h12 * h12 / (g12 * g12) - 2.0 * g11 * h21 +
        2.0 * g11 * g21 * h12 / g12 - 2.0 * g11 * h12 * h12 * h12 / (g12 * g12) -
        2.0 * g11 * h12 * h12x / (g12 * g12) + mom[1](0, 0) + h12 * h21 - h21x -
        g21 * h12 * h12 / g12 - g21 * h12x / g12 + h12 * h12 * h12 * h12 / (2.0 * g12 * g12) +
        h12 * h12 * h12x / (g12 * g12) + h12x * h12x / (2.0 * g12 * g12);
    CHECK(std::abs(k22_formula - mom[1](1, 1)) < 1e-6);

    const Complex h21x_formula = -(g11 * g11 * h12x - 2.0 * g11 * h12 * h12x - g11 * h12xx +
                                   h12 * h12 * h12x + h12 * h12xx + h12x * h12x / 2.0 +
                                   h12xxx / 4.0) /
                                 (g12 * g12);
    CHECK(std::abs(h21x_formula - h21x) < 1e-4 * std::max(1.0, std::abs(h21x)));
}
