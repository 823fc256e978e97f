#include "vesselkit/params.hpp"

#include <cmath>

namespace vesselkit {

namespace {

bool invertible(const ComplexMatrix& m) {
    Eigen::FullPivLU<ComplexMatrix> lu(m);
    return lu.isInvertible();
}

}  // namespace

void validate_parameters(const VesselParameters& p) {
    const Eigen::Index e = p.sigma1.rows();
    if (p.sigma1.cols() != e || p.sigma2.rows() != e || p.sigma2.cols() != e ||
        p.gamma.rows() != e || p.gamma.cols() != e)
        throw DimensionError("vessel parameters: sigma1, sigma2, gamma must all be ExE");
    const double det = std::abs(p.sigma1.determinant());
    const double scale = std::max(matrix_scale(p.sigma1), 1e-300);
    if (det <= 1e-12 * std::pow(scale, static_cast<double>(e)))
        throw InvariantViolation("vessel parameters: sigma1 is singular");
}

VesselParameters external_first(const VesselParameters& p, const ComplexMatrix& u,
                                const ComplexMatrix& v) {
    if (u.rows() != p.dim() || u.cols() != p.dim() || v.rows() != p.dim() || v.cols() != p.dim())
        throw DimensionError("external_first: U, V must be ExE");
    if (!invertible(u) || !invertible(v))
        throw InvalidTransform("external_first: U and V must be invertible");
    return {u * p.sigma1 * v, u * p.sigma2 * v, u * p.gamma * v};
}

VesselParameters external_second(const VesselParameters& p, Complex k2, Complex k) {
    return {p.sigma1, p.sigma2 + k2 * p.sigma1, p.gamma + k * p.sigma1};
}

VesselParameters apply_record(const VesselParameters& p, const TransformRecord& rec) {
    return external_second(external_first(p, rec.u, rec.v), rec.k2, rec.k);
}

VesselParameters canonical_triple(const CanonicalClass& cls) {
    if (cls.kind == CanonicalKind::Degenerate || !cls.gamma)
        throw InvariantViolation("canonical_triple: degenerate class has no canonical triple");
    ComplexMatrix sigma2 = ComplexMatrix::Zero(2, 2);
    if (cls.kind == CanonicalKind::GeneralizedNLS) {
        sigma2(0, 0) = *cls.a;
        sigma2(1, 1) = -*cls.a;
    } else {
        sigma2(1, 0) = 1.0;
    }
    return {ComplexMatrix::Identity(2, 2), sigma2, *cls.gamma};
}

std::pair<CanonicalClass, TransformRecord> canonicalize(const VesselParameters& p) {
    validate_parameters(p);
    if (p.dim() != 2) throw DimensionError("canonicalize: only E = 2 is supported");

    // (i) force sigma1 = I.
    const ComplexMatrix s1_inv = p.sigma1.inverse();
    const ComplexMatrix m = s1_inv * p.sigma2;

    // Degenerate: sigma1^-1 sigma2 = c I, both Jordan templates excluded.
    const Complex c = (m(0, 0) + m(1, 1)) / 2.0;
    const ComplexMatrix dev = m - c * ComplexMatrix::Identity(2, 2);
    const bool degenerate =
        dev.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + matrix_scale(m));

    // (ii) Jordan form of the new sigma2, keeping sigma1 = I.
    const Jordan2x2 jd = jordan_2x2(m);
    ComplexMatrix u = jd.v.inverse() * s1_inv;
    ComplexMatrix v = jd.v;
    ComplexMatrix gamma2 = u * p.gamma * v;
    ComplexMatrix sigma2 = jd.j;

    // (iii) remove traces with an external-II.
    const Complex k2 = -(sigma2(0, 0) + sigma2(1, 1)) / 2.0;
    const Complex k = -(gamma2(0, 0) + gamma2(1, 1)) / 2.0;
    sigma2 += k2 * ComplexMatrix::Identity(2, 2);
    gamma2 += k * ComplexMatrix::Identity(2, 2);

    if (jd.defective && !degenerate) {
        // Nilpotent sigma2 with the 1 at (1,2); swap it to (2,1).
        ComplexMatrix swap(2, 2);
        swap << 0.0, 1.0, 1.0, 0.0;
        u = swap * u;
        v = v * swap;
        sigma2 = swap * sigma2 * swap;
        gamma2 = swap * gamma2 * swap;
    }

    CanonicalClass cls;
    TransformRecord rec{u, v, k2, k};
    if (degenerate) {
        cls.kind = CanonicalKind::Degenerate;
        return {cls, rec};
    }
    if (jd.defective) {
        cls.kind = CanonicalKind::GeneralizedKdV;
        cls.gamma = gamma2;
        return {cls, rec};
    }
    cls.kind = CanonicalKind::GeneralizedNLS;
    cls.a = sigma2(0, 0);
    cls.gamma = gamma2;
    return {cls, rec};
}

CanonicalKind classify(const VesselParameters& p) { return canonicalize(p).first.kind; }

const char* to_string(CanonicalKind kind) {
    switch (kind) {
        case CanonicalKind::GeneralizedNLS: return "generalized_nls";
        case CanonicalKind::GeneralizedKdV: return "generalized_kdv";
        default: return "degenerate";
    }
}

}  // namespace vesselkit
