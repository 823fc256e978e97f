#pragma once

#include <optional>
#include <utility>

#include "vesselkit/matcore.hpp"

namespace vesselkit {

/// The constant triple (sigma1, sigma2, gamma) with sigma1 invertible.
struct VesselParameters {
    ComplexMatrix sigma1;
    ComplexMatrix sigma2;
    ComplexMatrix gamma;

    Eigen::Index dim() const { return sigma1.rows(); }
};

/// Validates square shapes, matching dimensions, and sigma1 invertibility
/// (|det sigma1| > 1e-12 * ||sigma1||^E). Throws InvariantViolation.
void validate_parameters(const VesselParameters& p);

enum class CanonicalKind { GeneralizedNLS, GeneralizedKdV, Degenerate };

struct CanonicalClass {
    CanonicalKind kind = CanonicalKind::Degenerate;
    std::optional<Complex> a;              // present iff GeneralizedNLS
    std::optional<ComplexMatrix> gamma;    // absent iff Degenerate
};

/// One external-I pair followed by one external-II pair; replaying them on the
/// input reproduces the canonical triple.
struct TransformRecord {
    ComplexMatrix u;
    ComplexMatrix v;
    Complex k2{};
    Complex k{};
};

/// eq-style first-kind transform: (U sigma_i V, U gamma V), couplings handled
/// at the realization level.
VesselParameters external_first(const VesselParameters& p, const ComplexMatrix& u,
                                const ComplexMatrix& v);

/// Second-kind transform: (sigma1, sigma2 + k2 sigma1, gamma + k sigma1).
VesselParameters external_second(const VesselParameters& p, Complex k2, Complex k);

/// Reduce a 2x2 triple to canonical form. Degenerate when sigma1^-1 sigma2 is
/// a scalar multiple of the identity.
std::pair<CanonicalClass, TransformRecord> canonicalize(const VesselParameters& p);

CanonicalKind classify(const VesselParameters& p);

/// Replay a record: external_first(p, U, V) then external_second(.., k2, k).
VesselParameters apply_record(const VesselParameters& p, const TransformRecord& rec);

/// The canonical triple described by a non-degenerate class:
/// sigma1 = I, sigma2 = diag(a,-a) or [[0,0],[1,0]], gamma as stored.
VesselParameters canonical_triple(const CanonicalClass& cls);

const char* to_string(CanonicalKind kind);

}  // namespace vesselkit
