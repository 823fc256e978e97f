#pragma once

#include <stdexcept>
#include <string>

namespace vesselkit {

/// Base class for all library errors.
struct VesselError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : VesselError {
    using VesselError::VesselError;
};

/// spec(A) and spec(-A_zeta) intersect: the lifted Sylvester system is singular.
struct SpectraOverlap : VesselError {
    using VesselError::VesselError;
};

/// (x,t) lies outside the invertibility region of X.
struct SingularX : VesselError {
    using VesselError::VesselError;
};

/// lambda is numerically on the spectrum of A (or -A_zeta).
struct PoleAtLambda : VesselError {
    using VesselError::VesselError;
};

struct InvalidTransform : VesselError {
    using VesselError::VesselError;
};

struct InvariantViolation : VesselError {
    using VesselError::VesselError;
};

struct GammaTwelveZero : VesselError {
    using VesselError::VesselError;
};

struct StencilTooWide : VesselError {
    using VesselError::VesselError;
};

/// arg(tau) jumps by more than pi/2 between adjacent nodes; no continuous log branch.
struct BranchCut : VesselError {
    using VesselError::VesselError;
};

struct MissingField : VesselError {
    using VesselError::VesselError;
};

/// Every interior node was masked away by the beta' threshold.
struct DivisionMasked : VesselError {
    using VesselError::VesselError;
};

struct ConfigError : VesselError {
    using VesselError::VesselError;
};

}  // namespace vesselkit
