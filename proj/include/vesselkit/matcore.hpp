#pragma once

#include <Eigen/Dense>
#include <complex>

#include "vesselkit/errors.hpp"

namespace vesselkit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Kronecker product A (x) B.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-stacking vectorization, so vec(A*X*B) = (B^T (x) A) vec(X).
ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols);

/// Matrix exponential by scaling-and-squaring with a truncated series.
/// Throws DimensionError on non-square input.
ComplexMatrix mat_exp(const ComplexMatrix& m);

/// Solve A*X + X*A_zeta = Q through the lifted dense system
/// (I (x) A + A_zeta^T (x) I) vec(X) = vec(Q).
/// Throws SpectraOverlap when the lifted system is singular or the residual
/// fails the solvability tolerance.
ComplexMatrix solve_sylvester(const ComplexMatrix& a, const ComplexMatrix& a_zeta,
                              const ComplexMatrix& q);

struct Jordan2x2 {
    ComplexMatrix v;  // invertible, m = v * j * v^-1
    ComplexMatrix j;  // diag(l1,l2), (Re,Im)-lexicographic l1 >= l2, or [[l,1],[0,l]]
    bool defective = false;
};

/// Jordan decomposition of a 2x2 matrix. Always succeeds.
Jordan2x2 jordan_2x2(const ComplexMatrix& m);

/// Smallest singular value; used for pole / invertibility tests.
double smallest_singular_value(const ComplexMatrix& m);

inline double matrix_scale(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace vesselkit
