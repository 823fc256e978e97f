#include "vesselkit/matcore.hpp"

#include <algorithm>
#include <cmath>

namespace vesselkit {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexVector vec(const ComplexMatrix& m) {
    ComplexVector v(m.size());
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) v(k++) = m(i, j);
    return v;
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) throw DimensionError("unvec: size mismatch");
    ComplexMatrix m(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = v(k++);
    return m;
}

ComplexMatrix mat_exp(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("mat_exp: matrix must be square");
    const Eigen::Index n = m.rows();
    const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();

    int s = 0;
    if (norm1 > 0.5) s = static_cast<int>(std::ceil(std::log2(norm1))) + 1;
    const ComplexMatrix a = m / std::pow(2.0, s);

    ComplexMatrix result = ComplexMatrix::Identity(n, n);
    ComplexMatrix term = ComplexMatrix::Identity(n, n);
    for (int k = 1; k <= 64; ++k) {
        term = (term * a) / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18 * std::max(1.0, result.cwiseAbs().maxCoeff()))
            break;
    }
    for (int k = 0; k < s; ++k) result = result * result;
    return result;
}

ComplexMatrix solve_sylvester(const ComplexMatrix& a, const ComplexMatrix& a_zeta,
                              const ComplexMatrix& q) {
    if (a.rows() != a.cols() || a_zeta.rows() != a_zeta.cols())
        throw DimensionError("solve_sylvester: A and A_zeta must be square");
    if (q.rows() != a.rows() || q.cols() != a_zeta.rows())
        throw DimensionError("solve_sylvester: Q dimension mismatch");

    const Eigen::Index n = a.rows();
    const Eigen::Index m = a_zeta.rows();
    const ComplexMatrix lifted = kron(ComplexMatrix::Identity(m, m), a) +
                                 kron(a_zeta.transpose(), ComplexMatrix::Identity(n, n));

    Eigen::FullPivLU<ComplexMatrix> lu(lifted);
    if (!lu.isInvertible())
        throw SpectraOverlap("solve_sylvester: spec(A) and spec(-A_zeta) intersect");

    const ComplexMatrix x = unvec(lu.solve(vec(q)), n, m);

    constexpr double rtol = 1e-12;
    const double resid = (a * x + x * a_zeta - q).cwiseAbs().maxCoeff();
    const double scale = matrix_scale(a) * matrix_scale(x) + matrix_scale(x) * matrix_scale(a_zeta) +
                         matrix_scale(q);
    if (resid > rtol * std::max(scale, 1e-300))
        throw SpectraOverlap("solve_sylvester: near-singular lifted system, residual too large");
    return x;
}

Jordan2x2 jordan_2x2(const ComplexMatrix& m) {
    if (m.rows() != 2 || m.cols() != 2) throw DimensionError("jordan_2x2: expects a 2x2 matrix");

    const Complex tr = m(0, 0) + m(1, 1);
    const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const Complex disc = tr * tr - 4.0 * det;
    const double scale2 = 1.0 + std::norm(m(0, 0)) + std::norm(m(0, 1)) + std::norm(m(1, 0)) +
                          std::norm(m(1, 1));

    Jordan2x2 out;
    if (std::abs(disc) < 1e-9 * scale2) {
        // Repeated eigenvalue: either scalar or one Jordan block.
        const Complex lambda = tr / 2.0;
        const ComplexMatrix nilp = m - lambda * ComplexMatrix::Identity(2, 2);
        if (nilp.cwiseAbs().maxCoeff() < 1e-12 * std::sqrt(scale2)) {
            out.v = ComplexMatrix::Identity(2, 2);
            out.j = lambda * ComplexMatrix::Identity(2, 2);
            return out;
        }
        // Chain v1 = N e_j (largest column), v2 = e_j; M [v1 v2] = [v1 v2] [[l,1],[0,l]].
        const int col = nilp.col(0).norm() >= nilp.col(1).norm() ? 0 : 1;
        ComplexVector v1 = nilp.col(col);
        ComplexVector v2 = ComplexVector::Zero(2);
        v2(col) = 1.0;
        const double s = v1.norm();
        out.v = ComplexMatrix(2, 2);
        out.v.col(0) = v1 / s;
        out.v.col(1) = v2 / s;
        out.j = ComplexMatrix(2, 2);
        out.j << lambda, 1.0, 0.0, lambda;
        out.defective = true;
        return out;
    }

    const Complex root = std::sqrt(disc);
    Complex l1 = (tr + root) / 2.0;
    Complex l2 = (tr - root) / 2.0;
    if (l2.real() > l1.real() || (l2.real() == l1.real() && l2.imag() > l1.imag()))
        std::swap(l1, l2);

    auto eigvec = [&](const Complex& lambda) -> ComplexVector {
        ComplexVector u(2), w(2);
        u << m(0, 1), lambda - m(0, 0);
        w << lambda - m(1, 1), m(1, 0);
        ComplexVector v = u.norm() >= w.norm() ? u : w;
        // Deterministic phase: largest-magnitude entry made real positive.
        const int piv = std::abs(v(0)) >= std::abs(v(1)) ? 0 : 1;
        v *= std::conj(v(piv)) / std::abs(v(piv));
        return v / v.norm();
    };

    out.v = ComplexMatrix(2, 2);
    out.v.col(0) = eigvec(l1);
    out.v.col(1) = eigvec(l2);
    out.j = ComplexMatrix::Zero(2, 2);
    out.j(0, 0) = l1;
    out.j(1, 1) = l2;
    return out;
}

double smallest_singular_value(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues().minCoeff();
}

}  // namespace vesselkit
