#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vesselkit/vessel.hpp"

namespace vesselkit {

/// Rectangular (x,t) grid discretizing the invertibility region.
struct Grid {
    double x_start = 0.0, t_start = 0.0;
    double dx = 0.0, dt = 0.0;
    int nx = 0, nt = 0;

    double x(int i) const { return x_start + dx * i; }
    double t(int j) const { return t_start + dt * j; }
    int index(int i, int j) const { return i * nt + j; }
    int size() const { return nx * nt; }

    Grid halved() const { return {x_start, t_start, dx / 2, dt / 2, 2 * nx - 1, 2 * nt - 1}; }
};

void validate_grid(const Grid& g);

template <typename T>
struct Field {
    Grid grid;
    std::vector<T> values;
    std::vector<std::uint8_t> mask;  // 0 where the value is unusable

    bool ok(int i, int j) const { return mask[grid.index(i, j)] != 0; }
    const T& at(int i, int j) const { return values[grid.index(i, j)]; }
    T& at(int i, int j) { return values[grid.index(i, j)]; }
};

using ScalarField = Field<Complex>;
using MatrixField = Field<ComplexMatrix>;

ScalarField make_scalar_field(const Grid& g);
MatrixField make_matrix_field(const Grid& g, Eigen::Index rows, Eigen::Index cols);

enum class Var { X, T };

/// Centered finite difference along one grid direction. Output nodes whose
/// stencil leaves the grid or touches a masked node are masked out.
ScalarField fd_partial(const ScalarField& f, Var var, int order, int accuracy);
MatrixField fd_partial(const MatrixField& f, Var var, int order, int accuracy);

struct FdAccuracy {
    int x = 4;  // third derivatives appear in x
    int t = 2;  // only first derivatives appear in t
};

struct TauObservables {
    ScalarField q;     // -2 d2/dx2 ln tau
    ScalarField beta;  // d/dx tau
};

/// ln tau with the argument unwrapped along each grid row; throws BranchCut on
/// jumps beyond pi/2.
ScalarField unwrapped_log(const ScalarField& tau);

/// Branch of ln tau unwrapped along each grid row; throws BranchCut when the
/// argument jumps by more than pi/2 between adjacent unmasked nodes.
TauObservables observables_from_tau(const ScalarField& tau, int x_accuracy = 4);

struct ResidualReport {
    std::string equation_id;
    double max_abs = 0.0;
    double l2 = 0.0;
    int interior_node_count = 0;
    double dx = 0.0, dt = 0.0;
};

enum class EquationId { Kdv, Enls, CanSys, KdvGen, NlsGen };

const char* to_string(EquationId id);
EquationId equation_from_string(const std::string& name);

struct PdeFields {
    const ScalarField* q = nullptr;     // Kdv
    const ScalarField* y = nullptr;     // Enls
    const ScalarField* beta = nullptr;  // CanSys
    const ScalarField* h12 = nullptr;   // KdvGen, NlsGen
    const ScalarField* h21 = nullptr;   // NlsGen
};

struct PdeConstants {
    Complex a{};                      // NlsGen
    ComplexMatrix gamma;              // KdvGen / NlsGen: 2x2, entries gamma11, gamma12, gamma21
    double beta_prime_floor = 1e-8;   // CanSys: |beta'| < floor * max|beta'| is masked
};

ResidualReport residual_pde(EquationId id, const PdeFields& fields, const PdeConstants& constants,
                            FdAccuracy acc = {});

/// Options for sampling vessel quantities over a grid.
struct SampleOptions {
    double tau_min = 1e-10;  // absolute |tau| threshold
    double mask_rel = 0.0;   // relative threshold: mask |tau| < mask_rel * max|tau|
};

/// Pointwise vessel data on a grid; nodes where evaluation fails are masked.
struct VesselFieldSet {
    ScalarField tau;
    MatrixField h0;
    MatrixField gamma_star;
    bool tau_normalized = true;
    int masked_nodes = 0;
};

VesselFieldSet sample_vessel(const Realization& r, const Grid& g, const SampleOptions& opts = {});

/// Moment matrices H_0..H_N on a grid (shared mask).
std::vector<MatrixField> sample_moments(const Realization& r, const Grid& g, int n_max,
                                        const SampleOptions& opts = {});

ScalarField entry_field(const MatrixField& f, int row, int col);

/// Residuals of the moment recurrences for n = 0..N-1; two reports per n
/// (ids "dh{n}_x", "dh{n}_t").
std::vector<ResidualReport> check_moment_recurrence(const Realization& r, const Grid& g, int n_max,
                                                    const SampleOptions& opts = {},
                                                    FdAccuracy acc = {});

/// Trace relation for a constant K at moment index n: the commuting branch
/// when [K, sigma1^-1 sigma2] = 0, the non-commuting branch otherwise.
ResidualReport check_trace_relations(const Realization& r, const ComplexMatrix& k, const Grid& g,
                                     int n, const SampleOptions& opts = {}, FdAccuracy acc = {});

/// Residual of the gamma* time evolution.
ResidualReport check_gamma_star_evolution(const Realization& r, const Grid& g,
                                          const SampleOptions& opts = {}, FdAccuracy acc = {});

/// Residuals of the two output equations for y = S u over the grid
/// (ids "backlund_x", "backlund_t").
std::vector<ResidualReport> check_backlund(const Realization& r, Complex lambda,
                                           const ComplexVector& u0, const Grid& g,
                                           const SampleOptions& opts = {}, FdAccuracy acc = {});

/// Residuals of the two input-wave equations (ids "input_x", "input_t");
/// the comparison partner for the large-lambda transfer-function limit.
std::vector<ResidualReport> check_input_wave(const VesselParameters& p, Complex lambda,
                                             const ComplexVector& u0, const Grid& g,
                                             FdAccuracy acc = {});

/// Pointwise Lyapunov residual ||A X + X A_zeta + B sigma1 C|| over the grid.
ResidualReport check_lyapunov(const Realization& r, const Grid& g, const SampleOptions& opts = {});

/// Statistics of a residual field over unmasked nodes.
ResidualReport summarize(const ScalarField& residual, const std::string& id);
ResidualReport summarize(const MatrixField& residual, const std::string& id);

/// Worker count for grid sweeps: min(hardware, VESSELKIT_THREADS when set).
int worker_count();

}  // namespace vesselkit
