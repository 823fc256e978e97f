#include "vesselkit/pdecheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <span>
#include <thread>

namespace vesselkit {

namespace {

constexpr Complex kI{0.0, 1.0};

struct Stencil {
    int halfwidth;
    std::span<const double> weights;
};

constexpr std::array<double, 3> kD1A2{-0.5, 0.0, 0.5};
constexpr std::array<double, 5> kD1A4{1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
constexpr std::array<double, 3> kD2A2{1.0, -2.0, 1.0};
constexpr std::array<double, 5> kD2A4{-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
constexpr std::array<double, 5> kD3A2{-0.5, 1.0, 0.0, -1.0, 0.5};
constexpr std::array<double, 7> kD3A4{1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8};

Stencil stencil_for(int order, int accuracy) {
    if (accuracy != 2 && accuracy != 4)
        throw DimensionError("fd_partial: accuracy must be 2 or 4");
    switch (order) {
        case 1: return accuracy == 2 ? Stencil{1, kD1A2} : Stencil{2, kD1A4};
        case 2: return accuracy == 2 ? Stencil{1, kD2A2} : Stencil{2, kD2A4};
        case 3: return accuracy == 2 ? Stencil{2, kD3A2} : Stencil{3, kD3A4};
        default: throw DimensionError("fd_partial: order must be 1..3");
    }
}

template <typename T>
Field<T> fd_partial_impl(const Field<T>& f, Var var, int order, int accuracy) {
    const Stencil st = stencil_for(order, accuracy);
    const Grid& g = f.grid;
    const int npoints = var == Var::X ? g.nx : g.nt;
    if (npoints < 2 * st.halfwidth + 1)
        throw StencilTooWide("fd_partial: stencil wider than the grid");
    const double h = var == Var::X ? g.dx : g.dt;
    const double hp = std::pow(h, order);

    Field<T> out = f;
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.nt; ++j) {
            const int pos = var == Var::X ? i : j;
            bool valid = pos >= st.halfwidth && pos < npoints - st.halfwidth;
            if (valid) {
                for (int k = -st.halfwidth; k <= st.halfwidth && valid; ++k)
                    valid = var == Var::X ? f.ok(i + k, j) : f.ok(i, j + k);
            }
            if (!valid) {
                out.mask[g.index(i, j)] = 0;
                continue;
            }
            T acc = st.weights[0] * (var == Var::X ? f.at(i - st.halfwidth, j)
                                                   : f.at(i, j - st.halfwidth));
            for (int k = -st.halfwidth + 1; k <= st.halfwidth; ++k)
                acc += st.weights[k + st.halfwidth] *
                       (var == Var::X ? f.at(i + k, j) : f.at(i, j + k));
            out.at(i, j) = acc / hp;
            out.mask[g.index(i, j)] = 1;
        }
    }
    return out;
}

/// Elementwise combination over shared grids; output masked where any input is.
template <typename T, typename Fn>
Field<T> combine(const std::vector<const Field<T>*>& inputs, Fn&& fn) {
    Field<T> out = *inputs.front();
    const Grid& g = out.grid;
    std::vector<const T*> vals(inputs.size());
    for (int idx = 0; idx < g.size(); ++idx) {
        bool valid = true;
        for (size_t k = 0; k < inputs.size(); ++k) {
            valid = valid && inputs[k]->mask[idx] != 0;
            vals[k] = &inputs[k]->values[idx];
        }
        out.mask[idx] = valid ? 1 : 0;
        if (valid) out.values[idx] = fn(vals);
    }
    return out;
}

void run_parallel(int count, const std::function<void(int)>& body) {
    const int workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += workers) body(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

void apply_relative_tau_mask(ScalarField& tau, std::vector<std::uint8_t>& shared_mask,
                             double mask_rel) {
    if (mask_rel <= 0.0) return;
    double max_abs = 0.0;
    for (int idx = 0; idx < tau.grid.size(); ++idx)
        if (shared_mask[idx]) max_abs = std::max(max_abs, std::abs(tau.values[idx]));
    for (int idx = 0; idx < tau.grid.size(); ++idx)
        if (shared_mask[idx] && std::abs(tau.values[idx]) < mask_rel * max_abs) shared_mask[idx] = 0;
}

}  // namespace

void validate_grid(const Grid& g) {
    if (g.nx < 7 || g.nt < 7)
        throw DimensionError("grid: nx and nt must be at least 7");
    if (g.dx <= 0.0 || g.dt <= 0.0) throw DimensionError("grid: dx and dt must be positive");
}

ScalarField make_scalar_field(const Grid& g) {
    return {g, std::vector<Complex>(g.size(), Complex{}), std::vector<std::uint8_t>(g.size(), 1)};
}

MatrixField make_matrix_field(const Grid& g, Eigen::Index rows, Eigen::Index cols) {
    return {g, std::vector<ComplexMatrix>(g.size(), ComplexMatrix::Zero(rows, cols)),
            std::vector<std::uint8_t>(g.size(), 1)};
}

ScalarField fd_partial(const ScalarField& f, Var var, int order, int accuracy) {
    return fd_partial_impl(f, var, order, accuracy);
}

MatrixField fd_partial(const MatrixField& f, Var var, int order, int accuracy) {
    return fd_partial_impl(f, var, order, accuracy);
}

ScalarField unwrapped_log(const ScalarField& tau) {
    const Grid& g = tau.grid;
    ScalarField log_tau = tau;
    for (int j = 0; j < g.nt; ++j) {
        double prev_arg = 0.0;
        bool have_prev = false;
        for (int i = 0; i < g.nx; ++i) {
            const int idx = g.index(i, j);
            if (!tau.mask[idx]) {
                have_prev = false;
                continue;
            }
            const Complex v = tau.values[idx];
            double arg = std::arg(v);
            if (have_prev) {
                // Continue the branch from the previous node of this row.
                const double two_pi = 2.0 * std::numbers::pi;
                while (arg - prev_arg > std::numbers::pi) arg -= two_pi;
                while (arg - prev_arg < -std::numbers::pi) arg += two_pi;
                if (std::abs(arg - prev_arg) > std::numbers::pi / 2.0)
                    throw BranchCut("unwrapped_log: arg(tau) jump exceeds pi/2");
            }
            prev_arg = arg;
            have_prev = true;
            log_tau.values[idx] = Complex(std::log(std::abs(v)), arg);
        }
    }
    return log_tau;
}

TauObservables observables_from_tau(const ScalarField& tau, int x_accuracy) {
    const Grid& g = tau.grid;
    const ScalarField log_tau = unwrapped_log(tau);
    TauObservables out;
    out.q = fd_partial(log_tau, Var::X, 2, x_accuracy);
    for (int idx = 0; idx < g.size(); ++idx)
        if (out.q.mask[idx]) out.q.values[idx] *= -2.0;
    out.beta = fd_partial(tau, Var::X, 1, x_accuracy);
    return out;
}

const char* to_string(EquationId id) {
    switch (id) {
        case EquationId::Kdv: return "kdv";
        case EquationId::Enls: return "enls";
        case EquationId::CanSys: return "cansys";
        case EquationId::KdvGen: return "kdv_gen";
        default: return "nls_gen";
    }
}

EquationId equation_from_string(const std::string& name) {
    if (name == "kdv") return EquationId::Kdv;
    if (name == "enls") return EquationId::Enls;
    if (name == "cansys") return EquationId::CanSys;
    if (name == "kdv_gen") return EquationId::KdvGen;
    if (name == "nls_gen") return EquationId::NlsGen;
    throw ConfigError("unknown equation id: " + name);
}

ResidualReport summarize(const ScalarField& residual, const std::string& id) {
    ResidualReport rep;
    rep.equation_id = id;
    rep.dx = residual.grid.dx;
    rep.dt = residual.grid.dt;
    double sum2 = 0.0;
    for (int idx = 0; idx < residual.grid.size(); ++idx) {
        if (!residual.mask[idx]) continue;
        const double a = std::abs(residual.values[idx]);
        rep.max_abs = std::max(rep.max_abs, a);
        sum2 += a * a;
        ++rep.interior_node_count;
    }
    rep.l2 = std::sqrt(sum2);
    return rep;
}

ResidualReport summarize(const MatrixField& residual, const std::string& id) {
    ResidualReport rep;
    rep.equation_id = id;
    rep.dx = residual.grid.dx;
    rep.dt = residual.grid.dt;
    double sum2 = 0.0;
    for (int idx = 0; idx < residual.grid.size(); ++idx) {
        if (!residual.mask[idx]) continue;
        rep.max_abs = std::max(rep.max_abs, residual.values[idx].cwiseAbs().maxCoeff());
        sum2 += residual.values[idx].squaredNorm();
        ++rep.interior_node_count;
    }
    rep.l2 = std::sqrt(sum2);
    return rep;
}

ResidualReport residual_pde(EquationId id, const PdeFields& fields, const PdeConstants& constants,
                            FdAccuracy acc) {
    switch (id) {
        case EquationId::Kdv: {
            if (!fields.q) throw MissingField("residual_pde(kdv): q field required");
            const ScalarField& q = *fields.q;
            const ScalarField qt = fd_partial(q, Var::T, 1, acc.t);
            const ScalarField qx = fd_partial(q, Var::X, 1, acc.x);
            const ScalarField qxxx = fd_partial(q, Var::X, 3, acc.x);
            auto r = combine<Complex>({&qt, &q, &qx, &qxxx}, [](const auto& v) {
                return *v[0] + 1.5 * (*v[1]) * (*v[2]) - 0.25 * (*v[3]);
            });
            return summarize(r, "kdv");
        }
        case EquationId::Enls: {
            if (!fields.y) throw MissingField("residual_pde(enls): y field required");
            const ScalarField& y = *fields.y;
            const ScalarField yt = fd_partial(y, Var::T, 1, acc.t);
            const ScalarField yxx = fd_partial(y, Var::X, 2, acc.x);
            auto r = combine<Complex>({&yt, &yxx, &y}, [](const auto& v) {
                return kI * (*v[0]) + (*v[1]) + 2.0 * std::norm(*v[2]) * (*v[2]);
            });
            return summarize(r, "enls");
        }
        case EquationId::CanSys: {
            if (!fields.beta) throw MissingField("residual_pde(cansys): beta field required");
            const ScalarField& beta = *fields.beta;
            ScalarField bx = fd_partial(beta, Var::X, 1, acc.x);
            const ScalarField bxx = fd_partial(beta, Var::X, 2, acc.x);
            const ScalarField bxxx = fd_partial(beta, Var::X, 3, acc.x);
            const ScalarField bt = fd_partial(beta, Var::T, 1, acc.t);
            const ScalarField btt = fd_partial(beta, Var::T, 2, acc.t);
            // Mask the beta' division where it is numerically singular. The
            // second floor guards degenerate fields whose x-differences are
            // pure rounding noise.
            double bx_max = 0.0, beta_scale = 0.0;
            for (int idx = 0; idx < bx.grid.size(); ++idx) {
                if (bx.mask[idx]) bx_max = std::max(bx_max, std::abs(bx.values[idx]));
                if (beta.mask[idx]) beta_scale = std::max(beta_scale, std::abs(beta.values[idx]));
            }
            const double noise_floor = 64.0 * 2.2e-16 * beta_scale / beta.grid.dx;
            const double floor = std::max(constants.beta_prime_floor * bx_max, noise_floor);
            int kept = 0;
            for (int idx = 0; idx < bx.grid.size(); ++idx) {
                if (bx.mask[idx] && std::abs(bx.values[idx]) <= floor) bx.mask[idx] = 0;
                kept += bx.mask[idx];
            }
            if (kept == 0) throw DivisionMasked("residual_pde(cansys): beta' vanishes everywhere");
            auto inner = combine<Complex>({&bx, &bxxx, &bt, &bxx}, [](const auto& v) {
                return -0.5 * (*v[0]) * (*v[0]) - 0.25 * (*v[1]) +
                       ((*v[2]) * (*v[2]) + 0.25 * (*v[3]) * (*v[3])) / (*v[0]);
            });
            const ScalarField dinner = fd_partial(inner, Var::X, 1, acc.x);
            auto r = combine<Complex>({&btt, &dinner},
                                      [](const auto& v) { return *v[0] - *v[1]; });
            return summarize(r, "cansys");
        }
        case EquationId::KdvGen: {
            if (!fields.h12) throw MissingField("residual_pde(kdv_gen): h12 field required");
            if (constants.gamma.rows() != 2) throw MissingField("residual_pde(kdv_gen): gamma constants required");
            const Complex g11 = constants.gamma(0, 0);
            const Complex g12 = constants.gamma(0, 1);
            const Complex g21 = constants.gamma(1, 0);
            const ScalarField& h = *fields.h12;
            const ScalarField ht = fd_partial(h, Var::T, 1, acc.t);
            const ScalarField hx = fd_partial(h, Var::X, 1, acc.x);
            const ScalarField hxxx = fd_partial(h, Var::X, 3, acc.x);
            auto r = combine<Complex>({&ht, &hx, &hxxx}, [&](const auto& v) {
                return 4.0 * kI * g12 * (*v[0]) - 4.0 * (g11 * g11 + g12 * g21) * (*v[1]) +
                       6.0 * (*v[1]) * (*v[1]) + (*v[2]);
            });
            return summarize(r, "kdv_gen");
        }
        case EquationId::NlsGen: {
            if (!fields.h12 || !fields.h21)
                throw MissingField("residual_pde(nls_gen): h12 and h21 fields required");
            if (constants.gamma.rows() != 2) throw MissingField("residual_pde(nls_gen): gamma constants required");
            const Complex a = constants.a;
            const Complex g11 = constants.gamma(0, 0);
            const Complex g12 = constants.gamma(0, 1);
            const Complex g21 = constants.gamma(1, 0);
            const ScalarField& h = *fields.h12;
            const ScalarField ht = fd_partial(h, Var::T, 1, acc.t);
            const ScalarField hx = fd_partial(h, Var::X, 1, acc.x);
            const ScalarField hxx = fd_partial(h, Var::X, 2, acc.x);
            auto r = combine<Complex>({&ht, &hxx, &hx, &h, fields.h21}, [&](const auto& v) {
                const Complex h12 = *v[3];
                const Complex h21 = *v[4];
                return 2.0 * a * (*v[0]) -
                       (kI * (*v[1]) - 2.0 * kI * g11 * (*v[2]) +
                        2.0 * kI * (2.0 * a * h12 * h21 - g21 * h12 + g12 * h21) *
                            (g12 + 2.0 * a * h12));
            });
            return summarize(r, "nls_gen");
        }
    }
    throw ConfigError("residual_pde: unknown equation");
}

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("VESSELKIT_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) hw = std::min(hw, cap);
    }
    return hw;
}

VesselFieldSet sample_vessel(const Realization& r, const Grid& g, const SampleOptions& opts) {
    validate_grid(g);
    VesselFieldSet out{make_scalar_field(g),
                       make_matrix_field(g, r.outer_dim(), r.outer_dim()),
                       make_matrix_field(g, r.outer_dim(), r.outer_dim())};
    out.tau_normalized = r.anchor_invertible;

    run_parallel(g.nx, [&](int i) {
        for (int j = 0; j < g.nt; ++j) {
            const int idx = g.index(i, j);
            try {
                const VesselEvaluation ev = evaluate(r, g.x(i), g.t(j), opts.tau_min);
                if (!std::isfinite(ev.tau.real()) || !all_finite(ev.h0) ||
                    !all_finite(ev.gamma_star)) {
                    out.tau.mask[idx] = 0;
                    continue;
                }
                out.tau.values[idx] = ev.tau;
                out.h0.values[idx] = ev.h0;
                out.gamma_star.values[idx] = ev.gamma_star;
            } catch (const SingularX&) {
                out.tau.mask[idx] = 0;
            }
        }
    });
    std::vector<std::uint8_t>& mask = out.tau.mask;
    apply_relative_tau_mask(out.tau, mask, opts.mask_rel);
    out.h0.mask = mask;
    out.gamma_star.mask = mask;
    for (int idx = 0; idx < g.size(); ++idx) out.masked_nodes += mask[idx] == 0;
    return out;
}

std::vector<MatrixField> sample_moments(const Realization& r, const Grid& g, int n_max,
                                        const SampleOptions& opts) {
    validate_grid(g);
    std::vector<MatrixField> out(static_cast<size_t>(n_max) + 1,
                                 make_matrix_field(g, r.outer_dim(), r.outer_dim()));
    ScalarField tau = make_scalar_field(g);
    run_parallel(g.nx, [&](int i) {
        for (int j = 0; j < g.nt; ++j) {
            const int idx = g.index(i, j);
            try {
                const std::vector<ComplexMatrix> h = moments(r, g.x(i), g.t(j), n_max, opts.tau_min);
                bool finite = true;
                for (int n = 0; n <= n_max; ++n) finite = finite && all_finite(h[n]);
                if (!finite) {
                    tau.mask[idx] = 0;
                    continue;
                }
                for (int n = 0; n <= n_max; ++n) out[n].values[idx] = h[n];
                tau.values[idx] = evaluate(r, g.x(i), g.t(j), opts.tau_min).tau;
            } catch (const SingularX&) {
                tau.mask[idx] = 0;
            }
        }
    });
    apply_relative_tau_mask(tau, tau.mask, opts.mask_rel);
    for (auto& f : out) f.mask = tau.mask;
    return out;
}

ScalarField entry_field(const MatrixField& f, int row, int col) {
    ScalarField out = make_scalar_field(f.grid);
    out.mask = f.mask;
    for (int idx = 0; idx < f.grid.size(); ++idx)
        if (f.mask[idx]) out.values[idx] = f.values[idx](row, col);
    return out;
}

std::vector<ResidualReport> check_moment_recurrence(const Realization& r, const Grid& g, int n_max,
                                                    const SampleOptions& opts, FdAccuracy acc) {
    const std::vector<MatrixField> h = sample_moments(r, g, n_max, opts);
    const VesselFieldSet vf = sample_vessel(r, g, opts);
    const ComplexMatrix s1 = r.params.sigma1;
    const ComplexMatrix s1_inv = s1.inverse();
    const ComplexMatrix s2 = r.params.sigma2;
    const ComplexMatrix gm = r.params.gamma;

    std::vector<ResidualReport> reports;
    for (int n = 0; n < n_max; ++n) {
        const MatrixField hx = fd_partial(h[n], Var::X, 1, acc.x);
        const MatrixField ht = fd_partial(h[n], Var::T, 1, acc.t);
        const MatrixField hx_next = fd_partial(h[n + 1], Var::X, 1, acc.x);
        const MatrixField hx0 = fd_partial(h[0], Var::X, 1, acc.x);

        auto rx = combine<ComplexMatrix>(
            {&h[n + 1], &hx, &h[n], &vf.gamma_star},
            [&](const auto& v) -> ComplexMatrix {
                return s1_inv * s2 * (*v[0]) - (*v[0]) * s2 * s1_inv - (*v[1]) +
                       s1_inv * (*v[3]) * (*v[2]) - (*v[2]) * gm * s1_inv;
            });
        reports.push_back(summarize(rx, "dh" + std::to_string(n) + "_x"));

        auto rt = combine<ComplexMatrix>(
            {&ht, &hx_next, &hx0, &h[n]},
            [&](const auto& v) -> ComplexMatrix {
                return (*v[0]) - kI * (*v[1]) - kI * (*v[2]) * s1 * (*v[3]);
            });
        reports.push_back(summarize(rt, "dh" + std::to_string(n) + "_t"));
    }
    return reports;
}

ResidualReport check_trace_relations(const Realization& r, const ComplexMatrix& k, const Grid& g,
                                     int n, const SampleOptions& opts, FdAccuracy acc) {
    const std::vector<MatrixField> h = sample_moments(r, g, n + 1, opts);
    const VesselFieldSet vf = sample_vessel(r, g, opts);
    const ComplexMatrix s1 = r.params.sigma1;
    const ComplexMatrix s1_inv = s1.inverse();
    const ComplexMatrix m = s1_inv * r.params.sigma2;
    const ComplexMatrix gm = r.params.gamma;
    const ComplexMatrix comm = k * m - m * k;
    const bool commutes = comm.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + matrix_scale(k) * matrix_scale(m));

    const MatrixField hx = fd_partial(h[n], Var::X, 1, acc.x);
    if (commutes) {
        auto res = combine<ComplexMatrix>(
            {&hx, &h[n], &vf.gamma_star},
            [&](const auto& v) -> ComplexMatrix {
                const Complex lhs = (k * (*v[0]) * s1).trace();
                const Complex rhs = ((s1 * k * s1_inv * (*v[2]) - gm * k) * (*v[1])).trace();
                ComplexMatrix out(1, 1);
                out(0, 0) = lhs - rhs;
                return out;
            });
        return summarize(res, "kcomm_n" + std::to_string(n));
    }
    auto res = combine<ComplexMatrix>(
        {&hx, &h[n], &vf.gamma_star, &h[n + 1]},
        [&](const auto& v) -> ComplexMatrix {
            const Complex lhs = (comm * (*v[3]) * s1).trace();
            const Complex rhs =
                (k * (*v[0]) * s1 - k * s1_inv * (*v[2]) * (*v[1]) * s1 + k * (*v[1]) * gm).trace();
            ComplexMatrix out(1, 1);
            out(0, 0) = lhs - rhs;
            return out;
        });
    return summarize(res, "knotcomm_n" + std::to_string(n));
}

ResidualReport check_gamma_star_evolution(const Realization& r, const Grid& g,
                                          const SampleOptions& opts, FdAccuracy acc) {
    const VesselFieldSet vf = sample_vessel(r, g, opts);
    const ComplexMatrix s1 = r.params.sigma1;
    const MatrixField gst = fd_partial(vf.gamma_star, Var::T, 1, acc.t);
    const MatrixField h0x = fd_partial(vf.h0, Var::X, 1, acc.x);
    const MatrixField h0xx = fd_partial(vf.h0, Var::X, 2, acc.x);
    auto res = combine<ComplexMatrix>(
        {&gst, &vf.gamma_star, &h0x, &h0xx},
        [&](const auto& v) -> ComplexMatrix {
            return (*v[0]) + kI * (*v[1]) * (*v[2]) * s1 - kI * s1 * (*v[3]) * s1 -
                   kI * s1 * (*v[2]) * (*v[1]);
        });
    return summarize(res, "gamma_star_t");
}

std::vector<ResidualReport> check_backlund(const Realization& r, Complex lambda,
                                           const ComplexVector& u0, const Grid& g,
                                           const SampleOptions& opts, FdAccuracy acc) {
    validate_grid(g);
    const Eigen::Index e = r.outer_dim();
    MatrixField y = make_matrix_field(g, e, 1);
    run_parallel(g.nx, [&](int i) {
        for (int j = 0; j < g.nt; ++j) {
            const int idx = g.index(i, j);
            try {
                ComplexMatrix value = backlund_output(r, lambda, u0, g.x(i), g.t(j), opts.tau_min);
                if (!all_finite(value)) {
                    y.mask[idx] = 0;
                    continue;
                }
                y.values[idx] = std::move(value);
            } catch (const SingularX&) {
                y.mask[idx] = 0;
            }
        }
    });
    const VesselFieldSet vf = sample_vessel(r, g, opts);
    for (int idx = 0; idx < g.size(); ++idx)
        y.mask[idx] = y.mask[idx] && vf.tau.mask[idx];

    const ComplexMatrix s1 = r.params.sigma1;
    const ComplexMatrix s2 = r.params.sigma2;
    const MatrixField yx = fd_partial(y, Var::X, 1, acc.x);
    const MatrixField yt = fd_partial(y, Var::T, 1, acc.t);
    const MatrixField h0x = fd_partial(vf.h0, Var::X, 1, acc.x);

    auto rx = combine<ComplexMatrix>(
        {&yx, &y, &vf.gamma_star},
        [&](const auto& v) -> ComplexMatrix {
            return s1 * (*v[0]) - lambda * s2 * (*v[1]) - (*v[2]) * (*v[1]);
        });
    auto rt = combine<ComplexMatrix>(
        {&yt, &yx, &h0x, &y},
        [&](const auto& v) -> ComplexMatrix {
            return s1 * (*v[0]) - kI * lambda * s1 * (*v[1]) - kI * s1 * (*v[2]) * s1 * (*v[3]);
        });
    return {summarize(rx, "backlund_x"), summarize(rt, "backlund_t")};
}

std::vector<ResidualReport> check_input_wave(const VesselParameters& p, Complex lambda,
                                             const ComplexVector& u0, const Grid& g,
                                             FdAccuracy acc) {
    validate_grid(g);
    MatrixField u = make_matrix_field(g, p.dim(), 1);
    run_parallel(g.nx, [&](int i) {
        for (int j = 0; j < g.nt; ++j)
            u.values[g.index(i, j)] = input_wave(p, lambda, u0, g.x(i), g.t(j));
    });
    const MatrixField ux = fd_partial(u, Var::X, 1, acc.x);
    const MatrixField ut = fd_partial(u, Var::T, 1, acc.t);
    const ComplexMatrix s1 = p.sigma1;
    const ComplexMatrix coeff = lambda * p.sigma2 + p.gamma;
    auto rx = combine<ComplexMatrix>(
        {&ux, &u},
        [&](const auto& v) -> ComplexMatrix { return s1 * (*v[0]) - coeff * (*v[1]); });
    auto rt = combine<ComplexMatrix>(
        {&ut, &ux},
        [&](const auto& v) -> ComplexMatrix { return s1 * (*v[0]) - kI * lambda * s1 * (*v[1]); });
    return {summarize(rx, "input_x"), summarize(rt, "input_t")};
}

ResidualReport check_lyapunov(const Realization& r, const Grid& g, const SampleOptions& opts) {
    validate_grid(g);
    MatrixField res = make_matrix_field(g, r.inner_dim(), r.inner_dim());
    run_parallel(g.nx, [&](int i) {
        for (int j = 0; j < g.nt; ++j) {
            const int idx = g.index(i, j);
            try {
                const VesselEvaluation ev = evaluate(r, g.x(i), g.t(j), opts.tau_min);
                res.values[idx] =
                    r.a * ev.x_op + ev.x_op * r.a_zeta + ev.b * r.params.sigma1 * ev.c;
            } catch (const SingularX&) {
                res.mask[idx] = 0;
            }
        }
    });
    return summarize(res, "lyapunov");
}

}  // namespace vesselkit
