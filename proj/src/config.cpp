#include "vesselkit/config.hpp"

#include <fstream>

namespace vesselkit {

namespace {

double number_from(const Json& j, const char* what) {
    if (!j.is_number()) throw ConfigError(std::string("expected a number for ") + what);
    return j.get<double>();
}

}  // namespace

Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError("complex values must be [re, im] arrays");
    return {j[0].get<double>(), j[1].get<double>()};
}

ComplexMatrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ConfigError("matrices must be row-major nested arrays");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols)
            throw ConfigError("matrix rows must all have the same length");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
    }
    return m;
}

ComplexVector vector_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("vectors must be arrays of [re, im]");
    ComplexVector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = complex_from_json(j[i]);
    return v;
}

Json to_json(Complex z) {
    // +0.0 normalizes negative zeros out of the reports.
    return Json::array({z.real() + 0.0, z.imag() + 0.0});
}

Json to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

ExperimentConfig parse_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    ExperimentConfig c;

    if (!j.contains("parameters")) throw ConfigError("config: missing parameters section");
    const Json& pj = j.at("parameters");
    for (const char* key : {"sigma1", "sigma2", "gamma"})
        if (!pj.contains(key)) throw ConfigError(std::string("parameters: missing ") + key);
    c.parameters = {matrix_from_json(pj.at("sigma1")), matrix_from_json(pj.at("sigma2")),
                    matrix_from_json(pj.at("gamma"))};

    if (j.contains("realization")) {
        c.has_realization = true;
        const Json& rj = j.at("realization");
        if (rj.contains("soliton")) {
            c.is_soliton = true;
            const Json& sj = rj.at("soliton");
            const std::string kind = sj.value("kind", "");
            if (kind == "generalized_kdv")
                c.soliton.kind = SolitonKind::GeneralizedKdV;
            else if (kind == "generalized_nls")
                c.soliton.kind = SolitonKind::GeneralizedNLS;
            else
                throw ConfigError("soliton: kind must be generalized_kdv or generalized_nls");
            c.soliton.a_op = complex_from_json(sj.at("A"));
            c.soliton.a_zeta = sj.contains("A_zeta") ? complex_from_json(sj.at("A_zeta")) : Complex{};
            if (sj.contains("a")) c.soliton.a = complex_from_json(sj.at("a"));
            c.soliton.gamma = sj.contains("gamma") ? matrix_from_json(sj.at("gamma"))
                                                   : ComplexMatrix::Zero(2, 2);
            c.soliton.b1 = sj.contains("B1") ? complex_from_json(sj.at("B1")) : Complex{1.0};
            c.soliton.b2 = sj.contains("B2") ? complex_from_json(sj.at("B2")) : Complex{};
            c.soliton.c1 = sj.contains("C1") ? complex_from_json(sj.at("C1")) : Complex{1.0};
            c.soliton.c2 = sj.contains("C2") ? complex_from_json(sj.at("C2")) : Complex{};
            c.soliton.symmetric = sj.value("symmetric", false);
        } else {
            for (const char* key : {"A", "A_zeta", "B0", "C0"})
                if (!rj.contains(key)) throw ConfigError(std::string("realization: missing ") + key);
            c.a = matrix_from_json(rj.at("A"));
            c.a_zeta = matrix_from_json(rj.at("A_zeta"));
            c.b0 = matrix_from_json(rj.at("B0"));
            c.c0 = matrix_from_json(rj.at("C0"));
            if (rj.contains("anchor")) {
                const Json& aj = rj.at("anchor");
                if (!aj.is_array() || aj.size() != 2)
                    throw ConfigError("realization: anchor must be [x0, t0]");
                c.x0 = number_from(aj[0], "anchor x0");
                c.t0 = number_from(aj[1], "anchor t0");
            }
        }
    }

    if (j.contains("grid")) {
        c.has_grid = true;
        const Json& gj = j.at("grid");
        for (const char* key : {"x_start", "t_start", "dx", "dt", "nx", "nt"})
            if (!gj.contains(key)) throw ConfigError(std::string("grid: missing ") + key);
        c.grid = {number_from(gj.at("x_start"), "x_start"), number_from(gj.at("t_start"), "t_start"),
                  number_from(gj.at("dx"), "dx"),           number_from(gj.at("dt"), "dt"),
                  gj.at("nx").get<int>(),                   gj.at("nt").get<int>()};
        validate_grid(c.grid);
    }

    if (j.contains("observables"))
        for (const Json& o : j.at("observables")) c.observables.push_back(o.get<std::string>());

    if (j.contains("checks")) {
        for (const Json& ch : j.at("checks")) {
            if (ch.is_string())
                c.checks.push_back({ch.get<std::string>(), 1e-6});
            else if (ch.is_object())
                c.checks.push_back({ch.at("name").get<std::string>(), ch.value("tolerance", 1e-6)});
            else
                throw ConfigError("checks entries must be names or {name, tolerance}");
        }
    }

    if (j.contains("lambdas"))
        for (const Json& l : j.at("lambdas")) c.lambdas.push_back(complex_from_json(l));
    if (j.contains("u0")) c.u0 = vector_from_json(j.at("u0"));
    if (j.contains("transform")) {
        const Json& tj = j.at("transform");
        TransformConfig tc;
        tc.kind = tj.value("kind", "");
        if (tc.kind != "first" && tc.kind != "second" && tc.kind != "internal")
            throw ConfigError("transform: kind must be first, second or internal");
        if (tc.kind == "second") {
            tc.k2 = complex_from_json(tj.at("k2"));
            tc.k = complex_from_json(tj.at("k"));
        } else {
            tc.u = matrix_from_json(tj.at("U"));
            tc.v = matrix_from_json(tj.at("V"));
        }
        c.transform = tc;
    }
    c.trace_k = j.contains("trace_k") ? matrix_from_json(j.at("trace_k"))
                                      : ComplexMatrix(ComplexMatrix::Identity(c.parameters.dim(),
                                                                              c.parameters.dim()));
    c.trace_n = j.value("trace_n", 0);
    c.moment_n = j.value("moment_n", 3);
    c.y_entry = j.value("y_entry", "h12");

    if (j.contains("output")) {
        c.out_dir = j.at("output").value("dir", ".");
        c.stem = j.at("output").value("stem", "");
    }
    c.tau_min = j.value("tau_min", 1e-10);
    c.mask_rel = j.value("mask_rel", 0.0);
    c.halving = j.value("halving", false);
    c.accuracy.x = j.value("x_accuracy", 4);
    c.accuracy.t = j.value("t_accuracy", 2);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
    }
    return parse_config(j);
}

Json resolved_config(const ExperimentConfig& c) {
    Json j;
    j["parameters"] = {{"sigma1", to_json(c.parameters.sigma1)},
                       {"sigma2", to_json(c.parameters.sigma2)},
                       {"gamma", to_json(c.parameters.gamma)}};
    if (c.has_realization) {
        if (c.is_soliton) {
            Json sj;
            sj["kind"] =
                c.soliton.kind == SolitonKind::GeneralizedKdV ? "generalized_kdv" : "generalized_nls";
            sj["A"] = to_json(c.soliton.a_op);
            sj["A_zeta"] = to_json(c.soliton.a_zeta);
            sj["a"] = to_json(c.soliton.a);
            sj["gamma"] = to_json(c.soliton.gamma);
            sj["B1"] = to_json(c.soliton.b1);
            sj["B2"] = to_json(c.soliton.b2);
            sj["C1"] = to_json(c.soliton.c1);
            sj["C2"] = to_json(c.soliton.c2);
            sj["symmetric"] = c.soliton.symmetric;
            j["realization"] = {{"soliton", sj}};
        } else {
            j["realization"] = {{"A", to_json(c.a)},
                                {"A_zeta", to_json(c.a_zeta)},
                                {"B0", to_json(c.b0)},
                                {"C0", to_json(c.c0)},
                                {"anchor", Json::array({c.x0, c.t0})}};
        }
    }
    if (c.has_grid)
        j["grid"] = {{"x_start", c.grid.x_start}, {"t_start", c.grid.t_start}, {"dx", c.grid.dx},
                     {"dt", c.grid.dt},           {"nx", c.grid.nx},           {"nt", c.grid.nt}};
    j["observables"] = c.observables;
    Json checks = Json::array();
    for (const CheckSpec& ch : c.checks)
        checks.push_back({{"name", ch.name}, {"tolerance", ch.tolerance}});
    j["checks"] = checks;
    Json lambdas = Json::array();
    for (Complex l : c.lambdas) lambdas.push_back(to_json(l));
    j["lambdas"] = lambdas;
    if (c.u0) {
        Json u = Json::array();
        for (Eigen::Index i = 0; i < c.u0->size(); ++i) u.push_back(to_json((*c.u0)(i)));
        j["u0"] = u;
    }
    if (c.transform) {
        Json tj;
        tj["kind"] = c.transform->kind;
        if (c.transform->kind == "second") {
            tj["k2"] = to_json(c.transform->k2);
            tj["k"] = to_json(c.transform->k);
        } else {
            tj["U"] = to_json(c.transform->u);
            tj["V"] = to_json(c.transform->v);
        }
        j["transform"] = tj;
    }
    j["trace_k"] = to_json(c.trace_k);
    j["trace_n"] = c.trace_n;
    j["moment_n"] = c.moment_n;
    j["y_entry"] = c.y_entry;
    j["output"] = {{"dir", c.out_dir}, {"stem", c.stem}};
    j["tau_min"] = c.tau_min;
    j["mask_rel"] = c.mask_rel;
    j["halving"] = c.halving;
    j["x_accuracy"] = c.accuracy.x;
    j["t_accuracy"] = c.accuracy.t;
    return j;
}

BuiltRealization build_realization(const ExperimentConfig& c) {
    if (!c.has_realization) throw ConfigError("config: missing realization section");
    BuiltRealization out;
    if (c.is_soliton) {
        if (c.soliton.kind == SolitonKind::GeneralizedKdV) {
            KdvSoliton s = build_kdv_soliton(c.soliton);
            out.realization = s.realization;
            out.soliton_sign = s.sign;
        } else {
            NlsSoliton s = build_nls_soliton(c.soliton);
            out.realization = s.realization;
            out.soliton_sign = s.sign;
        }
        return out;
    }
    out.realization = make_realization(c.a, c.a_zeta, c.b0, c.c0, c.parameters, c.x0, c.t0);
    return out;
}

}  // namespace vesselkit
