#include "io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

namespace ntk::io {

namespace {

std::string indexed(const std::string& field, std::size_t i) { return field + "[" + std::to_string(i) + "]"; }

void require(bool ok, const std::string& msg) {
    if (!ok) throw InputError(msg);
}

double number_from_json(const json& j, const std::string& field) {
    require(j.is_number(), "field " + field + ": expected a number, got " + std::string(j.type_name()));
    const double v = j.get<double>();
    require(std::isfinite(v), "field " + field + ": value is not finite");
    return v;
}

void format_double(std::string& out, double v) {
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
    // Keep doubles recognizable as floating point on reload.
    if (std::string_view(buf).find_first_of(".eE") == std::string_view::npos) out += ".0";
}

void dump_rec(std::string& out, const json& j, int indent, int depth) {
    const auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += json(key).dump();
                out += indent < 0 ? ":" : ": ";
                dump_rec(out, value, indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line; nested arrays break per element.
            const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
            out += '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += flat ? ", " : ",";
                first = false;
                if (!flat) newline(depth + 1);
                dump_rec(out, e, indent, depth + 1);
            }
            if (!flat) newline(depth);
            out += ']';
            return;
        }
        case json::value_t::number_float:
            format_double(out, j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

}  // namespace

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(source + ": " + e.what());
    }
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str(), path.string());
}

std::complex<double> complex_from_json(const json& j, const std::string& field) {
    if (j.is_number()) return {number_from_json(j, field), 0.0};
    require(j.is_array() && j.size() == 2, "field " + field + ": expected [re, im] or a real number");
    return {number_from_json(j[0], field + "[0]"), number_from_json(j[1], field + "[1]")};
}

json complex_to_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

CMatrix<double> matrix_from_json(const json& j, const std::string& field) {
    require(j.is_array(), "field " + field + ": expected an array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        require(j[i].is_array(), "field " + indexed(field, i) + ": expected a row array");
        if (i == 0) cols = j[i].size();
        require(j[i].size() == cols, "field " + indexed(field, i) + ": row has " + std::to_string(j[i].size()) +
                                         " entries, expected " + std::to_string(cols));
    }
    CMatrix<double> m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cols; ++k)
            m(static_cast<Index>(i), static_cast<Index>(k)) = complex_from_json(j[i][k], indexed(indexed(field, i), k));
    return m;
}

json matrix_to_json(const CMatrix<double>& m) {
    json out = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
        out.push_back(std::move(row));
    }
    return out;
}

Tolerances tolerances_from_json(const json& j, Tolerances t) {
    require(j.is_object(), "field tolerances: expected an object");
    for (const auto& [key, value] : j.items()) {
        const std::string f = "tolerances." + key;
        if (key == "stein_max_doublings") {
            require(value.is_number_integer() && value.get<long long>() > 0, "field " + f + ": expected a positive integer");
            t.stein_max_doublings = value.get<int>();
            continue;
        }
        double* slot = key == "rank"               ? &t.rank
                       : key == "inertia"          ? &t.inertia
                       : key == "stability_margin" ? &t.stability_margin
                       : key == "stein_update"     ? &t.stein_update
                       : key == "stein_residual"   ? &t.stein_residual
                       : key == "max_condition"    ? &t.max_condition
                       : key == "singular_rcond"   ? &t.singular_rcond
                       : key == "pick_cross_check" ? &t.pick_cross_check
                       : key == "hankel_rank"      ? &t.hankel_rank
                       : key == "sup_norm"         ? &t.sup_norm
                       : key == "circle"           ? &t.circle
                                                   : nullptr;
        require(slot != nullptr, "field " + f + ": unknown tolerance");
        const double v = number_from_json(value, f);
        require(v > 0, "field " + f + ": must be positive");
        *slot = v;
    }
    return t;
}

json tolerances_to_json(const Tolerances& t) {
    return json{{"rank", t.rank},
                {"inertia", t.inertia},
                {"stability_margin", t.stability_margin},
                {"stein_update", t.stein_update},
                {"stein_max_doublings", t.stein_max_doublings},
                {"stein_residual", t.stein_residual},
                {"max_condition", t.max_condition},
                {"singular_rcond", t.singular_rcond},
                {"pick_cross_check", t.pick_cross_check},
                {"hankel_rank", t.hankel_rank},
                {"sup_norm", t.sup_norm},
                {"circle", t.circle}};
}

ProblemFile problem_from_json(const json& j, const std::string& source) {
    try {
        require(j.is_object(), "top level: expected an object");
        for (const char* key : {"A", "B", "C", "kappa"})
            require(j.contains(key), std::string("field ") + key + ": missing");
        for (const auto& [key, value] : j.items())
            require(key == "A" || key == "B" || key == "C" || key == "kappa" || key == "seed" || key == "tolerances",
                    "field " + key + ": unknown field");
        const CMatrix<double> a = matrix_from_json(j["A"], "A");
        const CMatrix<double> b = matrix_from_json(j["B"], "B");
        const CMatrix<double> c = matrix_from_json(j["C"], "C");
        require(a.rows() > 0 && a.rows() == a.cols(), "field A: expected a nonempty square matrix");
        require(b.rows() == a.rows(), "field B: has " + std::to_string(b.rows()) + " rows, A is " +
                                          std::to_string(a.rows()) + " x " + std::to_string(a.rows()));
        require(b.cols() > 0, "field B: needs at least one column");
        require(c.cols() == a.rows() && c.rows() > 0, "field C: has " + std::to_string(c.cols()) + " columns, A is " +
                                                          std::to_string(a.rows()) + " x " + std::to_string(a.rows()));
        require(j["kappa"].is_number_integer() && j["kappa"].get<long long>() >= 0,
                "field kappa: expected a nonnegative integer");
        ProblemFile pf{Realization<double>(a, b, c), static_cast<Index>(j["kappa"].get<long long>()), std::nullopt, {}};
        if (j.contains("seed")) {
            require(j["seed"].is_number_unsigned(), "field seed: expected a nonnegative integer");
            pf.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("tolerances")) pf.tol = tolerances_from_json(j["tolerances"]);
        return pf;
    } catch (const InputError& e) {
        throw InputError(source + ": " + e.what());
    }
}

ProblemFile load_problem(const std::filesystem::path& path) { return problem_from_json(read_json_file(path), path.string()); }

json resolvent_to_json(const GammaGeneratingMatrix<double>& a, const SolverReport& report) {
    const auto& rd = a.data();
    json j;
    j["format"] = "ntk-resolvent";
    j["version"] = 1;
    j["dims"] = json{{"n", rd.n}, {"p", rd.p}, {"q", rd.q}, {"m", rd.m}};
    j["kappa1"] = rd.kappa1;
    j["j"] = json::array();
    for (Index i = 0; i < rd.j.size(); ++i) j["j"].push_back(static_cast<int>(rd.j(i)));
    j["A"] = matrix_to_json(rd.realization.A());
    j["B"] = matrix_to_json(rd.realization.B());
    j["C"] = matrix_to_json(rd.realization.C());
    j["M"] = matrix_to_json(rd.M);
    j["N"] = matrix_to_json(rd.N);
    j["Lambda"] = matrix_to_json(rd.Lambda);
    j["Lambda_inv"] = matrix_to_json(rd.Lambda_inv);
    j["G1_star"] = matrix_to_json(rd.G1_star);
    j["diagnostics"] = json{{"condition_Lambda", rd.condition_Lambda},
                            {"hankel_singular_values", report.hankel_spectrum},
                            {"residual_P", report.residual_P},
                            {"residual_Q", report.residual_Q},
                            {"condition_P", report.condition_P},
                            {"pick_cross_discrepancy", report.pick_cross_discrepancy},
                            {"inertia_band", report.inertia_band},
                            {"tolerances", tolerances_to_json(rd.tol)}};
    return j;
}

GammaGeneratingMatrix<double> resolvent_from_json(const json& j, const Tolerances& tol) {
    require(j.is_object() && j.value("format", "") == "ntk-resolvent", "resolvent: missing format tag ntk-resolvent");
    for (const char* key : {"dims", "kappa1", "A", "B", "C", "Lambda", "Lambda_inv"})
        require(j.contains(key), std::string("resolvent field ") + key + ": missing");
    const Realization<double> r(matrix_from_json(j["A"], "A"), matrix_from_json(j["B"], "B"),
                                matrix_from_json(j["C"], "C"));
    const auto& dims = j["dims"];
    require(dims.is_object() && dims.value("n", -1) == r.n() && dims.value("p", -1) == r.p() &&
                dims.value("q", -1) == r.q(),
            "resolvent field dims: inconsistent with A, B, C");
    require(j["kappa1"].is_number_integer() && j["kappa1"].get<long long>() >= 0,
            "resolvent field kappa1: expected a nonnegative integer");
    auto rd = resolvent_from_parts<double>(r, matrix_from_json(j["Lambda"], "Lambda"),
                                           matrix_from_json(j["Lambda_inv"], "Lambda_inv"),
                                           static_cast<Index>(j["kappa1"].get<long long>()), tol);
    if (j.contains("G1_star")) {
        const CMatrix<double> stored = matrix_from_json(j["G1_star"], "G1_star");
        if (stored.rows() != rd.G1_star.rows() || stored.cols() != rd.G1_star.cols() ||
            (stored - rd.G1_star).norm() > tol.pick_cross_check * std::max(1.0, rd.G1_star.norm()))
            throw Error(ErrorKind::CrossCheckFailure, "stored G1_star disagrees with the realization");
    }
    return GammaGeneratingMatrix<double>(std::move(rd));
}

SchurParameter<double> epsilon_from_json(const json& j, Index p, Index q, std::uint64_t seed) {
    require(j.is_object() && j.contains("kind") && j["kind"].is_string(), "epsilon: expected an object with a kind");
    const std::string kind = j["kind"].get<std::string>();
    const auto check_dims = [&](const CMatrix<double>& m, const std::string& field) {
        if (m.rows() != p || m.cols() != q)
            throw Error(ErrorKind::DimensionMismatch, "epsilon field " + field + ": is " + std::to_string(m.rows()) +
                                                          " x " + std::to_string(m.cols()) + ", expected " +
                                                          std::to_string(p) + " x " + std::to_string(q));
    };
    if (kind == "zero") return SchurParameter<double>::zero(p, q);
    if (kind == "constant") {
        require(j.contains("value"), "epsilon field value: missing");
        const CMatrix<double> v = matrix_from_json(j["value"], "value");
        check_dims(v, "value");
        return SchurParameter<double>::constant(v);
    }
    if (kind == "blaschke_scaled") {
        require(j.contains("zeros") && j["zeros"].is_array(), "epsilon field zeros: expected an array");
        require(j.contains("constant"), "epsilon field constant: missing");
        std::vector<std::complex<double>> zeros;
        for (std::size_t i = 0; i < j["zeros"].size(); ++i) zeros.push_back(complex_from_json(j["zeros"][i], indexed("zeros", i)));
        const CMatrix<double> v = matrix_from_json(j["constant"], "constant");
        check_dims(v, "constant");
        return SchurParameter<double>::blaschke_scaled(std::move(zeros), v);
    }
    if (kind == "random") {
        const double norm = j.contains("norm") ? number_from_json(j["norm"], "norm") : 0.9;
        require(norm >= 0 && norm <= 1, "epsilon field norm: must lie in [0, 1]");
        std::mt19937_64 rng(seed);
        CMatrix<double> v = random_complex_normal<double>(p, q, rng);
        const double s = spectral_norm(v);
        if (s > 0) v *= norm / s;
        return SchurParameter<double>::constant(v);
    }
    throw InputError("epsilon field kind: unknown kind '" + kind + "'");
}

json solver_report_to_json(const SolverReport& rep) {
    return json{{"kappa", rep.kappa},
                {"kappa1", rep.kappa1},
                {"solvable", rep.solvable},
                {"hankel_singular_values", rep.hankel_spectrum},
                {"n", rep.minimality.n},
                {"spectral_radius", rep.minimality.spectral_radius},
                {"rank_Xi", rep.minimality.rank_Xi},
                {"rank_Omega", rep.minimality.rank_Omega},
                {"residual_P", rep.residual_P},
                {"residual_Q", rep.residual_Q},
                {"condition_P", rep.condition_P},
                {"pick_kappa1", rep.pick_kappa1},
                {"pick_cross_discrepancy", rep.pick_cross_discrepancy},
                {"inertia_band", rep.inertia_band},
                {"tolerances", tolerances_to_json(rep.tol)}};
}

json verify_report_to_json(const VerifyReport& rep) {
    return json{{"kappa", rep.kappa},
                {"pass", rep.pass},
                {"sup_norm", rep.sup_norm},
                {"hankel_rank", rep.hankel_rank},
                {"difference_hankel_singular_values", rep.difference_hankel_spectrum},
                {"circle_sigma_max", rep.circle_sigma_max},
                {"tail_norm", rep.tail_norm},
                {"aliasing_bound", rep.aliasing_bound},
                {"perturbed_points", rep.perturbed_points},
                {"sup_grid", rep.options.sup_grid},
                {"coefficient_count", rep.options.coeff_count},
                {"coefficient_grid", rep.options.coeff_grid},
                {"sup_tolerance", rep.sup_tolerance},
                {"rank_tolerance", rep.rank_tolerance}};
}

json membership_to_json(const MembershipReport& rep) {
    return json{{"pass", rep.pass},
                {"kappa1", rep.kappa1},
                {"grid_size", rep.grid_size},
                {"max_j_unitarity_defect", rep.max_j_unitarity_defect},
                {"max_s21_discrepancy", rep.max_s21_discrepancy},
                {"max_s21_norm", rep.max_s21_norm},
                {"s21_pole_count_hankel", rep.s21_pole_count_hankel},
                {"a22_zero_count", rep.a22_zero_count},
                {"winding_det_a22", rep.winding_det_a22},
                {"winding_det_a11_star", rep.winding_det_a11_star},
                {"s21_hankel_singular_values", rep.s21_hankel_singular_values},
                {"coefficient_grid", rep.coefficient_grid},
                {"coefficient_count", rep.coefficient_count},
                {"defect_tolerance", rep.defect_tolerance}};
}

std::string dump(const json& j, int indent) {
    std::string out;
    dump_rec(out, j, indent, 0);
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw InputError(path.string() + ": directory does not exist");
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError(path.string() + ": cannot write");
        out << content;
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp, ec);
            throw InputError(path.string() + ": write failed");
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InputError(path.string() + ": cannot rename into place");
    }
}

}  // namespace ntk::io
