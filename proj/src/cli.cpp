#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "io.hpp"

namespace ntk::cli {

namespace {

using io::json;

struct GlobalFlags {
    double tol_rank = Tolerances{}.rank;
    double tol_inertia = Tolerances{}.inertia;
    Index grid = 256;
    Index coeffs = 48;
    std::uint64_t seed = 0;
    std::string out;
    CLI::Option* tol_rank_opt = nullptr;
    CLI::Option* tol_inertia_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

struct Loaded {
    io::ProblemFile problem;
    Tolerances tol;
    std::uint64_t seed = 0;
};

Loaded load(const std::string& path, const GlobalFlags& g) {
    Loaded l{io::load_problem(path), {}, 0};
    l.tol = l.problem.tol;
    if (g.tol_rank_opt->count() > 0) l.tol.rank = g.tol_rank;
    if (g.tol_inertia_opt->count() > 0) l.tol.inertia = g.tol_inertia;
    l.seed = g.seed_opt->count() > 0 ? g.seed : l.problem.seed.value_or(0);
    return l;
}

Index coefficient_grid(Index coeffs) {
    Index n = 4096;
    while (n < 4 * coeffs) n *= 2;
    return n;
}

void emit(std::ostream& out, const json& j) { out << io::dump(j) << '\n'; }

/// Writes to --out when given, otherwise to the report stream.
void deliver(const GlobalFlags& g, std::ostream& out, const std::string& content) {
    if (g.out.empty())
        out << content;
    else
        io::write_atomic(g.out, content);
}

SchurParameter<double> load_epsilon(const std::string& spec, Index p, Index q, std::uint64_t seed) {
    if (spec.empty() || spec == "zero") return SchurParameter<double>::zero(p, q);
    if (spec == "random") return io::epsilon_from_json(json{{"kind", "random"}}, p, q, seed);
    return io::epsilon_from_json(io::read_json_file(spec), p, q, seed);
}

GammaGeneratingMatrix<double> load_or_solve(const std::string& resolvent_path, const Loaded& l) {
    if (resolvent_path.empty()) return solve(l.problem.realization, l.problem.kappa, l.tol);
    auto a = io::resolvent_from_json(io::read_json_file(resolvent_path), l.tol);
    const auto& r = a.data().realization;
    const auto& pr = l.problem.realization;
    if (r.n() != pr.n() || r.p() != pr.p() || r.q() != pr.q())
        throw Error(ErrorKind::DimensionMismatch, "resolvent dimensions differ from the problem");
    if ((r.A() - pr.A()).norm() + (r.B() - pr.B()).norm() + (r.C() - pr.C()).norm() > 1e-12 * (1 + pr.A().norm() + pr.B().norm() + pr.C().norm()))
        throw Error(ErrorKind::CrossCheckFailure, "resolvent was computed for a different realization");
    return a;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int cmd_check(const std::string& path, const GlobalFlags& g, std::ostream& out) {
    const Loaded l = load(path, g);
    const SolverReport rep = check(l.problem.realization, l.problem.kappa, l.tol);
    deliver(g, out, io::dump(io::solver_report_to_json(rep)) + "\n");
    return rep.solvable ? kOk : kNegative;
}

int cmd_solve(const std::string& path, const GlobalFlags& g, std::ostream& out, std::ostream& err) {
    const Loaded l = load(path, g);
    const SolverReport rep = check(l.problem.realization, l.problem.kappa, l.tol);
    if (!rep.solvable) {
        err << "not solvable: kappa = " << rep.kappa << " < kappa1 = " << rep.kappa1 << '\n';
        emit(out, io::solver_report_to_json(rep));
        return kNegative;
    }
    const GammaGeneratingMatrix<double> a(assemble(l.problem.realization, gramians(l.problem.realization, l.tol), l.tol));
    json j = io::resolvent_to_json(a, rep);
    const auto mem = membership_report(a, std::max<Index>(g.grid, 4), 1e-8, g.coeffs, coefficient_grid(g.coeffs));
    j["diagnostics"]["membership"] = io::membership_to_json(mem);
    deliver(g, out, io::dump(j) + "\n");
    return kOk;
}

int cmd_sample(const std::string& path, const std::string& resolvent, const std::string& eps_spec,
               const GlobalFlags& g, std::ostream& out, std::ostream& err) {
    if (g.grid < 1) throw Error(ErrorKind::InvalidParameter, "--grid must be at least 1");
    const Loaded l = load(path, g);
    const auto a = std::make_shared<const GammaGeneratingMatrix<double>>(load_or_solve(resolvent, l));
    const auto eps = load_epsilon(eps_spec, a->p(), a->q(), l.seed);
    require_parameter_budget(eps, l.problem.kappa, a->kappa1());
    const auto h = sample_solution<double>(a, eps);

    std::vector<Index> moved;
    const auto values = sample_circle<double>(h.as_function(), g.grid, &moved);
    std::ostringstream csv;
    csv << "theta,sigma_max";
    for (Index i = 0; i < a->p(); ++i)
        for (Index k = 0; k < a->q(); ++k) csv << ",re_f" << i + 1 << '_' << k + 1 << ",im_f" << i + 1 << '_' << k + 1;
    csv << '\n';
    double sup = 0;
    for (Index l2 = 0; l2 < g.grid; ++l2) {
        const auto& v = values[static_cast<std::size_t>(l2)];
        const double s = spectral_norm(v);
        sup = std::max(sup, s);
        csv << format_double(2 * std::numbers::pi * double(l2) / double(g.grid)) << ',' << format_double(s);
        for (Index i = 0; i < v.rows(); ++i)
            for (Index k = 0; k < v.cols(); ++k)
                csv << ',' << format_double(v(i, k).real()) << ',' << format_double(v(i, k).imag());
        csv << '\n';
    }
    const json summary{{"grid", g.grid},
                       {"sup_norm", sup},
                       {"kappa", l.problem.kappa},
                       {"kappa1", a->kappa1()},
                       {"parameter_poles", eps.pole_count()},
                       {"perturbed_points", moved},
                       {"csv", g.out.empty() ? json(nullptr) : json(g.out)}};
    if (g.out.empty()) {
        out << csv.str();
        err << io::dump(summary) << '\n';
    } else {
        io::write_atomic(g.out, csv.str());
        emit(out, summary);
    }
    return kOk;
}

int cmd_verify(const std::string& path, const std::string& resolvent, const std::string& eps_spec,
               std::optional<Index> kappa, const GlobalFlags& g, std::ostream& out) {
    const Loaded l = load(path, g);
    const auto a = std::make_shared<const GammaGeneratingMatrix<double>>(load_or_solve(resolvent, l));
    const auto eps = load_epsilon(eps_spec, a->p(), a->q(), l.seed);
    const auto h = sample_solution<double>(a, eps);
    VerifyOptions opt;
    opt.sup_grid = g.grid;
    opt.coeff_count = g.coeffs;
    opt.coeff_grid = coefficient_grid(g.coeffs);
    const auto rep = verify_solution(h, l.problem.realization, kappa.value_or(l.problem.kappa), opt, l.tol);
    deliver(g, out, io::dump(io::verify_report_to_json(rep)) + "\n");
    return rep.pass ? kOk : kNegative;
}

int cmd_spectrum(const std::string& path, const GlobalFlags& g, std::ostream& out) {
    const Loaded l = load(path, g);
    const auto& r = l.problem.realization;
    const auto rep = validate(r, l.tol);
    if (!rep.stable(l.tol.stability_margin))
        throw Error(ErrorKind::Unstable, "spectral radius " + format_double(rep.spectral_radius) + " is not below 1");
    const auto s = hankel_spectrum(gramians(r, l.tol));
    deliver(g, out, io::dump(json{{"hankel_singular_values", s}, {"tolerances", io::tolerances_to_json(l.tol)}}) + "\n");
    return kOk;
}

/// Closed-form checks on f₀(z) = 1/(z − 1/2).
int cmd_selftest(std::ostream& out) {
    using C = std::complex<double>;
    int failures = 0;
    const auto expect = [&](const std::string& name, C got, C want, double tol = 1e-12) {
        const bool ok = std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
        if (!ok) ++failures;
        out << (ok ? "ok   " : "FAIL ") << name << ": got " << format_double(got.real());
        if (got.imag() != 0) out << (got.imag() < 0 ? " - " : " + ") << format_double(std::abs(got.imag())) << "i";
        out << ", expected " << format_double(want.real()) << '\n';
    };
    const auto one = [](double v) { return CMatrix<double>::Constant(1, 1, v); };
    const Realization<double> r(one(0.5), one(1.0), one(1.0));
    const auto g = gramians(r);
    expect("P", g.P(0, 0), 4.0 / 3.0);
    expect("Q", g.Q(0, 0), 4.0 / 3.0);
    expect("sigma_1", hankel_spectrum(g)[0], 4.0 / 3.0);
    expect("kappa1", double(negativity_index(g)), 1.0);
    expect("Pick matrix", pick_matrix(r, g).P_tilde(0, 0), -7.0 / 12.0);

    const DenominatorData<double> d(r, g);
    for (const C z : {C(0), C(-1), C(0.3, 0.4)}) {
        expect("b2(" + format_double(z.real()) + ")", b2_evaluate(d, z)(0, 0), (z - 0.5) / (1.0 - 0.5 * z));
        expect("K(" + format_double(z.real()) + ")", k_evaluate(d, z)(0, 0), 1.0 / (1.0 - 0.5 * z));
    }

    const auto a = std::make_shared<const GammaGeneratingMatrix<double>>(solve(r, 1));
    expect("Lambda_inv(0,0)", a->data().Lambda_inv(0, 0), -12.0 / 7.0);
    expect("Lambda_inv(0,1)", a->data().Lambda_inv(0, 1), -9.0 / 7.0);
    const auto am1 = (*a)(C(-1));
    expect("A(-1)(0,0)", am1(0, 0), -25.0 / 7.0);
    expect("A(-1)(0,1)", am1(0, 1), 24.0 / 7.0);
    const auto a0 = (*a)(C(0));
    expect("A(0)(0,0)", a0(0, 0), -41.0 / 7.0);
    expect("A(0)(0,1)", a0(0, 1), 36.0 / 7.0);
    expect("A(0)(1,0)", a0(1, 0), 18.0 / 7.0);
    expect("A(0)(1,1)", a0(1, 1), -17.0 / 7.0);
    expect("A(1)", (*a)(C(1))(0, 1), 0.0);
    expect("s21(-1)", s21_evaluate(*a, C(-1)).value(0, 0), 24.0 / 25.0);
    const auto h = sample_solution<double>(a, SchurParameter<double>::zero(1, 1));
    expect("f(-1)", h(C(-1))(0, 0), -0.96);
    const auto vr = verify_solution(h, r, 1);
    expect("verify pass", vr.pass ? 1.0 : 0.0, 1.0);
    expect("verify rank", double(vr.hankel_rank), 1.0);
    out << (failures == 0 ? "selftest passed" : std::to_string(failures) + " selftest checks failed") << '\n';
    return failures == 0 ? kOk : kError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rational matrix Nehari-Takagi solver", "ntk"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalFlags g;
    g.tol_rank_opt = app.add_option("--tol-rank", g.tol_rank, "Relative rank tolerance")->check(CLI::PositiveNumber);
    g.tol_inertia_opt =
        app.add_option("--tol-inertia", g.tol_inertia, "Relative inertia band around zero")->check(CLI::PositiveNumber);
    app.add_option("--grid", g.grid, "Circle grid size (sample rows, verify sup grid, membership grid)")
        ->capture_default_str();
    app.add_option("--coeffs", g.coeffs, "Number of Fourier coefficients for Hankel rank tests")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    g.seed_opt = app.add_option("--seed", g.seed, "Seed for random parameters (overrides the problem file)");
    app.add_option("--out", g.out, "Output file (written atomically)");

    std::string problem, resolvent, epsilon;
    Index kappa_override = -1;

    auto* check_cmd = app.add_subcommand("check", "Decide solvability; exit 0 solvable, 2 not solvable");
    check_cmd->add_option("problem", problem, "Problem JSON file")->required();
    auto* solve_cmd = app.add_subcommand("solve", "Build and export the resolvent matrix");
    solve_cmd->add_option("problem", problem, "Problem JSON file")->required();
    auto* sample_cmd = app.add_subcommand("sample", "Sample a solution on the circle as CSV");
    sample_cmd->add_option("problem", problem, "Problem JSON file")->required();
    sample_cmd->add_option("--resolvent", resolvent, "Resolvent export (solved from the problem if omitted)");
    sample_cmd->add_option("--epsilon", epsilon, "Schur parameter file, 'zero' or 'random'");
    auto* verify_cmd = app.add_subcommand("verify", "Verify a solution; exit 0 pass, 2 fail");
    verify_cmd->add_option("problem", problem, "Problem JSON file")->required();
    verify_cmd->add_option("--solution-resolvent", resolvent, "Resolvent export (solved from the problem if omitted)");
    verify_cmd->add_option("--epsilon", epsilon, "Schur parameter file, 'zero' or 'random'");
    verify_cmd->add_option("--kappa", kappa_override, "Rank budget to verify against (default: problem kappa)")
        ->check(CLI::NonNegativeNumber);
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Hankel singular values");
    spectrum_cmd->add_option("problem", problem, "Problem JSON file")->required();
    auto* selftest_cmd = app.add_subcommand("selftest", "Closed-form checks on the scalar example");
    for (auto* sub : {check_cmd, solve_cmd, sample_cmd, verify_cmd, spectrum_cmd, selftest_cmd}) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kError;
    }

    try {
        if (*check_cmd) return cmd_check(problem, g, out);
        if (*solve_cmd) return cmd_solve(problem, g, out, err);
        if (*sample_cmd) return cmd_sample(problem, resolvent, epsilon, g, out, err);
        if (*verify_cmd) {
            std::optional<Index> k;
            if (kappa_override >= 0) k = kappa_override;
            return cmd_verify(problem, resolvent, epsilon, k, g, out);
        }
        if (*spectrum_cmd) return cmd_spectrum(problem, g, out);
        if (*selftest_cmd) return cmd_selftest(out);
    } catch (const io::InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace ntk::cli
