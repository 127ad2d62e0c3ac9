#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include <ntk/ntk.hpp>

namespace ntk::io {

using json = nlohmann::ordered_json;

/// Malformed or schema-invalid input; the message names the file and the offending field.
class InputError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/**
 * Problem file:
 *
 *     {"A": [[[re, im], ...], ...], "B": ..., "C": ..., "kappa": 1,
 *      "seed": 42, "tolerances": {"rank": 1e-10, "inertia": 1e-9, ...}}
 *
 * Matrices are row-major arrays of rows; each entry is either [re, im] or a plain
 * real number. "seed" and "tolerances" are optional; tolerance keys match the
 * field names of ntk::Tolerances.
 */
struct ProblemFile {
    Realization<double> realization;
    Index kappa = 0;
    std::optional<std::uint64_t> seed;
    Tolerances tol;
};

json parse_json(const std::string& text, const std::string& source);
json read_json_file(const std::filesystem::path& path);

CMatrix<double> matrix_from_json(const json& j, const std::string& field);
json matrix_to_json(const CMatrix<double>& m);
json complex_to_json(std::complex<double> z);
std::complex<double> complex_from_json(const json& j, const std::string& field);

Tolerances tolerances_from_json(const json& j, Tolerances base = {});
json tolerances_to_json(const Tolerances& tol);

ProblemFile problem_from_json(const json& j, const std::string& source = "<input>");
ProblemFile load_problem(const std::filesystem::path& path);

/// Resolvent export: dims, A, B, C, M, N, Lambda, Lambda_inv, G1_star, kappa1, j, diagnostics.
json resolvent_to_json(const GammaGeneratingMatrix<double>& a, const SolverReport& report);
GammaGeneratingMatrix<double> resolvent_from_json(const json& j, const Tolerances& tol = {});

/**
 * Schur parameter file, one of
 *
 *     {"kind": "zero"}
 *     {"kind": "constant", "value": [[[re, im], ...], ...]}
 *     {"kind": "blaschke_scaled", "zeros": [[re, im], ...], "constant": [[...]]}
 *     {"kind": "random", "norm": 0.9}        (drawn from the problem seed)
 */
SchurParameter<double> epsilon_from_json(const json& j, Index p, Index q, std::uint64_t seed);

json solver_report_to_json(const SolverReport& rep);
json verify_report_to_json(const VerifyReport& rep);
json membership_to_json(const MembershipReport& rep);

/// Deterministic serialization: keys in insertion order, doubles with 17 significant digits.
std::string dump(const json& j, int indent = 2);

/// Writes via a temporary file in the target directory followed by rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace ntk::io
