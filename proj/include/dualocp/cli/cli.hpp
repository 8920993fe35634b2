#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dualocp/fem/assembly.hpp"
#include "dualocp/problems/problems.hpp"

namespace dualocp::cli {

inline constexpr const char* kSchemaLine = "# schema: dualocp-report v1";
inline constexpr const char* kReportHeader = "mesh,algorithm,iter,mean_cg,max_cg,wall_time_s,obj,reldis,err_u,err_y";
inline constexpr const char* kSpectrumSchemaLine = "# schema: dualocp-spectrum v1";
inline constexpr const char* kSpectrumHeader = "gamma,lambda_min,lambda_max,zeta,bound,pass";

enum class Solver { Frcg, Ssn };

struct RunConfig {
    std::string name = "run";
    std::string problem = "example1";  // example1 | example2 | example3 | custom
    double gamma = 1e-3;
    int level = 4;
    std::size_t steps = 0;  // 0: N = 2^level
    Solver solver = Solver::Frcg;
    std::optional<double> tol;  // default 1e-4 (elliptic SSN 1e-8)
    double c = 0.4;
    std::size_t max_iter = 500;
    std::string output;       // CSV path; empty means stdout
    std::string dump_prefix;  // writes <prefix>_u.txt and <prefix>_y.txt when set
    std::uint64_t seed = 0;
    fem::ControlMassRule control_mass_rule = fem::ControlMassRule::NodalMask;
    problems::CustomSpec custom;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Flat INI: one section per run, key = value pairs.
std::vector<RunConfig> parse_config_file(const std::string& path);
std::vector<RunConfig> parse_config_stream(std::istream& is);

struct ReportRow {
    std::string mesh;
    std::string algorithm;
    std::size_t iter = 0;
    std::optional<double> mean_cg;
    std::optional<std::size_t> max_cg;
    double wall_time_s = 0.0;
    double obj = 0.0;
    double reldis = 0.0;
    std::optional<double> err_u;
    std::optional<double> err_y;
};

std::string format_row(const ReportRow& row);

problems::Problem build_problem(const RunConfig& cfg);

/// Solves one configured run; dumps fields when requested.
ReportRow run_one(const RunConfig& cfg);

int cmd_solve(const std::string& config_path, std::ostream& out, std::ostream& err);

struct LevelRange {
    int lo = 4;
    int hi = 4;
};

/// "4", "4-6" or "" (empty range).
LevelRange parse_level_range(const std::string& s);

/// Dual+FRCG / Dual+SSN rows of results table `id` (1..7) at the given levels;
/// returns the process exit code.
int cmd_table(int id, const LevelRange& levels, const std::string& algorithm, std::ostream& out, std::ostream& err);

struct SpectrumRequest {
    int level = 2;
    std::size_t steps = 4;
    std::vector<double> gammas{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    std::string pattern = "random";  // all | none | random
    std::uint64_t seed = 1;
};

int cmd_spectrum(const SpectrumRequest& req, std::ostream& out, std::ostream& err);

/// Quick invariant checks; one PASS/FAIL line each.
int cmd_verify(std::uint64_t seed, std::ostream& out);

}  // namespace dualocp::cli
