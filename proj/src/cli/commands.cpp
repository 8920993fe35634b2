#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dualocp/cli/cli.hpp"
#include "dualocp/frcg/frcg.hpp"
#include "dualocp/ssn/spectral.hpp"
#include "dualocp/ssn/ssn.hpp"

namespace dualocp::cli {

namespace {

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

std::string fixed3(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

const char* algorithm_name(Solver s) { return s == Solver::Frcg ? "Dual+FRCG" : "Dual+SSN"; }

void dump_to(const std::string& path, const problems::Problem& prob, const parabolic::TimeFunction& field)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write field dump '" + path + "'");
    os.precision(12);
    problems::dump_field(prob, field, os);
}

}  // namespace

std::string format_row(const ReportRow& row)
{
    std::ostringstream os;
    os << row.mesh << ',' << row.algorithm << ',' << row.iter << ',';
    if (row.mean_cg) os << fixed3(*row.mean_cg);
    os << ',';
    if (row.max_cg) os << *row.max_cg;
    os << ',' << fixed3(row.wall_time_s) << ',' << sci(row.obj) << ',' << sci(row.reldis) << ',';
    if (row.err_u) os << sci(*row.err_u);
    os << ',';
    if (row.err_y) os << sci(*row.err_y);
    return os.str();
}

problems::Problem build_problem(const RunConfig& cfg)
{
    cfg.validate();
    if (cfg.problem == "example1") return problems::build_example1(cfg.gamma, cfg.level, cfg.steps);
    if (cfg.problem == "example2") return problems::build_example2(cfg.gamma, cfg.level, cfg.steps, cfg.control_mass_rule);
    if (cfg.problem == "example3") return problems::build_example3(cfg.gamma, cfg.level);
    problems::CustomSpec cs = cfg.custom;
    cs.gamma = cfg.gamma;
    cs.level = cfg.level;
    cs.steps = cfg.steps;
    return problems::build_custom(cs);
}

ReportRow run_one(const RunConfig& cfg)
{
    problems::Problem prob = build_problem(cfg);
    ReportRow row;
    row.mesh = "2^-" + std::to_string(cfg.level);
    row.algorithm = algorithm_name(cfg.solver);
    dual::PrimalPair primal;
    if (cfg.solver == Solver::Frcg) {
        frcg::FrcgConfig fc;
        fc.tol = cfg.tol.value_or(1e-4);
        fc.c = cfg.c;
        fc.max_iter = cfg.max_iter;
        frcg::FrcgReport rep = frcg::frcg_solve(prob.dual, fc);
        row.iter = rep.iterations;
        row.wall_time_s = rep.wall_time_s;
        primal = std::move(rep.primal);
    } else {
        ssn::SsnConfig sc;
        sc.tol = cfg.tol.value_or(prob.ssn_tol);
        sc.pcg_tol = prob.ssn_pcg_tol;
        ssn::SsnReport rep = ssn::ssn_solve(prob.dual, sc);
        row.iter = rep.iterations;
        row.mean_cg = rep.mean_cg;
        row.max_cg = rep.max_cg;
        row.wall_time_s = rep.wall_time_s;
        primal = std::move(rep.primal);
    }
    const problems::Metrics m = problems::metrics(prob, primal);
    row.obj = m.obj;
    row.reldis = m.reldis;
    if (prob.u_star) {
        const problems::ErrorNorms e = problems::error_norms(prob, primal);
        row.err_u = e.err_u;
        row.err_y = e.err_y;
    }
    if (!cfg.dump_prefix.empty()) {
        dump_to(cfg.dump_prefix + "_u.txt", prob, primal.u);
        dump_to(cfg.dump_prefix + "_y.txt", prob, primal.y);
    }
    return row;
}

int cmd_solve(const std::string& config_path, std::ostream& out, std::ostream& err)
{
    std::vector<RunConfig> runs;
    try {
        runs = parse_config_file(config_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    int status = 0;
    for (const auto& cfg : runs) {
        std::ofstream file;
        if (!cfg.output.empty()) {
            file.open(cfg.output);
            if (!file) {
                err << "error: [" << cfg.name << "] output: cannot open '" << cfg.output << "'\n";
                return 2;
            }
        }
        std::ostream& os = cfg.output.empty() ? out : file;
        os << kSchemaLine << '\n' << kReportHeader << '\n';
        try {
            os << format_row(run_one(cfg)) << '\n';
        } catch (const std::exception& e) {
            err << "error: [" << cfg.name << "] solve failed: " << e.what() << '\n';
            status = 1;
        }
    }
    return status;
}

LevelRange parse_level_range(const std::string& s)
{
    if (s.empty()) return {1, 0};
    const auto dash = s.find('-');
    try {
        if (dash == std::string::npos) {
            const int l = std::stoi(s);
            return {l, l};
        }
        return {std::stoi(s.substr(0, dash)), std::stoi(s.substr(dash + 1))};
    } catch (const std::exception&) {
        throw std::invalid_argument("levels: expected N or LO-HI, got '" + s + "'");
    }
}

int cmd_table(int id, const LevelRange& levels, const std::string& algorithm, std::ostream& out, std::ostream& err)
{
    if (algorithm == "in-admm" || algorithm == "In-ADMM") {
        err << "reference-only: In-ADMM rows are published reference numbers and are not reproduced\n";
        return 2;
    }
    RunConfig cfg;
    switch (id) {
    case 1:
    case 2:
        cfg.problem = "example1";
        cfg.gamma = 1e-3;
        cfg.solver = Solver::Frcg;
        break;
    case 3:
    case 4:
        cfg.problem = "example1";
        cfg.gamma = 1e-5;
        cfg.solver = Solver::Ssn;
        break;
    case 5:
        cfg.problem = "example2";
        cfg.gamma = 1e-3;
        cfg.solver = Solver::Frcg;
        break;
    case 6:
        cfg.problem = "example2";
        cfg.gamma = 1e-6;
        cfg.solver = Solver::Ssn;
        break;
    case 7:
        cfg.problem = "example3";
        cfg.gamma = 1e-4;
        cfg.solver = Solver::Ssn;
        break;
    default:
        err << "error: unknown table id " << id << " (expected 1..7)\n";
        return 2;
    }
    if (levels.lo <= levels.hi && (levels.lo < 1 || levels.hi > 8)) {
        err << "error: levels must lie in [1, 8]\n";
        return 2;
    }
    out << kSchemaLine << '\n' << kReportHeader << '\n';
    for (int l = levels.lo; l <= levels.hi; ++l) {
        cfg.level = l;
        cfg.name = "table" + std::to_string(id) + "_level" + std::to_string(l);
        try {
            out << format_row(run_one(cfg)) << '\n';
        } catch (const std::exception& e) {
            err << "error: level " << l << ": " << e.what() << '\n';
            return 1;
        }
    }
    return 0;
}

int cmd_spectrum(const SpectrumRequest& req, std::ostream& out, std::ostream& err)
{
    if (req.level < 1 || req.level > 2 || req.steps < 2 || req.steps > 4) {
        err << "error: spectrum study is dense; limits are level in [1, 2] and steps in [2, 4]\n";
        return 2;
    }
    ssn::ActivePattern pattern;
    if (req.pattern == "all") {
        pattern = ssn::ActivePattern::All;
    } else if (req.pattern == "none") {
        pattern = ssn::ActivePattern::None;
    } else if (req.pattern == "random") {
        pattern = ssn::ActivePattern::Random;
    } else {
        err << "error: pattern must be all|none|random\n";
        return 2;
    }
    const fem::SpaceMesh mesh = fem::build_mesh(req.level);
    const double dt = 1.0 / static_cast<double>(req.steps);
    // N steps leave N - 1 unknown slices
    parabolic::SpaceTimeSystem sys(fem::build_space_operators(mesh, dt, 1.0, 0.0), req.level, req.steps - 1, dt);
    const ssn::ActiveSets active = ssn::make_active_pattern(sys.blocks(), sys.space_size(), pattern, req.seed);
    std::vector<ssn::SpectralRow> rows;
    try {
        rows = ssn::spectral_study(sys, req.gammas, active);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    out << kSpectrumSchemaLine << '\n' << kSpectrumHeader << '\n';
    bool all_pass = true;
    for (const auto& r : rows) {
        out << sci(r.gamma) << ',' << sci(r.lambda_min) << ',' << sci(r.lambda_max) << ',' << sci(r.zeta) << ','
            << sci(r.bound) << ',' << (r.pass ? "pass" : "fail") << '\n';
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}

}  // namespace dualocp::cli
