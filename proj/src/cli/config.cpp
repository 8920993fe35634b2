#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dualocp/cli/cli.hpp"

namespace dualocp::cli {

namespace {

namespace pt = boost::property_tree;

const std::set<std::string> kKnownKeys = {
    "problem", "gamma", "level", "steps", "solver", "tol", "c", "max_iter", "output", "dump_prefix", "seed",
    "control_mass_rule", "nu", "a0", "a", "b", "T", "control_box", "target_amp", "target_rate", "y0_amp"};

template <typename T>
T get_value(const pt::ptree& sec, const std::string& section, const std::string& key, T fallback)
{
    const auto node = sec.get_optional<std::string>(key);
    if (!node) return fallback;
    if constexpr (std::is_same_v<T, std::string>) {
        return *node;
    } else {
        std::istringstream is(*node);
        T value{};
        is >> value;
        if (is.fail() || !(is >> std::ws).eof()) {
            throw std::invalid_argument("[" + section + "] " + key + ": cannot parse '" + *node + "'");
        }
        return value;
    }
}

fem::ControlBox parse_box(const std::string& section, const std::string& text)
{
    std::istringstream is(text);
    std::vector<double> v;
    std::string tok;
    while (std::getline(is, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
        } catch (const std::exception&) {
            throw std::invalid_argument("[" + section + "] control_box: cannot parse '" + text + "'");
        }
    }
    if (v.size() != 4) throw std::invalid_argument("[" + section + "] control_box: expected x1_lo,x1_hi,x2_lo,x2_hi");
    return {v[0], v[1], v[2], v[3]};
}

}  // namespace

void RunConfig::validate() const
{
    const std::string where = "[" + name + "] ";
    if (problem != "example1" && problem != "example2" && problem != "example3" && problem != "custom") {
        throw std::invalid_argument(where + "problem: expected example1|example2|example3|custom, got '" + problem + "'");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument(where + "gamma: must be a positive number");
    if (level < 1 || level > 8) throw std::invalid_argument(where + "level: must lie in [1, 8]");
    if (steps == 1 || steps > 4096) throw std::invalid_argument(where + "steps: must be 0 (default) or lie in [2, 4096]");
    if (tol && !(*tol > 0.0)) throw std::invalid_argument(where + "tol: must be positive");
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument(where + "c: must lie in (0, 1)");
    if (max_iter == 0) throw std::invalid_argument(where + "max_iter: must be positive");
    if (problem == "custom") {
        if (!(custom.nu > 0.0)) throw std::invalid_argument(where + "nu: must be positive");
        if (custom.a0 < 0.0) throw std::invalid_argument(where + "a0: must be nonnegative");
        if (!(custom.a <= 0.0 && custom.b >= 0.0)) throw std::invalid_argument(where + "a, b: need a <= 0 <= b");
        if (!(custom.T > 0.0)) throw std::invalid_argument(where + "T: must be positive");
    }
}

std::vector<RunConfig> parse_config_stream(std::istream& is)
{
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    std::vector<RunConfig> runs;
    for (const auto& [section, sec] : tree) {
        if (sec.empty()) throw std::invalid_argument("config: key '" + section + "' must belong to a [section]");
        for (const auto& [key, unused] : sec) {
            (void)unused;
            if (!kKnownKeys.count(key)) throw std::invalid_argument("[" + section + "] " + key + ": unknown field");
        }
        RunConfig cfg;
        cfg.name = section;
        cfg.problem = get_value<std::string>(sec, section, "problem", cfg.problem);
        cfg.gamma = get_value<double>(sec, section, "gamma", cfg.gamma);
        cfg.level = get_value<int>(sec, section, "level", cfg.level);
        cfg.steps = get_value<std::size_t>(sec, section, "steps", cfg.steps);
        const auto solver = get_value<std::string>(sec, section, "solver", "frcg");
        if (solver == "frcg") {
            cfg.solver = Solver::Frcg;
        } else if (solver == "ssn") {
            cfg.solver = Solver::Ssn;
        } else {
            throw std::invalid_argument("[" + section + "] solver: expected frcg|ssn, got '" + solver + "'");
        }
        if (sec.get_optional<std::string>("tol")) cfg.tol = get_value<double>(sec, section, "tol", 0.0);
        cfg.c = get_value<double>(sec, section, "c", cfg.c);
        cfg.max_iter = get_value<std::size_t>(sec, section, "max_iter", cfg.max_iter);
        cfg.output = get_value<std::string>(sec, section, "output", "");
        cfg.dump_prefix = get_value<std::string>(sec, section, "dump_prefix", "");
        cfg.seed = get_value<std::uint64_t>(sec, section, "seed", 0);
        const auto rule = get_value<std::string>(sec, section, "control_mass_rule", "nodal");
        if (rule == "nodal") {
            cfg.control_mass_rule = fem::ControlMassRule::NodalMask;
        } else if (rule == "barycenter") {
            cfg.control_mass_rule = fem::ControlMassRule::Barycenter;
        } else {
            throw std::invalid_argument("[" + section + "] control_mass_rule: expected nodal|barycenter");
        }
        auto& cs = cfg.custom;
        cs.nu = get_value<double>(sec, section, "nu", cs.nu);
        cs.a0 = get_value<double>(sec, section, "a0", cs.a0);
        cs.a = get_value<double>(sec, section, "a", cs.a);
        cs.b = get_value<double>(sec, section, "b", cs.b);
        cs.T = get_value<double>(sec, section, "T", cs.T);
        cs.target_amp = get_value<double>(sec, section, "target_amp", cs.target_amp);
        cs.target_rate = get_value<double>(sec, section, "target_rate", cs.target_rate);
        cs.y0_amp = get_value<double>(sec, section, "y0_amp", cs.y0_amp);
        if (auto box = sec.get_optional<std::string>("control_box")) cs.control = parse_box(section, *box);
        cs.gamma = cfg.gamma;
        cs.level = cfg.level;
        cs.steps = cfg.steps;
        cfg.validate();
        runs.push_back(std::move(cfg));
    }
    if (runs.empty()) throw std::invalid_argument("config: no [run] sections found");
    return runs;
}

std::vector<RunConfig> parse_config_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open '" + path + "'");
    return parse_config_stream(is);
}

}  // namespace dualocp::cli
