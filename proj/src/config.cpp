#include "qlm/config.hpp"

#include "qlm/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qlm {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw validation_error("config: bad number '" + v + "' for " + where);
    }
}

int parse_int(const std::string& v, const std::string& where) {
    double x = parse_number(v, where);
    if (x != std::floor(x))
        throw validation_error("config: " + where + " must be an integer");
    return static_cast<int>(x);
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw validation_error("config: bad flag '" + v + "' for " + where);
}

struct ModeDraft {
    ModeSpec spec;
    double volume = 0.0;
    bool beta_given = false;
    bool volume_given = false;
};

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    cfg.modes.clear();
    std::vector<ModeDraft> drafts;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;

    auto current_mode = [&]() -> ModeDraft& {
        if (drafts.empty())
            throw validation_error("config: mode key outside a [mode] section");
        return drafts.back();
    };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw validation_error("config: malformed section header at line " +
                                       std::to_string(line_no));
            section = line.substr(1, line.size() - 2);
            if (section == "mode") {
                drafts.emplace_back();
            } else if (section != "potential" && section != "electron" &&
                       section != "grid" && section != "time" && section != "run" &&
                       section != "output") {
                throw validation_error("config: unknown section [" + section + "]");
            }
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("config: expected key = value at line " +
                                   std::to_string(line_no));
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        std::string where = section + "." + key;

        if (section == "mode") {
            ModeDraft& m = current_mode();
            if (key == "omega") m.spec.omega = parse_number(val, where);
            else if (key == "theta") m.spec.theta = parse_number(val, where);
            else if (key == "n_photons") m.spec.n_photons = parse_number(val, where);
            else if (key == "beta") { m.spec.beta = parse_number(val, where); m.beta_given = true; }
            else if (key == "volume") { m.volume = parse_number(val, where); m.volume_given = true; }
            else if (key == "kappa_dot_r") m.spec.kappa_dot_r = parse_number(val, where);
            else throw validation_error("config: unknown key " + where);
        } else if (section == "potential") {
            if (key == "kind") {
                if (val == "free") cfg.potential.kind = PotentialSpec::Kind::free;
                else if (val == "quadratic") cfg.potential.kind = PotentialSpec::Kind::quadratic;
                else if (val == "softcore") cfg.potential.kind = PotentialSpec::Kind::softcore;
                else throw validation_error("config: unknown potential kind '" + val + "'");
            } else if (key == "stiffness") cfg.potential.u = parse_number(val, where);
            else if (key == "depth") cfg.potential.depth = parse_number(val, where);
            else if (key == "smoothing") cfg.potential.smoothing = parse_number(val, where);
            else throw validation_error("config: unknown key " + where);
        } else if (section == "electron") {
            if (key == "center") cfg.electron.center = parse_number(val, where);
            else if (key == "width") cfg.electron.width = parse_number(val, where);
            else if (key == "momentum") cfg.electron.momentum = parse_number(val, where);
            else throw validation_error("config: unknown key " + where);
        } else if (section == "grid") {
            if (key == "x_min") cfg.grid.x_min = parse_number(val, where);
            else if (key == "x_max") cfg.grid.x_max = parse_number(val, where);
            else if (key == "x_points") cfg.grid.x_points = parse_int(val, where);
            else if (key == "q_half_width") cfg.grid.q_half_width = parse_number(val, where);
            else if (key == "q_points") cfg.grid.q_points = parse_int(val, where);
            else throw validation_error("config: unknown key " + where);
        } else if (section == "time") {
            if (key == "t_end") cfg.time.t_end = parse_number(val, where);
            else if (key == "dt") cfg.time.dt = parse_number(val, where);
            else throw validation_error("config: unknown key " + where);
        } else if (section == "run") {
            if (key == "solver") {
                if (val == "parametric") cfg.solver = SolverChoice::parametric;
                else if (val == "joint") cfg.solver = SolverChoice::joint;
                else if (val == "both") cfg.solver = SolverChoice::both;
                else throw validation_error("config: unknown solver '" + val + "'");
            } else if (key == "field_path") {
                if (val == "grid") cfg.field_path = FieldPath::grid;
                else if (val == "gaussian") cfg.field_path = FieldPath::gaussian;
                else if (val == "both") cfg.field_path = FieldPath::both;
                else throw validation_error("config: unknown field_path '" + val + "'");
            } else if (key == "strong_field") cfg.strong_field = parse_bool(val, where);
            else if (key == "sweep") {
                cfg.sweep.clear();
                std::istringstream vs(val);
                std::string tok;
                while (vs >> tok) cfg.sweep.push_back(parse_number(tok, where));
            } else throw validation_error("config: unknown key " + where);
        } else if (section == "output") {
            if (key == "directory") cfg.output.directory = val;
            else if (key == "cadence") cfg.output.cadence = parse_int(val, where);
            else throw validation_error("config: unknown key " + where);
        } else {
            throw validation_error("config: key before any section at line " +
                                   std::to_string(line_no));
        }
    }

    for (auto& d : drafts) {
        if (d.beta_given == d.volume_given)
            throw validation_error("config: each [mode] needs exactly one of "
                                   "beta or volume");
        if (d.volume_given) {
            if (!(d.volume > 0.0) || !(d.spec.omega > 0.0))
                throw validation_error("config: volume and omega must be positive "
                                       "to derive beta");
            d.spec.beta = beta_from_volume(d.spec.omega, d.volume);
        }
        cfg.modes.push_back(d.spec);
        cfg.mode_volumes.push_back(d.volume_given ? d.volume : 0.0);
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config: cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t j = 0; j < cfg.modes.size(); ++j) {
        const ModeSpec& m = cfg.modes[j];
        out << "[mode]\n";
        out << "omega = " << m.omega << "\n";
        out << "theta = " << m.theta << "\n";
        out << "n_photons = " << m.n_photons << "\n";
        if (j < cfg.mode_volumes.size() && cfg.mode_volumes[j] > 0.0)
            out << "volume = " << cfg.mode_volumes[j] << "\n";
        else
            out << "beta = " << m.beta << "\n";
        out << "kappa_dot_r = " << m.kappa_dot_r << "\n\n";
    }
    out << "[potential]\n";
    switch (cfg.potential.kind) {
        case PotentialSpec::Kind::free: out << "kind = free\n"; break;
        case PotentialSpec::Kind::quadratic:
            out << "kind = quadratic\nstiffness = " << cfg.potential.u << "\n";
            break;
        case PotentialSpec::Kind::softcore:
            out << "kind = softcore\ndepth = " << cfg.potential.depth
                << "\nsmoothing = " << cfg.potential.smoothing << "\n";
            break;
    }
    out << "\n[electron]\n";
    out << "center = " << cfg.electron.center << "\n";
    out << "width = " << cfg.electron.width << "\n";
    out << "momentum = " << cfg.electron.momentum << "\n";
    out << "\n[grid]\n";
    out << "x_min = " << cfg.grid.x_min << "\n";
    out << "x_max = " << cfg.grid.x_max << "\n";
    out << "x_points = " << cfg.grid.x_points << "\n";
    out << "q_half_width = " << cfg.grid.q_half_width << "\n";
    out << "q_points = " << cfg.grid.q_points << "\n";
    out << "\n[time]\n";
    out << "t_end = " << cfg.time.t_end << "\n";
    out << "dt = " << cfg.time.dt << "\n";
    out << "\n[run]\n";
    out << "solver = "
        << (cfg.solver == SolverChoice::parametric
                ? "parametric"
                : cfg.solver == SolverChoice::joint ? "joint" : "both")
        << "\n";
    out << "field_path = "
        << (cfg.field_path == FieldPath::grid
                ? "grid"
                : cfg.field_path == FieldPath::gaussian ? "gaussian" : "both")
        << "\n";
    out << "strong_field = " << (cfg.strong_field ? "true" : "false") << "\n";
    if (!cfg.sweep.empty()) {
        out << "sweep =";
        for (double b : cfg.sweep) out << " " << b;
        out << "\n";
    }
    out << "\n[output]\n";
    out << "directory = " << cfg.output.directory << "\n";
    out << "cadence = " << cfg.output.cadence << "\n";
    return out.str();
}

void ScenarioConfig::validate() const {
    std::vector<std::string> bad;
    if (modes.empty()) bad.push_back("modes: at least one [mode] required");
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const ModeSpec& m = modes[j];
        std::string tag = "mode[" + std::to_string(j) + "].";
        if (!(m.omega > 0.0)) bad.push_back(tag + "omega: must be positive");
        if (!(m.n_photons >= 0.0)) bad.push_back(tag + "n_photons: must be non-negative");
        if (!(m.beta >= 0.0)) bad.push_back(tag + "beta: must be non-negative");
        if (strong_field && m.n_photons < 100.0)
            bad.push_back(tag + "n_photons: strong-field simplification needs "
                                "n_photons >= 100");
    }
    try {
        potential.validate();
    } catch (const validation_error& e) {
        bad.push_back(std::string("potential: ") + e.what());
    }
    if (!(electron.width > 0.0)) bad.push_back("electron.width: must be positive");
    if (!(grid.x_max > grid.x_min)) bad.push_back("grid.x_min/x_max: empty range");
    if (grid.x_points < 16 || (grid.x_points & (grid.x_points - 1)) != 0)
        bad.push_back("grid.x_points: power of two >= 16 required");
    if (!(grid.q_half_width > 0.0)) bad.push_back("grid.q_half_width: must be positive");
    if (grid.q_points < 16) bad.push_back("grid.q_points: at least 16 required");
    if (!(time.t_end > 0.0)) bad.push_back("time.t_end: must be positive");
    if (time.dt < 0.0) bad.push_back("time.dt: must be non-negative (0 = automatic)");
    if (solver != SolverChoice::parametric && modes.size() > 2)
        bad.push_back("run.solver: joint oracle supports at most two modes");
    if (modes.size() > 2 && field_path != FieldPath::gaussian)
        bad.push_back("run.field_path: grid path supports at most two modes");
    for (double b : sweep)
        if (!(b > 0.0)) bad.push_back("run.sweep: sweep betas must be positive");
    if (output.directory.empty()) bad.push_back("output.directory: must be set");
    if (output.cadence < 1) bad.push_back("output.cadence: must be >= 1");

    if (!bad.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& b : bad) msg += "\n  - " + b;
        throw validation_error(msg);
    }
}

std::vector<QuadratureGrid> ScenarioConfig::quadrature_grids() const {
    std::vector<QuadratureGrid> out;
    for (const auto& m : modes) {
        double c = m.center();
        out.push_back({c - grid.q_half_width, c + grid.q_half_width, grid.q_points});
    }
    return out;
}

SpatialGrid ScenarioConfig::spatial_grid() const {
    return {grid.x_min, grid.x_max, grid.x_points};
}

double ScenarioConfig::slowest_period() const {
    double t = 0.0;
    for (const auto& m : modes) t = std::max(t, m.period());
    return t;
}

double ScenarioConfig::step() const {
    if (time.dt > 0.0) return time.dt;
    return default_time_step(modes, spatial_grid());
}

} // namespace qlm
