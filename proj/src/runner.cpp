#include "qlm/runner.hpp"

#include "qlm/analyzers.hpp"
#include "qlm/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace qlm {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", x);
    return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw solver_error("runner: cannot open " + tmp.string());
        out << content;
        if (!out) throw solver_error("runner: write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

// Fit-sample tensor: 5 points per mode around the coherent centers, spaced to
// stay well inside the quadrature grid.
std::vector<std::vector<double>> fit_samples(const ScenarioConfig& cfg) {
    int n = static_cast<int>(cfg.modes.size());
    double spread = std::min(2.0, cfg.grid.q_half_width / 3.0);
    std::vector<std::vector<double>> out;
    std::vector<int> idx(n, 0);
    for (;;) {
        std::vector<double> pt(n);
        for (int j = 0; j < n; ++j)
            pt[j] = cfg.modes[j].center() + spread * (idx[j] - 2);
        out.push_back(pt);
        int j = n - 1;
        while (j >= 0 && ++idx[j] == 5) idx[j--] = 0;
        if (j < 0) break;
    }
    return out;
}

std::vector<std::vector<double>> grid_samples(const std::vector<QuadratureGrid>& grids) {
    int n = static_cast<int>(grids.size());
    std::size_t total = 1;
    for (const auto& g : grids) total *= static_cast<std::size_t>(g.n_points);
    std::vector<std::vector<double>> out(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::vector<double> q(n);
        std::size_t rem = i;
        for (int j = n - 1; j >= 0; --j) {
            q[j] = grids[j].q(static_cast<int>(rem % grids[j].n_points));
            rem /= static_cast<std::size_t>(grids[j].n_points);
        }
        out[i] = std::move(q);
    }
    return out;
}

struct RecordBuilder {
    TimeSeriesRecord rec;
    void add(const std::string& name, double v) { rec.values.emplace_back(name, v); }
};

void field_columns(RecordBuilder& b, const std::string& prefix,
                   const FieldStateGrid& g) {
    for (int j = 0; j < g.n_modes(); ++j) {
        auto q = quadrature_stats(g, j);
        auto p = photon_statistics(g, j);
        std::string tag = prefix + std::to_string(j);
        b.add(tag + ".mean_q", q.mean_q);
        b.add(tag + ".var_q", q.var_q);
        b.add(tag + ".mean_p", q.mean_p);
        b.add(tag + ".var_p", q.var_p);
        b.add(tag + ".uncertainty", q.uncertainty_product());
        b.add(tag + ".mean_n", p.mean_n);
        b.add(tag + ".mandel_q", p.mandel_q);
    }
    if (g.n_modes() == 2) {
        auto e = mode_entanglement(g);
        b.add(prefix + ".d12", e.offdiag_d);
        b.add(prefix + ".purity", e.reduced_purity);
    }
}

void gauss_columns(RecordBuilder& b, const GaussianFieldState& g) {
    auto sq = squeezing_detect(g);
    for (int j = 0; j < g.n_modes(); ++j) {
        auto q = quadrature_stats(g, j);
        auto p = photon_statistics(g, j);
        std::string tag = "gauss" + std::to_string(j);
        b.add(tag + ".mean_q", q.mean_q);
        b.add(tag + ".var_q", q.var_q);
        b.add(tag + ".mean_p", q.mean_p);
        b.add(tag + ".var_p", q.var_p);
        b.add(tag + ".uncertainty", q.uncertainty_product());
        b.add(tag + ".mean_n", p.mean_n);
        b.add(tag + ".mandel_q", p.mandel_q);
        b.add(tag + ".squeezed", sq[j].squeezed ? 1.0 : 0.0);
        b.add(tag + ".squeeze_factor", sq[j].factor);
    }
    if (g.n_modes() == 2) {
        auto e = mode_entanglement(g);
        b.add("gauss.d12", e.offdiag_d);
        b.add("gauss.purity", e.reduced_purity);
    }
}

std::string records_tsv(const std::vector<TimeSeriesRecord>& records) {
    std::ostringstream out;
    if (records.empty()) return "t\n";
    out << "t";
    for (const auto& [name, v] : records.front().values) out << "\t" << name;
    out << "\n";
    for (const auto& r : records) {
        out << fmt(r.t);
        for (const auto& [name, v] : r.values) out << "\t" << fmt(v);
        out << "\n";
    }
    return out.str();
}

ComparisonReport compare_field_only(const Factorization& fac,
                                    const FieldStateGrid& approx) {
    ComparisonReport rep;
    rep.masked_points = fac.n_masked;
    double no = fac.field.norm(), na = approx.norm();
    rep.field_infidelity = 1.0 - std::abs(inner(fac.field, approx)) / (no * na);
    double cell = fac.field.cell();
    double dsum = 0.0;
    for (std::size_t i = 0; i < fac.field.size(); ++i) {
        double po = std::norm(fac.field.amplitudes[i]) / (no * no);
        double pa = std::norm(approx.amplitudes[i]) / (na * na);
        dsum += (po - pa) * (po - pa) * cell;
    }
    rep.density_distance = std::sqrt(dsum);
    rep.total_infidelity = rep.field_infidelity;
    return rep;
}

RunResult run_single(const ScenarioConfig& cfg);

RunResult run_sweep(const ScenarioConfig& cfg) {
    RunResult result;
    result.directory = cfg.output.directory;
    fs::create_directories(result.directory);

    std::vector<double> betas, errors;
    std::ostringstream sweep_rows;
    sweep_rows << "beta\tfield_infidelity\telectron_infidelity\ttotal_infidelity"
                  "\tdensity_distance\tmasked\n";
    for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
        ScenarioConfig sub = cfg;
        sub.sweep.clear();
        sub.solver = SolverChoice::both;
        sub.output.directory = cfg.output.directory + "/sweep_" + std::to_string(i);
        for (auto& m : sub.modes) {
            double a0 = m.amplitude(); // keep A0 fixed across the sweep
            m.beta = cfg.sweep[i];
            m.n_photons = 0.5 * (a0 / m.beta) * (a0 / m.beta);
        }
        RunResult sub_result = run_single(sub);
        if (!sub_result.comparison)
            throw solver_error("runner: sweep point produced no comparison");
        const ComparisonReport& rep = *sub_result.comparison;
        result.sweep_reports.emplace_back(cfg.sweep[i], rep);
        betas.push_back(cfg.sweep[i]);
        errors.push_back(rep.total_infidelity);
        sweep_rows << fmt(cfg.sweep[i]) << "\t" << fmt(rep.field_infidelity) << "\t"
                   << fmt(rep.electron_infidelity) << "\t" << fmt(rep.total_infidelity)
                   << "\t" << fmt(rep.density_distance) << "\t" << rep.masked_points
                   << "\n";
    }
    bool have_slope = true;
    for (double e : errors)
        if (!(e > 0.0)) have_slope = false;
    if (have_slope && betas.size() >= 2)
        result.sweep_slope = loglog_slope(betas, errors);

    atomic_write(fs::path(result.directory) / "sweep.tsv", sweep_rows.str());
    std::ostringstream summary;
    summary << "sweep_points = " << betas.size() << "\n";
    summary << "error_scaling_slope = " << (have_slope ? fmt(result.sweep_slope) : "nan")
            << "\n";
    atomic_write(fs::path(result.directory) / "summary.txt", summary.str());
    atomic_write(fs::path(result.directory) / "config.txt", serialize_config(cfg));
    return result;
}

RunResult run_single(const ScenarioConfig& cfg) {
    RunResult result;
    result.directory = cfg.output.directory;
    fs::path dir(result.directory);
    fs::create_directories(dir / "checkpoints");
    atomic_write(dir / "config.txt", serialize_config(cfg));

    const double h_raw = cfg.step();
    const int n_steps = static_cast<int>(std::ceil(cfg.time.t_end / h_raw));
    const double h = cfg.time.t_end / n_steps;
    const double period = cfg.slowest_period();
    const int record_every =
        std::max(1, static_cast<int>(std::llround(period / (cfg.output.cadence * h))));
    const int checkpoint_every =
        std::max(1, static_cast<int>(std::llround(period / (8.0 * h))));

    const bool run_parametric = cfg.solver != SolverChoice::joint;
    const bool run_joint = cfg.solver != SolverChoice::parametric;
    const bool path_grid = cfg.field_path != FieldPath::gaussian;
    const bool path_gauss = cfg.field_path != FieldPath::grid;
    const bool free_potential = cfg.potential.kind == PotentialSpec::Kind::free;

    auto grids = cfg.quadrature_grids();
    auto xgrid = cfg.spatial_grid();
    auto gauss0 = GaussianFieldState::coherent(cfg.modes);
    auto grid0 = gauss0.to_grid(grids);
    grid0.normalize();

    // Parametric state
    FieldStateGrid pf_grid = grid0;
    GaussianFieldState pf_gauss = gauss0;
    pf_gauss.normalize();
    auto ens = make_ensemble(cfg.potential, xgrid, fit_samples(cfg),
                             cfg.electron.center, cfg.electron.width,
                             cfg.electron.momentum);
    // Center-sample electron tracked for the gauge diagnostic and the
    // closed-form cross-check.
    std::vector<double> q_center;
    for (const auto& m : cfg.modes) q_center.push_back(m.center());
    ParametricField pf_center{cfg.modes, q_center, !cfg.strong_field};
    auto a_center = CosSum::from_parametric(pf_center);
    auto a_of_t = [&a_center](double t) { return a_center.value(t); };
    ElectronWavefunction f_center = gaussian_packet(xgrid, cfg.electron.center,
                                                    cfg.electron.width,
                                                    cfg.electron.momentum);
    auto pf_builder = [&cfg](const std::vector<double>& q) {
        return ParametricField{cfg.modes, q, !cfg.strong_field};
    };

    // Joint state
    JointWavefunction psi;
    if (run_joint) psi = joint_product(f_center, grid0);

    auto record = [&](double t, const cplx& gauge_r, bool have_gauge) {
        RecordBuilder b;
        b.rec.t = t;
        bool flagged = false;
        if (run_parametric) {
            if (path_grid) {
                double norm = pf_grid.norm();
                if (std::abs(norm - 1.0) > 1e-6) flagged = true;
                FieldStateGrid gs = pf_grid;
                gs.normalize();
                field_columns(b, "grid", gs);
                b.add("grid.norm", norm);
                b.add("grid.zeros_ratio", zeros_guard(gs, grid0, 0.0));
            }
            if (path_gauss) {
                gauss_columns(b, pf_gauss);
                double norm = pf_gauss.norm();
                if (std::abs(norm - 1.0) > 1e-6) flagged = true;
                b.add("gauss.norm", norm);
            }
            if (have_gauge) {
                b.add("gauge_re", gauge_real_residual(gauge_r, h));
                b.add("gauge_im", gauge_r.imag());
            } else {
                b.add("gauge_re", 0.0);
                b.add("gauge_im", 0.0);
            }
        }
        if (run_joint) {
            double norm = psi.norm();
            if (std::abs(norm - 1.0) > 1e-6) flagged = true;
            auto fac = exact_factorize(psi);
            fac.field.normalize();
            field_columns(b, "joint", fac.field);
            b.add("joint.norm", norm);
            b.add("joint.masked", static_cast<double>(fac.n_masked));
        }
        b.add("flag", flagged ? 1.0 : 0.0);
        result.records.push_back(std::move(b.rec));
    };

    auto checkpoint = [&](int step) {
        std::string tag = std::to_string(step);
        if (run_parametric) {
            if (path_grid)
                pf_grid.save((dir / "checkpoints" / ("field_grid_" + tag + ".fsg")).string());
            if (path_gauss)
                pf_gauss.save((dir / "checkpoints" / ("field_gauss_" + tag + ".gfs")).string());
            ens.save((dir / "checkpoints" / ("ensemble_" + tag + ".ens")).string());
        }
        if (run_joint) {
            auto fac = exact_factorize(psi);
            fac.field.save((dir / "checkpoints" / ("joint_field_" + tag + ".fsg")).string());
        }
    };

    record(0.0, cplx{}, false);
    checkpoint(0);

    for (int s = 0; s < n_steps; ++s) {
        double t = s * h;
        double tm = t + 0.5 * h;
        cplx gauge_r{};
        bool have_gauge = false;
        if (run_parametric) {
            auto coeffs = build_backaction(ens, cfg.modes, tm);
            if (path_grid) pf_grid = propagate_field_grid(pf_grid, coeffs, h);
            if (path_gauss) pf_gauss = propagate_gaussian(pf_gauss, coeffs, h);
            if (!free_potential) ens = ensemble_propagate(ens, pf_builder, t, h);
            ElectronWavefunction f_prev = f_center;
            f_center = split_step(f_center, a_of_t, cfg.potential, t, h);
            gauge_r = (inner(f_prev, f_center) - 1.0) / h;
            have_gauge = true;
        }
        if (run_joint) joint_propagate(psi, cfg.potential, t, h);
        if ((s + 1) % record_every == 0 || s + 1 == n_steps)
            record((s + 1) * h, gauge_r, have_gauge);
        if ((s + 1) % checkpoint_every == 0 || s + 1 == n_steps) checkpoint(s + 1);
    }

    // Summary quantities
    std::ostringstream summary;
    summary << "steps = " << n_steps << "\n";
    summary << "dt = " << fmt(h) << "\n";
    if (run_parametric) {
        FieldStateGrid final_grid =
            path_grid ? pf_grid : pf_gauss.to_grid(grids);
        final_grid.normalize();
        result.field_fidelity_to_initial = fidelity(final_grid, grid0);
        summary << "field_fidelity_to_initial = "
                << fmt(result.field_fidelity_to_initial) << "\n";
        if (path_grid) {
            result.field_grid = pf_grid;
            summary << "grid_final_norm = " << fmt(pf_grid.norm()) << "\n";
        }
        if (path_gauss) {
            result.field_gauss = pf_gauss;
            summary << "gauss_final_norm = " << fmt(pf_gauss.norm()) << "\n";
        }
        if (path_grid && path_gauss) {
            FieldStateGrid gg = pf_grid;
            gg.normalize();
            summary << "grid_gauss_fidelity = " << fmt(fidelity(gg, pf_gauss)) << "\n";
        }
        if (free_potential) {
            auto f_ref = volkov_evolve(
                gaussian_packet(xgrid, cfg.electron.center, cfg.electron.width,
                                cfg.electron.momentum),
                a_center, cfg.potential, cfg.time.t_end);
            result.electron_volkov_fidelity =
                std::abs(inner(f_center, f_ref)) / (f_center.norm() * f_ref.norm());
            summary << "electron_volkov_fidelity = "
                    << fmt(result.electron_volkov_fidelity) << "\n";
        }
    }
    if (run_joint) {
        result.joint_final = exact_factorize(psi);
        summary << "joint_final_norm = " << fmt(psi.norm()) << "\n";
        summary << "joint_masked_points = " << result.joint_final->n_masked << "\n";
    }
    if (run_parametric && run_joint) {
        FieldStateGrid approx = path_grid ? pf_grid : pf_gauss.to_grid(grids);
        if (free_potential) {
            auto ens_full = make_ensemble(cfg.potential, xgrid, grid_samples(grids),
                                          cfg.electron.center, cfg.electron.width,
                                          cfg.electron.momentum);
            for (std::size_t j = 0; j < ens_full.size(); ++j) {
                ParametricField pf{cfg.modes, ens_full.q_samples[j], !cfg.strong_field};
                ens_full.samples[j] = volkov_evolve(ens_full.samples[j],
                                                    CosSum::from_parametric(pf),
                                                    cfg.potential, cfg.time.t_end);
            }
            result.comparison = compare_to_parametric(*result.joint_final, approx,
                                                      ens_full);
        } else {
            result.comparison = compare_field_only(*result.joint_final, approx);
        }
        const auto& rep = *result.comparison;
        summary << "compare_field_infidelity = " << fmt(rep.field_infidelity) << "\n";
        summary << "compare_electron_infidelity = " << fmt(rep.electron_infidelity)
                << "\n";
        summary << "compare_total_infidelity = " << fmt(rep.total_infidelity) << "\n";
        summary << "compare_density_distance = " << fmt(rep.density_distance) << "\n";
        summary << "compare_masked_points = " << rep.masked_points << "\n";
    }

    atomic_write(dir / "records.tsv", records_tsv(result.records));
    atomic_write(dir / "summary.txt", summary.str());
    return result;
}

} // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    if (!cfg.sweep.empty()) return run_sweep(cfg);
    return run_single(cfg);
}

void emit_plot_data(const std::string& run_dir, const std::string& quantity) {
    fs::path dir(run_dir);
    fs::create_directories(dir / "plots");

    if (quantity == "infidelity") {
        std::ifstream in(dir / "sweep.tsv");
        if (!in)
            throw validation_error("emit_plot_data: no sweep.tsv in " + run_dir);
        std::ostringstream out;
        std::string line;
        std::getline(in, line);
        out << "# " << line << "\n";
        while (std::getline(in, line)) out << line << "\n";
        atomic_write(dir / "plots" / "infidelity.dat", out.str());
        return;
    }

    std::string needle;
    if (quantity == "var_q") needle = ".var_q";
    else if (quantity == "mean_n") needle = ".mean_n";
    else if (quantity == "d12") needle = ".d12";
    else throw validation_error("emit_plot_data: unknown quantity '" + quantity + "'");

    std::ifstream in(dir / "records.tsv");
    if (!in) throw validation_error("emit_plot_data: no records.tsv in " + run_dir);
    std::string header;
    if (!std::getline(in, header))
        throw validation_error("emit_plot_data: empty records.tsv");
    std::vector<std::string> names;
    std::vector<std::size_t> keep;
    {
        std::istringstream hs(header);
        std::string col;
        std::size_t idx = 0;
        while (std::getline(hs, col, '\t')) {
            if (col.find(needle) != std::string::npos) {
                keep.push_back(idx);
                names.push_back(col);
            }
            ++idx;
        }
    }
    if (keep.empty())
        throw validation_error("emit_plot_data: no recorded columns for '" +
                               quantity + "'");
    std::ostringstream out;
    out << "# t";
    for (const auto& n : names) out << "\t" << n;
    out << "\n";
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, '\t')) cells.push_back(cell);
        if (cells.empty()) continue;
        out << cells[0];
        for (std::size_t k : keep) out << "\t" << cells.at(k);
        out << "\n";
    }
    atomic_write(dir / "plots" / (quantity + ".dat"), out.str());
}

int thread_count() {
    const char* env = std::getenv("QLM_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (!end || *end != '\0' || v < 1)
        throw validation_error("QLM_THREADS must be a positive integer");
    return static_cast<int>(v);
}

} // namespace qlm
