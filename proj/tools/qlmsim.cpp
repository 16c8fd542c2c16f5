#include <CLI11.hpp>

#include "qlm/analyzers.hpp"
#include "qlm/config.hpp"
#include "qlm/errors.hpp"
#include "qlm/runner.hpp"

#include <cstdio>
#include <string>

namespace {

void print_field_report(const qlm::FieldStateGrid& g) {
    for (int j = 0; j < g.n_modes(); ++j) {
        auto q = qlm::quadrature_stats(g, j);
        auto p = qlm::photon_statistics(g, j);
        std::printf("mode %d: mean_q=%.10g var_q=%.10g mean_p=%.10g var_p=%.10g "
                    "uncertainty=%.10g mean_n=%.10g mandel_q=%.10g\n",
                    j, q.mean_q, q.var_q, q.mean_p, q.var_p, q.uncertainty_product(),
                    p.mean_n, p.mandel_q);
    }
    if (g.n_modes() == 2) {
        auto e = qlm::mode_entanglement(g);
        std::printf("entanglement: d12=%.10g reduced_purity=%.10g\n", e.offdiag_d,
                    e.reduced_purity);
    }
}

void print_gauss_report(const qlm::GaussianFieldState& g) {
    auto sq = qlm::squeezing_detect(g);
    for (int j = 0; j < g.n_modes(); ++j) {
        auto q = qlm::quadrature_stats(g, j);
        auto p = qlm::photon_statistics(g, j);
        std::printf("mode %d: mean_q=%.10g var_q=%.10g mean_p=%.10g var_p=%.10g "
                    "uncertainty=%.10g mean_n=%.10g mandel_q=%.10g squeezed=%d "
                    "factor=%.10g\n",
                    j, q.mean_q, q.var_q, q.mean_p, q.var_p, q.uncertainty_product(),
                    p.mean_n, p.mandel_q, sq[j].squeezed ? 1 : 0, sq[j].factor);
    }
    if (g.n_modes() == 2) {
        auto e = qlm::mode_entanglement(g);
        std::printf("entanglement: d12=%.10g reduced_purity=%.10g\n", e.offdiag_d,
                    e.reduced_purity);
    }
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Quantized light-matter dynamics simulator"};
    app.require_subcommand(1);

    std::string config_path, state_path, run_dir, quantity, out_dir;

    auto* validate = app.add_subcommand("validate", "Check a scenario config");
    validate->add_option("config", config_path, "Scenario file")->required();

    auto* run = app.add_subcommand("run", "Run the configured pipelines");
    run->add_option("config", config_path, "Scenario file")->required();
    run->add_option("-o,--output", out_dir, "Override the output directory");

    auto* compare = app.add_subcommand(
        "compare", "Run parametric and joint pipelines and report their distance");
    compare->add_option("config", config_path, "Scenario file")->required();
    compare->add_option("-o,--output", out_dir, "Override the output directory");

    auto* analyze = app.add_subcommand("analyze", "Report diagnostics of a saved state");
    analyze->add_option("state", state_path,
                        "Field state file (.fsg binary grid or .gfs Gaussian text)")
        ->required();

    auto* plots = app.add_subcommand("emit-plots", "Write plot data from a run");
    plots->add_option("run_dir", run_dir, "Completed run directory")->required();
    plots->add_option("quantity", quantity, "var_q | mean_n | d12 | infidelity")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (*validate) {
        auto cfg = qlm::load_config(config_path);
        cfg.validate();
        std::printf("ok: %zu mode(s), t_end=%.10g, solver=%s\n", cfg.modes.size(),
                    cfg.time.t_end,
                    cfg.solver == qlm::SolverChoice::parametric
                        ? "parametric"
                        : cfg.solver == qlm::SolverChoice::joint ? "joint" : "both");
        return 0;
    }
    if (*run || *compare) {
        auto cfg = qlm::load_config(config_path);
        if (*compare) cfg.solver = qlm::SolverChoice::both;
        if (!out_dir.empty()) cfg.output.directory = out_dir;
        auto result = qlm::run_scenario(cfg);
        std::printf("run directory: %s\n", result.directory.c_str());
        if (result.comparison) {
            const auto& rep = *result.comparison;
            std::printf("field_infidelity=%.6e electron_infidelity=%.6e "
                        "total_infidelity=%.6e masked=%zu\n",
                        rep.field_infidelity, rep.electron_infidelity,
                        rep.total_infidelity, rep.masked_points);
        }
        if (!result.sweep_reports.empty())
            std::printf("error_scaling_slope=%.4f over %zu sweep points\n",
                        result.sweep_slope, result.sweep_reports.size());
        return 0;
    }
    if (*analyze) {
        if (state_path.size() > 4 &&
            state_path.compare(state_path.size() - 4, 4, ".gfs") == 0) {
            print_gauss_report(qlm::GaussianFieldState::load(state_path));
        } else {
            auto g = qlm::FieldStateGrid::load(state_path);
            g.normalize();
            print_field_report(g);
        }
        return 0;
    }
    if (*plots) {
        qlm::emit_plot_data(run_dir, quantity);
        std::printf("wrote %s/plots/%s.dat\n", run_dir.c_str(), quantity.c_str());
        return 0;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const qlm::validation_error& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const qlm::guard_error& e) {
        std::fprintf(stderr, "guard trip: %s\n", e.what());
        return 3;
    } catch (const qlm::solver_error& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
