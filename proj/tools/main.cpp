#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "markovgp/io.hpp"
#include "markovgp/oracle.hpp"
#include "markovgp/parallel.hpp"
#include "markovgp/posterior.hpp"
#include "markovgp/process.hpp"
#include "markovgp/svg.hpp"
#include "markovgp/verify.hpp"

namespace mg = markovgp;

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitNumericalError = 3;

struct FitOptions {
    std::string model_config;
    std::string data_path;
    std::string error_cov_path;
    std::string grid = "0:10:0.1";
    std::string out_path;
    double level = 0.90;
};

struct SimulateOptions {
    std::string model_config;
    std::string data_path; // design locations (y column ignored)
    std::string error_cov_path;
    std::string grid = "0:10:0.1";
    std::string out_path;
    std::string out_obs_path;
    std::uint64_t seed = 0;
};

struct VerifyOptionsCli {
    int trials = 20000;
    std::uint64_t seed = 7251;
};

struct PlotOptions {
    std::string table_path;
    std::string path_path;
    std::string obs_path;
    std::string out_path;
};

mg::ProcessModel load_model(const std::string& path, mg::BrownianMotionModel* bm_out = nullptr) {
    const mg::ModelConfig cfg = mg::read_model_config_file(path);
    const mg::BrownianMotionModel bm(cfg.mu0, cfg.mu, cfg.sigma0, cfg.sigma);
    if (bm_out) *bm_out = bm;
    return bm.process();
}

mg::Dataset make_dataset(const mg::ObservationData& obs, const std::string& error_cov_path) {
    const auto n = static_cast<Eigen::Index>(obs.x.size());
    Eigen::VectorXd xs(n), ys(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        xs(i) = obs.x[static_cast<std::size_t>(i)];
        ys(i) = obs.y[static_cast<std::size_t>(i)];
    }
    if (!error_cov_path.empty()) {
        Eigen::MatrixXd ecov = mg::read_matrix_file(error_cov_path);
        if (ecov.rows() != n || ecov.cols() != n)
            throw mg::DimensionMismatch("error covariance is " + std::to_string(ecov.rows()) +
                                        "x" + std::to_string(ecov.cols()) + " but n = " +
                                        std::to_string(n));
        return mg::Dataset(std::move(xs), std::move(ys), std::move(ecov));
    }
    if (!obs.noise_sd.empty()) {
        Eigen::VectorXd sd(n);
        for (Eigen::Index i = 0; i < n; ++i) sd(i) = obs.noise_sd[static_cast<std::size_t>(i)];
        return mg::Dataset::per_point_noise(std::move(xs), std::move(ys), sd);
    }
    return mg::Dataset::noise_free(std::move(xs), std::move(ys));
}

void write_text(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mg::ParseError("cannot open output file: " + path);
    out << content;
}

int run_fit(const FitOptions& opt) {
    const mg::ProcessModel model = load_model(opt.model_config);
    const mg::ObservationData obs = mg::read_observations_file(opt.data_path);
    if (obs.sorted_on_load)
        std::cerr << "note: observations were not sorted by x; sorted ascending\n";
    const mg::Dataset data = make_dataset(obs, opt.error_cov_path);
    const std::vector<double> grid = mg::GridSpec::parse(opt.grid).points();
    if (!(opt.level > 0.0 && opt.level < 1.0))
        throw mg::InvalidParameter("band level must lie in (0, 1)");

    mg::PosteriorTable table;
    table.x.resize(grid.size());
    table.mean.resize(grid.size());
    table.variance.resize(grid.size());
    table.lo.resize(grid.size());
    table.hi.resize(grid.size());

    if (!grid.empty()) {
        const mg::NodePosterior nodes = mg::node_posterior(model, data);
        mg::parallel_for(grid.size(), [&](std::size_t i) {
            const mg::PosteriorPoint pt = mg::evaluate_posterior(model, nodes, data, grid[i]);
            const auto [lo, hi] = mg::confidence_band(pt, opt.level);
            table.x[i] = pt.x;
            table.mean[i] = pt.mean;
            table.variance[i] = pt.variance;
            table.lo[i] = lo;
            table.hi[i] = hi;
        });
    }

    std::ostringstream out;
    mg::write_posterior_table(out, table);
    write_text(opt.out_path, out.str());
    return 0;
}

int run_simulate(const SimulateOptions& opt) {
    mg::BrownianMotionModel bm;
    const mg::ProcessModel model = load_model(opt.model_config, &bm);
    const std::vector<double> grid = mg::GridSpec::parse(opt.grid).points();

    std::optional<mg::ObservationData> design;
    if (!opt.data_path.empty()) {
        design = mg::read_observations_file(opt.data_path);
        if (design->sorted_on_load)
            std::cerr << "note: design locations were not sorted by x; sorted ascending\n";
    }
    const std::size_t n_design = design ? design->x.size() : 0;

    // One joint draw over grid and design locations: design observations sit
    // on the same sample path the grid traces.
    Eigen::VectorXd all_x(static_cast<Eigen::Index>(grid.size() + n_design));
    for (std::size_t i = 0; i < grid.size(); ++i) all_x(static_cast<Eigen::Index>(i)) = grid[i];
    for (std::size_t i = 0; i < n_design; ++i)
        all_x(static_cast<Eigen::Index>(grid.size() + i)) = design->x[i];

    Eigen::VectorXd path_values;
    if (all_x.size() > 0)
        path_values = mg::sample_paths(model, all_x, 1, opt.seed).row(0).transpose();

    mg::SeriesData path;
    path.x = grid;
    path.value.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        path.value[i] = path_values(static_cast<Eigen::Index>(i));

    std::ostringstream path_out;
    mg::write_series(path_out, path, "f");
    write_text(opt.out_path, path_out.str());

    if (design) {
        const auto n = static_cast<Eigen::Index>(n_design);
        Eigen::MatrixXd ecov = Eigen::MatrixXd::Zero(n, n);
        if (!opt.error_cov_path.empty()) {
            ecov = mg::read_matrix_file(opt.error_cov_path);
            if (ecov.rows() != n || ecov.cols() != n)
                throw mg::DimensionMismatch("error covariance dimension mismatch with design");
        } else if (!design->noise_sd.empty()) {
            for (Eigen::Index i = 0; i < n; ++i) {
                const double sd = design->noise_sd[static_cast<std::size_t>(i)];
                ecov(i, i) = sd * sd;
            }
        }
        const mg::GaussianVector noise(Eigen::VectorXd::Zero(n), ecov);
        const Eigen::VectorXd eps = mg::sample(noise, 1, opt.seed ^ 0x9e3779b97f4a7c15ULL)
                                        .row(0)
                                        .transpose();

        std::ostringstream obs_out;
        if (!design->noise_sd.empty()) {
            obs_out << "x,y,noise_sd\n";
            for (Eigen::Index i = 0; i < n; ++i)
                obs_out << mg::format_double(design->x[static_cast<std::size_t>(i)]) << ','
                        << mg::format_double(
                               path_values(static_cast<Eigen::Index>(grid.size()) + i) + eps(i))
                        << ','
                        << mg::format_double(design->noise_sd[static_cast<std::size_t>(i)])
                        << '\n';
        } else {
            obs_out << "x,y\n";
            for (Eigen::Index i = 0; i < n; ++i)
                obs_out << mg::format_double(design->x[static_cast<std::size_t>(i)]) << ','
                        << mg::format_double(
                               path_values(static_cast<Eigen::Index>(grid.size()) + i) + eps(i))
                        << '\n';
        }
        write_text(opt.out_obs_path, obs_out.str());
    }
    return 0;
}

int run_verify(const VerifyOptionsCli& opt) {
    mg::VerifyOptions vo;
    vo.trials = opt.trials;
    vo.seed = opt.seed;
    const auto results = mg::run_verification(vo);
    for (const auto& r : results)
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
    return mg::all_passed(results) ? 0 : 1;
}

int run_plot(const PlotOptions& opt) {
    const mg::PosteriorTable table = mg::read_posterior_table_file(opt.table_path);
    std::optional<mg::SeriesData> path;
    if (!opt.path_path.empty()) path = mg::read_series_file(opt.path_path);
    std::optional<mg::ObservationData> obs;
    if (!opt.obs_path.empty()) obs = mg::read_observations_file(opt.obs_path);
    write_text(opt.out_path, mg::render_svg(table, path, obs));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact posterior inference for Gauss-Markov processes"};
    app.require_subcommand(1);

    FitOptions fit;
    auto* fit_cmd =
        app.add_subcommand("fit", "Fit a model to observations and tabulate the posterior");
    fit_cmd->add_option("--model-config", fit.model_config, "Model configuration file")
        ->required();
    fit_cmd->add_option("--data", fit.data_path, "Observations CSV (x,y[,noise_sd])")->required();
    fit_cmd->add_option("--error-cov", fit.error_cov_path,
                        "Dense error covariance file (overrides per-point noise)");
    fit_cmd->add_option("--grid", fit.grid, "Evaluation grid START:STOP:STEP")->required();
    fit_cmd->add_option("--level", fit.level, "Two-sided band coverage level (default 0.90)");
    fit_cmd->add_option("--out", fit.out_path, "Output CSV path (default stdout)");

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand(
        "simulate", "Draw a sample path and optional noisy observations at design points");
    sim_cmd->add_option("--model-config", sim.model_config, "Model configuration file")
        ->required();
    sim_cmd->add_option("--grid", sim.grid, "Path grid START:STOP:STEP")->required();
    sim_cmd->add_option("--seed", sim.seed, "Random seed")->required();
    sim_cmd->add_option("--data", sim.data_path,
                        "Design CSV (x[,y][,noise_sd]); y values are ignored");
    sim_cmd->add_option("--error-cov", sim.error_cov_path, "Dense error covariance file");
    sim_cmd->add_option("--out", sim.out_path, "Path CSV output (default stdout)");
    sim_cmd->add_option("--out-obs", sim.out_obs_path, "Observations CSV output");

    VerifyOptionsCli ver;
    auto* ver_cmd = app.add_subcommand("verify", "Run the built-in verification suite");
    ver_cmd->add_option("--trials", ver.trials, "Monte Carlo trials (default 20000)");
    ver_cmd->add_option("--seed", ver.seed, "Random seed");

    PlotOptions plot;
    auto* plot_cmd = app.add_subcommand("plot", "Render a posterior table as an SVG chart");
    plot_cmd->add_option("--table", plot.table_path, "Posterior table CSV from fit")->required();
    plot_cmd->add_option("--path", plot.path_path, "Sample path CSV from simulate");
    plot_cmd->add_option("--obs", plot.obs_path, "Observations CSV");
    plot_cmd->add_option("--out", plot.out_path, "SVG output path (default stdout)");

    try {
        app.parse(argc, argv);
        if (*fit_cmd) return run_fit(fit);
        if (*sim_cmd) return run_simulate(sim);
        if (*ver_cmd) return run_verify(ver);
        if (*plot_cmd) return run_plot(plot);
        return kExitInputError;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0; // --help
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const mg::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const mg::InvalidParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const mg::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const mg::DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const mg::SingularConditioning& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumericalError;
    } catch (const mg::NotPSD& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumericalError;
    } catch (const mg::DegenerateBracket& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}
