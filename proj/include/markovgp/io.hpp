#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "markovgp/errors.hpp"

namespace markovgp {

/// Shortest-round-trip decimal form, capped at 17 significant digits.
/// Locale-independent (std::to_chars).
std::string format_double(double v);

/// Strict full-string parse; throws ParseError.
double parse_double(const std::string& text, long line = 0);

/// Observations parsed from header-bearing CSV with columns x,y and an
/// optional third noise standard-deviation column.
struct ObservationData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> noise_sd; // empty when the column is absent
    bool sorted_on_load = false;  // true when input needed re-sorting
};

ObservationData read_observations(std::istream& in);
ObservationData read_observations_file(const std::string& path);

/// Whitespace-separated dense matrix, one row per line.
Eigen::MatrixXd read_matrix(std::istream& in);
Eigen::MatrixXd read_matrix_file(const std::string& path);

/// key=value model configuration. Only `model=brownian` is recognized;
/// parameters default to mu0=0, mu=0, sigma0=0, sigma=1.
struct ModelConfig {
    std::string model = "brownian";
    double mu0 = 0.0;
    double mu = 0.0;
    double sigma0 = 0.0;
    double sigma = 1.0;
};

ModelConfig read_model_config(std::istream& in);
ModelConfig read_model_config_file(const std::string& path);

/// Posterior table rows: x, mean, variance, lo, hi.
struct PosteriorTable {
    std::vector<double> x, mean, variance, lo, hi;
    std::size_t size() const { return x.size(); }
};

void write_posterior_table(std::ostream& out, const PosteriorTable& table);
PosteriorTable read_posterior_table(std::istream& in);
PosteriorTable read_posterior_table_file(const std::string& path);

/// Two-column (x, value) CSV with a header, e.g. simulated paths.
struct SeriesData {
    std::vector<double> x;
    std::vector<double> value;
};

void write_series(std::ostream& out, const SeriesData& series, const std::string& value_name);
SeriesData read_series_file(const std::string& path);

/// Evaluation grid START:STOP:STEP, inclusive of STOP up to round-off.
/// START > STOP yields an empty grid.
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    static GridSpec parse(const std::string& text);
    std::vector<double> points() const;
};

} // namespace markovgp
