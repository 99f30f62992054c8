#include "markovgp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace markovgp {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    return in;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, long line) {
    const std::string t = trim(text);
    if (t.empty()) throw ParseError("empty numeric field", line);
    double v = 0.0;
    const char* begin = t.data();
    const char* end = begin + t.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ParseError("malformed number '" + t + "'", line);
    return v;
}

ObservationData read_observations(std::istream& in) {
    ObservationData data;
    std::string line;
    long lineno = 0;
    std::size_t ncols = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto fields = split_csv(t);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() < 2 || fields.size() > 3)
                throw ParseError("observation header must have 2 or 3 columns, got " +
                                     std::to_string(fields.size()),
                                 lineno);
            ncols = fields.size();
            continue; // header row: column names, not data
        }
        if (fields.size() != ncols)
            throw ParseError("expected " + std::to_string(ncols) + " fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        data.x.push_back(parse_double(fields[0], lineno));
        data.y.push_back(parse_double(fields[1], lineno));
        if (ncols == 3) data.noise_sd.push_back(parse_double(fields[2], lineno));
    }
    if (!header_seen) throw ParseError("observation file is empty");
    if (data.x.empty()) throw ParseError("observation file contains no data rows");

    if (!std::is_sorted(data.x.begin(), data.x.end())) {
        std::vector<std::size_t> order(data.x.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return data.x[a] < data.x[b]; });
        ObservationData sorted;
        sorted.sorted_on_load = true;
        for (std::size_t i : order) {
            sorted.x.push_back(data.x[i]);
            sorted.y.push_back(data.y[i]);
            if (!data.noise_sd.empty()) sorted.noise_sd.push_back(data.noise_sd[i]);
        }
        return sorted;
    }
    return data;
}

ObservationData read_observations_file(const std::string& path) {
    auto in = open_or_throw(path);
    return read_observations(in);
}

Eigen::MatrixXd read_matrix(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<double> row;
        std::istringstream ss(t);
        std::string tok;
        while (ss >> tok) row.push_back(parse_double(tok, lineno));
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("ragged matrix row: expected " +
                                 std::to_string(rows.front().size()) + " entries, got " +
                                 std::to_string(row.size()),
                             lineno);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("matrix file is empty");
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

Eigen::MatrixXd read_matrix_file(const std::string& path) {
    auto in = open_or_throw(path);
    return read_matrix(in);
}

ModelConfig read_model_config(std::istream& in) {
    ModelConfig cfg;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value, got '" + t + "'", lineno);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key == "model") {
            cfg.model = value;
            if (value != "brownian")
                throw ParseError("unknown model '" + value + "' (expected 'brownian')", lineno);
        } else if (key == "mu0") {
            cfg.mu0 = parse_double(value, lineno);
        } else if (key == "mu") {
            cfg.mu = parse_double(value, lineno);
        } else if (key == "sigma0") {
            cfg.sigma0 = parse_double(value, lineno);
        } else if (key == "sigma") {
            cfg.sigma = parse_double(value, lineno);
        } else {
            throw ParseError("unknown configuration key '" + key + "'", lineno);
        }
    }
    return cfg;
}

ModelConfig read_model_config_file(const std::string& path) {
    auto in = open_or_throw(path);
    return read_model_config(in);
}

void write_posterior_table(std::ostream& out, const PosteriorTable& table) {
    out << "x,mean,variance,lo,hi\n";
    for (std::size_t i = 0; i < table.size(); ++i)
        out << format_double(table.x[i]) << ',' << format_double(table.mean[i]) << ','
            << format_double(table.variance[i]) << ',' << format_double(table.lo[i]) << ','
            << format_double(table.hi[i]) << '\n';
}

PosteriorTable read_posterior_table(std::istream& in) {
    PosteriorTable table;
    std::string line;
    long lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto fields = split_csv(t);
        if (fields.size() != 5)
            throw ParseError("posterior table needs 5 columns (x,mean,variance,lo,hi), got " +
                                 std::to_string(fields.size()),
                             lineno);
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        table.x.push_back(parse_double(fields[0], lineno));
        table.mean.push_back(parse_double(fields[1], lineno));
        table.variance.push_back(parse_double(fields[2], lineno));
        table.lo.push_back(parse_double(fields[3], lineno));
        table.hi.push_back(parse_double(fields[4], lineno));
    }
    if (!header_seen) throw ParseError("posterior table is empty");
    return table;
}

PosteriorTable read_posterior_table_file(const std::string& path) {
    auto in = open_or_throw(path);
    return read_posterior_table(in);
}

void write_series(std::ostream& out, const SeriesData& series, const std::string& value_name) {
    out << "x," << value_name << '\n';
    for (std::size_t i = 0; i < series.x.size(); ++i)
        out << format_double(series.x[i]) << ',' << format_double(series.value[i]) << '\n';
}

SeriesData read_series_file(const std::string& path) {
    auto in = open_or_throw(path);
    SeriesData series;
    std::string line;
    long lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto fields = split_csv(t);
        if (fields.size() < 2)
            throw ParseError("series file needs at least 2 columns", lineno);
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        series.x.push_back(parse_double(fields[0], lineno));
        series.value.push_back(parse_double(fields[1], lineno));
    }
    if (!header_seen) throw ParseError("series file is empty: " + path);
    return series;
}

GridSpec GridSpec::parse(const std::string& text) {
    const auto first = text.find(':');
    const auto second = text.find(':', first == std::string::npos ? first : first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw ParseError("grid must be START:STOP:STEP, got '" + text + "'");
    GridSpec spec;
    spec.start = parse_double(text.substr(0, first));
    spec.stop = parse_double(text.substr(first + 1, second - first - 1));
    spec.step = parse_double(text.substr(second + 1));
    if (!(spec.step > 0.0))
        throw ParseError("grid step must be positive, got " + format_double(spec.step));
    if (!std::isfinite(spec.start) || !std::isfinite(spec.stop))
        throw ParseError("grid bounds must be finite");
    return spec;
}

std::vector<double> GridSpec::points() const {
    std::vector<double> pts;
    if (start > stop) return pts;
    const double span = stop - start;
    const auto count = static_cast<long>(std::floor(span / step + 1e-9));
    pts.reserve(static_cast<std::size_t>(count) + 1);
    for (long i = 0; i <= count; ++i) pts.push_back(start + static_cast<double>(i) * step);
    return pts;
}

} // namespace markovgp
