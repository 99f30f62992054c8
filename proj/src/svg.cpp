#include "markovgp/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace markovgp {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 48.0;

// Fixed 3-decimal coordinates keep the byte stream reproducible.
std::string coord(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
    return std::string(buf, res.ptr);
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    void include(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (hi <= lo) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            const double m = 0.05 * (hi - lo);
            lo -= m;
            hi += m;
        }
    }
};

class Mapper {
public:
    Mapper(Range x, Range y) : x_(x), y_(y) {}
    double px(double x) const {
        return kMargin + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - 2 * kMargin);
    }
    double py(double y) const {
        return kHeight - kMargin - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - 2 * kMargin);
    }
    const Range& xr() const { return x_; }
    const Range& yr() const { return y_; }

private:
    Range x_, y_;
};

void polyline(std::ostringstream& out, const Mapper& map, const std::vector<double>& xs,
              const std::vector<double>& ys, const char* style) {
    if (xs.empty()) return;
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out << ' ';
        out << coord(map.px(xs[i])) << ',' << coord(map.py(ys[i]));
    }
    out << "\"/>\n";
}

} // namespace

std::string render_svg(const PosteriorTable& table, const std::optional<SeriesData>& path,
                       const std::optional<ObservationData>& obs) {
    Range xr, yr;
    bool any = false;
    auto seed_ranges = [&](double x, double y) {
        if (!any) {
            xr.lo = xr.hi = x;
            yr.lo = yr.hi = y;
            any = true;
        } else {
            xr.include(x);
            yr.include(y);
        }
    };
    for (std::size_t i = 0; i < table.size(); ++i) {
        seed_ranges(table.x[i], table.mean[i]);
        xr.include(table.x[i]);
        yr.include(table.lo[i]);
        yr.include(table.hi[i]);
    }
    if (path)
        for (std::size_t i = 0; i < path->x.size(); ++i) seed_ranges(path->x[i], path->value[i]);
    if (obs)
        for (std::size_t i = 0; i < obs->x.size(); ++i) seed_ranges(obs->x[i], obs->y[i]);
    xr.pad();
    yr.pad();
    const Mapper map(xr, yr);

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(kWidth)
        << "\" height=\"" << coord(kHeight) << "\" viewBox=\"0 0 " << coord(kWidth) << ' '
        << coord(kHeight) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << coord(kWidth) << "\" height=\"" << coord(kHeight)
        << "\" fill=\"white\"/>\n";

    // Credible band as one closed polygon: upper edge forward, lower edge back.
    bool band_visible = false;
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table.hi[i] > table.lo[i]) {
            band_visible = true;
            break;
        }
    if (band_visible && table.size() > 0) {
        out << "<polygon fill=\"#c8c8c8\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (i) out << ' ';
            out << coord(map.px(table.x[i])) << ',' << coord(map.py(table.hi[i]));
        }
        for (std::size_t i = table.size(); i-- > 0;)
            out << ' ' << coord(map.px(table.x[i])) << ',' << coord(map.py(table.lo[i]));
        out << "\"/>\n";
    }

    if (path)
        polyline(out, map, path->x, path->value, "stroke=\"#c03030\" stroke-width=\"1.5\"");
    polyline(out, map, table.x, table.mean, "stroke=\"#000000\" stroke-width=\"1.5\"");

    if (obs)
        for (std::size_t i = 0; i < obs->x.size(); ++i)
            out << "<circle cx=\"" << coord(map.px(obs->x[i])) << "\" cy=\""
                << coord(map.py(obs->y[i])) << "\" r=\"3.5\" fill=\"#000000\"/>\n";

    // Frame and corner labels.
    out << "<rect x=\"" << coord(kMargin) << "\" y=\"" << coord(kMargin) << "\" width=\""
        << coord(kWidth - 2 * kMargin) << "\" height=\"" << coord(kHeight - 2 * kMargin)
        << "\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << coord(kMargin) << "\" y=\"" << coord(kHeight - kMargin + 16.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\">x=" << format_double(map.xr().lo)
        << "</text>\n";
    out << "<text x=\"" << coord(kWidth - kMargin) << "\" y=\""
        << coord(kHeight - kMargin + 16.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">x="
        << format_double(map.xr().hi) << "</text>\n";
    out << "<text x=\"" << coord(kMargin - 4.0) << "\" y=\"" << coord(kHeight - kMargin)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << format_double(map.yr().lo) << "</text>\n";
    out << "<text x=\"" << coord(kMargin - 4.0) << "\" y=\"" << coord(kMargin + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << format_double(map.yr().hi) << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

} // namespace markovgp
