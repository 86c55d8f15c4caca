#include "io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace adrceq {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<PlotSeries>& series,
                             int width, int height) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (double v : *s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : *s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) {
        ymax = ymin + 1.0;
        ymin -= 1.0;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const int ml = 70, mr = 20, mt = 36, mb = 48;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
          "font-family=\"sans-serif\">"
       << title << "</text>\n";

    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        os << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << mt << "\" x2=\"" << fmt(px(xv))
           << "\" y2=\"" << mt + ph << "\" stroke=\"#dddddd\"/>\n";
        os << "<line x1=\"" << ml << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << ml + pw
           << "\" y2=\"" << fmt(py(yv)) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << height - mb + 16
           << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(xv)
           << "</text>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << fmt(py(yv) + 4)
           << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(yv)
           << "</text>\n";
    }
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << fmt(pw) << "\" height=\""
       << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
       << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << x_label
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << mt + ph / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" transform=\"rotate(-90 16 "
       << mt + ph / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % 6];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        const std::size_t n = s.x->size();
        const std::size_t stride = std::max<std::size_t>(1, n / 4000);
        for (std::size_t i = 0; i < n; i += stride)
            os << fmt(px((*s.x)[i])) << "," << fmt(py((*s.y)[i])) << " ";
        os << "\"/>\n";
        os << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 16 * si
           << "\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" << color << "\">" << s.name
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) raise(Errc::invalid_argument, "cannot open output file " + path);
    f << content;
}

} // namespace adrceq
