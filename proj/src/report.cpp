#include "vtolctrl/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vtolctrl {

namespace {

std::ofstream open_out(const std::filesystem::path &path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    return out;
}

std::string xml_escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// 1-2-5 tick spacing giving roughly `target` intervals over [lo, hi].
double nice_step(double lo, double hi, int target) {
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return mag * (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0);
}

std::string tick_label(double v) {
    std::ostringstream ss;
    ss << (std::abs(v) < 1e-12 ? 0.0 : v);
    return ss.str();
}

const char *kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

} // namespace

std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    auto out = open_out(path);
    out << text;
}

void write_trace_csv(const std::filesystem::path &path, const LinearModel &model, const SimTrace &trace) {
    auto out = open_out(path);
    out << 't';
    for (std::size_t i = 0; i < model.states(); ++i)
        out << ',' << (i < model.state_names.size() ? model.state_names[i] : "x" + std::to_string(i + 1));
    for (std::size_t i = 0; i < model.inputs(); ++i)
        out << ',' << (i < model.input_names.size() ? model.input_names[i] : "u" + std::to_string(i + 1));
    const std::size_t nw = trace.disturbance.cols();
    for (std::size_t j = 0; j < nw; ++j)
        out << ',' << (nw == 1 ? std::string("w") : "w" + std::to_string(j + 1));
    out << '\n';
    std::string line;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        line = format_number(trace.times[k]);
        for (double v : trace.states.row(k))
            line += ',' + format_number(v);
        for (double v : trace.inputs.row(k))
            line += ',' + format_number(v);
        for (std::size_t j = 0; j < nw; ++j)
            line += ',' + format_number(trace.disturbance(k, j));
        out << line << '\n';
    }
}

void write_gust_csv(const std::filesystem::path &path, const GustRealization &gust) {
    auto out = open_out(path);
    out << "# t [s]; u_g, v_g, w_g [m/s]; p_g, q_g, r_g [rad/s]\n";
    out << "t,u_g,v_g,w_g,p_g,q_g,r_g\n";
    for (std::size_t k = 0; k < gust.size(); ++k) {
        std::string line = format_number(gust.times[k]);
        for (const auto &ch : gust.channels)
            line += ',' + format_number(ch[k]);
        out << line << '\n';
    }
}

void write_polar_csv(const std::filesystem::path &path, const std::vector<PolarRow> &rows) {
    auto out = open_out(path);
    out << "alpha_deg,CL,CDi,Cm\n";
    for (const auto &r : rows)
        out << format_number(r.alpha_deg) << ',' << format_number(r.CL) << ',' << format_number(r.CDi) << ','
            << format_number(r.Cm) << '\n';
}

std::string render_svg(const std::string &title, const std::string &x_label, const std::string &y_label,
                       const std::vector<PlotSeries> &series, std::size_t max_points) {
    constexpr double W = 800, H = 400, left = 70, right = 150, top = 40, bottom = 50;
    const double pw = W - left - right, ph = H - top - bottom;

    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto &s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x0 <= x1)) {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if (x1 - x0 < 1e-300)
        x1 = x0 + 1.0;
    if (y1 - y0 < 1e-300) {
        y0 -= 1.0;
        y1 += 1.0;
    }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

    std::ostringstream svg;
    svg.precision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" viewBox=\"0 0 800 400\" "
           "font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"800\" height=\"400\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
        << "</text>\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xs = nice_step(x0, x1, 8), ys = nice_step(y0, y1, 6);
    for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
        const double px = sx(t);
        svg << "<line x1=\"" << px << "\" y1=\"" << top + ph << "\" x2=\"" << px << "\" y2=\"" << top + ph + 5
            << "\" stroke=\"black\"/><text x=\"" << px << "\" y=\"" << top + ph + 18
            << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    }
    for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
        const double py = sy(t);
        svg << "<line x1=\"" << left - 5 << "\" y1=\"" << py << "\" x2=\"" << left << "\" y2=\"" << py
            << "\" stroke=\"black\"/><text x=\"" << left - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">"
            << tick_label(t) << "</text>\n";
    }
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
        << xml_escape(x_label) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << top + ph / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto &s = series[k];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        const std::size_t stride = std::max<std::size_t>(1, (n + max_points - 1) / std::max<std::size_t>(max_points, 1));
        const char *color = kPalette[k % std::size(kPalette)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < n; i += stride)
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                svg << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
        svg << "\"/>\n";
        const double ly = top + 10 + 18.0 * static_cast<double>(k);
        svg << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << left + pw + 42 << "\" y=\""
            << ly + 4 << "\">" << xml_escape(s.label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace vtolctrl
