// CSV and SVG writers for traces, gusts and polars.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vtolctrl/aero.hpp"
#include "vtolctrl/models.hpp"
#include "vtolctrl/sim.hpp"
#include "vtolctrl/wind.hpp"

namespace vtolctrl {

/// Shortest round-trip decimal form of v.
std::string format_number(double v);

/// Header t,<state names>,<input names>,w (w1.. for several channels).
void write_trace_csv(const std::filesystem::path &path, const LinearModel &model, const SimTrace &trace);

/// Header comment with units, then t,u_g,v_g,w_g,p_g,q_g,r_g.
void write_gust_csv(const std::filesystem::path &path, const GustRealization &gust);

/// alpha_deg,CL,CDi,Cm
void write_polar_csv(const std::filesystem::path &path, const std::vector<PolarRow> &rows);

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

/// 800x400 line plot: one polyline per series, axis ticks and a legend.
/// Series longer than max_points are decimated by striding.
std::string render_svg(const std::string &title, const std::string &x_label, const std::string &y_label,
                       const std::vector<PlotSeries> &series, std::size_t max_points = 2000);

void write_text(const std::filesystem::path &path, const std::string &text);

} // namespace vtolctrl
