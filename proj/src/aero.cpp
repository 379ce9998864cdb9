#include "vtolctrl/aero.hpp"

#include <cmath>

namespace vtolctrl {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kCoreRadiusSq = 1e-20;

Vec3 sub(const Vec3 &a, const Vec3 &b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 add(const Vec3 &a, const Vec3 &b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 scale(const Vec3 &a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
double dot(const Vec3 &a, const Vec3 &b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double length(const Vec3 &a) { return std::sqrt(dot(a, a)); }
Vec3 cross(const Vec3 &a, const Vec3 &b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Finite vortex segment a -> b, unit circulation.
Vec3 segment_velocity(const Vec3 &p, const Vec3 &a, const Vec3 &b) {
    const Vec3 r1 = sub(p, a), r2 = sub(p, b), r0 = sub(b, a);
    const Vec3 c = cross(r1, r2);
    const double c2 = dot(c, c);
    const double l1 = length(r1), l2 = length(r2);
    if (c2 < kCoreRadiusSq || l1 == 0.0 || l2 == 0.0)
        return {0.0, 0.0, 0.0};
    const double k = (dot(r0, r1) / l1 - dot(r0, r2) / l2) / (kFourPi * c2);
    return scale(c, k);
}

// Semi-infinite vortex starting at a and running to +infinity along d.
Vec3 semi_infinite_velocity(const Vec3 &p, const Vec3 &a, const Vec3 &d) {
    const Vec3 r = sub(p, a);
    const Vec3 c = cross(d, r);
    const double c2 = dot(c, c);
    const double lr = length(r);
    if (c2 < kCoreRadiusSq || lr == 0.0)
        return {0.0, 0.0, 0.0};
    return scale(c, (1.0 + dot(d, r) / lr) / (kFourPi * c2));
}

double quad_area(const std::array<Vec3, 4> &q) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec3 &a = q[i], &b = q[(i + 1) % 4];
        s += a[0] * b[1] - b[0] * a[1];
    }
    return 0.5 * std::abs(s);
}

double influence_entry(const PanelGrid &grid, std::size_t i, std::size_t j) {
    const Panel &pj = grid.panels[j];
    return horseshoe_velocity(grid.panels[i].control_point, pj.bound_a, pj.bound_b)[2];
}

} // namespace

void WingGeometry::validate() const {
    if (!(span > 0.0) || !(root_chord > 0.0) || !(tip_chord > 0.0))
        throw Error(ErrorCode::InvalidArgument, "wing lengths must be positive");
    if (tip_chord > root_chord)
        throw Error(ErrorCode::InvalidArgument, "tip chord must not exceed root chord");
    if (spanwise_panels < 1 || chordwise_panels < 1)
        throw Error(ErrorCode::InvalidArgument, "panel counts must be at least 1");
    // A panel straddling the root of a swept or tapered wing cannot follow the kink.
    if (spanwise_panels % 2 == 1 && (sweep != 0.0 || tip_chord != root_chord))
        throw Error(ErrorCode::InvalidArgument, "spanwise panel count must be even for a swept or tapered wing");
    if (!(std::abs(sweep) < std::numbers::pi / 2.0))
        throw Error(ErrorCode::InvalidArgument, "sweep must be within (-90, 90) degrees");
}

WingGeometry WingGeometry::rectangular(double aspect_ratio, double chord, std::size_t spanwise,
                                       std::size_t chordwise) {
    WingGeometry g;
    g.span = aspect_ratio * chord;
    g.root_chord = g.tip_chord = chord;
    g.sweep = 0.0;
    g.spanwise_panels = spanwise;
    g.chordwise_panels = chordwise;
    g.x_cg = 0.25 * chord;
    return g;
}

double WingGeometry::planform_area() const { return 0.5 * (root_chord + tip_chord) * span; }

double WingGeometry::mean_aerodynamic_chord() const {
    const double taper = tip_chord / root_chord;
    return 2.0 / 3.0 * root_chord * (1.0 + taper + taper * taper) / (1.0 + taper);
}

double WingGeometry::aspect_ratio() const { return span * span / planform_area(); }

PanelGrid build_panels(const WingGeometry &g) {
    g.validate();
    const double half = 0.5 * g.span;
    const double tan_sweep = std::tan(g.sweep);
    auto leading_edge = [&](double y) { return std::abs(y) * tan_sweep; };
    auto chord = [&](double y) { return g.root_chord - (g.root_chord - g.tip_chord) * std::abs(y) / half; };
    auto point = [&](double y, double frac) { return Vec3{leading_edge(y) + frac * chord(y), y, 0.0}; };

    PanelGrid grid;
    grid.geometry = g;
    const auto ns = g.spanwise_panels, nc = g.chordwise_panels;
    grid.panels.reserve(ns * nc);
    for (std::size_t j = 0; j < ns; ++j) {
        const double y0 = -half + g.span * static_cast<double>(j) / static_cast<double>(ns);
        const double y1 = -half + g.span * static_cast<double>(j + 1) / static_cast<double>(ns);
        const double ym = 0.5 * (y0 + y1);
        for (std::size_t r = 0; r < nc; ++r) {
            const double f0 = static_cast<double>(r) / static_cast<double>(nc);
            const double f1 = static_cast<double>(r + 1) / static_cast<double>(nc);
            Panel p;
            p.corners = {point(y0, f0), point(y1, f0), point(y1, f1), point(y0, f1)};
            const double fq = f0 + 0.25 * (f1 - f0);
            p.bound_a = point(y0, fq);
            p.bound_b = point(y1, fq);
            p.control_point = point(ym, f0 + 0.75 * (f1 - f0));
            p.area = quad_area(p.corners);
            p.span_projection = y1 - y0;
            p.bound_length = length(sub(p.bound_b, p.bound_a));
            grid.area += p.area;
            grid.panels.push_back(p);
        }
    }
    return grid;
}

Vec3 horseshoe_velocity(const Vec3 &p, const Vec3 &a, const Vec3 &b) {
    const Vec3 downstream{1.0, 0.0, 0.0};
    // inbound leg (infinity -> a) is the reverse of a semi-infinite leg from a
    Vec3 v = scale(semi_infinite_velocity(p, a, downstream), -1.0);
    v = add(v, segment_velocity(p, a, b));
    return add(v, semi_infinite_velocity(p, b, downstream));
}

Matrix influence_matrix_serial(const PanelGrid &grid) {
    const std::size_t n = grid.panels.size();
    Matrix aic(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            aic(i, j) = influence_entry(grid, i, j);
    return aic;
}

Matrix influence_matrix(const PanelGrid &grid) {
    const std::size_t n = grid.panels.size();
    Matrix aic(n, n);
#ifdef VTOLCTRL_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < n; ++j)
            aic(i, j) = influence_entry(grid, i, j);
    }
    return aic;
}

std::vector<double> solve_circulation(const PanelGrid &grid, double alpha, double v_inf) {
    if (!(std::abs(alpha) < 15.0 * std::numbers::pi / 180.0))
        throw Error(ErrorCode::InvalidArgument, "angle of attack outside the linear range (|alpha| < 15 deg)");
    if (!(v_inf > 0.0))
        throw Error(ErrorCode::InvalidArgument, "freestream speed must be positive");
    const std::size_t n = grid.panels.size();
    const Matrix aic = influence_matrix(grid);
    const Matrix rhs(n, 1, -v_inf * alpha);
    Matrix g;
    try {
        g = solve_linear(aic, rhs);
    } catch (const Error &e) {
        throw Error(ErrorCode::SingularAIC, e.what());
    }
    const double res = (aic * g - rhs).norm();
    if (res > 1e-10 * std::max(rhs.norm(), 1e-300) && rhs.norm() > 0.0)
        throw Error(ErrorCode::SingularAIC, "tangency residual " + std::to_string(res) + " too large");
    return g.col(0);
}

VlmSolution forces_and_coefficients(const PanelGrid &grid, const std::vector<double> &gamma, double rho,
                                    double v_inf) {
    const std::size_t n = grid.panels.size();
    if (gamma.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "one circulation per panel required");
    VlmSolution s;
    s.gamma = gamma;

    // Far-wake (Trefftz-plane) downwash; the trailing vortices reach the bound
    // vortex as semi-infinite lines, which see half of it.
    auto lifting_line_downwash = [&](double y) {
        double w = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const Panel &pj = grid.panels[j];
            const double db = y - pj.bound_b[1], da = y - pj.bound_a[1];
            if (db != 0.0)
                w += gamma[j] / db;
            if (da != 0.0)
                w -= gamma[j] / da;
        }
        return 0.5 * w / (2.0 * std::numbers::pi);
    };

    const double x_ref = grid.geometry.x_cg;
    for (std::size_t i = 0; i < n; ++i) {
        const Panel &p = grid.panels[i];
        const double lift_i = rho * v_inf * gamma[i] * p.span_projection;
        const double y_mid = 0.5 * (p.bound_a[1] + p.bound_b[1]);
        const double x_mid = 0.5 * (p.bound_a[0] + p.bound_b[0]);
        s.lift += lift_i;
        s.induced_drag -= rho * lifting_line_downwash(y_mid) * gamma[i] * p.span_projection;
        s.pitching_moment -= lift_i * (x_mid - x_ref);
    }
    const double q_inf = 0.5 * rho * v_inf * v_inf;
    const double area = grid.area;
    s.CL = s.lift / (q_inf * area);
    s.CDi = s.induced_drag / (q_inf * area);
    s.Cm = s.pitching_moment / (q_inf * area * grid.geometry.mean_aerodynamic_chord());
    return s;
}

VlmSolution solve_vlm(const PanelGrid &grid, double alpha, double rho, double v_inf) {
    return forces_and_coefficients(grid, solve_circulation(grid, alpha, v_inf), rho, v_inf);
}

std::vector<PolarRow> alpha_sweep(const WingGeometry &geometry, double alpha_start_deg, double alpha_end_deg,
                                  double step_deg, double rho, double v_inf) {
    if (!(step_deg > 0.0) || alpha_end_deg < alpha_start_deg)
        throw Error(ErrorCode::InvalidArgument, "alpha sweep needs step > 0 and end >= start");
    const PanelGrid grid = build_panels(geometry);
    std::vector<PolarRow> rows;
    const auto count = static_cast<std::size_t>(std::floor((alpha_end_deg - alpha_start_deg) / step_deg + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) {
        const double a_deg = alpha_start_deg + static_cast<double>(k) * step_deg;
        const VlmSolution s = solve_vlm(grid, a_deg * std::numbers::pi / 180.0, rho, v_inf);
        rows.push_back({a_deg, s.CL, s.CDi, s.Cm});
    }
    return rows;
}

} // namespace vtolctrl
