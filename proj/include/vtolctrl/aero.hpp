// Planar vortex-lattice solver for a flat swept tapered wing.
#pragma once

#include <array>
#include <numbers>
#include <vector>

#include "vtolctrl/linalg.hpp"

namespace vtolctrl {

using Vec3 = std::array<double, 3>;

struct WingGeometry {
    double span = 1.2;                                 ///< tip to tip [m]
    double root_chord = 0.28;                          ///< [m]
    double tip_chord = 0.15;                           ///< [m]
    double sweep = 25.0 * std::numbers::pi / 180.0;    ///< leading-edge sweep [rad]
    std::size_t spanwise_panels = 32;
    std::size_t chordwise_panels = 1;
    double x_cg = 0.15; ///< moment reference, aft of the root leading edge [m]

    void validate() const;

    static WingGeometry rectangular(double aspect_ratio, double chord, std::size_t spanwise,
                                    std::size_t chordwise = 1);

    double planform_area() const; ///< trapezoid formula
    double mean_aerodynamic_chord() const;
    double aspect_ratio() const;
};

/// One lattice panel with its horseshoe vortex. Body axes: x aft, y right,
/// z up; the wake trails to +x in the wing plane.
struct Panel {
    std::array<Vec3, 4> corners; ///< le-left, le-right, te-right, te-left
    Vec3 bound_a;                ///< quarter-chord, left end
    Vec3 bound_b;                ///< quarter-chord, right end
    Vec3 control_point;          ///< three-quarter chord, mid-span
    double area = 0.0;
    double span_projection = 0.0; ///< y extent of the bound segment
    double bound_length = 0.0;    ///< |B - A|
};

struct PanelGrid {
    WingGeometry geometry;
    std::vector<Panel> panels;
    double area = 0.0; ///< sum of panel areas
};

PanelGrid build_panels(const WingGeometry &geometry);

/// Velocity induced at p by a unit-strength horseshoe (bound a -> b, legs to +x).
Vec3 horseshoe_velocity(const Vec3 &p, const Vec3 &a, const Vec3 &b);

/// Normal (z) velocity at each control point due to each unit horseshoe.
Matrix influence_matrix(const PanelGrid &grid);
/// Single-threaded reference for influence_matrix().
Matrix influence_matrix_serial(const PanelGrid &grid);

/// Circulations enforcing small-angle flow tangency (w_induced = -V alpha).
/// Throws SingularAIC for a degenerate lattice.
std::vector<double> solve_circulation(const PanelGrid &grid, double alpha, double v_inf);

struct VlmSolution {
    std::vector<double> gamma; ///< [m^2/s]
    double lift = 0.0;         ///< [N]
    double induced_drag = 0.0; ///< [N]
    double pitching_moment = 0.0; ///< about x_cg, nose up positive [N m]
    double CL = 0.0;
    double CDi = 0.0;
    double Cm = 0.0;
};

/// Kutta-Joukowski panel lift rho V Gamma_i dy_i summed over the wing;
/// induced drag from the trailing-vortex downwash at the bound vortices.
VlmSolution forces_and_coefficients(const PanelGrid &grid, const std::vector<double> &gamma, double rho,
                                    double v_inf);

/// Convenience: solve and integrate at one angle of attack.
VlmSolution solve_vlm(const PanelGrid &grid, double alpha, double rho = 1.225, double v_inf = 22.49);

struct PolarRow {
    double alpha_deg, CL, CDi, Cm;
};

std::vector<PolarRow> alpha_sweep(const WingGeometry &geometry, double alpha_start_deg, double alpha_end_deg,
                                  double step_deg, double rho = 1.225, double v_inf = 22.49);

} // namespace vtolctrl
