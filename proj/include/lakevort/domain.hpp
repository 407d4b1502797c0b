#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lakevort/grid.hpp"

namespace lakevort {

enum class ShapeKind { disc, rectangle, ellipse, polygon };

struct Shape {
    ShapeKind kind = ShapeKind::disc;
    Vec2 center;                       // disc, ellipse
    double radius = 1.0;               // disc
    Vec2 lo, hi;                       // rectangle
    double semi_x = 1.0, semi_y = 1.0; // ellipse
    std::vector<Vec2> vertices;        // polygon, counterclockwise

    bool contains(Vec2 p) const;
    void bbox(Vec2& lo_out, Vec2& hi_out) const;
    // Signed-free distance to the shape boundary for interior points; exact for
    // disc/rectangle/polygon, unsupported for ellipse (throws).
    double boundary_distance(Vec2 p) const;

    static Shape make_disc(Vec2 c, double r);
    static Shape make_rectangle(Vec2 lo, Vec2 hi);
    static Shape make_ellipse(Vec2 c, double ax, double ay);
    static Shape make_polygon(std::vector<Vec2> verts);
};

// constant:          b = a
// affine:            b = a + gx*x + gy*y
// radial_bump:       b = a - c*|x - x0|^2
// product_distance:  rectangle: b = c * prod of distances to the 4 sides;
//                    disc/polygon: b = c * dist(x, boundary)^q (degenerate shore)
enum class DepthKind { constant, affine, radial_bump, product_distance };

struct DepthSpec {
    DepthKind kind = DepthKind::constant;
    double a = 1.0;
    double c = 1.0;
    double gx = 0.0, gy = 0.0;
    double q = 1.0;
    Vec2 center;

    double eval(Vec2 p, const Shape& shape) const;
    // Holder exponent of b near the shore: min(1, q) for the power-of-distance
    // profiles, 1 for everything else (the rectangle product form is linear in
    // the distance to each edge).
    double holder_alpha(const Shape& shape) const;

    static DepthSpec constant(double a);
    static DepthSpec affine(double a, double gx, double gy);
    static DepthSpec radial_bump(double a, double c, Vec2 center);
    static DepthSpec product_distance(double c, double q);
};

struct DomainSpec {
    Shape shape;
    DepthSpec depth;
    int nx = 256;
    // Clamp floor for the depth samples: negative selects the automatic floor
    // 1e-6 * sup b, zero disables clamping (non-positive depth then throws),
    // positive values are used as given.
    double depth_floor = -1.0;
};

// Axis-aligned face between an interior cell and a masked-out neighbour or the
// grid edge; a and b are its endpoints.
struct BoundaryFace {
    Vec2 a, b;
};

struct LakeDomain {
    Grid grid;
    std::vector<std::uint8_t> mask; // 1 inside D
    std::vector<double> depth;      // >= depth_floor on interior cells
    double diameter = 0.0;
    double holder_alpha = 1.0;
    double depth_floor = 0.0;

    Shape shape;
    DepthSpec depth_spec;

    std::vector<int> interior;         // interior cell indices, ascending
    std::vector<int> cell_to_interior; // -1 on masked-out cells
    std::vector<BoundaryFace> faces;
    std::vector<double> bdist; // distance from cell center to the boundary, 0 outside
    double sup_depth = 0.0;
    double inf_depth = 0.0;
    double area_m = 0.0;  // |D|_m
    double area_nu = 0.0; // |D|_nu

    bool is_interior(int i, int j) const {
        return grid.in_bounds(i, j) && mask[grid.idx(i, j)] != 0;
    }
};

struct DeepSet {
    std::vector<Vec2> points;
    double sup_depth = 0.0;
    double tol = 0.0;
    double delta = 0.0;
    bool covers_domain = false; // every interior cell qualified (flat depth)

    // Membership test for the delta-neighborhood S_delta.
    bool in_neighborhood(Vec2 p) const;
    double distance_to(Vec2 p) const;
};

LakeDomain build_domain(const DomainSpec& spec);

// Cells whose depth is within tol of the interior supremum. tol <= 0 selects the
// curvature scale h^2*max|lap b| (with an ulp floor so constant depth keeps all
// cells and analytic maxima keep only the top cell).
DeepSet deep_set(const LakeDomain& dom, double tol = 0.0, double delta = 0.0);

double integrate_m(const LakeDomain& dom, const ScalarField& f);
double integrate_nu(const LakeDomain& dom, const ScalarField& f);

// Distance from p to the nearest boundary face; 0 for points outside D.
double dist_to_boundary(const LakeDomain& dom, Vec2 p);

} // namespace lakevort
