#include "lakevort/domain.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace lakevort {

namespace {

bool point_in_polygon(const std::vector<Vec2>& v, Vec2 p) {
    bool in = false;
    const std::size_t n = v.size();
    for (std::size_t k = 0, m = n - 1; k < n; m = k++) {
        if ((v[k].y > p.y) != (v[m].y > p.y)) {
            double xi = v[m].x + (p.y - v[m].y) / (v[k].y - v[m].y) * (v[k].x - v[m].x);
            if (p.x < xi) in = !in;
        }
    }
    return in;
}

double segment_distance(Vec2 a, Vec2 b, Vec2 p) {
    Vec2 d = b - a;
    double len2 = dot(d, d);
    if (len2 == 0.0) return dist(a, p);
    double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return dist(a + t * d, p);
}

} // namespace

Shape Shape::make_disc(Vec2 c, double r) {
    Shape s;
    s.kind = ShapeKind::disc;
    s.center = c;
    s.radius = r;
    return s;
}

Shape Shape::make_rectangle(Vec2 lo, Vec2 hi) {
    Shape s;
    s.kind = ShapeKind::rectangle;
    s.lo = lo;
    s.hi = hi;
    return s;
}

Shape Shape::make_ellipse(Vec2 c, double ax, double ay) {
    Shape s;
    s.kind = ShapeKind::ellipse;
    s.center = c;
    s.semi_x = ax;
    s.semi_y = ay;
    return s;
}

Shape Shape::make_polygon(std::vector<Vec2> verts) {
    Shape s;
    s.kind = ShapeKind::polygon;
    s.vertices = std::move(verts);
    return s;
}

bool Shape::contains(Vec2 p) const {
    switch (kind) {
    case ShapeKind::disc:
        return dist(p, center) < radius;
    case ShapeKind::rectangle:
        return p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y;
    case ShapeKind::ellipse: {
        double ex = (p.x - center.x) / semi_x;
        double ey = (p.y - center.y) / semi_y;
        return ex * ex + ey * ey < 1.0;
    }
    case ShapeKind::polygon:
        return point_in_polygon(vertices, p);
    }
    return false;
}

void Shape::bbox(Vec2& lo_out, Vec2& hi_out) const {
    switch (kind) {
    case ShapeKind::disc:
        lo_out = {center.x - radius, center.y - radius};
        hi_out = {center.x + radius, center.y + radius};
        return;
    case ShapeKind::rectangle:
        lo_out = lo;
        hi_out = hi;
        return;
    case ShapeKind::ellipse:
        lo_out = {center.x - semi_x, center.y - semi_y};
        hi_out = {center.x + semi_x, center.y + semi_y};
        return;
    case ShapeKind::polygon: {
        lo_out = hi_out = vertices.at(0);
        for (Vec2 v : vertices) {
            lo_out.x = std::min(lo_out.x, v.x);
            lo_out.y = std::min(lo_out.y, v.y);
            hi_out.x = std::max(hi_out.x, v.x);
            hi_out.y = std::max(hi_out.y, v.y);
        }
        return;
    }
    }
}

double Shape::boundary_distance(Vec2 p) const {
    switch (kind) {
    case ShapeKind::disc:
        return radius - dist(p, center);
    case ShapeKind::rectangle:
        return std::min(std::min(p.x - lo.x, hi.x - p.x), std::min(p.y - lo.y, hi.y - p.y));
    case ShapeKind::polygon: {
        double d = DBL_MAX;
        const std::size_t n = vertices.size();
        for (std::size_t k = 0, m = n - 1; k < n; m = k++)
            d = std::min(d, segment_distance(vertices[m], vertices[k], p));
        return d;
    }
    case ShapeKind::ellipse:
        throw std::invalid_argument("boundary_distance: not available for ellipse shapes");
    }
    return 0.0;
}

double DepthSpec::eval(Vec2 p, const Shape& shape) const {
    switch (kind) {
    case DepthKind::constant:
        return a;
    case DepthKind::affine:
        return a + gx * p.x + gy * p.y;
    case DepthKind::radial_bump: {
        Vec2 r = p - center;
        return a - c * dot(r, r);
    }
    case DepthKind::product_distance: {
        if (shape.kind == ShapeKind::rectangle) {
            return c * (p.x - shape.lo.x) * (shape.hi.x - p.x) * (p.y - shape.lo.y) *
                   (shape.hi.y - p.y);
        }
        double d = std::max(shape.boundary_distance(p), 0.0);
        return c * std::pow(d, q);
    }
    }
    return 0.0;
}

double DepthSpec::holder_alpha(const Shape& shape) const {
    if (kind == DepthKind::product_distance && shape.kind != ShapeKind::rectangle)
        return std::min(1.0, q);
    return 1.0;
}

DepthSpec DepthSpec::constant(double a) {
    DepthSpec d;
    d.kind = DepthKind::constant;
    d.a = a;
    return d;
}

DepthSpec DepthSpec::affine(double a, double gx, double gy) {
    DepthSpec d;
    d.kind = DepthKind::affine;
    d.a = a;
    d.gx = gx;
    d.gy = gy;
    return d;
}

DepthSpec DepthSpec::radial_bump(double a, double c, Vec2 center) {
    DepthSpec d;
    d.kind = DepthKind::radial_bump;
    d.a = a;
    d.c = c;
    d.center = center;
    return d;
}

DepthSpec DepthSpec::product_distance(double c, double q) {
    DepthSpec d;
    d.kind = DepthKind::product_distance;
    d.c = c;
    d.q = q;
    return d;
}

LakeDomain build_domain(const DomainSpec& spec) {
    if (spec.nx < 8) throw std::invalid_argument("build_domain: nx must be at least 8");

    LakeDomain dom;
    dom.shape = spec.shape;
    dom.depth_spec = spec.depth;
    dom.holder_alpha = spec.depth.holder_alpha(spec.shape);

    Vec2 lo, hi;
    spec.shape.bbox(lo, hi);
    if (!(hi.x > lo.x && hi.y > lo.y))
        throw std::invalid_argument("build_domain: degenerate shape bounding box");

    Grid g;
    g.nx = spec.nx;
    g.h = (hi.x - lo.x) / spec.nx;
    g.ny = static_cast<int>(std::ceil((hi.y - lo.y) / g.h - 1e-9));
    g.origin = lo;
    if (g.ny < 8) throw std::invalid_argument("build_domain: ny below 8; raise nx");
    dom.grid = g;

    dom.mask.assign(g.cells(), 0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (spec.shape.contains(g.center(i, j))) dom.mask[g.idx(i, j)] = 1;

    dom.cell_to_interior.assign(g.cells(), -1);
    for (int c = 0; c < g.cells(); ++c)
        if (dom.mask[c]) {
            dom.cell_to_interior[c] = static_cast<int>(dom.interior.size());
            dom.interior.push_back(c);
        }
    if (dom.interior.empty()) throw std::invalid_argument("build_domain: empty interior");

    // Connectivity of D (4-neighbor flood fill from the first interior cell).
    {
        std::vector<std::uint8_t> seen(g.cells(), 0);
        std::queue<int> q;
        q.push(dom.interior[0]);
        seen[dom.interior[0]] = 1;
        std::size_t reached = 0;
        while (!q.empty()) {
            int c = q.front();
            q.pop();
            ++reached;
            int i = c % g.nx, j = c / g.nx;
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                int ii = i + di[k], jj = j + dj[k];
                if (!g.in_bounds(ii, jj)) continue;
                int cc = g.idx(ii, jj);
                if (dom.mask[cc] && !seen[cc]) {
                    seen[cc] = 1;
                    q.push(cc);
                }
            }
        }
        if (reached != dom.interior.size())
            throw std::invalid_argument("build_domain: interior is not connected");
    }

    // Simple connectivity: every masked-out cell must be reachable from the grid
    // border through masked-out cells; an unreachable pocket is a hole.
    {
        std::vector<std::uint8_t> seen(g.cells(), 0);
        std::queue<int> q;
        for (int i = 0; i < g.nx; ++i)
            for (int j : {0, g.ny - 1}) {
                int c = g.idx(i, j);
                if (!dom.mask[c] && !seen[c]) {
                    seen[c] = 1;
                    q.push(c);
                }
            }
        for (int j = 0; j < g.ny; ++j)
            for (int i : {0, g.nx - 1}) {
                int c = g.idx(i, j);
                if (!dom.mask[c] && !seen[c]) {
                    seen[c] = 1;
                    q.push(c);
                }
            }
        while (!q.empty()) {
            int c = q.front();
            q.pop();
            int i = c % g.nx, j = c / g.nx;
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                int ii = i + di[k], jj = j + dj[k];
                if (!g.in_bounds(ii, jj)) continue;
                int cc = g.idx(ii, jj);
                if (!dom.mask[cc] && !seen[cc]) {
                    seen[cc] = 1;
                    q.push(cc);
                }
            }
        }
        for (int c = 0; c < g.cells(); ++c)
            if (!dom.mask[c] && !seen[c])
                throw std::invalid_argument("build_domain: interior has a hole (not simply connected)");
    }

    // Depth sampling, floor resolution, clamping.
    dom.depth.assign(g.cells(), 0.0);
    double raw_sup = -DBL_MAX;
    for (int c : dom.interior) {
        double b = spec.depth.eval(g.center(c % g.nx, c / g.nx), spec.shape);
        dom.depth[c] = b;
        raw_sup = std::max(raw_sup, b);
    }
    if (raw_sup <= 0.0)
        throw std::invalid_argument("build_domain: depth non-positive on the whole interior");
    if (spec.depth_floor < 0.0)
        dom.depth_floor = 1e-6 * raw_sup;
    else
        dom.depth_floor = spec.depth_floor;
    dom.sup_depth = -DBL_MAX;
    dom.inf_depth = DBL_MAX;
    for (int c : dom.interior) {
        if (dom.depth[c] <= 0.0 && dom.depth_floor <= 0.0)
            throw std::invalid_argument(
                "build_domain: non-positive depth with clamping disabled (depth_floor = 0)");
        dom.depth[c] = std::max(dom.depth[c], dom.depth_floor);
        dom.sup_depth = std::max(dom.sup_depth, dom.depth[c]);
        dom.inf_depth = std::min(dom.inf_depth, dom.depth[c]);
    }
    for (int c = 0; c < g.cells(); ++c)
        if (!dom.mask[c]) dom.depth[c] = dom.depth_floor;

    // Boundary faces (interior cell against masked-out neighbour or grid edge).
    for (int c : dom.interior) {
        int i = c % g.nx, j = c / g.nx;
        double x0 = g.origin.x + i * g.h, y0 = g.origin.y + j * g.h;
        double x1 = x0 + g.h, y1 = y0 + g.h;
        if (!dom.is_interior(i + 1, j)) dom.faces.push_back({{x1, y0}, {x1, y1}});
        if (!dom.is_interior(i - 1, j)) dom.faces.push_back({{x0, y0}, {x0, y1}});
        if (!dom.is_interior(i, j + 1)) dom.faces.push_back({{x0, y1}, {x1, y1}});
        if (!dom.is_interior(i, j - 1)) dom.faces.push_back({{x0, y0}, {x1, y0}});
    }

    dom.bdist.assign(g.cells(), 0.0);
    for (int c : dom.interior) {
        Vec2 p = g.center(c % g.nx, c / g.nx);
        double d = DBL_MAX;
        for (const BoundaryFace& f : dom.faces) d = std::min(d, segment_distance(f.a, f.b, p));
        dom.bdist[c] = d;
    }

    {
        std::vector<Vec2> corners;
        corners.reserve(dom.faces.size() * 2);
        for (const BoundaryFace& f : dom.faces) {
            corners.push_back(f.a);
            corners.push_back(f.b);
        }
        dom.diameter = point_set_diameter(corners);
    }

    dom.area_m = 0.0;
    dom.area_nu = 0.0;
    const double h2 = g.h * g.h;
    for (int c : dom.interior) {
        dom.area_m += h2;
        dom.area_nu += h2 * dom.depth[c];
    }
    return dom;
}

DeepSet deep_set(const LakeDomain& dom, double tol, double delta) {
    const Grid& g = dom.grid;
    double use_tol = tol;
    if (use_tol <= 0.0) {
        // Curvature scale h^2 max|lap b|, with an ulp floor so exact ties survive.
        double lap_max = 0.0;
        for (int c : dom.interior) {
            int i = c % g.nx, j = c / g.nx;
            if (!dom.is_interior(i + 1, j) || !dom.is_interior(i - 1, j) ||
                !dom.is_interior(i, j + 1) || !dom.is_interior(i, j - 1))
                continue;
            double lap = dom.depth[g.idx(i + 1, j)] + dom.depth[g.idx(i - 1, j)] +
                         dom.depth[g.idx(i, j + 1)] + dom.depth[g.idx(i, j - 1)] -
                         4.0 * dom.depth[c];
            lap_max = std::max(lap_max, std::fabs(lap));
        }
        use_tol = std::max(lap_max, 8.0 * DBL_EPSILON * std::fabs(dom.sup_depth));
    }

    DeepSet s;
    s.sup_depth = dom.sup_depth;
    s.tol = use_tol;
    s.delta = delta;
    for (int c : dom.interior)
        if (dom.depth[c] >= dom.sup_depth - use_tol)
            s.points.push_back(g.center(c % g.nx, c / g.nx));
    s.covers_domain = s.points.size() == dom.interior.size();
    return s;
}

double DeepSet::distance_to(Vec2 p) const {
    double d = DBL_MAX;
    for (Vec2 q : points) d = std::min(d, dist(p, q));
    return d;
}

bool DeepSet::in_neighborhood(Vec2 p) const { return distance_to(p) <= delta; }

double integrate_m(const LakeDomain& dom, const ScalarField& f) {
    if (!f.grid.same_layout(dom.grid))
        throw std::invalid_argument("integrate_m: field grid does not match domain grid");
    double s = 0.0;
    for (int c : dom.interior) s += f.values[c];
    return s * dom.grid.h * dom.grid.h;
}

double integrate_nu(const LakeDomain& dom, const ScalarField& f) {
    if (!f.grid.same_layout(dom.grid))
        throw std::invalid_argument("integrate_nu: field grid does not match domain grid");
    double s = 0.0;
    for (int c : dom.interior) s += f.values[c] * dom.depth[c];
    return s * dom.grid.h * dom.grid.h;
}

double dist_to_boundary(const LakeDomain& dom, Vec2 p) {
    int i, j;
    dom.grid.locate(p, i, j);
    if (!dom.is_interior(i, j)) return 0.0;
    double d = DBL_MAX;
    for (const BoundaryFace& f : dom.faces) d = std::min(d, segment_distance(f.a, f.b, p));
    return d;
}

} // namespace lakevort
