#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace lakevort {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// Uniform cell-centered grid. Cell (i,j) has center origin + ((i+1/2)h, (j+1/2)h);
// fields are stored row-major with i fastest.
struct Grid {
    int nx = 0;
    int ny = 0;
    double h = 0.0;
    Vec2 origin;

    int cells() const { return nx * ny; }
    int idx(int i, int j) const { return j * nx + i; }
    bool in_bounds(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
    Vec2 center(int i, int j) const {
        return {origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h};
    }
    // Indices of the cell containing p; may fall outside [0,nx)x[0,ny).
    void locate(Vec2 p, int& i, int& j) const {
        i = static_cast<int>(std::floor((p.x - origin.x) / h));
        j = static_cast<int>(std::floor((p.y - origin.y) / h));
    }
    bool same_layout(const Grid& g) const {
        return nx == g.nx && ny == g.ny && h == g.h && origin.x == g.origin.x &&
               origin.y == g.origin.y;
    }
};

struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.cells(), fill) {}
    double& operator()(int i, int j) { return values[grid.idx(i, j)]; }
    double operator()(int i, int j) const { return values[grid.idx(i, j)]; }
};

struct VectorField {
    ScalarField x;
    ScalarField y;

    VectorField() = default;
    explicit VectorField(const Grid& g) : x(g), y(g) {}
};

// Andrew monotone chain; counterclockwise, no repeated endpoint.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

// Largest pairwise distance over the hull of pts; 0 for fewer than two points.
double point_set_diameter(const std::vector<Vec2>& pts);

// True if p lies in the closed convex hull (given counterclockwise).
bool hull_contains(const std::vector<Vec2>& hull, Vec2 p, double slack = 1e-12);

} // namespace lakevort
