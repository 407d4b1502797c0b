#include "lakevort/grid.hpp"

#include <algorithm>

namespace lakevort {

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const int n = static_cast<int>(pts.size());
    if (n < 3) return pts;

    std::vector<Vec2> hull(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) { // lower chain
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const int lower = k + 1;
    for (int i = n - 2; i >= 0; --i) { // upper chain
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double point_set_diameter(const std::vector<Vec2>& pts) {
    std::vector<Vec2> hull = convex_hull(pts);
    const int n = static_cast<int>(hull.size());
    if (n < 2) return 0.0;
    double best = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) best = std::max(best, dist(hull[i], hull[j]));
    return best;
}

bool hull_contains(const std::vector<Vec2>& hull, Vec2 p, double slack) {
    const int n = static_cast<int>(hull.size());
    if (n == 0) return false;
    if (n == 1) return dist(hull[0], p) <= slack;
    if (n == 2) {
        Vec2 d = hull[1] - hull[0];
        double len = norm(d);
        double t = std::clamp(dot(p - hull[0], d) / (len * len), 0.0, 1.0);
        return dist(hull[0] + t * d, p) <= slack;
    }
    for (int i = 0; i < n; ++i) {
        Vec2 a = hull[i], b = hull[(i + 1) % n];
        if (cross(b - a, p - a) < -slack) return false;
    }
    return true;
}

} // namespace lakevort
