#include "plx/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace plx {

Domain Domain::interval(double a, double b) {
    if (!(std::isfinite(a) && std::isfinite(b)) || !(b > a))
        throw DomainError("degenerate interval");
    Domain d;
    d.kind = Kind::Interval;
    d.ax = a;
    d.bx = b;
    return d;
}

Domain Domain::rectangle(double ax, double bx, double ay, double by) {
    if (!(std::isfinite(ax) && std::isfinite(bx) && std::isfinite(ay) && std::isfinite(by)) ||
        !(bx > ax) || !(by > ay))
        throw DomainError("degenerate rectangle");
    Domain d;
    d.kind = Kind::Rectangle;
    d.ax = ax;
    d.bx = bx;
    d.ay = ay;
    d.by = by;
    return d;
}

Domain Domain::disk(double cx, double cy, double radius) {
    if (!(std::isfinite(radius)) || !(radius > 0))
        throw DomainError("degenerate disk");
    Domain d;
    d.kind = Kind::Disk;
    d.cx = cx;
    d.cy = cy;
    d.radius = radius;
    return d;
}

double Domain::diameter() const {
    switch (kind) {
        case Kind::Interval: return bx - ax;
        case Kind::Rectangle: return std::hypot(bx - ax, by - ay);
        case Kind::Disk: return 2.0 * radius;
    }
    return 0.0;
}

double Domain::signed_dist(double x, double y) const {
    switch (kind) {
        case Kind::Interval:
            return std::min(x - ax, bx - x);
        case Kind::Rectangle:
            return std::min(std::min(x - ax, bx - x), std::min(y - ay, by - y));
        case Kind::Disk:
            return radius - std::hypot(x - cx, y - cy);
    }
    return 0.0;
}

Domain Domain::padded(double pad_x, double pad_y) const {
    Domain d = *this;
    d.ax -= pad_x;
    d.bx += pad_x;
    d.ay -= pad_y;
    d.by += pad_y;
    d.radius += pad_x;
    return d;
}

std::vector<int> Grid::interior_nodes() const {
    std::vector<int> out;
    for (int k = 0; k < node_count(); ++k)
        if (!boundary[k]) out.push_back(k);
    return out;
}

int Grid::nearest_interior(int k) const {
    if (!boundary[k]) return k;
    int best = -1;
    double best_d2 = 0.0;
    for (int m = 0; m < node_count(); ++m) {
        if (boundary[m]) continue;
        double dx = node_x[m] - node_x[k];
        double dy = node_y[m] - node_y[k];
        double d2 = dx * dx + dy * dy;
        if (best < 0 || d2 < best_d2) {
            best = m;
            best_d2 = d2;
        }
    }
    if (best < 0) throw DomainError("grid has no interior nodes");
    return best;
}

Grid build_grid(const Domain& domain, int n) {
    if (n < 3) throw DomainError("build_grid requires n >= 3");
    Grid g;
    g.domain = domain;
    g.nx = n;
    g.ny = domain.dim() == 2 ? n : 1;

    double ax, bx, ay = 0.0, by = 0.0;
    switch (domain.kind) {
        case Domain::Kind::Interval:
            ax = domain.ax; bx = domain.bx;
            break;
        case Domain::Kind::Rectangle:
            ax = domain.ax; bx = domain.bx; ay = domain.ay; by = domain.by;
            break;
        case Domain::Kind::Disk:
            ax = domain.cx - domain.radius; bx = domain.cx + domain.radius;
            ay = domain.cy - domain.radius; by = domain.cy + domain.radius;
            break;
    }
    g.hx = (bx - ax) / (n - 1);
    g.hy = g.ny > 1 ? (by - ay) / (g.ny - 1) : 0.0;

    g.xs = Eigen::ArrayXd::LinSpaced(g.nx, ax, bx);
    if (g.ny > 1)
        g.ys = Eigen::ArrayXd::LinSpaced(g.ny, ay, by);
    else
        g.ys = Eigen::ArrayXd::Zero(1);

    int count = g.nx * g.ny;
    g.node_x.resize(count);
    g.node_y.resize(count);
    g.dist.resize(count);
    g.boundary.assign(count, false);

    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            int k = g.index(i, j);
            double x = g.xs[i];
            double y = g.ys[j];
            g.node_x[k] = x;
            g.node_y[k] = y;
            double sd = domain.signed_dist(x, y);
            // Snap to the boundary within rounding noise so dist == 0
            // exactly on masked nodes.
            if (sd < 1e-12 * domain.diameter()) {
                g.boundary[k] = true;
                g.dist[k] = 0.0;
            } else {
                g.dist[k] = sd;
            }
        }
    }
    return g;
}

std::vector<int> boundary_strip(const Grid& grid, double delta, bool* vacuous) {
    if (delta < 0) throw DomainError("boundary_strip requires delta >= 0");
    std::vector<int> out;
    for (int k = 0; k < grid.node_count(); ++k)
        if (grid.is_interior(k) && grid.dist[k] < delta) out.push_back(k);
    if (vacuous) *vacuous = delta >= grid.max_dist();
    return out;
}

PaddedGrid padded_grid(const Grid& grid, double frac) {
    double pad_target = frac * grid.domain.diameter();
    int cells_x = std::max(1, static_cast<int>(std::ceil(pad_target / grid.hx)));
    int cells_y = grid.dim() == 2 ? std::max(1, static_cast<int>(std::ceil(pad_target / grid.hy))) : 0;

    PaddedGrid out;
    Domain enlarged = grid.domain.padded(cells_x * grid.hx, cells_y * grid.hy);
    int n_pad = grid.nx + 2 * cells_x;
    out.grid = std::make_shared<Grid>(build_grid(enlarged, n_pad));
    if (std::abs(out.grid->hx - grid.hx) > 1e-12 * grid.hx)
        throw DomainError("padded grid spacing mismatch");

    out.index_map.resize(grid.node_count());
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            out.index_map[grid.index(i, j)] = out.grid->index(i + cells_x, j + cells_y);
    return out;
}

void write_field_csv(const std::string& path,
                     const std::vector<std::pair<std::string, const Field*>>& cols) {
    if (cols.empty()) return;
    const Grid& g = cols.front().second->grid();
    std::ofstream os(path);
    os.precision(17);
    os << "x";
    if (g.dim() == 2) os << ",y";
    for (const auto& [name, f] : cols) os << "," << name;
    os << "\n";
    for (int k = 0; k < g.node_count(); ++k) {
        os << g.node_x[k];
        if (g.dim() == 2) os << "," << g.node_y[k];
        for (const auto& [name, f] : cols) os << "," << (*f)[k];
        os << "\n";
    }
}

}  // namespace plx
