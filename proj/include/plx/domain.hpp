#ifndef PLX_DOMAIN_HPP
#define PLX_DOMAIN_HPP

#include <Eigen/Core>
#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace plx {

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Spatial domain: an interval [a,b], a rectangle [ax,bx]x[ay,by], or a
/// disk of given center and radius. The distance to the boundary is
/// analytic for all three kinds.
struct Domain {
    enum class Kind { Interval, Rectangle, Disk };

    Kind kind = Kind::Interval;
    double ax = 0.0, bx = 1.0;  // interval/rectangle extents in x
    double ay = 0.0, by = 1.0;  // rectangle extents in y
    double cx = 0.0, cy = 0.0;  // disk center
    double radius = 1.0;

    static Domain interval(double a, double b);
    static Domain rectangle(double ax, double bx, double ay, double by);
    static Domain disk(double cx, double cy, double radius);

    int dim() const { return kind == Kind::Interval ? 1 : 2; }
    double diameter() const;

    /// Signed distance to the boundary, positive inside.
    double signed_dist(double x, double y) const;

    /// Returns a domain grown by pad_x (pad_y) on every side along each
    /// axis; pad_x grows the radius for disks.
    Domain padded(double pad_x, double pad_y = 0.0) const;
};

/// Uniform tensor grid over a Domain. Nodes are stored row-major
/// (index = j*nx + i). `dist` is the analytic distance to the boundary,
/// clamped to zero on boundary-masked nodes; for disks, nodes on or
/// outside the circle are masked as boundary.
class Grid {
public:
    Domain domain;
    int nx = 0;               // nodes along x
    int ny = 1;               // nodes along y (1 for intervals)
    double hx = 0.0, hy = 0.0;  // per-axis mesh spacing
    Eigen::ArrayXd xs, ys;    // axis coordinates
    Eigen::ArrayXd node_x, node_y;
    Eigen::ArrayXd dist;
    std::vector<bool> boundary;  // Dirichlet nodes (value pinned to 0)

    int dim() const { return domain.dim(); }
    double h() const { return dim() == 2 ? std::max(hx, hy) : hx; }
    int node_count() const { return nx * ny; }
    int index(int i, int j) const { return j * nx + i; }
    bool is_interior(int k) const { return !boundary[k]; }
    std::vector<int> interior_nodes() const;

    /// Nearest interior node to node k (k itself when interior).
    int nearest_interior(int k) const;

    double max_dist() const { return dist.maxCoeff(); }
};

/// Nodal scalar function on a Grid.
class Field {
public:
    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0)
        : grid_(&g), values(Eigen::ArrayXd::Constant(g.node_count(), fill)) {}
    Field(const Grid& g, Eigen::ArrayXd v) : grid_(&g), values(std::move(v)) {
        if (values.size() != g.node_count())
            throw DomainError("field length does not match grid node count");
    }

    const Grid& grid() const { return *grid_; }
    bool valid() const { return grid_ != nullptr; }
    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int k) { return values[k]; }
    double operator[](int k) const { return values[k]; }

    double sup_abs() const { return values.abs().maxCoeff(); }

    Eigen::ArrayXd values;

private:
    const Grid* grid_ = nullptr;
};

/// pre: n >= 3 nodes per axis. Boundary mask is exact; dist is the
/// analytic distance (interval/rectangle/disk).
Grid build_grid(const Domain& domain, int n);

/// Nodes of the strip Omega_delta = {x : 0 < d(x) < delta}. Warns (via
/// return flag in `vacuous`) when delta covers every interior node.
std::vector<int> boundary_strip(const Grid& grid, double delta, bool* vacuous = nullptr);

/// Grid over the domain enlarged by frac*diameter, keeping the same
/// spacing and node alignment so every node of `grid` coincides with a
/// node of the padded grid. `index_map[k]` is the padded-grid index of
/// node k.
struct PaddedGrid {
    std::shared_ptr<Grid> grid;
    std::vector<int> index_map;
};
PaddedGrid padded_grid(const Grid& grid, double frac);

void write_field_csv(const std::string& path, const std::vector<std::pair<std::string, const Field*>>& cols);

}  // namespace plx

#endif
