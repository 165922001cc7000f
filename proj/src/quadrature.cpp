#include "plx/quadrature.hpp"

#include <cmath>

namespace plx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxDepth2D = 10;

bool piece_active(const RhsPiece& piece, double d) {
    return d >= piece.d_min && d < piece.d_max;
}

// integral of s^(j+alpha) over [s0, s1] (alpha > -1, s0,s1 >= 0).
double power_moment(double s0, double s1, double ex) {
    double e = ex + 1.0;
    return (std::pow(s1, e) - std::pow(s0, e)) / e;
}

// integral over [a,b] of (c0 + c1*(x-a) + c2*(x-a)^2) * d^alpha dx.
double subcell_weighted_poly(double a, double b, double s0, double s1, double alpha,
                             double c0, double c1, double c2) {
    if (b <= a) return 0.0;
    double sl = (s1 - s0) / (b - a);  // +-1 in exact arithmetic
    sl = sl >= 0 ? 1.0 : -1.0;
    double lo = std::min(s0, s1), hi = std::max(s0, s1);
    // Integrate in the s variable on [lo, hi]; translate (x-a) = sl*(s-s0).
    auto mom = [&](double ex) { return power_moment(lo, hi, ex); };
    double I0 = mom(alpha);
    double J1 = mom(alpha + 1.0);
    double J2 = mom(alpha + 2.0);
    // (x-a) = sl*(s-s0), (x-a)^2 = (s-s0)^2
    double M1 = sl * (J1 - s0 * I0);
    double M2 = J2 - 2.0 * s0 * J1 + s0 * s0 * I0;
    return c0 * I0 + c1 * M1 + c2 * M2;
}

struct AffineOnCell {
    double v0, slope;  // value at left end a, d/dx
    double at(double a, double x) const { return v0 + slope * (x - a); }
};

// 1D worker shared by integrate() and assemble_load(): walks cells, splits
// at the distance kink and at piece-region crossings, and integrates each
// piece exactly (power frozen at the subcell midpoint).
template <typename Emit>
void sweep_1d(const Grid& g, const std::vector<RhsPiece>& pieces, Emit&& emit) {
    double A = g.domain.ax, B = g.domain.bx;
    double mid = 0.5 * (A + B);
    auto dist_at = [&](double x) { return std::min(x - A, B - x); };

    std::vector<double> splits;
    for (int i = 0; i + 1 < g.nx; ++i) {
        double x0 = g.xs[i], x1 = g.xs[i + 1];
        splits.clear();
        splits.push_back(x0);
        auto add = [&](double x) {
            if (x > x0 + 1e-14 && x < x1 - 1e-14) splits.push_back(x);
        };
        add(mid);  // kink of d(x)
        for (const auto& piece : pieces) {
            for (double v : {piece.d_min, piece.d_max}) {
                if (v <= 0 || !std::isfinite(v)) continue;
                add(A + v);
                add(B - v);
            }
        }
        splits.push_back(x1);
        std::sort(splits.begin(), splits.end());

        for (std::size_t s = 0; s + 1 < splits.size(); ++s) {
            double a = splits[s], b = splits[s + 1];
            if (b - a < 1e-15 * (B - A)) continue;
            double xm = 0.5 * (a + b);
            double dm = dist_at(xm);
            for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
                if (!piece_active(pieces[pi], dm)) continue;
                emit(static_cast<int>(pi), i, a, b, dist_at(a), dist_at(b));
            }
        }
    }
}

AffineOnCell interp_1d(const Grid& g, const Field& f, int cell, double a, double) {
    double x0 = g.xs[cell], x1 = g.xs[cell + 1];
    double slope = (f[cell + 1] - f[cell]) / (x1 - x0);
    return {f[cell] + slope * (a - x0), slope};
}

// ---- 2D adaptive machinery ----

struct Cell2D {
    int k00, k10, k01, k11;
    double x0, x1, y0, y1;
};

struct Corner4 {
    double v00, v10, v01, v11;
    double at(const Cell2D& c, double x, double y) const {
        double xi = (x - c.x0) / (c.x1 - c.x0);
        double eta = (y - c.y0) / (c.y1 - c.y0);
        return v00 * (1 - xi) * (1 - eta) + v10 * xi * (1 - eta) + v01 * (1 - xi) * eta +
               v11 * xi * eta;
    }
};

Corner4 gather(const Field& f, const Cell2D& c) {
    return {f[c.k00], f[c.k10], f[c.k01], f[c.k11]};
}

template <typename Leaf>
void quad_rect_adaptive(const Grid& g, const std::vector<RhsPiece>& pieces, const Cell2D& cell,
                        double x0, double x1, double y0, double y1, int depth, Leaf&& leaf) {
    const Domain& dom = g.domain;
    double dc[5] = {dom.signed_dist(x0, y0), dom.signed_dist(x1, y0), dom.signed_dist(x0, y1),
                    dom.signed_dist(x1, y1), dom.signed_dist(0.5 * (x0 + x1), 0.5 * (y0 + y1))};
    double dmin = dc[0], dmax = dc[0];
    for (double v : dc) {
        dmin = std::min(dmin, v);
        dmax = std::max(dmax, v);
    }
    if (dmax <= 0) return;  // entirely outside (disks) or on the boundary

    bool refine = false;
    if (dmin < 0) refine = true;  // cut cell
    double size = std::max(x1 - x0, y1 - y0);
    for (const auto& piece : pieces) {
        for (double v : {piece.d_min, piece.d_max}) {
            if (v > 0 && std::isfinite(v) && dmin < v && dmax > v) refine = true;
        }
        if (piece.power && piece_active(piece, dc[4]) && dmin < 2.0 * size) refine = true;
    }
    if (refine && depth < kMaxDepth2D) {
        double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
        quad_rect_adaptive(g, pieces, cell, x0, xm, y0, ym, depth + 1, leaf);
        quad_rect_adaptive(g, pieces, cell, xm, x1, y0, ym, depth + 1, leaf);
        quad_rect_adaptive(g, pieces, cell, x0, xm, ym, y1, depth + 1, leaf);
        quad_rect_adaptive(g, pieces, cell, xm, x1, ym, y1, depth + 1, leaf);
        return;
    }
    double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
    double dm = dc[4];
    if (dm <= 0) return;
    leaf(xm, ym, dm, (x1 - x0) * (y1 - y0));
}

template <typename Accum>
void sweep_2d(const Grid& g, const std::vector<RhsPiece>& pieces, Accum&& accum) {
    std::vector<Corner4> smooths(pieces.size()), powers(pieces.size());
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            Cell2D cell{g.index(i, j), g.index(i + 1, j), g.index(i, j + 1), g.index(i + 1, j + 1),
                        g.xs[i], g.xs[i + 1], g.ys[j], g.ys[j + 1]};
            for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
                smooths[pi] = gather(pieces[pi].smooth, cell);
                if (pieces[pi].power) powers[pi] = gather(*pieces[pi].power, cell);
            }
            quad_rect_adaptive(
                g, pieces, cell, cell.x0, cell.x1, cell.y0, cell.y1, 0,
                [&](double xm, double ym, double dm, double area) {
                    for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
                        if (!piece_active(pieces[pi], dm)) continue;
                        double val = smooths[pi].at(cell, xm, ym);
                        if (pieces[pi].power)
                            val *= std::pow(dm, powers[pi].at(cell, xm, ym));
                        accum(cell, xm, ym, val * area);
                    }
                });
        }
    }
}

void check_integrable(const Grid& g, const std::vector<RhsPiece>& pieces) {
    for (const auto& piece : pieces) {
        if (!piece.power) continue;
        double inf = piece.power->values.minCoeff();
        if (inf <= -1.0)
            throw QuadratureError("non-integrable boundary singularity: power inf = " +
                                  std::to_string(inf) + " <= -1");
        (void)g;
    }
}

}  // namespace

Rhs Rhs::plain(Field f) {
    Rhs r;
    r.pieces.push_back(RhsPiece{0.0, kInf, std::move(f), std::nullopt});
    return r;
}

Rhs Rhs::singular_power(const Grid& g, const Field& base, const Field& gamma, double scale,
                        double delta) {
    Rhs r;
    // Strip piece: pull the distance power out of base^gamma analytically.
    Field ratio(g);
    for (int k = 0; k < g.node_count(); ++k) {
        int m = g.dist[k] > 0 ? k : g.nearest_interior(k);
        ratio[k] = base[m] / g.dist[m];
    }
    Field strip_smooth(g), strip_power(g), off_smooth(g);
    for (int k = 0; k < g.node_count(); ++k) {
        strip_power[k] = gamma[k];
        strip_smooth[k] = scale * std::pow(ratio[k], gamma[k]);
        int m = g.dist[k] > 0 ? k : g.nearest_interior(k);
        off_smooth[k] = scale * std::pow(base[m], gamma[k]);
    }
    r.pieces.push_back(RhsPiece{0.0, delta, std::move(strip_smooth), std::move(strip_power)});
    r.pieces.push_back(RhsPiece{delta, kInf, std::move(off_smooth), std::nullopt});
    return r;
}

Rhs Rhs::factored(const Grid& g, const Field& values, const Field& power, double delta) {
    Rhs r;
    Field strip_smooth(g), strip_power(g);
    for (int k = 0; k < g.node_count(); ++k) {
        int m = g.dist[k] > 0 ? k : g.nearest_interior(k);
        strip_smooth[k] = values[m] * std::pow(g.dist[m], -power[m]);
        strip_power[k] = power[k];
    }
    r.pieces.push_back(RhsPiece{0.0, delta, std::move(strip_smooth), std::move(strip_power)});
    r.pieces.push_back(RhsPiece{delta, kInf, values, std::nullopt});
    return r;
}

Field Rhs::eval_at_nodes(const Grid& g) const {
    Field out(g);
    for (int k = 0; k < g.node_count(); ++k) {
        if (!g.is_interior(k)) continue;
        double d = g.dist[k];
        for (const auto& piece : pieces) {
            if (!piece_active(piece, d)) continue;
            double v = piece.smooth[k];
            if (piece.power) v *= std::pow(d, (*piece.power)[k]);
            out[k] += v;
        }
    }
    return out;
}

double Rhs::power_inf(const Grid&) const {
    double inf = kInf;
    for (const auto& piece : pieces)
        if (piece.power) inf = std::min(inf, piece.power->values.minCoeff());
    return inf;
}

double integrate(const Field& field, const std::optional<Field>& weight_exponent) {
    const Grid& g = field.grid();
    std::vector<RhsPiece> pieces;
    pieces.push_back(RhsPiece{0.0, kInf, field, weight_exponent});
    check_integrable(g, pieces);

    double total = 0.0;
    if (g.dim() == 1) {
        sweep_1d(g, pieces, [&](int, int cell, double a, double b, double da, double db) {
            AffineOnCell f = interp_1d(g, field, cell, a, b);
            if (!weight_exponent) {
                double xm = 0.5 * (a + b);
                total += (b - a) * f.at(a, xm);
                return;
            }
            AffineOnCell al = interp_1d(g, *weight_exponent, cell, a, b);
            double alpha = al.at(a, 0.5 * (a + b));
            total += subcell_weighted_poly(a, b, da, db, alpha, f.v0, f.slope, 0.0);
        });
    } else {
        sweep_2d(g, pieces, [&](const Cell2D&, double, double, double v) { total += v; });
    }
    return total;
}

double integrate(const Field& field, const ExprField& weight_exponent) {
    return integrate(field, std::optional<Field>(eval_on_grid(weight_exponent, field.grid())));
}

Eigen::VectorXd assemble_load(const Grid& g, const Rhs& rhs) {
    check_integrable(g, rhs.pieces);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(g.node_count());

    if (g.dim() == 1) {
        sweep_1d(g, rhs.pieces, [&](int pi, int cell, double a, double b_, double da, double db) {
            const RhsPiece& piece = rhs.pieces[pi];
            AffineOnCell s = interp_1d(g, piece.smooth, cell, a, b_);
            double x0 = g.xs[cell], x1 = g.xs[cell + 1], h = x1 - x0;
            // hats: phi_cell = (x1-x)/h, phi_cell+1 = (x-x0)/h, both affine
            double phiL0 = (x1 - a) / h, phiLs = -1.0 / h;
            double phiR0 = (a - x0) / h, phiRs = 1.0 / h;
            double alpha = 0.0;
            if (piece.power) {
                AffineOnCell al = interp_1d(g, *piece.power, cell, a, b_);
                alpha = al.at(a, 0.5 * (a + b_));
            }
            auto quad_prod = [&](double q0, double qs) {
                // (s.v0 + s.slope t)(q0 + qs t), t = x-a
                double c0 = s.v0 * q0;
                double c1 = s.v0 * qs + s.slope * q0;
                double c2 = s.slope * qs;
                if (!piece.power) {
                    double t1 = b_ - a;
                    return c0 * t1 + c1 * t1 * t1 / 2.0 + c2 * t1 * t1 * t1 / 3.0;
                }
                return subcell_weighted_poly(a, b_, da, db, alpha, c0, c1, c2);
            };
            b[cell] += quad_prod(phiL0, phiLs);
            b[cell + 1] += quad_prod(phiR0, phiRs);
        });
    } else {
        sweep_2d(g, rhs.pieces, [&](const Cell2D& cell, double xm, double ym, double v) {
            double xi = (xm - cell.x0) / (cell.x1 - cell.x0);
            double eta = (ym - cell.y0) / (cell.y1 - cell.y0);
            b[cell.k00] += v * (1 - xi) * (1 - eta);
            b[cell.k10] += v * xi * (1 - eta);
            b[cell.k01] += v * (1 - xi) * eta;
            b[cell.k11] += v * xi * eta;
        });
    }
    return b;
}

Eigen::VectorXd nodal_volumes(const Grid& g) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(g.node_count());
    if (g.dim() == 1) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            double half = 0.5 * (g.xs[i + 1] - g.xs[i]);
            w[i] += half;
            w[i + 1] += half;
        }
    } else {
        for (int j = 0; j + 1 < g.ny; ++j) {
            for (int i = 0; i + 1 < g.nx; ++i) {
                double xm = 0.5 * (g.xs[i] + g.xs[i + 1]);
                double ym = 0.5 * (g.ys[j] + g.ys[j + 1]);
                if (g.domain.signed_dist(xm, ym) <= 0) continue;
                double quarter = 0.25 * g.hx * g.hy;
                w[g.index(i, j)] += quarter;
                w[g.index(i + 1, j)] += quarter;
                w[g.index(i, j + 1)] += quarter;
                w[g.index(i + 1, j + 1)] += quarter;
            }
        }
    }
    return w;
}

}  // namespace plx
