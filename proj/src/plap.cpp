#include "plx/plap.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <random>

namespace plx {

namespace {

struct Kernel {
    // phi(t) = (t^2 + eps^2)^(p/2) / p evaluated pieces for t = |grad u|
    static double energy_density(double g2, double p, double eps2) {
        return std::pow(g2 + eps2, 0.5 * p) / p;
    }
    static double dpsi(double g2, double p, double eps2) {
        // d/dg of (g^2+eps^2)^{p/2}/p divided by g: (g^2+eps^2)^{(p-2)/2}
        return std::pow(g2 + eps2, 0.5 * (p - 2.0));
    }
    static double ddpsi(double g2, double p, double eps2) {
        // second radial derivative factor (p-2)(g^2+eps^2)^{(p-4)/2};
        // guard 0 * pow(0, negative) = 0 * inf for p = 2 at flat cells
        if (p == 2.0 || g2 + eps2 == 0.0) return 0.0;
        return (p - 2.0) * std::pow(g2 + eps2, 0.5 * (p - 4.0));
    }
};

// Zeroth-order antiderivative Psi with Psi'(u) = max(A, |u|^{p-2}u).
double zeroth_psi(double u, double A, double p) {
    double s = A <= 0 ? 0.0 : std::pow(A, 1.0 / (p - 1.0));
    if (u <= s) return A * u;
    return A * s + (std::pow(u, p) - std::pow(s, p)) / p;
}

double zeroth_dpsi(double u, double A, double p) {
    double own = u > 0 ? std::pow(u, p - 1.0) : -std::pow(-u, p - 1.0);
    return std::max(A, own);
}

double zeroth_ddpsi(double u, double A, double p) {
    double own = u > 0 ? std::pow(u, p - 1.0) : -std::pow(-u, p - 1.0);
    if (own <= A) return 0.0;
    return (p - 1.0) * std::pow(std::abs(u), p - 2.0);
}

// Assembles energy, gradient and (optionally) Hessian triplets of the
// diffusion part. eps = 0 gives the unregularized weak form.
struct DiffusionAssembly {
    double energy = 0.0;
    Eigen::VectorXd grad;
    std::vector<Eigen::Triplet<double>> hess;
};

DiffusionAssembly assemble_diffusion(const Grid& g, const Field& p, const Field& u, double eps,
                                     bool want_hess) {
    DiffusionAssembly out;
    out.grad = Eigen::VectorXd::Zero(g.node_count());
    double eps2 = eps * eps;

    if (g.dim() == 1) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            double h = g.xs[i + 1] - g.xs[i];
            double gr = (u[i + 1] - u[i]) / h;
            double pc = 0.5 * (p[i] + p[i + 1]);
            double g2 = gr * gr;
            out.energy += h * Kernel::energy_density(g2, pc, eps2);
            double k1 = Kernel::dpsi(g2, pc, eps2);
            double flux = k1 * gr;
            out.grad[i] -= flux;
            out.grad[i + 1] += flux;
            if (want_hess) {
                double k2 = Kernel::ddpsi(g2, pc, eps2);
                double dd = (k1 + k2 * g2) / h;
                out.hess.emplace_back(i, i, dd);
                out.hess.emplace_back(i + 1, i + 1, dd);
                out.hess.emplace_back(i, i + 1, -dd);
                out.hess.emplace_back(i + 1, i, -dd);
            }
        }
        return out;
    }

    // 2D: bilinear cell-center gradients.
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            int k[4] = {g.index(i, j), g.index(i + 1, j), g.index(i, j + 1),
                        g.index(i + 1, j + 1)};
            // Skip cells whose center lies outside the domain (disk mask).
            double xm = 0.5 * (g.xs[i] + g.xs[i + 1]);
            double ym = 0.5 * (g.ys[j] + g.ys[j + 1]);
            if (g.domain.signed_dist(xm, ym) <= 0) continue;

            double area = g.hx * g.hy;
            double gx = ((u[k[1]] - u[k[0]]) + (u[k[3]] - u[k[2]])) / (2.0 * g.hx);
            double gy = ((u[k[2]] - u[k[0]]) + (u[k[3]] - u[k[1]])) / (2.0 * g.hy);
            double pc = 0.25 * (p[k[0]] + p[k[1]] + p[k[2]] + p[k[3]]);
            double g2 = gx * gx + gy * gy;
            out.energy += area * Kernel::energy_density(g2, pc, eps2);

            double dgx[4] = {-1 / (2 * g.hx), 1 / (2 * g.hx), -1 / (2 * g.hx), 1 / (2 * g.hx)};
            double dgy[4] = {-1 / (2 * g.hy), -1 / (2 * g.hy), 1 / (2 * g.hy), 1 / (2 * g.hy)};
            double k1 = Kernel::dpsi(g2, pc, eps2);
            double k2 = want_hess ? Kernel::ddpsi(g2, pc, eps2) : 0.0;
            for (int a = 0; a < 4; ++a) {
                out.grad[k[a]] += area * k1 * (gx * dgx[a] + gy * dgy[a]);
                if (!want_hess) continue;
                for (int b = 0; b < 4; ++b) {
                    double v = k1 * (dgx[a] * dgx[b] + dgy[a] * dgy[b]) +
                               k2 * (gx * dgx[a] + gy * dgy[a]) * (gx * dgx[b] + gy * dgy[b]);
                    out.hess.emplace_back(k[a], k[b], area * v);
                }
            }
        }
    }
    return out;
}

struct Workspace {
    const PlapProblem* prob;
    const SolverConfig* cfg;
    Eigen::VectorXd load;        // full-size
    Eigen::VectorXd volumes;     // lumped nodal volumes
    std::vector<int> interior;   // interior node ids
    std::vector<int> compact;    // node -> unknown index (-1 for boundary)

    Field expand(const Eigen::VectorXd& x) const {
        Field u(*prob->grid);
        for (std::size_t m = 0; m < interior.size(); ++m) u[interior[m]] = x[m];
        return u;
    }

    double eval_energy(const Field& u) const {
        const Grid& g = *prob->grid;
        auto diff = assemble_diffusion(g, prob->p, u, cfg->eps_reg, false);
        double J = diff.energy;
        for (int k : interior) J -= load[k] * u[k];
        if (prob->zeroth) {
            const auto& z = *prob->zeroth;
            for (int k : interior) {
                double psi = zeroth_psi(u[k], z.threshold[k], prob->p[k]);
                if (z.subtract_threshold) psi -= z.threshold[k] * u[k];
                J += volumes[k] * z.coef[k] * psi;
            }
        }
        return J;
    }

    void eval_grad_hess(const Field& u, Eigen::VectorXd& grad,
                        Eigen::SparseMatrix<double>* H) const {
        const Grid& g = *prob->grid;
        auto diff = assemble_diffusion(g, prob->p, u, cfg->eps_reg, H != nullptr);
        int n = static_cast<int>(interior.size());
        grad.resize(n);
        for (int m = 0; m < n; ++m) {
            int k = interior[m];
            grad[m] = diff.grad[k] - load[k];
            if (prob->zeroth) {
                const auto& z = *prob->zeroth;
                double dpsi = zeroth_dpsi(u[k], z.threshold[k], prob->p[k]);
                if (z.subtract_threshold) dpsi -= z.threshold[k];
                grad[m] += volumes[k] * z.coef[k] * dpsi;
            }
        }
        if (!H) return;
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(diff.hess.size() + interior.size());
        for (const auto& t : diff.hess) {
            int r = compact[t.row()], c = compact[t.col()];
            if (r >= 0 && c >= 0) trips.emplace_back(r, c, t.value());
        }
        if (prob->zeroth) {
            const auto& z = *prob->zeroth;
            for (int m = 0; m < n; ++m) {
                int k = interior[m];
                double dd = volumes[k] * z.coef[k] * zeroth_ddpsi(u[k], z.threshold[k], prob->p[k]);
                if (dd > 0) trips.emplace_back(m, m, dd);
            }
        }
        H->resize(n, n);
        H->setFromTriplets(trips.begin(), trips.end());
    }
};

Workspace make_workspace(const PlapProblem& prob, const SolverConfig& cfg) {
    Workspace ws;
    ws.prob = &prob;
    ws.cfg = &cfg;
    ws.load = assemble_load(*prob.grid, prob.rhs);
    ws.volumes = nodal_volumes(*prob.grid);
    ws.interior = prob.grid->interior_nodes();
    ws.compact.assign(prob.grid->node_count(), -1);
    for (std::size_t m = 0; m < ws.interior.size(); ++m)
        ws.compact[ws.interior[m]] = static_cast<int>(m);
    return ws;
}

// Newton iteration shared by the p=2 warm start and the actual solve.
std::pair<Eigen::VectorXd, SolveReport> newton_minimize(const Workspace& ws,
                                                        Eigen::VectorXd x) {
    const SolverConfig& cfg = *ws.cfg;
    SolveReport rep;
    Field u = ws.expand(x);
    double J = ws.eval_energy(u);
    Eigen::VectorXd grad;
    Eigen::SparseMatrix<double> H;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
    int stagnant = 0;

    for (int it = 0; it < cfg.max_iter; ++it) {
        ws.eval_grad_hess(u, grad, &H);
        rep.grad_sup = grad.size() ? grad.lpNorm<Eigen::Infinity>() : 0.0;
        if (rep.grad_sup <= cfg.tol) {
            rep.converged = true;
            break;
        }
        // Degenerate exponents (p < 2) keep the gradient a few ulps above
        // cfg.tol once the energy bottoms out; accept first-order
        // stagnation when the gradient is already tiny.
        if (stagnant >= 5 && rep.grad_sup <= 1e4 * cfg.tol) {
            rep.converged = true;
            rep.diagnostic = "stopped on energy stagnation";
            break;
        }
        rep.iterations = it + 1;

        chol.compute(H);
        Eigen::VectorXd step;
        bool newton_ok = chol.info() == Eigen::Success;
        if (newton_ok) {
            step = chol.solve(-grad);
            newton_ok = chol.info() == Eigen::Success && step.allFinite();
        }
        if (!newton_ok) step = -grad;  // gradient fallback for this iteration

        double slope = grad.dot(step);
        if (slope >= 0) {  // not a descent direction; fall back
            step = -grad;
            slope = grad.dot(step);
        }

        double t = 1.0;
        double J_new = 0.0;
        Field u_trial;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            Eigen::VectorXd x_trial = x + t * step;
            u_trial = ws.expand(x_trial);
            J_new = ws.eval_energy(u_trial);
            if (std::isfinite(J_new) && J_new <= J + cfg.armijo * t * slope) {
                x = x_trial;
                accepted = true;
                break;
            }
            t *= cfg.damping;
        }
        if (!accepted) {
            rep.diagnostic = "line search stalled at iteration " + std::to_string(it);
            break;
        }
        if (J_new > J) rep.energy_monotone = false;
        if (std::abs(J - J_new) <= 1e-15 * (1.0 + std::abs(J)))
            ++stagnant;
        else
            stagnant = 0;
        J = J_new;
        u = u_trial;
    }
    if (!rep.converged && rep.diagnostic.empty())
        rep.diagnostic = "max_iter reached with grad_sup = " + std::to_string(rep.grad_sup);
    rep.final_energy = J;
    return {x, rep};
}

}  // namespace

void PlapProblem::validate() const {
    if (!grid) throw SolveError("PlapProblem has no grid");
    if (!p.valid() || &p.grid() != grid) throw SolveError("exponent field grid mismatch");
    double pmin = p.values.minCoeff();
    if (pmin <= 1.0)
        throw SolveError("exponent must satisfy p > 1 on the grid (min = " +
                         std::to_string(pmin) + ")");
    Rhs r = rhs;
    double pw = r.power_inf(*grid);
    if (pw <= -1.0)
        throw SolveError("rhs distance power must have inf > -1");
}

double energy(const PlapProblem& prob, const Field& u, const SolverConfig& cfg) {
    prob.validate();
    for (int k = 0; k < prob.grid->node_count(); ++k)
        if (!prob.grid->is_interior(k) && u[k] != 0.0)
            throw SolveError("energy: u must vanish on boundary nodes");
    Workspace ws = make_workspace(prob, cfg);
    return ws.eval_energy(u);
}

std::pair<Field, SolveReport> solve_dirichlet(const PlapProblem& prob, const SolverConfig& cfg,
                                              const std::optional<Field>& init) {
    prob.validate();
    Workspace ws = make_workspace(prob, cfg);
    int n = static_cast<int>(ws.interior.size());

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
    if (init) {
        for (int m = 0; m < n; ++m) x0[m] = (*init)[ws.interior[m]];
    } else {
        // Warm start from the p=2 problem with the same load: one linear
        // solve that puts the gradient field away from the degenerate
        // |grad u| = 0 regime.
        bool p_is_two = (prob.p.values - 2.0).abs().maxCoeff() < 1e-14;
        if (!p_is_two && !prob.zeroth) {
            PlapProblem lin = prob;
            lin.p = Field(*prob.grid, 2.0);
            Workspace wlin = make_workspace(lin, cfg);
            auto [xl, rl] = newton_minimize(wlin, Eigen::VectorXd::Zero(n));
            if (rl.converged || rl.grad_sup < 1e-6) x0 = xl;
        }
    }

    auto [x, rep] = newton_minimize(ws, x0);
    Field u = ws.expand(x);
    rep.linf = u.sup_abs();
    rep.weak_res = weak_residual(prob, u, default_test_fields(*prob.grid, cfg.seed));
    return {u, rep};
}

std::vector<Field> default_test_fields(const Grid& grid, unsigned seed) {
    std::vector<Field> tests;
    // Hats on a coarsened lattice (every `stride`-th interior node).
    int stride = std::max(1, (std::max(grid.nx, grid.ny) - 1) / 16);
    for (int j = 0; j < grid.ny; j += (grid.dim() == 2 ? stride : 1)) {
        for (int i = 0; i < grid.nx; i += stride) {
            int k = grid.index(i, grid.dim() == 2 ? j : 0);
            if (!grid.is_interior(k)) continue;
            Field hat(grid);
            hat[k] = 1.0;
            tests.push_back(std::move(hat));
        }
        if (grid.dim() == 1) break;
    }
    // Five random smooth bumps vanishing on the boundary.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.2, 0.8);
    std::uniform_real_distribution<double> width(0.05, 0.3);
    for (int b = 0; b < 5; ++b) {
        double cx = grid.domain.ax + unit(rng) * (grid.domain.bx - grid.domain.ax);
        double cy = grid.dim() == 2 ? grid.ys[0] + unit(rng) * (grid.ys[grid.ny - 1] - grid.ys[0])
                                    : 0.0;
        double w = width(rng) * grid.domain.diameter();
        Field f(grid);
        for (int k = 0; k < grid.node_count(); ++k) {
            if (!grid.is_interior(k)) continue;
            double r2 = (grid.node_x[k] - cx) * (grid.node_x[k] - cx);
            if (grid.dim() == 2) r2 += (grid.node_y[k] - cy) * (grid.node_y[k] - cy);
            f[k] = grid.dist[k] * std::exp(-r2 / (w * w));
        }
        tests.push_back(std::move(f));
    }
    return tests;
}

double weak_residual(const PlapProblem& prob, const Field& u, const std::vector<Field>& tests) {
    const Grid& g = *prob.grid;
    auto diff = assemble_diffusion(g, prob.p, u, 0.0, false);
    Eigen::VectorXd b = assemble_load(g, prob.rhs);
    double worst = 0.0;
    for (const Field& phi : tests) {
        double a_minus_f = 0.0;
        for (int k : g.interior_nodes()) a_minus_f += phi[k] * (diff.grad[k] - b[k]);
        double grad_sup = 0.0;
        if (g.dim() == 1) {
            for (int i = 0; i + 1 < g.nx; ++i)
                grad_sup = std::max(grad_sup, std::abs((phi[i + 1] - phi[i]) / g.hx));
        } else {
            for (int j = 0; j + 1 < g.ny; ++j)
                for (int i = 0; i + 1 < g.nx; ++i) {
                    double gx = (phi[g.index(i + 1, j)] - phi[g.index(i, j)]) / g.hx;
                    double gy = (phi[g.index(i, j + 1)] - phi[g.index(i, j)]) / g.hy;
                    grad_sup = std::max(grad_sup, std::hypot(gx, gy));
                }
        }
        worst = std::max(worst, std::abs(a_minus_f) / (1.0 + grad_sup));
    }
    return worst;
}

BoundCertificate comparison_check(const PlapProblem& prob1, const PlapProblem& prob2,
                                  const SolverConfig& cfg) {
    if (prob1.grid != prob2.grid) throw SolveError("comparison_check: grids differ");
    if ((prob1.p.values - prob2.p.values).abs().maxCoeff() > 0)
        throw SolveError("comparison_check: exponents differ");
    const Grid& g = *prob1.grid;
    Field r1 = prob1.rhs.eval_at_nodes(g);
    Field r2 = prob2.rhs.eval_at_nodes(g);
    for (int k : g.interior_nodes())
        if (r1[k] > r2[k] + 1e-12 * (1.0 + std::abs(r2[k])))
            throw SolveError("comparison_check: rhs1 > rhs2 at node " + std::to_string(k));

    auto [u1, rep1] = solve_dirichlet(prob1, cfg);
    auto [u2, rep2] = solve_dirichlet(prob2, cfg);

    BoundCertificate cert;
    cert.name = "comparison_principle";
    double slack = 10.0 * g.h();
    cert.margin = std::numeric_limits<double>::infinity();
    for (int k : g.interior_nodes()) {
        double m = u2[k] - u1[k];
        if (m < cert.margin) {
            cert.margin = m;
            cert.location = k;
        }
    }
    cert.satisfied = cert.margin >= -slack;
    return cert;
}

Field apply_plap_operator(const Grid& grid, const Field& p, const Field& u) {
    auto diff = assemble_diffusion(grid, p, u, 0.0, false);
    Eigen::VectorXd w = nodal_volumes(grid);
    Field out(grid);
    for (int k : grid.interior_nodes())
        if (w[k] > 0) out[k] = diff.grad[k] / w[k];
    return out;
}

}  // namespace plx
