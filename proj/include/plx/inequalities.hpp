#ifndef PLX_INEQUALITIES_HPP
#define PLX_INEQUALITIES_HPP

#include <Eigen/Core>
#include <cmath>

namespace plx {

/// Monotonicity inequalities for the map y -> |y|^{r-2} y, the algebraic
/// backbone of uniqueness and comparison arguments for the p-Laplacian.
/// Both return rhs - lhs (nonnegative when the inequality holds); use
/// `monotone_power_inequality_holds` for a relative-epsilon verdict.
///
/// Degenerate regime r in (1,2):
///   |y1-y2|^r <= 1/(r-1) * [(|y1|^{r-2}y1 - |y2|^{r-2}y2)(y1-y2)]^{r/2}
///                        * (|y1|^r + |y2|^r)^{(2-r)/2}
/// Singular regime r in [2,4]:
///   |y1-y2|^r <= 2^r * (|y1|^{r-2}y1 - |y2|^{r-2}y2)(y1-y2)
inline double signed_power(double y, double r) {
    return y == 0.0 ? 0.0 : std::pow(std::abs(y), r - 2.0) * y;
}

inline double monotone_power_margin(double r, double y1, double y2) {
    double lhs = std::pow(std::abs(y1 - y2), r);
    double pair = (signed_power(y1, r) - signed_power(y2, r)) * (y1 - y2);
    if (r < 2.0) {
        double rhs = 1.0 / (r - 1.0) * std::pow(std::max(pair, 0.0), 0.5 * r) *
                     std::pow(std::pow(std::abs(y1), r) + std::pow(std::abs(y2), r),
                              0.5 * (2.0 - r));
        return rhs - lhs;
    }
    return std::pow(2.0, r) * pair - lhs;
}

inline bool monotone_power_inequality_holds(double r, double y1, double y2,
                                            double rel_eps = 1e-9) {
    double scale = std::pow(std::abs(y1), r) + std::pow(std::abs(y2), r) + 1e-300;
    return monotone_power_margin(r, y1, y2) >= -rel_eps * scale;
}

/// Vector version over R^N (Euclidean norm, dot products).
inline double monotone_power_margin(double r, const Eigen::VectorXd& y1,
                                    const Eigen::VectorXd& y2) {
    double n1 = y1.norm(), n2 = y2.norm();
    double lhs = std::pow((y1 - y2).norm(), r);
    Eigen::VectorXd m1 = n1 == 0.0 ? Eigen::VectorXd::Zero(y1.size()).eval()
                                   : (std::pow(n1, r - 2.0) * y1).eval();
    Eigen::VectorXd m2 = n2 == 0.0 ? Eigen::VectorXd::Zero(y2.size()).eval()
                                   : (std::pow(n2, r - 2.0) * y2).eval();
    double pair = (m1 - m2).dot(y1 - y2);
    if (r < 2.0) {
        double rhs = 1.0 / (r - 1.0) * std::pow(std::max(pair, 0.0), 0.5 * r) *
                     std::pow(std::pow(n1, r) + std::pow(n2, r), 0.5 * (2.0 - r));
        return rhs - lhs;
    }
    return std::pow(2.0, r) * pair - lhs;
}

inline bool monotone_power_inequality_holds(double r, const Eigen::VectorXd& y1,
                                            const Eigen::VectorXd& y2,
                                            double rel_eps = 1e-9) {
    double scale = std::pow(y1.norm(), r) + std::pow(y2.norm(), r) + 1e-300;
    return monotone_power_margin(r, y1, y2) >= -rel_eps * scale;
}

}  // namespace plx

#endif
