#pragma once

#include <functional>
#include <vector>

namespace rmwg::optim {

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead simplex minimization; step gives the initial simplex size per
// coordinate. Stops when the simplex characteristic size drops below size_tol.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          const std::vector<double>& step, double size_tol, int max_iterations);

// Root of f in [lo, hi]; f(lo) and f(hi) must differ in sign.
double brent_root(const std::function<double(double)>& f, double lo, double hi, double rel_tol, int max_iterations);

// Minimum of f in [lo, hi] given an interior guess with f(guess) below both ends.
double brent_minimize(const std::function<double(double)>& f, double lo, double guess, double hi, double abs_tol,
                      int max_iterations);

using ResidualFn = std::function<void(const std::vector<double>& x, std::vector<double>& r)>;
// J is m x n, row-major.
using JacobianFn = std::function<void(const std::vector<double>& x, std::vector<double>& J)>;

struct LeastSquaresResult {
    std::vector<double> x;
    double cost = 0.0;  // sum of squared residuals
    int iterations = 0;
    bool converged = false;
};

// Trust-region Levenberg-Marquardt on m residuals with an analytic Jacobian.
LeastSquaresResult levenberg_marquardt(const ResidualFn& residuals, const JacobianFn& jacobian, std::vector<double> x0,
                                       std::size_t m, double xtol, int max_iterations);

}  // namespace rmwg::optim
