#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace alpharen {

/// Double-exponential (tanh-sinh) rule on [-1, 1] with step 2^-level,
/// truncated at |t| <= t_max. Endpoint complements are stored exactly so
/// that nodes can sit arbitrarily close to an endpoint.
struct DENode {
    double from_lo; ///< 1 + u
    double to_hi;   ///< 1 - u
    double w;
};
const std::vector<DENode>& tanh_sinh_rule(int level, double t_max = 3.5);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n);

struct QuadratureOptions {
    double rel_tol = 1e-8;
    double abs_tol = 0;
    int min_level = 3;
    int max_level = 7;
    double t_max = 3.5;
};

struct QuadratureResult {
    Eigen::VectorXcd value;
    double error = 0; ///< max |I_l - I_{l-1}| over components
    int level = 0;
    bool converged = false;
    long evaluations = 0;
};

/// One coordinate of an iterated-integral node.
struct NodePoint {
    double x;
    double hi;      ///< upper end of the coordinate's full range
    double from_lo; ///< x - lo of the coordinate's full range, computed without cancellation
    double to_hi;   ///< hi - x, likewise
};

/// Range of coordinate k given the outer coordinates pts[0..k). Interior
/// breakpoints split the range into pieces that are integrated separately.
using LimitsFn = std::function<void(int k, const std::vector<NodePoint>& pts, double& lo, double& hi,
                                    std::vector<double>& breaks)>;
/// Adds weight * f(pts) to acc.
using IntegrandFn = std::function<void(const std::vector<NodePoint>& pts, double weight, Eigen::VectorXcd& acc)>;

/// Iterated tanh-sinh integral with every coordinate at the same level.
Eigen::VectorXcd iterated_integral(int dims, int components, const LimitsFn& limits, const IntegrandFn& f, int level,
                                   double t_max, long* evaluations = nullptr);

/// Doubles the level until successive results agree to rel_tol (relative to
/// the largest component) or abs_tol.
QuadratureResult adaptive_integral(int dims, int components, const LimitsFn& limits, const IntegrandFn& f,
                                   const QuadratureOptions& opt = {});

/// All sums of at most `max_terms` entries of `values` (repetition allowed),
/// sorted and deduplicated. Includes 0.
std::vector<double> threshold_sums(const std::vector<double>& values, int max_terms);

/// Worker count from ALPHAREN_THREADS, else the hardware concurrency.
int worker_count();

/// Runs f(0..n-1) on worker_count() threads and returns the results in index
/// order. The first exception by index is rethrown.
template <class T>
std::vector<T> parallel_map(size_t n, const std::function<T(size_t)>& f);

} // namespace alpharen

#include "alpharen/detail/parallel_impl.hpp"
