#pragma once

#include "alpharen/graph.hpp"
#include "alpharen/laurent.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <vector>

namespace alpharen {

/// External momenta, one row (a Euclidean 4-vector) per external line in the
/// graph's sorted order.
using Momenta = Eigen::Matrix<double, Eigen::Dynamic, 4>;

/// Fill in the external line with the largest identifier from momentum
/// conservation sum(in) - sum(out) = 0. All other lines must be given; if all
/// are given, conservation is checked. Throws GraphError.
Momenta complete_momenta(const FeynmanGraph& g, const std::map<std::string, Vec4>& given);
Momenta zero_momenta(const FeynmanGraph& g);

/// Spanning tree picked greedily in line-identifier order; each remaining
/// (chord) line carries its own loop momentum. Line momenta are
/// k = C q + D p with q the loop momenta and p the external momenta.
struct LoopBasis {
    LineSet tree = 0;
    std::vector<int> chords;
    Eigen::MatrixXd C; ///< internal lines x loops
    Eigen::MatrixXd D; ///< internal lines x external lines
    int loops() const { return static_cast<int>(chords.size()); }
};

LoopBasis build_loop_basis(const FeynmanGraph& g); ///< throws GraphError if disconnected

/// sum_r alpha_r k_r^2 = q.Q q + 2 q.B p + p.Cext p (Lorentz indices contracted).
struct QuadraticForm {
    Eigen::MatrixXd Q, B, Cext;
};
QuadraticForm quadratic_form(const LoopBasis& b, const Eigen::VectorXd& alpha); ///< throws on alpha <= 0

/// Polynomial in the line parameters with every exponent 0 or 1.
struct MultilinearPoly {
    std::vector<std::pair<LineSet, double>> terms;
    double evaluate(const double* x) const;
    int degree() const;
};

/// Exact integer polynomial in the line parameters, keyed by exponent vector.
using IntegerPoly = std::map<std::vector<int>, long long>;

MultilinearPoly symanzik_u(const FeynmanGraph& g);                 ///< spanning-tree sum
IntegerPoly symanzik_u_determinant(const FeynmanGraph& g, const LoopBasis& b); ///< exact det of Q
IntegerPoly to_integer_poly(const MultilinearPoly& p, int nlines);

/// F as a sum over spanning 2-forests: product of the cut line parameters
/// times the squared momentum flowing into one of the two trees.
struct SymanzikF {
    /// (cut lines, signed external inflow coefficients of one tree)
    std::vector<std::pair<LineSet, Eigen::VectorXd>> forests;
    MultilinearPoly with_momenta(const Momenta& p) const;
};
SymanzikF symanzik_f(const FeynmanGraph& g);

/// The data of the Gaussian loop-momentum integral at one point alpha:
/// integral = prod alpha^z pi^{2L} U^{-2} exp(-phi - mass) sum_j wick[j].
/// Under alpha -> lambda alpha the term wick[j] scales as lambda^{-j}.
struct GaussianTerms {
    double U = 1;
    double phi = 0;  ///< F / U, the Kirchhoff minimal energy
    double mass = 0; ///< sum_r alpha_r m_r^2
    std::vector<double> wick;
};

/// Integrand of a diagram in the parameter representation, with the loop
/// basis, Symanzik data and the product of vertex operators prepared once.
class ParametricIntegrand {
public:
    explicit ParametricIntegrand(const FeynmanDiagram& d);

    const FeynmanDiagram& diagram() const { return d_; }
    const LoopBasis& basis() const { return basis_; }
    const MultilinearPoly& u() const { return u_; }
    const SymanzikF& f() const { return f_; }
    int loops() const { return basis_.loops(); }
    int lines() const { return d_.graph().num_internal(); }
    bool constant_ops() const { return const_ops_; }
    /// Largest number of Wick contractions (half the total vertex degree).
    int max_contractions() const { return max_pairs_; }
    /// The product of all vertex operators as a constant (constant_ops only).
    double constant_op_value() const { return const_value_; }

    GaussianTerms terms(const Eigen::VectorXd& alpha, const Momenta& p) const;
    /// Same, with F already specialized to p by f().with_momenta(p).
    GaussianTerms terms(const Eigen::VectorXd& alpha, const Momenta& p, const MultilinearPoly& f_at_p) const;

private:
    struct Mono {
        double coeff;
        std::vector<std::pair<int, int>> dots; ///< symbol indices
    };
    FeynmanDiagram d_;
    LoopBasis basis_;
    MultilinearPoly u_;
    SymanzikF f_;
    bool const_ops_ = true;
    double const_value_ = 1;
    int max_pairs_ = 0;
    std::vector<int> sym_internal_; ///< line index or -1
    std::vector<int> sym_external_; ///< external index or -1
    std::vector<Mono> monos_;
};

/// Exact loop-momentum integral at fixed alpha.
cdouble gaussian_reduce(const ParametricIntegrand& pi, const Eigen::VectorXd& alpha, const Momenta& p, cdouble z);
cdouble gaussian_reduce(const FeynmanDiagram& d, const Eigen::VectorXd& alpha, const Momenta& p, cdouble z);

/// Evaluation at (lambda alpha, p / sqrt(lambda)).
cdouble scale_lambda(const ParametricIntegrand& pi, const Eigen::VectorXd& alpha, const Momenta& p, cdouble z,
                     double lambda);

/// Minimizing internal currents (internal lines x 4) for resistances alpha
/// and external inflow p. Throws GraphError for a disconnected network or
/// non-conserving inflow.
Eigen::Matrix<double, Eigen::Dynamic, 4> kirchhoff_solve(const FeynmanDiagram& d, const Eigen::VectorXd& alpha,
                                                          const Momenta& p);

struct EigenBoundCheck {
    double lambda_min = 0; ///< min of sum alpha k^2 / sum k^2 over loop momenta
    double c_witness = 0;  ///< lambda_min / min alpha
    bool pass = false;     ///< lambda_min >= c_required * min alpha
};
EigenBoundCheck min_eigenvalue_bound_check(const FeynmanDiagram& d, const Eigen::VectorXd& alpha,
                                           double c_required = 1.0);

/// Right-hand side of the moment bound
///   int |P| e^{-Q} d^n x <= C (lambda_min^{-(n+deg)/2} + 1)
/// with the explicit C = |P|_1 pi^{n/2} (1 + Gamma((n+deg)/2) / Gamma(n/2)),
/// where |P|_1 is the sum of absolute monomial coefficients.
double gaussian_moment_bound(double coeff_l1, int n, int deg, double lambda_min);

} // namespace alpharen
