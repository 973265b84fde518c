#pragma once

#include "alpharen/laurent.hpp"
#include "alpharen/sector.hpp"
#include "alpharen/subgraph.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace alpharen {

/// One term of a local counterterm: delta^{(m)}(alpha_gamma) times
/// coeff * monomial, the monomial written in the external leg momenta of the
/// subdiagram. Satisfies 2 |m| + deg(monomial) = Omega.
struct CountertermTerm {
    std::vector<int> m; ///< one entry per internal line, in line order
    DotMonomial monomial;
    LaurentC coeff;

    int order() const;
};

struct LocalCounterterm {
    std::string diagram;
    std::vector<std::string> lines;
    int omega = 0;
    std::vector<CountertermTerm> terms;

    bool empty() const { return terms.empty(); }
    /// sum_terms coeff * monomial(p), p ordered as the diagram's external legs.
    LaurentC evaluate(const FeynmanGraph& g, const Momenta& p) const;
    /// Throws std::logic_error on a term that violates 2|m| + deg = Omega.
    void check_homogeneity() const;
};

/// Text report, one line per term, in term order.
std::string format_counterterm(const LocalCounterterm& ct, int precision = 12);

struct TaylorOptions {
    double step = 0; ///< 0 selects 0.2 times the smallest internal mass
    int levels = 3;  ///< step, step/2, ... combined by Richardson extrapolation
};

struct TaylorCoefficient {
    int degree = 0;
    Eigen::VectorXcd value;
    double error = 0;
};

/// Coefficients c_0..c_degree of f(t) = sum c_k t^k from central differences
/// on t = j h, |j| <= degree/2 + 1, extrapolated in h^2 over `levels` halvings
/// of `step`. Each f value holds one entry per regulator sample.
std::vector<TaylorCoefficient> taylor_along(const std::function<Eigen::VectorXcd(double)>& f, int degree,
                                            double step, int levels = 3);

/// Lorentz-invariant Taylor polynomial of degree 0 or 2 in the independent
/// leg momenta (every leg but the one with the largest id). Coordinates come
/// from one-axis configurations p_a = t e_0 and diagonal pairs p_a = p_b = t e_0.
struct MomentumTaylorTerm {
    DotMonomial monomial;
    Eigen::VectorXcd value;
    double error = 0;
};
std::vector<MomentumTaylorTerm> taylor_project(const FeynmanGraph& g,
                                               const std::function<Eigen::VectorXcd(const Momenta&)>& f,
                                               int degree, double step, int levels = 3);

/// Legs whose momenta are free; the largest-id leg follows from conservation.
std::vector<std::string> independent_legs(const FeynmanGraph& g);

/// p_leg = t e_0 for each listed leg, zero for the other free legs.
Momenta axis_momenta(const FeynmanGraph& g, const std::vector<std::string>& legs, double t);

struct Insertion {
    FeynmanDiagram diagram;
    LaurentC weight;
};

/// Expand C_{gamma_1} * ... * C_{gamma_k} * U_Gamma into quotient diagrams,
/// one per choice of a term from every member, weighted by the product of the
/// chosen coefficients. Throws std::invalid_argument on a size mismatch and
/// UnsupportedError for terms with |m| > 0.
std::vector<Insertion> star_insert(const FeynmanDiagram& d, const DisjointFamily& fam,
                                   const std::vector<LocalCounterterm>& cts);

struct RenormOptions {
    Scheme scheme = Scheme::Paper;
    ZCircle circle;
    double tol_fit = 1e-8;
    double tol_finite = 1e-4;
    bool subtract = true; ///< false evaluates the bare amplitude only
    int max_lines = 12;
    SectorOptions sector;
    TaylorOptions taylor;
};

struct RenormalizedPoint {
    Momenta p;
    LaurentC rtilde;  ///< fit of bare plus subdiagram insertions
    LaurentC series;  ///< after the overall subtraction
    double fit_residual = 0;
    double max_pole = 0; ///< largest |a_k|, k < 0
    double scale = 0;    ///< |a_0| of rtilde
    bool certified = false;
};

struct RenormalizedAmplitude {
    std::string diagram;
    int omega = 0;
    std::vector<RenormalizedPoint> points;
    long sectors = 0; ///< sector integrals evaluated, over every diagram touched
    bool certified = false;
};

/// The R-operation with memoized counterterms. Counterterms are computed for
/// subdiagrams before the diagrams containing them; every table entry is
/// written once, under a lock, after it is complete.
class Renormalizer {
public:
    explicit Renormalizer(RenormOptions opt = {});

    const RenormOptions& options() const { return opt_; }
    const std::vector<cdouble>& z() const { return z_; }
    Eigen::VectorXcd z_vector() const;

    /// Laurent window [-2L, N - 5 - 2L] used for every fit.
    LaurentFit fit(const Eigen::VectorXcd& values, int loops) const;

    /// -T of the Taylor coefficients of R-tilde through degree Omega. Empty
    /// for Omega < 0 and for diagrams without loops. Throws UnsupportedError
    /// for Omega > 2 and NumericalError if a fit residual exceeds tol_fit.
    const LocalCounterterm& counterterm(const FeynmanDiagram& d);

    /// Bare amplitude plus the counterterm insertions of every family of
    /// divergent proper subdiagrams, at every regulator sample.
    Eigen::VectorXcd rtilde(const FeynmanDiagram& d, const Momenta& p);

    RenormalizedAmplitude renormalize(const FeynmanDiagram& d, const std::vector<Momenta>& points);

    /// Keys of the memoized counterterms, in the order they were completed.
    const std::vector<std::string>& completed() const { return order_; }
    /// Memoized counterterm by diagram_key, or nullptr.
    const LocalCounterterm* find(const std::string& key) const;

private:
    double taylor_step(const FeynmanDiagram& d) const;
    Eigen::VectorXcd bare(const FeynmanDiagram& d, const Momenta& p);

    RenormOptions opt_;
    std::vector<cdouble> z_;
    std::mutex mu_;
    std::map<std::string, std::unique_ptr<LocalCounterterm>> table_;
    std::vector<std::string> order_;
    std::map<std::string, Eigen::VectorXcd> bare_cache_;
    long sectors_ = 0;
};

/// Stable text key of a diagram's content: lines, masses, vertex operators, legs.
std::string diagram_key(const FeynmanDiagram& d);

} // namespace alpharen
