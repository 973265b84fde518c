#pragma once

#include "alpharen/parametric.hpp"
#include "alpharen/quadrature.hpp"
#include "alpharen/subgraph.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace alpharen {

/// Septic smoothstep, C^3: 1 for x <= lo, 0 for x >= hi.
double smoothstep_down(double x, double lo, double hi);

/// Decomposition of unity on the simplex sum(beta) = 1:
///   eta_A(beta) = prod_{i in A} S(beta_i) prod_{i not in A} (1 - S(beta_i))
/// with S the smoothstep falling from 1 at delta (1 - gamma) to 0 at
/// delta (1 + gamma). Lines in A are small in sector A.
class SectorPartition {
public:
    SectorPartition(int lines, double delta, double gamma_smooth);

    int lines() const { return n_; }
    double delta() const { return delta_; }
    double gamma_smooth() const { return gamma_; }
    double lower() const { return delta_ * (1 - gamma_); } ///< S = 1 below
    double upper() const { return delta_ * (1 + gamma_); } ///< S = 0 above

    double small(double beta) const { return smoothstep_down(beta, lower(), upper()); }
    double eta(LineSet A, const double* beta) const;
    /// Every A except the full line set, by increasing bit mask.
    std::vector<LineSet> sectors() const;

private:
    int n_;
    double delta_, gamma_;
};

/// delta <= 0 selects 1/(4n). Throws std::invalid_argument unless
/// 0 < delta (1 + gamma) < 1/n and 0 < gamma < 1.
SectorPartition build_partition(int lines, double delta = 0, double gamma_smooth = 0.125);

enum class SectorKind { Regular, Singular };

/// Regular: the small lines contain no cycle, so U stays away from zero.
/// Singular: the small lines contain exactly one cycle gamma; the sector is
/// integrated in t = sum_{gamma} beta with the t -> 0 pole split off.
struct SectorShape {
    LineSet A = 0;
    SectorKind kind = SectorKind::Regular;
    Subdiagram gamma;
};

/// Throws UnsupportedError for sectors with several cycles or with a cycle
/// and non-constant vertex operators.
SectorShape classify_sector(const FeynmanDiagram& d, LineSet A);

std::string sector_name(const FeynmanGraph& g, LineSet A);

struct SectorValue {
    LineSet A = 0;
    SectorKind kind = SectorKind::Regular;
    Eigen::VectorXcd value; ///< one entry per regulator sample
    double error = 0;
    int level = 0;
    long evaluations = 0;
};

struct SectorOptions {
    QuadratureOptions quad;
    double delta = 0; ///< 0 selects 1/(4n)
    double gamma_smooth = 0.125;
};

/// Contribution of sector A to the amplitude
///   int d^{4L}q int_0^inf prod dalpha alpha^z exp(-sum alpha (k^2 + m^2)) prod phi_v
/// at every regulator sample z. The radial integral is done in closed form,
/// int_0^inf dlambda lambda^{s-1} e^{-lambda c} = Gamma(s) c^{-s}, leaving an
/// integral over the simplex. Throws NumericalError if the quadrature does
/// not converge.
SectorValue sector_eval(const ParametricIntegrand& pi, const SectorPartition& part, LineSet A, const Momenta& p,
                        const Eigen::VectorXcd& z, const QuadratureOptions& opt = {});

struct AmplitudeValue {
    Eigen::VectorXcd value;
    std::vector<SectorValue> sectors;
};

/// Sum of all sectors, evaluated concurrently and reduced in sector order.
AmplitudeValue bare_amplitude(const ParametricIntegrand& pi, const Momenta& p, const Eigen::VectorXcd& z,
                              const SectorOptions& opt = {});
AmplitudeValue bare_amplitude(const FeynmanDiagram& d, const Momenta& p, const Eigen::VectorXcd& z,
                              const SectorOptions& opt = {});

/// The same amplitude without the partition, integrating over the whole
/// simplex. Only meaningful where the simplex integral converges (Re z large
/// enough to tame every subdivergence).
QuadratureResult direct_amplitude(const ParametricIntegrand& pi, const Momenta& p, const Eigen::VectorXcd& z,
                                  const QuadratureOptions& opt = {});

/// g(lambda) = lambda^{n-1} int_simplex G(lambda beta) dbeta, where G is the
/// loop-integrated integrand at alpha = lambda beta. The amplitude is
/// int_0^inf g(lambda) dlambda. Requires an integrable simplex integrand.
QuadratureResult radial_profile(const ParametricIntegrand& pi, const Momenta& p, cdouble z,
                                const std::vector<double>& lambdas, const QuadratureOptions& opt = {});

/// Analytic part of int_0^cutoff lambda^{a + b z} f(lambda) dlambda for
/// f = sum_k taylor[k] lambda^k + O(lambda^K):
///   sum_k taylor[k](z) cutoff^{a+bz+k+1} / (a+bz+k+1).
/// taylor[k] holds one value per regulator sample. Throws NumericalError when
/// a+bz+k+1 is within 1e-12 of zero.
Eigen::VectorXcd analytic_lambda_terms(const std::vector<Eigen::VectorXcd>& taylor, double a, double b,
                                       const Eigen::VectorXcd& z, double cutoff);

/// Full int_0^cutoff lambda^{a+bz} f(lambda): the analytic terms plus the
/// numerically integrated remainder lambda^{a+bz} (f - sum_k taylor[k] lambda^k).
/// f returns one value per regulator sample.
QuadratureResult analytic_lambda(const std::function<Eigen::VectorXcd(double)>& f,
                                 const std::vector<Eigen::VectorXcd>& taylor, double a, double b,
                                 const Eigen::VectorXcd& z, double cutoff, const QuadratureOptions& opt = {});

struct FactorizationResult {
    double direct = 0;
    double factorized = 0;
    double relative_difference = 0;
    long points = 0;
};

/// Checks on the lambda = 1 slice of sector A that the integrand equals its
/// factorized form: the painted cycle's own loop integral, evaluated at the
/// momenta it receives, times the remaining Gaussian integrated over the
/// quotient loop momentum. Both sides are summed with the same fixed-level
/// rule over the sector. Requires a singular sector, constant vertex
/// operators, a one-loop quotient and external momenta along one axis.
FactorizationResult factorization_check(const FeynmanDiagram& d, LineSet A, const Momenta& p, double z,
                                        int level = 1, const SectorOptions& opt = {});

} // namespace alpharen
