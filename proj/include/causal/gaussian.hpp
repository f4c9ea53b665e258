#pragma once

// Linear-Gaussian causal spaces on R^n. Every kernel is an affine map plus
// independent Gaussian noise: K_S(x_S, .) = N(A_S x_S + b_S, Sigma_S).
// Subsets are sorted index lists here, since grids have far more than 32
// coordinates.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causal/rng.hpp"

namespace causal {

using Indices = std::vector<std::size_t>;

struct GaussianMeasure {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  static GaussianMeasure dirac(const Eigen::VectorXd& at);
  std::size_t dimension() const { return static_cast<std::size_t>(mean.size()); }
  GaussianMeasure marginal(const Indices& idx) const;
};

struct GaussianKernel {
  Indices from;
  Eigen::MatrixXd coeff;      // n x |S|
  Eigen::VectorXd offset;     // n
  Eigen::MatrixXd noise_cov;  // n x n

  GaussianMeasure row(const Eigen::VectorXd& x_s) const;
  /// Largest deviation from the Gaussian form of interventional determinism:
  /// selector rows in coeff, zero offset and zero noise on S.
  double determinism_defect() const;
};

class GaussianSpace {
 public:
  using KernelProvider = std::function<GaussianKernel(const Indices&)>;

  GaussianSpace(std::vector<std::string> names, Eigen::VectorXd mean, Eigen::MatrixXd cov,
                KernelProvider kernels);

  std::size_t dimension() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const GaussianMeasure& p() const { return p_; }
  /// K_S for a sorted, duplicate-free index list.
  GaussianKernel kernel(const Indices& s) const;
  std::size_t index_of(const std::string& name) const;

 private:
  std::vector<std::string> names_;
  GaussianMeasure p_;
  KernelProvider kernels_;
};

/// Problems found by validate_gaussian; empty means valid.
struct GaussianReport {
  std::vector<std::string> problems;
  bool valid() const { return problems.empty(); }
};

/// Checks symmetry (1e-12) and positive semidefiniteness (eigenvalues >=
/// -1e-10) of P, K_empty == P, and determinism of K_S for each listed subset.
GaussianReport validate_gaussian(const GaussianSpace& gs, const std::vector<Indices>& subsets);
/// Every subset when n <= 12; otherwise the empty set, all singletons and T.
std::vector<Indices> default_check_subsets(std::size_t n);

/// Intervention measure: N(A_U mu_q + b_U, A_U Sigma_q A_U^T + Sigma_U).
GaussianMeasure g_intervene(const GaussianSpace& gs, const Indices& u, const GaussianMeasure& q);

/// P conditioned on the U-coordinates equal to value, returned on all n
/// coordinates (the U-block is a point mass). Throws DomainError when the
/// U-block of the covariance is singular.
GaussianMeasure g_condition(const GaussianMeasure& p, const Indices& u,
                            const Eigen::VectorXd& value);

/// The kernel K_S(x_S, .) = P(. | X_S = x_S), using a pseudo-inverse with a
/// 1e-10 eigenvalue cutoff so that degenerate blocks are tolerated.
GaussianKernel conditional_kernel(const GaussianMeasure& p, const Indices& s);

/// Draws from a possibly singular Gaussian through its eigendecomposition.
class GaussianSampler {
 public:
  explicit GaussianSampler(const GaussianMeasure& m);
  Eigen::VectorXd draw(Rng& rng) const;
  /// Draw with the given mean in place of the measure's own.
  Eigen::VectorXd draw_around(const Eigen::VectorXd& mean, Rng& rng) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;
};

/// Empirical moments of the two-stage sampler x_U ~ q, x ~ K_U(x_U, .).
GaussianMeasure g_monte_carlo(const GaussianSpace& gs, const Indices& u, const GaussianMeasure& q,
                              std::size_t samples, std::uint64_t seed);

/// Standard Brownian motion on the grid t_i = horizon (i + 1) / steps. The
/// kernel of S keeps every coordinate before the first intervened time at its
/// observational law and restarts the path from the latest intervened value
/// after each intervened time.
GaussianSpace brownian_grid(std::size_t steps, double horizon);
std::vector<double> brownian_times(std::size_t steps, double horizon);

/// (altitude in metres, temperature in degrees C).
GaussianSpace altitude_temperature();

/// (amount of rice, price). The two kernels form a cycle: each coordinate
/// responds to an intervention on the other. The observational law is a
/// fixture choice: mean (3.5, 5), cov [[0.25, -0.2], [-0.2, 0.25]].
GaussianSpace rice_market();

}  // namespace causal
