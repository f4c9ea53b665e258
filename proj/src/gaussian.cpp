#include "causal/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "causal/error.hpp"

namespace causal {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kPsdTolerance = 1e-10;
constexpr double kPinvCutoff = 1e-10;
constexpr double kMomentTolerance = 1e-9;

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_indices(const Indices& idx, std::size_t n, const char* what) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= n) throw DomainError(std::string(what) + ": coordinate out of range");
    if (i > 0 && idx[i] <= idx[i - 1]) {
      throw DomainError(std::string(what) + ": coordinates must be sorted and distinct");
    }
  }
}

Indices complement(const Indices& idx, std::size_t n) {
  Indices out;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < idx.size() && idx[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

MatrixXd block(const MatrixXd& m, const Indices& rows, const Indices& cols) {
  MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(Index(i), Index(j)) = m(Index(rows[i]), Index(cols[j]));
    }
  }
  return out;
}

VectorXd pick(const VectorXd& v, const Indices& idx) {
  VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(Index(i)) = v(Index(idx[i]));
  return out;
}

MatrixXd pseudo_inverse(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m);
  VectorXd inv = eig.eigenvalues();
  for (Index i = 0; i < inv.size(); ++i) inv(i) = std::abs(inv(i)) > kPinvCutoff ? 1.0 / inv(i) : 0.0;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

std::string list(const Indices& idx) {
  std::string s = "{";
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(idx[i]);
  }
  return s + "}";
}

}  // namespace

GaussianMeasure GaussianMeasure::dirac(const VectorXd& at) {
  return GaussianMeasure{at, MatrixXd::Zero(at.size(), at.size())};
}

GaussianMeasure GaussianMeasure::marginal(const Indices& idx) const {
  check_indices(idx, dimension(), "marginal");
  return GaussianMeasure{pick(mean, idx), block(cov, idx, idx)};
}

GaussianMeasure GaussianKernel::row(const VectorXd& x_s) const {
  if (static_cast<std::size_t>(x_s.size()) != from.size()) {
    throw DomainError("kernel row: expected " + std::to_string(from.size()) + " coordinates");
  }
  return GaussianMeasure{coeff * x_s + offset, noise_cov};
}

double GaussianKernel::determinism_defect() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < from.size(); ++k) {
    const Index s = Index(from[k]);
    for (Index c = 0; c < coeff.cols(); ++c) {
      worst = std::max(worst, std::abs(coeff(s, c) - (c == Index(k) ? 1.0 : 0.0)));
    }
    worst = std::max(worst, std::abs(offset(s)));
    worst = std::max(worst, noise_cov.row(s).cwiseAbs().maxCoeff());
    worst = std::max(worst, noise_cov.col(s).cwiseAbs().maxCoeff());
  }
  return worst;
}

GaussianSpace::GaussianSpace(std::vector<std::string> names, VectorXd mean, MatrixXd cov,
                             KernelProvider kernels)
    : names_(std::move(names)), p_{std::move(mean), std::move(cov)}, kernels_(std::move(kernels)) {
  const auto n = Index(names_.size());
  if (n == 0) throw DomainError("a Gaussian space needs at least one coordinate");
  if (p_.mean.size() != n || p_.cov.rows() != n || p_.cov.cols() != n) {
    throw DomainError("mean and covariance must match the number of coordinates");
  }
  if (!kernels_) throw DomainError("a Gaussian space needs a kernel provider");
}

GaussianKernel GaussianSpace::kernel(const Indices& s) const {
  check_indices(s, dimension(), "kernel");
  GaussianKernel k = kernels_(s);
  const auto n = Index(dimension());
  if (k.from != s || k.coeff.rows() != n || k.coeff.cols() != Index(s.size()) ||
      k.offset.size() != n || k.noise_cov.rows() != n || k.noise_cov.cols() != n) {
    throw InternalError("kernel provider returned a malformed kernel for " + list(s));
  }
  return k;
}

std::size_t GaussianSpace::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw DomainError("unknown coordinate '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

GaussianReport validate_gaussian(const GaussianSpace& gs, const std::vector<Indices>& subsets) {
  GaussianReport rep;
  const auto& p = gs.p();
  if ((p.cov - p.cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    rep.problems.push_back("covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(p.cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kPsdTolerance) {
    rep.problems.push_back("covariance is not positive semidefinite");
  }
  for (const auto& s : subsets) {
    const GaussianKernel k = gs.kernel(s);
    if (s.empty()) {
      if ((k.offset - p.mean).cwiseAbs().maxCoeff() > kMomentTolerance ||
          (k.noise_cov - p.cov).cwiseAbs().maxCoeff() > kMomentTolerance) {
        rep.problems.push_back("axiom (i): K_{} differs from P");
      }
      continue;
    }
    const double defect = k.determinism_defect();
    if (defect > kMomentTolerance) {
      rep.problems.push_back("axiom (ii): K_" + list(s) + " moves its own coordinates by " +
                             std::to_string(defect));
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> ke(k.noise_cov, Eigen::EigenvaluesOnly);
    if (ke.eigenvalues().minCoeff() < -kPsdTolerance) {
      rep.problems.push_back("K_" + list(s) + " has an indefinite noise covariance");
    }
  }
  return rep;
}

std::vector<Indices> default_check_subsets(std::size_t n) {
  std::vector<Indices> out;
  if (n <= 12) {
    for (std::size_t b = 0; b < (std::size_t{1} << n); ++b) {
      Indices s;
      for (std::size_t i = 0; i < n; ++i) {
        if ((b >> i) & 1u) s.push_back(i);
      }
      out.push_back(std::move(s));
    }
    return out;
  }
  out.push_back({});
  for (std::size_t i = 0; i < n; ++i) out.push_back({i});
  Indices all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  out.push_back(std::move(all));
  return out;
}

GaussianMeasure g_intervene(const GaussianSpace& gs, const Indices& u, const GaussianMeasure& q) {
  if (q.dimension() != u.size() || q.cov.rows() != Index(u.size()) ||
      q.cov.cols() != Index(u.size())) {
    throw DomainError("intervention measure has dimension " + std::to_string(q.dimension()) +
                      " but U has " + std::to_string(u.size()) + " coordinates");
  }
  const GaussianKernel k = gs.kernel(u);
  return GaussianMeasure{k.coeff * q.mean + k.offset,
                         k.coeff * q.cov * k.coeff.transpose() + k.noise_cov};
}

GaussianMeasure g_condition(const GaussianMeasure& p, const Indices& u, const VectorXd& value) {
  const std::size_t n = p.dimension();
  check_indices(u, n, "condition");
  if (static_cast<std::size_t>(value.size()) != u.size()) {
    throw DomainError("conditioning value needs one entry per conditioned coordinate");
  }
  if (u.empty()) return p;
  const Indices rest = complement(u, n);
  const MatrixXd suu = block(p.cov, u, u);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(suu, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= kPinvCutoff) {
    throw DomainError("conditioning on a singular covariance block");
  }
  GaussianMeasure out{p.mean, MatrixXd::Zero(Index(n), Index(n))};
  for (std::size_t i = 0; i < u.size(); ++i) out.mean(Index(u[i])) = value(Index(i));
  if (rest.empty()) return out;
  const MatrixXd sru = block(p.cov, rest, u);
  const Eigen::LDLT<MatrixXd> solve(suu);
  const VectorXd shift = sru * solve.solve(value - pick(p.mean, u));
  const MatrixXd schur = block(p.cov, rest, rest) - sru * solve.solve(sru.transpose());
  for (std::size_t i = 0; i < rest.size(); ++i) {
    out.mean(Index(rest[i])) += shift(Index(i));
    for (std::size_t j = 0; j < rest.size(); ++j) {
      out.cov(Index(rest[i]), Index(rest[j])) = schur(Index(i), Index(j));
    }
  }
  return out;
}

GaussianKernel conditional_kernel(const GaussianMeasure& p, const Indices& s) {
  const std::size_t n = p.dimension();
  check_indices(s, n, "conditional kernel");
  const Indices rest = complement(s, n);
  GaussianKernel k{s, MatrixXd::Zero(Index(n), Index(s.size())), VectorXd::Zero(Index(n)),
                   MatrixXd::Zero(Index(n), Index(n))};
  for (std::size_t i = 0; i < s.size(); ++i) k.coeff(Index(s[i]), Index(i)) = 1.0;
  if (rest.empty()) return k;
  if (s.empty()) {
    k.offset = p.mean;
    k.noise_cov = p.cov;
    return k;
  }
  const MatrixXd gain = block(p.cov, rest, s) * pseudo_inverse(block(p.cov, s, s));
  const VectorXd base = pick(p.mean, rest) - gain * pick(p.mean, s);
  const MatrixXd noise = block(p.cov, rest, rest) - gain * block(p.cov, s, rest);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const Index r = Index(rest[i]);
    k.coeff.row(r) = gain.row(Index(i));
    k.offset(r) = base(Index(i));
    for (std::size_t j = 0; j < rest.size(); ++j) {
      k.noise_cov(r, Index(rest[j])) = noise(Index(i), Index(j));
    }
  }
  k.noise_cov = 0.5 * (k.noise_cov + k.noise_cov.transpose());
  return k;
}

GaussianSampler::GaussianSampler(const GaussianMeasure& m) : mean_(m.mean) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m.cov);
  const VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  factor_ = eig.eigenvectors() * root.asDiagonal();
}

VectorXd GaussianSampler::draw(Rng& rng) const { return draw_around(mean_, rng); }

VectorXd GaussianSampler::draw_around(const VectorXd& mean, Rng& rng) const {
  VectorXd z(factor_.cols());
  for (Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + factor_ * z;
}

GaussianMeasure g_monte_carlo(const GaussianSpace& gs, const Indices& u, const GaussianMeasure& q,
                              std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw DomainError("Monte Carlo needs at least two samples");
  if (q.dimension() != u.size()) throw DomainError("intervention measure does not match U");
  const GaussianKernel k = gs.kernel(u);
  const GaussianSampler outer(q);
  const GaussianSampler inner(GaussianMeasure{k.offset, k.noise_cov});
  const auto n = Index(gs.dimension());
  Rng rng(seed);
  VectorXd sum = VectorXd::Zero(n);
  MatrixXd sq = MatrixXd::Zero(n, n);
  VectorXd first;
  for (std::size_t i = 0; i < samples; ++i) {
    const VectorXd xu = outer.draw(rng);
    const VectorXd x = inner.draw_around(k.coeff * xu + k.offset, rng);
    // Shift by the first draw to keep the second moment well conditioned.
    if (i == 0) first = x;
    const VectorXd d = x - first;
    sum += d;
    sq.selfadjointView<Eigen::Lower>().rankUpdate(d);
  }
  const double m = static_cast<double>(samples);
  const VectorXd mean_d = sum / m;
  MatrixXd cov = sq.selfadjointView<Eigen::Lower>();
  cov = (cov - m * mean_d * mean_d.transpose()) / (m - 1.0);
  return GaussianMeasure{first + mean_d, cov};
}

// Fixtures -----------------------------------------------------------------

std::vector<double> brownian_times(std::size_t steps, double horizon) {
  std::vector<double> t(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    t[i] = horizon * static_cast<double>(i + 1) / static_cast<double>(steps);
  }
  return t;
}

GaussianSpace brownian_grid(std::size_t steps, double horizon) {
  if (steps < 2) throw DomainError("a Brownian grid needs at least two steps");
  if (!(horizon > 0.0)) throw DomainError("the horizon must be positive");
  const auto t = brownian_times(steps, horizon);
  const auto n = Index(steps);
  MatrixXd cov(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) cov(i, j) = std::min(t[std::size_t(i)], t[std::size_t(j)]);
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < steps; ++i) names.push_back("W" + std::to_string(i));

  auto provider = [t, steps](const Indices& s) {
    const auto n = Index(steps);
    GaussianKernel k{s, MatrixXd::Zero(n, Index(s.size())), VectorXd::Zero(n),
                     MatrixXd::Zero(n, n)};
    // anchor[i]: position in s of the latest intervened time at or before i.
    std::vector<std::ptrdiff_t> anchor(steps, -1);
    std::size_t next = 0;
    std::ptrdiff_t current = -1;
    for (std::size_t i = 0; i < steps; ++i) {
      if (next < s.size() && s[next] == i) current = std::ptrdiff_t(next++);
      anchor[i] = current;
    }
    for (std::size_t i = 0; i < steps; ++i) {
      const std::ptrdiff_t a = anchor[i];
      if (a >= 0) k.coeff(Index(i), Index(a)) = 1.0;
      if (a >= 0 && s[std::size_t(a)] == i) continue;
      const double start = a >= 0 ? t[s[std::size_t(a)]] : 0.0;
      for (std::size_t j = 0; j < steps; ++j) {
        if (anchor[j] != a || (a >= 0 && s[std::size_t(a)] == j)) continue;
        k.noise_cov(Index(i), Index(j)) = std::min(t[i], t[j]) - start;
      }
    }
    return k;
  };
  return GaussianSpace(std::move(names), VectorXd::Zero(n), std::move(cov), provider);
}

namespace {

GaussianKernel two_coordinate_kernel(const Indices& s, const GaussianMeasure& p,
                                     const GaussianKernel& on_first,
                                     const GaussianKernel& on_second) {
  if (s.empty()) return GaussianKernel{s, MatrixXd::Zero(2, 0), p.mean, p.cov};
  if (s.size() == 2) {
    return GaussianKernel{s, MatrixXd::Identity(2, 2), VectorXd::Zero(2), MatrixXd::Zero(2, 2)};
  }
  return s[0] == 0 ? on_first : on_second;
}

}  // namespace

GaussianSpace altitude_temperature() {
  VectorXd mean(2);
  mean << 1000.0, 10.0;
  MatrixXd cov(2, 2);
  cov << 300.0, -15.0, -15.0, 1.0;
  const GaussianMeasure p{mean, cov};

  // Setting the altitude moves the temperature: mean (1200 - e1) / 20.
  GaussianKernel alt{{0}, MatrixXd(2, 1), VectorXd(2), MatrixXd::Zero(2, 2)};
  alt.coeff << 1.0, -1.0 / 20.0;
  alt.offset << 0.0, 60.0;
  alt.noise_cov(1, 1) = 0.25;
  // Setting the temperature leaves the altitude at its own law.
  GaussianKernel temp{{1}, MatrixXd(2, 1), VectorXd(2), MatrixXd::Zero(2, 2)};
  temp.coeff << 0.0, 1.0;
  temp.offset << 1000.0, 0.0;
  temp.noise_cov(0, 0) = 300.0;

  return GaussianSpace({"altitude", "temperature"}, mean, cov,
                       [p, alt, temp](const Indices& s) {
                         return two_coordinate_kernel(s, p, alt, temp);
                       });
}

GaussianSpace rice_market() {
  VectorXd mean(2);
  mean << 3.5, 5.0;
  MatrixXd cov(2, 2);
  cov << 0.25, -0.2, -0.2, 0.25;
  const GaussianMeasure p{mean, cov};

  // More rice on the market lowers the price: mean 4.5 - 0.5 (x - 3).
  GaussianKernel amount{{0}, MatrixXd(2, 1), VectorXd(2), MatrixXd::Zero(2, 2)};
  amount.coeff << 1.0, -0.5;
  amount.offset << 0.0, 6.0;
  amount.noise_cov(1, 1) = 0.25;
  // A higher price brings more rice: mean 4 + 0.5 (y - 6).
  GaussianKernel price{{1}, MatrixXd(2, 1), VectorXd(2), MatrixXd::Zero(2, 2)};
  price.coeff << 0.5, 1.0;
  price.offset << 1.0, 0.0;
  price.noise_cov(0, 0) = 0.25;

  return GaussianSpace({"amount", "price"}, mean, cov, [p, amount, price](const Indices& s) {
    return two_coordinate_kernel(s, p, amount, price);
  });
}

}  // namespace causal
