#pragma once

// Finite product measurable spaces and the measures and kernels that live on
// them. Every component sigma-algebra is the full power set of its outcome
// set, so a measure is a dense tensor of atom weights.
//
// Atoms of Omega_S are encoded row-major over the components of S in
// ascending index order: the highest-index component varies fastest.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace causal {

/// Tolerance for every equality-of-measure comparison.
inline constexpr double kEpsNorm = 1e-9;
/// Weights summing to within this of one are renormalized; anything further
/// off is rejected.
inline constexpr double kRenormalizeTolerance = 1e-6;

/// Largest number of components a space may have. Defaults to 12 and can be
/// overridden through the CAUSAL_SPACES_MAX_T environment variable (read once,
/// clamped to 30 so that masks fit in 32 bits).
std::size_t max_components();

/// A subset S of the index set T = {0, ..., n-1}, stored as a bit mask.
class SubsetMask {
 public:
  constexpr SubsetMask() = default;
  constexpr explicit SubsetMask(std::uint32_t bits) : bits_(bits) {}

  static SubsetMask of(std::initializer_list<std::size_t> indices);
  static SubsetMask of(std::span<const std::size_t> indices);
  static constexpr SubsetMask full(std::size_t n) {
    return SubsetMask(n >= 32 ? ~0u : ((1u << n) - 1u));
  }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(std::size_t t) const { return (bits_ >> t) & 1u; }
  constexpr bool is_subset_of(SubsetMask other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr bool intersects(SubsetMask other) const {
    return (bits_ & other.bits_) != 0;
  }
  std::size_t size() const;
  std::vector<std::size_t> indices() const;

  constexpr SubsetMask operator|(SubsetMask o) const { return SubsetMask(bits_ | o.bits_); }
  constexpr SubsetMask operator&(SubsetMask o) const { return SubsetMask(bits_ & o.bits_); }
  /// Set difference.
  constexpr SubsetMask operator-(SubsetMask o) const { return SubsetMask(bits_ & ~o.bits_); }

  constexpr bool operator==(const SubsetMask&) const = default;
  constexpr auto operator<=>(const SubsetMask&) const = default;

  /// "0,2" style rendering, the form used in documents.
  std::string to_string() const;

 private:
  std::uint32_t bits_ = 0;
};

struct Component {
  std::string name;
  std::vector<std::string> outcomes;
};

/// An atom omega_S of Omega_S, identified by its flat row-major index.
struct AtomIndex {
  SubsetMask domain;
  std::size_t flat = 0;

  bool operator==(const AtomIndex&) const = default;
};

/// The product space over finitely many finite components.
class FiniteProductSpace {
 public:
  explicit FiniteProductSpace(std::vector<Component> components);

  std::size_t dimension() const { return components_.size(); }
  const Component& component(std::size_t t) const { return components_.at(t); }
  const std::vector<Component>& components() const { return components_; }
  std::size_t outcome_count(std::size_t t) const { return components_.at(t).outcomes.size(); }

  SubsetMask all() const { return SubsetMask::full(dimension()); }
  /// Number of subsets of T, 2^n.
  std::size_t subset_count() const { return std::size_t{1} << dimension(); }
  /// |Omega_S|.
  std::size_t atom_count(SubsetMask s) const;
  std::size_t atom_count() const { return atom_count(all()); }

  /// Throws DomainError unless s is a subset of T.
  void check_mask(SubsetMask s) const;

  std::vector<std::size_t> decode(SubsetMask s, std::size_t flat) const;
  std::size_t encode(SubsetMask s, std::span<const std::size_t> coordinates) const;
  AtomIndex atom(SubsetMask s, std::span<const std::size_t> coordinates) const {
    return AtomIndex{s, encode(s, coordinates)};
  }

  /// For every atom of Omega_from, the flat index of its projection onto
  /// Omega_to. Requires to to be a subset of from.
  std::vector<std::size_t> projection(SubsetMask from, SubsetMask to) const;

  /// For every atom of Omega_part, its additive contribution to a flat index
  /// of Omega_whole. For disjoint A, B with A | B == W the flat index of the
  /// joined atom (a, b) is placement(A, W)[a] + placement(B, W)[b].
  std::vector<std::size_t> placement(SubsetMask part, SubsetMask whole) const;

  /// The space made of the components in s, in ascending order.
  std::shared_ptr<const FiniteProductSpace> subspace(SubsetMask s) const;

  std::optional<std::size_t> find_component(std::string_view name) const;
  std::optional<std::size_t> find_outcome(std::size_t t, std::string_view label) const;

  /// Human-readable atom, e.g. "X=1,Y=0".
  std::string describe(AtomIndex atom) const;

  bool operator==(const FiniteProductSpace& other) const;

 private:
  std::size_t stride(SubsetMask s, std::size_t t) const;

  std::vector<Component> components_;
};

using SpacePtr = std::shared_ptr<const FiniteProductSpace>;

/// Maps a mask expressed relative to the subspace `outer` (bit i = i-th
/// smallest index of outer) back to T, and the inverse.
SubsetMask expand_mask(SubsetMask outer, SubsetMask relative);
SubsetMask compress_mask(SubsetMask outer, SubsetMask absolute);

class Event;

/// A probability measure on Omega_S.
class Dist {
 public:
  /// Validates nonnegativity and normalization; renormalizes drift below
  /// kRenormalizeTolerance.
  Dist(SpacePtr space, SubsetMask domain, std::vector<double> weights);

  static Dist uniform(SpacePtr space, SubsetMask domain);

  const SpacePtr& space() const { return space_; }
  SubsetMask domain() const { return domain_; }
  std::span<const double> weights() const { return weights_; }
  double operator[](std::size_t flat) const { return weights_[flat]; }
  std::size_t size() const { return weights_.size(); }

  /// Probability of an event whose domain lies inside this domain.
  double probability(const Event& event) const;

 private:
  SpacePtr space_;
  SubsetMask domain_;
  std::vector<double> weights_;
};

/// An event in H_S: a set of atoms of Omega_S, read as a cylinder in Omega.
class Event {
 public:
  Event(SpacePtr space, SubsetMask domain, std::vector<char> members);

  static Event none(SpacePtr space);
  static Event everything(SpacePtr space);
  /// The cylinder {omega : omega_S == atom}.
  static Event atom(SpacePtr space, AtomIndex atom);
  /// Measurable rectangle: per component either no constraint (nullopt) or the
  /// allowed outcome indices.
  static Event rectangle(SpacePtr space,
                         const std::vector<std::optional<std::vector<std::size_t>>>& sides);

  const SpacePtr& space() const { return space_; }
  SubsetMask domain() const { return domain_; }
  bool contains(std::size_t flat_in_domain) const { return members_[flat_in_domain] != 0; }
  std::span<const char> members() const { return members_; }

  /// Indicator over the atoms of Omega_within (domain must be a subset).
  std::vector<char> indicator(SubsetMask within) const;
  std::vector<char> cylinder() const { return indicator(space_->all()); }

  bool is_empty() const;
  bool is_everything() const;

 private:
  SpacePtr space_;
  SubsetMask domain_;
  std::vector<char> members_;
};

/// A transition kernel from (Omega, H_S) into (Omega, H): one distribution
/// over the whole of Omega per atom of Omega_S.
class Kernel {
 public:
  /// `rows` holds atom_count(from) consecutive rows of length atom_count().
  Kernel(SpacePtr space, SubsetMask from, std::vector<double> rows);
  Kernel(SpacePtr space, SubsetMask from, const std::vector<Dist>& rows);

  const SpacePtr& space() const { return space_; }
  SubsetMask from() const { return from_; }
  std::size_t row_count() const { return row_count_; }
  std::size_t row_size() const { return row_size_; }
  std::span<const double> row(std::size_t flat_from) const {
    return {rows_.data() + flat_from * row_size_, row_size_};
  }
  Dist row_dist(std::size_t flat_from) const;
  std::span<const double> data() const { return rows_; }

  /// K(omega_S, A) for an event given by its cylinder indicator over Omega.
  double apply(std::size_t flat_from, std::span<const char> cylinder) const;
  double apply(std::size_t flat_from, const Event& event) const;

  /// Largest deviation of a row's S-marginal from the Dirac mass at the row's
  /// own atom (0 for a kernel satisfying interventional determinism).
  double determinism_defect() const;

 private:
  SpacePtr space_;
  SubsetMask from_;
  std::size_t row_count_ = 0;
  std::size_t row_size_ = 0;
  std::vector<double> rows_;
};

/// Pushforward of d (on Omega_R) along the projection onto Omega_S.
Dist marginal(const Dist& d, SubsetMask s);
/// d restricted to the fiber {omega_S == atom} and renormalized. d's domain
/// must contain atom.domain. Throws NullSetError on a zero-mass fiber.
Dist condition(const Dist& d, AtomIndex atom);
/// Product measure of two distributions whose domains partition their union.
Dist product(const Dist& a, const Dist& b);
/// The measure A -> sum_{omega_U} q(omega_U) k(omega_U, A).
Dist bind(const Dist& q, const Kernel& k);
Dist dirac(SpacePtr space, AtomIndex atom);

/// Largest absolute per-atom difference. Domains must match.
double max_abs_difference(const Dist& a, const Dist& b);
double total_variation(const Dist& a, const Dist& b);
bool approx_equal(const Dist& a, const Dist& b, double tolerance = kEpsNorm);

/// Mutual information (nats) between the S- and T\S-marginals of d.
double mutual_information(const Dist& d, SubsetMask s);

}  // namespace causal
