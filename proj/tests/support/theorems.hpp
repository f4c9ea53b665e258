#pragma once

// Structural results about interventions, effects and sources checked on one
// causal space at a time. Each result keeps a tally of how often its premise
// held and how often the conclusion failed.

#include <cstdint>
#include <string>
#include <vector>

#include "causal/harness.hpp"

namespace theorems {

using namespace causal;

struct Tally {
  std::string name;
  std::size_t premises = 0;    // instances where the premise held (the check ran)
  std::size_t violations = 0;
  std::string first_failure;
};

class Suite {
 public:
  explicit Suite(double eps = 1e-9) : eps_(eps) {}

  /// Runs every check on cs, drawing interventions and events from seed.
  void run(const CausalSpace& cs, std::uint64_t seed);

  const std::vector<Tally>& tallies() const { return tallies_; }
  std::size_t violations() const;
  std::size_t instances() const { return instances_; }
  std::string report() const;

 private:
  void check(const std::string& name, bool ok, const std::string& detail);
  void run_interventions(const CausalSpace& cs, Rng& rng, const std::string& tag);
  void run_effects(const CausalSpace& cs, Rng& rng, const std::string& tag);
  void run_time(const CausalSpace& cs, Rng& rng, const std::string& tag);
  void run_sources(const CausalSpace& cs, Rng& rng, const std::string& tag);

  double eps_;
  std::size_t instances_ = 0;
  std::vector<Tally> tallies_;
};

/// Random event in H_W for a random nonempty W (or in H_within if given).
Event random_event(Rng& rng, const SpacePtr& space, SubsetMask within);
Event random_event(Rng& rng, const SpacePtr& space);

/// A random valid internal mechanism for an intervention on U via q.
CausalSpace random_internal(Rng& rng, SubsetMask u, const Dist& q);

/// Runs the suite over `count` generated spaces, cycling through the kernel
/// styles; seeds are base, base + 1, ...
Suite run_suite(std::size_t count, std::uint64_t base);

}  // namespace theorems
