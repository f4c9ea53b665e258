#include "causal/harness.hpp"

#include <algorithm>
#include <cmath>

#include "causal/error.hpp"

namespace causal {

namespace {

SpacePtr binary_space(std::initializer_list<const char*> names) {
  std::vector<Component> comps;
  for (const char* n : names) comps.push_back({n, {"0", "1"}});
  return std::make_shared<const FiniteProductSpace>(std::move(comps));
}

/// delta_{omega_S} x rest, with rest a measure on Omega_{T-S}.
Dist delta_times(const SpacePtr& sp, SubsetMask s, std::size_t r, const Dist& rest) {
  return product(dirac(sp, AtomIndex{s, r}), rest);
}

ScmVariable uniform_root(std::string name, std::size_t k) {
  ScmVariable v{std::move(name), {}, std::vector<double>(k, 1.0 / static_cast<double>(k)), {}, {}};
  for (std::size_t i = 0; i < k; ++i) {
    v.domain.push_back(std::to_string(i));
    v.table.push_back(i);
  }
  return v;
}

/// X := parent xor N with N ~ Bern(flip).
ScmVariable binary_flip(std::string name, std::size_t parent, double flip) {
  return ScmVariable{std::move(name), {"0", "1"}, {1.0 - flip, flip}, {parent}, {0, 1, 1, 0}};
}

ScmSpec random_scm_sized(Rng& rng, std::size_t n, std::size_t max_domain) {
  ScmSpec scm;
  for (std::size_t j = 0; j < n; ++j) {
    ScmVariable v;
    v.name = "V" + std::to_string(j);
    const std::size_t k = 2 + rng.below(std::max<std::size_t>(max_domain, 2) - 1);
    for (std::size_t i = 0; i < k; ++i) v.domain.push_back(std::to_string(i));
    const std::size_t noise = 1 + rng.below(std::max<std::size_t>(max_domain, 1));
    double sum = 0.0;
    for (std::size_t i = 0; i < noise; ++i) {
      v.noise.push_back(0.05 + rng.uniform());
      sum += v.noise.back();
    }
    for (double& w : v.noise) w /= sum;
    for (std::size_t p = 0; p < j; ++p) {
      if (rng.uniform() < 0.5) v.parents.push_back(p);
    }
    std::size_t rows = noise;
    for (std::size_t p : v.parents) rows *= scm.variables[p].domain.size();
    for (std::size_t i = 0; i < rows; ++i) v.table.push_back(rng.below(k));
    scm.variables.push_back(std::move(v));
  }
  return scm;
}

}  // namespace

const char* to_string(KernelStyle style) {
  switch (style) {
    case KernelStyle::kConditional: return "conditional";
    case KernelStyle::kPerturbedConditional: return "perturbed-conditional";
    case KernelStyle::kFullyRandom: return "fully-random";
    case KernelStyle::kScm: return "scm";
  }
  return "?";
}

SpacePtr random_product_space(Rng& rng, std::size_t min_components, std::size_t max_components,
                              std::size_t max_outcomes) {
  if (min_components < 1 || max_components < min_components || max_outcomes < 1) {
    throw DomainError("random space: bad size bounds");
  }
  const std::size_t n = min_components + rng.below(max_components - min_components + 1);
  std::vector<Component> comps;
  for (std::size_t t = 0; t < n; ++t) {
    Component c{"C" + std::to_string(t), {}};
    const std::size_t k = 1 + rng.below(max_outcomes);
    for (std::size_t i = 0; i < k; ++i) c.outcomes.push_back(std::to_string(i));
    comps.push_back(std::move(c));
  }
  return std::make_shared<const FiniteProductSpace>(std::move(comps));
}

Dist random_dist(Rng& rng, const SpacePtr& space, SubsetMask s, double zero_chance) {
  std::vector<double> w(space->atom_count(s));
  double sum = 0.0;
  for (double& x : w) {
    x = rng.uniform() < zero_chance ? 0.0 : 0.05 + rng.uniform();
    sum += x;
  }
  if (sum == 0.0) {
    w[rng.below(w.size())] = 1.0;
    sum = 1.0;
  }
  for (double& x : w) x /= sum;
  return Dist(space, s, std::move(w));
}

CausalSpace random_mechanism_on(Rng& rng, const Dist& p) {
  const auto& sp = p.space();
  if (p.domain() != sp->all()) throw DomainError("random mechanism: P must live on all of Omega");
  std::vector<Kernel> kernels;
  for (std::size_t b = 0; b < sp->subset_count(); ++b) {
    const SubsetMask s(static_cast<std::uint32_t>(b));
    if (s.empty()) {
      kernels.emplace_back(sp, s, std::vector<Dist>{p});
      continue;
    }
    std::vector<Dist> rows;
    for (std::size_t r = 0; r < sp->atom_count(s); ++r) {
      rows.push_back(delta_times(sp, s, r, random_dist(rng, sp, sp->all() - s, 0.2)));
    }
    kernels.emplace_back(sp, s, rows);
  }
  return CausalSpace(p, CausalMechanism(sp, std::move(kernels)));
}

ScmSpec random_scm(Rng& rng, std::size_t max_variables, std::size_t max_domain) {
  return random_scm_sized(rng, 1 + rng.below(std::max<std::size_t>(max_variables, 1)), max_domain);
}

CausalSpace random_causal_space(const RandomSpaceConfig& cfg) {
  Rng rng(cfg.seed);
  if (cfg.style == KernelStyle::kScm) {
    const std::size_t n =
        cfg.min_components + rng.below(cfg.max_components - cfg.min_components + 1);
    return compile_scm(random_scm_sized(rng, n, std::max<std::size_t>(cfg.max_outcomes, 2)));
  }
  const SpacePtr sp =
      random_product_space(rng, cfg.min_components, cfg.max_components, cfg.max_outcomes);
  switch (cfg.style) {
    case KernelStyle::kConditional: {
      const Dist p = random_dist(rng, sp, sp->all());
      return CausalSpace(p, mechanism_from_conditionals(p));
    }
    case KernelStyle::kFullyRandom:
      return random_mechanism_on(rng, random_dist(rng, sp, sp->all(), 0.15));
    default: break;
  }
  const Dist p = random_dist(rng, sp, sp->all(), 0.15);
  std::vector<Kernel> kernels;
  for (std::size_t b = 0; b < sp->subset_count(); ++b) {
    const SubsetMask s(static_cast<std::uint32_t>(b));
    if (s.empty()) {
      kernels.emplace_back(sp, s, std::vector<Dist>{p});
      continue;
    }
    const double lambda = 0.1 + 0.8 * rng.uniform();
    const Dist ps = marginal(p, s);
    const std::size_t omega = sp->atom_count();
    std::vector<double> data;
    data.reserve(ps.size() * omega);
    for (std::size_t r = 0; r < ps.size(); ++r) {
      const Dist noise = delta_times(sp, s, r, random_dist(rng, sp, sp->all() - s, 0.2));
      if (ps[r] <= kEpsNorm) {
        data.insert(data.end(), noise.weights().begin(), noise.weights().end());
        continue;
      }
      const Dist cond = condition(p, AtomIndex{s, r});
      for (std::size_t i = 0; i < omega; ++i) {
        data.push_back((1.0 - lambda) * cond[i] + lambda * noise[i]);
      }
    }
    kernels.emplace_back(sp, s, std::move(data));
  }
  return CausalSpace(p, CausalMechanism(sp, std::move(kernels)));
}

Dist monte_carlo_intervention(const CausalSpace& cs, const Dist& q, std::size_t samples,
                              std::uint64_t seed) {
  if (samples == 0) throw DomainError("Monte Carlo needs at least one sample");
  const Kernel& k = cs.kernel(q.domain());
  Rng rng(seed);
  std::vector<double> counts(cs.space()->atom_count(), 0.0);
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t r = rng.categorical(q.weights());
    counts[rng.categorical(k.row(r))] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(samples);
  return Dist(cs.space(), cs.space()->all(), std::move(counts));
}

// Counterexamples ------------------------------------------------------------

CompositionCase composition_counterexample(bool coupled) {
  const SpacePtr sp = binary_space({"X1", "X2", "X3", "Y"});
  const auto& space = *sp;
  const SubsetMask xs = SubsetMask::of({0, 1, 2});
  const std::size_t y = 3;

  std::vector<double> pw(space.atom_count(), 0.0);
  for (std::size_t i = 0; i < pw.size(); ++i) {
    const auto x = space.decode(space.all(), i);
    if (x[y] != (x[0] ^ x[1])) continue;
    const double pair = coupled ? (x[0] == x[1] ? 0.45 : 0.05) : 0.25;
    pw[i] = pair * 0.5;
  }
  const Dist p(sp, space.all(), std::move(pw));

  // The X's not intervened on keep their observational joint law and Y is
  // recomputed from X1, X2 unless it is set.
  std::vector<Kernel> kernels;
  for (std::size_t b = 0; b < space.subset_count(); ++b) {
    const SubsetMask s(static_cast<std::uint32_t>(b));
    const Dist free_x = marginal(p, xs - s);
    const auto to_s = space.projection(space.all(), s);
    const auto to_free = space.projection(space.all(), xs - s);
    const std::size_t omega = space.atom_count();
    std::vector<double> data(space.atom_count(s) * omega, 0.0);
    for (std::size_t i = 0; i < omega; ++i) {
      const auto x = space.decode(space.all(), i);
      if (!s.contains(y) && x[y] != (x[0] ^ x[1])) continue;
      data[to_s[i] * omega + i] = free_x[to_free[i]];
    }
    kernels.emplace_back(sp, s, std::move(data));
  }
  CausalSpace cs(p, CausalMechanism(sp, std::move(kernels)));

  const SubsetMask s = SubsetMask::of({2});
  const SubsetMask r = SubsetMask::of({0});
  Dist q(sp, s, {0.3, 0.7});
  Dist small = intervention_measure(cs, q);
  Dist q_prime = marginal(small, s | r);
  Dist big = intervention_measure(cs, q_prime);
  const double gap = total_variation(small, big);
  return CompositionCase{std::move(cs), s, r, std::move(q), std::move(q_prime),
                         std::move(small), std::move(big), gap};
}

ReversibilityCase check_reversibility(const CausalSpace& cs, SubsetMask r, SubsetMask u,
                                      const Dist& q1, const Dist& q2) {
  if (q1.domain() != r || q2.domain() != u) throw DomainError("reversibility: Q1 on R, Q2 on U");
  ReversibilityCase out{cs, r, u, q1, q2, 0.0, 0.0, 0.0, {}};
  out.premise_u = total_variation(marginal(intervention_measure(cs, q1), u), q2);
  out.premise_r = total_variation(marginal(intervention_measure(cs, q2), r), q1);
  const Dist pr = marginal(cs.p(), r);
  out.conclusion = total_variation(pr, q1);
  std::size_t worst = 0;
  for (std::size_t i = 0; i < pr.size(); ++i) {
    if (std::abs(pr[i] - q1[i]) > std::abs(pr[worst] - q1[worst])) worst = i;
  }
  out.witness = cs.space()->describe(AtomIndex{r, worst});
  return out;
}

std::pair<Dist, Dist> reversibility_fixed_point(const CausalSpace& cs, SubsetMask r,
                                                SubsetMask u) {
  Dist q1 = marginal(cs.p(), r);
  for (int it = 0; it < 100000; ++it) {
    const Dist q2 = marginal(intervention_measure(cs, q1), u);
    Dist next = marginal(intervention_measure(cs, q2), r);
    const double change = max_abs_difference(next, q1);
    q1 = std::move(next);
    if (change <= 1e-15) break;
  }
  Dist q2 = marginal(intervention_measure(cs, q1), u);
  return {std::move(q1), std::move(q2)};
}

ReversibilityCase reversibility_counterexample() {
  const SpacePtr sp = std::make_shared<const FiniteProductSpace>(
      std::vector<Component>{{"amount", {"low", "high"}}, {"price", {"low", "high"}}});
  const SubsetMask amount = SubsetMask::of({0});
  const SubsetMask price = SubsetMask::of({1});
  const Dist p(sp, sp->all(), {0.2, 0.5, 0.2, 0.1});

  // Plenty of rice pushes the price down; a high price brings more rice.
  const double price_high[] = {0.8, 0.2};
  const double amount_high[] = {0.3, 0.7};
  std::vector<Dist> k_amount, k_price, k_all;
  for (std::size_t a = 0; a < 2; ++a) {
    k_amount.push_back(
        delta_times(sp, amount, a, Dist(sp, price, {1.0 - price_high[a], price_high[a]})));
    k_price.push_back(
        delta_times(sp, price, a, Dist(sp, amount, {1.0 - amount_high[a], amount_high[a]})));
  }
  for (std::size_t i = 0; i < 4; ++i) k_all.push_back(dirac(sp, AtomIndex{sp->all(), i}));
  std::vector<Kernel> kernels;
  kernels.emplace_back(sp, SubsetMask(), std::vector<Dist>{p});
  kernels.emplace_back(sp, amount, k_amount);
  kernels.emplace_back(sp, price, k_price);
  kernels.emplace_back(sp, sp->all(), k_all);
  const CausalSpace cs(p, CausalMechanism(sp, std::move(kernels)));

  auto [q1, q2] = reversibility_fixed_point(cs, amount, price);
  return check_reversibility(cs, amount, price, q1, q2);
}

// Fixtures -------------------------------------------------------------------

ScmSpec xor_scm() {
  ScmSpec scm;
  scm.variables.push_back({"X", {"0", "1"}, {0.5, 0.5}, {}, {0, 1}});
  scm.variables.push_back(binary_flip("Y", 0, 0.1));
  return scm;
}

ScmSpec chain_scm() {
  ScmSpec scm;
  scm.variables.push_back({"X", {"0", "1"}, {0.4, 0.6}, {}, {0, 1}});
  scm.variables.push_back(binary_flip("Y", 0, 0.2));
  scm.variables.push_back(binary_flip("Z", 1, 0.3));
  return scm;
}

ScmSpec backdoor_scm() {
  ScmSpec scm;
  scm.variables.push_back({"V", {"0", "1"}, {0.5, 0.5}, {}, {0, 1}});
  scm.variables.push_back(binary_flip("U", 0, 0.2));
  // P(A = 1 | v, u) = 0.2, 0.6, 0.4, 0.8 through a uniform five-point noise.
  ScmVariable a{"A", {"0", "1"}, std::vector<double>(5, 0.2), {0, 1}, {}};
  const std::size_t threshold[] = {1, 3, 2, 4};
  for (std::size_t vu = 0; vu < 4; ++vu) {
    for (std::size_t n = 0; n < 5; ++n) a.table.push_back(n < threshold[vu] ? 1 : 0);
  }
  scm.variables.push_back(std::move(a));
  return scm;
}

ScmSpec hidden_confounder_scm() {
  ScmSpec scm;
  scm.variables.push_back({"H", {"0", "1"}, {0.5, 0.5}, {}, {0, 1}});
  scm.variables.push_back(binary_flip("U", 0, 0.1));
  scm.variables.push_back(binary_flip("M", 1, 0.1));
  // Y := H xor M xor N.
  ScmVariable y{"Y", {"0", "1"}, {0.9, 0.1}, {0, 2}, {}};
  for (std::size_t h = 0; h < 2; ++h) {
    for (std::size_t m = 0; m < 2; ++m) {
      for (std::size_t n = 0; n < 2; ++n) y.table.push_back(h ^ m ^ n);
    }
  }
  scm.variables.push_back(std::move(y));
  return scm;
}

ScmSpec dormant_scm(std::size_t k, double flip, bool extra) {
  if (k < 2) throw DomainError("dormant fixture needs k >= 2");
  ScmSpec scm;
  scm.variables.push_back(uniform_root("X0", k));
  scm.variables.push_back(uniform_root("X1", k));
  if (extra) scm.variables.push_back(uniform_root("X2", 2));
  ScmVariable y{"Y", {}, {}, {0, 1}, {}};
  for (std::size_t i = 0; i < k; ++i) y.domain.push_back(std::to_string(i));
  if (flip == 0.0) {
    y.noise = {1.0};
  } else {
    y.noise.assign(k, flip / static_cast<double>(k - 1));
    y.noise[0] = 1.0 - flip;
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      for (std::size_t n = 0; n < y.noise.size(); ++n) y.table.push_back((a + b + n) % k);
    }
  }
  scm.variables.push_back(std::move(y));
  return scm;
}

CausalSpace ice_cream_space() {
  const SpacePtr sp = std::make_shared<const FiniteProductSpace>(
      std::vector<Component>{{"I", {"low", "high"}}, {"S", {"low", "high"}}});
  const Dist p(sp, sp->all(), {0.4, 0.1, 0.1, 0.4});
  // K_S(omega_S, .) = delta x P on the other component: no variable moves the
  // other, whatever P's dependence.
  return CausalSpace(p, trivial_mechanism(sp->all(), p).mechanism());
}

CausalSpace discrete_altitude_space() {
  const SpacePtr sp = std::make_shared<const FiniteProductSpace>(std::vector<Component>{
      {"altitude", {"low", "mid", "high"}}, {"temperature", {"cold", "mild", "warm"}}});
  const double alt[] = {0.3, 0.4, 0.3};
  const double temp_given_alt[3][3] = {{0.1, 0.3, 0.6}, {0.2, 0.5, 0.3}, {0.6, 0.3, 0.1}};
  std::vector<double> pw;
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t t = 0; t < 3; ++t) pw.push_back(alt[a] * temp_given_alt[a][t]);
  }
  const Dist p(sp, sp->all(), std::move(pw));
  const SubsetMask a_mask = SubsetMask::of({0});
  const SubsetMask t_mask = SubsetMask::of({1});
  const Dist p_alt = marginal(p, a_mask);

  std::vector<Dist> k_alt, k_temp, k_all;
  for (std::size_t i = 0; i < 3; ++i) {
    k_alt.push_back(delta_times(
        sp, a_mask, i,
        Dist(sp, t_mask, {temp_given_alt[i][0], temp_given_alt[i][1], temp_given_alt[i][2]})));
    k_temp.push_back(delta_times(sp, t_mask, i, p_alt));
  }
  for (std::size_t i = 0; i < 9; ++i) k_all.push_back(dirac(sp, AtomIndex{sp->all(), i}));
  std::vector<Kernel> kernels;
  kernels.emplace_back(sp, SubsetMask(), std::vector<Dist>{p});
  kernels.emplace_back(sp, a_mask, k_alt);
  kernels.emplace_back(sp, t_mask, k_temp);
  kernels.emplace_back(sp, sp->all(), k_all);
  return CausalSpace(p, CausalMechanism(sp, std::move(kernels)));
}

PoSpec deterministic_po() {
  PoSpec po;
  po.treatments = {"0", "1"};
  po.outcomes = {"0", "1"};
  po.outcome_scores = {0.0, 1.0};
  // (Z, Y_0, Y_1): half the units treated, Y_0 = 0 and Y_1 = 1 throughout.
  po.joint = {0.0, 0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0};
  return po;
}

PoSpec confounded_po() {
  PoSpec po;
  po.treatments = {"0", "1"};
  po.outcomes = {"0", "1"};
  po.outcome_scores = {0.0, 1.0};
  // (Z, Y_0, Y_1) row-major.
  po.joint = {0.25, 0.10, 0.05, 0.10, 0.05, 0.25, 0.02, 0.18};
  return po;
}

}  // namespace causal
