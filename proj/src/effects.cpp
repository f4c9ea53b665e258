#include "causal/effects.hpp"

#include <cmath>

#include "causal/error.hpp"

namespace causal {

namespace {

// Conditional probabilities are ratios of sums, so they get a looser bound
// than raw measure comparisons.
constexpr double kConditionalTolerance = 1e-8;

bool close(double a, double b, double tol = kEpsNorm) { return std::abs(a - b) <= tol; }

/// K_S(omega_S, a) for every S and every atom of Omega_S.
class EventTable {
 public:
  EventTable(const CausalSpace& cs, std::span<const char> cylinder) : space_(*cs.space()) {
    values_.resize(space_.subset_count());
    for (std::size_t b = 0; b < values_.size(); ++b) {
      const Kernel& k = cs.kernel(SubsetMask(static_cast<std::uint32_t>(b)));
      auto& row = values_[b];
      row.resize(k.row_count());
      for (std::size_t r = 0; r < k.row_count(); ++r) row[r] = k.apply(r, cylinder);
    }
  }

  const std::vector<double>& operator[](SubsetMask s) const { return values_[s.bits()]; }

  /// K_big(., a) depends on omega_big only through omega_small.
  bool agrees(SubsetMask big, SubsetMask small) const {
    const auto proj = space_.projection(big, small);
    const auto& vb = (*this)[big];
    const auto& vs = (*this)[small];
    for (std::size_t r = 0; r < vb.size(); ++r) {
      if (!close(vb[r], vs[proj[r]])) return false;
    }
    return true;
  }

 private:
  const FiniteProductSpace& space_;
  std::vector<std::vector<double>> values_;
};

bool no_effect(const FiniteProductSpace& space, const EventTable& table, SubsetMask u) {
  for (std::size_t b = 0; b < space.subset_count(); ++b) {
    const SubsetMask s(static_cast<std::uint32_t>(b));
    if (!s.intersects(u)) continue;
    if (!table.agrees(s, s - u)) return false;
  }
  return true;
}

bool active(const EventTable& table, SubsetMask u, double p_a) {
  for (double v : table[u]) {
    if (!close(v, p_a)) return true;
  }
  return false;
}

EffectClass classify_cylinder(const CausalSpace& cs, SubsetMask u, std::span<const char> cylinder) {
  const auto& space = *cs.space();
  space.check_mask(u);
  const EventTable table(cs, cylinder);
  if (no_effect(space, table, u)) return EffectClass::kNone;
  const double p_a = table[SubsetMask()][0];
  return active(table, u, p_a) ? EffectClass::kActive : EffectClass::kDormant;
}

void check_event(const CausalSpace& cs, const Event& a) {
  if (!(*a.space() == *cs.space())) throw DomainError("event defined on a different space");
}

}  // namespace

const char* to_string(EffectClass c) {
  switch (c) {
    case EffectClass::kNone: return "NONE";
    case EffectClass::kActive: return "ACTIVE";
    case EffectClass::kDormant: return "DORMANT";
  }
  return "?";
}

EffectClass classify_effect(const CausalSpace& cs, SubsetMask u, const Event& a) {
  check_event(cs, a);
  return classify_cylinder(cs, u, a.cylinder());
}

EffectClass classify_effect_on_sigma(const CausalSpace& cs, SubsetMask u, SubsetMask v) {
  const auto& sp = cs.space();
  sp->check_mask(v);
  bool any_dormant = false;
  for (std::size_t r = 0; r < sp->atom_count(v); ++r) {
    const Event a = Event::atom(sp, AtomIndex{v, r});
    switch (classify_cylinder(cs, u, a.cylinder())) {
      case EffectClass::kActive: return EffectClass::kActive;
      case EffectClass::kDormant: any_dormant = true; break;
      case EffectClass::kNone: break;
    }
  }
  return any_dormant ? EffectClass::kDormant : EffectClass::kNone;
}

bool has_no_effect_given(const CausalSpace& cs, SubsetMask u, SubsetMask v, const Event& a) {
  check_event(cs, a);
  const auto& space = *cs.space();
  space.check_mask(u);
  space.check_mask(v);
  const EventTable table(cs, a.cylinder());
  const SubsetMask removed = u - v;
  for (std::size_t b = 0; b < space.subset_count(); ++b) {
    const SubsetMask big = SubsetMask(static_cast<std::uint32_t>(b)) | v;
    if (!table.agrees(big, big - removed)) return false;
  }
  return true;
}

bool is_trivial_kernel(const CausalSpace& cs, SubsetMask u) {
  const SubsetMask rest = cs.space()->all() - u;
  return classify_effect_on_sigma(cs, u, rest) == EffectClass::kNone;
}

TimePartition::TimePartition(std::vector<SubsetMask> slices) : slices_(std::move(slices)) {
  SubsetMask seen;
  for (const auto s : slices_) {
    if (s.intersects(seen)) throw DomainError("time slices must be pairwise disjoint");
    seen = seen | s;
  }
}

bool is_time_respecting(const CausalSpace& cs, const TimePartition& tp) {
  const auto& slices = tp.slices();
  for (const auto s : slices) cs.space()->check_mask(s);
  for (std::size_t j = 0; j < slices.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (classify_effect_on_sigma(cs, slices[j], slices[i]) != EffectClass::kNone) return false;
    }
  }
  return true;
}

bool is_source(const CausalSpace& cs, SubsetMask u, const Event& a) {
  check_event(cs, a);
  const Dist pu = marginal(cs.p(), u);
  const Kernel& k = cs.kernel(u);
  const auto cyl = a.cylinder();
  for (std::size_t r = 0; r < pu.size(); ++r) {
    if (pu[r] <= kEpsNorm) continue;
    const Dist c = condition(cs.p(), AtomIndex{u, r});
    if (!close(k.apply(r, cyl), c.probability(a), kConditionalTolerance)) return false;
  }
  return true;
}

bool is_global_source(const CausalSpace& cs, SubsetMask u) {
  return is_source_of_sigma(cs, u, cs.space()->all());
}

bool is_source_of_sigma(const CausalSpace& cs, SubsetMask u, SubsetMask v) {
  const auto& sp = cs.space();
  sp->check_mask(u);
  sp->check_mask(v);
  const Dist pu = marginal(cs.p(), u);
  const Kernel& k = cs.kernel(u);
  for (std::size_t r = 0; r < pu.size(); ++r) {
    if (pu[r] <= kEpsNorm) continue;
    const Dist c = marginal(condition(cs.p(), AtomIndex{u, r}), v);
    const Dist kr = marginal(k.row_dist(r), v);
    if (max_abs_difference(c, kr) > kConditionalTolerance) return false;
  }
  return true;
}

ActivationWitness activate_dormant(const CausalSpace& cs, SubsetMask u, const Event& a) {
  if (classify_effect(cs, u, a) != EffectClass::kDormant) {
    throw ContractError("activate_dormant requires a dormant effect of {" + u.to_string() +
                        "} on the event");
  }
  const auto& sp = cs.space();
  const auto& space = *sp;
  const auto cyl = a.cylinder();
  const EventTable table(cs, cyl);
  const std::size_t omega = space.atom_count();

  for (std::size_t b = 0; b < space.subset_count(); ++b) {
    const SubsetMask s(static_cast<std::uint32_t>(b));
    if (!s.intersects(u)) continue;
    const SubsetMask w = s - u;
    const SubsetMask v = s & u;
    const auto to_s = space.projection(space.all(), s);
    const auto to_w = space.projection(space.all(), w);
    const auto to_v = space.projection(space.all(), v);
    for (std::size_t o = 0; o < omega; ++o) {
      if (close(table[s][to_s[o]], table[w][to_w[o]])) continue;
      const Dist q = dirac(sp, AtomIndex{w, to_w[o]});
      const CausalSpace after = intervene_hard(cs, w, q);
      const double measure = after.p().probability(a);
      const Kernel& kv = after.kernel(v);
      if (close(kv.apply(to_v[o], cyl), measure)) continue;
      return ActivationWitness{w, AtomIndex{space.all(), o}, v, kv.apply(to_v[o], cyl), measure};
    }
  }
  throw InternalError("dormant effect without an activating hard intervention");
}

AdjustmentReport adjustment_estimate(const CausalSpace& cs, SubsetMask u, SubsetMask v,
                                     const Dist& q, const Event& a) {
  check_event(cs, a);
  const auto& sp = cs.space();
  const auto& space = *sp;
  space.check_mask(v);
  if (q.domain() != u) throw DomainError("adjustment: Q must live on U");

  AdjustmentReport rep;
  rep.notes.push_back(
      "condition (i) is checked numerically: the do-conditional of a given H_U v H_V must match "
      "the observational conditional on every atom the intervention charges");

  const SubsetMask joint = u | v;
  const Dist p_do = intervention_measure(cs, q);
  const auto cyl_joint = a.indicator(space.all());
  const auto to_joint = space.projection(space.all(), joint);
  const std::size_t nj = space.atom_count(joint);
  std::vector<double> obs_mass(nj, 0.0), obs_a(nj, 0.0), do_mass(nj, 0.0), do_a(nj, 0.0);
  for (std::size_t i = 0; i < space.atom_count(); ++i) {
    const std::size_t j = to_joint[i];
    obs_mass[j] += cs.p()[i];
    do_mass[j] += p_do[i];
    if (cyl_joint[i]) {
      obs_a[j] += cs.p()[i];
      do_a[j] += p_do[i];
    }
  }

  rep.condition_i = true;
  for (std::size_t j = 0; j < nj; ++j) {
    if (do_mass[j] <= kEpsNorm) continue;
    if (obs_mass[j] <= kEpsNorm) {
      rep.condition_i = false;
      rep.notes.push_back("atom " + space.describe({joint, j}) +
                          " is charged by the intervention but is P-null");
      continue;
    }
    if (!close(do_a[j] / do_mass[j], obs_a[j] / obs_mass[j], kConditionalTolerance)) {
      rep.condition_i = false;
      rep.notes.push_back("do-conditional differs from the observational conditional at " +
                          space.describe({joint, j}));
    }
  }

  rep.case_c = v.is_subset_of(u);
  rep.case_a = is_source_of_sigma(cs, u, v);
  rep.case_b = classify_effect_on_sigma(cs, u, v) == EffectClass::kNone;

  const SubsetMask extra = v - u;
  const Dist pu = marginal(cs.p(), u);
  const Dist pux = marginal(cs.p(), u | extra);
  const Dist px = marginal(cs.p(), extra);
  const auto place_u = space.placement(u, joint);
  const auto place_x = space.placement(extra, joint);
  const auto place_u_ux = space.placement(u, u | extra);
  const auto place_x_ux = space.placement(extra, u | extra);
  const bool use_marginal = !rep.case_c && !rep.case_a && rep.case_b;
  if (!rep.case_a && !rep.case_b && !rep.case_c) {
    rep.notes.push_back("none of the source / no-effect / V-inside-U cases holds");
  }

  bool undefined = false;
  double estimate = 0.0;
  for (std::size_t r = 0; r < q.size(); ++r) {
    if (q[r] == 0.0) continue;
    double inner = 0.0;
    for (std::size_t x = 0; x < px.size(); ++x) {
      double weight = 1.0;
      if (!extra.empty()) {
        if (use_marginal) {
          weight = px[x];
        } else if (pu[r] > kEpsNorm) {
          weight = pux[place_u_ux[r] + place_x_ux[x]] / pu[r];
        } else {
          undefined = true;
          continue;
        }
      }
      if (weight == 0.0) continue;
      const std::size_t j = place_u[r] + place_x[x];
      if (obs_mass[j] <= kEpsNorm) {
        undefined = true;
        continue;
      }
      inner += weight * obs_a[j] / obs_mass[j];
    }
    estimate += q[r] * inner;
  }
  if (undefined) rep.notes.push_back("the formula needs conditionals of P on P-null atoms");
  rep.estimate = estimate;
  rep.trusted = rep.condition_i && (rep.case_a || rep.case_b || rep.case_c) && !undefined;
  return rep;
}

}  // namespace causal
