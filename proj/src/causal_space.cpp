#include "causal/causal_space.hpp"

#include <cmath>
#include <cstdio>

#include "causal/error.hpp"

namespace causal {

CausalMechanism::CausalMechanism(SpacePtr space, std::vector<Kernel> kernels)
    : space_(std::move(space)), kernels_(std::move(kernels)) {
  if (kernels_.size() != space_->subset_count()) {
    throw DomainError("a mechanism needs " + std::to_string(space_->subset_count()) +
                      " kernels, got " + std::to_string(kernels_.size()));
  }
  for (std::size_t b = 0; b < kernels_.size(); ++b) {
    const auto& k = kernels_[b];
    if (k.from().bits() != b) {
      throw DomainError("kernel slot {" + SubsetMask(static_cast<std::uint32_t>(b)).to_string() +
                        "} holds a kernel from {" + k.from().to_string() + "}");
    }
    if (!(*k.space() == *space_)) throw DomainError("kernel defined on a different space");
  }
}

const Kernel& CausalMechanism::operator[](SubsetMask s) const {
  space_->check_mask(s);
  return kernels_[s.bits()];
}

CausalSpace::CausalSpace(Dist p, CausalMechanism mechanism)
    : p_(std::move(p)), mechanism_(std::move(mechanism)) {
  if (p_.domain() != p_.space()->all()) throw DomainError("P must be a measure on all of Omega");
  if (!(*p_.space() == *mechanism_.space())) {
    throw DomainError("measure and mechanism live on different spaces");
  }
}

std::string ValidationReport::summary(const FiniteProductSpace& space) const {
  if (violations.empty()) return "valid";
  std::string out;
  char buf[128];
  for (const auto& v : violations) {
    out += v.kind == Violation::Kind::kTrivialIntervention ? "axiom (i)" : "axiom (ii)";
    out += " violated by K_{" + v.subset.to_string() + "} at " + space.describe(v.atom) +
           " on event " + v.event;
    std::snprintf(buf, sizeof buf, ": expected %.12g, got %.12g\n", v.expected, v.actual);
    out += buf;
  }
  return out;
}

ValidationReport validate_causal_space(const CausalSpace& cs, double tolerance) {
  ValidationReport report;
  const auto& space = *cs.space();
  const Dist& p = cs.p();

  const Kernel& k0 = cs.kernel(SubsetMask());
  const auto row0 = k0.row(0);
  for (std::size_t i = 0; i < row0.size(); ++i) {
    if (std::abs(row0[i] - p[i]) > tolerance) {
      report.violations.push_back({Violation::Kind::kTrivialIntervention, SubsetMask(),
                                   AtomIndex{SubsetMask(), 0},
                                   "{" + space.describe({space.all(), i}) + "}", p[i], row0[i]});
    }
  }

  for (std::size_t b = 1; b < space.subset_count(); ++b) {
    const SubsetMask s(static_cast<std::uint32_t>(b));
    const Kernel& k = cs.kernel(s);
    const auto proj = space.projection(space.all(), s);
    for (std::size_t r = 0; r < k.row_count(); ++r) {
      const auto w = k.row(r);
      double own = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (proj[i] == r) own += w[i];
      }
      if (std::abs(own - 1.0) > tolerance) {
        report.violations.push_back({Violation::Kind::kInterventionalDeterminism, s,
                                     AtomIndex{s, r}, "{" + space.describe({s, r}) + "}", 1.0,
                                     own});
      }
    }
  }
  return report;
}

void require_valid(const CausalSpace& cs) {
  const auto report = validate_causal_space(cs);
  if (!report.valid()) throw DomainError("invalid causal space: " + report.summary(*cs.space()));
}

Dist to_subspace(const Dist& q, const SpacePtr& subspace) {
  return Dist(subspace, subspace->all(), std::vector<double>(q.weights().begin(), q.weights().end()));
}

Dist intervention_measure(const CausalSpace& cs, const Dist& q) {
  return bind(q, cs.kernel(q.domain()));
}

namespace {

void check_spec(const CausalSpace& cs, const InterventionSpec& spec) {
  const auto& space = *cs.space();
  space.check_mask(spec.u);
  if (!(*spec.q.space() == space)) throw DomainError("intervention measure on a different space");
  if (spec.q.domain() != spec.u) {
    throw DomainError("intervention measure lives on {" + spec.q.domain().to_string() +
                      "} but U = {" + spec.u.to_string() + "}");
  }
  if (!spec.internal) return;
  if (spec.u.empty()) throw DomainError("an intervention on the empty set has no internal mechanism");
  const auto& l = *spec.internal;
  if (!(*l.space() == *space.subspace(spec.u))) {
    throw DomainError("internal mechanism is not defined on the U-subspace");
  }
  for (std::size_t i = 0; i < spec.q.size(); ++i) {
    if (std::abs(l.p()[i] - spec.q[i]) > kEpsNorm) {
      throw DomainError("internal mechanism's measure differs from Q");
    }
  }
  const auto report = validate_causal_space(l);
  if (!report.valid()) {
    throw DomainError("internal mechanism is not a causal mechanism: " + report.summary(*l.space()));
  }
}

}  // namespace

CausalSpace intervene(const CausalSpace& cs, const InterventionSpec& spec) {
  check_spec(cs, spec);
  const auto& sp = cs.space();
  const auto& space = *sp;
  const SubsetMask u = spec.u;
  Dist p_do = intervention_measure(cs, spec.q);
  if (u.empty()) return CausalSpace(std::move(p_do), cs.mechanism());

  const CausalSpace internal = spec.internal ? *spec.internal : trivial_mechanism(u, spec.q);

  std::vector<Kernel> kernels;
  kernels.reserve(space.subset_count());
  const std::size_t omega = space.atom_count();
  const std::size_t omega_u = space.atom_count(u);
  for (std::size_t b = 0; b < space.subset_count(); ++b) {
    const SubsetMask s(static_cast<std::uint32_t>(b));
    const SubsetMask s_in = s & u;
    const SubsetMask s_out = s - u;
    const SubsetMask joined = s | u;
    const Kernel& inner = internal.kernel(compress_mask(u, s_in));
    const Kernel& outer = cs.kernel(joined);
    const auto to_in = space.projection(s, s_in);
    const auto to_out = space.projection(s, s_out);
    const auto place_out = space.placement(s_out, joined);
    const auto place_u = space.placement(u, joined);

    const std::size_t rows = space.atom_count(s);
    std::vector<double> data(rows * omega, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto l_row = inner.row(to_in[r]);
      const std::size_t base = place_out[to_out[r]];
      double* dst = data.data() + r * omega;
      for (std::size_t w = 0; w < omega_u; ++w) {
        const double lw = l_row[w];
        if (lw == 0.0) continue;
        const auto k_row = outer.row(base + place_u[w]);
        for (std::size_t i = 0; i < omega; ++i) dst[i] += lw * k_row[i];
      }
    }
    kernels.emplace_back(sp, s, std::move(data));
  }
  return CausalSpace(std::move(p_do), CausalMechanism(sp, std::move(kernels)));
}

CausalSpace intervene_hard(const CausalSpace& cs, SubsetMask u, const Dist& q) {
  check_spec(cs, InterventionSpec{u, q, std::nullopt});
  const auto& sp = cs.space();
  const auto& space = *sp;
  Dist p_do = intervention_measure(cs, q);

  std::vector<Kernel> kernels;
  kernels.reserve(space.subset_count());
  const std::size_t omega = space.atom_count();
  for (std::size_t b = 0; b < space.subset_count(); ++b) {
    const SubsetMask s(static_cast<std::uint32_t>(b));
    const SubsetMask rest = u - s;
    const SubsetMask joined = s | u;
    const Dist q_rest = marginal(q, rest);
    const Kernel& outer = cs.kernel(joined);
    const auto place_s = space.placement(s, joined);
    const auto place_rest = space.placement(rest, joined);

    const std::size_t rows = space.atom_count(s);
    std::vector<double> data(rows * omega, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      double* dst = data.data() + r * omega;
      for (std::size_t w = 0; w < q_rest.size(); ++w) {
        const double qw = q_rest[w];
        if (qw == 0.0) continue;
        const auto k_row = outer.row(place_s[r] + place_rest[w]);
        for (std::size_t i = 0; i < omega; ++i) dst[i] += qw * k_row[i];
      }
    }
    kernels.emplace_back(sp, s, std::move(data));
  }
  return CausalSpace(std::move(p_do), CausalMechanism(sp, std::move(kernels)));
}

CausalSpace trivial_mechanism(SubsetMask u, const Dist& q) {
  if (q.domain() != u) throw DomainError("trivial mechanism: Q must live on U");
  const SpacePtr sub = q.space()->subspace(u);
  const Dist q_sub = to_subspace(q, sub);
  std::vector<Kernel> kernels;
  kernels.reserve(sub->subset_count());
  for (std::size_t b = 0; b < sub->subset_count(); ++b) {
    const SubsetMask v(static_cast<std::uint32_t>(b));
    const Dist rest = marginal(q_sub, sub->all() - v);
    std::vector<Dist> rows;
    const std::size_t n = sub->atom_count(v);
    rows.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      const Dist d = dirac(sub, AtomIndex{v, r});
      rows.push_back(v == sub->all() ? d : (v.empty() ? rest : product(d, rest)));
    }
    kernels.emplace_back(sub, v, rows);
  }
  return CausalSpace(q_sub, CausalMechanism(sub, std::move(kernels)));
}

CausalMechanism mechanism_from_conditionals(const Dist& p) {
  const auto& sp = p.space();
  if (p.domain() != sp->all()) throw DomainError("conditionals need a measure on all of Omega");
  std::vector<Kernel> kernels;
  kernels.reserve(sp->subset_count());
  for (std::size_t b = 0; b < sp->subset_count(); ++b) {
    const SubsetMask s(static_cast<std::uint32_t>(b));
    const std::size_t n = sp->atom_count(s);
    std::vector<Dist> rows;
    rows.reserve(n);
    for (std::size_t r = 0; r < n; ++r) rows.push_back(condition(p, AtomIndex{s, r}));
    kernels.emplace_back(sp, s, rows);
  }
  return CausalMechanism(sp, std::move(kernels));
}

}  // namespace causal
