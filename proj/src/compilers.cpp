#include "causal/compilers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "causal/error.hpp"

namespace causal {

namespace {

std::size_t noise_atoms(const ScmSpec& scm) {
  std::size_t n = 1;
  for (const auto& v : scm.variables) n *= v.noise.size();
  return n;
}

std::size_t table_size(const ScmSpec& scm, const ScmVariable& v) {
  std::size_t n = v.noise.size();
  for (std::size_t p : v.parents) n *= scm.variables.at(p).domain.size();
  return n;
}

std::size_t table_index(const ScmSpec& scm, const ScmVariable& v,
                        std::span<const std::size_t> values, std::size_t noise) {
  std::size_t idx = 0;
  for (std::size_t p : v.parents) idx = idx * scm.variables[p].domain.size() + values[p];
  return idx * v.noise.size() + noise;
}

/// Returns the vertices of a directed cycle of the parent graph, if any.
std::vector<std::size_t> find_cycle(const ScmSpec& scm) {
  const std::size_t n = scm.variables.size();
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<std::size_t> stack;
  std::vector<std::size_t> cycle;
  // Edges run parent -> child; walking parent lists traverses them backwards,
  // so the found cycle is reversed at the end.
  std::function<bool(std::size_t)> visit = [&](std::size_t j) {
    state[j] = 1;
    stack.push_back(j);
    for (std::size_t p : scm.variables[j].parents) {
      if (p >= n) continue;
      if (state[p] == 1) {
        const auto it = std::find(stack.begin(), stack.end(), p);
        cycle.assign(it, stack.end());
        cycle.push_back(p);
        return true;
      }
      if (state[p] == 0 && visit(p)) return true;
    }
    stack.pop_back();
    state[j] = 2;
    return false;
  };
  for (std::size_t j = 0; j < n; ++j) {
    if (state[j] == 0 && visit(j)) {
      std::reverse(cycle.begin(), cycle.end());
      return cycle;
    }
  }
  return {};
}

void check_law(const std::vector<double>& w, const std::string& what) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw DomainError(what + ": negative or NaN probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kRenormalizeTolerance) {
    throw DomainError(what + ": probabilities sum to " + std::to_string(sum));
  }
}

}  // namespace

void ScmSpec::validate() const {
  if (variables.empty()) throw DomainError("an SCM needs at least one variable");
  const std::size_t n = variables.size();
  for (const auto& v : variables) {
    for (std::size_t p : v.parents) {
      if (p >= n) throw DomainError("variable '" + v.name + "' has an unknown parent");
    }
  }
  if (const auto cycle = find_cycle(*this); !cycle.empty()) {
    std::string trace;
    for (std::size_t j : cycle) {
      if (!trace.empty()) trace += " -> ";
      trace += variables[j].name;
    }
    throw DomainError("SCM parent graph is cyclic: " + trace);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = variables[j];
    if (v.domain.empty()) throw DomainError("variable '" + v.name + "' has an empty domain");
    if (v.noise.empty()) throw DomainError("variable '" + v.name + "' has no noise values");
    check_law(v.noise, "noise of '" + v.name + "'");
    for (std::size_t p : v.parents) {
      if (p >= j) {
        throw DomainError("variables are not listed in topological order: '" + v.name +
                          "' depends on '" + variables[p].name + "'");
      }
    }
    if (v.table.size() != table_size(*this, v)) {
      throw DomainError("assignment table of '" + v.name + "' needs " +
                        std::to_string(table_size(*this, v)) + " entries, got " +
                        std::to_string(v.table.size()));
    }
    for (std::size_t out : v.table) {
      if (out >= v.domain.size()) {
        throw DomainError("assignment table of '" + v.name + "' leaves the domain");
      }
    }
  }
}

SpacePtr ScmSpec::space() const {
  std::vector<Component> comps;
  comps.reserve(variables.size());
  for (const auto& v : variables) comps.push_back({v.name, v.domain});
  return std::make_shared<const FiniteProductSpace>(std::move(comps));
}

CausalSpace compile_scm(const ScmSpec& scm) {
  scm.validate();
  const SpacePtr sp = scm.space();
  const auto& space = *sp;
  const std::size_t n = scm.variables.size();
  const std::size_t omega = space.atom_count();

  // Noise atoms with their probabilities, decoded once.
  const std::size_t na = noise_atoms(scm);
  std::vector<std::vector<std::size_t>> noise_values;
  std::vector<double> noise_prob;
  for (std::size_t a = 0; a < na; ++a) {
    std::vector<std::size_t> vals(n);
    std::size_t rest = a;
    double prob = 1.0;
    for (std::size_t j = n; j-- > 0;) {
      const std::size_t k = scm.variables[j].noise.size();
      vals[j] = rest % k;
      rest /= k;
      prob *= scm.variables[j].noise[vals[j]];
    }
    if (prob == 0.0) continue;
    noise_values.push_back(std::move(vals));
    noise_prob.push_back(prob);
  }

  std::vector<Kernel> kernels;
  kernels.reserve(space.subset_count());
  std::vector<std::size_t> x(n);
  for (std::size_t b = 0; b < space.subset_count(); ++b) {
    const SubsetMask s(static_cast<std::uint32_t>(b));
    const auto idx = s.indices();
    const std::size_t rows = space.atom_count(s);
    std::vector<double> data(rows * omega, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto fixed = space.decode(s, r);
      double* dst = data.data() + r * omega;
      for (std::size_t a = 0; a < noise_values.size(); ++a) {
        std::size_t fi = 0;
        for (std::size_t j = 0; j < n; ++j) {
          if (s.contains(j)) {
            x[j] = fixed[fi++];
          } else {
            const auto& v = scm.variables[j];
            x[j] = v.table[table_index(scm, v, x, noise_values[a][j])];
          }
        }
        dst[space.encode(space.all(), x)] += noise_prob[a];
      }
    }
    kernels.emplace_back(sp, s, std::move(data));
  }
  const auto row0 = kernels.front().row(0);
  Dist p(sp, space.all(), std::vector<double>(row0.begin(), row0.end()));
  return CausalSpace(std::move(p), CausalMechanism(sp, std::move(kernels)));
}

Dist truncated_factorization_oracle(const ScmSpec& scm,
                                    const std::vector<std::optional<std::size_t>>& clamp) {
  scm.validate();
  const std::size_t n = scm.variables.size();
  if (clamp.size() != n) throw DomainError("clamp needs one entry per variable");
  const SpacePtr sp = scm.space();

  // P(X_j = value | parents) tables, one per variable.
  std::vector<std::vector<double>> cpt(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = scm.variables[j];
    const std::size_t configs = v.table.size() / v.noise.size();
    cpt[j].assign(configs * v.domain.size(), 0.0);
    for (std::size_t c = 0; c < configs; ++c) {
      for (std::size_t e = 0; e < v.noise.size(); ++e) {
        cpt[j][c * v.domain.size() + v.table[c * v.noise.size() + e]] += v.noise[e];
      }
    }
    if (clamp[j] && *clamp[j] >= v.domain.size()) {
      throw DomainError("clamp value out of range for '" + v.name + "'");
    }
  }

  std::vector<double> out(sp->atom_count(), 0.0);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const auto x = sp->decode(sp->all(), flat);
    double prob = 1.0;
    for (std::size_t j = 0; j < n && prob != 0.0; ++j) {
      if (clamp[j]) {
        prob *= x[j] == *clamp[j] ? 1.0 : 0.0;
        continue;
      }
      const auto& v = scm.variables[j];
      std::size_t c = 0;
      for (std::size_t p : v.parents) c = c * scm.variables[p].domain.size() + x[p];
      prob *= cpt[j][c * v.domain.size() + x[j]];
    }
    out[flat] = prob;
  }
  return Dist(sp, sp->all(), std::move(out));
}

// Potential outcomes -------------------------------------------------------

void PoSpec::validate() const {
  if (treatments.empty()) throw DomainError("PO spec needs at least one treatment level");
  if (outcomes.empty()) throw DomainError("PO spec needs at least one outcome level");
  if (!outcome_scores.empty() && outcome_scores.size() != outcomes.size()) {
    throw DomainError("PO spec needs one score per outcome level");
  }
  std::size_t expected = treatments.size() * covariate_count();
  for (std::size_t z = 0; z < treatments.size(); ++z) expected *= outcomes.size();
  if (joint.size() != expected) {
    throw DomainError("PO joint needs " + std::to_string(expected) + " weights, got " +
                      std::to_string(joint.size()));
  }
  check_law(joint, "PO joint");
}

namespace {

struct PoCell {
  std::size_t z;
  std::size_t x;
  std::vector<std::size_t> potentials;
};

template <class F>
void for_each_cell(const PoSpec& po, F&& f) {
  const std::size_t k = po.treatments.size();
  const std::size_t ny = po.outcomes.size();
  PoCell cell{0, 0, std::vector<std::size_t>(k)};
  for (std::size_t flat = 0; flat < po.joint.size(); ++flat) {
    std::size_t rest = flat;
    for (std::size_t i = k; i-- > 0;) {
      cell.potentials[i] = rest % ny;
      rest /= ny;
    }
    cell.x = rest % po.covariate_count();
    cell.z = rest / po.covariate_count();
    f(cell, po.joint[flat]);
  }
}

double score(const PoSpec& po, std::size_t y) {
  return po.outcome_scores.empty() ? static_cast<double>(y) : po.outcome_scores[y];
}

}  // namespace

std::vector<double> potential_outcome_law(const PoSpec& po, std::size_t z) {
  po.validate();
  if (z >= po.treatments.size()) throw DomainError("treatment level out of range");
  std::vector<double> law(po.outcomes.size(), 0.0);
  for_each_cell(po, [&](const PoCell& c, double w) { law[c.potentials[z]] += w; });
  return law;
}

double ate(const PoSpec& po, std::size_t z1, std::size_t z2) {
  po.validate();
  if (z1 >= po.treatments.size() || z2 >= po.treatments.size()) {
    throw DomainError("treatment level out of range");
  }
  double e = 0.0;
  for_each_cell(po, [&](const PoCell& c, double w) {
    e += w * (score(po, c.potentials[z1]) - score(po, c.potentials[z2]));
  });
  return e;
}

const char* to_string(KernelOrigin origin) {
  switch (origin) {
    case KernelOrigin::kAxiom: return "axiom";
    case KernelOrigin::kMandatedOnY: return "mandated-on-outcome";
    case KernelOrigin::kFilled: return "filled";
  }
  return "?";
}

CompiledPo compile_po(const PoSpec& po) {
  po.validate();
  std::vector<std::string> covs = po.covariates;
  if (covs.empty()) covs.push_back("none");
  const SpacePtr sp = std::make_shared<const FiniteProductSpace>(std::vector<Component>{
      {"Z", po.treatments}, {"Y", po.outcomes}, {"X", covs}});
  const auto& space = *sp;

  std::vector<double> pw(space.atom_count(), 0.0);
  for_each_cell(po, [&](const PoCell& c, double w) {
    const std::size_t coords[] = {c.z, c.potentials[c.z], c.x};
    pw[space.encode(space.all(), coords)] += w;
  });
  Dist p(sp, space.all(), std::move(pw));

  const SubsetMask z_mask = SubsetMask::of({kPoTreatment});
  const SubsetMask x_mask = SubsetMask::of({kPoCovariate});
  const Dist pz = marginal(p, z_mask);
  const Dist px = marginal(p, x_mask);
  const Dist pzx = marginal(p, z_mask | x_mask);

  std::vector<Kernel> kernels;
  std::vector<KernelProvenance> mask;
  for (std::size_t b = 0; b < space.subset_count(); ++b) {
    const SubsetMask s(static_cast<std::uint32_t>(b));
    std::vector<Dist> rows;
    const std::size_t n = space.atom_count(s);
    if (s == z_mask) {
      for (std::size_t z = 0; z < n; ++z) {
        const auto law = potential_outcome_law(po, z);
        std::vector<double> xs(px.size());
        for (std::size_t x = 0; x < xs.size(); ++x) {
          const std::size_t coords[] = {z, x};
          xs[x] = pz[z] > kEpsNorm ? pzx[space.encode(z_mask | x_mask, coords)] / pz[z] : px[x];
        }
        std::vector<double> row(space.atom_count(), 0.0);
        for (std::size_t y = 0; y < law.size(); ++y) {
          for (std::size_t x = 0; x < xs.size(); ++x) {
            const std::size_t coords[] = {z, y, x};
            row[space.encode(space.all(), coords)] = law[y] * xs[x];
          }
        }
        rows.emplace_back(sp, space.all(), std::move(row));
      }
      mask.push_back({s, KernelOrigin::kMandatedOnY});
    } else {
      const Dist rest = marginal(p, space.all() - s);
      for (std::size_t r = 0; r < n; ++r) {
        const AtomIndex atom{s, r};
        if (marginal(p, s)[r] > kEpsNorm) {
          rows.push_back(condition(p, atom));
        } else {
          rows.push_back(product(dirac(sp, atom), rest));
        }
      }
      const bool axiom = s.empty() || s == space.all();
      mask.push_back({s, axiom ? KernelOrigin::kAxiom : KernelOrigin::kFilled});
    }
    kernels.emplace_back(sp, s, rows);
  }
  return CompiledPo{CausalSpace(std::move(p), CausalMechanism(sp, std::move(kernels))),
                    std::move(mask)};
}

}  // namespace causal
