#include "causal/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string_view>

#include "causal/error.hpp"

namespace causal {

namespace {

std::vector<double> checked_weights(std::vector<double> w, const char* what) {
  double sum = 0.0;
  for (double& x : w) {
    if (std::isnan(x) || x < -1e-12) {
      throw DomainError(std::string(what) + ": negative or NaN weight");
    }
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  if (!(std::abs(sum - 1.0) <= kRenormalizeTolerance)) {
    throw DomainError(std::string(what) + ": weights sum to " + std::to_string(sum) +
                      ", not 1");
  }
  // Drift below kEpsNorm is left alone so that serialized weights re-parse to
  // the same bits.
  if (std::abs(sum - 1.0) > kEpsNorm) {
    for (double& x : w) x /= sum;
  }
  return w;
}

}  // namespace

std::size_t max_components() {
  static const std::size_t cap = [] {
    std::size_t value = 12;
    if (const char* env = std::getenv("CAUSAL_SPACES_MAX_T"); env != nullptr && *env != '\0') {
      char* end = nullptr;
      const unsigned long parsed = std::strtoul(env, &end, 10);
      if (end != env && *end == '\0' && parsed >= 1) value = parsed;
    }
    return std::min<std::size_t>(value, 30);
  }();
  return cap;
}

// SubsetMask ----------------------------------------------------------------

SubsetMask SubsetMask::of(std::initializer_list<std::size_t> indices) {
  return of(std::span<const std::size_t>(indices.begin(), indices.size()));
}

SubsetMask SubsetMask::of(std::span<const std::size_t> indices) {
  std::uint32_t bits = 0;
  for (std::size_t t : indices) {
    if (t >= 32) throw DomainError("component index " + std::to_string(t) + " out of range");
    bits |= 1u << t;
  }
  return SubsetMask(bits);
}

std::size_t SubsetMask::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<std::size_t> SubsetMask::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < 32; ++t) {
    if (contains(t)) out.push_back(t);
  }
  return out;
}

std::string SubsetMask::to_string() const {
  std::string out;
  for (std::size_t t : indices()) {
    if (!out.empty()) out += ',';
    out += std::to_string(t);
  }
  return out;
}

SubsetMask expand_mask(SubsetMask outer, SubsetMask relative) {
  std::uint32_t bits = 0;
  std::size_t i = 0;
  for (std::size_t t : outer.indices()) {
    if (relative.contains(i)) bits |= 1u << t;
    ++i;
  }
  return SubsetMask(bits);
}

SubsetMask compress_mask(SubsetMask outer, SubsetMask absolute) {
  if (!absolute.is_subset_of(outer)) {
    throw DomainError("subset {" + absolute.to_string() + "} not inside {" + outer.to_string() + "}");
  }
  std::uint32_t bits = 0;
  std::size_t i = 0;
  for (std::size_t t : outer.indices()) {
    if (absolute.contains(t)) bits |= 1u << i;
    ++i;
  }
  return SubsetMask(bits);
}

// FiniteProductSpace --------------------------------------------------------

FiniteProductSpace::FiniteProductSpace(std::vector<Component> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw DomainError("a product space needs at least one component");
  if (components_.size() > max_components()) {
    throw DomainError("space has " + std::to_string(components_.size()) +
                      " components; the cap is " + std::to_string(max_components()));
  }
  std::set<std::string_view> names;
  for (const auto& c : components_) {
    if (c.outcomes.empty()) throw DomainError("component '" + c.name + "' has no outcomes");
    if (!names.insert(c.name).second) {
      throw DomainError("duplicate component name '" + c.name + "'");
    }
    std::set<std::string_view> labels(c.outcomes.begin(), c.outcomes.end());
    if (labels.size() != c.outcomes.size()) {
      throw DomainError("component '" + c.name + "' has duplicate outcome labels");
    }
  }
}

void FiniteProductSpace::check_mask(SubsetMask s) const {
  if (!s.is_subset_of(all())) {
    throw DomainError("subset {" + s.to_string() + "} is not a subset of T = {0.." +
                      std::to_string(dimension() - 1) + "}");
  }
}

std::size_t FiniteProductSpace::atom_count(SubsetMask s) const {
  check_mask(s);
  std::size_t count = 1;
  for (std::size_t t : s.indices()) count *= outcome_count(t);
  return count;
}

std::size_t FiniteProductSpace::stride(SubsetMask s, std::size_t t) const {
  std::size_t st = 1;
  for (std::size_t u = t + 1; u < dimension(); ++u) {
    if (s.contains(u)) st *= outcome_count(u);
  }
  return st;
}

std::vector<std::size_t> FiniteProductSpace::decode(SubsetMask s, std::size_t flat) const {
  const auto idx = s.indices();
  std::vector<std::size_t> coords(idx.size());
  if (flat >= atom_count(s)) throw DomainError("atom index out of range");
  for (std::size_t i = idx.size(); i-- > 0;) {
    const std::size_t k = outcome_count(idx[i]);
    coords[i] = flat % k;
    flat /= k;
  }
  return coords;
}

std::size_t FiniteProductSpace::encode(SubsetMask s, std::span<const std::size_t> coordinates) const {
  check_mask(s);
  const auto idx = s.indices();
  if (coordinates.size() != idx.size()) {
    throw DomainError("expected " + std::to_string(idx.size()) + " coordinates, got " +
                      std::to_string(coordinates.size()));
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const std::size_t k = outcome_count(idx[i]);
    if (coordinates[i] >= k) {
      throw DomainError("outcome index " + std::to_string(coordinates[i]) +
                        " out of range for component '" + components_[idx[i]].name + "'");
    }
    flat = flat * k + coordinates[i];
  }
  return flat;
}

std::vector<std::size_t> FiniteProductSpace::projection(SubsetMask from, SubsetMask to) const {
  if (!to.is_subset_of(from)) {
    throw DomainError("cannot project {" + from.to_string() + "} onto {" + to.to_string() + "}");
  }
  const std::size_t n = atom_count(from);
  std::vector<std::size_t> out(n, 0);
  for (std::size_t t : to.indices()) {
    const std::size_t sf = stride(from, t);
    const std::size_t st = stride(to, t);
    const std::size_t k = outcome_count(t);
    for (std::size_t a = 0; a < n; ++a) out[a] += ((a / sf) % k) * st;
  }
  return out;
}

std::vector<std::size_t> FiniteProductSpace::placement(SubsetMask part, SubsetMask whole) const {
  if (!part.is_subset_of(whole)) {
    throw DomainError("cannot place {" + part.to_string() + "} in {" + whole.to_string() + "}");
  }
  const std::size_t n = atom_count(part);
  std::vector<std::size_t> out(n, 0);
  for (std::size_t t : part.indices()) {
    const std::size_t sp = stride(part, t);
    const std::size_t sw = stride(whole, t);
    const std::size_t k = outcome_count(t);
    for (std::size_t a = 0; a < n; ++a) out[a] += ((a / sp) % k) * sw;
  }
  return out;
}

std::shared_ptr<const FiniteProductSpace> FiniteProductSpace::subspace(SubsetMask s) const {
  check_mask(s);
  if (s.empty()) throw DomainError("the empty subspace has no components");
  std::vector<Component> comps;
  for (std::size_t t : s.indices()) comps.push_back(components_[t]);
  return std::make_shared<const FiniteProductSpace>(std::move(comps));
}

std::optional<std::size_t> FiniteProductSpace::find_component(std::string_view name) const {
  for (std::size_t t = 0; t < components_.size(); ++t) {
    if (components_[t].name == name) return t;
  }
  return std::nullopt;
}

std::optional<std::size_t> FiniteProductSpace::find_outcome(std::size_t t, std::string_view label) const {
  const auto& outs = components_.at(t).outcomes;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (outs[i] == label) return i;
  }
  return std::nullopt;
}

std::string FiniteProductSpace::describe(AtomIndex atom) const {
  const auto coords = decode(atom.domain, atom.flat);
  const auto idx = atom.domain.indices();
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (!out.empty()) out += ',';
    out += components_[idx[i]].name + "=" + components_[idx[i]].outcomes[coords[i]];
  }
  return out.empty() ? "()" : out;
}

bool FiniteProductSpace::operator==(const FiniteProductSpace& other) const {
  if (components_.size() != other.components_.size()) return false;
  for (std::size_t t = 0; t < components_.size(); ++t) {
    if (components_[t].name != other.components_[t].name ||
        components_[t].outcomes != other.components_[t].outcomes) {
      return false;
    }
  }
  return true;
}

// Dist ----------------------------------------------------------------------

Dist::Dist(SpacePtr space, SubsetMask domain, std::vector<double> weights)
    : space_(std::move(space)), domain_(domain) {
  if (!space_) throw DomainError("distribution without a space");
  const std::size_t n = space_->atom_count(domain_);
  if (weights.size() != n) {
    throw DomainError("distribution on {" + domain_.to_string() + "} needs " + std::to_string(n) +
                      " weights, got " + std::to_string(weights.size()));
  }
  weights_ = checked_weights(std::move(weights), "distribution");
}

Dist Dist::uniform(SpacePtr space, SubsetMask domain) {
  const std::size_t n = space->atom_count(domain);
  return Dist(std::move(space), domain, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double Dist::probability(const Event& event) const {
  const auto ind = event.indicator(domain_);
  double p = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (ind[i]) p += weights_[i];
  }
  return p;
}

// Event ---------------------------------------------------------------------

Event::Event(SpacePtr space, SubsetMask domain, std::vector<char> members)
    : space_(std::move(space)), domain_(domain), members_(std::move(members)) {
  if (!space_) throw DomainError("event without a space");
  if (members_.size() != space_->atom_count(domain_)) {
    throw DomainError("event on {" + domain_.to_string() + "} has the wrong number of flags");
  }
}

Event Event::none(SpacePtr space) { return Event(std::move(space), SubsetMask(), {0}); }

Event Event::everything(SpacePtr space) { return Event(std::move(space), SubsetMask(), {1}); }

Event Event::atom(SpacePtr space, AtomIndex atom) {
  std::vector<char> members(space->atom_count(atom.domain), 0);
  members.at(atom.flat) = 1;
  return Event(std::move(space), atom.domain, std::move(members));
}

Event Event::rectangle(SpacePtr space,
                       const std::vector<std::optional<std::vector<std::size_t>>>& sides) {
  if (sides.size() != space->dimension()) {
    throw DomainError("rectangle needs one side per component");
  }
  std::uint32_t bits = 0;
  for (std::size_t t = 0; t < sides.size(); ++t) {
    if (sides[t]) bits |= 1u << t;
  }
  const SubsetMask domain(bits);
  const auto idx = domain.indices();
  std::vector<std::vector<char>> allowed;
  for (std::size_t t : idx) {
    std::vector<char> a(space->outcome_count(t), 0);
    for (std::size_t v : *sides[t]) a.at(v) = 1;
    allowed.push_back(std::move(a));
  }
  const std::size_t n = space->atom_count(domain);
  std::vector<char> members(n, 0);
  for (std::size_t flat = 0; flat < n; ++flat) {
    const auto coords = space->decode(domain, flat);
    bool in = true;
    for (std::size_t i = 0; i < idx.size() && in; ++i) in = allowed[i][coords[i]] != 0;
    members[flat] = in ? 1 : 0;
  }
  return Event(std::move(space), domain, std::move(members));
}

std::vector<char> Event::indicator(SubsetMask within) const {
  const auto proj = space_->projection(within, domain_);
  std::vector<char> out(proj.size());
  for (std::size_t i = 0; i < proj.size(); ++i) out[i] = members_[proj[i]];
  return out;
}

bool Event::is_empty() const {
  return std::none_of(members_.begin(), members_.end(), [](char c) { return c != 0; });
}

bool Event::is_everything() const {
  return std::all_of(members_.begin(), members_.end(), [](char c) { return c != 0; });
}

// Kernel --------------------------------------------------------------------

Kernel::Kernel(SpacePtr space, SubsetMask from, std::vector<double> rows)
    : space_(std::move(space)), from_(from) {
  if (!space_) throw DomainError("kernel without a space");
  row_count_ = space_->atom_count(from_);
  row_size_ = space_->atom_count();
  if (rows.size() != row_count_ * row_size_) {
    throw DomainError("kernel from {" + from_.to_string() + "} needs " +
                      std::to_string(row_count_) + " rows of " + std::to_string(row_size_));
  }
  rows_.reserve(rows.size());
  for (std::size_t r = 0; r < row_count_; ++r) {
    std::vector<double> row(rows.begin() + static_cast<std::ptrdiff_t>(r * row_size_),
                            rows.begin() + static_cast<std::ptrdiff_t>((r + 1) * row_size_));
    row = checked_weights(std::move(row), "kernel row");
    rows_.insert(rows_.end(), row.begin(), row.end());
  }
}

Kernel::Kernel(SpacePtr space, SubsetMask from, const std::vector<Dist>& rows)
    : space_(std::move(space)), from_(from) {
  row_count_ = space_->atom_count(from_);
  row_size_ = space_->atom_count();
  if (rows.size() != row_count_) throw DomainError("wrong number of kernel rows");
  rows_.reserve(row_count_ * row_size_);
  for (const auto& d : rows) {
    if (d.domain() != space_->all()) throw DomainError("kernel rows must be measures on Omega");
    rows_.insert(rows_.end(), d.weights().begin(), d.weights().end());
  }
}

Dist Kernel::row_dist(std::size_t flat_from) const {
  const auto r = row(flat_from);
  return Dist(space_, space_->all(), std::vector<double>(r.begin(), r.end()));
}

double Kernel::apply(std::size_t flat_from, std::span<const char> cylinder) const {
  const auto r = row(flat_from);
  double p = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (cylinder[i]) p += r[i];
  }
  return p;
}

double Kernel::apply(std::size_t flat_from, const Event& event) const {
  return apply(flat_from, event.cylinder());
}

double Kernel::determinism_defect() const {
  const auto proj = space_->projection(space_->all(), from_);
  double worst = 0.0;
  for (std::size_t r = 0; r < row_count_; ++r) {
    const auto w = row(r);
    double off = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (proj[i] != r) off += w[i];
    }
    worst = std::max(worst, off);
  }
  return worst;
}

// Operations ----------------------------------------------------------------

Dist marginal(const Dist& d, SubsetMask s) {
  const auto& space = d.space();
  const auto proj = space->projection(d.domain(), s);
  std::vector<double> out(space->atom_count(s), 0.0);
  for (std::size_t i = 0; i < proj.size(); ++i) out[proj[i]] += d[i];
  return Dist(space, s, std::move(out));
}

Dist condition(const Dist& d, AtomIndex atom) {
  const auto& space = d.space();
  if (!atom.domain.is_subset_of(d.domain())) {
    throw DomainError("conditioning atom on {" + atom.domain.to_string() +
                      "} outside distribution domain {" + d.domain().to_string() + "}");
  }
  const auto proj = space->projection(d.domain(), atom.domain);
  double mass = 0.0;
  for (std::size_t i = 0; i < proj.size(); ++i) {
    if (proj[i] == atom.flat) mass += d[i];
  }
  if (mass <= kEpsNorm) {
    throw NullSetError("conditioning on " + space->describe(atom) + " which has mass " +
                       std::to_string(mass));
  }
  std::vector<double> out(proj.size(), 0.0);
  for (std::size_t i = 0; i < proj.size(); ++i) {
    if (proj[i] == atom.flat) out[i] = d[i] / mass;
  }
  return Dist(space, d.domain(), std::move(out));
}

Dist product(const Dist& a, const Dist& b) {
  const auto& space = a.space();
  if (!(*space == *b.space())) throw DomainError("product of distributions on different spaces");
  if (a.domain().intersects(b.domain())) {
    throw DomainError("product domains {" + a.domain().to_string() + "} and {" +
                      b.domain().to_string() + "} overlap");
  }
  const SubsetMask whole = a.domain() | b.domain();
  const auto pa = space->placement(a.domain(), whole);
  const auto pb = space->placement(b.domain(), whole);
  std::vector<double> out(space->atom_count(whole), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[pa[i] + pb[j]] = a[i] * b[j];
  }
  return Dist(space, whole, std::move(out));
}

Dist bind(const Dist& q, const Kernel& k) {
  if (q.domain() != k.from()) {
    throw DomainError("binding a measure on {" + q.domain().to_string() + "} to a kernel from {" +
                      k.from().to_string() + "}");
  }
  std::vector<double> out(k.row_size(), 0.0);
  for (std::size_t r = 0; r < k.row_count(); ++r) {
    const double w = q[r];
    if (w == 0.0) continue;
    const auto row = k.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) out[i] += w * row[i];
  }
  return Dist(k.space(), k.space()->all(), std::move(out));
}

Dist dirac(SpacePtr space, AtomIndex atom) {
  std::vector<double> w(space->atom_count(atom.domain), 0.0);
  w.at(atom.flat) = 1.0;
  return Dist(std::move(space), atom.domain, std::move(w));
}

double max_abs_difference(const Dist& a, const Dist& b) {
  if (a.domain() != b.domain() || a.size() != b.size()) {
    throw DomainError("comparing distributions on different domains");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double total_variation(const Dist& a, const Dist& b) {
  if (a.domain() != b.domain() || a.size() != b.size()) {
    throw DomainError("comparing distributions on different domains");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

bool approx_equal(const Dist& a, const Dist& b, double tolerance) {
  return a.domain() == b.domain() && max_abs_difference(a, b) <= tolerance;
}

double mutual_information(const Dist& d, SubsetMask s) {
  const SubsetMask rest = d.domain() - s;
  const Dist ms = marginal(d, s);
  const Dist mr = marginal(d, rest);
  const auto& space = d.space();
  const auto ps = space->projection(d.domain(), s);
  const auto pr = space->projection(d.domain(), rest);
  double mi = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0) mi += d[i] * std::log(d[i] / (ms[ps[i]] * mr[pr[i]]));
  }
  return mi;
}

}  // namespace causal
