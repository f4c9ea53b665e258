#include "causal/document.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>

#include "causal/error.hpp"
#include "causal/gaussian.hpp"

namespace causal {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string_view strip_brackets(std::string_view s, char open, char close) {
  s = trim(s);
  if (!s.empty() && s.front() == open) {
    if (s.back() != close) throw ParseError("", std::string("unbalanced '") + open + "'");
    s = trim(s.substr(1, s.size() - 2));
  }
  return s;
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where.empty() ? "/" : where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "/" + key, "missing field");
  return *it;
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(where + "/" + std::to_string(i), "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

std::vector<std::string> strings(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw ParseError(where + "/" + std::to_string(i), "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

std::vector<std::size_t> indices(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array of indices");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer() || j[i].get<std::int64_t>() < 0) {
      throw ParseError(where + "/" + std::to_string(i), "expected a nonnegative integer");
    }
    out.push_back(j[i].get<std::size_t>());
  }
  return out;
}

/// Builds a value whose constructor validates, reporting failures at where.
template <class F>
auto located(const std::string& where, F&& make) {
  try {
    return make();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(where, e.what());
  }
}

std::size_t parse_index(std::string_view s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("", "'" + std::string(s) + "' is not an index");
  }
  return v;
}

bool is_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

json moments(const GaussianMeasure& m, std::size_t i) {
  return json{{"mean", m.mean(Eigen::Index(i))}, {"var", m.cov(Eigen::Index(i), Eigen::Index(i))}};
}

std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
}

DocumentKind document_kind(const json& doc) {
  if (doc.is_object() && doc.contains("variables")) return DocumentKind::kScm;
  if (doc.is_object() && doc.contains("treatments")) return DocumentKind::kPo;
  return DocumentKind::kSpace;
}

CausalSpace space_from_json(const json& doc) {
  const json& comps = field(doc, "components", "");
  if (!comps.is_array()) throw ParseError("/components", "expected an array");
  std::vector<Component> components;
  for (std::size_t t = 0; t < comps.size(); ++t) {
    const std::string where = "/components/" + std::to_string(t);
    const json& name = field(comps[t], "name", where);
    if (!name.is_string()) throw ParseError(where + "/name", "expected a string");
    components.push_back(
        {name.get<std::string>(), strings(field(comps[t], "outcomes", where), where + "/outcomes")});
  }
  const SpacePtr sp = located("/components", [&] {
    return std::make_shared<const FiniteProductSpace>(std::move(components));
  });
  const auto& space = *sp;
  const Dist p = located("/p", [&] {
    auto w = numbers(field(doc, "p", ""), "/p");
    if (w.size() != space.atom_count()) {
      throw ParseError("/p", "expected " + std::to_string(space.atom_count()) + " weights, got " +
                                 std::to_string(w.size()));
    }
    return Dist(sp, space.all(), std::move(w));
  });

  if (doc.contains("mechanism")) {
    const json& m = doc["mechanism"];
    if (m != "conditionals") throw ParseError("/mechanism", "only \"conditionals\" is supported");
    if (doc.contains("kernels")) throw ParseError("/kernels", "conflicts with /mechanism");
    return CausalSpace(p, located("/mechanism", [&] { return mechanism_from_conditionals(p); }));
  }

  const json& ks = field(doc, "kernels", "");
  if (!ks.is_object()) throw ParseError("/kernels", "expected an object keyed by subsets");
  std::map<std::uint32_t, Kernel> parsed;
  for (const auto& [key, rows] : ks.items()) {
    const std::string where = "/kernels/" + key;
    const SubsetMask s = located(where, [&] { return parse_subset(space, key); });
    if (key != s.to_string()) {
      throw ParseError(where, "subset keys are sorted index lists such as \"" + s.to_string() + "\"");
    }
    if (!rows.is_array() || rows.size() != space.atom_count(s)) {
      throw ParseError(where, "expected " + std::to_string(space.atom_count(s)) + " rows");
    }
    std::vector<double> data;
    data.reserve(rows.size() * space.atom_count());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::string rw = where + "/" + std::to_string(r);
      auto row = numbers(rows[r], rw);
      if (row.size() != space.atom_count()) {
        throw ParseError(rw, "expected " + std::to_string(space.atom_count()) + " weights");
      }
      const Dist d = located(rw, [&] { return Dist(sp, space.all(), std::move(row)); });
      data.insert(data.end(), d.weights().begin(), d.weights().end());
    }
    parsed.emplace(s.bits(), Kernel(sp, s, std::move(data)));
  }

  std::vector<Kernel> kernels;
  kernels.reserve(space.subset_count());
  for (std::size_t b = 0; b < space.subset_count(); ++b) {
    const SubsetMask s(static_cast<std::uint32_t>(b));
    if (auto it = parsed.find(s.bits()); it != parsed.end()) {
      kernels.push_back(it->second);
    } else if (s.empty()) {
      kernels.emplace_back(sp, s, std::vector<Dist>{p});
    } else if (s == space.all()) {
      std::vector<Dist> rows;
      for (std::size_t i = 0; i < space.atom_count(); ++i) rows.push_back(dirac(sp, {s, i}));
      kernels.emplace_back(sp, s, rows);
    } else {
      throw ParseError("/kernels", "missing kernel for subset \"" + s.to_string() + "\"");
    }
  }
  return CausalSpace(p, CausalMechanism(sp, std::move(kernels)));
}

json space_to_json(const CausalSpace& cs) {
  const auto& space = *cs.space();
  json doc;
  doc["components"] = json::array();
  for (const auto& c : space.components()) {
    doc["components"].push_back({{"name", c.name}, {"outcomes", c.outcomes}});
  }
  doc["p"] = std::vector<double>(cs.p().weights().begin(), cs.p().weights().end());
  json ks = json::object();
  for (const auto& k : cs.mechanism().kernels()) {
    json rows = json::array();
    for (std::size_t r = 0; r < k.row_count(); ++r) {
      const auto row = k.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    ks[k.from().to_string()] = std::move(rows);
  }
  doc["kernels"] = std::move(ks);
  return doc;
}

ScmSpec scm_from_json(const json& doc) {
  const json& vars = field(doc, "variables", "");
  if (!vars.is_array()) throw ParseError("/variables", "expected an array");
  ScmSpec scm;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const std::string where = "/variables/" + std::to_string(j);
    const json& v = vars[j];
    const json& name = field(v, "name", where);
    if (!name.is_string()) throw ParseError(where + "/name", "expected a string");
    names.push_back(name.get<std::string>());
  }
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const std::string where = "/variables/" + std::to_string(j);
    const json& v = vars[j];
    ScmVariable var;
    var.name = names[j];
    var.domain = strings(field(v, "domain", where), where + "/domain");
    var.noise = v.contains("noise") ? numbers(v["noise"], where + "/noise") : std::vector<double>{1.0};
    if (v.contains("parents")) {
      const auto ps = strings(v["parents"], where + "/parents");
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto it = std::find(names.begin(), names.end(), ps[i]);
        if (it == names.end()) {
          throw ParseError(where + "/parents/" + std::to_string(i), "unknown variable '" + ps[i] + "'");
        }
        var.parents.push_back(static_cast<std::size_t>(it - names.begin()));
      }
    }
    var.table = indices(field(v, "table", where), where + "/table");
    scm.variables.push_back(std::move(var));
  }
  return scm;
}

json scm_to_json(const ScmSpec& scm) {
  json vars = json::array();
  for (const auto& v : scm.variables) {
    std::vector<std::string> parents;
    for (std::size_t p : v.parents) parents.push_back(scm.variables.at(p).name);
    vars.push_back({{"name", v.name},
                    {"domain", v.domain},
                    {"noise", v.noise},
                    {"parents", parents},
                    {"table", v.table}});
  }
  return json{{"variables", vars}};
}

PoSpec po_from_json(const json& doc) {
  PoSpec po;
  po.treatments = strings(field(doc, "treatments", ""), "/treatments");
  po.outcomes = strings(field(doc, "outcomes", ""), "/outcomes");
  if (doc.contains("covariates")) po.covariates = strings(doc["covariates"], "/covariates");
  if (doc.contains("outcome_scores")) {
    po.outcome_scores = numbers(doc["outcome_scores"], "/outcome_scores");
  }
  po.joint = numbers(field(doc, "joint", ""), "/joint");
  return po;
}

json po_to_json(const PoSpec& po) {
  json doc{{"treatments", po.treatments}, {"outcomes", po.outcomes}, {"joint", po.joint}};
  if (!po.covariates.empty()) doc["covariates"] = po.covariates;
  if (!po.outcome_scores.empty()) doc["outcome_scores"] = po.outcome_scores;
  return doc;
}

json po_mask_to_json(const CompiledPo& compiled) {
  json ks = json::object();
  for (const auto& m : compiled.mask) ks[m.subset.to_string()] = to_string(m.origin);
  std::vector<std::string> names;
  for (const auto& c : compiled.space.space()->components()) names.push_back(c.name);
  return json{{"components", names}, {"kernels", ks}};
}

CausalSpace load_any(const json& doc) {
  switch (document_kind(doc)) {
    case DocumentKind::kScm: {
      const ScmSpec scm = scm_from_json(doc);
      return located("/variables", [&] { return compile_scm(scm); });
    }
    case DocumentKind::kPo: {
      const PoSpec po = po_from_json(doc);
      return located("", [&] { return compile_po(po).space; });
    }
    case DocumentKind::kSpace: break;
  }
  return space_from_json(doc);
}

json report_to_json(const ValidationReport& report, const FiniteProductSpace& space) {
  json vs = json::array();
  for (const auto& v : report.violations) {
    vs.push_back({{"axiom", v.kind == Violation::Kind::kTrivialIntervention ? "i" : "ii"},
                  {"subset", v.subset.to_string()},
                  {"atom", space.describe(v.atom)},
                  {"event", v.event},
                  {"expected", v.expected},
                  {"actual", v.actual}});
  }
  return json{{"valid", report.valid()}, {"violations", vs}};
}

json adjustment_to_json(const AdjustmentReport& report) {
  return json{{"estimate", report.estimate},     {"trusted", report.trusted},
              {"condition_i", report.condition_i}, {"case_a", report.case_a},
              {"case_b", report.case_b},           {"case_c", report.case_c},
              {"notes", report.notes}};
}

SubsetMask parse_subset(const FiniteProductSpace& space, std::string_view text) {
  const std::string_view body = strip_brackets(text, '[', ']');
  if (body.empty()) return SubsetMask();
  std::uint32_t bits = 0;
  for (std::string_view tok : split(body, ',')) {
    tok = trim(tok);
    std::size_t t;
    if (is_digits(tok)) {
      t = parse_index(tok);
      if (t >= space.dimension()) {
        throw ParseError("", "component index " + std::string(tok) + " out of range");
      }
    } else {
      const auto found = space.find_component(tok);
      if (!found) throw ParseError("", "unknown component '" + std::string(tok) + "'");
      t = *found;
    }
    bits |= 1u << t;
  }
  return SubsetMask(bits);
}

Event parse_event(const SpacePtr& space, std::string_view text) {
  std::vector<std::optional<std::vector<std::size_t>>> sides(space->dimension());
  if (trim(text).empty()) return Event::everything(space);
  std::size_t offset = 0;
  for (std::string_view pred : split(text, '&')) {
    const std::string where = "event offset " + std::to_string(offset);
    offset += pred.size() + 1;
    pred = trim(pred);
    std::string_view name;
    std::vector<std::string_view> values;
    if (const auto eq = pred.find('='); eq != std::string_view::npos) {
      name = trim(pred.substr(0, eq));
      values.push_back(trim(pred.substr(eq + 1)));
    } else if (const auto in = pred.find(" in "); in != std::string_view::npos) {
      name = trim(pred.substr(0, in));
      const std::string_view set = trim(pred.substr(in + 4));
      if (set.empty() || set.front() != '{' || set.back() != '}') {
        throw ParseError(where, "expected '{a,b,...}' after 'in'");
      }
      const std::string_view inner = trim(set.substr(1, set.size() - 2));
      if (!inner.empty()) {
        for (std::string_view v : split(inner, ',')) values.push_back(trim(v));
      }
    } else {
      throw ParseError(where, "expected 'name=value' or 'name in {..}', got '" + std::string(pred) + "'");
    }
    const auto t = space->find_component(name);
    if (!t) throw ParseError(where, "unknown component '" + std::string(name) + "'");
    std::vector<std::size_t> allowed;
    for (std::string_view v : values) {
      const auto o = space->find_outcome(*t, v);
      if (!o) {
        throw ParseError(where, "'" + std::string(v) + "' is not an outcome of " + std::string(name));
      }
      allowed.push_back(*o);
    }
    std::sort(allowed.begin(), allowed.end());
    if (sides[*t]) {
      std::vector<std::size_t> both;
      std::set_intersection(sides[*t]->begin(), sides[*t]->end(), allowed.begin(), allowed.end(),
                            std::back_inserter(both));
      allowed = std::move(both);
    }
    sides[*t] = std::move(allowed);
  }
  return Event::rectangle(space, sides);
}

AtomIndex parse_atom(const FiniteProductSpace& space, SubsetMask u, std::string_view text) {
  const auto idx = u.indices();
  const std::string_view body = strip_brackets(text, '[', ']');
  std::vector<std::string_view> labels;
  if (!body.empty()) labels = split(body, ',');
  if (labels.size() != idx.size()) {
    throw ParseError("", "atom needs " + std::to_string(idx.size()) + " outcome labels, got " +
                             std::to_string(labels.size()));
  }
  std::vector<std::size_t> coords;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto label = trim(labels[i]);
    const auto o = space.find_outcome(idx[i], label);
    if (!o) {
      throw ParseError("", "'" + std::string(label) + "' is not an outcome of " +
                               space.component(idx[i]).name);
    }
    coords.push_back(*o);
  }
  return space.atom(u, coords);
}

std::vector<double> parse_weights(std::string_view text) {
  const std::string_view body = strip_brackets(text, '[', ']');
  std::vector<double> out;
  if (body.empty()) return out;
  for (std::string_view tok : split(body, ',')) {
    tok = trim(tok);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError("", "'" + std::string(tok) + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

// Demos ----------------------------------------------------------------------

std::string brownian_demo_csv(std::size_t steps, double horizon, double at, double value) {
  const GaussianSpace grid = brownian_grid(steps, horizon);
  const auto times = brownian_times(steps, horizon);
  std::size_t k = steps;
  const double tol = 1e-9 * std::max(1.0, horizon);
  for (std::size_t i = 0; i < steps; ++i) {
    if (std::abs(times[i] - at) <= tol) k = i;
  }
  if (k == steps) throw DomainError("time " + std::to_string(at) + " is not a grid point");
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(1, value);
  const GaussianMeasure done = g_intervene(grid, {k}, GaussianMeasure::dirac(v));
  const GaussianMeasure cond = g_condition(grid.p(), {k}, v);
  std::string out = "time,mean_intervened,var_intervened,mean_conditioned,var_conditioned\r\n";
  for (std::size_t i = 0; i < steps; ++i) {
    const auto e = Eigen::Index(i);
    out += csv_number(times[i]) + "," + csv_number(done.mean(e)) + "," +
           csv_number(done.cov(e, e)) + "," + csv_number(cond.mean(e)) + "," +
           csv_number(cond.cov(e, e)) + "\r\n";
  }
  return out;
}

json altitude_demo_json() {
  const GaussianSpace gs = altitude_temperature();
  const Eigen::VectorXd at = Eigen::VectorXd::Constant(1, 1000.0);
  json out;
  out["do_altitude_1000"] = moments(g_intervene(gs, {0}, GaussianMeasure::dirac(at)), 1);
  out["condition_altitude_1000"] = moments(g_condition(gs.p(), {0}, at), 1);
  json temps = json::array();
  const double means[] = {-5.0, 10.0, 25.0};
  const double vars[] = {0.0, 1.0, 4.0};
  for (std::size_t i = 0; i < 3; ++i) {
    GaussianMeasure q{Eigen::VectorXd::Constant(1, means[i]), Eigen::MatrixXd::Constant(1, 1, vars[i])};
    temps.push_back({{"q", {{"mean", means[i]}, {"var", vars[i]}}},
                     {"altitude", moments(g_intervene(gs, {1}, q), 0)}});
  }
  out["do_temperature"] = std::move(temps);
  out["kernel_altitude_1200"] =
      moments(gs.kernel({0}).row(Eigen::VectorXd::Constant(1, 1200.0)), 1);
  out["valid"] = validate_gaussian(gs, default_check_subsets(2)).valid();
  return out;
}

json rice_demo_json() {
  const GaussianSpace gs = rice_market();
  json out;
  out["do_amount_3"] =
      json{{"price", moments(g_intervene(gs, {0}, GaussianMeasure::dirac(Eigen::VectorXd::Constant(1, 3.0))), 1)}};
  out["do_price_6"] =
      json{{"amount", moments(g_intervene(gs, {1}, GaussianMeasure::dirac(Eigen::VectorXd::Constant(1, 6.0))), 0)}};
  out["valid"] = validate_gaussian(gs, default_check_subsets(2)).valid();
  return out;
}

}  // namespace causal
