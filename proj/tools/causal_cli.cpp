// Command-line front end over the C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "causal_spaces.h"
#include "json.hpp"

using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kSemantic = 1;
constexpr int kUsage = 2;

/// Carries an exit code out of a command.
struct Exit {
  int code;
};

int exit_code(cs_status st) {
  switch (st) {
    case CS_OK: return kOk;
    case CS_ERR_ARGUMENT:
    case CS_ERR_PARSE:
    case CS_ERR_DOMAIN: return kUsage;
    default: return kSemantic;
  }
}

void check(cs_status st) {
  if (st == CS_OK) return;
  std::cerr << "error: " << cs_last_error() << "\n";
  throw Exit{exit_code(st)};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  cs_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    throw Exit{kUsage};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    throw Exit{kUsage};
  }
}

class Space {
 public:
  explicit Space(const std::string& path) { check(cs_space_load(read_file(path).c_str(), &s_)); }
  explicit Space(cs_space* s) : s_(s) {}
  Space(const Space&) = delete;
  Space& operator=(const Space&) = delete;
  ~Space() { cs_space_free(s_); }
  cs_space* get() const { return s_; }

  std::vector<double> weights() const {
    std::size_t len = 0;
    cs_space_weights(s_, nullptr, 0, &len);
    std::vector<double> w(len);
    check(cs_space_weights(s_, w.data(), w.size(), &len));
    return w;
  }

 private:
  cs_space* s_ = nullptr;
};

/// Q from either --dirac labels or --q weights; the empty U defaults to [1].
std::vector<double> intervention_weights(const Space& s, const std::string& on,
                                         const std::string& dirac, const std::string& q) {
  if (!dirac.empty() && !q.empty()) {
    std::cerr << "error: --dirac and --q are exclusive\n";
    throw Exit{kUsage};
  }
  std::size_t n = 0;
  check(cs_space_atom_count(s.get(), on.c_str(), &n));
  if (!q.empty()) {
    json arr;
    try {
      const std::string text = q.front() == '[' ? q : "[" + q + "]";
      arr = json::parse(text);
      return arr.get<std::vector<double>>();
    } catch (const std::exception&) {
      std::cerr << "error: --q expects comma separated numbers\n";
      throw Exit{kUsage};
    }
  }
  if (dirac.empty() && n != 1) {
    std::cerr << "error: give --dirac or --q for a nonempty --on\n";
    throw Exit{kUsage};
  }
  std::vector<double> w(n);
  std::size_t len = 0;
  check(cs_space_dirac(s.get(), on.c_str(), dirac.c_str(), w.data(), w.size(), &len));
  return w;
}

const char* effect_name(cs_effect e) {
  switch (e) {
    case CS_EFFECT_NONE: return "NONE";
    case CS_EFFECT_ACTIVE: return "ACTIVE";
    case CS_EFFECT_DORMANT: return "DORMANT";
  }
  return "?";
}

std::string mask_path_for(const std::string& out) {
  for (const char* suffix : {".space.json", ".json"}) {
    const std::string sfx = suffix;
    if (out.size() > sfx.size() && out.compare(out.size() - sfx.size(), sfx.size(), sfx) == 0) {
      return out.substr(0, out.size() - sfx.size()) + ".mask.json";
    }
  }
  return out + ".mask.json";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal spaces: validation, interventions, effects and demos"};
  app.require_subcommand(1);

  std::string path, on, dirac, q, u, v, event, given, out, mask;
  std::vector<std::string> queries;
  bool hard = false;

  auto* validate = app.add_subcommand("validate", "Check the two causal-space axioms");
  validate->add_option("path", path, "space, SCM or PO document")->required();

  auto* dump = app.add_subcommand("dump", "Print the space document (SCM and PO documents are compiled)");
  dump->add_option("path", path)->required();

  auto* doit = app.add_subcommand("do", "Intervene and print the intervention measure");
  doit->add_option("path", path)->required();
  doit->add_option("--on", on, "intervened components, e.g. 0,2 or []")->required();
  doit->add_option("--dirac", dirac, "outcome labels of the intervened atom");
  doit->add_option("--q", q, "weights of Q over the intervened atoms");
  doit->add_flag("--hard", hard, "use the hard-intervention closed form");
  doit->add_option("--query", queries, "event expressions to evaluate");

  auto* classify = app.add_subcommand("classify", "Classify the causal effect of H_U on an event");
  classify->add_option("path", path)->required();
  classify->add_option("--u", u)->required();
  classify->add_option("--event", event)->required();
  classify->add_option("--given", given, "decide 'no causal effect given H_V' instead");

  auto* compile = app.add_subcommand("compile", "Compile an SCM or PO document to a space document");
  compile->add_option("path", path)->required();
  compile->add_option("--out", out)->required();
  compile->add_option("--mask", mask, "provenance mask path for PO documents");

  auto* adjust = app.add_subcommand("adjust", "Adjustment estimate of an intervention from P and Q");
  adjust->add_option("path", path)->required();
  adjust->add_option("--u", u)->required();
  adjust->add_option("--v", v)->required();
  adjust->add_option("--dirac", dirac);
  adjust->add_option("--q", q);
  adjust->add_option("--event", event)->required();

  auto* source = app.add_subcommand("source", "Is H_U a source of an event (or of everything)");
  source->add_option("path", path)->required();
  source->add_option("--u", u)->required();
  source->add_option("--event", event);

  auto* demo = app.add_subcommand("demo", "Gaussian examples");
  demo->require_subcommand(1);
  std::size_t steps = 100;
  double horizon = 2.0, at = 1.0, value = 0.0;
  auto* brownian = demo->add_subcommand("brownian", "Intervening versus conditioning on a Brownian path");
  brownian->add_option("--steps", steps)->capture_default_str();
  brownian->add_option("--horizon", horizon)->capture_default_str();
  brownian->add_option("--at", at)->capture_default_str();
  brownian->add_option("--value", value)->capture_default_str();
  auto* altitude = demo->add_subcommand("altitude", "Altitude and temperature");
  auto* rice = demo->add_subcommand("rice", "Cyclic rice market");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) {
      Space s(path);
      int valid = 0;
      char* report = nullptr;
      check(cs_space_validate(s.get(), &valid, &report));
      std::cout << take(report) << "\n";
      return valid ? kOk : kSemantic;
    }
    if (*dump) {
      Space s(path);
      char* doc = nullptr;
      check(cs_space_to_json(s.get(), &doc));
      std::cout << take(doc) << "\n";
      return kOk;
    }
    if (*doit) {
      Space s(path);
      const auto w = intervention_weights(s, on, dirac, q);
      cs_space* raw = nullptr;
      check(cs_space_intervene(s.get(), on.c_str(), w.data(), w.size(), hard ? 1 : 0, &raw));
      Space done(raw);
      json result{{"on", on}, {"hard", hard}, {"p", done.weights()}};
      json qs = json::object();
      for (const auto& expr : queries) {
        double prob = 0.0;
        check(cs_space_probability(done.get(), expr.c_str(), &prob));
        qs[expr] = prob;
      }
      result["queries"] = qs;
      std::cout << result.dump(2) << "\n";
      return kOk;
    }
    if (*classify) {
      Space s(path);
      json result{{"u", u}, {"event", event}};
      if (classify->count("--given")) {
        int none = 0;
        check(cs_space_no_effect_given(s.get(), u.c_str(), given.c_str(), event.c_str(), &none));
        result["given"] = given;
        result["no_effect_given"] = none != 0;
      } else {
        cs_effect e = CS_EFFECT_NONE;
        check(cs_space_classify(s.get(), u.c_str(), event.c_str(), &e));
        result["effect"] = effect_name(e);
      }
      std::cout << result.dump(2) << "\n";
      return kOk;
    }
    if (*compile) {
      cs_space* raw = nullptr;
      char* mask_json = nullptr;
      check(cs_space_compile(read_file(path).c_str(), &raw, &mask_json));
      Space s(raw);
      char* doc = nullptr;
      check(cs_space_to_json(s.get(), &doc));
      write_file(out, take(doc) + "\n");
      json result{{"out", out}};
      if (mask_json) {
        const std::string mp = mask.empty() ? mask_path_for(out) : mask;
        write_file(mp, take(mask_json) + "\n");
        result["mask"] = mp;
      }
      std::cout << result.dump(2) << "\n";
      return kOk;
    }
    if (*adjust) {
      Space s(path);
      const auto w = intervention_weights(s, u, dirac, q);
      char* report = nullptr;
      check(cs_space_adjust(s.get(), u.c_str(), v.c_str(), w.data(), w.size(), event.c_str(), &report));
      const json rep = json::parse(take(report));
      std::cout << rep.dump(2) << "\n";
      return rep.at("trusted").get<bool>() ? kOk : kSemantic;
    }
    if (*source) {
      Space s(path);
      int src = 0;
      check(cs_space_is_source(s.get(), u.c_str(), source->count("--event") ? event.c_str() : nullptr, &src));
      std::cout << json{{"u", u}, {"source", src != 0}}.dump(2) << "\n";
      return kOk;
    }
    if (*brownian) {
      char* csv = nullptr;
      check(cs_demo_brownian(steps, horizon, at, value, &csv));
      std::cout << take(csv);
      return kOk;
    }
    if (*altitude || *rice) {
      char* doc = nullptr;
      check(*altitude ? cs_demo_altitude(&doc) : cs_demo_rice(&doc));
      std::cout << take(doc) << "\n";
      return kOk;
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return kUsage;
}
