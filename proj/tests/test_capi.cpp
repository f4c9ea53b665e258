#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "causal_spaces.h"
#include "doctest.h"
#include "json.hpp"

using doctest::Approx;
using nlohmann::json;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(CS_FIXTURES) + "/" + name);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Space {
  cs_space* ptr = nullptr;
  ~Space() { cs_space_free(ptr); }
};

struct Str {
  char* ptr = nullptr;
  ~Str() { cs_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

std::vector<double> weights(const cs_space* s) {
  size_t len = 0;
  cs_space_weights(s, nullptr, 0, &len);
  std::vector<double> w(len);
  REQUIRE(cs_space_weights(s, w.data(), w.size(), &len) == CS_OK);
  return w;
}

void load(const std::string& fixture, Space& out) {
  REQUIRE(cs_space_load(read_fixture(fixture).c_str(), &out.ptr) == CS_OK);
}

}  // namespace

TEST_CASE("version and errors") {
  CHECK(std::strlen(cs_version()) > 0);
  cs_space* s = nullptr;
  CHECK(cs_space_load("{\"components\": [", &s) == CS_ERR_PARSE);
  CHECK(std::string(cs_last_error()).find("byte") != std::string::npos);
  CHECK(s == nullptr);
  CHECK(cs_space_load(nullptr, &s) == CS_ERR_ARGUMENT);
  Space ok;
  load("xor.scm.json", ok);
  CHECK(std::string(cs_last_error()).empty());
  cs_space_free(nullptr);
}

TEST_CASE("load, weights and round trip") {
  Space s;
  load("xor.scm.json", s);
  size_t n = 0;
  CHECK(cs_space_dimension(s.ptr, &n) == CS_OK);
  CHECK(n == 2);
  CHECK(cs_space_atom_count(s.ptr, "0", &n) == CS_OK);
  CHECK(n == 2);
  const auto w = weights(s.ptr);
  CHECK(w == std::vector<double>{.45, .05, .05, .45});

  double small[2];
  size_t len = 0;
  CHECK(cs_space_weights(s.ptr, small, 2, &len) == CS_ERR_ARGUMENT);
  CHECK(len == 4);

  Str text;
  REQUIRE(cs_space_to_json(s.ptr, &text.ptr) == CS_OK);
  Space back;
  REQUIRE(cs_space_load(text.ptr, &back.ptr) == CS_OK);
  const auto w2 = weights(back.ptr);
  CHECK(std::memcmp(w.data(), w2.data(), w.size() * sizeof(double)) == 0);
  int valid = 0;
  CHECK(cs_space_validate(back.ptr, &valid, nullptr) == CS_OK);
  CHECK(valid == 1);
}

TEST_CASE("interventions") {
  Space s;
  load("xor.scm.json", s);
  double q[2];
  size_t len = 0;
  REQUIRE(cs_space_dirac(s.ptr, "0", "1", q, 2, &len) == CS_OK);
  CHECK(q[0] == 0.0);
  CHECK(q[1] == 1.0);
  for (int hard : {0, 1}) {
    Space after;
    REQUIRE(cs_space_intervene(s.ptr, "0", q, 2, hard, &after.ptr) == CS_OK);
    double p = 0;
    REQUIRE(cs_space_probability(after.ptr, "Y=1", &p) == CS_OK);
    CHECK(p == Approx(0.9));
  }
  Space none;
  const double one[1] = {1.0};
  REQUIRE(cs_space_intervene(s.ptr, "[]", one, 1, 0, &none.ptr) == CS_OK);
  CHECK(weights(none.ptr) == weights(s.ptr));

  const double bad[2] = {.5, .6};
  Space tmp;
  CHECK(cs_space_intervene(s.ptr, "0", bad, 2, 0, &tmp.ptr) == CS_ERR_DOMAIN);
  CHECK(cs_space_intervene(s.ptr, "0", q, 1, 0, &tmp.ptr) == CS_ERR_DOMAIN);
  CHECK(cs_space_intervene(s.ptr, "7", q, 2, 0, &tmp.ptr) == CS_ERR_PARSE);
  CHECK(cs_space_dirac(s.ptr, "0", "2", q, 2, &len) == CS_ERR_PARSE);
  double p = 0;
  CHECK(cs_space_probability(s.ptr, "Y>0", &p) == CS_ERR_PARSE);
}

TEST_CASE("invalid spaces") {
  Space s;
  load("broken_determinism.space.json", s);
  int valid = 1;
  Str report;
  REQUIRE(cs_space_validate(s.ptr, &valid, &report.ptr) == CS_OK);
  CHECK(valid == 0);
  const auto j = json::parse(report.str());
  CHECK(j["valid"] == false);
  CHECK(j["violations"][0]["subset"] == "0");
  CHECK(j["violations"][0]["atom"] == "A=1");

  const double q[2] = {.5, .5};
  Space after;
  CHECK(cs_space_intervene(s.ptr, "0", q, 2, 1, &after.ptr) == CS_ERR_INVALID_SPACE);
  cs_effect e;
  CHECK(cs_space_classify(s.ptr, "0", "B=0", &e) == CS_ERR_INVALID_SPACE);
}

TEST_CASE("effects and sources") {
  Space ice;
  load("ice_cream.space.json", ice);
  cs_effect e = CS_EFFECT_ACTIVE;
  CHECK(cs_space_classify(ice.ptr, "1", "I=high", &e) == CS_OK);
  CHECK(e == CS_EFFECT_NONE);
  CHECK(cs_space_classify(ice.ptr, "S", "I=low", &e) == CS_OK);
  CHECK(e == CS_EFFECT_NONE);
  CHECK(cs_space_classify(ice.ptr, "0", "I=high", &e) == CS_OK);
  CHECK(e == CS_EFFECT_ACTIVE);
  CHECK(cs_space_classify(ice.ptr, "", "I=high", &e) == CS_OK);
  CHECK(e == CS_EFFECT_NONE);

  Space chain;
  load("chain.scm.json", chain);
  int yes = 0;
  CHECK(cs_space_no_effect_given(chain.ptr, "0", "1", "Z=1", &yes) == CS_OK);
  CHECK(yes == 1);
  CHECK(cs_space_no_effect_given(chain.ptr, "0", "", "Z=1", &yes) == CS_OK);
  CHECK(yes == 0);
  CHECK(cs_space_is_source(chain.ptr, "0", nullptr, &yes) == CS_OK);
  CHECK(yes == 1);
  CHECK(cs_space_is_source(chain.ptr, "2", "X=1", &yes) == CS_OK);
  CHECK(yes == 0);
}

TEST_CASE("adjustment") {
  Space s;
  load("backdoor.scm.json", s);
  const double q[2] = {0, 1};
  Str report;
  REQUIRE(cs_space_adjust(s.ptr, "1", "0", q, 2, "A=1", &report.ptr) == CS_OK);
  const auto j = json::parse(report.str());
  CHECK(j["trusted"] == true);
  CHECK(j["estimate"].get<double>() == Approx(j["interventional"].get<double>()).epsilon(1e-9));
}

TEST_CASE("compile") {
  cs_space* s = nullptr;
  Str mask;
  REQUIRE(cs_space_compile(read_fixture("confounded.po.json").c_str(), &s, &mask.ptr) == CS_OK);
  const auto m = json::parse(mask.str());
  CHECK(m["kernels"]["0"] == "mandated-on-outcome");
  cs_space_free(s);

  Str none;
  REQUIRE(cs_space_compile(read_fixture("xor.scm.json").c_str(), &s, &none.ptr) == CS_OK);
  CHECK(none.ptr == nullptr);
  cs_space_free(s);

  CHECK(cs_space_compile(read_fixture("ice_cream.space.json").c_str(), &s, nullptr) == CS_ERR_PARSE);
  CHECK(cs_space_compile(read_fixture("cyclic.scm.json").c_str(), &s, nullptr) == CS_ERR_PARSE);
  CHECK(std::string(cs_last_error()).find("cyclic") != std::string::npos);
}

TEST_CASE("demos") {
  Str csv;
  REQUIRE(cs_demo_brownian(100, 2.0, 1.0, 0.0, &csv.ptr) == CS_OK);
  CHECK(csv.str().rfind("time,mean_intervened,var_intervened,mean_conditioned,var_conditioned\r\n", 0) == 0);
  Str bad;
  CHECK(cs_demo_brownian(100, 2.0, 0.333, 0.0, &bad.ptr) == CS_ERR_DOMAIN);

  Str alt;
  REQUIRE(cs_demo_altitude(&alt.ptr) == CS_OK);
  const auto a = json::parse(alt.str());
  CHECK(a["do_altitude_1000"]["mean"].get<double>() == Approx(10));
  Str rice;
  REQUIRE(cs_demo_rice(&rice.ptr) == CS_OK);
  CHECK(json::parse(rice.str())["do_amount_3"]["price"]["var"].get<double>() == Approx(.25));
}
