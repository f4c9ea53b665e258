#include <cmath>

#include "causal/error.hpp"
#include "causal/harness.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace causal;
using doctest::Approx;

namespace {

void check_close(std::span<const double> got, std::vector<double> want, double eps = 1e-12) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(got[i] == Approx(want[i]).epsilon(eps));
}

}  // namespace

TEST_CASE("subset masks") {
  const auto m = SubsetMask::of({0, 2});
  CHECK(m.bits() == 5u);
  CHECK(m.size() == 2);
  CHECK(m.to_string() == "0,2");
  CHECK(SubsetMask().to_string() == "");
  CHECK((m - SubsetMask::of({2})) == SubsetMask::of({0}));
  CHECK(SubsetMask::of({1}).is_subset_of(SubsetMask::full(3)));
  CHECK(expand_mask(SubsetMask::of({1, 3}), SubsetMask(2u)) == SubsetMask::of({3}));
  CHECK(compress_mask(SubsetMask::of({1, 3}), SubsetMask::of({3})) == SubsetMask(2u));
}

TEST_CASE("atom encoding is row-major with the last component fastest") {
  const auto sp = fx::space({2, 3});
  CHECK(sp->atom_count() == 6);
  CHECK(sp->encode(sp->all(), std::vector<std::size_t>{1, 2}) == 5);
  CHECK(sp->decode(sp->all(), 4) == std::vector<std::size_t>{1, 1});
  for (std::size_t i = 0; i < 6; ++i) CHECK(sp->encode(sp->all(), sp->decode(sp->all(), i)) == i);
  CHECK(sp->describe({sp->all(), 3}) == "A=1,B=0");
}

TEST_CASE("component cap") {
  CHECK(max_components() >= 1);
  CHECK_THROWS_AS(fx::space(std::vector<std::size_t>(max_components() + 1, 2)), DomainError);
  CHECK_THROWS_AS(fx::space({2, 0}), DomainError);
}

TEST_CASE("dist normalization") {
  const auto sp = fx::space({2});
  CHECK_THROWS_AS(Dist(sp, sp->all(), {0.5, 0.6}), DomainError);
  CHECK_THROWS_AS(Dist(sp, sp->all(), {1.5, -0.5}), DomainError);
  CHECK_THROWS_AS(Dist(sp, sp->all(), {1.0}), DomainError);
  const Dist drift(sp, sp->all(), {0.5 + 1e-8, 0.5});
  CHECK(drift[0] + drift[1] == Approx(1.0).epsilon(1e-15));
  // Already-normalized weights are kept bit for bit.
  const Dist exact(sp, sp->all(), {0.1, 0.9});
  CHECK(exact[0] == 0.1);
  CHECK(exact[1] == 0.9);
}

TEST_CASE("marginal") {
  const auto sp = fx::space({2, 2});
  SUBCASE("uniform") {
    check_close(marginal(Dist::uniform(sp, sp->all()), SubsetMask::of({0})).weights(), {.5, .5});
  }
  SUBCASE("fiber sums") {
    const Dist d(sp, sp->all(), {.5, .3, .1, .1});
    check_close(marginal(d, SubsetMask::of({0})).weights(), {.8, .2});
    check_close(marginal(d, SubsetMask::of({1})).weights(), {.6, .4});
    CHECK(fx::weights(marginal(d, sp->all())) == std::vector<double>{.5, .3, .1, .1});
  }
  SUBCASE("not a subset") {
    const Dist d = Dist::uniform(sp, SubsetMask::of({0}));
    CHECK_THROWS_AS(marginal(d, SubsetMask::of({1})), DomainError);
  }
}

TEST_CASE("condition") {
  const auto sp = fx::space({2, 2});
  const Dist d(sp, sp->all(), {.5, .3, .1, .1});
  check_close(condition(Dist::uniform(sp, sp->all()), {SubsetMask::of({0}), 0}).weights(),
              {.5, .5, 0, 0});
  check_close(condition(d, {SubsetMask::of({0}), 1}).weights(), {0, 0, .5, .5});
  check_close(condition(d, {sp->all(), 2}).weights(), fx::weights(dirac(sp, {sp->all(), 2})));
  const Dist null(sp, sp->all(), {.5, .5, 0, 0});
  CHECK_THROWS_AS(condition(null, {SubsetMask::of({0}), 1}), NullSetError);
}

TEST_CASE("product") {
  const auto sp = fx::space({2, 2});
  const Dist a(sp, SubsetMask::of({0}), {.7, .3});
  const Dist b(sp, SubsetMask::of({1}), {.5, .5});
  check_close(product(a, b).weights(), {.35, .35, .15, .15});
  check_close(product(dirac(sp, {SubsetMask::of({0}), 1}), dirac(sp, {SubsetMask::of({1}), 0})).weights(),
              {0, 0, 1, 0});
  check_close(product(Dist::uniform(sp, SubsetMask::of({0})), Dist::uniform(sp, SubsetMask::of({1}))).weights(),
              {.25, .25, .25, .25});
  CHECK_THROWS_AS(product(a, a), DomainError);
}

TEST_CASE("bind") {
  const auto sp = fx::space({2, 2});
  const SubsetMask u = SubsetMask::of({0});
  const Kernel k(sp, u, std::vector<double>{.5, .5, 0, 0, 0, 0, .2, .8});
  check_close(bind(dirac(sp, {u, 1}), k).weights(), {0, 0, .2, .8});
  check_close(bind(Dist(sp, u, {.5, .5}), k).weights(), {.25, .25, .1, .4});
  const Kernel constant(sp, u, std::vector<double>{.1, .2, .3, .4, .1, .2, .3, .4});
  check_close(bind(Dist(sp, u, {.9, .1}), constant).weights(), {.1, .2, .3, .4});
  CHECK_THROWS_AS(bind(Dist::uniform(sp, SubsetMask::of({1})), k), DomainError);
}

TEST_CASE("dirac") {
  const auto sp = fx::space({3});
  check_close(dirac(sp, {sp->all(), 0}).weights(), {1, 0, 0});
  const auto sp2 = fx::space({2, 3});
  const Dist d = dirac(sp2, {sp2->all(), 4});
  check_close(marginal(d, SubsetMask::of({0})).weights(), {0, 1});
  check_close(marginal(d, SubsetMask::of({1})).weights(), {0, 1, 0});
}

TEST_CASE("events") {
  const auto sp = fx::space({2, 3});
  const Event a = Event::rectangle(sp, {std::nullopt, std::vector<std::size_t>{0, 2}});
  CHECK(a.domain() == SubsetMask::of({1}));
  const Dist u = Dist::uniform(sp, sp->all());
  CHECK(u.probability(a) == Approx(2.0 / 3));
  CHECK(u.probability(Event::everything(sp)) == Approx(1.0));
  CHECK(u.probability(Event::none(sp)) == 0.0);
  CHECK(Event::atom(sp, {sp->all(), 0}).cylinder() == std::vector<char>{1, 0, 0, 0, 0, 0});
}

TEST_CASE("total variation and mutual information") {
  const auto sp = fx::space({2, 2});
  const Dist a(sp, sp->all(), {.4, .1, .1, .4});
  const Dist b = Dist::uniform(sp, sp->all());
  CHECK(total_variation(a, b) == Approx(0.3));
  CHECK(max_abs_difference(a, b) == Approx(0.15));
  CHECK(mutual_information(b, SubsetMask::of({0})) == Approx(0.0));
  // 2 * (.4 ln 1.6 + .1 ln .4)
  CHECK(mutual_information(a, SubsetMask::of({0})) == Approx(0.8 * std::log(1.6) + 0.2 * std::log(0.4)));
}

TEST_CASE("marginal consistency and total probability on random measures") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto sp = random_product_space(rng, 1, 4, 3);
    const Dist d = random_dist(rng, sp, sp->all());
    const SubsetMask r(static_cast<std::uint32_t>(rng.below(sp->subset_count())));
    const SubsetMask s(r.bits() & static_cast<std::uint32_t>(rng.below(sp->subset_count())));
    CHECK(oracle::max_diff(marginal(marginal(d, r), s).weights(), marginal(d, s).weights()) <= 1e-12);
    CHECK(oracle::max_diff(marginal(d, s).weights(), oracle::marginal(d, s)) <= 1e-12);
    const Dist ds = marginal(d, s);
    std::vector<double> rows;
    for (std::size_t a = 0; a < ds.size(); ++a) {
      const auto c = oracle::condition(d, {s, a});
      CHECK(oracle::max_diff(condition(d, {s, a}).weights(), c) <= 1e-12);
      rows.insert(rows.end(), c.begin(), c.end());
    }
    const Kernel k(sp, s, std::move(rows));
    CHECK(oracle::max_diff(bind(ds, k).weights(), d.weights()) <= 1e-9);
  }
}
