#include "toeplitz/products.hpp"
#include "toeplitz/spec_io.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <set>

using namespace toeplitz;
using namespace toeplitz::products;

namespace {

std::shared_ptr<const ProductSystem> five_two_times_z3() {
  std::vector<std::shared_ptr<const ToeplitzSystem>> parts{
      std::make_shared<const ConstantWordSystem>(HoleWord::parse("a?b?c"), 6), cyclic_component(3, 6)};
  return std::make_shared<const ProductSystem>(parts);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("prime selection") {
  CHECK(select_primes(2, 6) == std::vector<std::uint64_t>{5, 7});
  CHECK(select_primes(3, 1) == std::vector<std::uint64_t>{3, 5, 7});
  for (std::uint64_t a = 1; a <= 60; ++a) {
    const auto ps = select_primes(4, a);
    REQUIRE(ps.size() == 4);
    CHECK(std::is_sorted(ps.begin(), ps.end()));
    for (auto p : ps) {
      CHECK(is_prime(p));
      CHECK(p >= 3);
      CHECK(a % p != 0);
    }
  }
}

TEST_CASE("cyclic component is the rotation on Z_a") {
  const auto z = cyclic_component(6);
  const auto w = z->window({-12, 12}).symbols();
  CHECK(std::set<char>(w.begin(), w.end()).size() == 6);
  for (std::size_t i = 0; i + 6 < w.size(); ++i) CHECK(w[i] == w[i + 6]);
  CHECK(z->period(1) == 6);
}

TEST_CASE("zero entropy realization of Z^2 + Z_6") {
  const auto r = realize_group(2, 6, EntropyMode::Zero);
  CHECK(r.report.primes == std::vector<std::uint64_t>{5, 7});
  CHECK(r.report.expected_group == "Z^2 + Z_6");
  CHECK(r.report.generators.size() == 3);
  CHECK(r.system->arity() == 3);
  CHECK(r.system->alphabet().size() == 24);
  CHECK(r.system->period(1) == 5 * 7 * 6);
}

TEST_CASE("positive entropy realization") {
  const auto r = realize_group(2, 6, EntropyMode::Positive, 3);
  CHECK(r.report.entropy == EntropyMode::Positive);
  CHECK(r.system->alphabet().size() == 96);
  for (const auto& c : r.system->components()) CHECK(c->domain().has_value() == (c->kind() == ToeplitzSystem::Kind::Blocks));
}

TEST_CASE("components sharing a prime are rejected") {
  std::vector<std::shared_ptr<const ToeplitzSystem>> parts{
      std::make_shared<const ConstantWordSystem>(HoleWord::parse("a?b?c"), 4), cyclic_component(10)};
  CHECK_THROWS_AS(ProductSystem{parts}, std::invalid_argument);
  CHECK_THROWS_AS(realize_group(0, 1, EntropyMode::Zero), std::invalid_argument);
}

TEST_CASE("encoding and component projection") {
  const auto sys = five_two_times_z3();
  const auto& a = sys->alphabet().symbols();
  CHECK(a.size() == 9);
  CHECK(a.find('?') == std::string::npos);
  for (char c : a) CHECK(sys->encode(sys->decode(c)) == c);

  const Range r{-40, 60};
  const auto w = sys->window(r).symbols();
  const auto parts = sys->split(w);
  REQUIRE(parts.size() == 2);
  for (std::size_t j = 0; j < 2; ++j) CHECK(parts[j] == sys->components()[j]->window(r).symbols());
  CHECK(sys->join(parts) == w);
  for (std::int64_t i = r.begin; i < r.end; ++i) CHECK(sys->evaluate(i) == w[static_cast<std::size_t>(i - r.begin)]);
  CHECK(structure_primes(*sys) == std::vector<BigInt>{3, 5});
}

TEST_CASE("coordinatewise maps commute with the product shift") {
  const auto sys = five_two_times_z3();
  const auto phi = pq::make_phi(HoleWord::parse("a?b?c"), 1);
  const auto m = tuple_map({phi, pq::shift(1)}, sys);
  const auto rep = product_factor_commutes(m, *sys);
  CHECK(rep.ok());
  CHECK(rep.windows_tested > 0);

  // Componentwise action agrees with the components' own maps.
  const Range r{0, 80};
  const auto out = m.apply(sys->window(r));
  const auto parts = sys->split(out.symbols());
  CHECK(parts[0] == phi.apply(sys->components()[0]->window(r)).slice(out.range()).symbols());
}

TEST_CASE("a map coupling the components is detected") {
  const auto sys = five_two_times_z3();
  const char first = sys->components()[1]->evaluate(0);
  const pq::WindowMap coupled(
      1,
      [sys, first](std::string_view z) {
        std::string t = sys->decode(z[1]);
        if (t[1] == first) t[0] = sys->decode(z[2])[0];
        return sys->encode(t);
      },
      "coupled");
  const auto rep = product_factor_commutes(coupled, *sys);
  CHECK_FALSE(rep.coordinatewise);
  CHECK_FALSE(rep.ok());
  CHECK_FALSE(rep.detail.empty());
}

TEST_CASE("realized spec round trips through the loader") {
  for (auto mode : {EntropyMode::Zero, EntropyMode::Positive}) {
    const auto r = realize_group(2, 6, mode, 3);
    const auto loaded = system_from_json(r.spec());
    Range w{-30, 30};
    if (auto d = r.system->domain()) w = {std::max(w.begin, d->begin), std::min(w.end, d->end)};
    REQUIRE(w.size() > 0);
    CHECK(loaded->window(w).symbols() == r.system->window(w).symbols());
    CHECK(loaded->to_json() == r.system->to_json());
  }
  CHECK(parse_entropy_mode("positive") == EntropyMode::Positive);
  CHECK_THROWS_AS(parse_entropy_mode("some"), std::invalid_argument);
}
