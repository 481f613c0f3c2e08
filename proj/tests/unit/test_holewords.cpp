#include "toeplitz/holewords.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <random>

using namespace toeplitz;

namespace {

// One period of T_n(w), built by substituting holes in w^{p^{n-1}} with
// consecutive symbols of u_{n-1}, cycling.
std::string naive_period(const std::string& w, unsigned n) {
  std::string u = w;
  for (unsigned k = 1; k < n; ++k) {
    std::string next;
    std::size_t r = 0;
    for (std::size_t rep = 0; rep < u.size(); ++rep)
      for (char c : w) next.push_back(c == '?' ? u[r++ % u.size()] : c);
    u = next;
  }
  return u;
}

std::int64_t mod(std::int64_t a, std::int64_t b) { return ((a % b) + b) % b; }

const std::vector<std::string> kSeeds{"a?b", "a?b?c", "ab?c?d", "a??b", "a?b?c?d", "ab?ba?c"};

}  // namespace

TEST_CASE("parsing") {
  const auto w = HoleWord::parse("a?b?c");
  CHECK(w.length() == 5);
  CHECK(w.hole_count() == 2);
  CHECK(w.holes() == std::vector<std::size_t>{1, 3});
  CHECK(w.alphabet().symbols() == "abc");
  CHECK(w.is_generator());
  CHECK(w.is_coprime());
  CHECK_FALSE(HoleWord::parse("ab?c?d").is_coprime());
  CHECK_THROWS_AS(HoleWord::parse(""), std::invalid_argument);
  CHECK(parse_range("-10:10") == Range{-10, 10});
  CHECK_THROWS_AS(parse_range("5:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_range("7"), std::invalid_argument);
}

TEST_CASE("fill places y_0 at the first hole right of 0 and extends ranks both ways") {
  const PeriodicSequence x("a?b");
  const PeriodicSequence yy("a?b");
  const Range out{-3, 6};
  const SequenceWindow y = yy.window(hole_rank_range(x, out));
  const SequenceWindow z = fill(x, y, out);
  CHECK(z.at(1) == 'a');
  CHECK(z.at(4) == '?');
  CHECK(z.at(-2) == 'b');
  CHECK(z.symbols() == "abbaaba?b");
}

TEST_CASE("fill with a hole-free x returns x") {
  const PeriodicSequence x("abc");
  CHECK(fill(x, SequenceWindow(0, ""), {-7, 9}) == x.window({-7, 9}));
}

TEST_CASE("fill reports missing data instead of truncating") {
  const PeriodicSequence x("a?b");
  CHECK_THROWS_AS(fill(x, SequenceWindow(0, "xy"), {0, 30}), InsufficientWindow);
  const SequenceWindow xs(2, "a?b?");
  CHECK_THROWS_AS(fill(xs, SequenceWindow(0, "zz"), {2, 6}), InsufficientWindow);
}

TEST_CASE("window and periodic fill agree") {
  std::mt19937_64 g(7);
  for (int t = 0; t < 50; ++t) {
    const PeriodicSequence x(std::string("a?b??c").substr(0, 3 + g() % 4));
    const std::int64_t b = static_cast<std::int64_t>(g() % 40) - 20;
    const Range out{b, b + 25};
    const Range h{std::min<std::int64_t>(b, 0), std::max<std::int64_t>(b + 25, 0)};
    std::string ys(200, ' ');
    for (auto& c : ys) c = "xyz"[g() % 3];
    const SequenceWindow y(-100, ys);
    CHECK(fill(x.window(h), y, out) == fill(x, y, out));
  }
}

TEST_CASE("semigroup: F_{F_a(b)} = F_a o F_b") {
  std::mt19937_64 g(11);
  for (int t = 0; t < 200; ++t) {
    auto word = [&] {
      std::string s(2 + g() % 5, ' ');
      for (auto& c : s) c = "ab?"[g() % 3];
      s[g() % s.size()] = '?';
      return PeriodicSequence(s);
    };
    const PeriodicSequence a = word(), b = word();
    const std::int64_t o = static_cast<std::int64_t>(g() % 80) - 40;
    const Range r{o, o + 30};
    const Range h{std::min<std::int64_t>(o, 0), std::max<std::int64_t>(o + 30, 1)};
    const SequenceWindow z = fill(a, b.window(hole_rank_range(a, h)), h);
    std::string cs(400, ' ');
    for (auto& c : cs) c = "xyz"[g() % 3];
    const SequenceWindow c(-200, cs);
    CHECK(fill(z, c, r) == fill(a, fill(b, c, hole_rank_range(a, r)), r));
  }
}

TEST_CASE("iterate examples") {
  const auto w = HoleWord::parse("a?b?c");
  CHECK(iterate(w, 1).period_word() == "a?b?c");
  const auto u2 = iterate(w, 2);
  CHECK(u2.period() == 25);
  CHECK(u2.holes_per_period() == 4);
  CHECK(u2.period_word().substr(0, 5) == "aab?c");
  CHECK(iterate(w, 3).holes_per_period() == 8);
  CHECK_THROWS_AS(iterate(w, 0), std::invalid_argument);
  CHECK_THROWS_AS(iterate(w, 20, 1 << 20), BudgetExceeded);
}

TEST_CASE("iterate matches the naive substitution and hole counts are q^n") {
  for (const auto& s : kSeeds) {
    const auto w = HoleWord::parse(s);
    std::int64_t p = 1, q = 1;
    for (unsigned n = 1; n <= 4; ++n) {
      p *= static_cast<std::int64_t>(w.length());
      q *= static_cast<std::int64_t>(w.hole_count());
      const auto t = iterate(w, n);
      CHECK(t.period_word() == naive_period(s, n));
      CHECK(t.period() == p);
      CHECK(t.holes_per_period() == q);
    }
  }
}

TEST_CASE("evaluate examples") {
  const ConstantWordSystem x(HoleWord::parse("a?b?c"), 8);
  CHECK(x.window({0, 5}).symbols() == "aabac");
  CHECK(x.evaluate(2) == 'b');
  const ConstantWordSystem y(HoleWord::parse("a?b"), 8);
  CHECK(y.evaluate(4) == y.evaluate(1));
  CHECK(y.evaluate(4) == 'a');
}

TEST_CASE("evaluate agrees with the materialised levels for |i| <= p^3") {
  for (const auto& s : kSeeds) {
    const auto w = HoleWord::parse(s);
    const ConstantWordSystem x(w, 8);
    const auto p = static_cast<std::int64_t>(w.length());
    const std::int64_t p3 = p * p * p;
    std::vector<std::string> levels;
    for (unsigned n = 1; n <= 5; ++n) levels.push_back(naive_period(s, n));
    for (std::int64_t i = -p3; i <= p3; ++i) {
      const char xi = x.evaluate(i);
      REQUIRE(xi != kHole);
      for (const auto& u : levels) {
        const char c = u[static_cast<std::size_t>(mod(i, static_cast<std::int64_t>(u.size())))];
        if (c != kHole) REQUIRE(c == xi);
      }
    }
  }
}

TEST_CASE("non-generator seeds surface holes") {
  const ConstantWordSystem x(HoleWord::parse("?ab"), 6);
  CHECK_FALSE(x.is_generator());
  CHECK(x.evaluate(0) == kHole);
  CHECK(x.evaluate(1) == 'a');
}

TEST_CASE("per-level systems") {
  const PerLevelSystem x({HoleWord::parse("a?b"), HoleWord::parse("a?bbb")}, 4);
  CHECK(x.period(1) == 3);
  CHECK(x.period(2) == 15);
  CHECK(x.period(3) == 75);  // the last word repeats
  // Oracle: W_2 = F_{w_1^inf}(w_2^inf), then x agrees with W_2 off its holes.
  const PeriodicSequence w1("a?b"), w2("a?bbb");
  const Range r{-60, 60};
  const SequenceWindow w2win = w2.window(hole_rank_range(w1, r));
  const SequenceWindow W2 = fill(w1, w2win, r);
  for (std::int64_t i = r.begin; i < r.end; ++i)
    if (W2.at(i) != kHole) CHECK(x.evaluate(i) == W2.at(i));
  CHECK_FALSE(x.structural_skeleton(2)->period_word().empty());
}

TEST_CASE("per_set examples") {
  const ConstantWordSystem x(HoleWord::parse("a?b?c"), 8);
  const PerSet five = per_set(x, 5, {0, 5});
  CHECK(five.coordinates == std::vector<std::int64_t>{0, 2, 4});
  CHECK(five.certified);
  const PerSet tf = per_set(x, 25, {0, 25});
  CHECK(tf.coordinates.size() == 21);
  CHECK(tf.certified);

  const ConstantWordSystem c(HoleWord::parse("a"), 3);
  CHECK(per_set(c, 1, {-4, 4}).coordinates.size() == 8);
}

TEST_CASE("skeleton equals T_n") {
  const ConstantWordSystem x(HoleWord::parse("a?b?c"), 8);
  const auto s = skeleton(x, 1, {0, 5});
  CHECK(s.window.symbols() == "a?b?c");
  CHECK(s.certified);
  const ConstantWordSystem y(HoleWord::parse("a?b"), 8);
  CHECK(skeleton(y, 2, {0, 9}).window.symbols() == naive_period("a?b", 2));
  for (const auto& seed : kSeeds) {
    const auto w = HoleWord::parse(seed);
    if (!w.is_coprime() && seed != "ab?c?d") continue;
    const ConstantWordSystem z(w, 6);
    for (unsigned n = 1; n <= 3; ++n) {
      const auto t = iterate(w, n);
      const Range r{-2 * t.period(), 2 * t.period()};
      CHECK(skeleton(z, n, r).window == t.window(r));
    }
  }
}

TEST_CASE("without coprimality the skeleton can exceed T_n") {
  // a??b: the level-2 holes at 2 + 16k receive x_{4k}, and x is 'a' on 4Z.
  const ConstantWordSystem x(HoleWord::parse("a??b"), 6);
  const auto t = iterate(HoleWord::parse("a??b"), 2);
  CHECK(t.at(2) == kHole);
  for (std::int64_t k = -50; k <= 50; ++k) CHECK(x.evaluate(2 + 16 * k) == 'a');
  const auto s = skeleton(x, 2, {0, 16});
  CHECK(s.window.at(2) == 'a');
  CHECK(s.window != t.window({0, 16}));
}

TEST_CASE("fixed point and commutation identities") {
  for (const auto& s : kSeeds) {
    const auto w = HoleWord::parse(s);
    const ConstantWordSystem x(w, 6);
    for (unsigned n = 1; n <= 3; ++n) {
      const auto t = iterate(w, n);
      const std::int64_t p = t.period(), q = t.holes_per_period();
      const Range r{-2 * p, 2 * p};
      CHECK(fill(t, x.window(hole_rank_range(t, r)), r) == x.window(r));

      std::mt19937_64 g(n);
      std::string ys(static_cast<std::size_t>(8 * p), ' ');
      for (auto& c : ys) c = "xyz"[g() % 3];
      const SequenceWindow y(-4 * p, ys);
      CHECK(fill(t, y.shifted(q), r) == fill(t, y, r.shifted(p)).shifted(p));
    }
  }
}

TEST_CASE("essential periods") {
  const ConstantWordSystem x(HoleWord::parse("a?b?c"), 4);
  const auto e = essential_periods(x, 2);
  REQUIRE(e.size() == 2);
  CHECK(e[0].period == 5);
  CHECK(e[1].period == 25);
  CHECK(e[0].essential);
  CHECK(e[1].essential);

  // Single-hole seed a?b..b of length 5.
  const ConstantWordSystem s(single_hole_word(5), 5);
  for (const auto& p : essential_periods(s, 3)) CHECK(p.essential);

  // gcd(p, q) = 2: T_2 of ab?c?d already has period 18.
  const ConstantWordSystem d(HoleWord::parse("ab?c?d"), 4);
  const auto de = essential_periods(d, 2);
  CHECK(de[0].essential);
  CHECK_FALSE(de[1].essential);
  CHECK(de[1].matching_period == 18);
}

TEST_CASE("periodic seeds without holes") {
  const ConstantWordSystem x(HoleWord::parse("ab"), 3);
  CHECK(x.period(1) == 2);
  CHECK(find_period(x, 10, 100) == 2);
  CHECK(x.window({0, 6}).symbols() == "ababab");
}

TEST_CASE("aperiodicity evidence") {
  const ConstantWordSystem x(HoleWord::parse("a?b?c"), 8);
  CHECK_FALSE(find_period(x, 300, 2000).has_value());
}

TEST_CASE("json export") {
  const ConstantWordSystem x(HoleWord::parse("a?b?c"), 8);
  const auto j = x.to_json();
  CHECK(j["kind"] == "pq");
  CHECK(j["word"] == "a?b?c");
  CHECK(to_json(x.window({-2, 3}))["symbols"] == x.window({-2, 3}).symbols());
}
