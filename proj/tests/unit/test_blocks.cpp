#include "toeplitz/blocks.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <set>

using namespace toeplitz;
using namespace toeplitz::blocks;

namespace {

BlockSpec toy_spec(unsigned k1 = 4, std::size_t levels = 4) {
  BlockSpec s;
  s.k1 = k1;
  s.d0 = 2;
  s.scale = odometer::Scale({1, 8, 120, 3720, 230640});
  s.levels = levels;
  return s;
}

BigInt factorial(std::uint64_t n) {
  BigInt f = 1;
  for (std::uint64_t i = 2; i <= n; ++i) f *= i;
  return f;
}

// Arrangements of k-1 symbols, one used dh times and k-2 used d times each.
BigInt multinomial(std::uint64_t dh, std::uint64_t d, std::uint64_t k) {
  BigInt den = factorial(dh);
  for (std::uint64_t i = 0; i + 2 < k; ++i) den *= factorial(d);
  return factorial(dh + d * (k - 2)) / den;
}

std::size_t occurrences(const std::string& hay, const std::string& needle) {
  std::size_t c = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++c;
  return c;
}

}  // namespace

TEST_CASE("partition count against factorials") {
  for (std::uint64_t d = 1; d <= 6; ++d)
    for (std::uint64_t k = 1; k <= 6; ++k) {
      BigInt den = 1;
      for (std::uint64_t i = 0; i < k; ++i) den *= factorial(d);
      CHECK(partition_count(d, k) == factorial(d * k) / den);
      const double exact = std::log(static_cast<double>(partition_count(d, k).convert_to<long double>()));
      CHECK(log_partition_count(static_cast<double>(d), static_cast<double>(k)) == doctest::Approx(exact).epsilon(1e-9));
    }
}

TEST_CASE("block alphabet") {
  const auto a = block_alphabet(40);
  CHECK(a.size() == 40);
  CHECK(std::set<char>(a.begin(), a.end()).size() == 40);
  CHECK(a.find('?') == std::string::npos);
}

TEST_CASE("toy construction: sizes, lengths and multiplicities") {
  const auto c = Construction::build(toy_spec());
  REQUIRE(c.levels().size() == 4);
  const std::vector<std::uint64_t> k{4, 8, 16, 32};
  for (std::size_t n = 1; n <= 4; ++n) {
    const Level& lv = c.level(n);
    REQUIRE(lv.count.has_value());
    CHECK(*lv.count == k[n - 1]);
    CHECK(lv.blocks.size() == k[n - 1]);
    CHECK(std::set<std::string>(lv.blocks.begin(), lv.blocks.end()).size() == lv.blocks.size());
    for (const auto& b : lv.blocks) CHECK(BigInt(b.size()) == lv.length);
    // k_n >= 2^{n-1} k_1
    CHECK(k[n - 1] >= (std::uint64_t{1} << (n - 1)) * 4);
  }
  CHECK(c.level(2).d == 1);
  CHECK(c.level(2).d_hat == 2);
  for (std::size_t n = 2; n <= 4; ++n) {
    const Level& lv = c.level(n);
    const Level& prev = c.level(n - 1);
    const auto kp = static_cast<std::int64_t>(prev.blocks.size());
    CHECK(lv.middle == lv.d_hat + lv.d * (kp - 2));
    CHECK(lv.length == prev.length * (kp + lv.middle));
    CHECK(check_conditions(c, n).ok);
  }
}

TEST_CASE("blocks are built from the previous level as stated") {
  const auto c = Construction::build(toy_spec(4, 3));
  for (std::size_t n = 2; n <= 3; ++n) {
    const auto& prev = c.level(n - 1).blocks;
    const auto k = prev.size();
    const Level& lv = c.level(n);
    std::set<std::vector<std::uint32_t>> seen;
    for (std::size_t b = 0; b < lv.blocks.size(); ++b) {
      const auto& arr = lv.arrangement[b];
      REQUIRE(arr.size() == k + static_cast<std::size_t>(lv.middle));
      const std::vector<std::uint32_t> mid(arr.begin() + static_cast<std::ptrdiff_t>(k / 2),
                                           arr.end() - static_cast<std::ptrdiff_t>(k - k / 2));
      seen.insert(mid);
      std::string s;
      for (std::size_t i = 0; i < k / 2; ++i) s += prev[i];
      for (auto idx : mid) s += prev[idx];
      for (std::size_t i = k / 2; i < k; ++i) s += prev[i];
      CHECK(s == lv.blocks[b]);
      std::vector<std::int64_t> used(k, 0);
      for (auto idx : mid) ++used[idx];
      CHECK(used[0] == 0);
      CHECK(used[1] == lv.d_hat);
      for (std::size_t i = 2; i < k; ++i) CHECK(used[i] == lv.d);
    }
    CHECK(seen.size() == lv.blocks.size());
  }
}

TEST_CASE("trivial overlap holds and a mutated family gives a witness") {
  const auto c = Construction::build(toy_spec());
  for (std::size_t n = 1; n <= 4; ++n) CHECK(check_trivial_overlap(c, n).ok);

  const auto bad = check_trivial_overlap(std::vector<std::string>{"ab", "ba"});
  CHECK_FALSE(bad.ok);
  REQUIRE(bad.witness.has_value());
  const auto [i, j, k] = *bad.witness;
  const std::vector<std::string> b{"ab", "ba"};
  const std::string pair = b[j - 1] + b[k - 1];  // witness is 1-based
  CHECK(pair.substr(static_cast<std::size_t>(bad.offset), 2) == b[i - 1]);
  CHECK(bad.offset == 1);
}

TEST_CASE("frequencies are exact and agree with direct counting") {
  const auto c = Construction::build(toy_spec());
  const BlocksSystem sys(std::make_shared<const Construction>(c));
  for (std::size_t n = 1; n <= 2; ++n) {
    const auto next = c.level(n + 1).length.convert_to<std::int64_t>();
    const std::int64_t window = 10 * next;
    const auto t = frequencies(c, n, window);
    CHECK(t.all_exact);
    CHECK(t.max_deviation == doctest::Approx(0.0));
    const auto dom = c.domain();
    const std::string text = sys.window({dom.begin, dom.begin + t.window}).symbols();
    for (const auto& row : t.rows) {
      if (n >= 2) CHECK(row.occurrences == occurrences(text, c.level(n).blocks[row.block - 1]));
      CHECK(row.occurrences * row.predicted_denominator == static_cast<std::uint64_t>(t.window * row.predicted_numerator));
    }
  }
  CHECK_THROWS(frequencies(c, 3, 100));
}

TEST_CASE("extensibility and entropy") {
  const auto c = Construction::build(toy_spec());
  const auto e2 = check_extensible(c, 2);
  CHECK(e2.ok);
  CHECK(e2.occurrences > 0);
  CHECK(check_extensible(c, 3).ok);
  for (std::size_t n = 1; n <= 4; ++n) {
    const double bound = std::log(static_cast<double>(c.level(n).blocks.size())) / c.level(n).length.convert_to<double>();
    CHECK(empirical_entropy(c, n) >= bound - 1e-12);
  }
  const auto eb = entropy_lower_bound(c, 4);
  CHECK(eb.product_bound > 0);
  CHECK(eb.product_bound <= std::log(4.0));
  CHECK(eb.r == doctest::Approx(0.5));
  CHECK(eb.c == doctest::Approx(2 * std::log(2.0)));
}

TEST_CASE("k_1 sweep") {
  std::uint64_t last_k2 = 0;
  for (unsigned k1 = 4; k1 <= 8; ++k1) {
    const auto c = Construction::build(toy_spec(k1, 2));
    const auto k2 = static_cast<std::uint64_t>(*c.level(2).count);
    CHECK(k2 >= 2 * k1);
    CHECK(k2 >= last_k2);
    last_k2 = k2;
  }
}

TEST_CASE("faithful mode keeps every arrangement") {
  BlockSpec s;
  s.k1 = 19;
  s.d0 = 2;
  s.scale = odometer::Scale::powers(2, 60);
  s.levels = 2;
  s.mode = Mode::Faithful;
  const auto c = Construction::build(s);
  REQUIRE(c.levels().size() == 2);
  const Level& lv = c.level(2);
  CHECK(lv.inequality_holds);
  CHECK_FALSE(lv.materialized);
  REQUIRE(lv.count.has_value());
  CHECK(*lv.count == multinomial(static_cast<std::uint64_t>(lv.d_hat), static_cast<std::uint64_t>(lv.d), 19));
  CHECK(lv.length == BigInt(19 + lv.middle));
  CHECK(lv.log_count == doctest::Approx(lv.log_available));
}

TEST_CASE("parameter validation") {
  BlockSpec s = toy_spec();
  s.k1 = 1;
  CHECK_THROWS_AS(Construction::build(s), std::invalid_argument);
  s = toy_spec();
  s.d0 = 1;
  CHECK_THROWS_AS(Construction::build(s), std::invalid_argument);
  s = toy_spec();
  s.mode = Mode::Faithful;  // needs k_1 > 9 D_0
  CHECK_THROWS_AS(Construction::build(s), std::invalid_argument);
  CHECK_THROWS_AS(parse_mode("fast"), std::invalid_argument);
  CHECK(parse_mode("faithful") == Mode::Faithful);
}

TEST_CASE("spec json round trip") {
  const BlockSpec s = toy_spec();
  const BlockSpec t = block_spec_from_json(to_json(s));
  CHECK(to_json(t) == to_json(s));
  CHECK(t.scale == s.scale);
}
