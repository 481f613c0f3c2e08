#pragma once

// Truncated odometers Z_(p_n): divisibility chains, compatible residue
// sequences, and the valuation bookkeeping behind torsion questions.
//
// Every statement here is about the chain truncated at an explicit depth N.
// Limits such as lim v_p(p_n) are only reported when the valuation has been
// constant over the last half of the chain; otherwise they are "unresolved".

#include "toeplitz/bigint.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace toeplitz::odometer {

class Scale {
 public:
  // Throws std::invalid_argument unless every p_n >= 1 and p_n | p_{n+1}.
  explicit Scale(std::vector<BigInt> periods);

  static Scale powers(const BigInt& base, std::size_t depth);         // base^n
  static Scale factorial(std::size_t depth);                           // n!
  static Scale primorial(std::size_t depth);                           // product of first n primes
  static Scale times_powers(const BigInt& factor, const BigInt& base,  // factor * base^n
                            std::size_t depth);

  std::size_t depth() const { return periods_.size(); }
  // 1-based, as in p_1..p_N.
  const BigInt& period(std::size_t n) const;
  const BigInt& top() const { return periods_.back(); }
  const std::vector<BigInt>& periods() const { return periods_; }
  // q_1 = p_1, q_{n+1} = p_{n+1} / p_n.
  std::vector<BigInt> quotients() const;

  // Prefix chain p_1..p_n.
  Scale truncated(std::size_t n) const;

  bool operator==(const Scale& other) const { return periods_ == other.periods_; }

 private:
  std::vector<BigInt> periods_;
};

nlohmann::json to_json(const Scale& scale);
// Accepts an array of decimal strings or integers, or a rule object
// {"rule": "powers"|"factorial"|"primorial"|"times_powers", "base", "factor", "depth"}.
Scale scale_from_json(const nlohmann::json& j);

class OdometerElement {
 public:
  // Throws std::invalid_argument on wrong length, out-of-range or incompatible residues.
  OdometerElement(std::shared_ptr<const Scale> scale, std::vector<BigInt> residues);

  static OdometerElement from_integer(std::shared_ptr<const Scale> scale, const BigInt& k);
  // The element num/den; requires gcd(den, p_N) == 1.
  static OdometerElement from_rational(std::shared_ptr<const Scale> scale, const BigInt& num, const BigInt& den);

  const Scale& scale() const { return *scale_; }
  const std::shared_ptr<const Scale>& scale_ptr() const { return scale_; }
  const std::vector<BigInt>& residues() const { return residues_; }
  const BigInt& residue(std::size_t n) const;  // 1-based

  bool operator==(const OdometerElement& other) const;

 private:
  std::shared_ptr<const Scale> scale_;
  std::vector<BigInt> residues_;
};

// Throws std::invalid_argument on scale mismatch.
OdometerElement add(const OdometerElement& a, const OdometerElement& b);
OdometerElement negate(const OdometerElement& a);
OdometerElement multiply(const OdometerElement& a, const BigInt& k);

bool is_compatible(const Scale& scale, const std::vector<BigInt>& residues);

// Whether translation by m·1 is minimal on the truncated odometer, i.e.
// gcd(m, p_N) = 1. Cross-checked level by level against the orbit of 0 under
// +m (enumerated when p_n <= orbit_cap); a disagreement is a logic_error.
bool is_minimal_translation(const BigInt& m, const Scale& scale, std::uint64_t orbit_cap = 1u << 20);

// Length of the orbit of 0 under x -> x + m in Z_p, by enumeration.
std::uint64_t orbit_length(std::int64_t m, std::uint64_t p);

struct MultiplicityEntry {
  unsigned valuation = 0;   // v_p(p_N)
  bool stabilized = false;  // v_p(p_n) constant for n in [ceil(N/2), N]
};

struct MultiplicityReport {
  std::size_t depth = 0;
  std::map<BigInt, MultiplicityEntry> entries;  // every prime dividing some p_n
  // Valuation of a prime not in the map is 0 and reported as stabilized.
  MultiplicityEntry at(const BigInt& prime) const;
};

MultiplicityReport multiplicity(const Scale& scale);
nlohmann::json to_json(const MultiplicityReport& report);

struct TorsionComponent {
  BigInt prime;
  unsigned exponent = 0;
  BigInt order;  // prime^exponent
};

struct TorsionReport {
  std::vector<TorsionComponent> resolved;  // stabilized positive valuations
  std::vector<BigInt> unresolved;          // valuations still moving at this depth
};

TorsionReport torsion_structure(const Scale& scale);
nlohmann::json to_json(const TorsionReport& report);

// Smallest l in [1, max_multiple] such that l·g_n ≡ r (mod p_n) for some integer
// r with |r| <= l·rate + 1, where rate = rate_num / rate_den >= 0. This models
// "l·g lies in <1>" at a finite level: a genuine integer multiple of 1 shows
// up with a small symmetric representative, while a non-integer element of the
// odometer does not once p_n dominates the bound. nullopt means no such l.
std::optional<std::uint64_t> element_order_mod_one(const OdometerElement& g, std::size_t depth,
                                                   const BigInt& rate_num, const BigInt& rate_den,
                                                   std::uint64_t max_multiple);

struct SubgroupLevel {
  std::size_t level = 0;
  BigInt index;       // [Z_{p_n} : <generators>] = gcd(g_1, ..., g_k, p_n)
  BigInt order;       // p_n / index
  bool contains_one;  // index == 1
};

// Image of <generators> in each finite quotient Z_{p_n}.
std::vector<SubgroupLevel> subgroup_report(const std::vector<OdometerElement>& generators);

}  // namespace toeplitz::odometer
