#pragma once

// Products of Toeplitz systems over pairwise disjoint primes, optionally times
// a finite rotation Z_a, realizing Z^d ⊕ Z_a as an automorphism group.
//
// A product point is stored over a single-byte alphabet: each tuple of
// component symbols gets its own byte, assigned in lexicographic tuple order.

#include "toeplitz/holewords.hpp"
#include "toeplitz/pq_toeplitz.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace toeplitz::products {

enum class EntropyMode { Zero, Positive };
std::string to_string(EntropyMode m);
EntropyMode parse_entropy_mode(std::string_view text);

// Primes dividing any period of the system's periodic structure.
std::vector<BigInt> structure_primes(const ToeplitzSystem& sys);

class ProductSystem : public ToeplitzSystem {
 public:
  // Throws std::invalid_argument if two components share a prime or the
  // tuple alphabet needs more than 254 symbols.
  explicit ProductSystem(std::vector<std::shared_ptr<const ToeplitzSystem>> components);

  const std::vector<std::shared_ptr<const ToeplitzSystem>>& components() const { return components_; }
  std::size_t arity() const { return components_.size(); }

  char encode(std::string_view tuple) const;
  std::string decode(char symbol) const;
  // Splits an encoded window into one window per component.
  std::vector<std::string> split(std::string_view encoded) const;
  std::string join(const std::vector<std::string>& parts) const;

  Kind kind() const override { return Kind::Product; }
  const Alphabet& alphabet() const override { return alphabet_; }
  char evaluate(std::int64_t i) const override;
  SequenceWindow window(const Range& r) const override;
  std::optional<Range> domain() const override;
  std::size_t structure_depth() const override;
  // Product of the component periods at this level (they are coprime).
  std::int64_t period(std::size_t level) const override;
  nlohmann::json to_json() const override;
  std::string describe() const override;

 private:
  std::vector<std::shared_ptr<const ToeplitzSystem>> components_;
  std::map<std::string, char> code_;
  std::map<char, std::string> tuples_;
  Alphabet alphabet_;
};

// First d primes >= 3 that do not divide a.
std::vector<std::uint64_t> select_primes(std::size_t d, std::uint64_t a);

// The rotation +1 on Z_a as a system: period word of a distinct symbols.
std::shared_ptr<const ToeplitzSystem> cyclic_component(std::uint64_t a, std::size_t depth = 1);

struct GroupReport {
  std::size_t d = 0;
  std::uint64_t a = 1;
  EntropyMode entropy = EntropyMode::Zero;
  std::vector<std::uint64_t> primes;
  std::string expected_group;  // e.g. "Z^2 + Z_6"
  std::vector<std::string> generators;
};

struct Realization {
  std::shared_ptr<const ProductSystem> system;
  GroupReport report;
  nlohmann::json spec() const;
};

// d >= 1 components with scales (r_j^n), plus Z_a when a > 1. Zero entropy uses
// the single-hole seed a?b..b of length r_j; positive entropy uses toy blocks.
Realization realize_group(std::size_t d, std::uint64_t a, EntropyMode mode, std::size_t depth = 6);

// Sliding map on the product alphabet acting by maps[j] on component j.
pq::WindowMap tuple_map(const std::vector<pq::WindowMap>& maps, std::shared_ptr<const ProductSystem> sys);

struct CommutationReport {
  bool coordinatewise = true;
  bool commutes = true;
  bool factors = true;
  std::uint64_t windows_tested = 0;
  std::string detail;
  bool ok() const { return coordinatewise && commutes && factors; }
};

// Checks that phi acts coordinatewise (component j of the output ignores the
// other components of the input), commutes with the product shift, and sends
// factors to factors, on windows cut from the product point.
CommutationReport product_factor_commutes(const pq::WindowMap& phi, const ProductSystem& sys, std::size_t samples = 24);

nlohmann::json to_json(const GroupReport& r);
nlohmann::json to_json(const CommutationReport& r);

}  // namespace toeplitz::products
