#pragma once

// Iterated block families B_{i,n} for a Toeplitz point with a prescribed
// odometer and many blocks per level.
//
// Level 1 is k_1 single letters. A level-n block is
//   B_{1,n-1} .. B_{⌊k/2⌋,n-1}  [middle]  B_{⌊k/2⌋+1,n-1} .. B_{k,n-1}     (k = k_{n-1})
// where the middle is any arrangement of B_{2,n-1}..B_{k,n-1} using B_2 exactly
// d̂_n times and every other block exactly d_n times. Blocks of a level are
// taken in lexicographic order of their arrangements.
//
// Faithful mode picks the least index i_n satisfying the growth inequality and
// keeps every arrangement; levels too large to store are kept symbolically.
// Toy mode picks the least index that yields at least 2 k_{n-1} blocks and
// keeps only as many as needed; the analytic inequalities are not enforced.

#include "toeplitz/bigint.hpp"
#include "toeplitz/holewords.hpp"
#include "toeplitz/odometer.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace toeplitz::blocks {

enum class Mode { Toy, Faithful };
std::string to_string(Mode m);
Mode parse_mode(std::string_view text);

struct BlockSpec {
  unsigned k1 = 4;
  std::int64_t d0 = 2;
  odometer::Scale scale{std::vector<BigInt>{1}};
  std::size_t levels = 3;
  Mode mode = Mode::Toy;
  bool relaxed_c2 = false;
  // Optional lower bounds on k_n, indexed by n - 1.
  std::vector<std::uint64_t> requested;
  // Characters of stored blocks, summed over levels.
  std::uint64_t memory_budget = std::uint64_t{1} << 28;
  // Faithful mode stores a level only if it has at most this many blocks.
  std::uint64_t max_blocks_per_level = 1u << 16;
};

nlohmann::json to_json(const BlockSpec& spec);
BlockSpec block_spec_from_json(const nlohmann::json& j);

struct Level {
  std::size_t n = 0;
  std::size_t index = 0;  // i_n, 1-based into the (1-prefixed) scale
  BigInt length;          // p_{i_n}
  std::optional<BigInt> count;  // k_n when known exactly
  double log_count = 0;         // log k_n
  std::int64_t middle = 0;      // M = p_{i_n}/p_{i_{n-1}} - k_{n-1}
  std::int64_t d = 0;           // d_n
  std::int64_t d_hat = 0;       // d̂_n
  std::optional<BigInt> available;  // number of admissible arrangements
  double log_available = 0;
  bool inequality_holds = false;
  bool materialized = false;
  std::vector<std::string> blocks;                       // B_{1,n}..B_{k_n,n}
  std::vector<std::vector<std::uint32_t>> arrangement;   // full sequence of 0-based level-(n-1) indices
};

// Symbols used for k_1 letters: printable ASCII without '?', then high bytes.
std::string block_alphabet(unsigned k1);

// f(d,k) = (dk)! / (d!)^k and its logarithm.
BigInt partition_count(std::uint64_t d, std::uint64_t k);
double log_partition_count(double d, double k);

class Construction {
 public:
  // Throws std::invalid_argument on inconsistent parameters or when the scale
  // runs out before a level with enough blocks is found.
  static Construction build(const BlockSpec& spec);

  const BlockSpec& spec() const { return spec_; }
  const odometer::Scale& scale() const { return scale_; }  // with p_1 = 1
  const std::vector<Level>& levels() const { return levels_; }
  const Level& level(std::size_t n) const;  // 1-based
  std::size_t materialized_depth() const;
  const std::string& alphabet() const { return alphabet_; }
  // Why building stopped before spec.levels, if it did.
  const std::optional<std::string>& stop_reason() const { return stop_reason_; }

  // x on [-p_{i_N}, p_{i_N}) = B_{k_N,N} B_{1,N} for the top stored level N.
  Range domain() const;
  SequenceWindow point(const Range& r) const;

 private:
  BlockSpec spec_;
  odometer::Scale scale_{std::vector<BigInt>{1}};
  std::vector<Level> levels_;
  std::string alphabet_;
  std::optional<std::string> stop_reason_;
  std::string point_;  // x on domain()
};

class BlocksSystem : public ToeplitzSystem {
 public:
  explicit BlocksSystem(std::shared_ptr<const Construction> c);

  const Construction& construction() const { return *c_; }
  Kind kind() const override { return Kind::Blocks; }
  const Alphabet& alphabet() const override { return alphabet_; }
  char evaluate(std::int64_t i) const override;
  SequenceWindow window(const Range& r) const override;
  std::optional<Range> domain() const override { return c_->domain(); }
  std::size_t structure_depth() const override { return c_->materialized_depth(); }
  std::int64_t period(std::size_t level) const override;
  nlohmann::json to_json() const override;
  std::string describe() const override;

 private:
  std::shared_ptr<const Construction> c_;
  Alphabet alphabet_;
};

struct OverlapResult {
  bool ok = true;
  std::optional<std::array<std::size_t, 3>> witness;  // (i, j, k): B_i inside B_j B_k
  std::int64_t offset = 0;
  std::uint64_t pairs_checked = 0;
};

// Each block occurs in every B_j B_k only as prefix or suffix.
OverlapResult check_trivial_overlap(const std::vector<std::string>& blocks);
OverlapResult check_trivial_overlap(const Construction& c, std::size_t n);

struct ConditionReport {
  bool ok = true;
  std::string detail;
  std::uint64_t blocks_checked = 0;
};

// Re-parses every level-n block into level-(n-1) blocks letter by letter and
// checks the fixed prefix/suffix and the exact middle multiplicities.
ConditionReport check_conditions(const Construction& c, std::size_t n);

struct FrequencyRow {
  std::size_t block = 0;  // 1-based i
  std::uint64_t occurrences = 0;
  std::int64_t window = 0;
  std::int64_t predicted_numerator = 0;  // 1 + d_{i,n}
  std::int64_t predicted_denominator = 0;  // p_{i_{n+1}}
  bool exact = false;  // occurrences / window == predicted
  double deviation = 0;
};

struct FrequencyTable {
  std::size_t level = 0;
  std::int64_t window = 0;
  std::vector<FrequencyRow> rows;
  double max_deviation = 0;
  bool all_exact = true;
  double predicted_total = 0;  // Σ (1 + d_{i,n}) p_{i_n} / p_{i_{n+1}}
};

// Occurrence counts of each B_{i,n} in x over a whole number of level-(n+1)
// periods starting at -p_{i_N}. Needs window_length >= 10 p_{i_{n+1}}.
FrequencyTable frequencies(const Construction& c, std::size_t n, std::int64_t window_length);

struct EntropyBounds {
  std::size_t depth = 0;
  double max_log_ratio = 0;  // max_n log k_n / p_{i_n}
  double chain = 0;          // Π (p_{i_{n-1}}/p_{i_n})(d_n - 1)(k_{n-1} - 2) · log k_1 / p_{i_1}
  double product_bound = 0;  // exp(-C Σ_{n>=2} 1/(n² D_0)) · log k_1 / p_{i_1}
  double c = 0;
  double r = 0;
};

EntropyBounds entropy_lower_bound(const Construction& c, std::size_t depth);

// log(#distinct factors of length p_{i_n} in the stored point) / p_{i_n}.
double empirical_entropy(const Construction& c, std::size_t n);

struct ExtensibilityReport {
  bool ok = true;
  std::uint64_t occurrences = 0;  // occurrences of B_{1,n} with full context in range
  std::optional<std::int64_t> counterexample;
};

// Every occurrence of B_{1,n} is preceded by B_{k_{n-1},n-1} B_{⌊k_n/2⌋+1,n}..B_{k_n,n}
// and followed by B_{2,n}..B_{⌊k_n/2⌋,n} B_{1,n-1}. Needs n >= 2 and level n+1 stored.
ExtensibilityReport check_extensible(const Construction& c, std::size_t n);

nlohmann::json to_json(const Construction& c);
nlohmann::json to_json(const OverlapResult& r);
nlohmann::json to_json(const FrequencyTable& t);
nlohmann::json to_json(const EntropyBounds& e);

}  // namespace toeplitz::blocks
