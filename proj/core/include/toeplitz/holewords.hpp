#pragma once

// Words with holes, the hole-filling operator F_x(y), and Toeplitz points.
//
// Coordinates are absolute bi-infinite indices. A periodic word u^∞ places a
// copy of u starting at coordinate 0. Holes of a sequence x are ranked over
// all of Z: rank 0 is the first hole at a coordinate >= 0, ranks grow to the
// right and run through the negatives to the left. F_x(y) writes y_j into the
// hole of rank j.

#include "toeplitz/bigint.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace toeplitz {

inline constexpr char kHole = '?';

// Half-open coordinate interval [begin, end).
struct Range {
  std::int64_t begin = 0;
  std::int64_t end = 0;

  std::int64_t size() const { return end > begin ? end - begin : 0; }
  bool empty() const { return end <= begin; }
  bool contains(std::int64_t i) const { return begin <= i && i < end; }
  bool contains(const Range& r) const { return r.empty() || (begin <= r.begin && r.end <= end); }
  Range shifted(std::int64_t k) const { return {begin + k, end + k}; }
  bool operator==(const Range&) const = default;
};

std::string to_string(const Range& r);
// Parses "a:b" into [a, b).
Range parse_range(std::string_view text);

class Alphabet {
 public:
  // Distinct symbols, '?' excluded, nonempty.
  explicit Alphabet(std::string symbols);
  // Sorted distinct non-hole symbols of a word.
  static Alphabet of(std::string_view word);

  const std::string& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  bool contains(char c) const { return symbols_.find(c) != std::string::npos; }
  bool operator==(const Alphabet&) const = default;

 private:
  std::string symbols_;
};

class HoleWord {
 public:
  // Parses text like "a?b?c"; any byte except '?' is a letter.
  static HoleWord parse(std::string_view text);

  const std::string& str() const { return symbols_; }
  std::size_t length() const { return symbols_.size(); }
  std::size_t hole_count() const { return holes_.size(); }
  const std::vector<std::size_t>& holes() const { return holes_; }
  char operator[](std::size_t i) const { return symbols_[i]; }
  Alphabet alphabet() const { return Alphabet::of(symbols_); }

  // q >= 1 and neither end is a hole, so iterating F converges to a hole-free point.
  bool is_generator() const;
  std::uint64_t pq_gcd() const;  // gcd(p, q); equals p when q = 0
  bool is_coprime() const { return pq_gcd() == 1; }

  bool operator==(const HoleWord&) const = default;

 private:
  explicit HoleWord(std::string symbols);
  std::string symbols_;
  std::vector<std::size_t> holes_;
};

class SequenceWindow {
 public:
  SequenceWindow() = default;
  SequenceWindow(std::int64_t start, std::string symbols) : start_(start), symbols_(std::move(symbols)) {}

  std::int64_t start() const { return start_; }
  std::int64_t end() const { return start_ + static_cast<std::int64_t>(symbols_.size()); }
  Range range() const { return {start_, end()}; }
  std::size_t size() const { return symbols_.size(); }
  const std::string& symbols() const { return symbols_; }

  bool covers(const Range& r) const { return range().contains(r); }
  // Symbol at absolute coordinate i; throws std::out_of_range outside the window.
  char at(std::int64_t i) const;
  SequenceWindow slice(const Range& r) const;
  // Window of σ^k z given a window of z: (σ^k z)_i = z_{i+k}.
  SequenceWindow shifted(std::int64_t k) const { return {start_ - k, symbols_}; }
  std::size_t hole_count() const;

  bool operator==(const SequenceWindow&) const = default;

 private:
  std::int64_t start_ = 0;
  std::string symbols_;
};

nlohmann::json to_json(const SequenceWindow& w);

// Raised when a window does not reach every coordinate (or hole rank) needed.
class InsufficientWindow : public std::runtime_error {
 public:
  InsufficientWindow(std::string which, Range missing);
  const std::string& which() const { return which_; }
  const Range& missing() const { return missing_; }

 private:
  std::string which_;
  Range missing_;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The periodic sequence u^∞ over A ∪ {?}, with O(1) hole-rank arithmetic.
class PeriodicSequence {
 public:
  explicit PeriodicSequence(std::string period);

  const std::string& period_word() const { return period_; }
  std::int64_t period() const { return static_cast<std::int64_t>(period_.size()); }
  std::int64_t holes_per_period() const { return static_cast<std::int64_t>(hole_offsets_.size()); }
  const std::vector<std::int64_t>& hole_offsets() const { return hole_offsets_; }

  char at(std::int64_t i) const { return period_[static_cast<std::size_t>(floor_mod(i, period()))]; }
  bool is_hole(std::int64_t i) const { return at(i) == kHole; }
  // Signed number of holes strictly before coordinate c, counted from 0:
  // #holes in [0, c) for c >= 0 and -#holes in [c, 0) for c < 0. For a hole
  // at c this is its rank.
  std::int64_t holes_before(std::int64_t c) const;
  std::int64_t hole_count(const Range& r) const { return holes_before(r.end) - holes_before(r.begin); }
  // Coordinate of the hole of rank j; requires at least one hole per period.
  std::int64_t hole_coordinate(std::int64_t rank) const;
  // Largest distance between consecutive holes (0 if no holes).
  std::int64_t max_hole_gap() const;

  SequenceWindow window(const Range& r) const;

 private:
  std::string period_;
  std::vector<std::int64_t> hole_offsets_;
  std::vector<std::int64_t> prefix_;  // prefix_[r] = #holes in [0, r)
};

// Rank interval of the holes of x inside r.
Range hole_rank_range(const PeriodicSequence& x, const Range& r);

// F_x(y) restricted to `out`. The x window must cover `out` and coordinate 0's
// side of it (so ranks can be counted); y must cover every rank that lands in
// `out`. Missing data raises InsufficientWindow; nothing is truncated.
SequenceWindow fill(const SequenceWindow& x, const SequenceWindow& y, const Range& out);
SequenceWindow fill(const PeriodicSequence& x, const SequenceWindow& y, const Range& out);

// One period u_n of T_n(w) (T_1 = w^∞, T_{n+1} = F_{w^∞}(T_n)); length p^n with q^n holes.
// Throws BudgetExceeded when p^n exceeds max_length.
PeriodicSequence iterate(const HoleWord& w, unsigned n, std::int64_t max_length = std::int64_t{1} << 28);

// ---------------------------------------------------------------------------
// Toeplitz systems

struct EvaluationLimits {
  std::size_t max_recursion = 4096;
};

class ToeplitzSystem {
 public:
  enum class Kind { ConstantWord, PerLevel, Blocks, Product };

  virtual ~ToeplitzSystem() = default;

  virtual Kind kind() const = 0;
  virtual const Alphabet& alphabet() const = 0;
  // x_i; '?' only for non-generator systems.
  virtual char evaluate(std::int64_t i) const = 0;
  virtual SequenceWindow window(const Range& r) const;
  // Coordinates where evaluate is defined; nullopt means all of Z.
  virtual std::optional<Range> domain() const { return std::nullopt; }

  // Periodic structure p_1 | p_2 | ... known to this system (levels 1..structure_depth()).
  virtual std::size_t structure_depth() const = 0;
  virtual std::int64_t period(std::size_t level) const = 0;
  // Periodic hole sequence whose non-hole coordinates are known to lie in
  // Per_{p_level}(x) (T_n(w) or W_n); nullopt when the system has none.
  virtual std::optional<PeriodicSequence> structural_skeleton(std::size_t /*level*/) const { return std::nullopt; }

  virtual bool is_generator() const { return true; }
  virtual nlohmann::json to_json() const = 0;
  virtual std::string describe() const = 0;
};

std::string to_string(ToeplitzSystem::Kind kind);

// The (p,q)-Toeplitz point x = lim T_n(w).
class ConstantWordSystem : public ToeplitzSystem {
 public:
  ConstantWordSystem(HoleWord w, std::size_t depth, EvaluationLimits limits = {});

  const HoleWord& word() const { return word_; }
  Kind kind() const override { return Kind::ConstantWord; }
  const Alphabet& alphabet() const override { return alphabet_; }
  char evaluate(std::int64_t i) const override;
  std::size_t structure_depth() const override { return depth_; }
  std::int64_t period(std::size_t level) const override;
  std::optional<PeriodicSequence> structural_skeleton(std::size_t level) const override;
  bool is_generator() const override { return word_.is_generator(); }
  // Non-coprime seeds are accepted; complexity uses r = log(p/d)/log(p/q).
  bool is_flagged_noncoprime() const { return word_.hole_count() > 0 && !word_.is_coprime(); }
  nlohmann::json to_json() const override;
  std::string describe() const override;

 private:
  HoleWord word_;
  Alphabet alphabet_;
  std::size_t depth_;
  EvaluationLimits limits_;
  PeriodicSequence base_;
};

// W_1 = w_1^∞, W_{n+1} = F_{W_n}(w_{n+1}^∞). The last word repeats for every
// level past the end of the list.
class PerLevelSystem : public ToeplitzSystem {
 public:
  PerLevelSystem(std::vector<HoleWord> words, std::size_t depth, EvaluationLimits limits = {});

  const std::vector<HoleWord>& words() const { return words_; }
  const HoleWord& word_at(std::size_t level) const;  // 1-based
  Kind kind() const override { return Kind::PerLevel; }
  const Alphabet& alphabet() const override { return alphabet_; }
  char evaluate(std::int64_t i) const override;
  std::size_t structure_depth() const override { return depth_; }
  std::int64_t period(std::size_t level) const override;
  std::optional<PeriodicSequence> structural_skeleton(std::size_t level) const override;
  bool is_generator() const override;
  nlohmann::json to_json() const override;
  std::string describe() const override;

 private:
  std::vector<HoleWord> words_;
  std::vector<PeriodicSequence> bases_;
  Alphabet alphabet_;
  std::size_t depth_;
  EvaluationLimits limits_;
};

// Single-hole seed u?v with u = a, v = b^{len-2}.
HoleWord single_hole_word(std::size_t length, char a = 'a', char b = 'b');

// ---------------------------------------------------------------------------
// Periodic parts

struct PerSet {
  std::int64_t period = 0;
  Range range;
  std::vector<std::int64_t> coordinates;  // sorted
  bool certified = false;                 // exact, not just horizon-consistent
  std::int64_t horizon = 0;               // K: shifts |k| <= K checked
};

// Per_p(x) ∩ range, approximated by checking x_i = x_{i+kp} for |k| <= horizon.
// Certified when it matches the structural skeleton's non-hole set, which is
// a lower bound for Per_p(x).
PerSet per_set(const ToeplitzSystem& sys, std::int64_t p, const Range& range, std::int64_t horizon = 32);

struct SkeletonResult {
  std::size_t level = 0;
  SequenceWindow window;
  bool certified = false;
};

// S_{p_level}(x) on range: x_i on Per_{p_level}(x), '?' elsewhere.
SkeletonResult skeleton(const ToeplitzSystem& sys, std::size_t level, const Range& range, std::int64_t horizon = 32);

struct EssentialPeriod {
  std::size_t level = 0;
  std::int64_t period = 0;
  bool essential = false;  // window-certified: every p < period has a different Per_p on the window
  std::optional<std::int64_t> matching_period;  // when undetermined: a smaller p whose Per_p matched
};

// Checks each level's period on a window of length 2·p_{n+1} (or 2·p_n at the last level).
std::vector<EssentialPeriod> essential_periods(const ToeplitzSystem& sys, std::size_t depth);

// Same test on an explicit materialised window: p-periodicity of a coordinate
// is judged using every shift that stays inside `data`.
bool is_essential_on_window(const SequenceWindow& data, std::int64_t period, const Range& test,
                            std::optional<std::int64_t>* matching = nullptr);

// Smallest P <= max_period with x_i = x_{i+P} for all i in the window, if any.
// No period found is evidence of aperiodicity, not a certificate.
std::optional<std::int64_t> find_period(const ToeplitzSystem& sys, std::int64_t max_period, std::int64_t window_length);

}  // namespace toeplitz
