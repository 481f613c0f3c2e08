#pragma once

// Factors of a Toeplitz point and the complexity function p_X(n).
//
// Two routes, both exact about what they claim:
//  * structural: for a coprime (p,q) seed with q >= 1, x = F_{w^∞}(x) and σ^q
//    is minimal, so every length-n factor is w^∞ read from some phase m with
//    its h_m(n) holes filled by a factor of length h_m(n). This gives the
//    language level by level with no window at all.
//  * windowed: distinct factors of x on [-L, L), L doubled until the counts
//    stop moving and L reaches the recurrence period of the level that covers n.

#include "toeplitz/holewords.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace toeplitz::language {

enum class Certification { Structure, Stabilized, DomainLimited };
std::string to_string(Certification c);

struct FactorSet {
  std::size_t length = 0;
  std::vector<std::string> words;  // sorted, distinct
  Certification certification = Certification::Structure;
  std::int64_t window_half = 0;  // L for windowed results, 0 for structural ones

  bool contains(std::string_view w) const;
};

struct Options {
  std::uint64_t memory_budget = std::uint64_t{1} << 30;
  // Force the windowed route even where the structural one applies.
  bool force_windowed = false;
  std::int64_t initial_half = 64;
  std::int64_t max_half = std::int64_t{1} << 23;
};

// Language of a coprime (p,q)-Toeplitz point, generated from the seed.
class StructuralLanguage {
 public:
  explicit StructuralLanguage(HoleWord w, std::uint64_t memory_budget = std::uint64_t{1} << 30);

  static bool applies(const HoleWord& w) { return w.is_generator() && w.is_coprime(); }

  const HoleWord& word() const { return word_; }
  // Sorted factors of length n.
  const std::vector<std::string>& factors(std::size_t n);
  std::uint64_t count(std::size_t n);
  // Smallest length from which each factor has a single generating phase, so
  // p_X(n) = Σ_m p_X(h_m(n)); 0 if none was found below the search limit.
  std::size_t unique_phase_length() const { return unique_phase_length_; }
  // Number of holes of w^∞ in [m, m+n).
  std::size_t holes_in(std::size_t m, std::size_t n) const;

 private:
  std::vector<std::string> generate(std::size_t n, std::size_t m, const std::vector<std::string>& fill) const;
  void seed_small_lengths();
  void find_unique_phase_length();
  void charge(const std::vector<std::string>& words);

  HoleWord word_;
  PeriodicSequence base_;
  std::uint64_t budget_;
  std::uint64_t used_ = 0;
  std::size_t seeded_ = 0;
  std::size_t unique_phase_length_ = 0;
  std::map<std::size_t, std::vector<std::string>> sets_;
  std::map<std::size_t, std::uint64_t> counts_;
};

// Number of distinct factors of each length 0..n_max inside `s`
// (suffix array + LCP).
std::vector<std::uint64_t> distinct_factor_counts(const std::string& s, std::size_t n_max);
// Sorted distinct factors of length n inside `s`.
std::vector<std::string> distinct_factors(const std::string& s, std::size_t n);

// Smallest window half-width that the stopping rule requires for length n:
// p_{k+1} for the least level k with p_k >= n, if the structure reaches it.
std::optional<std::int64_t> recurrence_horizon(const ToeplitzSystem& sys, std::size_t n);

FactorSet factors(const ToeplitzSystem& sys, std::size_t n, const Options& opts = {});

struct ComplexityRow {
  std::size_t n = 0;
  std::uint64_t count = 0;
  Certification certification = Certification::Structure;
};

struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // RMS of log-residuals
  std::size_t n_min = 0, n_max = 0, rows_used = 0;
};

struct ComplexityTable {
  std::vector<ComplexityRow> rows;  // n = 0..n_max
  std::optional<double> exponent;   // r = log(p/d)/log(p/q) when known
  std::optional<double> c1, c2;     // min / max of p_X(n)/n^r over n >= 1
  std::int64_t window_half = 0;
};

// r = log(p/d)/log(p/q) with d = gcd(p,q); nullopt when q = 0 or q = p.
std::optional<double> theoretical_exponent(std::uint64_t p, std::uint64_t q);
std::optional<double> theoretical_exponent(const ToeplitzSystem& sys);

ComplexityTable complexity_table(const ToeplitzSystem& sys, std::size_t n_max, const Options& opts = {});
// Least-squares slope of log p_X(n) against log n over n_min <= n <= n_max.
// Throws std::invalid_argument with fewer than 5 usable rows.
ExponentFit fit_exponent(const ComplexityTable& table, std::size_t n_min, std::size_t n_max);

void write_csv(std::ostream& out, const ComplexityTable& table);
// Two columns "log n  log p_X(n)" for n >= 1.
void write_plot_data(std::ostream& out, const ComplexityTable& table);
nlohmann::json to_json(const ComplexityTable& table);
nlohmann::json to_json(const ExponentFit& fit);

}  // namespace toeplitz::language
