#pragma once

// Automorphisms of a (p,q)-Toeplitz subshift: skeleton phases, hole contents,
// the maps φ_n, powers and roots of the shift, all as sliding block codes.

#include "toeplitz/holewords.hpp"
#include "toeplitz/language.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace toeplitz::pq {

// A sliding block code: output at k depends on input [k - r, k + r].
class WindowMap {
 public:
  using Rule = std::function<char(std::string_view)>;          // window of length 2r+1 -> symbol
  using Batch = std::function<std::string(std::string_view)>;  // length L -> length L - 2r

  WindowMap(std::int64_t radius, Rule rule, std::string label, Batch batch = {});

  std::int64_t radius() const { return radius_; }
  const std::string& label() const { return label_; }
  char rule(std::string_view window) const;
  // Applies the map to every full window of `input`. With a batch evaluator
  // this may use information from the whole input, which agrees with the
  // local rule on factors of the subshift.
  std::string apply(std::string_view input) const;
  SequenceWindow apply(const SequenceWindow& input) const;

 private:
  std::int64_t radius_;
  Rule rule_;
  Batch batch_;
  std::string label_;
};

WindowMap identity();
// σ^k: (σ^k z)_i = z_{i+k}.
WindowMap shift(std::int64_t k);
// f ∘ g.
WindowMap compose(const WindowMap& f, const WindowMap& g);
// f^l for l >= 0.
WindowMap power(const WindowMap& f, std::uint64_t l);

// Thrown when a window admits several phases.
class AmbiguousPhase : public std::runtime_error {
 public:
  explicit AmbiguousPhase(std::vector<std::int64_t> phases);
  const std::vector<std::int64_t>& phases() const { return phases_; }

 private:
  std::vector<std::int64_t> phases_;
};

// Thrown when no phase matches: the window is not a factor at this level.
class InconsistentPhase : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One period of T_n(w) with the bookkeeping shared by phase computations.
class Level {
 public:
  Level(const HoleWord& w, unsigned n);

  const HoleWord& word() const { return word_; }
  unsigned n() const { return n_; }
  const PeriodicSequence& skeleton() const { return skeleton_; }
  std::int64_t period() const { return skeleton_.period(); }      // p^n
  std::int64_t holes() const { return skeleton_.holes_per_period(); }  // q^n
  // Distance from coordinate c of T_n(w) to the next hole strictly right of it.
  std::int64_t next_hole_distance(std::int64_t c) const;

 private:
  HoleWord word_;
  unsigned n_;
  PeriodicSequence skeleton_;
  std::vector<std::int64_t> next_hole_;
};

// All m in [0, p^n) with window_i = T_n(w)_{i+m} at every non-hole i+m.
std::vector<std::int64_t> consistent_phases(const SequenceWindow& window, const Level& level);

struct PhaseResult {
  unsigned level = 0;
  std::int64_t phase = 0;
  std::int64_t window_length = 0;
  bool unique = true;
};

// Throws AmbiguousPhase or InconsistentPhase.
PhaseResult phase(const SequenceWindow& window, const Level& level);

// H_n(z) on every rank whose hole lands inside the window: H_n(z)_j = z_{c_j - m}
// where c_j is the rank-j hole of T_n(w), so F_{T_n(w)}(H_n(z)) = σ^{-m} z.
SequenceWindow hole_contents(const SequenceWindow& window, const Level& level);

// φ_n evaluated straight from its definition σ^m F_{T_n(w)}(σ H_n(z)), on the
// part of the window where the formula has data.
SequenceWindow phi_by_formula(const SequenceWindow& window, const Level& level);

struct PhiOptions {
  std::int64_t max_radius = 1 << 14;
  language::Options language;
};

// φ_n as a sliding block code of minimal radius for the factors of X.
WindowMap make_phi(const HoleWord& w, unsigned n, const PhiOptions& opts = {});

// True iff f and g agree on every factor of length 2·max(r_f, r_g) + 1.
bool extensional_equal(const WindowMap& f, const WindowMap& g, const ToeplitzSystem& sys,
                       const language::Options& opts = {}, std::uint64_t* factors_tested = nullptr);

// Every k in [-bound, bound] with f = sigma^k on the language, found in one
// pass over the factors of length 2·max(r, bound) + 1.
std::vector<std::int64_t> matching_shifts(const WindowMap& f, const ToeplitzSystem& sys, std::int64_t bound,
                                          const language::Options& opts = {}, std::uint64_t* factors_tested = nullptr);

struct Root {
  WindowMap map;
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t order = 0;  // q^n
};

// a·p^n = b·q^n + 1 with the least positive a; ψ = φ_n^a ∘ σ^{-b}.
// Throws BudgetExceeded when ψ^{q^n} would exceed max_radius.
Root root_of_shift(const HoleWord& w, unsigned n, const PhiOptions& opts = {});

nlohmann::json to_json(const PhaseResult& r);

}  // namespace toeplitz::pq
