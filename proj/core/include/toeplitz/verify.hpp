#pragma once

// Exact checks of the structural identities of a (p,q)-Toeplitz seed and of
// the automorphisms phi_n, bundled into one deterministic report.

#include "toeplitz/holewords.hpp"
#include "toeplitz/pq_toeplitz.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace toeplitz::verify {

struct Check {
  std::string name;
  unsigned level = 0;  // 0 when not tied to one level
  bool ok = true;
  bool skipped = false;
  std::uint64_t cases = 0;
  std::string detail;
};

struct Options {
  std::uint64_t trials = 100;              // random windows per randomized check
  std::uint64_t seed = 0x70e91177ULL;
  std::int64_t max_power_radius = 512;     // skip phi power checks beyond this radius
  pq::PhiOptions phi = default_phi();

  static pq::PhiOptions default_phi() {
    pq::PhiOptions o;
    o.language.memory_budget = std::uint64_t{1} << 26;
    return o;
  }
};

// F_{T_n(w)}(x) = x on a centred range of the given length (>= 4 p^n by default).
Check fixed_point(const HoleWord& w, unsigned n, std::int64_t length = 0);
// F_{T_n}(sigma^{q^n} y) = sigma^{p^n} F_{T_n}(y) on pseudorandom y.
Check commutation(const HoleWord& w, unsigned n, const Options& opts = {});
// skeleton(x, n) = T_n(w) on a range of length 4 p^n, certified.
Check skeleton_identity(const HoleWord& w, unsigned n);
// One period of T_n(w) has length p^n and q^n holes.
Check hole_count(const HoleWord& w, unsigned n);
// x_i = T_n(w)_i at every non-hole and evaluate agrees with T_{n}-filling.
Check evaluate_agrees(const HoleWord& w, unsigned n);
// F_{T_{n+1}} = F_{w^inf} o F_{T_n}, plus F_{F_a(b)} = F_a o F_b on random periodic a, b.
Check semigroup(const HoleWord& w, unsigned n, const Options& opts = {});
// p^n is window-certified essential for n = 1..levels.
Check essential(const HoleWord& w, std::size_t levels);

// phi_n checks; skipped (not failed) for seeds outside their scope.
std::vector<Check> phi_checks(const HoleWord& w, unsigned n, const Options& opts = {});

struct Report {
  std::string word;
  std::size_t levels = 0;
  std::vector<Check> checks;
  bool ok() const;
};

Report verify_all(const HoleWord& w, std::size_t levels, const Options& opts = {});

nlohmann::json to_json(const Check& c);
nlohmann::json to_json(const Report& r);

}  // namespace toeplitz::verify
