#include "toeplitz/language.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <string_view>
#include <unordered_set>

namespace toeplitz::language {

std::string to_string(Certification c) {
  switch (c) {
    case Certification::Structure: return "certified-by-structure";
    case Certification::Stabilized: return "stabilized-at-window";
    case Certification::DomainLimited: return "domain-limited";
  }
  return "unknown";
}

bool FactorSet::contains(std::string_view w) const {
  return std::binary_search(words.begin(), words.end(), w, [](std::string_view a, std::string_view b) { return a < b; });
}

// ---------------------------------------------------------------------------

StructuralLanguage::StructuralLanguage(HoleWord w, std::uint64_t memory_budget)
    : word_(std::move(w)), base_(word_.str()), budget_(memory_budget) {
  if (!applies(word_)) throw std::invalid_argument("structural enumeration needs a coprime generator seed");
  seed_small_lengths();
  find_unique_phase_length();
}

std::size_t StructuralLanguage::holes_in(std::size_t m, std::size_t n) const {
  const auto b = static_cast<std::int64_t>(m);
  return static_cast<std::size_t>(base_.hole_count({b, b + static_cast<std::int64_t>(n)}));
}

std::vector<std::string> StructuralLanguage::generate(std::size_t n, std::size_t m,
                                                      const std::vector<std::string>& fill) const {
  std::vector<std::string> out;
  out.reserve(fill.size());
  const std::size_t p = word_.length();
  for (const auto& v : fill) {
    std::string s(n, ' ');
    std::size_t k = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const char c = word_[(m + t) % p];
      s[t] = c == kHole ? v[k++] : c;
    }
    out.push_back(std::move(s));
  }
  return out;
}

void StructuralLanguage::charge(const std::vector<std::string>& words) {
  for (const auto& w : words) used_ += w.size() + sizeof(std::string);
  if (used_ > budget_) throw BudgetExceeded("factor sets exceed memory budget of " + std::to_string(budget_) + " bytes");
}

void StructuralLanguage::seed_small_lengths() {
  // Least fixed point of F_n = ∪_m G_m(F_{h_m(n)}) for n <= p, where h_m(n) <= n.
  const std::size_t top = word_.length();
  std::vector<std::set<std::string>> f(top + 1);
  f[0].insert(std::string());
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t n = 1; n <= top; ++n) {
      for (std::size_t m = 0; m < word_.length(); ++m) {
        const std::vector<std::string> fill(f[holes_in(m, n)].begin(), f[holes_in(m, n)].end());
        for (auto& s : generate(n, m, fill)) changed |= f[n].insert(std::move(s)).second;
      }
    }
  }
  for (std::size_t n = 0; n <= top; ++n) {
    std::vector<std::string> v(f[n].begin(), f[n].end());
    charge(v);
    sets_[n] = std::move(v);
  }
  seeded_ = top;
}

void StructuralLanguage::find_unique_phase_length() {
  // Once the phases are disjoint at some length they stay disjoint: a clash
  // at a longer length would restrict to a clash of prefixes.
  const std::size_t limit = 8 * word_.length();
  for (std::size_t n = 1; n <= limit; ++n) {
    std::uint64_t sum = 0;
    for (std::size_t m = 0; m < word_.length(); ++m) sum += factors(holes_in(m, n)).size();
    if (sum == factors(n).size()) {
      unique_phase_length_ = n;
      return;
    }
  }
}

const std::vector<std::string>& StructuralLanguage::factors(std::size_t n) {
  if (auto it = sets_.find(n); it != sets_.end()) return it->second;
  std::vector<std::string> all;
  for (std::size_t m = 0; m < word_.length(); ++m) {
    const auto& fill = factors(holes_in(m, n));
    auto part = generate(n, m, fill);
    all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  charge(all);
  return sets_[n] = std::move(all);
}

std::uint64_t StructuralLanguage::count(std::size_t n) {
  if (n <= seeded_ || unique_phase_length_ == 0 || n < unique_phase_length_ || sets_.count(n))
    return factors(n).size();
  if (auto it = counts_.find(n); it != counts_.end()) return it->second;
  std::uint64_t sum = 0;
  for (std::size_t m = 0; m < word_.length(); ++m) sum += count(holes_in(m, n));
  return counts_[n] = sum;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::int32_t> suffix_array(const std::string& s) {
  const auto n = static_cast<std::int32_t>(s.size());
  std::vector<std::int32_t> sa(n), rank(n), tmp(n), cnt;
  if (n == 0) return sa;
  std::iota(sa.begin(), sa.end(), 0);
  std::stable_sort(sa.begin(), sa.end(), [&](std::int32_t a, std::int32_t b) {
    return static_cast<unsigned char>(s[a]) < static_cast<unsigned char>(s[b]);
  });
  rank[sa[0]] = 0;
  for (std::int32_t i = 1; i < n; ++i) rank[sa[i]] = rank[sa[i - 1]] + (s[sa[i]] != s[sa[i - 1]]);
  for (std::int32_t k = 1; rank[sa[n - 1]] < n - 1; k <<= 1) {
    // Order by second key: suffixes running off the end first, then by rank[i + k].
    std::int32_t pos = 0;
    for (std::int32_t i = n - k; i < n; ++i) tmp[pos++] = i;
    for (std::int32_t i = 0; i < n; ++i)
      if (sa[i] >= k) tmp[pos++] = sa[i] - k;
    // Stable counting sort by first key.
    cnt.assign(static_cast<std::size_t>(rank[sa[n - 1]]) + 1, 0);
    for (std::int32_t i = 0; i < n; ++i) ++cnt[rank[i]];
    std::partial_sum(cnt.begin(), cnt.end(), cnt.begin());
    for (std::int32_t i = n - 1; i >= 0; --i) sa[--cnt[rank[tmp[i]]]] = tmp[i];
    auto second = [&](std::int32_t i) { return i + k < n ? rank[i + k] : -1; };
    tmp[sa[0]] = 0;
    for (std::int32_t i = 1; i < n; ++i) {
      const bool same = rank[sa[i]] == rank[sa[i - 1]] && second(sa[i]) == second(sa[i - 1]);
      tmp[sa[i]] = tmp[sa[i - 1]] + !same;
    }
    rank.swap(tmp);
  }
  return sa;
}

// lcp[i] = LCP(suffix sa[i-1], suffix sa[i]), lcp[0] = 0 (Kasai).
std::vector<std::int32_t> lcp_array(const std::string& s, const std::vector<std::int32_t>& sa) {
  const auto n = static_cast<std::int32_t>(s.size());
  std::vector<std::int32_t> rank(n), lcp(n, 0);
  for (std::int32_t i = 0; i < n; ++i) rank[sa[i]] = i;
  std::int32_t h = 0;
  for (std::int32_t i = 0; i < n; ++i) {
    if (rank[i] == 0) {
      h = 0;
      continue;
    }
    const std::int32_t j = sa[rank[i] - 1];
    while (i + h < n && j + h < n && s[i + h] == s[j + h]) ++h;
    lcp[rank[i]] = h;
    if (h > 0) --h;
  }
  return lcp;
}

}  // namespace

std::vector<std::uint64_t> distinct_factor_counts(const std::string& s, std::size_t n_max) {
  if (s.size() > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
    throw BudgetExceeded("window too long for suffix array");
  std::vector<std::uint64_t> out(n_max + 1, 0);
  out[0] = 1;
  if (s.empty()) return out;
  const auto sa = suffix_array(s);
  const auto lcp = lcp_array(s, sa);
  // #distinct of length l = #suffixes of length >= l - #adjacent pairs with lcp >= l.
  std::vector<std::uint64_t> at_least(n_max + 2, 0);
  for (std::size_t i = 1; i < lcp.size(); ++i) ++at_least[std::min<std::size_t>(static_cast<std::size_t>(lcp[i]), n_max)];
  for (std::size_t l = n_max; l-- > 0;) at_least[l] += at_least[l + 1];
  for (std::size_t l = 1; l <= n_max; ++l) {
    if (l > s.size()) break;
    out[l] = (s.size() - l + 1) - at_least[l];
  }
  return out;
}

std::vector<std::string> distinct_factors(const std::string& s, std::size_t n) {
  std::unordered_set<std::string_view> seen;
  const std::string_view view(s);
  for (std::size_t i = 0; i + n <= s.size(); ++i) seen.insert(view.substr(i, n));
  std::vector<std::string> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::int64_t> recurrence_horizon(const ToeplitzSystem& sys, std::size_t n) {
  const std::size_t depth = std::min<std::size_t>(sys.structure_depth(), 64);
  for (std::size_t k = 1; k < depth; ++k) {
    try {
      if (sys.period(k) >= static_cast<std::int64_t>(n)) return sys.period(k + 1);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

namespace {

struct WindowedScan {
  std::string symbols;
  std::int64_t half = 0;
  Certification certification = Certification::Stabilized;
};

// Doubles L until `measure` returns the same value three times in a row and
// L has reached the recurrence horizon, or the system domain is exhausted.
template <typename Measure>
WindowedScan scan_windows(const ToeplitzSystem& sys, std::size_t n, const Options& opts, Measure&& measure) {
  const auto horizon = recurrence_horizon(sys, n);
  std::int64_t half = std::max<std::int64_t>(opts.initial_half, static_cast<std::int64_t>(n));
  std::vector<decltype(measure(std::string()))> history;
  for (;;) {
    Range r{-half, half};
    bool clipped = false;
    if (auto d = sys.domain()) {
      const Range c{std::max(r.begin, d->begin), std::min(r.end, d->end)};
      clipped = !(c == r);
      r = c;
    }
    if (static_cast<std::uint64_t>(r.size()) * 16 > opts.memory_budget)
      throw BudgetExceeded("window of half-width " + std::to_string(half) + " exceeds memory budget");
    std::string s = sys.window(r).symbols();
    history.push_back(measure(s));
    const std::size_t h = history.size();
    const bool stable = h >= 3 && history[h - 1] == history[h - 2] && history[h - 2] == history[h - 3];
    if (clipped) return {std::move(s), half, Certification::DomainLimited};
    if (stable && (!horizon || half >= *horizon)) return {std::move(s), half, Certification::Stabilized};
    if (half > opts.max_half) throw BudgetExceeded("factor counts did not stabilize by half-width " + std::to_string(half));
    half *= 2;
  }
}

}  // namespace

FactorSet factors(const ToeplitzSystem& sys, std::size_t n, const Options& opts) {
  if (!opts.force_windowed && sys.kind() == ToeplitzSystem::Kind::ConstantWord) {
    const auto& w = static_cast<const ConstantWordSystem&>(sys).word();
    if (StructuralLanguage::applies(w)) {
      StructuralLanguage lang(w, opts.memory_budget);
      return {n, lang.factors(n), Certification::Structure, 0};
    }
  }
  auto scan = scan_windows(sys, n, opts, [n](const std::string& s) { return distinct_factor_counts(s, n).back(); });
  return {n, distinct_factors(scan.symbols, n), scan.certification, scan.half};
}

std::optional<double> theoretical_exponent(std::uint64_t p, std::uint64_t q) {
  if (q == 0 || q >= p) return std::nullopt;
  const double d = static_cast<double>(std::gcd(p, q));
  return std::log(static_cast<double>(p) / d) / std::log(static_cast<double>(p) / static_cast<double>(q));
}

std::optional<double> theoretical_exponent(const ToeplitzSystem& sys) {
  if (sys.kind() != ToeplitzSystem::Kind::ConstantWord) return std::nullopt;
  const auto& w = static_cast<const ConstantWordSystem&>(sys).word();
  return theoretical_exponent(w.length(), w.hole_count());
}

ComplexityTable complexity_table(const ToeplitzSystem& sys, std::size_t n_max, const Options& opts) {
  ComplexityTable table;
  bool structural = false;
  if (!opts.force_windowed && sys.kind() == ToeplitzSystem::Kind::ConstantWord) {
    const auto& w = static_cast<const ConstantWordSystem&>(sys).word();
    if (StructuralLanguage::applies(w)) {
      StructuralLanguage lang(w, opts.memory_budget);
      for (std::size_t n = 0; n <= n_max; ++n) table.rows.push_back({n, lang.count(n), Certification::Structure});
      structural = true;
    }
  }
  if (!structural) {
    auto scan = scan_windows(sys, n_max, opts, [n_max](const std::string& s) { return distinct_factor_counts(s, n_max); });
    const auto counts = distinct_factor_counts(scan.symbols, n_max);
    for (std::size_t n = 0; n <= n_max; ++n) table.rows.push_back({n, counts[n], scan.certification});
    table.window_half = scan.half;
  }
  table.exponent = theoretical_exponent(sys);
  if (table.exponent) {
    for (const auto& row : table.rows) {
      if (row.n == 0) continue;
      const double ratio = static_cast<double>(row.count) / std::pow(static_cast<double>(row.n), *table.exponent);
      table.c1 = table.c1 ? std::min(*table.c1, ratio) : ratio;
      table.c2 = table.c2 ? std::max(*table.c2, ratio) : ratio;
    }
  }
  return table;
}

ExponentFit fit_exponent(const ComplexityTable& table, std::size_t n_min, std::size_t n_max) {
  std::vector<double> xs, ys;
  for (const auto& row : table.rows) {
    if (row.n < std::max<std::size_t>(n_min, 1) || row.n > n_max || row.count == 0) continue;
    xs.push_back(std::log(static_cast<double>(row.n)));
    ys.push_back(std::log(static_cast<double>(row.count)));
  }
  if (xs.size() < 5) throw std::invalid_argument("exponent fit needs at least 5 rows in range");
  const double k = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  ExponentFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / k);
  fit.n_min = n_min;
  fit.n_max = n_max;
  fit.rows_used = xs.size();
  return fit;
}

void write_csv(std::ostream& out, const ComplexityTable& table) {
  out << "n,p_X,certification\n";
  for (const auto& row : table.rows) out << row.n << ',' << row.count << ',' << to_string(row.certification) << '\n';
}

void write_plot_data(std::ostream& out, const ComplexityTable& table) {
  out.setf(std::ios::fixed);
  out.precision(9);
  for (const auto& row : table.rows)
    if (row.n >= 1 && row.count > 0)
      out << std::log(static_cast<double>(row.n)) << ' ' << std::log(static_cast<double>(row.count)) << '\n';
}

nlohmann::json to_json(const ComplexityTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) rows.push_back({{"n", row.n}, {"p_X", row.count}, {"certification", to_string(row.certification)}});
  nlohmann::json j{{"rows", rows}, {"window_half", table.window_half}};
  j["exponent"] = table.exponent ? nlohmann::json(*table.exponent) : nlohmann::json();
  j["C1"] = table.c1 ? nlohmann::json(*table.c1) : nlohmann::json();
  j["C2"] = table.c2 ? nlohmann::json(*table.c2) : nlohmann::json();
  return j;
}

nlohmann::json to_json(const ExponentFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"residual", fit.residual},
          {"n_min", fit.n_min}, {"n_max", fit.n_max}, {"rows_used", fit.rows_used}};
}

}  // namespace toeplitz::language
