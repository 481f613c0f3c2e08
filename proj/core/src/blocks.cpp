#include "toeplitz/blocks.hpp"

#include "toeplitz/language.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace toeplitz::blocks {

std::string to_string(Mode m) { return m == Mode::Toy ? "toy" : "faithful"; }

Mode parse_mode(std::string_view text) {
  if (text == "toy") return Mode::Toy;
  if (text == "faithful") return Mode::Faithful;
  throw std::invalid_argument("mode must be toy or faithful, got '" + std::string(text) + "'");
}

std::string block_alphabet(unsigned k1) {
  std::string s;
  for (int c = 33; c < 127 && s.size() < k1; ++c)
    if (c != kHole) s.push_back(static_cast<char>(c));
  for (int c = 128; c < 256 && s.size() < k1; ++c) s.push_back(static_cast<char>(c));
  if (s.size() < k1) throw std::invalid_argument("k1 = " + std::to_string(k1) + " exceeds the " + std::to_string(s.size()) + " available symbols");
  return s;
}

namespace {

BigInt factorial(std::uint64_t n) {
  BigInt f = 1;
  for (std::uint64_t i = 2; i <= n; ++i) f *= i;
  return f;
}

double log_big(const BigInt& v) {
  if (v <= 0) throw std::domain_error("log of nonpositive integer");
  const std::string s = v.str();
  if (s.size() < 300) return std::log(v.convert_to<double>());
  // Leading 17 digits carry all the precision a double holds.
  return std::log(std::stod(s.substr(0, 17))) + static_cast<double>(s.size() - 17) * std::log(10.0);
}

constexpr std::int64_t kExactMiddleLimit = 20000;

// Number of admissible middles and its log.
std::pair<std::optional<BigInt>, double> count_arrangements(std::int64_t m, std::int64_t k, std::int64_t d,
                                                            std::int64_t d_hat, bool relaxed) {
  if (relaxed) {
    const double lg = static_cast<double>(m) * std::log(static_cast<double>(k - 1));
    if (m > kExactMiddleLimit) return {std::nullopt, lg};
    BigInt v = 1;
    for (std::int64_t i = 0; i < m; ++i) v *= (k - 1);
    return {v, lg};
  }
  const double lg = std::lgamma(static_cast<double>(m) + 1) - std::lgamma(static_cast<double>(d_hat) + 1) -
                    static_cast<double>(k - 2) * std::lgamma(static_cast<double>(d) + 1);
  if (m > kExactMiddleLimit) return {std::nullopt, lg};
  BigInt den = factorial(static_cast<std::uint64_t>(d_hat));
  const BigInt fd = factorial(static_cast<std::uint64_t>(d));
  for (std::int64_t i = 0; i < k - 2; ++i) den *= fd;
  return {factorial(static_cast<std::uint64_t>(m)) / den, lg};
}

// p·(k - n²D) > 3·P·k²·n²D, i.e. p > P·3k·((n²D)^{-1} - k^{-1})^{-1}.
bool growth_inequality(const BigInt& p, const BigInt& prev, const BigInt& k, std::size_t n, std::int64_t d0) {
  const BigInt n2d = BigInt(n) * n * d0;
  if (k <= n2d) return false;
  return p * (k - n2d) > 3 * prev * k * k * n2d;
}

std::vector<std::vector<std::uint32_t>> enumerate_middles(std::int64_t m, std::int64_t k, std::int64_t d,
                                                          std::int64_t d_hat, bool relaxed, std::uint64_t want) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> cur;
  if (relaxed) {
    cur.assign(static_cast<std::size_t>(m), 1);
    for (;;) {
      out.push_back(cur);
      if (out.size() >= want) break;
      // Odometer-style increment over digits 1..k-1, last position fastest.
      std::int64_t pos = m - 1;
      while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == static_cast<std::uint32_t>(k - 1)) cur[static_cast<std::size_t>(pos--)] = 1;
      if (pos < 0) break;
      ++cur[static_cast<std::size_t>(pos)];
    }
    return out;
  }
  cur.insert(cur.end(), static_cast<std::size_t>(d_hat), 1);
  for (std::int64_t i = 2; i < k; ++i) cur.insert(cur.end(), static_cast<std::size_t>(d), static_cast<std::uint32_t>(i));
  do {
    out.push_back(cur);
  } while (out.size() < want && std::next_permutation(cur.begin(), cur.end()));
  return out;
}

}  // namespace

BigInt partition_count(std::uint64_t d, std::uint64_t k) {
  BigInt den = 1;
  const BigInt fd = factorial(d);
  for (std::uint64_t i = 0; i < k; ++i) den *= fd;
  return factorial(d * k) / den;
}

double log_partition_count(double d, double k) { return std::lgamma(d * k + 1) - k * std::lgamma(d + 1); }

// ---------------------------------------------------------------------------

Construction Construction::build(const BlockSpec& spec) {
  if (spec.k1 < 2) throw std::invalid_argument("k1 must be at least 2");
  if (spec.levels < 1) throw std::invalid_argument("levels must be at least 1");
  if (spec.d0 <= 1) throw std::invalid_argument("D0 must be an integer > 1");
  if (spec.mode == Mode::Faithful) {
    if (spec.k1 <= 3) throw std::invalid_argument("faithful mode needs k1 > 3");
    // 2^{n-2} k1 > (n+1)^2 D0 for every n >= 2; n = 2 is the binding case.
    if (static_cast<std::int64_t>(spec.k1) <= 9 * spec.d0)
      throw std::invalid_argument("faithful mode needs k1 > 9·D0 (here k1 = " + std::to_string(spec.k1) + ", D0 = " + std::to_string(spec.d0) + ")");
  }

  Construction c;
  c.spec_ = spec;
  std::vector<BigInt> periods = spec.scale.periods();
  if (periods.front() != 1) periods.insert(periods.begin(), BigInt(1));
  c.scale_ = odometer::Scale(std::move(periods));
  c.alphabet_ = block_alphabet(spec.k1);

  Level first;
  first.n = 1;
  first.index = 1;
  first.length = 1;
  first.count = BigInt(spec.k1);
  first.log_count = std::log(static_cast<double>(spec.k1));
  first.inequality_holds = true;
  first.materialized = true;
  for (char ch : c.alphabet_) first.blocks.emplace_back(1, ch);
  c.levels_.push_back(std::move(first));
  std::uint64_t used = spec.k1;

  for (std::size_t n = 2; n <= spec.levels; ++n) {
    const Level& prev = c.levels_.back();
    if (!prev.count) {
      c.stop_reason_ = "k_" + std::to_string(n - 1) + " is only known approximately";
      break;
    }
    const BigInt k_prev = *prev.count;
    const std::uint64_t want_min = std::max<std::uint64_t>(
        n - 1 < spec.requested.size() ? spec.requested[n - 1] : 0,
        k_prev <= BigInt(std::numeric_limits<std::uint64_t>::max() / 2) ? 2 * k_prev.convert_to<std::uint64_t>()
                                                                          : std::numeric_limits<std::uint64_t>::max());
    std::optional<Level> chosen;
    for (std::size_t i = prev.index + 1; i <= c.scale_.depth(); ++i) {
      const BigInt& p = c.scale_.period(i);
      const BigInt ratio = p / prev.length;
      if (ratio <= k_prev) continue;
      const BigInt m_big = ratio - k_prev;
      if (m_big > BigInt(std::numeric_limits<std::int64_t>::max() / 4) || k_prev > BigInt(std::int64_t{1} << 40)) {
        c.stop_reason_ = "level " + std::to_string(n) + " parameters exceed 64-bit arithmetic";
        break;
      }
      Level lv;
      lv.n = n;
      lv.index = i;
      lv.length = p;
      lv.middle = m_big.convert_to<std::int64_t>();
      const std::int64_t k = k_prev.convert_to<std::int64_t>();
      lv.d = k > 1 ? lv.middle / (k - 1) : 0;
      lv.d_hat = lv.middle - (k - 2) * lv.d;
      std::tie(lv.available, lv.log_available) = count_arrangements(lv.middle, k, lv.d, lv.d_hat, spec.relaxed_c2);
      lv.inequality_holds = growth_inequality(p, prev.length, k_prev, n, spec.d0);
      if (spec.mode == Mode::Faithful) {
        if (!lv.inequality_holds || lv.d < 1) continue;
        lv.count = lv.available;
        lv.log_count = lv.log_available;
      } else {
        const bool enough = lv.available ? *lv.available >= BigInt(want_min) : lv.log_available > std::log(static_cast<double>(want_min));
        if (!enough) continue;
        lv.count = BigInt(want_min);
        lv.log_count = std::log(static_cast<double>(want_min));
      }
      chosen = std::move(lv);
      break;
    }
    if (!chosen) {
      if (!c.stop_reason_) c.stop_reason_ = "scale exhausted before an admissible index for level " + std::to_string(n);
      break;
    }

    Level& lv = *chosen;
    const bool small_enough = lv.count && *lv.count <= BigInt(spec.max_blocks_per_level) && lv.length <= BigInt(std::int64_t{1} << 40);
    const bool fits = small_enough && BigInt(used) + *lv.count * lv.length <= BigInt(spec.memory_budget);
    if (prev.materialized && fits) {
      const auto k = static_cast<std::int64_t>(prev.blocks.size());
      const auto want = lv.count->convert_to<std::uint64_t>();
      const auto middles = enumerate_middles(lv.middle, k, lv.d, lv.d_hat, spec.relaxed_c2, want);
      const std::int64_t half = k / 2;
      for (const auto& mid : middles) {
        std::vector<std::uint32_t> arr;
        for (std::int64_t j = 0; j < half; ++j) arr.push_back(static_cast<std::uint32_t>(j));
        arr.insert(arr.end(), mid.begin(), mid.end());
        for (std::int64_t j = half; j < k; ++j) arr.push_back(static_cast<std::uint32_t>(j));
        std::string block;
        block.reserve(lv.length.convert_to<std::size_t>());
        for (auto idx : arr) block += prev.blocks[idx];
        lv.blocks.push_back(std::move(block));
        lv.arrangement.push_back(std::move(arr));
      }
      lv.materialized = true;
      used += want * lv.length.convert_to<std::uint64_t>();
    } else if (spec.mode == Mode::Toy) {
      throw BudgetExceeded("toy level " + std::to_string(n) + " does not fit the block memory budget");
    }
    c.levels_.push_back(std::move(lv));
  }

  const std::size_t top = c.materialized_depth();
  const Level& t = c.levels_[top - 1];
  c.point_ = t.blocks.back() + t.blocks.front();
  return c;
}

const Level& Construction::level(std::size_t n) const {
  if (n < 1 || n > levels_.size()) throw std::out_of_range("block level " + std::to_string(n) + " not built");
  return levels_[n - 1];
}

std::size_t Construction::materialized_depth() const {
  std::size_t d = 0;
  while (d < levels_.size() && levels_[d].materialized) ++d;
  return d;
}

Range Construction::domain() const {
  const auto half = static_cast<std::int64_t>(point_.size() / 2);
  return {-half, half};
}

SequenceWindow Construction::point(const Range& r) const {
  const Range d = domain();
  if (!d.contains(r)) {
    const Range missing = r.begin < d.begin ? Range{r.begin, std::min(r.end, d.begin)} : Range{std::max(r.begin, d.end), r.end};
    throw InsufficientWindow("block point", missing);
  }
  return {r.begin, point_.substr(static_cast<std::size_t>(r.begin - d.begin), static_cast<std::size_t>(r.size()))};
}

// ---------------------------------------------------------------------------

BlocksSystem::BlocksSystem(std::shared_ptr<const Construction> c) : c_(std::move(c)), alphabet_(c_->alphabet()) {}

char BlocksSystem::evaluate(std::int64_t i) const { return c_->point({i, i + 1}).symbols()[0]; }

SequenceWindow BlocksSystem::window(const Range& r) const { return c_->point(r); }

std::int64_t BlocksSystem::period(std::size_t level) const {
  if (level < 1 || level > structure_depth()) throw std::out_of_range("block level " + std::to_string(level) + " not stored");
  return to_int64(c_->level(level).length);
}

nlohmann::json BlocksSystem::to_json() const { return blocks::to_json(c_->spec()); }

std::string BlocksSystem::describe() const {
  return "block Toeplitz point (" + to_string(c_->spec().mode) + ", k1 = " + std::to_string(c_->spec().k1) + ", " +
         std::to_string(c_->materialized_depth()) + " stored levels)";
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kBase = 0x100000001b3ULL;

struct Hasher {
  std::vector<std::uint64_t> prefix, pow;
  explicit Hasher(std::string_view s) : prefix(s.size() + 1, 0), pow(s.size() + 1, 1) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      prefix[i + 1] = prefix[i] * kBase + static_cast<unsigned char>(s[i]) + 1;
      pow[i + 1] = pow[i] * kBase;
    }
  }
  std::uint64_t get(std::size_t b, std::size_t len) const { return prefix[b + len] - prefix[b] * pow[len]; }
};

std::uint64_t hash_of(std::string_view s) { return Hasher(s).get(0, s.size()); }

// Index of each block by hash, verified on lookup.
class BlockIndex {
 public:
  explicit BlockIndex(const std::vector<std::string>& blocks) : blocks_(blocks) {
    for (std::size_t i = 0; i < blocks.size(); ++i) by_hash_.emplace(hash_of(blocks[i]), i);
  }
  std::optional<std::size_t> find(std::uint64_t h, std::string_view text) const {
    auto [lo, hi] = by_hash_.equal_range(h);
    for (auto it = lo; it != hi; ++it)
      if (blocks_[it->second] == text) return it->second;
    return std::nullopt;
  }

 private:
  const std::vector<std::string>& blocks_;
  std::unordered_multimap<std::uint64_t, std::size_t> by_hash_;
};

}  // namespace

OverlapResult check_trivial_overlap(const std::vector<std::string>& blocks) {
  OverlapResult r;
  if (blocks.empty()) return r;
  const std::size_t len = blocks.front().size();
  for (const auto& b : blocks)
    if (b.size() != len) throw std::invalid_argument("blocks must share one length");
  const BlockIndex index(blocks);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const std::string s = blocks[j] + blocks[k];
      const Hasher h(s);
      ++r.pairs_checked;
      for (std::size_t t = 1; t < len; ++t) {
        if (auto i = index.find(h.get(t, len), std::string_view(s).substr(t, len))) {
          r.ok = false;
          r.witness = std::array<std::size_t, 3>{*i + 1, j + 1, k + 1};
          r.offset = static_cast<std::int64_t>(t);
          return r;
        }
      }
    }
  }
  return r;
}

OverlapResult check_trivial_overlap(const Construction& c, std::size_t n) {
  const Level& lv = c.level(n);
  if (!lv.materialized) throw std::invalid_argument("level " + std::to_string(n) + " is not stored");
  return check_trivial_overlap(lv.blocks);
}

ConditionReport check_conditions(const Construction& c, std::size_t n) {
  ConditionReport rep;
  if (n < 2) return rep;
  const Level& lv = c.level(n);
  const Level& prev = c.level(n - 1);
  if (!lv.materialized || !prev.materialized) throw std::invalid_argument("levels " + std::to_string(n - 1) + ".." + std::to_string(n) + " must be stored");
  const BlockIndex index(prev.blocks);
  const std::size_t plen = prev.blocks.front().size();
  const std::size_t len = lv.length.convert_to<std::size_t>();
  const std::size_t k = prev.blocks.size();
  const std::size_t half = k / 2;
  auto fail = [&](std::size_t b, const std::string& why) {
    rep.ok = false;
    rep.detail = "B_" + std::to_string(b + 1) + "," + std::to_string(n) + ": " + why;
    return rep;
  };
  std::vector<std::string> sorted = lv.blocks;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    rep.ok = false;
    rep.detail = "blocks are not distinct";
    return rep;
  }
  for (std::size_t b = 0; b < lv.blocks.size(); ++b) {
    const std::string& s = lv.blocks[b];
    ++rep.blocks_checked;
    if (s.size() != len) return fail(b, "length " + std::to_string(s.size()) + " != " + std::to_string(len));
    std::vector<std::size_t> parse;
    for (std::size_t t = 0; t < len; t += plen) {
      const std::string_view chunk = std::string_view(s).substr(t, plen);
      auto i = index.find(hash_of(chunk), chunk);
      if (!i) return fail(b, "chunk at " + std::to_string(t) + " is not a level-" + std::to_string(n - 1) + " block");
      parse.push_back(*i);
    }
    const std::size_t slots = parse.size();
    for (std::size_t j = 0; j < half; ++j)
      if (parse[j] != j) return fail(b, "prefix slot " + std::to_string(j + 1) + " holds B_" + std::to_string(parse[j] + 1));
    for (std::size_t j = half; j < k; ++j)
      if (parse[slots - k + j] != j) return fail(b, "suffix slot " + std::to_string(j + 1) + " holds B_" + std::to_string(parse[slots - k + j] + 1));
    std::vector<std::int64_t> counts(k, 0);
    for (std::size_t j = half; j < slots - (k - half); ++j) ++counts[parse[j]];
    if (counts[0] != 0) return fail(b, "middle uses B_1");
    if (!c.spec().relaxed_c2) {
      if (counts.size() > 1 && counts[1] != lv.d_hat) return fail(b, "B_2 appears " + std::to_string(counts[1]) + " times, expected " + std::to_string(lv.d_hat));
      for (std::size_t i = 2; i < k; ++i)
        if (counts[i] != lv.d) return fail(b, "B_" + std::to_string(i + 1) + " appears " + std::to_string(counts[i]) + " times, expected " + std::to_string(lv.d));
    }
  }
  return rep;
}

FrequencyTable frequencies(const Construction& c, std::size_t n, std::int64_t window_length) {
  if (c.spec().relaxed_c2) throw std::invalid_argument("frequencies are only predicted when C2 multiplicities are enforced");
  if (n + 1 > c.materialized_depth()) throw std::invalid_argument("frequencies of level " + std::to_string(n) + " need level " + std::to_string(n + 1) + " stored");
  const Level& lv = c.level(n);
  const Level& next = c.level(n + 1);
  const std::int64_t p = to_int64(lv.length), p_next = to_int64(next.length);
  if (window_length < 10 * p_next)
    throw std::invalid_argument("frequency window must be at least 10·p_{i_" + std::to_string(n + 1) + "} = " + std::to_string(10 * p_next));
  const Range dom = c.domain();
  const std::int64_t w = std::min(window_length, dom.size()) / p_next * p_next;
  if (w < 10 * p_next) throw InsufficientWindow("stored block point", {dom.end, dom.begin + 10 * p_next});

  FrequencyTable t;
  t.level = n;
  t.window = w;
  const std::string text = c.point({dom.begin, dom.begin + w}).symbols();
  const BlockIndex index(lv.blocks);
  const Hasher h(text);
  std::vector<std::uint64_t> occ(lv.blocks.size(), 0);
  for (std::int64_t s = 0; s + p <= w; ++s)
    if (auto i = index.find(h.get(static_cast<std::size_t>(s), static_cast<std::size_t>(p)), std::string_view(text).substr(static_cast<std::size_t>(s), static_cast<std::size_t>(p))))
      ++occ[*i];
  for (std::size_t i = 0; i < lv.blocks.size(); ++i) {
    FrequencyRow row;
    row.block = i + 1;
    row.occurrences = occ[i];
    row.window = w;
    const std::int64_t d_i = i == 0 ? 0 : (i == 1 ? next.d_hat : next.d);
    row.predicted_numerator = 1 + d_i;
    row.predicted_denominator = p_next;
    row.exact = BigInt(occ[i]) * p_next == BigInt(row.predicted_numerator) * w;
    row.deviation = std::abs(static_cast<double>(occ[i]) / static_cast<double>(w) - static_cast<double>(row.predicted_numerator) / static_cast<double>(p_next));
    t.max_deviation = std::max(t.max_deviation, row.deviation);
    t.all_exact = t.all_exact && row.exact;
    t.predicted_total += static_cast<double>(row.predicted_numerator * p) / static_cast<double>(p_next);
    t.rows.push_back(row);
  }
  return t;
}

EntropyBounds entropy_lower_bound(const Construction& c, std::size_t depth) {
  if (depth < 1 || depth > c.levels().size()) throw std::out_of_range("entropy depth exceeds built levels");
  EntropyBounds e;
  e.depth = depth;
  e.c = 2 * std::numbers::ln2;
  e.r = 0.5;
  const Level& first = c.level(1);
  const double base = first.log_count / first.length.convert_to<double>();
  e.max_log_ratio = 0;
  for (std::size_t n = 1; n <= depth; ++n) {
    const Level& lv = c.level(n);
    e.max_log_ratio = std::max(e.max_log_ratio, std::exp(std::log(lv.log_count) - log_big(lv.length)));
  }
  double log_chain = std::log(base);
  bool positive = base > 0;
  for (std::size_t n = 2; n <= depth && positive; ++n) {
    const Level& lv = c.level(n);
    const Level& prev = c.level(n - 1);
    double log_k_minus_2;
    if (prev.count && *prev.count < BigInt(std::int64_t{1} << 50)) {
      const double k = prev.count->convert_to<double>();
      if (k <= 2) {
        positive = false;
        break;
      }
      log_k_minus_2 = std::log(k - 2);
    } else {
      log_k_minus_2 = prev.log_count;
    }
    if (lv.d <= 1) {
      positive = false;
      break;
    }
    log_chain += log_big(prev.length) - log_big(lv.length) + std::log(static_cast<double>(lv.d - 1)) + log_k_minus_2;
  }
  e.chain = positive ? std::exp(log_chain) : 0.0;
  const double tail = (std::numbers::pi * std::numbers::pi / 6 - 1) / static_cast<double>(c.spec().d0);
  e.product_bound = std::exp(-e.c * tail) * base;
  return e;
}

double empirical_entropy(const Construction& c, std::size_t n) {
  const Level& lv = c.level(n);
  const auto p = static_cast<std::size_t>(to_int64(lv.length));
  const Range dom = c.domain();
  const auto counts = language::distinct_factor_counts(c.point(dom).symbols(), p);
  return std::log(static_cast<double>(counts[p])) / static_cast<double>(p);
}

ExtensibilityReport check_extensible(const Construction& c, std::size_t n) {
  if (n < 2) throw std::invalid_argument("extensibility needs n >= 2");
  if (n + 1 > c.materialized_depth()) throw std::invalid_argument("extensibility of level " + std::to_string(n) + " needs level " + std::to_string(n + 1) + " stored");
  const Level& lv = c.level(n);
  const Level& prev = c.level(n - 1);
  const std::size_t k = lv.blocks.size(), half = k / 2;
  std::string pre = prev.blocks.back(), post;
  for (std::size_t j = half; j < k; ++j) pre += lv.blocks[j];
  for (std::size_t j = 1; j < half; ++j) post += lv.blocks[j];
  post += prev.blocks.front();

  ExtensibilityReport rep;
  const Range dom = c.domain();
  const std::string text = c.point(dom).symbols();
  const std::string& target = lv.blocks.front();
  for (std::size_t t = text.find(target); t != std::string::npos; t = text.find(target, t + 1)) {
    if (t < pre.size() || t + target.size() + post.size() > text.size()) continue;
    ++rep.occurrences;
    if (text.compare(t - pre.size(), pre.size(), pre) != 0 || text.compare(t + target.size(), post.size(), post) != 0) {
      rep.ok = false;
      rep.counterexample = static_cast<std::int64_t>(t) + dom.begin;
      return rep;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const BlockSpec& spec) {
  return {{"kind", "blocks"},
          {"k1", spec.k1},
          {"d0", spec.d0},
          {"scale", odometer::to_json(spec.scale)},
          {"levels", spec.levels},
          {"mode", to_string(spec.mode)},
          {"relaxed_c2", spec.relaxed_c2},
          {"requested", spec.requested},
          {"memory_budget", spec.memory_budget},
          {"max_blocks_per_level", spec.max_blocks_per_level}};
}

BlockSpec block_spec_from_json(const nlohmann::json& j) {
  BlockSpec s;
  s.k1 = j.value("k1", s.k1);
  s.d0 = j.value("d0", s.d0);
  if (j.contains("scale")) s.scale = odometer::scale_from_json(j.at("scale"));
  s.levels = j.value("levels", s.levels);
  if (j.contains("mode")) s.mode = parse_mode(j.at("mode").get<std::string>());
  s.relaxed_c2 = j.value("relaxed_c2", s.relaxed_c2);
  if (j.contains("requested")) s.requested = j.at("requested").get<std::vector<std::uint64_t>>();
  s.memory_budget = j.value("memory_budget", s.memory_budget);
  s.max_blocks_per_level = j.value("max_blocks_per_level", s.max_blocks_per_level);
  return s;
}

nlohmann::json to_json(const Construction& c) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : c.levels()) {
    nlohmann::json l{{"n", lv.n},
                     {"index", lv.index},
                     {"length", lv.length.str()},
                     {"count", lv.count ? nlohmann::json(lv.count->str()) : nlohmann::json()},
                     {"log_count", lv.log_count},
                     {"middle", lv.middle},
                     {"d", lv.d},
                     {"d_hat", lv.d_hat},
                     {"inequality_holds", lv.inequality_holds},
                     {"materialized", lv.materialized}};
    if (lv.materialized && lv.blocks.size() * lv.blocks.front().size() <= 4096) l["blocks"] = lv.blocks;
    levels.push_back(std::move(l));
  }
  nlohmann::json j{{"spec", to_json(c.spec())}, {"levels", levels}, {"stored_depth", c.materialized_depth()}};
  j["stop_reason"] = c.stop_reason() ? nlohmann::json(*c.stop_reason()) : nlohmann::json();
  return j;
}

nlohmann::json to_json(const OverlapResult& r) {
  nlohmann::json j{{"ok", r.ok}, {"pairs_checked", r.pairs_checked}};
  if (r.witness) {
    j["witness"] = {{"i", (*r.witness)[0]}, {"j", (*r.witness)[1]}, {"k", (*r.witness)[2]}};
    j["offset"] = r.offset;
  }
  return j;
}

nlohmann::json to_json(const FrequencyTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"block", r.block},
                    {"occurrences", r.occurrences},
                    {"window", r.window},
                    {"predicted", std::to_string(r.predicted_numerator) + "/" + std::to_string(r.predicted_denominator)},
                    {"exact", r.exact},
                    {"deviation", r.deviation}});
  return {{"level", t.level}, {"window", t.window}, {"rows", rows}, {"max_deviation", t.max_deviation},
          {"all_exact", t.all_exact}, {"predicted_total", t.predicted_total}};
}

nlohmann::json to_json(const EntropyBounds& e) {
  return {{"depth", e.depth}, {"max_log_ratio", e.max_log_ratio}, {"chain", e.chain},
          {"product_bound", e.product_bound}, {"C", e.c}, {"r", e.r}};
}

}  // namespace toeplitz::blocks
