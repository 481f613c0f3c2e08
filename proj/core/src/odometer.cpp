#include "toeplitz/odometer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <stdexcept>

namespace toeplitz::odometer {

Scale::Scale(std::vector<BigInt> periods) : periods_(std::move(periods)) {
  if (periods_.empty()) throw std::invalid_argument("scale must have depth >= 1");
  for (std::size_t i = 0; i < periods_.size(); ++i) {
    if (periods_[i] < 1) throw std::invalid_argument("scale entry p_" + std::to_string(i + 1) + " must be >= 1");
    if (i > 0 && periods_[i] % periods_[i - 1] != 0)
      throw std::invalid_argument("p_" + std::to_string(i) + " = " + periods_[i - 1].str() + " does not divide p_" +
                                  std::to_string(i + 1) + " = " + periods_[i].str());
  }
}

Scale Scale::powers(const BigInt& base, std::size_t depth) { return times_powers(1, base, depth); }

Scale Scale::times_powers(const BigInt& factor, const BigInt& base, std::size_t depth) {
  std::vector<BigInt> p;
  BigInt cur = factor;
  for (std::size_t n = 1; n <= depth; ++n) {
    cur *= base;
    p.push_back(cur);
  }
  return Scale(std::move(p));
}

Scale Scale::factorial(std::size_t depth) {
  std::vector<BigInt> p;
  BigInt cur = 1;
  for (std::size_t n = 1; n <= depth; ++n) {
    cur *= n;
    p.push_back(cur);
  }
  return Scale(std::move(p));
}

Scale Scale::primorial(std::size_t depth) {
  std::vector<BigInt> p;
  BigInt cur = 1;
  unsigned candidate = 2;
  while (p.size() < depth) {
    bool prime = true;
    for (unsigned d = 2; d * d <= candidate; ++d)
      if (candidate % d == 0) {
        prime = false;
        break;
      }
    if (prime) {
      cur *= candidate;
      p.push_back(cur);
    }
    ++candidate;
  }
  return Scale(std::move(p));
}

const BigInt& Scale::period(std::size_t n) const {
  if (n < 1 || n > periods_.size()) throw std::out_of_range("scale level " + std::to_string(n) + " out of range");
  return periods_[n - 1];
}

std::vector<BigInt> Scale::quotients() const {
  std::vector<BigInt> q;
  q.reserve(periods_.size());
  for (std::size_t i = 0; i < periods_.size(); ++i) q.push_back(i == 0 ? periods_[0] : BigInt(periods_[i] / periods_[i - 1]));
  return q;
}

Scale Scale::truncated(std::size_t n) const {
  if (n < 1 || n > periods_.size()) throw std::out_of_range("truncation depth out of range");
  return Scale(std::vector<BigInt>(periods_.begin(), periods_.begin() + static_cast<std::ptrdiff_t>(n)));
}

nlohmann::json to_json(const Scale& scale) {
  auto arr = nlohmann::json::array();
  for (const auto& p : scale.periods()) arr.push_back(p.str());
  return arr;
}

namespace {

BigInt json_integer(const nlohmann::json& j) {
  if (j.is_string()) return parse_bigint(j.get<std::string>());
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  throw std::invalid_argument("expected an integer or decimal string, got " + j.dump());
}

}  // namespace

Scale scale_from_json(const nlohmann::json& j) {
  if (j.is_array()) {
    std::vector<BigInt> p;
    for (const auto& e : j) p.push_back(json_integer(e));
    return Scale(std::move(p));
  }
  if (j.is_object() && j.contains("periods")) return scale_from_json(j.at("periods"));
  if (j.is_object() && j.contains("rule")) {
    const auto rule = j.at("rule").get<std::string>();
    const auto depth = j.at("depth").get<std::size_t>();
    if (rule == "powers") return Scale::powers(json_integer(j.at("base")), depth);
    if (rule == "factorial") return Scale::factorial(depth);
    if (rule == "primorial") return Scale::primorial(depth);
    if (rule == "times_powers") return Scale::times_powers(json_integer(j.at("factor")), json_integer(j.at("base")), depth);
    throw std::invalid_argument("unknown scale rule '" + rule + "'");
  }
  throw std::invalid_argument("scale must be a JSON array or a rule object");
}

bool is_compatible(const Scale& scale, const std::vector<BigInt>& residues) {
  if (residues.size() != scale.depth()) return false;
  for (std::size_t i = 0; i < residues.size(); ++i) {
    if (residues[i] < 0 || residues[i] >= scale.periods()[i]) return false;
    if (i > 0 && residues[i] % scale.periods()[i - 1] != residues[i - 1]) return false;
  }
  return true;
}

OdometerElement::OdometerElement(std::shared_ptr<const Scale> scale, std::vector<BigInt> residues)
    : scale_(std::move(scale)), residues_(std::move(residues)) {
  if (!scale_) throw std::invalid_argument("null scale");
  if (!is_compatible(*scale_, residues_)) throw std::invalid_argument("residues are not a compatible sequence for the scale");
}

OdometerElement OdometerElement::from_integer(std::shared_ptr<const Scale> scale, const BigInt& k) {
  std::vector<BigInt> r;
  for (const auto& p : scale->periods()) r.push_back(floor_mod(k, p));
  return OdometerElement(std::move(scale), std::move(r));
}

OdometerElement OdometerElement::from_rational(std::shared_ptr<const Scale> scale, const BigInt& num, const BigInt& den) {
  const BigInt inv = mod_inverse(den, scale->top());
  return from_integer(std::move(scale), floor_mod(num * inv, scale->top()));
}

const BigInt& OdometerElement::residue(std::size_t n) const {
  if (n < 1 || n > residues_.size()) throw std::out_of_range("odometer level out of range");
  return residues_[n - 1];
}

bool OdometerElement::operator==(const OdometerElement& other) const {
  return *scale_ == *other.scale_ && residues_ == other.residues_;
}

namespace {

void require_same_scale(const OdometerElement& a, const OdometerElement& b) {
  if (a.scale_ptr() != b.scale_ptr() && !(a.scale() == b.scale())) throw std::invalid_argument("odometer scale mismatch");
}

}  // namespace

OdometerElement add(const OdometerElement& a, const OdometerElement& b) {
  require_same_scale(a, b);
  std::vector<BigInt> r;
  const auto& p = a.scale().periods();
  for (std::size_t i = 0; i < p.size(); ++i) r.push_back((a.residues()[i] + b.residues()[i]) % p[i]);
  return OdometerElement(a.scale_ptr(), std::move(r));
}

OdometerElement negate(const OdometerElement& a) {
  std::vector<BigInt> r;
  const auto& p = a.scale().periods();
  for (std::size_t i = 0; i < p.size(); ++i) r.push_back(floor_mod(-a.residues()[i], p[i]));
  return OdometerElement(a.scale_ptr(), std::move(r));
}

OdometerElement multiply(const OdometerElement& a, const BigInt& k) {
  std::vector<BigInt> r;
  const auto& p = a.scale().periods();
  for (std::size_t i = 0; i < p.size(); ++i) r.push_back(floor_mod(a.residues()[i] * k, p[i]));
  return OdometerElement(a.scale_ptr(), std::move(r));
}

std::uint64_t orbit_length(std::int64_t m, std::uint64_t p) {
  if (p == 0) throw std::invalid_argument("orbit in Z_0");
  const auto step = static_cast<std::uint64_t>(floor_mod(m, static_cast<std::int64_t>(p)));
  std::uint64_t x = 0, len = 0;
  do {
    x = (x + step) % p;
    ++len;
  } while (x != 0);
  return len;
}

bool is_minimal_translation(const BigInt& m, const Scale& scale, std::uint64_t orbit_cap) {
  const bool by_gcd = gcd(m, scale.top()) == 1;
  for (const auto& p : scale.periods()) {
    const bool level_gcd = gcd(m, p) == 1;
    bool level_orbit;
    if (p <= orbit_cap) {
      const auto pn = p.convert_to<std::uint64_t>();
      const auto step = floor_mod(m, p).convert_to<std::int64_t>();
      level_orbit = orbit_length(step, pn) == pn;
    } else {
      // Orbit of 0 under +m in Z_p has p / gcd(m, p) elements.
      level_orbit = p / gcd(m, p) == p;
    }
    if (level_gcd != level_orbit) throw std::logic_error("gcd and orbit criteria disagree at p = " + p.str());
    if (!level_orbit && by_gcd) throw std::logic_error("gcd(m, p_N) = 1 but a lower level is not minimal");
  }
  return by_gcd;
}

MultiplicityEntry MultiplicityReport::at(const BigInt& prime) const {
  auto it = entries.find(prime);
  if (it == entries.end()) return MultiplicityEntry{0, true};
  return it->second;
}

MultiplicityReport multiplicity(const Scale& scale) {
  MultiplicityReport report;
  report.depth = scale.depth();
  // Every prime dividing some p_n divides p_N.
  const auto primes = factorize(scale.top());
  const std::size_t n_depth = scale.depth();
  const std::size_t first = (n_depth + 1) / 2;  // ceil(N/2), 1-based
  for (const auto& [prime, top_exponent] : primes) {
    MultiplicityEntry entry;
    entry.valuation = top_exponent;
    entry.stabilized = true;
    for (std::size_t n = std::max<std::size_t>(first, 1); n <= n_depth; ++n) {
      if (valuation(scale.period(n), prime) != top_exponent) {
        entry.stabilized = false;
        break;
      }
    }
    report.entries.emplace(prime, entry);
  }
  return report;
}

nlohmann::json to_json(const MultiplicityReport& report) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [prime, e] : report.entries) {
    nlohmann::json entry{{"valuation", e.valuation}, {"stabilized", e.stabilized}};
    entry["limit"] = e.stabilized ? nlohmann::json(e.valuation) : nlohmann::json("unresolved");
    j[prime.str()] = entry;
  }
  return j;
}

TorsionReport torsion_structure(const Scale& scale) {
  TorsionReport report;
  for (const auto& [prime, e] : multiplicity(scale).entries) {
    if (!e.stabilized) {
      report.unresolved.push_back(prime);
    } else if (e.valuation > 0) {
      BigInt order = 1;
      for (unsigned i = 0; i < e.valuation; ++i) order *= prime;
      report.resolved.push_back({prime, e.valuation, order});
    }
  }
  return report;
}

nlohmann::json to_json(const TorsionReport& report) {
  nlohmann::json resolved = nlohmann::json::array();
  for (const auto& c : report.resolved)
    resolved.push_back({{"prime", c.prime.str()}, {"exponent", c.exponent}, {"order", c.order.str()}});
  nlohmann::json unresolved = nlohmann::json::array();
  for (const auto& p : report.unresolved) unresolved.push_back(p.str());
  return {{"torsion", resolved}, {"unresolved", unresolved}};
}

std::optional<std::uint64_t> element_order_mod_one(const OdometerElement& g, std::size_t depth, const BigInt& rate_num,
                                                   const BigInt& rate_den, std::uint64_t max_multiple) {
  if (depth < 1 || depth > g.scale().depth()) throw std::out_of_range("depth out of range");
  if (rate_den <= 0 || rate_num < 0) throw std::invalid_argument("rate must be a nonnegative fraction");
  const BigInt& p = g.scale().period(depth);
  const BigInt& x = g.residue(depth);
  for (std::uint64_t l = 1; l <= max_multiple; ++l) {
    BigInt r = floor_mod(x * l, p);
    if (2 * r > p) r -= p;  // symmetric representative
    const BigInt abs_r = r < 0 ? BigInt(-r) : r;
    // |r| <= l·num/den + 1
    if (abs_r * rate_den <= BigInt(l) * rate_num + rate_den) return l;
  }
  return std::nullopt;
}

std::vector<SubgroupLevel> subgroup_report(const std::vector<OdometerElement>& generators) {
  if (generators.empty()) throw std::invalid_argument("subgroup report needs at least one generator");
  for (const auto& g : generators) require_same_scale(generators.front(), g);
  const Scale& scale = generators.front().scale();
  std::vector<SubgroupLevel> out;
  for (std::size_t n = 1; n <= scale.depth(); ++n) {
    BigInt index = scale.period(n);
    for (const auto& g : generators) index = gcd(index, g.residue(n));
    out.push_back({n, index, scale.period(n) / index, index == 1});
  }
  return out;
}

}  // namespace toeplitz::odometer
