#include "toeplitz/bigint.hpp"

#include <boost/multiprecision/miller_rabin.hpp>

#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace toeplitz {

BigInt parse_bigint(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty integer literal");
  std::size_t pos = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  if (pos == text.size()) throw std::invalid_argument("malformed integer literal: " + std::string(text));
  BigInt value = 0;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c < '0' || c > '9') throw std::invalid_argument("malformed integer literal: " + std::string(text));
    value = value * 10 + (c - '0');
  }
  return negative ? BigInt(-value) : value;
}

std::string to_string(const BigInt& value) { return value.str(); }

BigInt floor_mod(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t m) {
  std::int64_t q = a / m;
  if ((a % m != 0) && ((a < 0) != (m < 0))) --q;
  return q;
}

BigInt gcd(BigInt a, BigInt b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    BigInt t = a % b;
    a = std::move(b);
    b = std::move(t);
  }
  return a;
}

BigInt mod_inverse(const BigInt& a, const BigInt& m) {
  BigInt old_r = floor_mod(a, m), r = m;
  BigInt old_s = 1, s = 0;
  while (r != 0) {
    BigInt q = old_r / r;
    BigInt t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) throw std::domain_error("no modular inverse of " + a.str() + " mod " + m.str());
  return floor_mod(old_s, m);
}

unsigned valuation(BigInt n, const BigInt& p) {
  if (n == 0) throw std::domain_error("valuation of zero");
  if (n < 0) n = -n;
  unsigned v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

bool is_probable_prime(const BigInt& n) {
  if (n < 2) return false;
  std::mt19937_64 rng(0x5eed);
  return boost::multiprecision::miller_rabin_test(n, 32, rng);
}

namespace {

// Brent's variant of Pollard rho. n is odd, composite and not a prime power of a small prime.
BigInt pollard_rho(const BigInt& n) {
  for (BigInt c = 1;; ++c) {
    BigInt y = 2, x = 2, g = 1, q = 1, ys;
    auto step = [&](const BigInt& v) { return (v * v + c) % n; };
    std::size_t r = 1;
    const std::size_t m = 64;
    do {
      x = y;
      for (std::size_t i = 0; i < r; ++i) y = step(y);
      std::size_t k = 0;
      do {
        ys = y;
        for (std::size_t i = 0; i < m && i < r - k; ++i) {
          y = step(y);
          BigInt diff = x > y ? BigInt(x - y) : BigInt(y - x);
          q = (q * diff) % n;
        }
        g = gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = step(ys);
        BigInt diff = x > ys ? BigInt(x - ys) : BigInt(ys - x);
        g = gcd(diff, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(BigInt n, std::map<BigInt, unsigned>& out) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    ++out[n];
    return;
  }
  BigInt d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::map<BigInt, unsigned> factorize(const BigInt& value) {
  if (value == 0) throw std::domain_error("factorisation of zero");
  BigInt n = value < 0 ? BigInt(-value) : value;
  std::map<BigInt, unsigned> out;
  for (unsigned p = 2; p < 10000 && BigInt(p) * p <= n; p += (p == 2 ? 1 : 2)) {
    while (n % p == 0) {
      ++out[BigInt(p)];
      n /= p;
    }
  }
  if (n > 1) factor_into(n, out);
  return out;
}

std::int64_t to_int64(const BigInt& value) {
  if (value > std::numeric_limits<std::int64_t>::max() || value < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("integer " + value.str() + " exceeds 64-bit range");
  return value.convert_to<std::int64_t>();
}

}  // namespace toeplitz
