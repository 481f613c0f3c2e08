#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace toeplitz {

using BigInt = boost::multiprecision::cpp_int;

BigInt parse_bigint(std::string_view text);
std::string to_string(const BigInt& value);

// Mathematical modulus: result in [0, m) for m > 0.
BigInt floor_mod(const BigInt& a, const BigInt& m);
std::int64_t floor_mod(std::int64_t a, std::int64_t m);
std::int64_t floor_div(std::int64_t a, std::int64_t m);

BigInt gcd(BigInt a, BigInt b);

// Inverse of a modulo m; throws std::domain_error when gcd(a, m) != 1.
BigInt mod_inverse(const BigInt& a, const BigInt& m);

// Exponent of prime p in n (n != 0).
unsigned valuation(BigInt n, const BigInt& p);

bool is_probable_prime(const BigInt& n);

// Prime factorisation of |n| (n != 0), primes in increasing order.
std::map<BigInt, unsigned> factorize(const BigInt& n);

// Fits in an int64, or throws std::overflow_error.
std::int64_t to_int64(const BigInt& value);

}  // namespace toeplitz
