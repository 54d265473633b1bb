#pragma once
// Shared plumbing: error taxonomy mapped to process exit codes, overflow-safe
// integer helpers, deterministic primality / factorization for 64-bit inputs,
// and the global table-size cap (env CHARBOX_CAP, default 2^26).
//
// Everything downstream assumes these helpers are exact: no float creeps into
// a verdict through this file.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace charbox {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr const char* kVersion = "1.0.0";

// Exit-code contract: 0 ok, 1 a mathematical verdict failed, 2 invalid
// input, 3 a work/memory budget was exceeded.
enum class Errc { math_violation = 1, invalid_input = 2, budget_exceeded = 3 };

class Error : public std::runtime_error {
 public:
  Error(Errc kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Errc kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  Errc kind_;
};

[[noreturn]] inline void fail_invalid(const std::string& msg) {
  throw Error(Errc::invalid_input, msg);
}
[[noreturn]] inline void fail_budget(const std::string& msg) {
  throw Error(Errc::budget_exceeded, msg);
}
[[noreturn]] inline void fail_math(const std::string& msg) {
  throw Error(Errc::math_violation, msg);
}

inline constexpr u64 kDefaultCap = u64(1) << 26;

// Table-size cap: explicit argument wins, else CHARBOX_CAP, else 2^26.
inline u64 env_cap() {
  if (const char* s = std::getenv("CHARBOX_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<u64>(v);
    fail_invalid("CHARBOX_CAP must be a positive integer, got '" + std::string(s) + "'");
  }
  return kDefaultCap;
}

// p^n with overflow detection; throws invalid_input on 64-bit overflow.
inline u64 checked_pow(u64 base, unsigned exp) {
  u128 acc = 1;
  for (unsigned i = 0; i < exp; ++i) {
    acc *= base;
    if (acc > u128(~u64(0))) fail_invalid("p^n overflows 64 bits");
  }
  return static_cast<u64>(acc);
}

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

inline u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Prime factorization by trial division then Pollard rho; exact for u64.
namespace detail {
inline u64 pollard_rho(u64 n) {
  if ((n & 1) == 0) return 2;
  u64 x = 2, y = 2, c = 1, d = 1;
  auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
  while (true) {
    x = 2;
    y = 2;
    d = 1;
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      u64 diff = x > y ? x - y : y - x;
      d = std::gcd(diff, n);
    }
    if (d != n) return d;
    ++c;
  }
}

inline void factor_rec(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_rho(n);
  factor_rec(d, out);
  factor_rec(n / d, out);
}
}  // namespace detail

// Sorted list of (prime, multiplicity).
inline std::vector<std::pair<u64, int>> factorize(u64 n) {
  std::vector<u64> fs;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
    while (n % p == 0) {
      fs.push_back(p);
      n /= p;
    }
  }
  detail::factor_rec(n, fs);
  std::sort(fs.begin(), fs.end());
  std::vector<std::pair<u64, int>> out;
  for (u64 p : fs) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.push_back({p, 1});
  }
  return out;
}

// Divisors of n in ascending order.
inline std::vector<u64> divisors(u64 n) {
  std::vector<u64> ds{1};
  for (auto [p, e] : factorize(n)) {
    size_t m = ds.size();
    u64 pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (size_t j = 0; j < m; ++j) ds.push_back(ds[j] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

}  // namespace charbox
