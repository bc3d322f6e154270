#include "mtp/number_theory.hpp"

#include <mutex>
#include <numeric>
#include <unordered_map>

#include "mtp/error.hpp"

namespace mtp {

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::uint64_t euler_phi(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("euler_phi(0) is undefined");
  std::uint64_t result = n;
  for (std::uint64_t p : prime_factors(n)) result -= result / p;
  return result;
}

std::vector<std::uint64_t> phi_sieve(std::uint64_t n) {
  std::vector<std::uint64_t> phi(n + 1);
  std::iota(phi.begin(), phi.end(), 0);
  for (std::uint64_t p = 2; p <= n; ++p) {
    if (phi[p] != p) continue;
    for (std::uint64_t m = p; m <= n; m += p) phi[m] -= phi[m] / p;
  }
  return phi;
}

namespace {

constexpr std::uint64_t kSieveLimit = 1 << 20;

struct TotientCache {
  std::mutex lock;
  std::vector<std::uint64_t> prefix;
  std::unordered_map<std::uint64_t, std::uint64_t> large;

  TotientCache() {
    auto phi = phi_sieve(kSieveLimit);
    prefix.resize(phi.size());
    for (std::size_t i = 1; i < phi.size(); ++i) prefix[i] = prefix[i - 1] + phi[i];
  }

  // Phi(n) = n(n+1)/2 - sum_{d>=2} Phi(n/d), grouped by equal quotients.
  std::uint64_t get(std::uint64_t n) {
    if (n < prefix.size()) return prefix[n];
    if (auto it = large.find(n); it != large.end()) return it->second;
    unsigned __int128 tri = static_cast<unsigned __int128>(n) * (n + 1) / 2;
    std::uint64_t total = static_cast<std::uint64_t>(tri);
    for (std::uint64_t d = 2; d <= n;) {
      std::uint64_t v = n / d;
      std::uint64_t last = n / v;
      total -= (last - d + 1) * get(v);
      d = last + 1;
    }
    large.emplace(n, total);
    return total;
  }
};

TotientCache& totient_cache() {
  static TotientCache cache;
  return cache;
}

}  // namespace

std::uint64_t totient_sum(std::uint64_t n) {
  TotientCache& cache = totient_cache();
  std::lock_guard<std::mutex> guard(cache.lock);
  return cache.get(n);
}

std::uint64_t coprime_rank(std::uint64_t p, std::uint64_t q) {
  if (p <= 1) return 0;
  std::uint64_t below = p - 1;
  auto primes = prime_factors(q);
  std::int64_t count = 0;
  std::size_t subsets = std::size_t{1} << primes.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::uint64_t d = 1;
    int bits = 0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if (mask >> i & 1) {
        d *= primes[i];
        ++bits;
      }
    }
    auto term = static_cast<std::int64_t>(below / d);
    count += (bits % 2 == 0) ? term : -term;
  }
  return static_cast<std::uint64_t>(count);
}

namespace {

using i128 = __int128;

// Inverse of a modulo m (m >= 1, gcd(a, m) = 1); 0 when m = 1.
std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
  if (m == 1) return 0;
  std::int64_t g = m, x = 0, x1 = 1, a1 = a % m;
  if (a1 < 0) a1 += m;
  std::int64_t b = a1;
  while (b != 0) {
    std::int64_t t = g / b;
    std::int64_t r = g - t * b;
    g = b;
    b = r;
    std::int64_t nx = x - t * x1;
    x = x1;
    x1 = nx;
  }
  x %= m;
  if (x < 0) x += m;
  return x;
}

// Successor of n/m in the Farey sequence of order max_q: c/d with
// c*m - n*d = 1 and d the largest such denominator <= max_q.
Fraction farey_successor(std::int64_t n, std::int64_t m, std::int64_t max_q) {
  std::int64_t d0 = (m - mod_inverse(n, m)) % m;
  if (d0 == 0) d0 = m;
  std::int64_t d = d0 + m * ((max_q - d0) / m);
  std::int64_t c = static_cast<std::int64_t>((1 + static_cast<i128>(n) * d) / m);
  return {c, d};
}

}  // namespace

void for_each_farey_in(const Rational& lo_in, const Rational& hi_in, std::int64_t max_q,
                       const std::function<bool(const Fraction&)>& visit) {
  if (max_q < 1) throw InvalidArgument("Farey order must be >= 1");
  Rational lo = max(lo_in, Rational(0));
  Rational hi = min(hi_in, Rational(1));
  if (lo > hi) return;

  // Stern-Brocot descent towards lo with batched steps, keeping a/b < lo < c/d.
  const Integer& xn = lo.get_num();
  const Integer& xd = lo.get_den();
  std::int64_t a = 0, b = 1, c = 1, d = 0;
  Fraction prev{0, 1}, cur{0, 1};
  bool exact = false;
  if (lo == 0) {
    exact = true;
    cur = {0, 1};
  } else {
    while (true) {
      std::int64_t mp = a + c, mq = b + d;
      if (mq > max_q) break;
      int s = cmp(Integer(mp) * xd, xn * Integer(mq));
      if (s == 0) {
        exact = true;
        cur = {mp, mq};
        break;
      }
      if (s < 0) {
        // lo > (a + t c)/(b + t d) for t < (xn b - xd a)/(xd c - xn d).
        Integer num = xn * Integer(b) - xd * Integer(a);
        Integer den = xd * Integer(c) - xn * Integer(d);
        Integer t = (num - 1) / den;
        if (d > 0) t = std::min(t, Integer((max_q - b) / d));
        std::int64_t tt = t.get_si();
        if (tt < 1) tt = 1;
        a += tt * c;
        b += tt * d;
      } else {
        Integer num = xd * Integer(c) - xn * Integer(d);
        Integer den = xn * Integer(b) - xd * Integer(a);
        Integer t = (num - 1) / den;
        t = std::min(t, Integer((max_q - d) / b));
        std::int64_t tt = t.get_si();
        if (tt < 1) tt = 1;
        c += tt * a;
        d += tt * b;
      }
    }
  }

  if (exact) {
    prev = cur;
    if (!visit(cur)) return;
    if (cur.p == cur.q) return;
    cur = farey_successor(cur.p, cur.q, max_q);
  } else {
    prev = {a, b};
    cur = {c, d};
  }
  while (true) {
    if (cmp(Integer(cur.p) * hi.get_den(), hi.get_num() * Integer(cur.q)) > 0) return;
    if (!visit(cur)) return;
    if (cur.p == cur.q) return;
    std::int64_t m = (max_q + prev.q) / cur.q;
    Fraction next{m * cur.p - prev.p, m * cur.q - prev.q};
    prev = cur;
    cur = next;
  }
}

}  // namespace mtp
