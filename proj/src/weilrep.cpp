#include "hwmf/weilrep.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <tuple>

namespace hwmf {

namespace {

using i128 = __int128;

long long mul_checked(long long x, long long y) {
  long long r;
  if (__builtin_mul_overflow(x, y, &r)) throw ValidationError("SL2(Z) entry overflow");
  return r;
}

long long add_checked(long long x, long long y) {
  long long r;
  if (__builtin_add_overflow(x, y, &r)) throw ValidationError("SL2(Z) entry overflow");
  return r;
}

i128 mul128(i128 x, i128 y) {
  i128 r;
  if (__builtin_mul_overflow(x, y, &r)) throw ValidationError("metaplectic cocycle: entries too large");
  return r;
}

i128 add128(i128 x, i128 y) {
  i128 r;
  if (__builtin_add_overflow(x, y, &r)) throw ValidationError("metaplectic cocycle: entries too large");
  return r;
}

// Principal argument of x + iy for exact integers; y = 0, x < 0 gives +pi.
long double arg_exact(i128 x, i128 y) {
  if (y == 0) return x < 0 ? std::acos(-1.0L) : 0.0L;
  return std::atan2(static_cast<long double>(y), static_cast<long double>(x));
}

// Sign s with sqrt(c_A (B tau) + d_A) sqrt(c_B tau + d_B) = s sqrt(c_AB tau + d_AB)
// at tau = 2i. With B tau = (X + 2i) / Dn, every real and imaginary part
// below is an exact integer, so only the final atan2 calls round.
int cocycle(const Sl2z& A, const Sl2z& B, const Sl2z& AB) {
  i128 X = add128(mul128(B.b, B.d), mul128(4 * static_cast<i128>(B.a), B.c));
  i128 Dn = add128(mul128(B.d, B.d), mul128(4 * static_cast<i128>(B.c), B.c));
  long double a1 = arg_exact(add128(mul128(A.c, X), mul128(A.d, Dn)), 2 * static_cast<i128>(A.c));
  long double a2 = arg_exact(B.d, 2 * static_cast<i128>(B.c));
  long double a3 = arg_exact(AB.d, 2 * static_cast<i128>(AB.c));
  // a1 + a2 - a3 is 0 or +-2pi exactly.
  return std::fabs(a1 + a2 - a3) > std::acos(-1.0L) ? -1 : 1;
}

long long floor_div(long long p, long long q) {
  long long r = p / q;
  if ((p % q != 0) && ((p < 0) != (q < 0))) --r;
  return r;
}

// Nearest integer to p/q for q != 0, halves rounded up.
long long nearest_div(long long p, long long q) {
  if (q < 0) {
    p = -p;
    q = -q;
  }
  return floor_div(add_checked(mul_checked(2, p), q), 2 * q);
}

struct Gen {
  char kind;        // 'T', 'S', 'Z'
  long long q = 0;  // exponent for 'T'
};

Sl2z gen_matrix(const Gen& g) {
  switch (g.kind) {
    case 'T': return Sl2z::T(g.q);
    case 'S': return Sl2z::S();
    default: return {-1, 0, 0, -1};
  }
}

// Word in canonical lifts of T^q, S and Z = S^2 whose product is (M, sign).
std::vector<Gen> decompose(const MetaplecticElement& elt) {
  const Sl2z& M = elt.m;
  std::vector<long long> qs;
  Sl2z cur = M;
  while (cur.c != 0) {
    long long q = nearest_div(cur.d, cur.c);
    cur = cur * Sl2z::T(-q);
    cur = cur * Sl2z::S();
    qs.push_back(q);
  }
  // cur = eps (1, eps b; 0, 1); every S^{-1} = Z S contributes one Z.
  long long eps = cur.a;
  long long z = (eps < 0 ? 1 : 0) + static_cast<long long>(qs.size());
  std::vector<Gen> word;
  for (long long i = 0; i < z % 4; ++i) word.push_back({'Z'});
  word.push_back({'T', mul_checked(eps, cur.b)});
  for (auto it = qs.rbegin(); it != qs.rend(); ++it) {
    word.push_back({'S'});
    word.push_back({'T', *it});
  }

  MetaplecticElement acc = canonical_lift(Sl2z::identity());
  for (const Gen& g : word) acc = mp_compose(acc, canonical_lift(gen_matrix(g)));
  if (!(acc.m == M)) throw std::logic_error("weil word does not reproduce " + M.to_string());
  if (acc.sign != elt.sign) {
    // Z^2 = (I, -1).
    word.insert(word.begin(), {Gen{'Z'}, Gen{'Z'}});
  }
  return word;
}

struct CacheKey {
  long long a, b, c, d;
  int sign, N;
  bool conj;
  mpfr_prec_t prec;
  auto tie() const { return std::tie(a, b, c, d, sign, N, conj, prec); }
  bool operator<(const CacheKey& o) const { return tie() < o.tie(); }
};

constexpr size_t kCacheBytes = size_t(256) << 20;

struct RhoCache {
  std::mutex mu;
  std::map<CacheKey, std::shared_ptr<const RepMatrix>> map;
  std::deque<CacheKey> order;
  size_t bytes = 0;
  std::map<std::pair<int, mpfr_prec_t>, std::shared_ptr<const RepMatrix>> generators_S;
};

RhoCache& cache() {
  static RhoCache c;
  return c;
}

size_t approx_bytes(const RepMatrix& r) {
  size_t n = static_cast<size_t>(r.dim());
  return n * n * sizeof(BigComplex) + 64;
}

RepMatrix build_S(int N, mpfr_prec_t prec) {
  RepMatrix S(N, false, prec);
  int n = 2 * N;
  // (2iN)^{-1/2} = e(-1/8) / sqrt(2N)
  BigComplex c = unit_circle_exp_ratio(prec, -1, 8);
  BigReal two_n(prec);
  mpfr_set_si(two_n.raw(), n, MPFR_RNDN);
  c /= sqrt(two_n);
  for (int h = 0; h < n; ++h)
    for (int hp = 0; hp < n; ++hp)
      S.at(hp, h) = unit_circle_exp_ratio(prec, -static_cast<long long>(h) * hp, n) * c;
  return S;
}

std::shared_ptr<const RepMatrix> cached_S(int N, mpfr_prec_t prec) {
  RhoCache& c = cache();
  {
    std::lock_guard<std::mutex> lk(c.mu);
    auto it = c.generators_S.find({N, prec});
    if (it != c.generators_S.end()) return it->second;
  }
  auto s = std::make_shared<const RepMatrix>(build_S(N, prec));
  std::lock_guard<std::mutex> lk(c.mu);
  return c.generators_S.emplace(std::make_pair(N, prec), s).first->second;
}

void conjugate_in_place(RepMatrix& R) {
  for (int h = 0; h < R.dim(); ++h)
    for (int hp = 0; hp < R.dim(); ++hp) mpfr_neg(R.at(h, hp).im.raw(), R.at(h, hp).im.raw(), MPFR_RNDN);
}

RepMatrix evaluate_word(const std::vector<Gen>& word, int N, bool conjugated, mpfr_prec_t prec) {
  const int n = 2 * N;
  RepMatrix R(N, conjugated, prec);
  bool diagonal = true;
  for (int h = 0; h < n; ++h) mpfr_set_ui(R.at(h, h).re.raw(), 1, MPFR_RNDN);
  std::shared_ptr<const RepMatrix> S;
  BigReal t(prec);
  std::vector<BigComplex> col(static_cast<size_t>(n), BigComplex(prec));
  std::vector<BigComplex> row(static_cast<size_t>(n), BigComplex(prec));
  for (const Gen& g : word) {
    if (g.kind == 'T') {
      if (g.q == 0) continue;
      long long four_n = 4LL * N;
      long long qr = g.q % four_n;
      for (int hp = 0; hp < n; ++hp) {
        long long num = (qr * ((static_cast<long long>(hp) * hp) % four_n)) % four_n;
        col[hp] = unit_circle_exp_ratio(prec, num, four_n);
      }
      for (int h = 0; h < n; ++h)
        for (int hp = 0; hp < n; ++hp) {
          if (diagonal && h != hp) continue;
          R.at(h, hp) *= col[hp];
        }
    } else if (g.kind == 'Z') {
      // (R Z)[h][h'] = -i R[h][-h']
      for (int h = 0; h < n; ++h) {
        for (int hp = 0; hp < n; ++hp) {
          const BigComplex& src = R.at(h, (n - hp) % n);
          row[hp].re = src.im;
          row[hp].im = -src.re;
        }
        for (int hp = 0; hp < n; ++hp) R.at(h, hp) = row[hp];
      }
      diagonal = false;
    } else {
      if (!S) S = cached_S(N, prec);
      if (diagonal) {
        // R is diagonal here: scale the rows of S.
        for (int h = 0; h < n; ++h) {
          BigComplex dh = R.at(h, h);
          for (int hp = 0; hp < n; ++hp) R.at(h, hp) = dh * S->at(h, hp);
        }
        diagonal = false;
        continue;
      }
      for (int h = 0; h < n; ++h) {
        for (int hp = 0; hp < n; ++hp) {
          mpfr_set_zero(row[hp].re.raw(), 1);
          mpfr_set_zero(row[hp].im.raw(), 1);
        }
        for (int j = 0; j < n; ++j) {
          const BigComplex& r = R.at(h, j);
          for (int hp = 0; hp < n; ++hp) kernel::mul_add(row[hp], r, S->at(j, hp), t.raw());
        }
        for (int hp = 0; hp < n; ++hp) R.at(h, hp) = row[hp];
      }
    }
  }
  if (conjugated) conjugate_in_place(R);
  return R;
}

}  // namespace

Sl2z Sl2z::make(long long a, long long b, long long c, long long d) {
  i128 det = static_cast<i128>(a) * d - static_cast<i128>(b) * c;
  if (det != 1) throw ValidationError("matrix " + Sl2z{a, b, c, d}.to_string() + " has determinant != 1");
  return {a, b, c, d};
}

std::string Sl2z::to_string() const {
  return "(" + std::to_string(a) + "," + std::to_string(b) + ";" + std::to_string(c) + "," +
         std::to_string(d) + ")";
}

Sl2z operator*(const Sl2z& x, const Sl2z& y) {
  return {add_checked(mul_checked(x.a, y.a), mul_checked(x.b, y.c)),
          add_checked(mul_checked(x.a, y.b), mul_checked(x.b, y.d)),
          add_checked(mul_checked(x.c, y.a), mul_checked(x.d, y.c)),
          add_checked(mul_checked(x.c, y.b), mul_checked(x.d, y.d))};
}

MetaplecticElement canonical_lift(const Sl2z& m) {
  return {Sl2z::make(m.a, m.b, m.c, m.d), 1};
}

MetaplecticElement mp_compose(const MetaplecticElement& A, const MetaplecticElement& B) {
  Sl2z AB = A.m * B.m;
  return {AB, A.sign * B.sign * cocycle(A.m, B.m, AB)};
}

MetaplecticElement mp_inverse(const MetaplecticElement& A) {
  MetaplecticElement inv{A.m.inverse(), 1};
  // A * inv must be (I, +1); the product sign is A.sign * cocycle.
  MetaplecticElement prod = mp_compose(A, inv);
  inv.sign = prod.sign;
  return inv;
}

BigComplex mp_phi(const MetaplecticElement& A, const BigComplex& tau) {
  mpfr_prec_t p = tau.precision();
  BigReal c(p), d(p);
  mpfr_set_si(c.raw(), A.m.c, MPFR_RNDN);
  mpfr_set_si(d.raw(), A.m.d, MPFR_RNDN);
  BigComplex w(tau.re * c + d, tau.im * c);
  BigComplex r = principal_power_halfint(w, 1);
  return A.sign < 0 ? -r : r;
}

RepMatrix::RepMatrix(int N, bool conjugated, mpfr_prec_t prec)
    : N_(N), conjugated_(conjugated), prec_(prec),
      e_(static_cast<size_t>(4) * N * N, BigComplex(prec)) {
  if (N < 1) throw ValidationError("N must be positive");
}

std::vector<BigComplex> RepMatrix::apply(const std::vector<BigComplex>& x) const {
  if (static_cast<int>(x.size()) != dim()) throw ValidationError("RepMatrix::apply: dimension mismatch");
  std::vector<BigComplex> y(x.size(), BigComplex(prec_));
  BigReal t(prec_);
  for (int h = 0; h < dim(); ++h)
    for (int hp = 0; hp < dim(); ++hp) kernel::mul_add(y[h], at(h, hp), x[hp], t.raw());
  return y;
}

bool RepMatrix::operator==(const RepMatrix& o) const {
  return N_ == o.N_ && conjugated_ == o.conjugated_ && prec_ == o.prec_ && e_ == o.e_;
}

std::shared_ptr<const RepMatrix> rho_evaluate(const MetaplecticElement& elt, int N, bool conjugated,
                                              const PrecisionContext& ctx) {
  if (N < 1) throw ValidationError("N must be positive");
  Sl2z::make(elt.m.a, elt.m.b, elt.m.c, elt.m.d);
  if (elt.sign != 1 && elt.sign != -1) throw ValidationError("metaplectic sign must be +-1");
  CacheKey key{elt.m.a, elt.m.b, elt.m.c, elt.m.d, elt.sign, N, conjugated, ctx.bits};
  RhoCache& c = cache();
  {
    std::lock_guard<std::mutex> lk(c.mu);
    auto it = c.map.find(key);
    if (it != c.map.end()) return it->second;
  }
  auto value = std::make_shared<const RepMatrix>(evaluate_word(decompose(elt), N, conjugated, ctx.bits));

  std::lock_guard<std::mutex> lk(c.mu);
  auto [it, inserted] = c.map.emplace(key, value);
  if (inserted) {
    c.order.push_back(key);
    c.bytes += approx_bytes(*value);
    while (c.bytes > kCacheBytes && c.order.size() > 1) {
      auto old = c.map.find(c.order.front());
      c.bytes -= approx_bytes(*old->second);
      c.map.erase(old);
      c.order.pop_front();
    }
  }
  return it->second;
}

RepMatrix rho_T(int N, bool conjugated, const PrecisionContext& ctx) {
  RepMatrix R(N, conjugated, ctx.bits);
  for (int h = 0; h < 2 * N; ++h) {
    R.at(h, h) = unit_circle_exp_ratio(ctx.bits, static_cast<long long>(h) * h, 4LL * N);
  }
  if (conjugated) conjugate_in_place(R);
  return R;
}

RepMatrix rho_S(int N, bool conjugated, const PrecisionContext& ctx) {
  RepMatrix S = build_S(N, ctx.bits);
  if (!conjugated) return S;
  RepMatrix R(N, true, ctx.bits);
  for (int h = 0; h < 2 * N; ++h)
    for (int hp = 0; hp < 2 * N; ++hp) R.at(h, hp) = S.at(h, hp);
  conjugate_in_place(R);
  return R;
}

void rho_cache_clear() {
  RhoCache& c = cache();
  std::lock_guard<std::mutex> lk(c.mu);
  c.map.clear();
  c.order.clear();
  c.bytes = 0;
  c.generators_S.clear();
}

size_t rho_cache_size() {
  RhoCache& c = cache();
  std::lock_guard<std::mutex> lk(c.mu);
  return c.map.size();
}

}  // namespace hwmf
