#include "rotcool/angular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rotcool/errors.hpp"

namespace rotcool {

namespace {

using boost::multiprecision::cpp_int;

// x = mant * 2^exp2, with mant in [0.5, 1).
struct Scaled {
  long double mant = 1.0L;
  long exp2 = 0;

  static Scaled of(long double v) {
    Scaled s;
    int e = 0;
    s.mant = std::frexp(v, &e);
    s.exp2 = e;
    return s;
  }

  Scaled& operator*=(const Scaled& o) {
    int e = 0;
    mant = std::frexp(mant * o.mant, &e);
    exp2 += o.exp2 + e;
    return *this;
  }

  Scaled& operator/=(const Scaled& o) {
    int e = 0;
    mant = std::frexp(mant / o.mant, &e);
    exp2 += e - o.exp2;
    return *this;
  }
};

constexpr int kMaxFactorial = 16384;

const std::vector<Scaled>& factorial_table() {
  static const std::vector<Scaled> table = [] {
    std::vector<Scaled> t(kMaxFactorial + 1);
    t[0] = Scaled::of(1.0L);
    for (int n = 1; n <= kMaxFactorial; ++n) {
      t[n] = t[n - 1];
      t[n] *= Scaled::of(static_cast<long double>(n));
    }
    return t;
  }();
  return table;
}

const Scaled& factorial(int n) {
  if (n < 0 || n > kMaxFactorial) {
    throw ValidationError("wigner3j", "factorial argument out of supported range");
  }
  return factorial_table()[static_cast<std::size_t>(n)];
}

// |x| as a scaled long double; keeps the leading 64 bits.
Scaled to_scaled(const cpp_int& x) {
  cpp_int a = abs(x);
  if (a == 0) return Scaled{0.0L, 0};
  const unsigned msb = boost::multiprecision::msb(a);
  long shift = 0;
  if (msb > 62) {
    shift = static_cast<long>(msb) - 62;
    a >>= shift;
  }
  Scaled s = Scaled::of(a.convert_to<long double>());
  s.exp2 += shift;
  return s;
}

bool is_even(int n) { return n % 2 == 0; }

}  // namespace

std::string_view to_string(Parity p) { return p == Parity::e ? "e" : "f"; }

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::P: return "P";
    case Branch::Q: return "Q";
    case Branch::R: return "R";
  }
  return "?";
}

Branch branch_of(int j_upper, int j_lower) {
  switch (j_upper - j_lower) {
    case -1: return Branch::P;
    case 0: return Branch::Q;
    case 1: return Branch::R;
    default: throw ValidationError("branch", "|J_upper - J_lower| must be <= 1");
  }
}

ThreeJArgs::ThreeJArgs(int j1, int j2, int j3, int m1, int m2, int m3)
    : tj_{2 * j1, 2 * j2, 2 * j3}, tm_{2 * m1, 2 * m2, 2 * m3} {
  validate();
}

ThreeJArgs ThreeJArgs::from_twice(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
  ThreeJArgs a;
  a.tj_ = {tj1, tj2, tj3};
  a.tm_ = {tm1, tm2, tm3};
  a.validate();
  return a;
}

void ThreeJArgs::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (tj_[i] < 0) throw ValidationError("wigner3j", "j must be non-negative");
    if (std::abs(tm_[i]) > tj_[i]) throw ValidationError("wigner3j", "|m| must not exceed j");
    if (!is_even(tj_[i] - tm_[i])) {
      throw ValidationError("wigner3j", "j and m must both be integer or both half-integer");
    }
  }
}

double wigner3j(const ThreeJArgs& args) {
  const auto& tj = args.twice_j();
  const auto& tm = args.twice_m();

  if (tm[0] + tm[1] + tm[2] != 0) return 0.0;
  if (!is_even(tj[0] + tj[1] + tj[2])) return 0.0;
  if (tj[2] < std::abs(tj[0] - tj[1]) || tj[2] > tj[0] + tj[1]) return 0.0;
  if (tm[0] == 0 && tm[1] == 0 && tm[2] == 0 && !is_even((tj[0] + tj[1] + tj[2]) / 2)) return 0.0;

  // Integer arguments of the Racah sum.
  const int a = (tj[0] + tj[1] - tj[2]) / 2;
  const int b = (tj[0] - tm[0]) / 2;
  const int c = (tj[1] + tm[1]) / 2;
  const int d = (tj[2] - tj[1] + tm[0]) / 2;
  const int e = (tj[2] - tj[0] - tm[1]) / 2;

  const int kmin = std::max({0, -d, -e});
  const int kmax = std::min({a, b, c});
  if (kmin > kmax) return 0.0;

  // Horner evaluation of sum_k t_k / t_kmin with
  // t_{k+1}/t_k = -(a-k)(b-k)(c-k) / ((k+1)(d+k+1)(e+k+1)), exactly.
  cpp_int num = 1;
  cpp_int den = 1;
  for (int k = kmax - 1; k >= kmin; --k) {
    const cpp_int p = cpp_int(a - k) * (b - k) * (c - k);
    const cpp_int q = cpp_int(k + 1) * (d + k + 1) * (e + k + 1);
    num = q * den - p * num;
    den = q * den;
  }
  if (num == 0) return 0.0;

  // value^2 = Delta * prod (j +- m)! / D(kmin)^2 * (num/den)^2
  Scaled sq = factorial(a);
  sq *= factorial((tj[0] - tj[1] + tj[2]) / 2);
  sq *= factorial((-tj[0] + tj[1] + tj[2]) / 2);
  sq /= factorial((tj[0] + tj[1] + tj[2]) / 2 + 1);
  for (int i = 0; i < 3; ++i) {
    sq *= factorial((tj[i] + tm[i]) / 2);
    sq *= factorial((tj[i] - tm[i]) / 2);
  }
  for (const int n : {kmin, a - kmin, b - kmin, c - kmin, d + kmin, e + kmin}) {
    sq /= factorial(n);
    sq /= factorial(n);
  }
  const Scaled ratio_num = to_scaled(num);
  const Scaled ratio_den = to_scaled(den);
  sq *= ratio_num;
  sq *= ratio_num;
  sq /= ratio_den;
  sq /= ratio_den;

  // sqrt of mant * 2^exp2 with an even exponent
  long double mant = sq.mant;
  long exp2 = sq.exp2;
  if (exp2 % 2 != 0) {
    mant *= 2.0L;
    exp2 -= 1;
  }
  const long double magnitude = std::ldexp(std::sqrt(mant), static_cast<int>(exp2 / 2));

  int sign = is_even((tj[0] - tj[1] - tm[2]) / 2) ? 1 : -1;
  if (!is_even(kmin)) sign = -sign;
  if ((num < 0) != (den < 0)) sign = -sign;
  return static_cast<double>(sign * magnitude);
}

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  return wigner3j(ThreeJArgs(j1, j2, j3, m1, m2, m3));
}

bool dipole_allowed(const StateLabel& upper, const StateLabel& lower) {
  const int dj = upper.J - lower.J;
  if (dj < -1 || dj > 1) return false;
  if (dj == 0) return upper.parity != lower.parity;
  return upper.parity == lower.parity;
}

namespace {

void check_state(const StateLabel& s, const char* which) {
  if (s.Lambda < 0) throw ValidationError(which, "Lambda must be non-negative");
  if (s.J < s.Lambda) throw ValidationError(which, "J must be >= Lambda");
}

int kron(int a, int b) { return a == b ? 1 : 0; }

}  // namespace

double honl_london(const StateLabel& upper, const StateLabel& lower) {
  check_state(upper, "upper");
  check_state(lower, "lower");
  if (std::abs(upper.Lambda - lower.Lambda) > 1) {
    throw ValidationError("Lambda", "|Lambda' - Lambda| must be <= 1");
  }
  if (!dipole_allowed(upper, lower)) return 0.0;

  const int lu = upper.Lambda;
  const int ll = lower.Lambda;
  const int prefactor = 1 + kron(lu, 0) + kron(ll, 0) - 2 * kron(lu, 0) * kron(ll, 0);
  const double tj = wigner3j(upper.J, 1, lower.J, -lu, lu - ll, ll);
  return prefactor * (2.0 * upper.J + 1.0) * (2.0 * lower.J + 1.0) * tj * tj;
}

double honl_london_sum(int j_upper, int lambda_upper, int lambda_lower) {
  return (1 + kron(lambda_upper, 0) * kron(lambda_lower, 1)) * (2.0 * j_upper + 1.0);
}

double emission_branching(const StateLabel& upper, const StateLabel& lower) {
  return honl_london(upper, lower) / honl_london_sum(upper.J, upper.Lambda, lower.Lambda);
}

}  // namespace rotcool
