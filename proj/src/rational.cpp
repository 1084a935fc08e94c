#include "wcat/rational.hpp"

#include <cctype>

namespace wcat {

Rat rat_from_u64(std::uint64_t v) {
  mpz_class z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return Rat(z);
}

Rat rat_from_i64(std::int64_t v) {
  if (v >= 0) return rat_from_u64(static_cast<std::uint64_t>(v));
  return -rat_from_u64(static_cast<std::uint64_t>(-(v + 1)) + 1);
}

bool is_integer(const Rat& q) { return q.get_den() == 1; }

Rat rat_floor(const Rat& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rat(f);
}

Rat rat_ceil(const Rat& q) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rat(c);
}

Rat round_half_even(const Rat& q) {
  Rat f = rat_floor(q);
  Rat frac = q - f;
  Rat half(1, 2);
  if (frac < half) return f;
  if (frac > half) return f + 1;
  // Tie: pick the even neighbour.
  mpz_class fi = f.get_num();
  return mpz_even_p(fi.get_mpz_t()) ? f : f + 1;
}

Rat parse_decimal(const std::string& text) {
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    neg = text[i] == '-';
    ++i;
  }
  std::string digits;
  std::size_t frac_len = 0;
  bool seen_digit = false, seen_dot = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) ++frac_len;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      throw std::invalid_argument("malformed decimal: '" + text + "'");
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed decimal: '" + text + "'");
  mpz_class num(digits, 10);
  mpz_class den = 1;
  for (std::size_t k = 0; k < frac_len; ++k) den *= 10;
  Rat q(num, den);
  q.canonicalize();
  return neg ? Rat(-q) : q;
}

bool has_terminating_decimal(const Rat& q) {
  mpz_class d = q.get_den();
  for (int p : {2, 5}) {
    while (mpz_divisible_ui_p(d.get_mpz_t(), p)) mpz_divexact_ui(d.get_mpz_t(), d.get_mpz_t(), p);
  }
  return d == 1;
}

std::string to_exact_decimal(const Rat& q) {
  if (!has_terminating_decimal(q)) throw std::domain_error("non-terminating decimal");
  if (q == 0) return "0";
  mpz_class num = q.get_num();
  mpz_class den = q.get_den();
  bool neg = num < 0;
  if (neg) num = -num;
  // Scale denominator to a power of ten: den = 2^a 5^b, multiply both by
  // 2^(m-a) 5^(m-b) with m = max(a, b).
  unsigned a = 0, b = 0;
  mpz_class d = den;
  while (mpz_divisible_ui_p(d.get_mpz_t(), 2)) { mpz_divexact_ui(d.get_mpz_t(), d.get_mpz_t(), 2); ++a; }
  while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) { mpz_divexact_ui(d.get_mpz_t(), d.get_mpz_t(), 5); ++b; }
  unsigned m = a > b ? a : b;
  mpz_class scale = 1;
  for (unsigned k = 0; k < m - a; ++k) scale *= 2;
  for (unsigned k = 0; k < m - b; ++k) scale *= 5;
  num *= scale;
  std::string s = num.get_str();
  std::string out;
  if (m == 0) {
    out = s;
  } else {
    while (s.size() <= m) s.insert(s.begin(), '0');
    out = s.substr(0, s.size() - m) + "." + s.substr(s.size() - m);
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return neg ? "-" + out : out;
}

namespace {

// Decimal exponent e with 10^e <= |q| < 10^(e+1); q must be nonzero.
long decimal_exponent(const Rat& q) {
  Rat a = abs(q);
  // Digit-length difference gives the exponent up to +-1; fix up by compare.
  long len_num = static_cast<long>(mpz_sizeinbase(a.get_num_mpz_t(), 10));
  long len_den = static_cast<long>(mpz_sizeinbase(a.get_den_mpz_t(), 10));
  long e = len_num - len_den;
  auto pow10 = [](long k) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(k >= 0 ? k : -k));
    return k >= 0 ? Rat(p) : Rat(1, p);
  };
  while (a < pow10(e)) --e;
  while (a >= pow10(e + 1)) ++e;
  return e;
}

}  // namespace

std::string format_sig(const Rat& q, int sig_figs) {
  if (sig_figs < 1) throw std::invalid_argument("sig_figs < 1");
  if (q == 0) return "0";
  bool neg = q < 0;
  Rat a = abs(q);
  long e = decimal_exponent(a);
  // Scale so the rounded mantissa has exactly sig_figs digits.
  long shift = sig_figs - 1 - e;
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(shift >= 0 ? shift : -shift));
  Rat scaled = shift >= 0 ? Rat(a * p) : Rat(a / p);
  mpz_class mant = round_half_even(scaled).get_num();
  // Rounding may carry into one extra digit (999.6 -> 1000); renormalize.
  if (static_cast<long>(mant.get_str().size()) > sig_figs) {
    mant /= 10;
    --shift;
  }
  std::string digits = mant.get_str();
  std::string out;
  if (shift <= 0) {
    // Integer with trailing zeros.
    out = digits;
    for (long k = 0; k < -shift; ++k) out.push_back('0');
  } else if (static_cast<long>(digits.size()) > shift) {
    out = digits.substr(0, digits.size() - shift) + "." + digits.substr(digits.size() - shift);
  } else {
    out = "0.";
    for (long k = 0; k < shift - static_cast<long>(digits.size()); ++k) out.push_back('0');
    out += digits;
  }
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return neg ? "-" + out : out;
}

std::string lp_number(const Rat& q) {
  if (has_terminating_decimal(q)) return to_exact_decimal(q);
  return format_sig(q, 18);
}

}  // namespace wcat
