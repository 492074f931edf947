#include "cbv/rational.hpp"

#include <cctype>

namespace cbv {

Rat rat(long num, long den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Rat pow2(long k) {
  Int p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2,
                static_cast<unsigned long>(k >= 0 ? k : -k));
  if (k >= 0) return Rat(p);
  return Rat(Int(1), p);  // gcd(1, 2^-k) = 1: already canonical
}

long ceil_log2_abs(const Rat& x) {
  if (x == 0) throw std::invalid_argument("ceil_log2_abs(0)");
  const Int num = abs(x.get_num());
  const Int den = x.get_den();
  // sizeinbase gives floor(log2)+1; candidate within one either way.
  long e = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  Rat a = abs(x);
  while (a > pow2(e)) ++e;
  while (e > -(1L << 30) && a <= pow2(e - 1)) --e;
  return e;
}

std::optional<Rat> parse_rat(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t pos = 0;
  bool neg = false;
  if (s[pos] == '+' || s[pos] == '-') {
    neg = s[pos] == '-';
    ++pos;
  }
  if (pos >= s.size()) return std::nullopt;

  auto digits = [&](std::string& out) {
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      out.push_back(s[pos++]);
  };

  std::string ip;
  digits(ip);
  Rat r;
  if (pos < s.size() && s[pos] == '/') {
    ++pos;
    std::string dp;
    digits(dp);
    if (ip.empty() || dp.empty() || pos != s.size()) return std::nullopt;
    Int den(dp);
    if (den == 0) return std::nullopt;
    r = Rat(Int(ip), den);
    r.canonicalize();
  } else if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::string fp;
    digits(fp);
    if ((ip.empty() && fp.empty()) || pos != s.size()) return std::nullopt;
    Int scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    Int whole = ip.empty() ? Int(0) : Int(ip);
    Int frac = fp.empty() ? Int(0) : Int(fp);
    r = Rat(whole * scale + frac, scale);
    r.canonicalize();
  } else {
    if (ip.empty() || pos != s.size()) return std::nullopt;
    r = Rat(Int(ip));
  }
  if (neg) r = -r;
  return r;
}

std::string rat_string(const Rat& x) {
  return x.get_str();
}

std::string decimal_string(const Rat& x) {
  Int den = x.get_den();
  unsigned long twos = 0, fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return x.get_str();
  // denominator 2^a 5^b: pad to 10^max(a,b)
  unsigned long digits = std::max(twos, fives);
  Int scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  Int n = x.get_num() * (scale / x.get_den());
  bool neg = n < 0;
  if (neg) n = -n;
  std::string raw = n.get_str();
  std::string out;
  if (digits == 0) {
    out = raw;
  } else {
    if (raw.size() <= digits) raw.insert(0, digits + 1 - raw.size(), '0');
    out = raw.substr(0, raw.size() - digits) + "." + raw.substr(raw.size() - digits);
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return neg ? "-" + out : out;
}

}  // namespace cbv
