#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace medjargon::testing {

namespace {

bool oracle_stopword(const std::string& t) {
  static const std::set<std::string> words = {"a",  "an", "the", "of", "by",
                                              "with", "for", "to", "in", "on",
                                              "and", "or", "requiring", "related",
                                              "history"};
  return words.count(t) > 0;
}

bool ends_with(const std::string& t, const char* suffix) {
  const std::size_t m = std::strlen(suffix);
  return t.size() >= m && t.compare(t.size() - m, m, suffix) == 0;
}

std::string oracle_stem(const std::string& t) {
  // Unrolled on purpose: first suffix in fixed order whose removal leaves
  // at least 4 characters.
  if (ends_with(t, "es") && t.size() >= 6) return t.substr(0, t.size() - 2);
  if (ends_with(t, "s") && t.size() >= 5) return t.substr(0, t.size() - 1);
  if (ends_with(t, "ic") && t.size() >= 6) return t.substr(0, t.size() - 2);
  if (ends_with(t, "ical") && t.size() >= 8) return t.substr(0, t.size() - 4);
  if (ends_with(t, "ia") && t.size() >= 6) return t.substr(0, t.size() - 2);
  return t;
}

std::set<std::string> oracle_token_set(const std::string& text) {
  const auto toks = oracle_tokens(text);
  return std::set<std::string>(toks.begin(), toks.end());
}

}  // namespace

std::vector<std::string> oracle_tokens(const std::string& text) {
  std::string spaced;
  for (char ch : text) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      spaced.push_back(ch);
    } else if (c >= 'A' && c <= 'Z') {
      spaced.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      spaced.push_back(' ');
    }
  }
  std::istringstream in(spaced);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) {
    if (!oracle_stopword(tok)) out.push_back(oracle_stem(tok));
  }
  return out;
}

bool oracle_match(const std::string& a, const std::string& b) {
  const std::set<std::string> sa = oracle_token_set(a);
  const std::set<std::string> sb = oracle_token_set(b);
  if (!sa.empty() && !sb.empty()) {
    const bool a_in_b =
        std::all_of(sa.begin(), sa.end(), [&](const std::string& t) { return sb.count(t); });
    const bool b_in_a =
        std::all_of(sb.begin(), sb.end(), [&](const std::string& t) { return sa.count(t); });
    if (a_in_b || b_in_a) return true;
  }
  std::size_t inter = 0;
  for (const auto& t : sa) {
    if (sb.count(t)) ++inter;
  }
  const std::size_t uni = sa.size() + sb.size() - inter;
  if (uni == 0) return false;
  return static_cast<double>(inter) / static_cast<double>(uni) >= 0.5;
}

namespace {

std::vector<std::size_t> gold_visit_order(const std::vector<OracleGold>& gold) {
  std::vector<std::size_t> order(gold.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto key = [&](std::size_t i) {
      return std::make_tuple(gold[i].major, gold[i].minor.has_value() ? 1 : 0,
                             gold[i].minor.value_or(0), i);
    };
    return key(x) < key(y);
  });
  return order;
}

}  // namespace

OracleOutcome oracle_assign(const std::vector<std::string>& extracted,
                            const std::vector<OracleGold>& gold) {
  const std::vector<std::size_t> order = gold_visit_order(gold);
  std::vector<bool> used(gold.size(), false);

  OracleOutcome out;
  for (std::size_t e = 0; e < extracted.size(); ++e) {
    bool matched = false;
    for (std::size_t gi : order) {
      if (used[gi]) continue;
      if (oracle_match(extracted[e], gold[gi].text)) {
        used[gi] = true;
        matched = true;
        break;
      }
    }
    if (matched) {
      ++out.tp;
      if (out.first_match_position == 0) out.first_match_position = static_cast<int>(e) + 1;
    } else {
      ++out.fp;
    }
  }
  out.fn = static_cast<int>(gold.size()) - out.tp;
  return out;
}

namespace {

int best_from(std::size_t e, const std::vector<std::vector<bool>>& can,
              std::vector<bool>& used) {
  if (e == can.size()) return 0;
  int best = best_from(e + 1, can, used);  // leave e unmatched
  for (std::size_t g = 0; g < used.size(); ++g) {
    if (used[g] || !can[e][g]) continue;
    used[g] = true;
    best = std::max(best, 1 + best_from(e + 1, can, used));
    used[g] = false;
  }
  return best;
}

}  // namespace

int oracle_max_matching(const std::vector<std::string>& extracted,
                        const std::vector<OracleGold>& gold) {
  std::vector<std::vector<bool>> can(extracted.size(), std::vector<bool>(gold.size(), false));
  for (std::size_t e = 0; e < extracted.size(); ++e) {
    for (std::size_t g = 0; g < gold.size(); ++g) {
      can[e][g] = oracle_match(extracted[e], gold[g].text);
    }
  }
  std::vector<bool> used(gold.size(), false);
  return best_from(0, can, used);
}

Frac frac_of(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

Frac frac_add(Frac a, Frac b) {
  const __int128 num = static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den;
  const __int128 den = static_cast<__int128>(a.den) * b.den;
  __int128 g = den;
  __int128 n = num < 0 ? -num : num;
  while (n != 0) {
    const __int128 t = g % n;
    g = n;
    n = t;
  }
  if (g == 0) g = 1;
  const __int128 rn = num / g;
  const __int128 rd = den / g;
  if (rn > INT64_MAX || rn < INT64_MIN || rd > INT64_MAX) {
    throw std::overflow_error("fraction overflow");
  }
  return {static_cast<long long>(rn), static_cast<long long>(rd)};
}

double frac_value(Frac f) {
  return static_cast<double>(f.num) / static_cast<double>(f.den);
}

double oracle_mrr(const std::vector<int>& first_positions) {
  if (first_positions.empty()) throw std::invalid_argument("empty set");
  Frac sum{0, 1};
  for (int pos : first_positions) {
    if (pos > 0) sum = frac_add(sum, frac_of(1, pos));
  }
  return frac_value(
      frac_of(sum.num, sum.den * static_cast<long long>(first_positions.size())));
}

namespace {

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double betacf(double a, double b, double x) {
  const double tiny = 1e-300;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double oracle_paired_t_pvalue(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("bad fold vectors");
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  double mean = 0.0;
  for (double d : diff) mean += d;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / (static_cast<double>(n) - 1.0));
  if (sd == 0.0) return mean == 0.0 ? 1.0 : 0.0;
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const double df = static_cast<double>(n) - 1.0;
  // Two-sided p = I_{df/(df+t^2)}(df/2, 1/2).
  return reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
}

}  // namespace medjargon::testing
