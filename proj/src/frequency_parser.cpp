#include "smalldiv/frequency_parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>

namespace smalldiv {

const char* const kFrequencyGrammar =
    "golden | surd:[pre;per] | quotients:[a1,a2,...] | rational:P/Q | "
    "rule:omega-star(alpha=S/n^E,a1=N) | rule:exp-liouville(c=X,a1=N)";

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw DomainError("bad frequency spec: " + what + "; expected " + kFrequencyGrammar);
}

std::string strip(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  return s;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

BigInt parse_int(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) || c == '-'; }))
    fail("'" + s + "' is not an integer");
  BigInt v;
  if (v.set_str(s, 10) != 0) fail("'" + s + "' is not an integer");
  return v;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail("'" + s + "' is not a number");
  return v;
}

std::vector<BigInt> parse_list(const std::string& s, bool allow_empty) {
  std::vector<BigInt> out;
  if (s.empty()) {
    if (!allow_empty) fail("empty quotient list");
    return out;
  }
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    BigInt v = parse_int(item);
    if (v <= 0) fail("partial quotients must be positive, got " + item);
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string bracketed(const std::string& s, const std::string& prefix) {
  const std::string body = s.substr(prefix.size());
  if (body.size() < 2 || body.front() != '[' || body.back() != ']') fail("missing [...] after " + prefix);
  return body.substr(1, body.size() - 2);
}

std::map<std::string, std::string> parse_args(const std::string& s, const std::string& prefix) {
  const std::string body = s.substr(prefix.size());
  std::map<std::string, std::string> out;
  if (body.empty()) return out;
  if (body.front() != '(' || body.back() != ')') fail("rule arguments must be in (...)");
  const std::string inner = body.substr(1, body.size() - 2);
  std::size_t pos = 0;
  while (pos < inner.size()) {
    std::size_t comma = inner.find(',', pos);
    if (comma == std::string::npos) comma = inner.size();
    const std::string kv = inner.substr(pos, comma - pos);
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) fail("argument '" + kv + "' needs name=value");
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
    pos = comma + 1;
  }
  return out;
}

// S/n or S/n^E
std::pair<double, double> parse_alpha(const std::string& s) {
  const std::size_t slash = s.find("/n");
  if (slash == std::string::npos) fail("alpha must look like S/n or S/n^E");
  const double scale = parse_double(s.substr(0, slash));
  const std::string rest = s.substr(slash + 2);
  double e = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '^') fail("alpha must look like S/n or S/n^E");
    e = parse_double(rest.substr(1));
  }
  return {scale, e};
}

void check_known(const std::map<std::string, std::string>& args, std::initializer_list<const char*> names) {
  for (const auto& [k, v] : args)
    if (std::none_of(names.begin(), names.end(), [&](const char* n) { return k == n; }))
      fail("unknown rule argument '" + k + "'");
}

}  // namespace

FrequencySpec parse_frequency(const std::string& text) {
  const std::string s = strip(text);
  if (s == "golden") return FrequencySpec::golden();
  if (starts_with(s, "quotients:")) return FrequencySpec::literal(parse_list(bracketed(s, "quotients:"), false));
  if (starts_with(s, "surd:")) {
    const std::string body = bracketed(s, "surd:");
    const std::size_t semi = body.find(';');
    if (semi == std::string::npos) fail("surd needs [preperiod;period]");
    return FrequencySpec::periodic(parse_list(body.substr(0, semi), true),
                                   parse_list(body.substr(semi + 1), false));
  }
  if (starts_with(s, "rational:")) {
    const std::string body = s.substr(9);
    const std::size_t slash = body.find('/');
    if (slash == std::string::npos) fail("rational needs P/Q");
    BigInt P = parse_int(body.substr(0, slash)), Q = parse_int(body.substr(slash + 1));
    if (!(P > 0 && Q > P)) fail("rational P/Q must lie in (0,1)");
    std::vector<BigInt> a;
    // omega = P/Q = [0; a1, a2, ...]
    BigInt num = Q, den = P;
    while (den != 0) {
      BigInt qt = num / den, r = num % den;
      a.push_back(qt);
      num = den;
      den = r;
    }
    return FrequencySpec::literal(a);
  }
  if (starts_with(s, "rule:omega-star")) {
    const auto args = parse_args(s, "rule:omega-star");
    check_known(args, {"alpha", "a1"});
    double scale = 1.0, e = 1.0;
    if (auto it = args.find("alpha"); it != args.end()) std::tie(scale, e) = parse_alpha(it->second);
    BigInt a1 = 2;
    if (auto it = args.find("a1"); it != args.end()) a1 = parse_int(it->second);
    if (a1 <= 0) fail("a1 must be positive");
    return FrequencySpec::omega_star(a1, scale, e);
  }
  if (starts_with(s, "rule:exp-liouville")) {
    const auto args = parse_args(s, "rule:exp-liouville");
    check_known(args, {"c", "a1"});
    double c = 0.5;
    if (auto it = args.find("c"); it != args.end()) c = parse_double(it->second);
    if (!(c > 0.0)) fail("c must be positive");
    BigInt a1 = 1;
    if (auto it = args.find("a1"); it != args.end()) a1 = parse_int(it->second);
    if (a1 <= 0) fail("a1 must be positive");
    return FrequencySpec::exp_liouville(c, a1);
  }
  fail("'" + text + "'");
}

}  // namespace smalldiv
