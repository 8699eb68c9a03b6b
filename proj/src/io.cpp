#include "helson/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "helson/error.hpp"

namespace helson::io {

using construct::cplx;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

template <class Int>
Int parse_int(const std::string& s) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("not an integer: '" + s + "'");
  return v;
}

std::string where(std::size_t line) { return " (line " + std::to_string(line + 1) + ")"; }

std::string cnum(cplx z, bool complex_valued) { return complex_valued ? num(z.real()) + ":" + num(z.imag()) : num(z.real()); }

cplx parse_cnum(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) return {parse_double(s), 0.0};
  return {parse_double(s.substr(0, colon)), parse_double(s.substr(colon + 1))};
}

// "# key=value" header lines, in order; repeated keys kept
std::vector<std::pair<std::string, std::string>> header_pairs(const std::vector<std::string>& lines, std::size_t& i) {
  std::vector<std::pair<std::string, std::string>> out;
  for (; i < lines.size() && lines[i].rfind("# ", 0) == 0; ++i) {
    const std::string body = lines[i].substr(2);
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw FormatError("header line without '='" + where(i));
    out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
  }
  return out;
}

}  // namespace

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s.empty()) throw FormatError("empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw FormatError("not a number: '" + s + "'");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ResourceError("cannot write " + path);
  out << text;
  if (!out) throw ResourceError("write failed: " + path);
}

std::string format_primes(const primes::PrimeTable& t) {
  std::string out = "# primes lo=" + std::to_string(t.segment_lo) + " hi=" + std::to_string(t.segment_hi) + "\n";
  for (auto p : t.primes) out += std::to_string(p) + "\n";
  return out;
}

primes::PrimeTable parse_primes(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0].rfind("# primes lo=", 0) != 0) throw FormatError("missing '# primes' header");
  const auto parts = split(lines[0].substr(2), ' ');
  if (parts.size() != 3 || parts[2].rfind("hi=", 0) != 0) throw FormatError("bad primes header");
  primes::PrimeTable t;
  t.segment_lo = parse_int<std::uint64_t>(parts[1].substr(3));
  t.segment_hi = parse_int<std::uint64_t>(parts[2].substr(3));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto p = parse_int<std::uint64_t>(lines[i]);
    if (!t.primes.empty() && p <= t.primes.back()) throw FormatError("primes not ascending" + where(i));
    t.primes.push_back(p);
  }
  return t;
}

std::string format_multiset(const multisets::SignedMultiset& Z) {
  std::string out = "# signed-multiset v1\n";
  for (const auto& p : Z.points()) out += num(p.beta) + "," + num(p.gamma) + "," + std::to_string(p.mult) + "\n";
  return out;
}

multisets::SignedMultiset parse_multiset(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != "# signed-multiset v1") throw FormatError("missing '# signed-multiset v1' header");
  std::vector<multisets::Point> pts;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    if (f.size() != 3) throw FormatError("multiset row needs beta,gamma,mult" + where(i));
    pts.push_back({parse_double(f[0]), parse_double(f[1]), parse_int<int>(f[2])});
  }
  return multisets::SignedMultiset(std::move(pts));
}

std::string schedule_name(construct::Schedule s) {
  switch (s) {
    case construct::Schedule::Power: return "power";
    case construct::Schedule::Cramer: return "cramer";
    case construct::Schedule::SqrtLog: return "sqrtlog";
  }
  return "unknown";
}

construct::Schedule parse_schedule(const std::string& s) {
  if (s == "power") return construct::Schedule::Power;
  if (s == "cramer") return construct::Schedule::Cramer;
  if (s == "sqrtlog") return construct::Schedule::SqrtLog;
  throw FormatError("unknown schedule: " + s);
}

std::string format_support(const construct::EulerSupport& s) {
  const auto& P = s.params;
  std::ostringstream out;
  out << "# helson-support=v1\n"
      << "# mode=" << construct::mode_name(s.mode) << "\n"
      << "# nu=" << num(P.nu) << "\n"
      << "# m=" << P.m << "\n"
      << "# theta=" << P.theta.num << "/" << P.theta.den << "\n"
      << "# alpha=" << num(P.alpha) << "\n"
      << "# lambda=" << num(P.lambda) << "\n"
      << "# kappa=" << num(P.kappa) << "\n"
      << "# block_C=" << num(P.block_C) << "\n"
      << "# eps=" << num(P.eps) << "\n"
      << "# schedule=" << schedule_name(P.schedule) << "\n"
      << "# rh=" << (P.rh ? 1 : 0) << "\n"
      << "# separation_floor=" << num(P.separation_floor) << "\n"
      << "# c_sep=" << num(s.c_sep) << "\n"
      << "# C_led=" << num(s.C_led) << "\n"
      << "# growth_exponent=" << num(s.growth_exponent) << "\n"
      << "# growth_constant=" << num(s.growth_constant) << "\n"
      << "# X_end=" << num(s.X_end) << "\n"
      << "# q_mode=" << construct::mode_name(s.q.mode) << "\n"
      << "# q_real=" << (s.q.real_valued ? 1 : 0) << "\n";
  for (const auto& t : s.q.terms)
    out << "# q_term=" << num(t.rho.real()) << "," << num(t.rho.imag()) << "," << t.mult << "," << num(t.cutoff) << "\n";
  for (const auto& e : s.entries) out << e.p << " " << num(e.angle) << " " << e.block << "\n";
  return out.str();
}

construct::EulerSupport parse_support(const std::string& text) {
  const auto lines = lines_of(text);
  std::size_t i = 0;
  const auto header = header_pairs(lines, i);
  if (header.empty() || header[0] != std::pair<std::string, std::string>{"helson-support", "v1"})
    throw FormatError("missing '# helson-support=v1' header");
  construct::EulerSupport s;
  auto& P = s.params;
  std::map<std::string, int> seen;
  for (std::size_t h = 1; h < header.size(); ++h) {
    const auto& [k, v] = header[h];
    if (k != "q_term" && seen[k]++) throw FormatError("repeated support key: " + k);
    if (k == "mode") s.mode = construct::parse_mode(v);
    else if (k == "nu") P.nu = parse_double(v);
    else if (k == "m") P.m = parse_int<int>(v);
    else if (k == "theta") {
      const auto f = split(v, '/');
      if (f.size() != 2) throw FormatError("theta must be num/den");
      P.theta = {parse_int<std::int64_t>(f[0]), parse_int<std::int64_t>(f[1])};
    } else if (k == "alpha") P.alpha = parse_double(v);
    else if (k == "lambda") P.lambda = parse_double(v);
    else if (k == "kappa") P.kappa = parse_double(v);
    else if (k == "block_C") P.block_C = parse_double(v);
    else if (k == "eps") P.eps = parse_double(v);
    else if (k == "schedule") P.schedule = parse_schedule(v);
    else if (k == "rh") P.rh = parse_int<int>(v) != 0;
    else if (k == "separation_floor") P.separation_floor = parse_double(v);
    else if (k == "c_sep") s.c_sep = parse_double(v);
    else if (k == "C_led") s.C_led = parse_double(v);
    else if (k == "growth_exponent") s.growth_exponent = parse_double(v);
    else if (k == "growth_constant") s.growth_constant = parse_double(v);
    else if (k == "X_end") s.X_end = parse_double(v);
    else if (k == "q_mode") s.q.mode = construct::parse_mode(v);
    else if (k == "q_real") s.q.real_valued = parse_int<int>(v) != 0;
    else if (k == "q_term") {
      const auto f = split(v, ',');
      if (f.size() != 4) throw FormatError("q_term needs beta,gamma,mult,cutoff");
      s.q.terms.push_back({{parse_double(f[0]), parse_double(f[1])}, parse_int<int>(f[2]), parse_double(f[3])});
    } else {
      throw FormatError("unknown support key: " + k);
    }
  }
  for (; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ' ');
    if (f.size() != 3) throw FormatError("support row needs 'p angle block'" + where(i));
    s.entries.push_back({parse_int<std::uint64_t>(f[0]), parse_double(f[1]), parse_int<int>(f[2])});
  }
  return s;
}

std::string format_ledger(const construct::ConstructionLedger& L) {
  std::string out = "k,x_k,target,achieved,residual,primes_used\n";
  const bool c = L.complex_valued;
  for (const auto& r : L.blocks)
    out += std::to_string(r.k) + "," + num(r.x_k) + "," + cnum(r.target, c) + "," + cnum(r.achieved, c) + "," +
           cnum(r.residual, c) + "," + std::to_string(r.primes_used) + "\n";
  return out;
}

construct::ConstructionLedger parse_ledger(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != "k,x_k,target,achieved,residual,primes_used")
    throw FormatError("missing ledger header");
  construct::ConstructionLedger L;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    if (f.size() != 6) throw FormatError("ledger row needs 6 fields" + where(i));
    if (f[2].find(':') != std::string::npos) L.complex_valued = true;
    L.blocks.push_back({parse_int<int>(f[0]), parse_double(f[1]), parse_cnum(f[2]), parse_cnum(f[3]),
                        parse_cnum(f[4]), parse_int<std::uint64_t>(f[5])});
  }
  return L;
}

std::string format_values(const std::vector<ValueRow>& rows) {
  std::string out = "sigma,t,re,im,tail_bound\n";
  for (const auto& r : rows)
    out += num(r.sigma) + "," + num(r.t) + "," + num(r.value.real()) + "," + num(r.value.imag()) + "," +
           num(r.tail_bound) + "\n";
  return out;
}

std::vector<ValueRow> parse_values(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != "sigma,t,re,im,tail_bound") throw FormatError("missing values header");
  std::vector<ValueRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    if (f.size() != 5) throw FormatError("values row needs 5 fields" + where(i));
    rows.push_back({parse_double(f[0]), parse_double(f[1]), {parse_double(f[2]), parse_double(f[3])},
                    parse_double(f[4])});
  }
  return rows;
}

}  // namespace helson::io
