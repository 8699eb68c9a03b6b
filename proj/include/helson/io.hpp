#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "helson/construct.hpp"
#include "helson/multisets.hpp"
#include "helson/primes.hpp"

namespace helson::io {

/// %.17g: reads back to the same double.
std::string num(double v);
double parse_double(const std::string& s);

/// Whole-file helpers. Missing input is an ArgumentError, unwritable output a ResourceError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// Every format below satisfies write(read(write(x))) == write(x) byte for byte.

/// `# primes lo=.. hi=..` then one prime per line.
std::string format_primes(const primes::PrimeTable& t);
primes::PrimeTable parse_primes(const std::string& text);

/// `# signed-multiset v1` then `beta,gamma,mult` rows.
std::string format_multiset(const multisets::SignedMultiset& Z);
multisets::SignedMultiset parse_multiset(const std::string& text);

/// `# key=value` header (mode, parameters, q terms, c_sep, C_led, growth law) then `p angle block` rows.
std::string format_support(const construct::EulerSupport& s);
construct::EulerSupport parse_support(const std::string& text);

/// CSV `k,x_k,target,achieved,residual,primes_used`; complex ledgers write `re:im`.
std::string format_ledger(const construct::ConstructionLedger& L);
construct::ConstructionLedger parse_ledger(const std::string& text);

struct ValueRow {
  double sigma = 0.0;
  double t = 0.0;
  std::complex<double> value;
  double tail_bound = 0.0;  ///< infinite (with NaN value) marks a point that could not be evaluated
};

/// CSV `sigma,t,re,im,tail_bound`.
std::string format_values(const std::vector<ValueRow>& rows);
std::vector<ValueRow> parse_values(const std::string& text);

std::string schedule_name(construct::Schedule s);
construct::Schedule parse_schedule(const std::string& s);

}  // namespace helson::io
