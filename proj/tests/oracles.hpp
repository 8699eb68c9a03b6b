// Independent reference computations shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "helson/construct.hpp"
#include "helson/continuation.hpp"

namespace oracle {

using cplx = std::complex<double>;
using lcplx = std::complex<long double>;

inline lcplx chi_of(const helson::construct::SupportEntry& e) {
  const cplx u = helson::construct::EulerSupport::unit(e.angle);
  return {u.real(), u.imag()};
}

inline lcplx power_l(long double p, cplx s) {
  const long double lp = std::log(p);
  const long double mag = std::exp(-static_cast<long double>(s.real()) * lp);
  const long double ph = -static_cast<long double>(s.imag()) * lp;
  return {mag * std::cos(ph), mag * std::sin(ph)};
}

/// Composite 10-point Gauss-Legendre on [a, b] with `panels` panels.
inline cplx gauss_legendre(const std::function<cplx(double)>& f, double a, double b, int panels) {
  static const double x[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
                              0.9739065285171717};
  static const double w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                              0.0666713443086881};
  cplx total = 0.0;
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const double mid = a + (i + 0.5) * h, half = h / 2;
    for (int k = 0; k < 5; ++k) total += w[k] * half * (f(mid - half * x[k]) + f(mid + half * x[k]));
  }
  return total;
}

/// -sum over support chi(p) log p p^{-s}, the tail law beyond X_end, and the held value E(X_end).
inline cplx dprime_direct(const helson::construct::EulerSupport& sup, cplx s) {
  lcplx acc = 0.0L;
  for (const auto& e : sup.entries) {
    const long double p = static_cast<long double>(e.p);
    acc -= chi_of(e) * std::log(p) * power_l(p, s);
  }
  cplx law = 0.0;
  for (const auto& t : sup.q.terms) {
    const double y = std::max(sup.X_end, t.cutoff);
    law += static_cast<double>(t.mult) * std::exp((t.rho - s) * std::log(y)) / (s - t.rho);
  }
  return cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag())) + law;
}

/// Tail law for D by quadrature: -sum m integral_{log y}^inf e^{-(s-rho)u}/u du.
inline cplx d_law_quadrature(const helson::construct::EulerSupport& sup, cplx s) {
  cplx total = 0.0;
  for (const auto& t : sup.q.terms) {
    const double u0 = std::log(std::max(sup.X_end, t.cutoff));
    const cplx a = s - t.rho;
    const double span = 45.0 / a.real();
    const int panels = std::max(200, static_cast<int>(span * (std::abs(a.imag()) + 1.0)));
    total -= static_cast<double>(t.mult) *
             gauss_legendre([&](double v) { return std::exp(-a * (u0 + v)) / (u0 + v); }, 0.0, span, panels);
  }
  return total;
}

/// sum_{p > x} chi(p) p^{-s} over the support plus the tail law.
inline cplx d_direct(const helson::construct::EulerSupport& sup, cplx s, double x) {
  lcplx acc = 0.0L;
  for (const auto& e : sup.entries)
    if (static_cast<double>(e.p) > x) acc += chi_of(e) * power_l(static_cast<long double>(e.p), s);
  return cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag())) + d_law_quadrature(sup, s);
}

/// sum over support of -log(1 - chi(p) p^{-s}) plus the tail law of D.
inline cplx log_euler_direct(const helson::construct::EulerSupport& sup, cplx s) {
  lcplx acc = 0.0L;
  for (const auto& e : sup.entries) acc -= std::log(1.0L - chi_of(e) * power_l(static_cast<long double>(e.p), s));
  return cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag())) + d_law_quadrature(sup, s);
}

}  // namespace oracle
