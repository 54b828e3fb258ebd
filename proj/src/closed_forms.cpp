#include "graphnls/closed_forms.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>

#include "graphnls/errors.hpp"

namespace graphnls {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_shape(double p) {
  if (!(p > 2.0)) throw InvalidParameterError("exponent p must exceed 2");
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  // Seed the adaptive recursion with a 64-panel composite scan. A single
  // top-level panel can miss a localized bump entirely (e.g. an even
  // integrand vanishing at the midpoint), and the error control must be
  // relative to the integral's own scale: an absolute target below the
  // round-off of a large-amplitude integrand would drive every panel to the
  // depth cap.
  constexpr int n = 64;
  double xs[n + 1], fs[n + 1], fm[n], whole[n];
  double coarse = 0.0;
  for (int i = 0; i <= n; ++i) {
    xs[i] = a + (b - a) * i / n;
    fs[i] = f(xs[i]);
  }
  for (int i = 0; i < n; ++i) {
    fm[i] = f(0.5 * (xs[i] + xs[i + 1]));
    whole[i] = (xs[i + 1] - xs[i]) / 6.0 * (fs[i] + 4.0 * fm[i] + fs[i + 1]);
    coarse += (xs[i + 1] - xs[i]) / 6.0 *
              (std::abs(fs[i]) + 4.0 * std::abs(fm[i]) + std::abs(fs[i + 1]));
  }
  const double panel_tol = tol * std::max(1.0, coarse) / n;
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    total += simpson(f, xs[i], xs[i + 1], fs[i], fm[i], fs[i + 1], whole[i],
                     panel_tol, 42);
  return total;
}

struct ProfileIntegrals {
  double mass;    // ||phi_{1,1}||_2^2
  double lp_pp;   // ||phi_{1,1}||_p^p
  double gradsq;  // ||phi_{1,1}'||_2^2
};

const ProfileIntegrals& profile_integrals(double p) {
  static std::map<double, ProfileIntegrals> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;

  const double C = std::pow(p / 2.0, 1.0 / (p - 2.0));
  const double c = (p - 2.0) / 2.0;
  const double q = 2.0 / (p - 2.0);
  auto phi = [&](double x) { return C * std::pow(1.0 / std::cosh(c * x), q); };
  auto dphi = [&](double x) { return -q * c * std::tanh(c * x) * phi(x); };
  // the slowest integrand, phi^2, decays like exp(-2x) for every p; cut at 40
  const double X = 40.0;
  ProfileIntegrals pi{};
  pi.mass = 2.0 * integrate([&](double x) { double v = phi(x); return v * v; }, 0, X, 1e-13);
  pi.lp_pp = 2.0 * integrate([&](double x) { return std::pow(phi(x), p); }, 0, X, 1e-13);
  pi.gradsq = 2.0 * integrate([&](double x) { double v = dphi(x); return v * v; }, 0, X, 1e-13);
  return cache.emplace(p, pi).first->second;
}

}  // namespace

Exponents exponents_and_lambda(double p, double mu, double rho) {
  require_shape(p);
  if (p == 6.0) throw UndefinedExponentError("scaling exponents are undefined at p = 6");
  Exponents e;
  e.alpha = 2.0 / (6.0 - p);
  e.beta = (p - 2.0) / (6.0 - p);
  e.lambda = std::pow(rho, 2.0 * e.alpha) * std::pow(mu, 2.0 * e.beta);
  return e;
}

SolitonParams SolitonParams::make(double p, double mu, double rho) {
  require_shape(p);
  if (!(mu > 0)) throw InvalidParameterError("soliton mass parameter must be positive");
  if (!(rho > 0)) throw InvalidParameterError("rho must be positive");
  if (p == 6.0)
    throw UndefinedExponentError("use SolitonParams::critical for p = 6");
  SolitonParams s;
  s.p = p;
  s.mu = mu;
  s.rho = rho;
  const auto e = exponents_and_lambda(p, mu, rho);
  s.alpha = e.alpha;
  s.beta = e.beta;
  s.lambda = e.lambda;
  s.big_c = std::pow(p / 2.0, 1.0 / (p - 2.0));
  s.small_c = (p - 2.0) / 2.0;
  s.peak = std::pow(s.lambda * p / (2.0 * rho), 1.0 / (p - 2.0));
  return s;
}

SolitonParams SolitonParams::critical(double lambda) {
  if (!(lambda > 0)) throw InvalidParameterError("lambda must be positive");
  SolitonParams s;
  s.p = 6.0;
  s.rho = 1.0;
  s.mu = critical_mass_line();  // every member of the p=6 family has this mass
  s.lambda = lambda;
  s.alpha = 0.0;
  s.beta = 0.0;
  s.big_c = std::pow(3.0, 0.25);
  s.small_c = 2.0;
  s.peak = std::pow(3.0 * lambda, 0.25);
  return s;
}

double soliton_eval(const SolitonParams& s, double x) {
  if (s.is_critical()) {
    const double r = std::sqrt(s.lambda);
    return std::pow(3.0 * s.lambda, 0.25) * std::pow(1.0 / std::cosh(2.0 * r * x), 0.5);
  }
  const double scale = std::pow(s.rho, s.alpha) * std::pow(s.mu, s.beta);
  const double amp = std::pow(s.rho, 0.5 * s.alpha) * std::pow(s.mu, s.alpha) * s.big_c;
  const double q = 2.0 / (s.p - 2.0);
  return amp * std::pow(1.0 / std::cosh(s.small_c * scale * x), q);
}

double soliton_deriv(const SolitonParams& s, double x) {
  if (s.is_critical()) {
    const double r = std::sqrt(s.lambda);
    return -r * std::tanh(2.0 * r * x) * soliton_eval(s, x);
  }
  const double scale = std::pow(s.rho, s.alpha) * std::pow(s.mu, s.beta);
  const double q = 2.0 / (s.p - 2.0);
  return -q * s.small_c * scale * std::tanh(s.small_c * scale * x) * soliton_eval(s, x);
}

double soliton_mass_factor(double p) {
  require_shape(p);
  return profile_integrals(p).mass;
}

double soliton_lp_norm_pp(double p) {
  require_shape(p);
  return profile_integrals(p).lp_pp;
}

double soliton_gradsq(double p) {
  require_shape(p);
  return profile_integrals(p).gradsq;
}

double theta_p(double p) {
  require_shape(p);
  return (p - 6.0) / (4.0 * p) * soliton_lp_norm_pp(p);
}

double soliton_energy_any_p(double p, double mu, double rho) {
  require_shape(p);
  if (p == 6.0) return 0.0;
  const double beta = (p - 2.0) / (6.0 - p);
  return theta_p(p) * std::pow(rho, 4.0 / (6.0 - p)) * std::pow(mu, 2.0 * beta + 1.0);
}

double soliton_energy(double p, double mu, double rho) {
  if (!(p > 6.0)) throw OutOfRegimeError("soliton_energy requires p > 6");
  return soliton_energy_any_p(p, mu, rho);
}

std::pair<double, double> line_and_halfline_levels(double p, double mu, double rho) {
  const double c_line = soliton_energy(p, mu, rho);
  const double beta = (p - 2.0) / (6.0 - p);
  return {c_line, std::pow(2.0, 2.0 * beta) * c_line};
}

double critical_mass_line() { return std::sqrt(3.0) * kPi / 2.0; }

TailEstimate tail_asymptotics(double p, double mu, double rho, double x) {
  if (!(p > 6.0)) throw OutOfRegimeError("tail asymptotics are stated for p > 6");
  const auto e = exponents_and_lambda(p, mu, rho);
  const double scale = std::pow(rho, e.alpha) * std::pow(mu, e.beta);
  const double q = 2.0 / (p - 2.0);
  const double y = (p - 2.0) / 2.0 * scale * std::abs(x);
  TailEstimate t;
  t.in_regime = (y >= 5.0);
  // sech^q(y) ~ 2^q exp(-q y); the decay rate in x is exactly sqrt(lambda)
  const double amp = std::pow(rho, 0.5 * e.alpha) * std::pow(mu, e.alpha) *
                     std::pow(p / 2.0, q / 2.0) * std::pow(2.0, q);
  t.value = amp * std::exp(-scale * std::abs(x));
  t.derivative = -scale * t.value * (x >= 0 ? 1.0 : -1.0);
  return t;
}

double soliton_param_for_mass(double p, double actual_mass) {
  if (!(actual_mass > 0)) throw InvalidParameterError("mass must be positive");
  return actual_mass / soliton_mass_factor(p);
}

double adaptive_quadrature(double (*f)(double, const void*), const void* ctx, double a,
                           double b, double tol) {
  return integrate([&](double x) { return f(x, ctx); }, a, b, tol);
}

}  // namespace graphnls
