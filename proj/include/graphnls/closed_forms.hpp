#pragma once

#include <utility>

namespace graphnls {

/// Parameters of the explicit sech-profile standing wave on the line.
///
/// The family is normalized so that the (mu=1, rho=1) member solves
/// u'' + u^{p-1} = u, i.e. lambda(1,1) = 1. Its squared L2 norm is a
/// p-dependent constant, available as soliton_mass_factor(p); the actual
/// mass of the (p, mu, rho) member is mu * soliton_mass_factor(p).
struct SolitonParams {
  double p = 0;
  double mu = 0;   // scaling parameter of the family (not the L2 mass)
  double rho = 1;
  double alpha = 0;
  double beta = 0;
  double lambda = 0;
  double peak = 0;
  double big_c = 0;    // amplitude constant (p/2)^{1/(p-2)}
  double small_c = 0;  // rate constant (p-2)/2

  static SolitonParams make(double p, double mu, double rho);
  /// p = 6 branch: the scaling exponents blow up, so the family is
  /// parameterized by lambda; every member has mass sqrt(3)*pi/2.
  static SolitonParams critical(double lambda);
  bool is_critical() const { return p == 6.0; }
};

/// (alpha, beta, lambda) for p != 6; throws UndefinedExponentError at p = 6.
struct Exponents {
  double alpha, beta, lambda;
};
Exponents exponents_and_lambda(double p, double mu, double rho);

double soliton_eval(const SolitonParams& params, double x);
double soliton_deriv(const SolitonParams& params, double x);

/// || phi_{1,1} ||_2^2 as a function of p (cached adaptive quadrature).
double soliton_mass_factor(double p);
/// || phi_{1,1} ||_p^p (cached adaptive quadrature).
double soliton_lp_norm_pp(double p);
/// || phi_{1,1}' ||_2^2 (cached adaptive quadrature).
double soliton_gradsq(double p);
/// theta_p = (p-6)/(4p) * ||phi_{1,1}||_p^p.
double theta_p(double p);

/// Closed-form energy of the (p, mu, rho) soliton; requires p > 6.
double soliton_energy(double p, double mu, double rho);
/// Quadrature-free energy valid for any p > 2 (negative below p = 6).
double soliton_energy_any_p(double p, double mu, double rho);

/// (c_rho(R), c_rho(R+)) mountain-pass levels; requires p > 6.
std::pair<double, double> line_and_halfline_levels(double p, double mu, double rho);

/// sqrt(3)*pi/2, the unique mass at which the p = 6 line soliton exists.
double critical_mass_line();

/// Leading exponential tail of the profile and its derivative.
struct TailEstimate {
  double value = 0;
  double derivative = 0;
  bool in_regime = true;  // false when |scaled x| is below the asymptotic threshold
};
TailEstimate tail_asymptotics(double p, double mu, double rho, double x);

/// Parameter mu whose soliton has the given actual L2 mass.
double soliton_param_for_mass(double p, double actual_mass);

/// Reference adaptive Simpson quadrature on [a, b]. `tol` is relative to a
/// coarse estimate of the integral of |f| (absolute when that is below 1).
double adaptive_quadrature(double (*f)(double, const void*), const void* ctx, double a,
                           double b, double tol);

}  // namespace graphnls
