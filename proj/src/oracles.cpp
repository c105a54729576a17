#include "degenlog/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "degenlog/errors.hpp"

namespace degenlog {

namespace {

void check_rho(double rho) {
  if (!(rho > 1.0)) throw ConfigError("rho must satisfy rho > 1");
}

// -expm1(-k t) / lambda with k = lambda (rho - 1), continuous at lambda = 0.
double saturation_weight(double lambda, double rho, double t) {
  const double k = lambda * (rho - 1.0);
  if (std::abs(k * t) < 1e-300) return (rho - 1.0) * t;
  return -std::expm1(-k * t) / lambda;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) on y = (z, z').

using State = std::array<double, 2>;

struct RadialRhs {
  double lambda, beta, rho;
  int dim;
  State operator()(double r, const State& y) const {
    const double z = y[0], dz = y[1];
    return {dz, -(dim - 1) / r * dz - lambda * z + beta * std::pow(std::max(z, 0.0), rho)};
  }
};

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (const auto& [c, k] : terms)
    for (int i = 0; i < 2; ++i) out[i] += h * c * (*k)[i];
  return out;
}

}  // namespace

double w_closed_form(const OdeBoundParams& p, double t) {
  check_rho(p.rho);
  if (!(p.nu0 > 0.0)) throw ConfigError("nu0 must be > 0");
  if (t < 0.0) throw ConfigError("W: t must be >= 0");
  if (p.w0 <= 0.0) return 0.0;
  const double decay = std::exp(-p.lambda * (p.rho - 1.0) * t);
  const double inner = p.nu0 * saturation_weight(p.lambda, p.rho, t) + decay * std::pow(p.w0, 1.0 - p.rho);
  return std::pow(inner, -1.0 / (p.rho - 1.0));
}

double w_inf(const OdeBoundParams& p, double t) {
  check_rho(p.rho);
  if (!(p.nu0 > 0.0)) throw ConfigError("nu0 must be > 0");
  if (!(p.lambda > 0.0))
    throw ConfigError("W_inf needs lambda > 0: the envelope is derived for effective growth");
  if (!(t > 0.0)) throw ConfigError("W_inf: t must be > 0");
  return std::pow(p.nu0 * saturation_weight(p.lambda, p.rho, t), -1.0 / (p.rho - 1.0));
}

double linear_bound(double lambda, double lambda1, double m, double u0_sup, double elapsed) {
  if (elapsed < 0.0) throw ConfigError("linear bound: t - t0 must be >= 0");
  return m * std::exp((lambda - lambda1) * elapsed) * u0_sup;
}

double large_solution_constant(double beta, double rho) {
  check_rho(rho);
  return std::pow(2.0 * (rho + 1.0) / (beta * (rho - 1.0) * (rho - 1.0)), 1.0 / (rho - 1.0));
}

// ---------------------------------------------------------------------------

double RadialProfile::operator()(double radius) const {
  if (r.empty() || radius > r.back()) return kInfinity;
  if (radius <= r.front()) return z.front();
  const auto it = std::upper_bound(r.begin(), r.end(), radius);
  const std::size_t i = static_cast<std::size_t>(it - r.begin());
  const double f = (radius - r[i - 1]) / (r[i] - r[i - 1]);
  return z[i - 1] + f * (z[i] - z[i - 1]);
}

double blowup_radius(double z0, double lambda, double beta, double rho, int dim, double cap,
                     double r_max, RadialProfile* profile) {
  const RadialRhs rhs{lambda, beta, rho, dim};
  const double rtol = 1e-11, atol = 1e-13;
  const double h_max = r_max / 400.0;

  // Taylor start: z = z0 + c r^2 / 2, c = z''(0) = (beta z0^rho - lambda z0) / N.
  const double c = (beta * std::pow(z0, rho) - lambda * z0) / dim;
  double r = 1e-6 * r_max;
  State y{z0 + 0.5 * c * r * r, c * r};
  double h = 1e-4 * r_max;
  if (profile) {
    profile->r = {0.0, r};
    profile->z = {z0, y[0]};
  }
  State k1 = rhs(r, y);
  while (r < r_max) {
    h = std::min({h, h_max, r_max - r});
    const State k2 = rhs(r + c2 * h, axpy(y, h, {{a21, &k1}}));
    const State k3 = rhs(r + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const State k4 = rhs(r + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = rhs(r + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 =
        rhs(r + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State next = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = rhs(r + h, next);
    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(next[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    if (!std::isfinite(err) || !std::isfinite(next[0]) || !std::isfinite(next[1])) err = 1e10;
    if (err <= 1.0) {
      r += h;
      y = next;
      k1 = k7;
      if (profile) {
        profile->r.push_back(r);
        profile->z.push_back(y[0]);
      }
      if (y[0] > cap) {
        // Near blow-up w = z^{-(rho-1)/2} is linear in r; extrapolate its zero.
        return r + 2.0 * y[0] / ((rho - 1.0) * y[1]);
      }
    }
    const double factor = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < 1e-16 * std::max(1.0, r)) throw ConvergenceError("zRadial: step size underflow", err);
  }
  return kInfinity;
}

RadialProfile z_radial(double a, double lambda, double beta, double rho, int dim, double cap,
                       double tol) {
  check_rho(rho);
  if (!(beta > 0.0)) throw ConfigError("zRadial: beta must be > 0");
  if (!(a > 0.0)) throw ConfigError("zRadial: a must be > 0");
  if (dim < 1 || dim > 3) throw ConfigError("zRadial: dim must be 1, 2 or 3");
  const double r_max = 4.0 * a;
  auto radius = [&](double z0) { return blowup_radius(z0, lambda, beta, rho, dim, cap, r_max); };

  // lo: blows up beyond a (or never), hi: blows up before a.
  double lo = lambda > 0.0 ? std::pow(lambda / beta, 1.0 / (rho - 1.0)) : 1.0;
  double hi = 2.0 * lo;
  for (int it = 0; it < 200 && radius(lo) <= a; ++it) lo *= 0.5;
  for (int it = 0; it < 200 && radius(hi) > a; ++it) hi *= 2.0;
  if (!(radius(lo) > a) || !(radius(hi) <= a)) {
    std::ostringstream msg;
    msg << "zRadial: no bracket for a = " << a << " in z(0) in [" << lo << ", " << hi << "]";
    throw ConvergenceError(msg.str(), kInfinity);
  }
  double mid = std::sqrt(lo * hi);
  double rm = radius(mid);
  for (int it = 0; it < 300 && std::abs(rm - a) > tol; ++it) {
    (rm > a ? lo : hi) = mid;
    mid = std::sqrt(lo * hi);
    rm = radius(mid);
  }
  if (std::abs(rm - a) > tol) {
    std::ostringstream msg;
    msg << "zRadial: bisection stalled, blow-up radius " << rm << " for target " << a;
    throw ConvergenceError(msg.str(), std::abs(rm - a));
  }
  RadialProfile p;
  p.a = a;
  p.z0 = mid;
  p.blowup_radius = blowup_radius(mid, lambda, beta, rho, dim, cap, r_max, &p);
  return p;
}

// ---------------------------------------------------------------------------

double tau_unbounded(const TauInputs& in) {
  if (!(in.lam > in.lam1E)) throw ConfigError("tau: requires lambda > lambda_1^E");
  if (!(in.lam2E > in.lam1E)) throw ConfigError("tau: requires lambda_2^E > lambda_1^E");
  if (!(in.alpha1 > 0.0)) throw ConfigError("tau: requires <v0, phi_1^E> > 0");
  if (!(in.inf_phi1D > 0.0)) throw ConfigError("tau: requires inf_D phi_1^E > 0");
  if (!(in.gamma > 1.0)) throw ConfigError("tau: requires gamma > 1");
  if (in.dim < 1) throw ConfigError("tau: dim must be >= 1");
  const double n = in.dim;
  const double denom = in.alpha1 * in.inf_phi1D;
  const double smoothing = n * in.lam2E / (2.0 * std::exp(1.0) * (in.lam2E - in.lam1E)) *
                           std::pow(2.0 * in.c_inf * in.v0_norm / denom, 2.0 / n);
  const double growth = std::log(2.0 * in.gamma * in.max_phi1D / denom) / (in.lam - in.lam1E);
  return std::max(smoothing, growth);
}

Field subsolution_growth(double lambda, const EigenPair& eigen, const Field& u0, double t) {
  const Grid& g = *eigen.vector.grid;
  if (u0.size() != g.size()) throw ConfigError("subsolution: u0 lives on a different grid");
  const double coeff = inner(g, u0.values, eigen.vector.values);
  return Field(eigen.vector.grid,
               std::exp((lambda - eigen.value) * t) * coeff * eigen.vector.values);
}

}  // namespace degenlog
