#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {
namespace {
constexpr double kPi = std::numbers::pi;
}

std::array<double, 2> Gen::angle_pair() {
  for (;;) {
    const double x = uniform(0.0, kPi / 2.0);
    const double y = uniform(0.0, kPi / 2.0);
    if (x != y) return {std::min(x, y), std::max(x, y)};
  }
}

double bracket(int n, double a1, double a2) { return 1.0 - 2.0 * std::cos(n * a1) + 2.0 * std::cos(n * a2); }

std::vector<std::array<double, 2>> brute_force_roots(double mi, const std::function<double(double, double)>& g,
                                                     double step) {
  // a2 from 1 - 2 cos a1 + 2 cos a2 = mi
  const auto a2_of = [mi](double a1, double& a2) {
    const double c = (mi - 1.0 + 2.0 * std::cos(a1)) / 2.0;
    if (c < 0.0 || c > 1.0) return false;
    a2 = std::acos(c);
    return a2 > a1;
  };
  std::vector<std::array<double, 2>> roots;
  double prev_a1 = 0.0;
  double prev_h = 0.0;
  bool have_prev = false;
  const int steps = static_cast<int>(std::ceil(kPi / 2.0 / step));
  for (int i = 0; i <= steps; ++i) {
    const double a1 = std::min(kPi / 2.0, i * step);
    double a2 = 0.0;
    if (!a2_of(a1, a2)) {
      have_prev = false;
      continue;
    }
    const double h = g(a1, a2);
    if (have_prev && ((prev_h < 0.0) != (h < 0.0) || h == 0.0)) {
      double lo = prev_a1;
      double hi = a1;
      double h_lo = prev_h;
      for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        double a2m = 0.0;
        a2_of(mid, a2m);
        const double hm = g(mid, a2m);
        if ((hm < 0.0) == (h_lo < 0.0)) {
          lo = mid;
          h_lo = hm;
        } else {
          hi = mid;
        }
      }
      const double r1 = 0.5 * (lo + hi);
      double r2 = 0.0;
      a2_of(r1, r2);
      roots.push_back({r1, r2});
    }
    prev_a1 = a1;
    prev_h = h;
    have_prev = true;
  }
  return roots;
}

std::vector<SineCosine> cell_average_dft(const shetorque::SwitchingPattern& pattern, const std::vector<int>& orders,
                                         int cells) {
  const double period = 2.0 * kPi / pattern.omega_s;
  const double h = 2.0 * kPi / cells;
  std::vector<SineCosine> out(orders.size(), {0.0, 0.0});
  for (int i = 0; i < cells; ++i) {
    const double t0 = period * i / cells;
    const double t1 = period * (i + 1) / cells;
    const double v = shetorque::mean_phase_voltages(pattern, t0, t1).a;
    const double centre = (i + 0.5) * h;
    for (std::size_t k = 0; k < orders.size(); ++k) {
      out[k].sine += v * std::sin(orders[k] * centre);
      out[k].cosine += v * std::cos(orders[k] * centre);
    }
  }
  for (std::size_t k = 0; k < orders.size(); ++k) {
    const double x = orders[k] * h / 2.0;
    const double sinc = std::sin(x) / x;
    out[k].sine *= 2.0 / cells / sinc;
    out[k].cosine *= 2.0 / cells / sinc;
  }
  return out;
}

SineCosine cell_average_dft(const shetorque::SwitchingPattern& pattern, int n, int cells) {
  return cell_average_dft(pattern, std::vector<int>{n}, cells).front();
}

double thevenin_torque(const shetorque::MotorParameters& m, double v1, double slip, double omega_s) {
  const double xm = omega_s * m.l_m;
  const double xs = omega_s * m.l_ls;
  const double xr = omega_s * m.l_lr;
  // V_th = V jXm / (Rs + j(Xs + Xm)), Z_th = jXm (Rs + jXs) / (Rs + j(Xs + Xm))
  const double den2 = m.r_s * m.r_s + (xs + xm) * (xs + xm);
  const double vth2 = v1 * v1 * xm * xm / den2;
  const double rth = xm * xm * m.r_s / den2;
  const double xth = xm * (m.r_s * m.r_s + xs * (xs + xm)) / den2;
  const double rr = m.r_r / slip;
  return 1.5 * m.pole_pairs / omega_s * vth2 * rr / ((rth + rr) * (rth + rr) + (xth + xr) * (xth + xr));
}

double closed_form_phase(const shetorque::MotorParameters& m, int order, double slip, double omega_s) {
  const double k = m.l_m / (m.l_m + m.l_ls);
  const double numerator = order * omega_s * (m.l_ls + m.l_lr);
  const double denominator = k * k * m.r_s + m.r_r / slip;
  return std::atan(numerator / denominator);
}

double load_coefficient_for_slip(const shetorque::MotorParameters& m, double v1, double slip, double omega_s) {
  const double speed = (1.0 - slip) * omega_s / m.pole_pairs;
  return thevenin_torque(m, v1, slip, omega_s) / speed;
}

}  // namespace oracle
