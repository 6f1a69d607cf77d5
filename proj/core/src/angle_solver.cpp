#include "shetorque/angle_solver.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <string>

#include "shetorque/errors.hpp"

namespace shetorque {
namespace {

constexpr double kQuarter = kPi / 2.0;

struct Bracket {
  double value;
  double d1;  // d/d alpha1
  double d2;  // d/d alpha2
};

Bracket bracket2(int n, double a1, double a2) {
  return {1.0 - 2.0 * std::cos(n * a1) + 2.0 * std::cos(n * a2), 2.0 * n * std::sin(n * a1),
          -2.0 * n * std::sin(n * a2)};
}

// Cleared-denominator harmonic constraint g(alpha) = 0 with its gradient.
struct Constraint {
  Method method;
  double ratio;

  Constraint(Method m, double r, double classic_ratio) : method(m), ratio(r) {
    if (m == Method::classic) {
      method = Method::ratio_i;
      ratio = classic_ratio;
    }
  }

  [[nodiscard]] Bracket eval(double a1, double a2) const {
    const Bracket b5 = bracket2(5, a1, a2);
    if (method == Method::she_pwm) return b5;
    const Bracket b7 = bracket2(7, a1, a2);
    if (method == Method::ratio_i) {
      return {7.0 * b5.value - 5.0 * ratio * b7.value, 7.0 * b5.d1 - 5.0 * ratio * b7.d1,
              7.0 * b5.d2 - 5.0 * ratio * b7.d2};
    }
    return {5.0 * b7.value - 7.0 * ratio * b5.value, 5.0 * b7.d1 - 7.0 * ratio * b5.d1,
            5.0 * b7.d2 - 7.0 * ratio * b5.d2};
  }

  [[nodiscard]] double value(double a1, double a2) const {
    const double b5 = 1.0 - 2.0 * std::cos(5 * a1) + 2.0 * std::cos(5 * a2);
    if (method == Method::she_pwm) return b5;
    const double b7 = 1.0 - 2.0 * std::cos(7 * a1) + 2.0 * std::cos(7 * a2);
    return method == Method::ratio_i ? 7.0 * b5 - 5.0 * ratio * b7 : 5.0 * b7 - 7.0 * ratio * b5;
  }

  // Bracket of the harmonic in the denominator of the ratio form.
  [[nodiscard]] double denominator(double a1, double a2) const {
    if (method == Method::she_pwm) return 1.0;
    const int n = method == Method::ratio_i ? 7 : 5;
    return 1.0 - 2.0 * std::cos(n * a1) + 2.0 * std::cos(n * a2);
  }
};

double mi_of(double a1, double a2) { return 1.0 - 2.0 * std::cos(a1) + 2.0 * std::cos(a2); }

struct Root {
  double a1;
  double a2;
  double r_mi;
  double r_g;
  int iterations;
};

double inf_norm(double x, double y) { return std::max(std::abs(x), std::abs(y)); }

// Damped Newton with a Levenberg-Marquardt fallback near singular Jacobians.
// Iterates are clamped to [0, pi/2]^2.
std::optional<Root> newton(const Constraint& g, double mi, double a1, double a2, const SolverOptions& opt) {
  auto residual = [&](double x, double y) {
    return std::array<double, 2>{mi_of(x, y) - mi, g.value(x, y)};
  };
  auto norm2 = [](const std::array<double, 2>& f) { return f[0] * f[0] + f[1] * f[1]; };

  std::array<double, 2> f = residual(a1, a2);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (inf_norm(f[0], f[1]) < opt.tolerance) break;
    const Bracket m = bracket2(1, a1, a2);
    const Bracket c = g.eval(a1, a2);
    const double j11 = m.d1, j12 = m.d2, j21 = c.d1, j22 = c.d2;
    const double det = j11 * j22 - j12 * j21;
    const double scale = std::max({std::abs(j11), std::abs(j12), std::abs(j21), std::abs(j22), 1e-300});

    double dx;
    double dy;
    if (std::abs(det) > 1e-12 * scale * scale) {
      dx = -(j22 * f[0] - j12 * f[1]) / det;
      dy = -(-j21 * f[0] + j11 * f[1]) / det;
    } else {
      // (J^T J + lambda I) d = -J^T f
      const double lambda = 1e-6 * scale * scale;
      const double a = j11 * j11 + j21 * j21 + lambda;
      const double b = j11 * j12 + j21 * j22;
      const double d = j12 * j12 + j22 * j22 + lambda;
      const double r1 = -(j11 * f[0] + j21 * f[1]);
      const double r2 = -(j12 * f[0] + j22 * f[1]);
      const double dd = a * d - b * b;
      dx = (d * r1 - b * r2) / dd;
      dy = (a * r2 - b * r1) / dd;
    }

    const double current = norm2(f);
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      const double x = std::clamp(a1 + t * dx, 0.0, kQuarter);
      const double y = std::clamp(a2 + t * dy, 0.0, kQuarter);
      const auto fn = residual(x, y);
      if (norm2(fn) < current) {
        a1 = x;
        a2 = y;
        f = fn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(inf_norm(f[0], f[1]) < opt.tolerance)) return std::nullopt;
  return Root{a1, a2, std::abs(f[0]), std::abs(f[1]), it};
}

SolveReport solve_two_angle(double mi, const Constraint& g, const SolverOptions& opt, double max_mi_ratio,
                            Method reported) {
  if (!(mi > 0.0) || !std::isfinite(mi)) throw Error(Errc::invalid_input, "modulation index must be positive");
  if (opt.grid < 3) throw Error(Errc::invalid_input, "seed grid must have at least 3 points");

  const int n = opt.grid;
  const double h = kQuarter / (n - 1);
  std::vector<double> f1(static_cast<std::size_t>(n) * n);
  std::vector<double> f2(f1.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a1 = i * h;
      const double a2 = j * h;
      f1[i * n + j] = mi_of(a1, a2) - mi;
      f2[i * n + j] = g.value(a1, a2);
    }
  }

  auto straddles = [&](const std::vector<double>& f, int i, int j) {
    const double c[4] = {f[i * n + j], f[(i + 1) * n + j], f[i * n + j + 1], f[(i + 1) * n + j + 1]};
    return *std::min_element(c, c + 4) <= 0.0 && *std::max_element(c, c + 4) >= 0.0;
  };
  auto seed_of = [&](int i, int j) {
    double a1 = (i + 0.5) * h;
    double a2 = (j + 0.5) * h;
    if (a1 >= a2) {
      a1 = i * h;
      a2 = (j + 1) * h;
    }
    return std::array<double, 2>{a1, a2};
  };

  std::vector<Root> roots;
  auto try_seed = [&](std::array<double, 2> seed) {
    auto r = newton(g, mi, seed[0], seed[1], opt);
    if (!r || !(r->a2 - r->a1 > 1e-12)) return;
    for (const Root& known : roots) {
      if (std::abs(known.a1 - r->a1) < 1e-7 && std::abs(known.a2 - r->a2) < 1e-7) return;
    }
    roots.push_back(*r);
  };

  // Cells intersecting the open triangle alpha1 < alpha2.
  std::vector<std::pair<double, std::array<int, 2>>> near_cells;
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j + 1 < n; ++j) {
      if (!(i * h < (j + 1) * h)) continue;
      if (!straddles(f1, i, j)) continue;
      if (straddles(f2, i, j)) {
        try_seed(seed_of(i, j));
      } else {
        double closest = std::numeric_limits<double>::infinity();
        for (int di = 0; di < 2; ++di)
          for (int dj = 0; dj < 2; ++dj) closest = std::min(closest, std::abs(f2[(i + di) * n + j + dj]));
        near_cells.push_back({closest, {i, j}});
      }
    }
  }
  if (roots.empty() && !near_cells.empty()) {
    // Tangential crossings near the feasibility boundary can slip between
    // grid nodes; retry from the cells where the constraint comes closest.
    std::stable_sort(near_cells.begin(), near_cells.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    const std::size_t count = std::min<std::size_t>(near_cells.size(), 32);
    for (std::size_t k = 0; k < count; ++k) try_seed(seed_of(near_cells[k].second[0], near_cells[k].second[1]));
  }

  // Reject roots where the ratio's denominator harmonic vanishes too.
  const std::size_t found = roots.size();
  if (g.method != Method::she_pwm && g.ratio != 0.0) {
    std::erase_if(roots, [&](const Root& r) { return std::abs(g.denominator(r.a1, r.a2)) < 1e-9; });
  }
  if (roots.empty()) {
    if (found > 0) {
      throw Error(Errc::undefined_ratio, "only roots with a vanishing denominator harmonic were found");
    }
    double evidence = -1.0;
    try {
      evidence = max_mi(max_mi_ratio, reported).mi_max;
    } catch (const Error&) {
    }
    throw InfeasibleError("no root for MI " + std::to_string(mi) + " in the feasible triangle (max MI " +
                              std::to_string(evidence) + ")",
                          evidence);
  }

  std::sort(roots.begin(), roots.end(), [](const Root& x, const Root& y) {
    return x.a1 != y.a1 ? x.a1 < y.a1 : x.a2 < y.a2;
  });
  const Root& best = roots.back();

  SolveReport report;
  report.pattern.angles = {best.a1, best.a2};
  report.pattern.v_dc = opt.v_dc;
  report.pattern.omega_s = opt.omega_s;
  report.residuals = {best.r_mi, best.r_g};
  report.iterations = best.iterations;
  report.branch = static_cast<int>(roots.size()) - 1;
  report.roots = static_cast<int>(roots.size());
  return report;
}

// Roots of g(alpha1, .) on [lo, hi] located by a uniform scan plus
// bisection. Calls visit(alpha2) for each.
template <typename Visit>
void scan_roots(const Constraint& g, double a1, double lo, double hi, int points, Visit&& visit) {
  if (!(hi > lo)) return;
  const double step = (hi - lo) / points;
  double x_prev = lo;
  double f_prev = g.value(a1, x_prev);
  for (int j = 1; j <= points; ++j) {
    const double x = j == points ? hi : lo + j * step;
    const double f = g.value(a1, x);
    if (f == 0.0) {
      visit(x);
    } else if ((f_prev < 0.0 && f > 0.0) || (f_prev > 0.0 && f < 0.0)) {
      double a = x_prev;
      double b = x;
      double fa = f_prev;
      for (int k = 0; k < 64 && b - a > 1e-15; ++k) {
        const double m = 0.5 * (a + b);
        const double fm = g.value(a1, m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      visit(0.5 * (a + b));
    }
    x_prev = x;
    f_prev = f;
  }
}

}  // namespace

void SwitchingPattern::validate() const {
  if (angles.empty()) throw Error(Errc::invalid_input, "pattern needs at least one switching angle");
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!(angles[i] >= 0.0 && angles[i] <= kQuarter)) {
      throw Error(Errc::invalid_input, "switching angles must lie in [0, pi/2]");
    }
    if (i > 0 && angles[i] < angles[i - 1]) throw Error(Errc::invalid_input, "switching angles must be ordered");
  }
  if (!(v_dc > 0.0)) throw Error(Errc::invalid_input, "v_dc must be positive");
  if (!(omega_s > 0.0)) throw Error(Errc::invalid_frequency, "omega_s must be positive");
}

double fourier_bracket(std::span<const double> angles, int n) {
  double sum = 1.0;
  double sign = -1.0;
  for (double a : angles) {
    sum += 2.0 * sign * std::cos(n * a);
    sign = -sign;
  }
  return sum;
}

double fourier_amplitude(const SwitchingPattern& pattern, int n) {
  if (n < 1 || n % 2 == 0 || n % 3 == 0) {
    throw Error(Errc::unsupported_order, "order " + std::to_string(n) + " is even or triplen");
  }
  pattern.validate();
  return 2.0 * pattern.v_dc / (n * kPi) * fourier_bracket(pattern.angles, n);
}

double modulation_index(std::span<const double> angles) { return fourier_bracket(angles, 1); }

std::vector<VoltageHarmonic> voltage_spectrum(const SwitchingPattern& pattern, std::span<const int> orders) {
  std::vector<VoltageHarmonic> out;
  out.reserve(orders.size());
  for (int n : orders) out.push_back({n, fourier_amplitude(pattern, n)});
  return out;
}

std::vector<int> nontriplen_orders(int max_order) {
  std::vector<int> out;
  for (int n = 1; n <= max_order; n += 2) {
    if (n % 3 != 0) out.push_back(n);
  }
  return out;
}

double constraint_residual(Method method, double ratio_target, double alpha1, double alpha2, double classic_ratio) {
  return Constraint(method, ratio_target, classic_ratio).value(alpha1, alpha2);
}

SolveReport solve_she_pwm(double mi_target, const SolverOptions& options) {
  return solve_two_angle(mi_target, Constraint(Method::she_pwm, 0.0, options.classic_ratio), options, 0.0,
                         Method::she_pwm);
}

SolveReport solve_ratio(double mi_target, double ratio_target, Method variant, const SolverOptions& options) {
  if (variant != Method::ratio_i && variant != Method::ratio_ii) {
    throw Error(Errc::invalid_input, "solve_ratio expects RATIO_I or RATIO_II");
  }
  if (!(ratio_target >= 0.0) || !std::isfinite(ratio_target)) {
    throw Error(Errc::invalid_input, "ratio target must be non-negative");
  }
  return solve_two_angle(mi_target, Constraint(variant, ratio_target, options.classic_ratio), options,
                         ratio_target, variant);
}

SolveReport classic_angles(double mi_target, const SolverOptions& options) {
  return solve_two_angle(mi_target, Constraint(Method::classic, 0.0, options.classic_ratio), options,
                         options.classic_ratio, Method::ratio_i);
}

SolveReport solve_method(Method method, double mi_target, double ratio_target, const SolverOptions& options) {
  switch (method) {
    case Method::she_pwm: return solve_she_pwm(mi_target, options);
    case Method::classic: return classic_angles(mi_target, options);
    default: return solve_ratio(mi_target, ratio_target, method, options);
  }
}

MaxMiResult max_mi(double ratio_target, Method variant, const MaxMiOptions& options) {
  if (!(ratio_target >= 0.0) || !std::isfinite(ratio_target)) {
    throw Error(Errc::invalid_input, "ratio target must be non-negative");
  }
  if (options.scan < 4) throw Error(Errc::invalid_input, "scan resolution too small");
  const Constraint g(variant, ratio_target, options.classic_ratio);

  MaxMiResult best;
  best.mi_max = -std::numeric_limits<double>::infinity();
  auto consider = [&](double a1, double a2) {
    const double mi = mi_of(a1, a2);
    if (mi > best.mi_max) best = {mi, {a1, a2}};
  };

  const int m = options.scan;
  const double h = kQuarter / m;
  for (int i = 0; i <= m; ++i) {
    const double a1 = i * h;
    const double lo = a1 + 1e-12;
    scan_roots(g, a1, lo, kQuarter, m, [&](double a2) { consider(a1, a2); });
  }
  if (!std::isfinite(best.mi_max)) throw Error(Errc::no_solution, "constraint has no zero in the feasible triangle");

  // Zoom around the best manifold point.
  double h1 = h;
  double h2 = h;
  for (int pass = 0; pass < options.refine_passes; ++pass) {
    const auto [c1, c2] = best.angles;
    const double lo1 = std::max(0.0, c1 - 2.0 * h1);
    const double hi1 = std::min(kQuarter, c1 + 2.0 * h1);
    constexpr int kSteps1 = 40;
    constexpr int kSteps2 = 60;
    for (int i = 0; i <= kSteps1; ++i) {
      const double a1 = lo1 + (hi1 - lo1) * i / kSteps1;
      const double lo2 = std::max(a1 + 1e-12, c2 - 3.0 * h2);
      const double hi2 = std::min(kQuarter, c2 + 3.0 * h2);
      scan_roots(g, a1, lo2, hi2, kSteps2, [&](double a2) { consider(a1, a2); });
    }
    h1 /= 10.0;
    h2 /= 10.0;
  }
  return best;
}

}  // namespace shetorque
