#include "nmpg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nmpg {

// Trace audits ------------------------------------------------------------------

bool AuditReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.pass; });
}

const AuditCheck* AuditReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

class CheckAccumulator {
 public:
  CheckAccumulator(std::string name, double slack) {
    check_.name = std::move(name);
    check_.slack = slack;
  }

  void observe(std::size_t index, double violation) {
    if (std::isnan(violation)) violation = std::numeric_limits<double>::infinity();
    if (violation > check_.worst_violation) {
      check_.worst_violation = violation;
      check_.worst_index = index;
    }
  }

  AuditCheck finish(bool applicable = true) {
    check_.applicable = applicable;
    check_.pass = !applicable || check_.worst_violation <= check_.slack;
    return check_;
  }

 private:
  AuditCheck check_;
};

double mean_step(const Trace& trace, std::size_t first, std::size_t last) {
  double sum = 0.0;
  for (std::size_t i = first; i < last; ++i) sum += trace[i].step_norm;
  return sum / static_cast<double>(last - first);
}

}  // namespace

AuditReport audit_trace(const Trace& trace, const SolverParams& params,
                        const AuditOptions& options) {
  if (trace.empty()) throw std::invalid_argument("audit_trace: empty trace");
  const bool mean_rule = !params.uses_max_reference();
  const double a = params.descent_constant();
  const double root_ap = std::sqrt(a * params.p_min);

  CheckAccumulator dominates("reference_dominates_psi", 1e-12);
  CheckAccumulator nonincreasing("reference_nonincreasing", 1e-12);
  CheckAccumulator decrease("sufficient_decrease", 1e-10);
  CheckAccumulator xi_consistent("xi_consistency", 1e-12);
  CheckAccumulator xi_bound("xi_bounds_step", 1e-10);
  CheckAccumulator decay("step_decay", 0.0);

  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& rec = trace[k];
    dominates.observe(k, (rec.psi - rec.reference) / (1.0 + std::abs(rec.psi)));
    if (k == 0) continue;
    const auto& prev = trace[k - 1];
    const double gap = prev.reference - rec.reference;
    nonincreasing.observe(k, -gap / (1.0 + std::abs(prev.reference)));
    decrease.observe(k - 1, -gap + params.p_min * a * prev.step_norm * prev.step_norm);
    xi_consistent.observe(k, std::abs(rec.xi * rec.xi - gap));
    xi_bound.observe(k, root_ap * prev.step_norm - rec.xi);
  }

  bool decay_applicable = false;
  if (options.check_step_decay && trace.size() >= 10) {
    decay_applicable = true;
    const std::size_t n = trace.size();
    const auto w = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(n)));
    decay.observe(n - 1, mean_step(trace, n - w, n) - mean_step(trace, 0, w));
  }

  AuditReport report;
  report.checks.push_back(dominates.finish());
  report.checks.push_back(nonincreasing.finish());
  report.checks.push_back(decrease.finish(mean_rule));
  report.checks.push_back(xi_consistent.finish());
  report.checks.push_back(xi_bound.finish(mean_rule));
  report.checks.push_back(decay.finish(decay_applicable));
  return report;
}

AuditReport audit_run(const RunResult& run, const SolverParams& params) {
  AuditOptions options;
  options.check_step_decay = run.status == RunStatus::MaxIters;
  return audit_trace(run.trace, params, options);
}

// Rate estimation ---------------------------------------------------------------

const char* to_string(RateMode mode) {
  return mode == RateMode::QLinear ? "QLinear" : "SublinearPower";
}

std::size_t usable_prefix(std::span<const double> values, double psi_star) {
  const double floor = 10.0 * std::numeric_limits<double>::epsilon() * std::abs(psi_star);
  std::size_t n = 0;
  while (n < values.size() && values[n] - psi_star > floor) ++n;
  return n;
}

std::pair<std::size_t, std::size_t> tail_window(std::size_t n, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
    throw std::invalid_argument("tail_fraction must lie in (0,1)");
  }
  const auto frac = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
  const std::size_t w = std::min(n, std::max(frac, std::min<std::size_t>(50, n)));
  return {n - w, n};
}

namespace {

std::vector<double> shifted_window(std::span<const double> values, double psi_star,
                                   std::size_t first, std::size_t last) {
  std::vector<double> s;
  s.reserve(last - first);
  for (std::size_t i = first; i < last; ++i) {
    const double d = values[i] - psi_star;
    if (!(d > 0.0)) {
      throw NonpositiveTail("value at index " + std::to_string(i) + " is not above psi_star");
    }
    s.push_back(d);
  }
  return s;
}

}  // namespace

RateReport estimate_q_factor(std::span<const double> values, double psi_star,
                             double tail_fraction) {
  const auto [first, last] = tail_window(values.size(), tail_fraction);
  if (last - first < 2) throw std::invalid_argument("estimate_q_factor: need at least two values");
  const std::vector<double> s = shifted_window(values, psi_star, first, last);

  RateReport report;
  report.mode = RateMode::QLinear;
  report.first = first;
  report.last = last;
  report.tolerance = 0.999;
  double max_ratio = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) max_ratio = std::max(max_ratio, s[i] / s[i - 1]);
  report.max_ratio = max_ratio;
  report.fitted = std::exp((std::log(s.back()) - std::log(s.front())) /
                           static_cast<double>(s.size() - 1));
  report.pass = report.fitted > 0.0 && report.fitted <= 0.999 && max_ratio <= 1.0 + 1e-10;
  return report;
}

RateReport fit_loglog_slope(std::span<const double> values, double psi_star,
                            double tail_fraction, std::size_t first_index,
                            std::optional<double> predicted, double tolerance) {
  auto [first, last] = tail_window(values.size(), tail_fraction);
  if (first_index + first == 0) ++first;
  if (last - first < 2) throw std::invalid_argument("fit_loglog_slope: need at least two values");
  const std::vector<double> s = shifted_window(values, psi_star, first, last);

  const auto n = static_cast<double>(s.size());
  double mx = 0.0;
  double my = 0.0;
  std::vector<double> lx(s.size());
  std::vector<double> ly(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    lx[i] = std::log(static_cast<double>(first_index + first + i));
    ly[i] = std::log(s[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }

  RateReport report;
  report.mode = RateMode::SublinearPower;
  report.first = first;
  report.last = last;
  report.fitted = sxy / sxx;
  report.predicted = predicted;
  report.tolerance = tolerance;
  report.pass = predicted ? std::abs(report.fitted - *predicted) <= tolerance : report.fitted < 0.0;
  return report;
}

double predicted_value_slope(double kappa) {
  if (!(kappa > 0.0 && kappa < 0.5)) throw std::invalid_argument("kappa must lie in (0, 1/2)");
  return -1.0 / (1.0 - 2.0 * kappa);
}

double predicted_iterate_slope(double kappa) {
  if (!(kappa > 0.0 && kappa < 0.5)) throw std::invalid_argument("kappa must lie in (0, 1/2)");
  return -kappa / (1.0 - 2.0 * kappa);
}

std::vector<double> iterate_distance_series(std::span<const Vector> iterates,
                                            const Vector& x_star) {
  std::vector<double> d;
  d.reserve(iterates.size());
  for (const auto& x : iterates) {
    if (x.size() != x_star.size()) throw std::invalid_argument("iterate_distance_series: size mismatch");
    d.push_back((x - x_star).norm());
  }
  return d;
}

std::vector<double> reference_series(const Trace& trace) {
  std::vector<double> r;
  r.reserve(trace.size());
  for (const auto& rec : trace) r.push_back(rec.reference);
  return r;
}

XiSeries xi_series(const Trace& trace) {
  if (trace.size() < 2) throw std::invalid_argument("xi_series: need at least two records");
  XiSeries out;
  out.xi.reserve(trace.size() - 1);
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const double prev = trace[k - 1].reference;
    const double gap = prev - trace[k].reference;
    if (gap < -1e-12 * (1.0 + std::abs(prev))) {
      throw NegativeGap("reference increases at k = " + std::to_string(k));
    }
    out.xi.push_back(std::sqrt(std::max(0.0, gap)));
  }
  const std::size_t half = out.xi.size() / 2;
  out.head_sum = std::accumulate(out.xi.begin(), out.xi.begin() + static_cast<std::ptrdiff_t>(half), 0.0);
  out.tail_sum = std::accumulate(out.xi.begin() + static_cast<std::ptrdiff_t>(half), out.xi.end(), 0.0);
  out.cauchy_tail = half == 0 || out.tail_sum <= out.head_sum;
  return out;
}

// Brute-force oracles -------------------------------------------------------------

double brute_force_prox_1d(const ScalarTerm& phi, double gamma, double v, double lo, double hi,
                           double step, std::span<const double> candidates) {
  if (!(lo < hi) || !(step > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("brute_force_prox_1d: need lo < hi, step > 0, gamma > 0");
  }
  auto objective = [&](double t) {
    return phi(t).to_double() + (t - v) * (t - v) / (2.0 * gamma);
  };

  const auto cells = static_cast<std::size_t>(std::floor((hi - lo) / step));
  auto grid = [&](std::size_t j) { return j >= cells ? hi : lo + static_cast<double>(j) * step; };
  std::size_t best_j = 0;
  double best_val = objective(grid(0));
  for (std::size_t j = 1; j <= cells; ++j) {
    const double val = objective(grid(j));
    if (val < best_val) {
      best_val = val;
      best_j = j;
    }
  }
  double best_t = grid(best_j);

  // Ternary refinement over the two cells adjacent to the best grid point.
  double a = grid(best_j == 0 ? 0 : best_j - 1);
  double b = grid(std::min(best_j + 1, cells));
  for (int it = 0; it < 200 && b - a > 0.0; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (objective(m1) <= objective(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  auto consider = [&](double t) {
    t = std::clamp(t, lo, hi);
    const double val = objective(t);
    if (val < best_val) {
      best_val = val;
      best_t = t;
    }
  };
  consider(0.5 * (a + b));
  consider(0.0);
  consider(v);
  for (double c : candidates) consider(c);
  return best_t;
}

Vector brute_force_sparsity_projection(const Vector& v, std::size_t s) {
  const auto n = static_cast<std::size_t>(v.size());
  if (s < 1 || s > n) throw std::invalid_argument("brute_force_sparsity_projection: need 1 <= s <= dim");
  // Enumerate supports in lexicographic order; keep the first strict improvement.
  std::vector<std::size_t> support(s);
  std::iota(support.begin(), support.end(), std::size_t{0});
  double best = -1.0;
  std::vector<std::size_t> best_support;
  while (true) {
    double kept = 0.0;
    for (auto i : support) kept += v[static_cast<Eigen::Index>(i)] * v[static_cast<Eigen::Index>(i)];
    if (kept > best) {
      best = kept;
      best_support = support;
    }
    // Advance to the next combination.
    std::size_t pos = s;
    while (pos > 0 && support[pos - 1] == n - s + pos - 1) --pos;
    if (pos == 0) break;
    ++support[pos - 1];
    for (std::size_t j = pos; j < s; ++j) support[j] = support[j - 1] + 1;
  }
  Vector z = Vector::Zero(v.size());
  for (auto i : best_support) z[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(i)];
  return z;
}

Vector finite_diff_gradient(const SmoothModel& f, const Vector& x) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = std::max(1e-6, 1e-6 * std::abs(x[i]));
    probe[i] = x[i] + h;
    const double up = f.value(probe);
    probe[i] = x[i] - h;
    const double down = f.value(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double gradient_relative_error(const SmoothModel& f, const Vector& x) {
  const Vector g = f.gradient(x);
  const Vector fd = finite_diff_gradient(f, x);
  return (g - fd).lpNorm<Eigen::Infinity>() / std::max(1.0, g.lpNorm<Eigen::Infinity>());
}

}  // namespace nmpg
