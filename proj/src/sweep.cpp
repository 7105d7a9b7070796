#include "rssd/sweep.hpp"

#include <algorithm>
#include <cmath>

namespace rssd {
namespace {

constexpr double kInvPhi = 0.6180339887498949;
constexpr int kMaxRefinedPeaks = 16;

double safe_eval(const FrequencyFunction& f, double omega) {
  const double v = f(omega);
  return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

// Golden-section maximization on [lo, hi]. Updates `best` in place.
void refine(const FrequencyFunction& f, double lo, double hi, int depth,
            double rel_tol, Peak& best) {
  const bool use_log = lo > 0.0;
  auto to_x = [&](double w) { return use_log ? std::log(w) : w; };
  auto to_w = [&](double x) { return use_log ? std::exp(x) : x; };

  double a = to_x(lo);
  double b = to_x(hi);
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = safe_eval(f, to_w(x1));
  double f2 = safe_eval(f, to_w(x2));
  auto note = [&](double x, double v) {
    if (v > best.value) {
      best.value = v;
      best.omega = to_w(x);
    }
  };
  note(x1, f1);
  note(x2, f2);
  for (int k = 0; k < depth; ++k) {
    const double wa = to_w(a), wb = to_w(b);
    const double mid = 0.5 * (wa + wb);
    if (mid > 0.0 && (wb - wa) / mid < rel_tol) break;
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = safe_eval(f, to_w(x1));
      note(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = safe_eval(f, to_w(x2));
      note(x2, f2);
    }
  }
}

}  // namespace

Peak find_peak(const FrequencyFunction& f, const FrequencyGrid& grid,
               std::span<const double> extra,
               std::optional<double> value_at_infinity) {
  std::vector<double> omegas = grid.points();
  for (double w : extra) {
    if (std::isfinite(w) && w >= 0.0) omegas.push_back(w);
  }
  std::sort(omegas.begin(), omegas.end());
  omegas.erase(std::unique(omegas.begin(), omegas.end(),
                           [](double x, double y) {
                             return std::abs(x - y) <=
                                    1e-12 * std::max(1.0, std::abs(y));
                           }),
               omegas.end());

  const double neg_inf = -std::numeric_limits<double>::infinity();
  Peak best{neg_inf, 0.0};
  std::vector<double> values(omegas.size());
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    values[i] = safe_eval(f, omegas[i]);
    if (values[i] == std::numeric_limits<double>::infinity()) {
      return Peak{values[i], omegas[i]};
    }
    if (values[i] > best.value) best = Peak{values[i], omegas[i]};
  }

  std::vector<std::size_t> maxima;
  const std::size_t count = omegas.size();
  for (std::size_t i = 0; i < count; ++i) {
    if (values[i] == neg_inf) continue;
    const bool left_ok = i == 0 || values[i] >= values[i - 1];
    const bool right_ok = i + 1 == count || values[i] >= values[i + 1];
    if (left_ok && right_ok) maxima.push_back(i);
  }
  std::stable_sort(maxima.begin(), maxima.end(),
                   [&](std::size_t x, std::size_t y) {
                     return values[x] > values[y];
                   });
  if (maxima.size() > static_cast<std::size_t>(kMaxRefinedPeaks)) {
    maxima.resize(kMaxRefinedPeaks);
  }
  for (std::size_t i : maxima) {
    const double lo = omegas[i == 0 ? 0 : i - 1];
    const double hi = omegas[i + 1 == count ? i : i + 1];
    if (hi > lo) refine(f, lo, hi, grid.refine_depth(), grid.rel_tol(), best);
  }

  if (value_at_infinity && *value_at_infinity > best.value) {
    best = Peak{*value_at_infinity, std::numeric_limits<double>::infinity()};
  }
  return best;
}

std::vector<double> characteristic_frequencies(const StateSpacePlant& plant) {
  std::vector<double> out;
  for (const auto& info : spectrum(plant)) {
    if (info.natural_frequency > 0.0) out.push_back(info.natural_frequency);
    if (info.value.imag() > 0.0) out.push_back(info.value.imag());
  }
  return out;
}

}  // namespace rssd
