#include "risr/rocof_max.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace risr {

namespace {
constexpr double kEnvelopeCut = 0.01;
constexpr int kSwingCap = 20;
constexpr double kEpsTFraction = 0.15;
}  // namespace

int default_l_max(const TrigComponent& tc) {
  if (tc.decay >= 0.0) return kSwingCap;  // undamped: envelope never decays
  for (int l = 1; l <= kSwingCap; ++l) {
    const double t_hat =
        ((2.0 * l - 1.0) * std::numbers::pi - tc.phase) / tc.ang_freq;
    if (std::exp(tc.decay * t_hat) < kEnvelopeCut) return l;
  }
  return kSwingCap;
}

double default_eps_t(const TrigComponent& tc) {
  return kEpsTFraction * 2.0 * std::numbers::pi / tc.ang_freq;
}

std::vector<ExtremumAnchor> extrema_times(const ModalDecomposition& md,
                                          int component, int l_max) {
  if (component < 1 || component > static_cast<int>(md.trig.size()))
    throw ScenarioError("extrema_times: component index out of range");
  if (l_max < 1) throw ScenarioError("extrema_times: l_max must be >= 1");
  const TrigComponent& tc = md.trig[component - 1];
  if (!(tc.ang_freq > 0.0))
    throw NumericalError("extrema_times: non-positive component frequency");

  std::vector<ExtremumAnchor> out;
  out.reserve(l_max);
  for (int l = 1; l <= l_max; ++l) {
    const double t_hat =
        ((2.0 * l - 1.0) * std::numbers::pi - tc.phase) / tc.ang_freq;
    if (t_hat < 0.0) continue;
    out.push_back({component, l, t_hat});
  }
  return out;
}

LocalMax taylor_local_max(const ModalDecomposition& md,
                          const ExtremumAnchor& anchor, double eps_t) {
  LocalMax lm;
  lm.anchor = anchor;

  const double f0 = md.sum_at(anchor.t_hat);
  const double f1 = md.deriv_at(anchor.t_hat);
  const double f2 = md.second_deriv_at(anchor.t_hat);

  const double curvature_floor =
      1e-12 * (std::abs(md.exp_amplitude) + [&] {
        double s = 0.0;
        for (const auto& tc : md.trig)
          s += tc.amplitude * tc.ang_freq * tc.ang_freq;
        return s;
      }());
  if (std::abs(f2) <= curvature_floor) {
    lm.t_star = anchor.t_hat;
    lm.value = f0 * md.scale;
    lm.reject_reason = "degenerate curvature at the anchor";
    return lm;
  }

  const double delta = -f1 / f2;
  lm.t_star = anchor.t_hat + delta;
  lm.value = (f0 + f1 * delta + 0.5 * f2 * delta * delta) * md.scale;

  if (f2 <= 0.0) {
    lm.reject_reason = "anchor sits on a crest of the combined waveform";
  } else if (std::abs(delta) >= eps_t) {
    lm.reject_reason = "correction exceeds the trust window";
  } else if (lm.t_star < 0.0) {
    lm.reject_reason = "refined time is before the disturbance";
  } else {
    lm.accepted = true;
  }
  return lm;
}

namespace {

// Label a refined extremum time with the trough family it belongs to: the
// component whose l-th trough time is nearest in units of its own period.
void nearest_anchor(const ModalDecomposition& md, double t_star, int* component,
                    int* swing) {
  double best = std::numeric_limits<double>::infinity();
  *component = 0;
  *swing = 0;
  for (int m = 1; m <= static_cast<int>(md.trig.size()); ++m) {
    const TrigComponent& tc = md.trig[m - 1];
    const double period = 2.0 * std::numbers::pi / tc.ang_freq;
    const double l_real =
        ((tc.ang_freq * t_star + tc.phase) / std::numbers::pi + 1.0) / 2.0;
    const int l = std::max(1, static_cast<int>(std::lround(l_real)));
    const double t_hat =
        ((2.0 * l - 1.0) * std::numbers::pi - tc.phase) / tc.ang_freq;
    const double d = std::abs(t_star - t_hat) / period;
    if (d < best) {
      best = d;
      *component = m;
      *swing = l;
    }
  }
}

// Polish a bracketed local minimum of the pre-scale waveform with safeguarded
// Newton steps on the derivative, bisecting when a step leaves the bracket.
double polish_minimum(const ModalDecomposition& md, double lo, double hi,
                      double t0) {
  double a = lo, b = hi, t = t0;
  double ga = md.deriv_at(a), gb = md.deriv_at(b);
  if (!(ga <= 0.0 && gb >= 0.0)) return t0;
  for (int it = 0; it < 40; ++it) {
    const double g = md.deriv_at(t);
    const double h = md.second_deriv_at(t);
    if (g <= 0.0)
      a = t;
    else
      b = t;
    double next = h > 0.0 ? t - g / h : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - t) < 1e-13 * (1.0 + std::abs(t))) return next;
    t = next;
  }
  return t;
}

}  // namespace

GlobalMax global_max(const ModalDecomposition& md, const RocofMaxOptions& opt) {
  GlobalMax gm;
  // The initial instant is always a candidate; it is the severest point of
  // the disturbed region itself and the baseline for every other region.
  gm.value = evaluate_rocof(md, 0.0);
  gm.t_star = 0.0;
  gm.component = 0;
  gm.swing = 0;

  // Candidates are compared on the pre-scale waveform so that the most
  // extreme rate is found for either disturbance sign.
  double best_raw = md.sum_at(0.0);
  auto consider = [&](double raw, double t_star, int component, int swing) {
    if (raw < best_raw || (raw == best_raw && t_star < gm.t_star)) {
      best_raw = raw;
      gm.value = raw * md.scale;
      gm.t_star = t_star;
      gm.component = component;
      gm.swing = swing;
    }
  };

  double horizon = 10.0;
  double finest_period = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= static_cast<int>(md.trig.size()); ++m) {
    const TrigComponent& tc = md.trig[m - 1];
    const double period = 2.0 * std::numbers::pi / tc.ang_freq;
    finest_period = std::min(finest_period, period);
    const int l_max = opt.l_max > 0 ? opt.l_max : default_l_max(tc);
    const double eps_t = opt.eps_t > 0.0 ? opt.eps_t : default_eps_t(tc);
    for (const auto& anchor : extrema_times(md, m, l_max)) {
      LocalMax lm = taylor_local_max(md, anchor, eps_t);
      // The quadratic model locates the trough; rank the candidate by the
      // exact closed form there so truncation error cannot inflate it.
      if (lm.accepted)
        consider(md.sum_at(lm.t_star), lm.t_star, lm.anchor.component,
                 lm.anchor.swing);
      horizon = std::max(horizon, anchor.t_hat + period);
      gm.candidates.push_back(std::move(lm));
    }
  }

  // Anchor refinement alone can miss troughs of the combined waveform where
  // components beat against each other, so scan the closed form on a grid
  // fine enough to bracket every oscillation and polish each bracketed
  // minimum. This keeps the result within the dense-grid oracle tolerance.
  if (!md.trig.empty() && std::isfinite(finest_period)) {
    const double dt = finest_period / 24.0;
    const int steps = std::min(200000, static_cast<int>(horizon / dt) + 1);
    double f_prev = md.sum_at(0.0);
    double f_cur = md.sum_at(dt);
    for (int i = 2; i <= steps; ++i) {
      const double t = i * dt;
      const double f_next = md.sum_at(t);
      if (f_cur < f_prev && f_cur <= f_next) {
        const double t_star =
            polish_minimum(md, t - 2.0 * dt, t, t - dt);
        if (t_star >= 0.0) {
          int component = 0, swing = 0;
          nearest_anchor(md, t_star, &component, &swing);
          consider(md.sum_at(t_star), t_star, component, swing);
        }
      }
      f_prev = f_cur;
      f_cur = f_next;
    }
  }

  gm.msn = gm.swing;
  return gm;
}

}  // namespace risr
