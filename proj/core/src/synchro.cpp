#include "cardiosync/synchro.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "cardiosync/errors.hpp"
#include "cardiosync/signal_ops.hpp"

namespace cardiosync {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

double positive_fmod(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  return r;
}
}  // namespace

RatioGrid RatioGrid::standard() {
  RatioGrid grid;
  for (int n = 2; n <= 15; ++n) grid.pairs.push_back({n, 1});
  for (int n = 3; n <= 15; n += 2) grid.pairs.push_back({n, 2});
  return grid;
}

void validate_grid(const RatioGrid& grid) {
  if (grid.pairs.empty()) {
    throw Error(ErrorKind::InvalidConfig, "ratio grid is empty");
  }
  for (const auto& [n, m] : grid.pairs) {
    if (n < 1 || m < 1) {
      throw Error(ErrorKind::InvalidConfig, "ratio entries must be >= 1");
    }
    if (std::gcd(n, m) != 1) {
      throw Error(ErrorKind::InvalidConfig,
                  "ratio " + std::to_string(n) + ":" + std::to_string(m) +
                      " is not gcd-reduced");
    }
    const double r = static_cast<double>(n) / static_cast<double>(m);
    if (r < 1.5 || r > 15.0) {
      throw Error(ErrorKind::InvalidConfig,
                  "ratio " + std::to_string(n) + ":" + std::to_string(m) +
                      " outside [1.5, 15]");
    }
  }
}

void validate_synchro_config(const SynchroConfig& cfg) {
  if (cfg.half_window < 1 || cfg.window_beats != 2 * cfg.half_window) {
    throw Error(ErrorKind::InvalidConfig,
                "window_beats must equal 2 * half_window (>= 2)");
  }
  if (!(cfg.gamma_threshold > 0.0 && cfg.gamma_threshold < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "gamma_threshold must be in (0,1)");
  }
  if (!(cfg.min_episode_s > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "min_episode_s must be > 0");
  }
}

double psi_m(double phi_r, int m) {
  if (m < 1) throw Error(ErrorKind::InvalidConfig, "m must be >= 1");
  return positive_fmod(phi_r, kTwoPi * m) / kTwoPi;
}

double big_psi(double psi, int n, int m) {
  if (n < 1 || m < 1) {
    throw Error(ErrorKind::InvalidConfig, "n and m must be >= 1");
  }
  return kTwoPi / m * positive_fmod(psi * n, static_cast<double>(m));
}

double gamma_index(std::span<const double> big_psis) {
  if (big_psis.size() < 2) {
    throw Error(ErrorKind::EmptyResult, "gamma needs at least 2 phases");
  }
  double c = 0.0, s = 0.0;
  for (double psi : big_psis) {
    c += std::cos(psi);
    s += std::sin(psi);
  }
  const double inv_n = 1.0 / static_cast<double>(big_psis.size());
  c *= inv_n;
  s *= inv_n;
  return std::min(1.0, c * c + s * s);
}

SyncCurve sync_curve(const EventSeries& beats, const PhaseSeries& resp_phase,
                     const RatioGrid& grid, const SynchroConfig& cfg) {
  validate_grid(grid);
  validate_synchro_config(cfg);
  const std::size_t half = static_cast<std::size_t>(cfg.half_window);
  const std::size_t nb = beats.size();
  if (nb < static_cast<std::size_t>(cfg.window_beats) + 1) {
    throw Error(ErrorKind::InsufficientData,
                "need at least " + std::to_string(cfg.window_beats + 1) +
                    " beats, got " + std::to_string(nb));
  }

  // Respiratory phase at every beat (throws OutOfRange on stray beats).
  std::vector<double> phi(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    phi[k] = phase_at(resp_phase, beats.times_s[k]);
  }

  // Ratios in tie-break order (smaller n+m, then smaller n) so a strict
  // comparison during the max scan realizes the tie rule.
  std::vector<RatioPair> order = grid.pairs;
  std::sort(order.begin(), order.end(), [](const RatioPair& a, const RatioPair& b) {
    if (a.n + a.m != b.n + b.m) return a.n + a.m < b.n + b.m;
    if (a.n != b.n) return a.n < b.n;
    return a.m < b.m;
  });

  // Prefix sums of cos/sin of the folded phase, one pair of rows per ratio.
  const std::size_t np = order.size();
  std::vector<std::vector<double>> pc(np, std::vector<double>(nb + 1, 0.0));
  std::vector<std::vector<double>> ps(np, std::vector<double>(nb + 1, 0.0));
  for (std::size_t r = 0; r < np; ++r) {
    const auto [n, m] = order[r];
    for (std::size_t k = 0; k < nb; ++k) {
      const double big = big_psi(psi_m(phi[k], m), n, m);
      pc[r][k + 1] = pc[r][k] + std::cos(big);
      ps[r][k + 1] = ps[r][k] + std::sin(big);
    }
  }

  SyncCurve curve;
  const std::size_t first = half;
  const std::size_t last = nb - half - 1;  // inclusive
  const double inv_w = 1.0 / static_cast<double>(cfg.window_beats);
  for (std::size_t k = first; k <= last; ++k) {
    double best = -1.0;
    int bn = 0, bm = 0;
    for (std::size_t r = 0; r < np; ++r) {
      // Window spans [k-half, k+half] minus the reference beat itself.
      const double sum_c =
          pc[r][k + half + 1] - pc[r][k - half] -
          (pc[r][k + 1] - pc[r][k]);
      const double sum_s =
          ps[r][k + half + 1] - ps[r][k - half] -
          (ps[r][k + 1] - ps[r][k]);
      const double mc = sum_c * inv_w;
      const double ms = sum_s * inv_w;
      const double g = mc * mc + ms * ms;
      // Ratios arrive in tie-break order, so only a clear win replaces the
      // incumbent; harmonics of a locked ratio tie at gamma = 1 up to
      // rounding and must not displace the simpler ratio.
      if (g > best + 1e-12) {
        best = g;
        bn = order[r].n;
        bm = order[r].m;
      }
    }
    curve.beat_times_s.push_back(beats.times_s[k]);
    curve.degree.push_back(std::min(1.0, best));
    curve.best_n.push_back(bn);
    curve.best_m.push_back(bm);
  }
  return curve;
}

std::vector<Episode> detect_episodes(const SyncCurve& curve,
                                     const SynchroConfig& cfg) {
  validate_synchro_config(cfg);
  std::vector<Episode> episodes;
  const std::size_t n = curve.size();
  std::size_t i = 0;
  while (i < n) {
    if (curve.degree[i] > cfg.gamma_threshold) {
      std::size_t j = i;
      while (j + 1 < n && curve.degree[j + 1] > cfg.gamma_threshold) ++j;
      const double span = curve.beat_times_s[j] - curve.beat_times_s[i];
      if (span >= cfg.min_episode_s) {
        // Modal winning ratio within the run; ties to smaller n+m, then n.
        std::map<std::pair<int, int>, int> counts;
        for (std::size_t k = i; k <= j; ++k) {
          ++counts[{curve.best_n[k], curve.best_m[k]}];
        }
        std::pair<int, int> dom = counts.begin()->first;
        int dom_count = counts.begin()->second;
        for (const auto& [ratio, count] : counts) {
          const bool better =
              count > dom_count ||
              (count == dom_count &&
               (ratio.first + ratio.second < dom.first + dom.second ||
                (ratio.first + ratio.second == dom.first + dom.second &&
                 ratio.first < dom.first)));
          if (better) {
            dom = ratio;
            dom_count = count;
          }
        }
        episodes.push_back({curve.beat_times_s[i], curve.beat_times_s[j],
                            span, dom.first, dom.second});
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  return episodes;
}

LongTermMetrics long_term_metrics(const SyncCurve& curve,
                                  const std::vector<Episode>& episodes,
                                  const EventSeries& beats,
                                  const PhaseSeries& resp_phase) {
  if (curve.empty()) {
    throw Error(ErrorKind::InsufficientData, "empty synchronization curve");
  }
  const auto [mn, mx] =
      std::minmax_element(curve.degree.begin(), curve.degree.end());
  LongTermMetrics out;
  out.min_pct = 100.0 * *mn;
  out.max_pct = 100.0 * *mx;
  out.num_sync = static_cast<int>(episodes.size());
  out.freq_ratio = mean_rate(beats) / resp_rate(resp_phase);
  return out;
}

}  // namespace cardiosync
