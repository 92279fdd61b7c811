#include "cardiosync/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cardiosync/errors.hpp"
#include "fft.hpp"

namespace cardiosync {

namespace {

double normal_sf(double z) {  // P(Z > z)
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

// Average ranks of |values|, with tied magnitudes sharing their mean rank.
std::vector<double> abs_ranks(const std::vector<double>& values,
                              double* tie_correction) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(values[i]) < std::abs(values[j]);
  });
  std::vector<double> ranks(n);
  *tie_correction = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(values[order[j + 1]]) ==
                            std::abs(values[order[i]])) {
      ++j;
    }
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    const double t = static_cast<double>(j - i + 1);
    *tie_correction += t * t * t - t;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const PairedSample& s) {
  if (s.a.size() != s.b.size() || s.a.empty()) {
    throw Error(ErrorKind::InvalidInput, "paired sample sizes differ");
  }
  std::vector<double> diffs;
  for (std::size_t i = 0; i < s.a.size(); ++i) {
    const double d = s.a[i] - s.b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const std::size_t n = diffs.size();
  if (n < 5) {
    throw Error(ErrorKind::InsufficientData,
                "need at least 5 non-zero differences, got " +
                    std::to_string(n));
  }

  double tie_correction = 0.0;
  const std::vector<double> ranks = abs_ranks(diffs, &tie_correction);
  double w_plus = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rank_sum += ranks[i];
    if (diffs[i] > 0.0) w_plus += ranks[i];
  }
  const double w_minus = rank_sum - w_plus;

  WilcoxonResult out;
  out.statistic = std::min(w_plus, w_minus);

  const double center = 0.5 * rank_sum;
  const double delta = std::abs(w_plus - center);
  if (n <= 15) {
    // Exact permutation distribution of W+ over all sign assignments,
    // conditional on the observed (possibly tied) ranks.
    const std::size_t total = std::size_t{1} << n;
    std::size_t extreme = 0;
    const double lo = center - delta + 1e-9;
    const double hi = center + delta - 1e-9;
    for (std::size_t mask = 0; mask < total; ++mask) {
      double t = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::size_t{1} << i)) t += ranks[i];
      }
      if (t <= lo || t >= hi) ++extreme;
    }
    out.p_two_sided =
        std::min(1.0, static_cast<double>(extreme) / static_cast<double>(total));
  } else {
    const double nn = static_cast<double>(n);
    const double var =
        nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_correction / 48.0;
    const double z = (delta - 0.5) / std::sqrt(var);  // continuity corrected
    out.p_two_sided = std::min(1.0, 2.0 * normal_sf(std::max(0.0, z)));
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw Error(ErrorKind::InvalidInput,
                "pearson needs equal-length sequences of >= 3 values");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::InvalidInput,
                "pearson undefined for a constant sequence");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> estimate_hr(const Waveform& w, double window_s,
                                std::pair<double, double> band_bpm) {
  validate_waveform(w, "estimate_hr");
  if (!(window_s >= 10.0)) {
    throw Error(ErrorKind::InvalidConfig, "window_s must be >= 10 s");
  }
  const auto [lo_bpm, hi_bpm] = band_bpm;
  if (!(lo_bpm > 30.0 && hi_bpm < 240.0 && lo_bpm < hi_bpm)) {
    throw Error(ErrorKind::InvalidConfig,
                "band must lie within (30, 240) bpm");
  }

  const std::size_t win_len =
      static_cast<std::size_t>(std::floor(window_s * w.rate_hz + 1e-9));
  if (win_len < 2 || w.samples.size() < win_len) {
    throw Error(ErrorKind::InsufficientData,
                "record shorter than one HR window");
  }

  // Zero-pad so the bin spacing is at most 0.5 bpm.
  std::size_t nfft = 1;
  const double min_bins = 120.0 * w.rate_hz;
  while (static_cast<double>(nfft) < min_bins ||
         nfft < win_len) {
    nfft <<= 1;
  }

  const std::size_t n_windows = w.samples.size() / win_len;
  std::vector<double> hr;
  hr.reserve(n_windows);
  for (std::size_t wi = 0; wi < n_windows; ++wi) {
    const double* seg = w.samples.data() + wi * win_len;

    // Least-squares linear detrend.
    const double len = static_cast<double>(win_len);
    double sum = 0.0, sum_t = 0.0, sum_tt = 0.0, sum_tv = 0.0;
    for (std::size_t i = 0; i < win_len; ++i) {
      const double t = static_cast<double>(i);
      sum += seg[i];
      sum_t += t;
      sum_tt += t * t;
      sum_tv += t * seg[i];
    }
    const double denom = len * sum_tt - sum_t * sum_t;
    const double slope = denom != 0.0 ? (len * sum_tv - sum_t * sum) / denom : 0.0;
    const double intercept = (sum - slope * sum_t) / len;

    std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
    for (std::size_t i = 0; i < win_len; ++i) {
      buf[i] = {seg[i] - (intercept + slope * static_cast<double>(i)), 0.0};
    }
    const auto spec = detail::fft(std::move(buf), false);

    const double bin_hz = w.rate_hz / static_cast<double>(nfft);
    const std::size_t k_lo = static_cast<std::size_t>(
        std::ceil(lo_bpm / 60.0 / bin_hz));
    const std::size_t k_hi = std::min(
        nfft / 2,
        static_cast<std::size_t>(std::floor(hi_bpm / 60.0 / bin_hz)));
    std::size_t best_k = k_lo;
    double best_mag = -1.0;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
      const double mag = std::norm(spec[k]);
      if (mag > best_mag) {
        best_mag = mag;
        best_k = k;
      }
    }
    hr.push_back(60.0 * static_cast<double>(best_k) * bin_hz);
  }
  return hr;
}

AgreementReport agreement(std::span<const double> pred_hr,
                          std::span<const double> ref_hr) {
  if (pred_hr.size() != ref_hr.size() || pred_hr.size() < 2) {
    throw Error(ErrorKind::InvalidInput,
                "agreement needs equal-length sequences of >= 2 values");
  }
  AgreementReport out;
  double abs_sum = 0.0, pct_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < pred_hr.size(); ++i) {
    if (!(ref_hr[i] > 0.0)) {
      throw Error(ErrorKind::InvalidInput,
                  "reference HR must be > 0 (MAPE undefined)");
    }
    const double d = pred_hr[i] - ref_hr[i];
    abs_sum += std::abs(d);
    pct_sum += std::abs(d) / ref_hr[i];
    sq_sum += d * d;
  }
  const double n = static_cast<double>(pred_hr.size());
  out.mae = abs_sum / n;
  out.mape_pct = 100.0 * pct_sum / n;
  out.rmse = std::sqrt(sq_sum / n);
  try {
    out.pearson_r = pearson(pred_hr, ref_hr);
  } catch (const Error&) {
    out.pearson_r = std::nullopt;  // constant sequence: r omitted
  }
  return out;
}

AlignedCurves align_curves(const SyncCurve& a, const SyncCurve& b,
                           double max_dt_s) {
  if (!(max_dt_s > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "max_dt_s must be > 0");
  }
  AlignedCurves out;
  // Greedy nearest-time pairing; each b-point is consumed at most once.
  std::size_t j = 0;
  std::vector<bool> used_b(b.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a.beat_times_s[i];
    while (j + 1 < b.size() &&
           std::abs(b.beat_times_s[j + 1] - t) <=
               std::abs(b.beat_times_s[j] - t)) {
      ++j;
    }
    if (j < b.size() && !used_b[j] &&
        std::abs(b.beat_times_s[j] - t) <= max_dt_s) {
      used_b[j] = true;
      out.times_s.push_back(t);
      out.degree_a.push_back(a.degree[i]);
      out.degree_b.push_back(b.degree[j]);
    } else {
      ++out.dropped_a;
    }
  }
  out.dropped_b = b.size() - out.degree_b.size();
  return out;
}

}  // namespace cardiosync
