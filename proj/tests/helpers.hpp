#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cardiosync/waveform.hpp"

namespace testutil {

/// Samples fn(t) on a uniform grid.
inline cardiosync::Waveform make_wave(
    const std::function<double(double)>& fn, double rate_hz,
    double duration_s,
    cardiosync::SignalLabel label = cardiosync::SignalLabel::Bvp,
    double start_s = 0.0) {
  cardiosync::Waveform w;
  w.rate_hz = rate_hz;
  w.start_s = start_s;
  w.label = label;
  const std::size_t n =
      static_cast<std::size_t>(std::floor(duration_s * rate_hz + 1e-9)) + 1;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.samples[i] = fn(start_s + static_cast<double>(i) / rate_hz);
  }
  return w;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    dir_ = std::filesystem::temp_directory_path() /
           ("cardiosync_test_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace testutil
