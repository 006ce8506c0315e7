/*
Copyright 2026 The sylkit Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Signal-processing building blocks: FFT wrappers over FFTW, biquad
// cascades with zero-phase application, windows and order statistics.

#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "sylkit/error.hpp"

namespace sylkit::dsp {

namespace detail {
// The FFTW planner is not reentrant; execution on distinct plans is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

// Forward real-to-complex transform of fixed size n (n/2+1 output bins).
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    if (n == 0) fail(ErrorCode::kInvalidArgument, "fft size must be positive");
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(detail::planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft() {
    {
      std::lock_guard lock(detail::planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // Input shorter than size() is zero-padded.
  void forward(std::span<const double> in,
               std::span<std::complex<double>> out) {
    const std::size_t m = std::min(in.size(), n_);
    std::copy_n(in.begin(), m, in_);
    std::fill(in_ + m, in_ + n_, 0.0);
    fftw_execute(plan_);
    for (std::size_t k = 0; k < bins() && k < out.size(); ++k)
      out[k] = {out_[k][0], out_[k][1]};
  }

  // |X[k]|^2 for k in [0, n/2].
  void power(std::span<const double> in, std::span<double> out) {
    const std::size_t m = std::min(in.size(), n_);
    std::copy_n(in.begin(), m, in_);
    std::fill(in_ + m, in_ + n_, 0.0);
    fftw_execute(plan_);
    for (std::size_t k = 0; k < bins() && k < out.size(); ++k)
      out[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
  }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

// Magnitude of the analytic signal, computed over the whole input.
inline std::vector<double> analytic_magnitude(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> mag(n, 0.0);
  if (n == 0) return mag;
  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_plan fwd, inv;
  {
    std::lock_guard lock(detail::planner_mutex());
    fwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD,
                           FFTW_ESTIMATE);
    inv = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD,
                           FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) {
    buf[i][0] = x[i];
    buf[i][1] = 0.0;
  }
  fftw_execute(fwd);
  // Keep DC (and Nyquist for even n), double positive frequencies, zero the
  // negative ones.
  const std::size_t half = (n + 1) / 2;
  for (std::size_t k = 1; k < half; ++k) {
    buf[k][0] *= 2.0;
    buf[k][1] *= 2.0;
  }
  for (std::size_t k = n / 2 + 1; k < n; ++k) {
    buf[k][0] = 0.0;
    buf[k][1] = 0.0;
  }
  fftw_execute(inv);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    mag[i] = std::hypot(buf[i][0], buf[i][1]) * scale;
  {
    std::lock_guard lock(detail::planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(buf);
  return mag;
}

// Normalised biquad (a0 == 1), transposed direct form II.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;

  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

using Cascade = std::vector<Biquad>;

// Butterworth low-pass via the bilinear transform with prewarping. Odd orders
// get a first-order section (b2 = a2 = 0).
inline Cascade butterworth_lowpass(int order, double cutoff_hz,
                                   double sample_rate) {
  if (order < 1) fail(ErrorCode::kInvalidArgument, "filter order must be >= 1");
  if (!(cutoff_hz > 0.0 && cutoff_hz < sample_rate / 2.0))
    fail(ErrorCode::kInvalidArgument, "cutoff must lie in (0, nyquist)");
  const double w0 = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
  const double cosw = std::cos(w0);
  const double one_minus_cos = 2.0 * std::sin(w0 / 2.0) * std::sin(w0 / 2.0);
  Cascade out;
  for (int k = 0; k < order / 2; ++k) {
    const double q =
        1.0 / (2.0 * std::cos(std::numbers::pi * (2.0 * k + 1.0) /
                              (2.0 * order)));
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    Biquad s;
    s.b0 = one_minus_cos / 2.0 / a0;
    s.b1 = one_minus_cos / a0;
    s.b2 = s.b0;
    s.a1 = -2.0 * cosw / a0;
    s.a2 = (1.0 - alpha) / a0;
    out.push_back(s);
  }
  if (order % 2 == 1) {
    const double k = std::tan(w0 / 2.0);
    Biquad s;
    s.b0 = k / (1.0 + k);
    s.b1 = s.b0;
    s.b2 = 0.0;
    s.a1 = (k - 1.0) / (k + 1.0);
    s.a2 = 0.0;
    out.push_back(s);
  }
  return out;
}

// Second-order resonator, constant 0 dB peak gain at center_hz.
inline Biquad resonator_bandpass(double center_hz, double q,
                                 double sample_rate) {
  if (!(center_hz > 0.0 && center_hz < sample_rate / 2.0))
    fail(ErrorCode::kInvalidArgument, "resonator center must lie in (0, nyquist)");
  if (!(q > 0.0)) fail(ErrorCode::kInvalidArgument, "resonator q must be > 0");
  const double w0 = 2.0 * std::numbers::pi * center_hz / sample_rate;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = alpha / a0;
  s.b1 = 0.0;
  s.b2 = -alpha / a0;
  s.a1 = -2.0 * std::cos(w0) / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

// Runs the cascade in place. State starts at the steady state for a constant
// input equal to x[0], so a constant signal passes without a transient.
inline void filter_inplace(const Cascade& cascade, std::span<double> x) {
  if (x.empty()) return;
  double u = x[0];
  for (const Biquad& s : cascade) {
    const double y_ss = s.dc_gain() * u;
    double z2 = s.b2 * u - s.a2 * y_ss;
    double z1 = y_ss - s.b0 * u;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
    u = y_ss;
  }
}

// Zero-phase (forward-backward) filtering with odd-reflection padding of
// `pad` samples at each end.
inline std::vector<double> filtfilt(const Cascade& cascade,
                                    std::span<const double> x,
                                    std::size_t pad) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  pad = std::min(pad, n - 1);
  std::vector<double> ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i)
    ext[i] = 2.0 * x[0] - x[pad - i];
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t i = 0; i < pad; ++i)
    ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];
  filter_inplace(cascade, ext);
  std::reverse(ext.begin(), ext.end());
  filter_inplace(cascade, ext);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

// Symmetric Hann window of length n.
inline std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n - 1));
  return w;
}

inline double kaiser(double x, double beta) {
  if (x < -1.0 || x > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - x * x)) /
         std::cyl_bessel_i(0.0, beta);
}

inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Frame layout used by every framed analysis: frame t starts at sample
// t * hop; inputs shorter than one window give a single frame.
struct FrameGrid {
  std::size_t n = 0;
  std::size_t win = 0;
  std::size_t hop = 0;
  std::size_t frames = 0;

  FrameGrid(std::size_t samples, std::size_t window, std::size_t hop_len)
      : n(samples), win(window), hop(hop_len) {
    if (win == 0 || hop == 0)
      fail(ErrorCode::kInvalidArgument, "window and hop must be positive");
    frames = n >= win ? (n - win) / hop + 1 : 1;
  }

  std::size_t begin(std::size_t t) const { return t * hop; }
  // Number of real samples in frame t.
  std::size_t length(std::size_t t) const {
    return std::min(win, n - std::min(n, begin(t)));
  }
};

// Power spectra |X_k|^2 (k = 0..n_fft/2) of windowed frames; short frames are
// zero-padded. Returns frames x bins, row-major.
inline std::vector<double> power_spectrogram(std::span<const double> x,
                                             const FrameGrid& grid,
                                             std::span<const double> window,
                                             std::size_t n_fft) {
  RealFft fft(n_fft);
  const std::size_t bins = fft.bins();
  std::vector<double> out(grid.frames * bins);
  std::vector<double> frame(n_fft, 0.0);
  for (std::size_t t = 0; t < grid.frames; ++t) {
    std::fill(frame.begin(), frame.end(), 0.0);
    const std::size_t b = grid.begin(t);
    const std::size_t len = std::min(grid.length(t), window.size());
    for (std::size_t i = 0; i < len; ++i) frame[i] = x[b + i] * window[i];
    fft.power(frame, std::span<double>(out.data() + t * bins, bins));
  }
  return out;
}

// Linear-interpolation quantile (the "linear" method of most numeric
// packages). q in [0, 1].
template <typename T>
double quantile(std::span<const T> values, double q) {
  if (values.empty()) fail(ErrorCode::kInvalidArgument, "quantile of empty series");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

}  // namespace sylkit::dsp
