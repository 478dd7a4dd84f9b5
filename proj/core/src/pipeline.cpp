#include "qdm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qdm/parallel.hpp"

namespace qdm::pipeline {

FieldStack du_to_field(const FrameStack& stack, double slope_du_per_tesla) {
  if (slope_du_per_tesla == 0.0) throw std::invalid_argument("du_to_field: zero slope");
  FieldStack out(stack.width, stack.height, stack.frame_rate, stack.frame_count());
  const double inv = 1.0 / slope_du_per_tesla;
  for (std::size_t f = 0; f < stack.frame_count(); ++f) {
    for (std::size_t i = 0; i < stack.pixels(); ++i) {
      out.frames[f][i] = static_cast<double>(stack.frames[f][i]) * inv;
    }
  }
  return out;
}

void DifferentialPair::validate() const {
  if (set_a.width != set_b.width || set_a.height != set_b.height ||
      set_a.frame_count() != set_b.frame_count()) {
    throw std::invalid_argument("differential pair: mismatched dimensions");
  }
  const bool polarity_tags = set_a.protocol_tag == ProtocolTag::polarity_plus &&
                             set_b.protocol_tag == ProtocolTag::polarity_minus;
  const bool gating_tags = set_a.protocol_tag == ProtocolTag::gated_on &&
                           set_b.protocol_tag == ProtocolTag::gated_off;
  if (mode == DifferentialMode::polarity && !polarity_tags) {
    throw std::invalid_argument("differential pair: polarity mode needs +/- tags");
  }
  if (mode == DifferentialMode::gating && !gating_tags) {
    throw std::invalid_argument("differential pair: gating mode needs on/off tags");
  }
}

FieldStack differential_combine(const DifferentialPair& pair, double slope_du_per_tesla) {
  pair.validate();
  const FieldStack a = du_to_field(pair.set_a, slope_du_per_tesla);
  const FieldStack b = du_to_field(pair.set_b, slope_du_per_tesla);
  FieldStack out(a.width, a.height, a.frame_rate, a.frame_count());
  const double wa = pair.mode == DifferentialMode::polarity ? 0.5 : 1.0;
  for (std::size_t f = 0; f < a.frame_count(); ++f) {
    for (std::size_t i = 0; i < a.pixels(); ++i) {
      out.frames[f][i] = wa * (a.frames[f][i] - b.frames[f][i]);
    }
  }
  return out;
}

FieldMap differential_combine_maps(const FieldMap& a, const FieldMap& b,
                                   DifferentialMode mode) {
  if (!a.same_shape(b)) throw std::invalid_argument("differential maps: shape mismatch");
  const double w = mode == DifferentialMode::polarity ? 0.5 : 1.0;
  return map_lincomb(w, a, -w, b);
}

FieldMap gaussian_blur(const FieldMap& map, double sigma_px) {
  if (sigma_px <= 0.0) throw std::invalid_argument("gaussian_blur: sigma must be positive");
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_px)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double norm = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * (k / sigma_px) * (k / sigma_px));
    kernel[static_cast<std::size_t>(k + radius)] = w;
    norm += w;
  }
  for (double& w : kernel) w /= norm;

  const auto w_i = static_cast<long>(map.width);
  const auto h_i = static_cast<long>(map.height);
  const auto clampi = [](long v, long hi) { return std::clamp(v, 0l, hi - 1); };

  FieldMap tmp(map.width, map.height, map.pitch);
  tmp.axis = map.axis;
  parallel_for(map.height, [&](std::size_t r) {
    for (long c = 0; c < w_i; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               map.at(r, static_cast<std::size_t>(clampi(c + k, w_i)));
      }
      tmp.at(r, static_cast<std::size_t>(c)) = acc;
    }
  });
  FieldMap out(map.width, map.height, map.pitch);
  out.axis = map.axis;
  parallel_for(map.height, [&](std::size_t r) {
    for (std::size_t c = 0; c < map.width; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               tmp.at(static_cast<std::size_t>(clampi(static_cast<long>(r) + k, h_i)), c);
      }
      out.at(r, c) = acc;
    }
  });
  return out;
}

FieldMap highpass_gaussian(const FieldMap& map, double sigma_m) {
  if (sigma_m <= 0.0) throw std::invalid_argument("highpass_gaussian: sigma must be positive");
  const FieldMap low = gaussian_blur(map, sigma_m / map.pitch);
  return map_lincomb(1.0, map, -1.0, low);
}

SensitivityMap per_pixel_sensitivity(const FieldStack& stack) {
  if (stack.frame_count() < 2) {
    throw std::invalid_argument("per_pixel_sensitivity: need at least 2 frames");
  }
  const double n = static_cast<double>(stack.frame_count());
  SensitivityMap out;
  out.frame_rate = stack.frame_rate;
  out.sigma_pxl = FieldMap(stack.width, stack.height, stack.pitch);
  out.eta = FieldMap(stack.width, stack.height, stack.pitch);
  const double inv_sqrt_fs = 1.0 / std::sqrt(stack.frame_rate);
  for (std::size_t i = 0; i < stack.pixels(); ++i) {
    double sum = 0.0;
    for (const auto& f : stack.frames) sum += f[i];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& f : stack.frames) ss += (f[i] - mean) * (f[i] - mean);
    const double sigma = std::sqrt(ss / (n - 1.0));
    out.sigma_pxl.values[i] = sigma;
    out.eta.values[i] = sigma * inv_sqrt_fs;
  }
  std::vector<double> sorted = out.eta.values;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2),
                   sorted.end());
  out.median_eta = sorted[sorted.size() / 2];
  double acc = 0.0;
  for (double v : out.eta.values) acc += v;
  out.mean_eta = acc / static_cast<double>(out.eta.size());
  return out;
}

NoiseFloorReport spatial_noise_floor(const std::vector<FieldMap>& per_set_maps,
                                     const NoiseFloorOptions& opts) {
  if (per_set_maps.size() < 2) {
    throw std::invalid_argument("spatial_noise_floor: need at least 2 frame sets");
  }
  std::vector<std::size_t> eval = opts.eval_at;
  if (eval.empty()) {
    for (std::size_t k = 1; k <= per_set_maps.size(); k *= 2) eval.push_back(k);
    if (eval.back() != per_set_maps.size()) eval.push_back(per_set_maps.size());
  }
  if (!std::is_sorted(eval.begin(), eval.end()) ||
      std::adjacent_find(eval.begin(), eval.end()) != eval.end()) {
    throw std::invalid_argument("spatial_noise_floor: eval_at must be strictly increasing");
  }
  NoiseFloorReport report;
  report.n_bin = opts.n_bin;
  FieldMap running = per_set_maps.front();
  std::fill(running.values.begin(), running.values.end(), 0.0);
  std::size_t accumulated = 0;
  for (std::size_t k : eval) {
    if (k > per_set_maps.size() || k == 0) {
      throw std::invalid_argument("spatial_noise_floor: evaluation index out of range");
    }
    while (accumulated < k) {
      const FieldMap& m = per_set_maps[accumulated];
      if (!m.same_shape(running)) {
        throw std::invalid_argument("spatial_noise_floor: frame set shape mismatch");
      }
      for (std::size_t i = 0; i < running.size(); ++i) running.values[i] += m.values[i];
      ++accumulated;
    }
    FieldMap avg = running;
    const double inv = 1.0 / static_cast<double>(k);
    for (double& v : avg.values) v *= inv;
    if (opts.highpass_sigma_m > 0.0) avg = highpass_gaussian(avg, opts.highpass_sigma_m);
    if (opts.n_bin > 1) avg = bin_pixels(avg, opts.n_bin);
    report.points.push_back({static_cast<double>(k) * opts.t_acq_per_set_s,
                             map_std(avg, opts.border_exclude_px), k});
  }
  // Log-log line fit for the scaling exponent.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(report.points.size());
  for (const auto& pt : report.points) {
    const double x = std::log(pt.t_acq_s);
    const double y = std::log(std::max(pt.sigma_spatial_t, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  report.fit_slope = (n * sxy - sx * sy) / denom;
  double sse = 0.0;
  for (const auto& pt : report.points) {
    const double x = std::log(pt.t_acq_s);
    const double y = std::log(std::max(pt.sigma_spatial_t, 1e-300));
    const double pred = (sy - report.fit_slope * sx) / n + report.fit_slope * x;
    sse += (y - pred) * (y - pred);
  }
  report.fit_slope_err =
      n > 2.0 ? std::sqrt(sse / (n - 2.0) * n / denom) : 0.0;
  return report;
}

AllanCurve allan_deviation(const std::vector<double>& series, double sample_rate_hz) {
  if (series.size() < 4) throw std::invalid_argument("allan_deviation: series too short");
  if (sample_rate_hz <= 0.0) throw std::invalid_argument("allan_deviation: bad sample rate");
  const std::size_t n = series.size();
  // The statistic is offset-invariant; removing the mean keeps the prefix
  // sums small (and a constant series exactly zero).
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (series[i] - mean);
  AllanCurve curve;
  for (std::size_t m = 1; 2 * m <= n; m *= 2) {
    const double inv_m = 1.0 / static_cast<double>(m);
    double acc = 0.0;
    std::size_t terms = 0;
    for (std::size_t k = 0; k + 2 * m <= n; ++k) {
      const double first = (prefix[k + m] - prefix[k]) * inv_m;
      const double second = (prefix[k + 2 * m] - prefix[k + m]) * inv_m;
      acc += (second - first) * (second - first);
      ++terms;
    }
    curve.tau_s.push_back(static_cast<double>(m) / sample_rate_hz);
    curve.adev.push_back(std::sqrt(acc / (2.0 * static_cast<double>(terms))));
  }
  return curve;
}

double snr(const FieldMap& map, const PixelRoi& signal_roi, const PixelRoi& noise_roi) {
  if (!signal_roi.inside(map) || !noise_roi.inside(map)) {
    throw std::invalid_argument("snr: ROI out of bounds");
  }
  if (signal_roi.overlaps(noise_roi)) {
    throw std::invalid_argument("snr: signal and noise ROIs overlap");
  }
  const double p2p = roi_max(map, signal_roi) - roi_min(map, signal_roi);
  return p2p / roi_std(map, noise_roi);
}

ReconstructedTrace reconstruct_waveform(const FieldStack& stack,
                                        const ReconstructionOptions& opts,
                                        const std::vector<double>& stimulus_v,
                                        double scale_t_per_v) {
  if (!stimulus_v.empty() && stimulus_v.size() != stack.frame_count()) {
    throw std::invalid_argument("reconstruct_waveform: stimulus not frame-aligned");
  }
  ReconstructedTrace trace;
  trace.time_s.resize(stack.frame_count());
  trace.value_t.resize(stack.frame_count());
  for (std::size_t f = 0; f < stack.frame_count(); ++f) {
    trace.time_s[f] = static_cast<double>(f) / stack.frame_rate;
    if (opts.extraction == TraceExtraction::single_pixel) {
      if (opts.pixel_row >= stack.height || opts.pixel_col >= stack.width) {
        throw std::invalid_argument("reconstruct_waveform: pixel out of bounds");
      }
      trace.value_t[f] = stack.frames[f][opts.pixel_row * stack.width + opts.pixel_col];
    } else {
      FieldMap m(stack.width, stack.height, stack.pitch);
      m.values = stack.frames[f];
      trace.value_t[f] = roi_max(m, opts.roi);
    }
  }
  if (scale_t_per_v != 0.0 && !stimulus_v.empty()) {
    trace.reference_t.resize(stimulus_v.size());
    for (std::size_t f = 0; f < stimulus_v.size(); ++f) {
      trace.reference_t[f] = stimulus_v[f] * scale_t_per_v;
    }
  }
  return trace;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("correlation: length mismatch");
  }
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace qdm::pipeline
