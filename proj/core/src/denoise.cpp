#include "qdm/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qdm/parallel.hpp"
#include "qdm/pipeline.hpp"

namespace qdm::denoise {

void NLMParams::validate() const {
  if (search_window < 3 || search_window % 2 == 0) {
    throw std::invalid_argument("nlm: search window must be odd and >= 3");
  }
  if (template_window < 1 || template_window % 2 == 0) {
    throw std::invalid_argument("nlm: template window must be odd");
  }
  if (template_window >= search_window) {
    throw std::invalid_argument("nlm: template window must be smaller than search window");
  }
  if (h <= 0.0) throw std::invalid_argument("nlm: filtering strength h must be positive");
  if (sigma_est < 0.0) throw std::invalid_argument("nlm: sigma_est must be >= 0");
}

FieldMap nlm_denoise(const FieldMap& map, const NLMParams& params) {
  params.validate();
  if (map.width < static_cast<std::size_t>(params.search_window) ||
      map.height < static_cast<std::size_t>(params.search_window)) {
    throw std::invalid_argument("nlm: map smaller than the search window");
  }
  const long w = static_cast<long>(map.width);
  const long h_px = static_cast<long>(map.height);
  const int sr = params.search_window / 2;
  const int tr = params.template_window / 2;
  const double tmpl_count =
      static_cast<double>(params.template_window) * params.template_window;
  const double noise_floor = 2.0 * params.sigma_est * params.sigma_est;
  const double inv_h2 = 1.0 / (params.h * params.h);

  const auto sample = [&](long r, long c) {
    r = std::clamp(r, 0l, h_px - 1);
    c = std::clamp(c, 0l, w - 1);
    return map.values[static_cast<std::size_t>(r) * map.width + static_cast<std::size_t>(c)];
  };

  FieldMap out(map.width, map.height, map.pitch);
  out.axis = map.axis;
  parallel_for(map.height, [&](std::size_t row) {
    const long pr = static_cast<long>(row);
    for (long pc = 0; pc < w; ++pc) {
      double weight_sum = 0.0;
      double value_sum = 0.0;
      for (long qr = pr - sr; qr <= pr + sr; ++qr) {
        if (qr < 0 || qr >= h_px) continue;
        for (long qc = pc - sr; qc <= pc + sr; ++qc) {
          if (qc < 0 || qc >= w) continue;
          double dist2 = 0.0;
          for (int i = -tr; i <= tr; ++i) {
            for (int j = -tr; j <= tr; ++j) {
              const double d = sample(pr + i, pc + j) - sample(qr + i, qc + j);
              dist2 += d * d;
            }
          }
          dist2 /= tmpl_count;
          const double weight = std::exp(-std::max(dist2 - noise_floor, 0.0) * inv_h2);
          weight_sum += weight;
          value_sum += weight * map.values[static_cast<std::size_t>(qr) * map.width +
                                           static_cast<std::size_t>(qc)];
        }
      }
      out.values[row * map.width + static_cast<std::size_t>(pc)] = value_sum / weight_sum;
    }
  });
  return out;
}

FieldMap gaussian_smooth(const FieldMap& map, double h_px) {
  if (h_px <= 0.0) throw std::invalid_argument("gaussian_smooth: h must be positive");
  return pipeline::gaussian_blur(map, std::sqrt(2.0) * h_px);
}

double mse(const FieldMap& a, const FieldMap& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mse: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

}  // namespace qdm::denoise
