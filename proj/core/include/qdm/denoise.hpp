#pragma once

#include "qdm/field_map.hpp"

namespace qdm::denoise {

/// Non-local means parameters. `h` is the filtering strength in field
/// units (tesla), typically 0.5x the spatial noise floor of the input;
/// `sigma_est` is the noise level estimated from a source-free region,
/// used in the noise-compensated weight exponent.
struct NLMParams {
  int search_window = 21;    // pixels, odd
  int template_window = 7;   // pixels, odd, < search_window
  double h = 0.0;            // field units
  double sigma_est = 0.0;    // field units

  void validate() const;
};

/// Non-local means: each output pixel is the weighted mean of the pixels q
/// in the search window, with w = exp(-max(d^2 - 2 sigma_est^2, 0)/h^2)
/// and d^2 the mean squared difference between the template windows around
/// p and q (edge replication at borders). Output values are a convex
/// combination of input values; constant maps are fixed points.
FieldMap nlm_denoise(const FieldMap& map, const NLMParams& params);

/// Gaussian smoothing with filter scale `h_px` in pixels, following the
/// convention in which additive white-noise std reduces by 1/(h sqrt(8 pi))
/// -- i.e. the kernel standard deviation is sqrt(2) h. Separable, 4-sigma
/// truncation, edge replication.
FieldMap gaussian_smooth(const FieldMap& map, double h_px);

/// Mean over pixels of the squared difference (field units squared).
double mse(const FieldMap& a, const FieldMap& b);

}  // namespace qdm::denoise
