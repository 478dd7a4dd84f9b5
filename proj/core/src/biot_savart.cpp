#include "qdm/biot_savart.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include "qdm/constants.hpp"
#include "qdm/parallel.hpp"

namespace qdm::field {

using constants::mu0;
using constants::pi;

void WirePhantom::validate() const {
  if (traces.empty()) throw std::invalid_argument("phantom has no traces");
  for (const auto& t : traces) {
    if (t.size() < 2) throw std::invalid_argument("trace needs at least 2 vertices");
    for (std::size_t i = 1; i < t.size(); ++i) {
      if ((t[i] - t[i - 1]).norm() == 0.0) {
        throw std::invalid_argument("consecutive trace vertices coincide");
      }
    }
  }
  if (!std::isfinite(current)) throw std::invalid_argument("non-finite current");
  if (width < 0.0 || thickness < 0.0) throw std::invalid_argument("negative trace cross-section");
  if (filaments < 1) throw std::invalid_argument("filaments must be >= 1");
}

void SensingGeometry::validate() const {
  if (standoff < 0.0) throw std::invalid_argument("standoff must be >= 0");
  if (layer_thickness <= 0.0) throw std::invalid_argument("layer thickness must be > 0");
  if (depth_samples < 1) throw std::invalid_argument("depth_samples must be >= 1");
  if (pixel_pitch <= 0.0) throw std::invalid_argument("pixel pitch must be > 0");
  if (width == 0 || height == 0) throw std::invalid_argument("empty pixel grid");
}

NvAxis nv_axis_from_string(const std::string& s) {
  if (s == "111") return NvAxis::axis_111;
  if (s == "-111") return NvAxis::axis_m111;
  if (s == "1-11") return NvAxis::axis_1m11;
  if (s == "11-1") return NvAxis::axis_11m1;
  throw std::invalid_argument("unknown NV axis label: " + s +
                              " (expected 111, -111, 1-11 or 11-1)");
}

std::string to_string(NvAxis axis) {
  switch (axis) {
    case NvAxis::axis_111: return "111";
    case NvAxis::axis_m111: return "-111";
    case NvAxis::axis_1m11: return "1-11";
    case NvAxis::axis_11m1: return "11-1";
  }
  return "111";
}

Vec3 lab_axis_unit(NvAxis axis) {
  // Crystal-frame representative of the axis class.
  Vec3 c;
  switch (axis) {
    case NvAxis::axis_111: c = {1, 1, 1}; break;
    case NvAxis::axis_m111: c = {1, -1, -1}; break;
    case NvAxis::axis_1m11: c = {-1, 1, -1}; break;
    case NvAxis::axis_11m1: c = {-1, -1, 1}; break;
  }
  const double s2 = 1.0 / std::sqrt(2.0);
  const Vec3 lab{(c.x + c.y) * s2, (-c.x + c.y) * s2, c.z};
  return lab / std::sqrt(3.0);
}

namespace {

bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

}  // namespace

Vec3 segment_field(const Vec3& a, const Vec3& b, double amps, const Vec3& point) {
  // Canonical endpoint order makes endpoint reversal an exact sign flip.
  if (lex_less(b, a)) return -segment_field(b, a, amps, point);
  const Vec3 u = b - a;
  const double len = u.norm();
  if (len == 0.0) throw std::invalid_argument("segment_field: zero-length segment");
  const Vec3 uhat = u / len;
  const Vec3 ra = point - a;
  const Vec3 rb = point - b;
  const double t0 = ra.dot(uhat);           // axial coordinate of the foot
  const Vec3 perp = uhat.cross(ra);         // |perp| = perpendicular distance
  const double d2 = perp.dot(perp);
  const double na = ra.norm();
  const double nb = rb.norm();
  const double scale = std::max({len, na, nb});
  if (d2 <= 100.0 * std::numeric_limits<double>::epsilon() *
                std::numeric_limits<double>::epsilon() * scale * scale) {
    if (t0 >= 0.0 && t0 <= len) {
      throw SingularPoint("segment_field: evaluation point on the filament axis");
    }
    return {};  // collinear, outside the span: dl x r vanishes
  }
  // B = (mu0 I / 4 pi) (u^ x ra) [(L - t0)/|rb| + t0/|ra|] / d^2
  const double geom = ((len - t0) / nb + t0 / na) / d2;
  return perp * (mu0 * amps / (4.0 * pi) * geom);
}

namespace {

/// Perpendicular offset direction for width filaments: in the plane of the
/// trace (z = 0 for planar phantoms), falling back to any perpendicular
/// for out-of-plane segments.
Vec3 filament_normal(const Vec3& uhat) {
  Vec3 n = Vec3{0, 0, 1}.cross(uhat);
  if (n.norm() < 1e-9) n = Vec3{1, 0, 0}.cross(uhat);
  return n.normalized();
}

}  // namespace

Vec3 phantom_field_at(const WirePhantom& p, const Vec3& point) {
  p.validate();
  Vec3 total;
  const int k = p.filaments;
  const double i_fil = p.current / static_cast<double>(k);
  for (const auto& trace : p.traces) {
    for (std::size_t s = 0; s + 1 < trace.size(); ++s) {
      const Vec3 a = trace[s];
      const Vec3 b = trace[s + 1];
      if (k == 1 || p.width == 0.0) {
        total += segment_field(a, b, p.current, point);
        continue;
      }
      const Vec3 n = filament_normal((b - a).normalized());
      for (int j = 0; j < k; ++j) {
        const double off =
            p.width * (static_cast<double>(j) / static_cast<double>(k - 1) - 0.5);
        total += segment_field(a + n * off, b + n * off, i_fil, point);
      }
    }
  }
  return total;
}

Vec3 dipole_field(const DipoleSource& d, const Vec3& point) {
  const Vec3 r = point - d.position;
  const double dist = r.norm();
  if (dist == 0.0) throw std::invalid_argument("dipole_field: zero separation");
  const Vec3 rhat = r / dist;
  const Vec3 num = 3.0 * d.moment.dot(rhat) * rhat - d.moment;
  return num * (mu0 / (4.0 * pi * dist * dist * dist));
}

double project_axis(const Vec3& b, const SensingGeometry& g) {
  return b.dot(lab_axis_unit(g.axis));
}

Vec3 SourceSet::field_at(const Vec3& point) const {
  Vec3 total = uniform;
  for (const auto& p : phantoms) total += phantom_field_at(p, point);
  for (const auto& d : dipoles) total += dipole_field(d, point);
  return total;
}

FieldMap render_map(const SourceSet& sources, const SensingGeometry& g) {
  g.validate();
  FieldMap out(g.width, g.height, g.pixel_pitch);
  out.axis = to_string(g.axis);
  const int ds = g.depth_samples;
  // Midpoint sampling: equally spaced cell centres spanning the layer, so
  // the uniform average converges at second order in depth_samples.
  std::vector<double> depths(static_cast<std::size_t>(ds));
  for (int k = 0; k < ds; ++k) {
    depths[static_cast<std::size_t>(k)] =
        g.standoff +
        g.layer_thickness * (static_cast<double>(k) + 0.5) / static_cast<double>(ds);
  }
  const double x0 = -0.5 * static_cast<double>(g.width - 1) * g.pixel_pitch;
  const double y0 = -0.5 * static_cast<double>(g.height - 1) * g.pixel_pitch;

  std::mutex failure_mutex;
  std::string failure;
  parallel_for(g.height, [&](std::size_t r) {
    for (std::size_t c = 0; c < g.width; ++c) {
      const double x = x0 + static_cast<double>(c) * g.pixel_pitch;
      const double y = y0 + static_cast<double>(r) * g.pixel_pitch;
      double acc = 0.0;
      for (double z : depths) {
        Vec3 pt{x, y, z};
        double sample;
        try {
          sample = project_axis(sources.field_at(pt), g);
        } catch (const SingularPoint&) {
          try {
            sample = project_axis(
                sources.field_at(pt + Vec3{1e-12, 1e-12, 1e-12}), g);
          } catch (const SingularPoint&) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            failure = "render_map: singular sample at pixel (row " + std::to_string(r) +
                      ", col " + std::to_string(c) + ")";
            return;
          }
        }
        acc += sample;
      }
      out.at(r, c) = acc / static_cast<double>(ds);
    }
  });
  if (!failure.empty()) throw SingularPoint(failure);
  return out;
}

double sphere_moment(double diameter_m, double magnetization_a_per_m) {
  const double radius = 0.5 * diameter_m;
  return magnetization_a_per_m * (4.0 / 3.0) * pi * radius * radius * radius;
}

DipoleSource encapsulin_dipole(const Vec3& position, double diameter_m,
                               double magnetization) {
  return {Vec3{0, 0, sphere_moment(diameter_m, magnetization)}, position};
}

}  // namespace qdm::field
