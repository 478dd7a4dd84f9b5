#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdm/field_map.hpp"
#include "qdm/vec3.hpp"

namespace qdm::field {

/// Evaluation point on a current filament axis within the segment span.
struct SingularPoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Current-carrying trace geometry: polylines in metres, series current.
/// The fabricated trace cross-section (width x thickness) is modelled as
/// `filaments` parallel thin wires spanning the width in the trace plane,
/// each carrying current/filaments.
struct WirePhantom {
  std::vector<std::vector<Vec3>> traces;  // each >= 2 distinct vertices
  double width = 4e-6;       // m
  double thickness = 10e-9;  // m (not used by the thin-wire model)
  double current = 0.0;      // A, signed
  int filaments = 5;

  void validate() const;
};

/// Point magnetic dipole.
struct DipoleSource {
  Vec3 moment;    // A m^2
  Vec3 position;  // m
};

/// One of the four NV quantization axes. Labels name the <111> crystal
/// direction class; the representative signs are the tetrahedral bond set
/// (1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1) (all /sqrt(3)), which sum to
/// zero.
enum class NvAxis { axis_111, axis_m111, axis_1m11, axis_11m1 };

NvAxis nv_axis_from_string(const std::string& s);
std::string to_string(NvAxis axis);

/// Axis unit vector in the lab frame. The diamond sits with its top face
/// normal along [001] and in-plane edges along [110] and [-110]; the lab
/// frame is X = [110]/sqrt(2), Y = [-110]/sqrt(2), Z = [001].
Vec3 lab_axis_unit(NvAxis axis);

/// Imaging geometry: source plane at z = 0, NV layer spanning
/// [standoff, standoff + layer_thickness] in z, pixel grid centred on the
/// origin in x/y.
struct SensingGeometry {
  double standoff = 5e-6;          // m
  double layer_thickness = 10e-6;  // m
  int depth_samples = 11;
  double pixel_pitch = 1.9e-6;     // m
  std::size_t width = 142;
  std::size_t height = 142;
  NvAxis axis = NvAxis::axis_111;

  void validate() const;
};

/// Thin-wire analytic field of the finite segment a -> b carrying current
/// amps, at `point`. Matches the Biot-Savart line integral; collinear
/// points outside the segment see zero field; points on the axis within
/// the span throw SingularPoint.
Vec3 segment_field(const Vec3& a, const Vec3& b, double amps, const Vec3& point);

/// Superposition over all traces, segments and width filaments.
Vec3 phantom_field_at(const WirePhantom& p, const Vec3& point);

/// B = (mu0/4pi) [3 (m.r^) r^ - m] / r^3. Throws on zero separation.
Vec3 dipole_field(const DipoleSource& d, const Vec3& point);

/// Projection of B onto the sensing axis (tesla).
double project_axis(const Vec3& b, const SensingGeometry& g);

struct SourceSet {
  std::vector<WirePhantom> phantoms;
  std::vector<DipoleSource> dipoles;
  /// Optional uniform background field added everywhere (tesla).
  Vec3 uniform;

  Vec3 field_at(const Vec3& point) const;
};

/// Axis-projected field map: per pixel centre, the field is sampled at
/// depth_samples equally spaced depths spanning the NV layer (cell
/// midpoints) and averaged uniformly. The lateral value is the
/// pixel-centre sample. A sample that lands on a filament axis is jittered
/// once by 1e-12 m; if still singular the pixel is reported in the error.
FieldMap render_map(const SourceSet& sources, const SensingGeometry& g);

// ---------------------------------------------------------------------------
// Phantom geometry files: CSV rows `trace_id,x_m,y_m,z_m` plus header
// records `width_m,<v>`, `thickness_m,<v>`, `current_a,<v>`.
WirePhantom load_phantom_csv(const std::filesystem::path& path);
void write_phantom_csv(const WirePhantom& p, const std::filesystem::path& path);

/// Bundled example geometry: a meandering serpentine in the z = 0 plane,
/// `legs` horizontal runs of `leg_length` connected by `spacing` jogs,
/// centred on the origin.
WirePhantom serpentine_phantom(int legs = 8, double leg_length = 180e-6,
                               double spacing = 20e-6, double current = 436e-9);

/// Dipole moment of a uniformly magnetized sphere (volume * magnetization).
double sphere_moment(double diameter_m, double magnetization_a_per_m);

/// Default encapsulin-style compartment: 30 nm diameter, 2.1e5 A/m.
DipoleSource encapsulin_dipole(const Vec3& position, double diameter_m = 30e-9,
                               double magnetization = 2.1e5);

}  // namespace qdm::field
