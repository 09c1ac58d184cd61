#pragma once
// Signed integer accumulation of right-envelope segments on an (x, t) grid.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "epath/entwine.hpp"

namespace epath {

enum class Channel { Adolescent, Senescent };

class OutOfBounds : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Two channels of signed counts over half-open cells [k*eps, (k+1)*eps)
/// measured from `origin`. Row-major by time: index = t * x_cells + x.
class DensityField {
 public:
  DensityField() = default;
  DensityField(int x_cells, int t_cells, double cell_size, Event origin, bool periodic_x = false);

  /// Smallest field covering [x_lo, x_hi) x [t_lo, t_hi) on the eps grid
  /// anchored at (x_anchor, t_anchor).
  static DensityField covering(double x_lo, double x_hi, double t_lo, double t_hi,
                               double cell_size, Event anchor = {});

  int x_cells() const { return x_cells_; }
  int t_cells() const { return t_cells_; }
  double cell_size() const { return cell_; }
  Event origin() const { return origin_; }
  bool periodic_x() const { return periodic_; }
  bool sealed() const { return sealed_; }
  void seal() { sealed_ = true; }

  std::int32_t at(Channel c, int x, int t) const { return data(c)[index(x, t)]; }
  std::int32_t& at(Channel c, int x, int t);

  std::span<const std::int32_t> data(Channel c) const;
  std::span<std::int32_t> mutable_data(Channel c);

  /// Center of cell k on each axis.
  double t_center(int t) const { return origin_.t + (t + 0.5) * cell_; }
  double x_center(int x) const { return origin_.x + (x + 0.5) * cell_; }

  /// Cell-wise sum; shapes and grids must match.
  DensityField& operator+=(const DensityField& other);
  bool operator==(const DensityField& other) const;

  /// Per time row, sum over x cells in [x_begin, x_end).
  std::vector<std::int64_t> time_profile(Channel c, int x_begin = 0, int x_end = -1) const;
  std::int64_t total(Channel c) const;

 private:
  std::size_t index(int x, int t) const {
    return static_cast<std::size_t>(t) * static_cast<std::size_t>(x_cells_) +
           static_cast<std::size_t>(x);
  }
  void require_writable() const;

  int x_cells_ = 0;
  int t_cells_ = 0;
  double cell_ = 1.0;
  Event origin_{};
  bool periodic_ = false;
  bool sealed_ = false;
  std::vector<std::int32_t> adolescent_;
  std::vector<std::int32_t> senescent_;
};

struct AccumulateOptions {
  bool clip = false;  // drop out-of-range cells instead of throwing
  int threads = 1;    // 0 = hardware concurrency
};

/// Adds time_dir to the species channel in every time slab a segment
/// crosses, at the x cell holding the segment's midpoint within that slab.
/// Segments with non-envelope provenance are rejected.
void accumulate(DensityField& field, std::span<const PathSegment> envelope,
                const AccumulateOptions& options = {});

/// Accumulates the right envelope of `path` without materialising it.
/// Workers fill private fields that are summed in a fixed order.
void accumulate(DensityField& field, const EntwinedPath& path,
                const AccumulateOptions& options = {});

struct TimeProfile {
  std::vector<std::int64_t> adolescent;
  std::vector<std::int64_t> senescent;
};

/// Per-slab totals of the right envelope over rows [t0 + k*eps, t0 + (k+1)*eps),
/// k < t_cells, regardless of position. Slabs outside the rows are dropped.
TimeProfile accumulate_time_profile(const EntwinedPath& path, double t0, int t_cells,
                                    double cell_size);

/// Closed forms evaluated with mod(t, 4) in [0, 4).
struct ReferenceDensity {
  enum class Kind { UA, US, WA, DeltaA, Sinusoid };
  Kind kind = Kind::UA;
  double epsilon = 0.2;    // DeltaA
  double amplitude = 1.0;  // Sinusoid: A sin(2 pi t / period + phase)
  double period = 4.0;
  double phase = 0.0;

  static ReferenceDensity u_a() { return {Kind::UA}; }
  static ReferenceDensity u_s() { return {Kind::US}; }
  static ReferenceDensity w_a() { return {Kind::WA}; }
  static ReferenceDensity delta_a(double eps) { return {Kind::DeltaA, eps}; }
  static ReferenceDensity sinusoid(double amplitude, double period, double phase = 0.0) {
    return {Kind::Sinusoid, 0.0, amplitude, period, phase};
  }
};

double mod4(double t);
double reference_eval(const ReferenceDensity& ref, double t);

/// Cell ranges, half-open. x_end < 0 means all columns.
struct Region {
  int t_begin = 0;
  int t_end = 0;
  int x_begin = 0;
  int x_end = -1;
};

/// Time rows whose centers fall in [window.begin, window.end], shrunk by
/// `margin` cells at each side.
Region steady_region(const DensityField& field, SteadyWindow window, int margin = 0);

struct SinusoidParams {
  double amplitude = 0.0;
  double period = 0.0;
  double phase = 0.0;
};

struct ErrorReport {
  double l_inf = 0.0;
  double rms = 0.0;
  std::optional<SinusoidParams> fitted;
};

/// Compares the channel's time profile over `region` with `ref` sampled at
/// cell centers. Sinusoid references are first fitted (amplitude, period,
/// phase) seeded by the reference's period. Throws on an empty region.
ErrorReport compare(const DensityField& field, const ReferenceDensity& ref, Channel channel,
                    const Region& region);

/// Lag in cells (0 <= lag < max_lag) maximising the normalised correlation of
/// a[i - lag] with b[i] over their overlap; ties
/// resolve to the smallest lag.
int best_lag(std::span<const double> a, std::span<const double> b, int max_lag);

/// Metadata line plus one matrix per channel; integers written verbatim.
void write_field(std::ostream& os, const DensityField& field);
DensityField read_field(std::istream& is);

}  // namespace epath
