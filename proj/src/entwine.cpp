#include "epath/entwine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

namespace epath {

namespace {

struct BaseVertex {
  int x;
  int t;
};

// Forward strand then the backward strand that retraces the loop's mirror.
constexpr BaseVertex kLoop[FiberPlacement::kSegments + 1] = {
    {0, 0}, {1, 1}, {0, 2}, {-1, 3}, {0, 4}, {1, 3}, {0, 2}, {-1, 1}, {0, 0}};

Provenance side_of(int segment) {
  const int mid2 = kLoop[segment].x + kLoop[segment + 1].x;
  return mid2 > 0 ? Provenance::RightEnvelope : Provenance::LeftEnvelope;
}

void check_drift(double drift) {
  if (!(std::abs(drift) < 1.0)) throw SuperluminalDrift();
}

}  // namespace

PathSegment PathSegment::between(Event a, Event b, Provenance provenance) {
  PathSegment s;
  s.start = a;
  s.end = b;
  const double dt = b.t - a.t;
  s.time_dir = dt >= 0.0 ? 1 : -1;
  const double dx_dt = (b.x - a.x) / dt;
  s.species = dx_dt > 0.0 ? Species::RightMover : Species::LeftMover;
  s.provenance = provenance;
  return s;
}

Event FiberPlacement::vertex(int i) const {
  const BaseVertex& v = kLoop[i];
  return {origin.x + scale * (v.x + drift * v.t), origin.t + scale * v.t};
}

PathSegment FiberPlacement::segment(int i) const {
  return PathSegment::between(vertex(i), vertex(i + 1), side_of(i));
}

EntwinedPath::EntwinedPath(PathKind kind, Event origin, std::vector<FiberPlacement> fibers,
                           SteadyWindow steady)
    : kind_(kind), origin_(origin), fibers_(std::move(fibers)), steady_(steady) {}

Event EntwinedPath::end() const { return fibers_.empty() ? origin_ : fibers_.back().origin; }

std::vector<PathSegment> EntwinedPath::connector(Event a, Event b) {
  std::vector<PathSegment> legs;
  if (a == b) return legs;
  const double u = a.x + a.t;
  const double w = b.x - b.t;
  const Event corner{(u + w) / 2.0, (u - w) / 2.0};
  if (!(corner == a)) legs.push_back(PathSegment::between(a, corner, Provenance::Connector));
  if (!(corner == b)) legs.push_back(PathSegment::between(corner, b, Provenance::Connector));
  return legs;
}

std::vector<PathSegment> EntwinedPath::segments() const {
  std::vector<PathSegment> out;
  out.reserve(fibers_.size() * (FiberPlacement::kSegments + 2));
  for_each_segment([&](const PathSegment& s) { out.push_back(s); });
  return out;
}

EntwinedPath build_fiber(Event origin, const LatticeSpec& spec, double drift, double scale) {
  spec.validate();
  check_drift(drift);
  if (!(scale > 0.0)) throw std::invalid_argument("fiber scale must be positive");
  const double period = LatticeSpec::kPeriod * scale;
  return EntwinedPath(PathKind::Fiber, origin, {FiberPlacement{origin, drift, scale}},
                      SteadyWindow{origin.t, origin.t + period});
}

EntwinedPath concatenate(const std::vector<EntwinedPath>& paths) {
  if (paths.empty()) throw std::invalid_argument("concatenate needs at least one path");
  if (paths.size() == 1) return paths.front();
  std::vector<FiberPlacement> fibers;
  std::size_t total = 0;
  for (const auto& p : paths) total += p.fiber_count();
  fibers.reserve(total);
  SteadyWindow steady = paths.front().steady_window();
  for (const auto& p : paths) {
    fibers.insert(fibers.end(), p.fibers().begin(), p.fibers().end());
    const SteadyWindow w = p.steady_window();
    steady.begin = std::max(steady.begin, w.begin);
    steady.end = std::min(steady.end, w.end);
  }
  return EntwinedPath(PathKind::Composite, paths.front().origin(), std::move(fibers), steady);
}

namespace {

std::array<double, 4> cord_offsets(double eps) { return {0.0, 1.0, 2.0 + eps, 3.0 + eps}; }

void append_cord(std::vector<FiberPlacement>& fibers, Event origin, double eps, int periods,
                 double drift, double scale) {
  for (int j = 0; j < periods; ++j) {
    for (double offset : cord_offsets(eps)) {
      const double dt = scale * (offset + LatticeSpec::kPeriod * j);
      fibers.push_back({{origin.x + drift * dt, origin.t + dt}, drift, scale});
    }
  }
}

}  // namespace

EntwinedPath build_cord(Event origin, const LatticeSpec& spec, const CordOptions& options) {
  spec.validate();
  check_drift(options.drift);
  if (options.periods < 1) throw std::invalid_argument("cord periods must be positive");
  if (!(options.scale > 0.0)) throw std::invalid_argument("cord scale must be positive");
  const double eps = spec.epsilon();
  std::vector<FiberPlacement> fibers;
  fibers.reserve(4 * static_cast<std::size_t>(options.periods));
  append_cord(fibers, origin, eps, options.periods, options.drift, options.scale);
  const double s = options.scale;
  return EntwinedPath(PathKind::Cord, origin, std::move(fibers),
                      {origin.t + s * (3.0 + eps), origin.t + s * LatticeSpec::kPeriod * options.periods});
}

int cable_cord_count(int k, int n, int amplitude_m) {
  const double value = std::abs(amplitude_m * std::sin(std::numbers::pi * k / n));
  // sin(pi k/n) is inexact at k = n/2 and friends; snap near-integers first.
  const double nearest = std::round(value);
  return static_cast<int>(std::abs(value - nearest) < 1e-9 ? nearest : std::floor(value));
}

EntwinedPath build_cable(Event origin, const LatticeSpec& spec, int amplitude_m,
                         const CableOptions& options) {
  spec.validate();
  check_drift(options.drift);
  if (amplitude_m < 1) throw std::invalid_argument("M must be at least 1");
  if (options.periods < 1) throw std::invalid_argument("cable periods must be positive");
  if (!(options.scale > 0.0)) throw std::invalid_argument("cable scale must be positive");

  const double eps = spec.epsilon();
  const double s = options.scale;
  std::size_t cords = 0;
  int k_min = -1, k_max = -1;
  for (int k = 0; k < spec.n; ++k) {
    const int c = cable_cord_count(k, spec.n, amplitude_m);
    cords += static_cast<std::size_t>(c);
    if (c > 0) {
      if (k_min < 0) k_min = k;
      k_max = k;
    }
  }
  std::vector<FiberPlacement> fibers;
  fibers.reserve(cords * 4 * static_cast<std::size_t>(options.periods));
  for (int k = 0; k < spec.n; ++k) {
    const int copies = cable_cord_count(k, spec.n, amplitude_m);
    const double dt = s * k * eps;
    const Event shifted{origin.x + options.drift * dt, origin.t + dt};
    for (int c = 0; c < copies; ++c) {
      append_cord(fibers, shifted, eps, options.periods, options.drift, s);
    }
  }
  SteadyWindow steady{};
  if (k_min >= 0) {
    steady = {origin.t + s * (k_max * eps + 3.0 + eps),
              origin.t + s * (k_min * eps + LatticeSpec::kPeriod * options.periods)};
  }
  return EntwinedPath(PathKind::Cable, origin, std::move(fibers), steady);
}

std::vector<PathSegment> right_envelope(const EntwinedPath& path) {
  std::vector<PathSegment> out;
  out.reserve(path.fiber_count() * FiberPlacement::kEnvelopeSegments);
  path.for_each_envelope_segment(0, path.fiber_count(),
                                 [&](const PathSegment& s) { out.push_back(s); });
  return out;
}

std::vector<PathSegment> right_envelope(const std::vector<PathSegment>& segments) {
  std::vector<PathSegment> out;
  for (const auto& s : segments) {
    if (s.provenance == Provenance::Unknown) throw MissingEnvelopeProvenance();
    if (s.provenance == Provenance::RightEnvelope) out.push_back(s);
  }
  return out;
}

void write_path_dump(std::ostream& os, const EntwinedPath& path) {
  os << "# start_x,start_t,end_x,end_t,time_dir,species,provenance\n";
  const auto old_precision = os.precision(17);
  path.for_each_segment([&](const PathSegment& s) {
    os << s.start.x << ',' << s.start.t << ',' << s.end.x << ',' << s.end.t << ','
       << s.time_dir << ',' << (s.species == Species::RightMover ? 'R' : 'L') << ','
       << (s.provenance == Provenance::RightEnvelope  ? "right"
           : s.provenance == Provenance::LeftEnvelope ? "left"
           : s.provenance == Provenance::Connector    ? "connector"
                                                      : "unknown")
       << '\n';
  });
  os.precision(old_precision);
}

}  // namespace epath
