#pragma once
// Deterministic entwined paths: fibers, cords and cables as one continuous
// space-time trajectory that may run backward in time.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "epath/lattice.hpp"

namespace epath {

struct Event {
  double x = 0.0;
  double t = 0.0;
  bool operator==(const Event&) const = default;
};

enum class Species : std::uint8_t { RightMover, LeftMover };

/// Where a segment came from. Only RightEnvelope segments are counted.
enum class Provenance : std::uint8_t { Unknown, RightEnvelope, LeftEnvelope, Connector };

struct PathSegment {
  Event start;
  Event end;
  int time_dir = 1;  // sign of (end.t - start.t)
  Species species = Species::RightMover;
  Provenance provenance = Provenance::Unknown;

  /// Builds a segment and derives time_dir and species from its geometry.
  static PathSegment between(Event a, Event b, Provenance provenance);
};

class SuperluminalDrift : public std::invalid_argument {
 public:
  SuperluminalDrift() : std::invalid_argument("superluminal drift: |drift| must be below 1") {}
};

class MissingEnvelopeProvenance : public std::invalid_argument {
 public:
  MissingEnvelopeProvenance()
      : std::invalid_argument("segment lacks envelope provenance; cannot select right envelope") {}
};

/// One closed period-4 loop, scaled in both axes by `scale`, sheared so its
/// axis runs along x = origin.x + drift * (t - origin.t).
struct FiberPlacement {
  Event origin;
  double drift = 0.0;
  double scale = 1.0;

  static constexpr int kSegments = 8;
  static constexpr int kEnvelopeSegments = 4;

  /// Vertex i (0..8) of the loop; vertex 0 and 8 are the origin.
  Event vertex(int i) const;
  PathSegment segment(int i) const;
};

enum class PathKind { Fiber, Cord, Cable, Composite };

/// Closed interval of internal time over which every constituent fiber
/// contributes its periodic steady-state density.
struct SteadyWindow {
  double begin = 0.0;
  double end = 0.0;
  bool empty() const { return !(end > begin); }
};

/// A single continuous path stored as its ordered fibers. Connectors are
/// implied wherever one fiber's closing event differs from the next fiber's
/// origin; they consist of two lightlike legs and carry no envelope weight.
class EntwinedPath {
 public:
  EntwinedPath() = default;
  EntwinedPath(PathKind kind, Event origin, std::vector<FiberPlacement> fibers,
               SteadyWindow steady);

  PathKind kind() const { return kind_; }
  Event origin() const { return origin_; }
  const std::vector<FiberPlacement>& fibers() const { return fibers_; }
  std::size_t fiber_count() const { return fibers_.size(); }
  SteadyWindow steady_window() const { return steady_; }
  Event end() const;

  /// Materialises every segment including connectors, in traversal order.
  std::vector<PathSegment> segments() const;

  template <typename Fn>
  void for_each_segment(Fn&& fn) const {
    for (std::size_t f = 0; f < fibers_.size(); ++f) {
      if (f > 0 && fibers_[f - 1].origin != fibers_[f].origin) {
        for (const auto& c : connector(fibers_[f - 1].origin, fibers_[f].origin)) fn(c);
      }
      for (int s = 0; s < FiberPlacement::kSegments; ++s) fn(fibers_[f].segment(s));
    }
  }

  /// Visits right-envelope segments of fibers [first, last).
  template <typename Fn>
  void for_each_envelope_segment(std::size_t first, std::size_t last, Fn&& fn) const {
    for (std::size_t f = first; f < last && f < fibers_.size(); ++f) {
      for (int s : kEnvelopeIndices) fn(fibers_[f].segment(s));
    }
  }

  /// Two lightlike legs from a to b through the intersection of their light cones.
  static std::vector<PathSegment> connector(Event a, Event b);

  static constexpr int kEnvelopeIndices[FiberPlacement::kEnvelopeSegments] = {0, 1, 4, 5};

 private:
  PathKind kind_ = PathKind::Composite;
  Event origin_{};
  std::vector<FiberPlacement> fibers_;
  SteadyWindow steady_{};
};

/// Canonical loop (drift 0, origin (0,0)): forward through (1,1),(0,2),(-1,3)
/// to (0,4) and back through (1,3),(0,2),(-1,1) to (0,0).
EntwinedPath build_fiber(Event origin, const LatticeSpec& spec, double drift = 0.0,
                         double scale = 1.0);

/// Joins paths in order. Density is additive under concatenation.
EntwinedPath concatenate(const std::vector<EntwinedPath>& paths);

struct CordOptions {
  int periods = 1;  // consecutive period-4 repetitions of the four-fiber cord
  double drift = 0.0;
  double scale = 1.0;
};

/// Four fibers at temporal offsets {0, 1, 2+eps, 3+eps}, repeated for
/// `periods` cycles. Adolescent density: W(t) + W(t+2-eps), a chain of +-2
/// spikes one cell wide.
EntwinedPath build_cord(Event origin, const LatticeSpec& spec, const CordOptions& options = {});

/// floor(|M sin(pi k / n)|): the number of cords at shift k.
int cable_cord_count(int k, int n, int amplitude_m);

struct CableOptions {
  int periods = 3;
  double drift = 0.0;
  double scale = 1.0;
};

/// For k = 0..n-1, cable_cord_count(k) cords at temporal offset k*eps. The
/// adolescent density approximates 2M sin(pi t / 2) in the steady window.
EntwinedPath build_cable(Event origin, const LatticeSpec& spec, int amplitude_m,
                         const CableOptions& options = {});

/// Right-envelope segments of every fiber. Throws MissingEnvelopeProvenance
/// if any segment in `segments` has Unknown provenance.
std::vector<PathSegment> right_envelope(const EntwinedPath& path);
std::vector<PathSegment> right_envelope(const std::vector<PathSegment>& segments);

/// Delimited dump: start_x,start_t,end_x,end_t,time_dir,species,provenance
void write_path_dump(std::ostream& os, const EntwinedPath& path);

}  // namespace epath
