#include "epath/density.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "epath/fit.hpp"
#include "epath/io.hpp"
#include "epath/simd.hpp"

namespace epath {

namespace {

constexpr double kSnap = 1e-9;

double floor_snap(double q) {
  const double r = std::round(q);
  return std::abs(q - r) < kSnap ? r : std::floor(q);
}

double ceil_snap(double q) {
  const double r = std::round(q);
  return std::abs(q - r) < kSnap ? r : std::ceil(q);
}

}  // namespace

DensityField::DensityField(int x_cells, int t_cells, double cell_size, Event origin,
                           bool periodic_x)
    : x_cells_(x_cells), t_cells_(t_cells), cell_(cell_size), origin_(origin),
      periodic_(periodic_x) {
  if (x_cells <= 0 || t_cells <= 0) throw std::invalid_argument("field dimensions must be positive");
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
  const std::size_t n = static_cast<std::size_t>(x_cells) * static_cast<std::size_t>(t_cells);
  adolescent_.assign(n, 0);
  senescent_.assign(n, 0);
}

DensityField DensityField::covering(double x_lo, double x_hi, double t_lo, double t_hi,
                                    double cell_size, Event anchor) {
  const double kx0 = floor_snap((x_lo - anchor.x) / cell_size);
  const double kx1 = ceil_snap((x_hi - anchor.x) / cell_size);
  const double kt0 = floor_snap((t_lo - anchor.t) / cell_size);
  const double kt1 = ceil_snap((t_hi - anchor.t) / cell_size);
  return DensityField(std::max(1, static_cast<int>(kx1 - kx0)),
                      std::max(1, static_cast<int>(kt1 - kt0)), cell_size,
                      {anchor.x + kx0 * cell_size, anchor.t + kt0 * cell_size});
}

void DensityField::require_writable() const {
  if (sealed_) throw std::logic_error("density field is sealed");
}

std::int32_t& DensityField::at(Channel c, int x, int t) {
  require_writable();
  return mutable_data(c)[index(x, t)];
}

std::span<const std::int32_t> DensityField::data(Channel c) const {
  return c == Channel::Adolescent ? std::span<const std::int32_t>(adolescent_)
                                  : std::span<const std::int32_t>(senescent_);
}

std::span<std::int32_t> DensityField::mutable_data(Channel c) {
  require_writable();
  return c == Channel::Adolescent ? std::span<std::int32_t>(adolescent_)
                                  : std::span<std::int32_t>(senescent_);
}

DensityField& DensityField::operator+=(const DensityField& other) {
  require_writable();
  if (other.x_cells_ != x_cells_ || other.t_cells_ != t_cells_ || other.cell_ != cell_ ||
      !(other.origin_ == origin_)) {
    throw std::invalid_argument("density fields have different grids");
  }
  simd::add_into(adolescent_, other.adolescent_);
  simd::add_into(senescent_, other.senescent_);
  return *this;
}

bool DensityField::operator==(const DensityField& other) const {
  return x_cells_ == other.x_cells_ && t_cells_ == other.t_cells_ && cell_ == other.cell_ &&
         origin_ == other.origin_ && periodic_ == other.periodic_ &&
         adolescent_ == other.adolescent_ && senescent_ == other.senescent_;
}

std::vector<std::int64_t> DensityField::time_profile(Channel c, int x_begin, int x_end) const {
  if (x_end < 0) x_end = x_cells_;
  x_begin = std::clamp(x_begin, 0, x_cells_);
  x_end = std::clamp(x_end, x_begin, x_cells_);
  const auto d = data(c);
  std::vector<std::int64_t> out(static_cast<std::size_t>(t_cells_), 0);
  for (int t = 0; t < t_cells_; ++t) {
    std::int64_t sum = 0;
    for (int x = x_begin; x < x_end; ++x) sum += d[index(x, t)];
    out[static_cast<std::size_t>(t)] = sum;
  }
  return out;
}

std::int64_t DensityField::total(Channel c) const {
  std::int64_t sum = 0;
  for (auto v : data(c)) sum += v;
  return sum;
}

namespace {

// Adds one envelope segment into raw channel buffers.
class SegmentWriter {
 public:
  SegmentWriter(DensityField& field, bool clip)
      : field_(field), clip_(clip), adolescent_(field.mutable_data(Channel::Adolescent)),
        senescent_(field.mutable_data(Channel::Senescent)) {}

  void add(const PathSegment& s) {
    const double eps = field_.cell_size();
    const Event o = field_.origin();
    const double t_a = std::min(s.start.t, s.end.t);
    const double t_b = std::max(s.start.t, s.end.t);
    if (!(t_b > t_a)) return;
    const double dxdt = (s.end.x - s.start.x) / (s.end.t - s.start.t);
    const auto k0 = static_cast<long long>(floor_snap((t_a - o.t) / eps));
    const auto k1 = static_cast<long long>(ceil_snap((t_b - o.t) / eps));
    auto& channel = s.species == Species::RightMover ? adolescent_ : senescent_;
    for (long long k = k0; k < k1; ++k) {
      const double lo = std::max(t_a, o.t + static_cast<double>(k) * eps);
      const double hi = std::min(t_b, o.t + static_cast<double>(k + 1) * eps);
      const double tm = 0.5 * (lo + hi);
      const double x = s.start.x + dxdt * (tm - s.start.t);
      auto kx = static_cast<long long>(floor_snap((x - o.x) / eps));
      if (field_.periodic_x()) {
        kx %= field_.x_cells();
        if (kx < 0) kx += field_.x_cells();
      }
      if (k < 0 || k >= field_.t_cells() || kx < 0 || kx >= field_.x_cells()) {
        if (clip_) continue;
        std::ostringstream msg;
        msg << "segment (" << s.start.x << ',' << s.start.t << ")->(" << s.end.x << ','
            << s.end.t << ") leaves the field at cell (" << kx << ',' << k << ')';
        throw OutOfBounds(msg.str());
      }
      channel[static_cast<std::size_t>(k) * static_cast<std::size_t>(field_.x_cells()) +
              static_cast<std::size_t>(kx)] += s.time_dir;
    }
  }

 private:
  DensityField& field_;
  bool clip_;
  std::span<std::int32_t> adolescent_;
  std::span<std::int32_t> senescent_;
};

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

DensityField zero_like(const DensityField& f) {
  return DensityField(f.x_cells(), f.t_cells(), f.cell_size(), f.origin(), f.periodic_x());
}

}  // namespace

void accumulate(DensityField& field, std::span<const PathSegment> envelope,
                const AccumulateOptions& options) {
  for (const auto& s : envelope) {
    if (s.provenance == Provenance::Unknown) throw MissingEnvelopeProvenance();
    if (s.provenance != Provenance::RightEnvelope) {
      throw std::invalid_argument("only right-envelope segments are counted");
    }
  }
  const std::size_t n = envelope.size();
  const int workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(options.threads)),
                            std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    SegmentWriter writer(field, options.clip);
    for (const auto& s : envelope) writer.add(s);
    return;
  }
  std::vector<DensityField> partial;
  partial.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) partial.push_back(zero_like(field));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  const std::size_t chunk = (n + workers - 1) / workers;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          SegmentWriter writer(partial[w], options.clip);
          const std::size_t b = std::min(n, chunk * w), e = std::min(n, b + chunk);
          for (std::size_t i = b; i < e; ++i) writer.add(envelope[i]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& p : partial) field += p;
}

void accumulate(DensityField& field, const EntwinedPath& path, const AccumulateOptions& options) {
  const std::size_t n = path.fiber_count();
  const int workers = static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(resolve_threads(options.threads)), std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    SegmentWriter writer(field, options.clip);
    path.for_each_envelope_segment(0, n, [&](const PathSegment& s) { writer.add(s); });
    return;
  }
  std::vector<DensityField> partial;
  partial.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) partial.push_back(zero_like(field));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  const std::size_t chunk = (n + workers - 1) / workers;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          SegmentWriter writer(partial[w], options.clip);
          const std::size_t b = std::min(n, chunk * w), e = std::min(n, b + chunk);
          path.for_each_envelope_segment(b, e, [&](const PathSegment& s) { writer.add(s); });
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& p : partial) field += p;
}

TimeProfile accumulate_time_profile(const EntwinedPath& path, double t0, int t_cells,
                                    double cell_size) {
  // A one-column periodic field folds every position into the same cell.
  DensityField column(1, t_cells, cell_size, {0.0, t0}, true);
  accumulate(column, path, {.clip = true, .threads = 1});
  TimeProfile p;
  p.adolescent = column.time_profile(Channel::Adolescent);
  p.senescent = column.time_profile(Channel::Senescent);
  return p;
}

double mod4(double t) {
  double m = std::fmod(t, 4.0);
  if (m < 0.0) m += 4.0;
  if (m >= 4.0) m = 0.0;
  return m;
}

namespace {

double u_a(double t) {
  const double m = mod4(t);
  if (m <= 1.0) return 1.0;
  if (m > 2.0 && m <= 3.0) return -1.0;
  return 0.0;
}

double w_a(double t) { return u_a(t) + u_a(t - 1.0); }

}  // namespace

double reference_eval(const ReferenceDensity& ref, double t) {
  switch (ref.kind) {
    case ReferenceDensity::Kind::UA: return u_a(t);
    case ReferenceDensity::Kind::US: return u_a(t - 1.0);
    case ReferenceDensity::Kind::WA: return w_a(t);
    case ReferenceDensity::Kind::DeltaA: return w_a(t) + w_a(t + 2.0 - ref.epsilon);
    case ReferenceDensity::Kind::Sinusoid:
      return ref.amplitude * std::sin(2.0 * std::numbers::pi * t / ref.period + ref.phase);
  }
  return 0.0;
}

Region steady_region(const DensityField& field, SteadyWindow window, int margin) {
  Region r;
  r.t_begin = field.t_cells();
  r.t_end = 0;
  for (int t = 0; t < field.t_cells(); ++t) {
    const double c = field.t_center(t);
    if (c >= window.begin && c <= window.end) {
      r.t_begin = std::min(r.t_begin, t);
      r.t_end = std::max(r.t_end, t + 1);
    }
  }
  r.t_begin += margin;
  r.t_end -= margin;
  if (r.t_end < r.t_begin) r.t_end = r.t_begin;
  return r;
}

ErrorReport compare(const DensityField& field, const ReferenceDensity& ref, Channel channel,
                    const Region& region) {
  const int t_begin = std::max(0, region.t_begin);
  const int t_end = std::min(field.t_cells(), region.t_end);
  if (t_end <= t_begin) throw std::invalid_argument("compare: empty region");
  const auto profile = field.time_profile(channel, region.x_begin, region.x_end);

  std::vector<double> t, y;
  for (int k = t_begin; k < t_end; ++k) {
    t.push_back(field.t_center(k));
    y.push_back(static_cast<double>(profile[static_cast<std::size_t>(k)]));
  }

  ReferenceDensity model = ref;
  ErrorReport report;
  if (ref.kind == ReferenceDensity::Kind::Sinusoid) {
    const double w0 = 2.0 * std::numbers::pi / ref.period;
    const auto f = fit::fit_sinusoid(t, y, 0.5 * w0, 1.5 * w0);
    // A cos(wt + p) = A sin(wt + p + pi/2)
    model = ReferenceDensity::sinusoid(f.amplitude, 2.0 * std::numbers::pi / f.omega,
                                       f.phase + std::numbers::pi / 2.0);
    report.fitted = SinusoidParams{model.amplitude, model.period, model.phase};
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = std::abs(y[i] - reference_eval(model, t[i]));
    report.l_inf = std::max(report.l_inf, d);
    sq += d * d;
  }
  report.rms = std::sqrt(sq / static_cast<double>(t.size()));
  return report;
}

int best_lag(std::span<const double> a, std::span<const double> b, int max_lag) {
  const auto n = static_cast<int>(std::min(a.size(), b.size()));
  int best = 0;
  double best_score = -INFINITY;
  for (int lag = 0; lag < max_lag && lag < n; ++lag) {
    const auto overlap = static_cast<std::size_t>(n - lag);
    const auto head = a.first(overlap);
    const auto tail = b.subspan(static_cast<std::size_t>(lag), overlap);
    const double norm = std::sqrt(simd::dot(head, head) * simd::dot(tail, tail));
    if (!(norm > 0.0)) continue;
    const double score = simd::dot(head, tail) / norm;
    if (score > best_score + 1e-12) {
      best_score = score;
      best = lag;
    }
  }
  return best;
}

void write_field(std::ostream& os, const DensityField& field) {
  os << "# epath density field v1\n";
  os << "x_cells=" << field.x_cells() << ",t_cells=" << field.t_cells()
     << ",cell_size=" << io::format_real(field.cell_size())
     << ",origin_x=" << io::format_real(field.origin().x)
     << ",origin_t=" << io::format_real(field.origin().t)
     << ",periodic_x=" << (field.periodic_x() ? 1 : 0) << '\n';
  for (Channel c : {Channel::Adolescent, Channel::Senescent}) {
    os << (c == Channel::Adolescent ? "[adolescent]\n" : "[senescent]\n");
    for (int t = 0; t < field.t_cells(); ++t) {
      for (int x = 0; x < field.x_cells(); ++x) {
        if (x) os << ',';
        os << field.at(c, x, t);
      }
      os << '\n';
    }
  }
}

DensityField read_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "# epath density field v1") {
    throw std::runtime_error("not an epath density field");
  }
  if (!std::getline(is, line)) throw std::runtime_error("missing field metadata");
  int x_cells = 0, t_cells = 0, periodic = 0;
  double cell = 0.0, ox = 0.0, ot = 0.0;
  std::istringstream meta(line);
  std::string item;
  while (std::getline(meta, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad metadata item: " + item);
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    if (key == "x_cells") x_cells = std::stoi(value);
    else if (key == "t_cells") t_cells = std::stoi(value);
    else if (key == "cell_size") cell = std::stod(value);
    else if (key == "origin_x") ox = std::stod(value);
    else if (key == "origin_t") ot = std::stod(value);
    else if (key == "periodic_x") periodic = std::stoi(value);
    else throw std::runtime_error("unknown metadata key: " + key);
  }
  DensityField field(x_cells, t_cells, cell, {ox, ot}, periodic != 0);
  for (Channel c : {Channel::Adolescent, Channel::Senescent}) {
    if (!std::getline(is, line)) throw std::runtime_error("missing channel header");
    auto d = field.mutable_data(c);
    std::size_t i = 0;
    for (int t = 0; t < t_cells; ++t) {
      if (!std::getline(is, line)) throw std::runtime_error("truncated field matrix");
      std::istringstream row(line);
      std::string cell_text;
      while (std::getline(row, cell_text, ',')) {
        if (i >= d.size()) throw std::runtime_error("field row too long");
        d[i++] = static_cast<std::int32_t>(std::stol(cell_text));
      }
    }
    if (i != d.size()) throw std::runtime_error("field matrix size mismatch");
  }
  return field;
}

}  // namespace epath
