#include "epath/ring.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>
#include <thread>
#include <vector>

#include "epath/io.hpp"
#include "epath/simd.hpp"

namespace epath::ring {

double eigen_speed(int k, double mass, double circumference) {
  if (k < 1) throw std::invalid_argument("mode k must be at least 1");
  if (!(mass > 0.0) || !(circumference > 0.0)) {
    throw std::invalid_argument("mass and circumference must be positive");
  }
  const double v = 2.0 * std::numbers::pi * k / (mass * circumference);
  if (!(v < 1.0)) throw RelativisticEigenSpeed();
  return v;
}

double ring_eigen_speed(const RingSpec& spec, const LatticeSpec& lattice) {
  return eigen_speed(spec.mode, lattice.mass, spec.circumference * lattice.time_unit());
}

double carrier_period(double v) { return LatticeSpec::kPeriod / (1.0 - 0.5 * v * v); }

namespace {

struct Lane {
  double x0;
  double drift;
  double phase;
};

}  // namespace

DensityField run_ring(const RingSpec& spec, const LatticeSpec& lattice, int amplitude_m,
                      const RunOptions& options) {
  lattice.validate();
  if (spec.v < 0.0) throw std::invalid_argument("ring speed must be non-negative");
  if (!(spec.v < 1.0)) throw SuperluminalDrift();
  if (spec.cycles < 1) throw std::invalid_argument("cycles must be positive");
  if (amplitude_m < 1) throw std::invalid_argument("M must be at least 1");
  const double eps = lattice.epsilon();
  const double cells = spec.circumference / eps;
  const double x_cells = std::round(cells);
  if (std::abs(cells - x_cells) > 1e-9 || x_cells < 2) {
    throw std::invalid_argument("circumference must be a whole number (>= 2) of cells");
  }
  const int n_x = static_cast<int>(x_cells);

  const double s = 1.0 / (1.0 - 0.5 * spec.v * spec.v);
  const double omega = LatticeSpec::kCarrierOmega / s;
  const double period = LatticeSpec::kPeriod * s;
  const double duration = spec.cycles * period;
  const int n_t = static_cast<int>(std::ceil(duration / eps - 1e-9));
  const double momentum = LatticeSpec::kCarrierOmega * spec.v;
  const double lead = s * ((lattice.n - 1) * eps + 3.0 + eps);

  std::vector<Lane> lanes;
  lanes.reserve(2 * static_cast<std::size_t>(n_x));
  for (int family : {+1, -1}) {
    for (int j = 0; j < n_x; ++j) {
      const double x0 = (spec.write_origin + j) * eps;
      double phase = family * momentum * (j * eps);
      if (family < 0) phase -= std::numbers::pi / 2.0;
      lanes.push_back({x0, family * spec.v, phase});
    }
  }

  std::vector<TimeProfile> profiles(lanes.size());
  std::vector<std::exception_ptr> errors(lanes.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < lanes.size(); i = next++) {
      try {
        const Lane& lane = lanes[i];
        // Cable density ~ sin(omega (t - t0)); lane wants cos(omega t - phase).
        double t0 = (lane.phase - std::numbers::pi / 2.0) / omega;
        t0 -= period * std::ceil((t0 + lead) / period);
        CableOptions cable;
        cable.periods = static_cast<int>(std::ceil((duration - t0) / period)) + 1;
        cable.drift = lane.drift;
        cable.scale = s;
        const EntwinedPath path =
            build_cable({lane.x0 + lane.drift * t0, t0}, lattice, amplitude_m, cable);
        profiles[i] = accumulate_time_profile(path, 0.0, n_t, eps);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::max(
      1, options.threads > 0 ? options.threads
                             : static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  DensityField field(n_x, n_t, eps, {0.0, 0.0}, true);
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const Lane& lane = lanes[i];
    for (int k = 0; k < n_t; ++k) {
      const double x = lane.x0 + lane.drift * field.t_center(k);
      auto col = static_cast<long long>(std::floor(x / eps + 1e-9)) % n_x;
      if (col < 0) col += n_x;
      const auto row = static_cast<std::size_t>(k);
      field.at(Channel::Adolescent, static_cast<int>(col), k) +=
          static_cast<std::int32_t>(profiles[i].adolescent[row]);
      field.at(Channel::Senescent, static_cast<int>(col), k) +=
          static_cast<std::int32_t>(profiles[i].senescent[row]);
    }
  }
  return field;
}

StandingWaveMetrics standing_wave_metrics(const DensityField& field, double period) {
  const int n_x = field.x_cells();
  const int n_t = field.t_cells();
  const auto data = field.data(Channel::Adolescent);
  if (std::all_of(data.begin(), data.end(), [](std::int32_t v) { return v == 0; })) {
    throw std::invalid_argument("standing wave metrics need a non-zero field");
  }

  std::vector<std::vector<double>> cos_table(n_x), sin_table(n_x);
  for (int q = 0; q < n_x; ++q) {
    cos_table[q].resize(n_x);
    sin_table[q].resize(n_x);
    for (int x = 0; x < n_x; ++x) {
      const double a = 2.0 * std::numbers::pi * q * x / n_x;
      cos_table[q][x] = std::cos(a);
      sin_table[q][x] = std::sin(a);
    }
  }

  // coeff[t][q] = sum_x d e^{-2 pi i q x / N}
  std::vector<std::vector<std::pair<double, double>>> coeff(n_t);
  std::vector<double> power(n_x, 0.0);
  std::vector<double> row(n_x);
  for (int t = 0; t < n_t; ++t) {
    for (int x = 0; x < n_x; ++x) row[x] = field.at(Channel::Adolescent, x, t);
    coeff[t].resize(n_x);
    for (int q = 0; q < n_x; ++q) {
      const double re = simd::dot(row, cos_table[q]);
      const double im = -simd::dot(row, sin_table[q]);
      coeff[t][q] = {re, im};
      power[q] += (re * re + im * im) / n_t;
    }
  }

  StandingWaveMetrics m;
  double best = -1.0;
  for (int q = 0; q <= n_x / 2; ++q) {
    if (power[q] > best * (1.0 + 1e-12)) {
      best = power[q];
      m.dominant_mode = q;
    }
  }
  double total = 0.0;
  for (double p : power) total += p;
  const int k = m.dominant_mode;
  const bool self_conjugate = k == 0 || 2 * k == n_x;
  m.mode_purity = (self_conjugate ? power[k] : power[k] + power[n_x - k]) / total;
  if (k == 0) return m;

  // Axis angle of c_k, i.e. arg(c_k^2) / 2, unwrapped across rows.
  double max_row_power = 0.0;
  for (int t = 0; t < n_t; ++t) {
    const auto [re, im] = coeff[t][k];
    max_row_power = std::max(max_row_power, re * re + im * im);
  }
  std::vector<double> ts, angles, weights;
  double previous = 0.0, offset = 0.0;
  bool first = true;
  for (int t = 0; t < n_t; ++t) {
    const auto [re, im] = coeff[t][k];
    const double w = re * re + im * im;
    if (w < 1e-3 * max_row_power) continue;
    const double doubled = std::atan2(2.0 * re * im, re * re - im * im);
    if (!first) {
      while (doubled + offset - previous > std::numbers::pi) offset -= 2.0 * std::numbers::pi;
      while (doubled + offset - previous < -std::numbers::pi) offset += 2.0 * std::numbers::pi;
    }
    first = false;
    previous = doubled + offset;
    ts.push_back(field.t_center(t));
    angles.push_back(0.5 * previous);
    weights.push_back(w);
  }
  if (ts.size() < 2) return m;

  double sw = 0.0, st = 0.0, sa = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sw += weights[i];
    st += weights[i] * ts[i];
    sa += weights[i] * angles[i];
  }
  const double t_mean = st / sw, a_mean = sa / sw;
  double stt = 0.0, sta = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += weights[i] * (ts[i] - t_mean) * (ts[i] - t_mean);
    sta += weights[i] * (ts[i] - t_mean) * (angles[i] - a_mean);
  }
  const double slope = stt > 0.0 ? sta / stt : 0.0;  // rad per unit time
  m.phase_drift = slope * period * n_x / (2.0 * std::numbers::pi * k);
  return m;
}

void write_metrics(std::ostream& os, const StandingWaveMetrics& m) {
  os << "dominant_mode,phase_drift,mode_purity\n"
     << m.dominant_mode << ',' << io::format_real(m.phase_drift) << ','
     << io::format_real(m.mode_purity) << '\n';
}

}  // namespace epath::ring
