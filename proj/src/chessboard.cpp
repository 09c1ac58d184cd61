#include "epath/chessboard.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <thread>

#include "epath/simd.hpp"

namespace epath::chessboard {

void ChessboardProblem::validate() const {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be positive");
  if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
  if (!(mass >= 0.0)) throw std::invalid_argument("mass must be non-negative");
}

bool ChessboardProblem::reachable() const {
  return std::abs(displacement) <= n_steps && (n_steps - displacement) % 2 == 0;
}

std::uint64_t CornerHistogram::total() const {
  std::uint64_t sum = 0;
  for (const auto& [r, n] : counts) sum += n;
  return sum;
}

std::uint64_t CornerHistogram::at(int corners) const {
  auto it = counts.find(corners);
  return it == counts.end() ? 0 : it->second;
}

EnumerationTooLarge::EnumerationTooLarge(int cap)
    : std::length_error("enumeration too large: n_steps exceeds the cap of " +
                        std::to_string(cap) + " steps"),
      cap_(cap) {}

namespace {

// Bit i of a sequence word is 1 when step i moves Left.
struct SequenceFilter {
  int n;
  std::uint64_t steps_mask;
  std::uint64_t pair_mask;  // bits 0..n-2: pair (i, i+1)
  int lefts_needed;
  int init_bit;
  int final_bit;  // -1 for Any
  bool incoming;
};

SequenceFilter make_filter(const ChessboardProblem& p) {
  SequenceFilter f{};
  f.n = p.n_steps;
  f.steps_mask = (f.n == 64) ? ~0ULL : ((1ULL << f.n) - 1);
  f.pair_mask = (f.n <= 1) ? 0ULL : ((1ULL << (f.n - 1)) - 1);
  f.lefts_needed = (p.n_steps - p.displacement) / 2;
  f.init_bit = p.initial_direction == Direction::Left ? 1 : 0;
  f.final_bit = p.final_direction == FinalDirection::Any ? -1
                : p.final_direction == FinalDirection::Left ? 1
                                                            : 0;
  f.incoming = p.incoming_corner;
  return f;
}

void count_range(const SequenceFilter& f, std::uint64_t begin, std::uint64_t end,
                 std::vector<std::uint64_t>& out) {
  for (std::uint64_t free_bits = begin; free_bits < end; ++free_bits) {
    const std::uint64_t word =
        f.incoming ? free_bits : ((free_bits << 1) | static_cast<std::uint64_t>(f.init_bit));
    if (std::popcount(word) != f.lefts_needed) continue;
    if (f.final_bit >= 0 && static_cast<int>((word >> (f.n - 1)) & 1ULL) != f.final_bit) continue;
    int corners = std::popcount((word ^ (word >> 1)) & f.pair_mask);
    if (f.incoming && static_cast<int>(word & 1ULL) != f.init_bit) ++corners;
    ++out[static_cast<std::size_t>(corners)];
  }
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

CornerHistogram enumerate_corner_histogram(const ChessboardProblem& problem,
                                           const EnumerationOptions& options) {
  problem.validate();
  if (problem.n_steps > options.cap || problem.n_steps > 62) {
    throw EnumerationTooLarge(options.cap);
  }
  CornerHistogram hist;
  if (!problem.reachable()) return hist;

  const SequenceFilter filter = make_filter(problem);
  const int free_count = problem.incoming_corner ? problem.n_steps : problem.n_steps - 1;
  const std::uint64_t total = 1ULL << free_count;
  const std::size_t bins = static_cast<std::size_t>(problem.n_steps) + 1;

  const int workers =
      static_cast<int>(std::min<std::uint64_t>(resolve_threads(options.threads), total));
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(bins, 0));
  const std::uint64_t chunk = (total + workers - 1) / workers;
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) {
      const std::uint64_t b = std::min(total, chunk * w);
      const std::uint64_t e = std::min(total, b + chunk);
      pool.emplace_back([&, b, e, w] { count_range(filter, b, e, partial[w]); });
    }
    count_range(filter, 0, std::min(total, chunk), partial[0]);
  }

  for (std::size_t r = 0; r < bins; ++r) {
    std::uint64_t sum = 0;
    for (const auto& p : partial) sum += p[r];
    if (sum != 0) hist.counts[static_cast<int>(r)] = sum;
  }
  return hist;
}

KernelValue kernel_corner_sum(const CornerHistogram& hist, double step_size, double mass) {
  const double a = step_size * mass;
  KernelValue k;
  for (const auto& [r, n] : hist.counts) {
    const double term = static_cast<double>(n) * std::pow(a, r);
    switch (r % 4) {
      case 0: k.phi_plus += term; break;
      case 1: k.phi_minus += term; break;
      case 2: k.phi_plus -= term; break;
      case 3: k.phi_minus -= term; break;
    }
  }
  if (!std::isfinite(k.phi_plus) || !std::isfinite(k.phi_minus)) {
    throw KernelOverflow("chessboard corner sum overflowed double precision");
  }
  return k;
}

ExactKernelValue kernel_corner_sum_exact(const CornerHistogram& hist, const Rational& eps_m) {
  ExactKernelValue k;
  for (const auto& [r, n] : hist.counts) {
    Rational power = 1;
    for (int i = 0; i < r; ++i) power *= eps_m;
    const Rational term = Rational(n) * power;
    switch (r % 4) {
      case 0: k.phi_plus += term; break;
      case 1: k.phi_minus += term; break;
      case 2: k.phi_plus -= term; break;
      case 3: k.phi_minus -= term; break;
    }
  }
  return k;
}

namespace {

// Position p in the state arrays stands for lattice displacement p - offset.
struct SplitState {
  std::vector<double> r_re, r_im, l_re, l_im;
  explicit SplitState(std::size_t size) : r_re(size), r_im(size), l_re(size), l_im(size) {}
};

KernelValue select(const SplitState& s, std::size_t cell, FinalDirection final_dir) {
  KernelValue k;
  if (final_dir != FinalDirection::Left) {
    k.phi_plus += s.r_re[cell];
    k.phi_minus += s.r_im[cell];
  }
  if (final_dir != FinalDirection::Right) {
    k.phi_plus += s.l_re[cell];
    k.phi_minus += s.l_im[cell];
  }
  return k;
}

// Runs the hop recurrence and calls visit(step, state, offset) after every step.
template <typename Visit>
void run_transfer(int n_steps, double a, Direction initial, bool incoming, Visit&& visit) {
  const std::size_t offset = static_cast<std::size_t>(n_steps) + 1;
  const std::size_t size = 2 * offset + 1;
  SplitState cur(size), next(size);
  if (initial == Direction::Right) {
    cur.r_re[offset] = 1.0;
  } else {
    cur.l_re[offset] = 1.0;
  }
  const auto& k = simd::active();
  for (int step = 1; step <= n_steps; ++step) {
    const double hop = (step == 1 && !incoming) ? 0.0 : a;
    k.transfer_step(size, hop, cur.r_re.data(), cur.r_im.data(), cur.l_re.data(),
                    cur.l_im.data(), next.r_re.data(), next.r_im.data(), next.l_re.data(),
                    next.l_im.data());
    std::swap(cur, next);
    visit(step, cur, offset);
  }
}

}  // namespace

KernelValue kernel_transfer_matrix(const ChessboardProblem& problem) {
  problem.validate();
  KernelValue result;
  if (std::abs(problem.displacement) > problem.n_steps) return result;
  run_transfer(problem.n_steps, problem.step_size * problem.mass, problem.initial_direction,
               problem.incoming_corner, [&](int step, const SplitState& s, std::size_t offset) {
                 if (step == problem.n_steps) {
                   const auto cell = static_cast<std::size_t>(
                       static_cast<std::ptrdiff_t>(offset) + problem.displacement);
                   result = select(s, cell, problem.final_direction);
                 }
               });
  if (!std::isfinite(result.phi_plus) || !std::isfinite(result.phi_minus)) {
    throw KernelOverflow("chessboard transfer operator overflowed double precision");
  }
  return result;
}

ExactKernelValue kernel_transfer_matrix_exact(const ChessboardProblem& problem,
                                              const Rational& eps_m) {
  problem.validate();
  ExactKernelValue result;
  if (std::abs(problem.displacement) > problem.n_steps) return result;

  struct Amp {
    Rational re, im;
  };
  const int n = problem.n_steps;
  const std::size_t offset = static_cast<std::size_t>(n) + 1;
  const std::size_t size = 2 * offset + 1;
  std::vector<Amp> right(size), left(size), next_right(size), next_left(size);
  (problem.initial_direction == Direction::Right ? right : left)[offset].re = 1;

  for (int step = 1; step <= n; ++step) {
    const Rational a = (step == 1 && !problem.incoming_corner) ? Rational(0) : eps_m;
    for (std::size_t p = 0; p < size; ++p) {
      next_right[p] = {};
      next_left[p] = {};
      if (p >= 1) {
        next_right[p].re = right[p - 1].re - a * left[p - 1].im;
        next_right[p].im = right[p - 1].im + a * left[p - 1].re;
      }
      if (p + 1 < size) {
        next_left[p].re = left[p + 1].re - a * right[p + 1].im;
        next_left[p].im = left[p + 1].im + a * right[p + 1].re;
      }
    }
    std::swap(right, next_right);
    std::swap(left, next_left);
  }

  const auto cell =
      static_cast<std::size_t>(static_cast<std::ptrdiff_t>(offset) + problem.displacement);
  if (problem.final_direction != FinalDirection::Left) {
    result.phi_plus += right[cell].re;
    result.phi_minus += right[cell].im;
  }
  if (problem.final_direction != FinalDirection::Right) {
    result.phi_plus += left[cell].re;
    result.phi_minus += left[cell].im;
  }
  return result;
}

std::vector<PhasePoint> kernel_phase_series(double t_max, double step_size, double mass,
                                            Direction initial, FinalDirection final_dir) {
  if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
  if (!(mass >= 0.0)) throw std::invalid_argument("mass must be non-negative");
  if (!(step_size * mass < 1.0)) throw std::invalid_argument("step_size * mass must be below 1");
  const int n_steps = static_cast<int>(std::floor(t_max / step_size + 1e-9));
  std::vector<PhasePoint> series;
  if (n_steps < 1) return series;
  series.reserve(static_cast<std::size_t>(n_steps));
  run_transfer(n_steps, step_size * mass, initial, false,
               [&](int step, const SplitState& s, std::size_t offset) {
                 series.push_back({step * step_size, step, select(s, offset, final_dir)});
               });
  return series;
}

Rational to_rational(double value, std::int64_t max_denominator) {
  if (!std::isfinite(value)) throw std::invalid_argument("cannot convert non-finite value");
  const bool negative = value < 0;
  double x = std::abs(value);
  // Continued-fraction convergents.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    const double floor_x = std::floor(x);
    const auto a = static_cast<std::int64_t>(floor_x);
    const std::int64_t h2 = a * h1 + h0;
    const std::int64_t k2 = a * k1 + k0;
    if (k2 > max_denominator) break;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    const double frac = x - floor_x;
    if (frac < 1e-12 || std::abs(static_cast<double>(h1) / static_cast<double>(k1) -
                                 std::abs(value)) < 1e-15 * std::max(1.0, std::abs(value))) {
      break;
    }
    x = 1.0 / frac;
  }
  Rational r(h1, k1);
  return negative ? Rational(-r) : r;
}

}  // namespace epath::chessboard
