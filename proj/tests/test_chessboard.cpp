#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>

#include "epath/chessboard.hpp"

using namespace epath::chessboard;

namespace {

// Independent oracle: recursive walk over every step sequence.
std::map<int, std::uint64_t> brute_force(const ChessboardProblem& p) {
  std::map<int, std::uint64_t> out;
  const int init = p.initial_direction == Direction::Right ? 1 : -1;
  auto walk = [&](auto&& self, int step, int pos, int last, int corners) -> void {
    if (step == p.n_steps) {
      if (pos != p.displacement) return;
      if (p.final_direction == FinalDirection::Right && last != 1) return;
      if (p.final_direction == FinalDirection::Left && last != -1) return;
      ++out[corners];
      return;
    }
    for (int dir : {1, -1}) self(self, step + 1, pos + dir, dir, corners + (dir != last));
  };
  if (p.incoming_corner) {
    walk(walk, 0, 0, init, 0);
  } else {
    walk(walk, 1, init, init, 0);
  }
  return out;
}

std::complex<double> oracle_kernel(const std::map<int, std::uint64_t>& hist, double eps_m) {
  std::complex<double> k = 0.0;
  for (const auto& [r, n] : hist) k += static_cast<double>(n) * std::pow(std::complex<double>(0, eps_m), r);
  return k;
}

ChessboardProblem problem(int steps, int d, double eps_m, Direction init, FinalDirection fin) {
  ChessboardProblem p;
  p.n_steps = steps;
  p.displacement = d;
  p.step_size = 0.1;
  p.mass = eps_m / 0.1;
  p.initial_direction = init;
  p.final_direction = fin;
  return p;
}

}  // namespace

TEST_CASE("histogram matches brute force for small problems") {
  for (int steps = 1; steps <= 10; ++steps) {
    for (int d = -steps; d <= steps; d += 2) {
      for (auto init : {Direction::Right, Direction::Left}) {
        for (auto fin : {FinalDirection::Any, FinalDirection::Right, FinalDirection::Left}) {
          for (bool incoming : {false, true}) {
            auto p = problem(steps, d, 0.1, init, fin);
            p.incoming_corner = incoming;
            CAPTURE(steps);
            CAPTURE(d);
            CHECK(enumerate_corner_histogram(p).counts == brute_force(p));
          }
        }
      }
    }
  }
}

TEST_CASE("three straight steps right have no corners") {
  const auto p = problem(3, 3, 0.1, Direction::Right, FinalDirection::Any);
  const auto h = enumerate_corner_histogram(p);
  CHECK(h.total() == 1);
  CHECK(h.at(0) == 1);
  const auto k = kernel_corner_sum(h, p.step_size, p.mass);
  CHECK(k.phi_plus == 1.0);
  CHECK(k.phi_minus == 0.0);
}

TEST_CASE("unreachable displacement gives an empty histogram") {
  const auto p = problem(4, 1, 0.1, Direction::Right, FinalDirection::Any);
  CHECK_FALSE(p.reachable());
  CHECK(enumerate_corner_histogram(p).total() == 0);
  const auto k = kernel_transfer_matrix(p);
  CHECK(k.phi_plus == 0.0);
  CHECK(k.phi_minus == 0.0);
}

TEST_CASE("histogram totals count every admissible path") {
  // With the first step fixed, paths of n steps with displacement d number C(n-1, (n+d-2)/2).
  const auto p = problem(12, 2, 0.1, Direction::Right, FinalDirection::Any);
  CHECK(enumerate_corner_histogram(p).total() == 462);  // C(11, 6)
}

TEST_CASE("corner sum agrees with the complex oracle and the transfer operator") {
  for (double eps_m : {0.05, 0.1, 0.3}) {
    for (int d = -9; d <= 9; d += 2) {
      const auto p = problem(9, d, eps_m, Direction::Left, FinalDirection::Any);
      const auto k = kernel_corner_sum(enumerate_corner_histogram(p), p.step_size, p.mass);
      const auto ref = oracle_kernel(brute_force(p), eps_m);
      const auto t = kernel_transfer_matrix(p);
      CHECK(k.phi_plus == doctest::Approx(ref.real()).epsilon(1e-13));
      CHECK(k.phi_minus == doctest::Approx(ref.imag()).epsilon(1e-13));
      CHECK(std::abs(t.phi_plus - k.phi_plus) <= 1e-12);
      CHECK(std::abs(t.phi_minus - k.phi_minus) <= 1e-12);
    }
  }
}

TEST_CASE("exact corner sum equals exact transfer operator") {
  for (double eps_m : {0.05, 0.1, 0.3}) {
    const Rational q = to_rational(eps_m);
    for (int d = -12; d <= 12; d += 2) {
      for (auto fin : {FinalDirection::Any, FinalDirection::Right, FinalDirection::Left}) {
        const auto p = problem(12, d, eps_m, Direction::Right, fin);
        CHECK(kernel_corner_sum_exact(enumerate_corner_histogram(p), q) ==
              kernel_transfer_matrix_exact(p, q));
      }
    }
  }
}

TEST_CASE("to_rational recovers decimal literals") {
  CHECK(to_rational(0.05) == Rational(1, 20));
  CHECK(to_rational(0.3) == Rational(3, 10));
  CHECK(to_rational(-0.25) == Rational(-1, 4));
}

TEST_CASE("single-corner-count histograms land in the right component") {
  for (int r = 0; r <= 7; ++r) {
    CornerHistogram h;
    h.counts[r] = 1;
    const ExactKernelValue k = kernel_corner_sum_exact(h, Rational(1, 3));
    Rational mag = 1;
    for (int i = 0; i < r; ++i) mag /= 3;
    if (r % 2 == 0) {
      CHECK(k.phi_minus == 0);
      CHECK(k.phi_plus == ((r / 2) % 2 == 0 ? mag : Rational(-mag)));
    } else {
      CHECK(k.phi_plus == 0);
      CHECK(k.phi_minus == (((r - 1) / 2) % 2 == 0 ? mag : Rational(-mag)));
    }
  }
}

TEST_CASE("enumeration is independent of the worker count") {
  const auto p = problem(18, 4, 0.1, Direction::Right, FinalDirection::Left);
  const auto one = enumerate_corner_histogram(p, {24, 1});
  CHECK(enumerate_corner_histogram(p, {24, 8}) == one);
  CHECK(enumerate_corner_histogram(p, {24, 3}) == one);
}

TEST_CASE("enumeration past the cap is refused") {
  const auto p = problem(25, 1, 0.1, Direction::Right, FinalDirection::Any);
  CHECK_THROWS_AS(enumerate_corner_histogram(p), EnumerationTooLarge);
  try {
    enumerate_corner_histogram(p, {20, 1});
  } catch (const EnumerationTooLarge& e) {
    CHECK(e.cap() == 20);
    CHECK(std::string(e.what()).find("enumeration too large") != std::string::npos);
  }
}

TEST_CASE("invalid problems are rejected") {
  auto p = problem(0, 0, 0.1, Direction::Right, FinalDirection::Any);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = problem(4, 0, 0.1, Direction::Right, FinalDirection::Any);
  p.step_size = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("huge corner weights overflow loudly") {
  CornerHistogram h;
  h.counts[400] = 1;
  CHECK_THROWS_AS(kernel_corner_sum(h, 1.0, 1e3), KernelOverflow);
}

TEST_CASE("phase series starts at a quarter turn and advances") {
  const auto s = kernel_phase_series(1.0, 0.05, 1.0, Direction::Right, FinalDirection::Any);
  REQUIRE(s.size() >= 20);
  CHECK(s[0].value.phi_plus == 0.0);  // one step cannot reach x = 0
  const auto& first = s[1];
  CHECK(first.steps == 2);
  CHECK(std::arg(std::complex<double>(first.value.phi_plus, first.value.phi_minus)) ==
        doctest::Approx(M_PI / 2));
  double prev = -10.0;
  for (std::size_t i = 1; i < s.size(); i += 2) {
    const double a = std::arg(std::complex<double>(s[i].value.phi_plus, s[i].value.phi_minus));
    CHECK(a > prev);
    prev = a;
  }
  CHECK_THROWS(kernel_phase_series(1.0, 0.5, 2.0));
}

TEST_CASE("phase series approaches the Bessel continuum limit") {
  // Per unit step: Phi_RR(0, t) -> -m J1(m t), Phi_RL(0, t) -> m J0(m t).
  const double m = 2.0, t = 1.5;
  auto scaled = [&](double eps, FinalDirection fin) {
    const auto p = kernel_phase_series(t, eps, m, Direction::Right, fin).back();
    REQUIRE(p.t == doctest::Approx(t));
    return (fin == FinalDirection::Right ? p.value.phi_plus : p.value.phi_minus) / eps;
  };
  const double rr_exact = -m * std::cyl_bessel_j(1.0, m * t);
  const double rl_exact = m * std::cyl_bessel_j(0.0, m * t);
  for (auto [fin, exact] : {std::pair{FinalDirection::Right, rr_exact},
                            std::pair{FinalDirection::Left, rl_exact}}) {
    const double coarse = scaled(0.005, fin), fine = scaled(0.0025, fin);
    const double richardson = 2.0 * fine - coarse;
    CHECK(std::abs(fine - exact) < std::abs(coarse - exact));
    CHECK(std::abs(richardson - exact) < 0.25 * std::abs(fine - exact));
    CHECK(std::abs(richardson - exact) < 5e-4);
  }
}
