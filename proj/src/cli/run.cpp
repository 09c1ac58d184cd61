#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "epath/chessboard.hpp"
#include "epath/cli.hpp"
#include "epath/density.hpp"
#include "epath/io.hpp"
#include "epath/propagator.hpp"
#include "epath/ring.hpp"

namespace epath::cli {

namespace fs = std::filesystem;
using io::format_real;

namespace {

using Files = std::vector<std::pair<std::string, std::string>>;  // name, contents

std::string rational_text(const chessboard::Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

Files run_chessboard(const RunConfig& cfg) {
  using namespace chessboard;
  const int steps = cfg.get_int("chessboard.n_steps");
  const double step_size = cfg.get_real("chessboard.step_size");
  const std::string initial = cfg.get("chessboard.initial");
  const std::string final_dir = cfg.get("chessboard.final");
  const EnumerationOptions enum_options{cfg.get_int("chessboard.cap"), cfg.threads()};
  const bool exact = steps <= 14;

  std::vector<Direction> inits;
  if (initial != "left") inits.push_back(Direction::Right);
  if (initial != "right") inits.push_back(Direction::Left);
  std::vector<FinalDirection> finals;
  if (final_dir == "any" || final_dir == "all") finals.push_back(FinalDirection::Any);
  if (final_dir == "right" || final_dir == "all") finals.push_back(FinalDirection::Right);
  if (final_dir == "left" || final_dir == "all") finals.push_back(FinalDirection::Left);
  auto init_name = [](Direction d) { return d == Direction::Right ? "right" : "left"; };
  auto final_name = [](FinalDirection d) {
    return d == FinalDirection::Any ? "any" : d == FinalDirection::Right ? "right" : "left";
  };

  std::ostringstream table, hist_out, summary;
  table << "eps_m,n_steps,displacement,initial,final,paths,enum_phi_plus,enum_phi_minus,"
           "transfer_phi_plus,transfer_phi_minus,exact_phi_plus,exact_phi_minus,max_abs_diff,"
           "exact_agree\n";
  hist_out << "initial,final,displacement,corners,paths\n";

  double worst = 0.0;
  bool all_exact = true;
  std::size_t rows = 0;
  bool hist_written = false;
  for (double eps_m : cfg.get_real_list("chessboard.eps_m")) {
    for (Direction init : inits) {
      for (FinalDirection fin : finals) {
        for (int d = -steps; d <= steps; d += 2) {
          ChessboardProblem p;
          p.n_steps = steps;
          p.displacement = d;
          p.step_size = step_size;
          p.mass = eps_m / step_size;
          p.initial_direction = init;
          p.final_direction = fin;
          const auto hist = enumerate_corner_histogram(p, enum_options);
          const auto by_corners = kernel_corner_sum(hist, p.step_size, p.mass);
          const auto by_transfer = kernel_transfer_matrix(p);
          double diff = std::max(std::abs(by_corners.phi_plus - by_transfer.phi_plus),
                                 std::abs(by_corners.phi_minus - by_transfer.phi_minus));
          std::string ex_plus = "NA", ex_minus = "NA", agree = "NA";
          if (exact) {
            const Rational q = to_rational(eps_m);
            const auto a = kernel_corner_sum_exact(hist, q);
            const auto b = kernel_transfer_matrix_exact(p, q);
            ex_plus = rational_text(a.phi_plus);
            ex_minus = rational_text(a.phi_minus);
            agree = a == b ? "true" : "false";
            all_exact = all_exact && a == b;
            diff = std::max({diff,
                             std::abs(by_corners.phi_plus - a.phi_plus.convert_to<double>()),
                             std::abs(by_corners.phi_minus - a.phi_minus.convert_to<double>())});
          }
          worst = std::max(worst, diff);
          ++rows;
          table << format_real(eps_m) << ',' << steps << ',' << d << ',' << init_name(init) << ','
                << final_name(fin) << ',' << hist.total() << ','
                << format_real(by_corners.phi_plus) << ',' << format_real(by_corners.phi_minus)
                << ',' << format_real(by_transfer.phi_plus) << ','
                << format_real(by_transfer.phi_minus) << ',' << ex_plus << ',' << ex_minus << ','
                << format_real(diff) << ',' << agree << '\n';
          if (!hist_written) {
            for (const auto& [r, count] : hist.counts) {
              hist_out << init_name(init) << ',' << final_name(fin) << ',' << d << ',' << r << ','
                       << count << '\n';
            }
          }
        }
      }
    }
    hist_written = true;
  }
  summary << "experiment = chessboard\n"
          << "rows = " << rows << "\n"
          << "max_abs_diff = " << format_real(worst) << "\n"
          << "exact_checked = " << (exact ? "true" : "false") << "\n"
          << "exact_all_agree = " << (exact ? (all_exact ? "true" : "false") : "NA") << "\n";
  return {{"kernel_table.csv", table.str()},
          {"histograms.csv", hist_out.str()},
          {"summary.txt", summary.str()}};
}

Files run_carrier(const RunConfig& cfg) {
  const LatticeSpec lattice{cfg.get_int("lattice.n"), cfg.get_real("lattice.mass_scale")};
  const int M = cfg.get_int("construction.M");
  CableOptions options;
  options.periods = cfg.get_int("carrier.periods");
  const EntwinedPath cable = build_cable({0.0, 0.0}, lattice, M, options);
  const double eps = lattice.epsilon();

  double t_end = 0.0;
  for (const auto& f : cable.fibers()) t_end = std::max(t_end, f.origin.t + LatticeSpec::kPeriod * f.scale);
  DensityField field = DensityField::covering(0.0, 1.0, 0.0, t_end, eps);
  accumulate(field, cable, {cfg.get_bool("clip"), cfg.threads()});
  field.seal();

  const Region steady = steady_region(field, cable.steady_window());
  const auto report = compare(field, ReferenceDensity::sinusoid(2.0 * M, LatticeSpec::kPeriod),
                              Channel::Adolescent, steady);
  const auto adol = field.time_profile(Channel::Adolescent);
  const auto sen = field.time_profile(Channel::Senescent);
  std::vector<double> a(adol.begin() + steady.t_begin, adol.begin() + steady.t_end);
  std::vector<double> s(sen.begin() + steady.t_begin, sen.begin() + steady.t_end);
  const int lag = best_lag(a, s, 2 * lattice.n);

  std::ostringstream density, fit, summary;
  write_field(density, field);
  fit << "n,M,periods,fitted_period,fitted_amplitude,fitted_phase,rms_residual,relative_rms,"
         "lag_cells,expected_lag_cells,steady_t_begin,steady_t_end\n";
  const double rel = report.rms / (report.fitted->amplitude / std::sqrt(2.0));
  fit << lattice.n << ',' << M << ',' << options.periods << ','
      << format_real(report.fitted->period) << ',' << format_real(report.fitted->amplitude) << ','
      << format_real(report.fitted->phase) << ',' << format_real(report.rms) << ','
      << format_real(rel) << ',' << lag << ',' << format_real(lattice.n / 2.0) << ','
      << format_real(cable.steady_window().begin) << ',' << format_real(cable.steady_window().end)
      << '\n';
  summary << "experiment = carrier\n"
          << "fibers = " << cable.fiber_count() << "\n"
          << "fitted_period = " << format_real(report.fitted->period) << "\n"
          << "period_error = " << format_real(std::abs(report.fitted->period - 4.0)) << "\n"
          << "epsilon = " << format_real(eps) << "\n"
          << "relative_rms = " << format_real(rel) << "\n"
          << "lag_cells = " << lag << "\n";
  Files files{{"cable_density.txt", density.str()},
              {"carrier_fit.csv", fit.str()},
              {"summary.txt", summary.str()}};
  if (cfg.get_bool("carrier.dump_path")) {
    std::ostringstream dump;
    write_path_dump(dump, cable);
    files.emplace_back("cable_path.csv", dump.str());
  }
  return files;
}

Files run_propagate(const RunConfig& cfg) {
  propagator::RegionSpec region;
  region.lattice = {cfg.get_int("lattice.n"), cfg.get_real("lattice.mass_scale")};
  region.x_min = cfg.get_real("propagate.x_min");
  region.x_max = cfg.get_real("propagate.x_max");
  region.t_min = cfg.get_real("propagate.t_min");
  region.t_max = cfg.get_real("propagate.t_max");
  region.ray_fan = cfg.get_real_list("propagate.rays");
  auto result = propagator::write_region(region, cfg.get_int("construction.M"), {cfg.threads()});
  result.field.seal();

  std::ostringstream density, report, summary;
  write_field(density, result.field);
  propagator::write_report(report, result.rays);
  double worst = 0.0;
  for (const auto& r : result.rays) worst = std::max(worst, r.relative_error);
  summary << "experiment = propagate\n"
          << "rays = " << result.rays.size() << "\n"
          << "max_relative_frequency_error = " << format_real(worst) << "\n";
  return {{"region_density.txt", density.str()},
          {"ray_report.csv", report.str()},
          {"summary.txt", summary.str()}};
}

Files run_ring(const RunConfig& cfg) {
  const LatticeSpec lattice{cfg.get_int("lattice.n"), cfg.get_real("lattice.mass_scale")};
  ring::RingSpec spec;
  spec.circumference = cfg.get_real("ring.circumference");
  spec.mode = cfg.get_int("ring.mode");
  spec.cycles = cfg.get_int("ring.cycles");
  spec.write_origin = cfg.get_int("ring.write_origin");
  const double base =
      cfg.get("ring.v") == "eigen" ? ring::ring_eigen_speed(spec, lattice) : cfg.get_real("ring.v");
  spec.v = base * cfg.get_real("ring.speed_factor");
  DensityField field =
      ring::run_ring(spec, lattice, cfg.get_int("construction.M"), {cfg.threads()});
  field.seal();
  const auto metrics = ring::standing_wave_metrics(field, ring::carrier_period(spec.v));

  std::ostringstream density, record, summary;
  write_field(density, field);
  ring::write_metrics(record, metrics);
  summary << "experiment = ring\n"
          << "v = " << format_real(spec.v) << "\n"
          << "dominant_mode = " << metrics.dominant_mode << "\n"
          << "phase_drift = " << format_real(metrics.phase_drift) << "\n"
          << "mode_purity = " << format_real(metrics.mode_purity) << "\n";
  return {{"ring_density.txt", density.str()},
          {"ring_metrics.csv", record.str()},
          {"summary.txt", summary.str()}};
}

}  // namespace

std::vector<std::string> artifact_names(Experiment experiment) {
  switch (experiment) {
    case Experiment::Chessboard: return {"kernel_table.csv", "histograms.csv", "summary.txt"};
    case Experiment::Carrier: return {"cable_density.txt", "carrier_fit.csv", "summary.txt"};
    case Experiment::Propagate: return {"region_density.txt", "ray_report.csv", "summary.txt"};
    case Experiment::Ring: return {"ring_density.txt", "ring_metrics.csv", "summary.txt"};
  }
  return {};
}

int run(const RunConfig& config, std::ostream& log) {
  const auto diags = validate(config);
  if (!diags.empty()) {
    for (const auto& d : diags) log << "error: " << d.key << ": " << d.message << '\n';
    return 2;
  }
  try {
    const Experiment experiment = config.experiment();
    Files files;
    switch (experiment) {
      case Experiment::Chessboard: files = run_chessboard(config); break;
      case Experiment::Carrier: files = run_carrier(config); break;
      case Experiment::Propagate: files = run_propagate(config); break;
      case Experiment::Ring: files = run_ring(config); break;
    }
    const fs::path out = config.get("output_dir");
    nlohmann::ordered_json manifest;
    manifest["experiment"] = experiment_name(experiment);
    manifest["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config.values()) manifest["config"][k] = v;
    manifest["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& [name, contents] : files) {
      io::write_text(out / name, contents);
      manifest["artifacts"].push_back(
          {{"file", name}, {"bytes", contents.size()}, {"sha256", io::sha256_hex(contents)}});
      log << "wrote " << (out / name).string() << '\n';
    }
    io::write_text(out / "manifest.json", manifest.dump(2) + "\n");
    for (const auto& [name, contents] : files) {
      if (name == "summary.txt") log << contents;
    }
    return 0;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace epath::cli
