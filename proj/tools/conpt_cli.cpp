// conpt: sponge-crossing connectivity of weighted networks under classical
// and concurrence percolation rules. Emits CSV plot data; see README.
#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "conpt/bethe.hpp"
#include "conpt/classical_oracle.hpp"
#include "conpt/csv.hpp"
#include "conpt/network.hpp"
#include "conpt/random.hpp"
#include "conpt/reduction.hpp"
#include "conpt/scaling.hpp"
#include "conpt/weights.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

std::vector<double> parse_grid(const std::string& spec) {
  double start = 0.0, stop = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0) {
    throw CLI::ValidationError("--grid expects start:stop:step with step > 0, got " + spec);
  }
  std::vector<double> grid;
  for (long i = 0;; ++i) {
    const double x = start + static_cast<double>(i) * step;
    if (x > stop + 1e-9 * step) break;
    if (x > stop - 1e-9 * step && std::abs(x - stop) > 1e-9 * step) break;
    grid.push_back(x);
  }
  if (grid.empty()) throw CLI::ValidationError("empty grid: " + spec);
  return grid;
}

std::pair<int, int> parse_k_range(const std::string& spec) {
  const auto dots = spec.find("..");
  if (dots == std::string::npos) {
    const int k = std::stoi(spec);
    return {k, k};
  }
  return {std::stoi(spec.substr(0, dots)), std::stoi(spec.substr(dots + 2))};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string echo(const std::string& command, std::uint64_t seed, const std::string& params) {
  std::string line = "conpt " + command + " version=" + std::string(conpt::kVersion) +
                     " seed=" + std::to_string(seed);
  if (!params.empty()) line += " " + params;
  return line;
}

using conpt::format_number;

struct SweepPoint {
  double x = 0.0;
  conpt::SpongeCrossingEstimate estimate;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sponge-crossing connectivity under classical and concurrence percolation"};
  app.require_subcommand(1);

  std::string rules_name = "classical";
  std::string net_path, out_path, lattice_name = "square", grid_spec, trace_path;
  std::string k_spec = "3..10", in_path, quantity = "crossing", regime = "sub";
  std::string window_spec;
  int lattice_size = 4, k_degree = 3, runs = 7;
  long layers = 0, trials = 50000;
  double fraction = 1.0, tolerance = 1e-9, x_th = 0.0;
  std::uint64_t seed = 20210519;  // documented default seed

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--out", out_path, "output CSV path")->required();
  };

  CLI::App* reduce = app.add_subcommand("reduce", "sponge-crossing of a network file");
  reduce->add_option("--net", net_path, "network file")->required();
  reduce->add_option("--rules", rules_name, "classical|conpt");
  reduce->add_option("--runs", runs, "degradation orders to average");
  reduce->add_option("--tol", tolerance, "solver residual tolerance");
  reduce->add_option("--trace", trace_path, "optional per-run trace CSV (includes wall time)");
  add_common(reduce);

  CLI::App* bethe = app.add_subcommand("bethe", "Bethe lattice sweep");
  bethe->add_option("--rules", rules_name, "classical|conpt");
  bethe->add_option("--k", k_degree, "node degree");
  bethe->add_option("--grid", grid_spec, "per-link measure grid start:stop:step")->required();
  bethe->add_option("--layers", layers, "finite layer count (0 = infinite lattice)");
  bethe->add_option("--f", fraction, "retained link fraction");
  add_common(bethe);

  CLI::App* sweep = app.add_subcommand("lattice-sweep", "2D lattice sponge-crossing sweep");
  sweep->add_option("--lattice", lattice_name, "square|honeycomb|triangular");
  sweep->add_option("--L", lattice_size, "lattice size");
  sweep->add_option("--rules", rules_name, "classical|conpt");
  sweep->add_option("--grid", grid_spec, "per-link measure grid")->required();
  sweep->add_option("--runs", runs, "degradation orders per grid point");
  sweep->add_option("--tol", tolerance, "solver residual tolerance");
  add_common(sweep);

  CLI::App* mc = app.add_subcommand("mc", "classical Monte Carlo sweep");
  mc->add_option("--lattice", lattice_name, "square|honeycomb|triangular");
  mc->add_option("--L", lattice_size, "lattice size");
  mc->add_option("--grid", grid_spec, "probability grid")->required();
  mc->add_option("--trials", trials, "Monte Carlo trials per point");
  add_common(mc);

  CLI::App* fit = app.add_subcommand("fit", "fits over curve CSV data");
  fit->add_option("--in", in_path, "curve CSV (label,x,y)")->required();
  fit->add_option("--quantity", quantity, "crossing|turning|powerlaw|nu");
  fit->add_option("--window", window_spec, "x window lo:hi (powerlaw, nu)");
  fit->add_option("--xth", x_th, "threshold for nu fits");
  add_common(fit);

  CLI::App* table1 = app.add_subcommand("table1", "entanglement transmission thresholds");
  table1->add_option("--k", k_spec, "degree or range, e.g. 3..10");
  add_common(table1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    const conpt::RuleSystem rules = conpt::rule_system_from_string(rules_name);
    conpt::CsvWriter csv;

    if (reduce->parsed()) {
      const conpt::Network net = conpt::load_network(read_file(net_path));
      conpt::SolveOptions opts;
      opts.tolerance = tolerance;
      std::vector<conpt::RunRecord> records;
      const auto est = conpt::sponge_crossing(net, rules, runs, seed, opts,
                                              trace_path.empty() ? nullptr : &records);
      csv.comment(echo("reduce", seed,
                       "net=" + net_path + " rules=" + rules_name +
                           " runs=" + std::to_string(runs)));
      csv.header({"rules", "runs", "succeeded", "mean", "std"});
      csv.row({rules_name, std::to_string(runs), std::to_string(est.runs_succeeded),
               format_number(est.mean), format_number(est.std_dev)});
      csv.write_atomic(out_path);
      if (!trace_path.empty()) {
        conpt::CsvWriter trace;
        trace.comment(echo("reduce-trace", seed, "wall_seconds is informational"));
        trace.header({"run", "order_hash", "final_theta", "wall_seconds", "ok"});
        for (const auto& rec : records) {
          trace.row({std::to_string(rec.run), std::to_string(rec.order_hash),
                     format_number(rec.final_theta), format_number(rec.wall_seconds),
                     rec.ok ? "1" : "0"});
        }
        trace.write_atomic(trace_path);
      }
    } else if (bethe->parsed()) {
      const auto grid = parse_grid(grid_spec);
      const conpt::BetheSpec spec{k_degree, fraction, rules};
      csv.comment(echo("bethe", seed,
                       "rules=" + rules_name + " k=" + std::to_string(k_degree) +
                           " f=" + format_number(fraction) + " layers=" + std::to_string(layers) +
                           " grid=" + grid_spec));
      csv.header({"rules", "k", "f", "l", "w", "value"});
      for (double w : grid) {
        const double value = layers > 0 ? conpt::bethe_finite(spec, layers, w)
                                        : conpt::bethe_fixed_point(spec, w);
        csv.row({rules_name, std::to_string(k_degree), format_number(fraction),
                 std::to_string(layers), format_number(w), format_number(value)});
      }
      csv.write_atomic(out_path);
    } else if (sweep->parsed()) {
      const auto grid = parse_grid(grid_spec);
      const conpt::LatticeSpec lattice{conpt::lattice_kind_from_string(lattice_name),
                                       lattice_size};
      conpt::SolveOptions opts;
      opts.tolerance = tolerance;
      std::vector<SweepPoint> points(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const conpt::LinkWeight w = conpt::weight_from_measure(rules, grid[i]);
        const conpt::Network net = conpt::build_lattice(lattice, w);
        points[i] = {grid[i],
                     conpt::sponge_crossing(net, rules, runs, conpt::mix_seed(seed, i), opts)};
      }
      const std::string label = lattice_name + " L=" + std::to_string(lattice_size);
      csv.comment(echo("lattice-sweep", seed,
                       "lattice=" + lattice_name + " L=" + std::to_string(lattice_size) +
                           " rules=" + rules_name + " runs=" + std::to_string(runs) +
                           " grid=" + grid_spec));
      csv.header({"label", "rules", "L", "x", "y", "std", "runs", "succeeded"});
      for (const auto& pt : points) {
        csv.row({label, rules_name, std::to_string(lattice_size), format_number(pt.x),
                 format_number(pt.estimate.mean), format_number(pt.estimate.std_dev),
                 std::to_string(runs), std::to_string(pt.estimate.runs_succeeded)});
      }
      csv.write_atomic(out_path);
    } else if (mc->parsed()) {
      const auto grid = parse_grid(grid_spec);
      const conpt::LatticeSpec lattice{conpt::lattice_kind_from_string(lattice_name),
                                       lattice_size};
      const std::string label = lattice_name + " L=" + std::to_string(lattice_size);
      csv.comment(echo("mc", seed,
                       "lattice=" + lattice_name + " L=" + std::to_string(lattice_size) +
                           " trials=" + std::to_string(trials) + " grid=" + grid_spec));
      csv.header({"label", "L", "p", "trials", "estimate", "stderr"});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const conpt::Network net =
            conpt::build_lattice(lattice, conpt::weight_from_p(grid[i]));
        const auto sample = conpt::monte_carlo_sc(net, trials, conpt::mix_seed(seed, i));
        csv.row({label, std::to_string(lattice_size), format_number(grid[i]),
                 std::to_string(sample.trials), format_number(sample.estimate),
                 format_number(sample.stderr_)});
      }
      csv.write_atomic(out_path);
    } else if (fit->parsed()) {
      const auto curves = conpt::read_curves_csv(in_path);
      csv.comment(echo("fit", seed, "in=" + in_path + " quantity=" + quantity));
      csv.header({"quantity", "label", "value", "stderr", "window_lo", "window_hi"});
      std::pair<double, double> window{0.0, 0.0};
      if (!window_spec.empty()) {
        const auto colon = window_spec.find(':');
        if (colon == std::string::npos) throw CLI::ValidationError("--window expects lo:hi");
        window = {std::stod(window_spec.substr(0, colon)),
                  std::stod(window_spec.substr(colon + 1))};
      }
      if (quantity == "crossing") {
        const auto est = conpt::estimate_threshold_crossing(curves);
        csv.row({"crossing", "all", format_number(est.value), format_number(est.uncertainty),
                 "", ""});
      } else if (quantity == "turning") {
        for (const auto& curve : curves) {
          csv.row({"turning", curve.label, format_number(conpt::turning_point(curve)), "", "",
                   ""});
        }
      } else if (quantity == "powerlaw") {
        for (const auto& curve : curves) {
          const auto f = conpt::fit_power_law(curve.xs, curve.ys, window);
          csv.row({"powerlaw", curve.label, format_number(f.exponent),
                   format_number(f.stderr_), format_number(window.first),
                   format_number(window.second)});
        }
      } else if (quantity == "nu") {
        const auto f = conpt::kesten_nu(curves, x_th, window.first, window.second);
        csv.row({"nu", "all", format_number(f.nu), format_number(f.stderr_),
                 format_number(window.first), format_number(window.second)});
      } else {
        throw CLI::ValidationError("unknown --quantity " + quantity);
      }
      csv.write_atomic(out_path);
    } else if (table1->parsed()) {
      const auto [k_lo, k_hi] = parse_k_range(k_spec);
      csv.comment(echo("table1", seed, "k=" + k_spec + " units=(pi/4)^-1 theta"));
      csv.header({"label", "k", "cep", "qep", "qep_ghz", "conpt"});
      for (int k = k_lo; k <= k_hi; ++k) {
        const auto row = conpt::literature_thresholds(k);
        csv.row({"bethe", std::to_string(k), format_number(row.cep), format_number(row.qep),
                 format_number(row.qep_ghz), format_number(row.conpt)});
      }
      for (const auto& row : conpt::literature_thresholds_2d()) {
        csv.row({row.lattice, "0", format_number(row.cep), format_number(row.qep),
                 format_number(row.qep_ghz), format_number(row.conpt)});
      }
      csv.write_atomic(out_path);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const conpt::SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const conpt::ReduceError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const conpt::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
