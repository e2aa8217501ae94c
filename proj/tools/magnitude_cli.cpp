// Command-line front end: magnitudes, sweeps, weight fields, edge profiles,
// lattice sums and growth-rate fits. Data goes to stdout (or --out) as a
// table; diagnostics and errors go to stderr.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "magnitude/magnitude.hpp"

namespace mg = magnitude;

namespace {

enum ExitCode : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_usage = 2,
  exit_invalid_argument = 3,
  exit_duplicate_points = 4,
  exit_ill_conditioned = 5,
  exit_not_homogeneous = 6,
  exit_unsupported_shape = 7,
  exit_missing_cell_volume = 8,
  exit_table_format = 9,
  exit_io = 10,
};

int exit_code_for(mg::ErrorCode code) {
  switch (code) {
    case mg::ErrorCode::invalid_argument: return exit_invalid_argument;
    case mg::ErrorCode::duplicate_points: return exit_duplicate_points;
    case mg::ErrorCode::ill_conditioned: return exit_ill_conditioned;
    case mg::ErrorCode::not_homogeneous: return exit_not_homogeneous;
    case mg::ErrorCode::unsupported_shape: return exit_unsupported_shape;
    case mg::ErrorCode::missing_cell_volume: return exit_missing_cell_volume;
    case mg::ErrorCode::table_format: return exit_table_format;
    case mg::ErrorCode::io: return exit_io;
  }
  return exit_internal;
}

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  return s;
}

int report(std::string_view code, const std::string& message, int status) {
  std::cerr << "error\tcode=" << code << "\tmessage=" << one_line(message) << '\n';
  return status;
}

struct ShapeFlags {
  std::string kind = "square";
  int m = 0;
  int level = 0;
  int target_n = 0;
  int n_r = 0;
  int n_theta = 0;
  double angle = 0.0;
  double r_in = 0.5;
  double r_out = 1.0;
  double major = 1.0;
  double minor = 0.2;
  bool angle_given = false;

  void attach(CLI::App* app, bool shape_required) {
    auto* opt = app->add_option("--shape", kind, "shape kind (see shapes-list)");
    if (shape_required) opt->required();
    app->add_option("--m", m, "points per side / arm / angle count");
    app->add_option("--level", level, "recursion level (sierpinski, cantor)");
    app->add_option("--target-n", target_n, "target point count (disc)");
    app->add_option("--n-r", n_r, "radial count (annulus)");
    app->add_option("--n-theta", n_theta, "angular count (annulus)");
    app->add_option("--angle", angle, "interior angle in radians (bent_line)");
    app->add_option("--r-in", r_in, "inner radius (annulus)")->capture_default_str();
    app->add_option("--r-out", r_out, "outer radius (annulus)")->capture_default_str();
    app->add_option("--major", major, "major radius (torus)")->capture_default_str();
    app->add_option("--minor", minor, "minor radius (torus)")->capture_default_str();
  }

  mg::ShapeSpec spec() const {
    mg::ShapeSpec s;
    s.kind = mg::parse_shape_kind(kind);
    switch (s.kind) {
      case mg::ShapeKind::disc: s.resolution = target_n; break;
      case mg::ShapeKind::annulus:
        s.resolution = n_r;
        s.angular_resolution = n_theta;
        break;
      default: s.resolution = m; break;
    }
    s.level = level;
    if (angle != 0.0) s.angle = angle;
    s.inner_radius = r_in;
    s.outer_radius = r_out;
    s.major_radius = major;
    s.minor_radius = minor;
    mg::validate(s);
    return s;
  }
};

struct SolverFlags {
  std::string method = "dense";
  double gate = 1e-6;
  int refine = 1;

  void attach(CLI::App* app, bool allow_speyer) {
    std::vector<std::string> methods{"dense", "reduced"};
    if (allow_speyer) methods.push_back("speyer");
    app->add_option("--solver", method, "dense | reduced (symmetry orbits)" +
                                            std::string(allow_speyer ? " | speyer (homogeneous)" : ""))
        ->check(CLI::IsMember(methods))
        ->capture_default_str();
    app->add_option("--gate", gate, "residual gate on ||Zw - 1||_inf")->capture_default_str();
    app->add_option("--refine", refine, "iterative refinement steps")->capture_default_str();
  }

  mg::SweepOptions options() const {
    mg::SweepOptions o;
    o.solve.residual_gate = gate;
    o.solve.refinement_steps = refine;
    o.method = method == "reduced" ? mg::SolveMethod::reduced : mg::SolveMethod::dense;
    return o;
  }
};

void emit(const mg::Table& table, const std::string& out) {
  if (out.empty()) {
    mg::write_table(table, std::cout);
    std::cout.flush();
  } else {
    mg::write_table(table, std::filesystem::path(out));
  }
}

mg::FitWindow parse_window(const std::string& text) {
  const auto pos = text.find(':');
  if (pos == std::string::npos) {
    throw mg::Error(mg::ErrorCode::invalid_argument, "window must be t_min:t_max");
  }
  return {mg::parse_number(text.substr(0, pos)), mg::parse_number(text.substr(pos + 1))};
}

mg::Table sweep_table(const mg::SweepResult& result) {
  const bool with_penguin = !result.records.empty() && result.records.front().penguin.has_value();
  mg::Table table;
  table.columns = {"t", "N", "magnitude"};
  if (with_penguin) table.columns.push_back("penguin");
  table.columns.insert(table.columns.end(), {"residual", "spacing"});
  for (const auto& r : result.records) {
    std::vector<double> row{r.t, static_cast<double>(r.n_points), r.magnitude};
    if (with_penguin) row.push_back(*r.penguin);
    row.insert(row.end(), {r.residual_inf, r.spacing});
    table.add_row(std::move(row));
  }
  return table;
}

/// Rebuilds enough of a sweep from its table for the fitting routines.
mg::SweepResult sweep_from_table(const mg::Table& table) {
  mg::SweepResult result;
  const auto t_col = table.column("t");
  const auto mag_col = table.column("magnitude");
  const bool has_spacing = table.has_column("spacing");
  const bool has_n = table.has_column("N");
  const bool has_penguin = table.has_column("penguin");
  for (const auto& row : table.rows) {
    mg::SweepRecord r;
    r.t = row[t_col];
    r.magnitude = row[mag_col];
    if (has_spacing) r.spacing = row[table.column("spacing")];
    if (has_n) r.n_points = static_cast<std::size_t>(row[table.column("N")]);
    if (has_penguin) r.penguin = row[table.column("penguin")];
    result.records.push_back(r);
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const auto& a, const auto& b) { return a.t < b.t; });
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  mg::configure_threads_from_env();

  CLI::App app{"Numerical magnitude of finite approximations to subsets of Euclidean space"};
  app.require_subcommand(1);

  // magnitude
  auto* cmd_mag = app.add_subcommand("magnitude", "magnitude of one shape at one scale");
  ShapeFlags mag_shape;
  SolverFlags mag_solver;
  double mag_t = 1.0;
  mag_shape.attach(cmd_mag, true);
  mag_solver.attach(cmd_mag, true);
  cmd_mag->add_option("--t", mag_t, "scale factor")->required();

  // sweep
  auto* cmd_sweep = app.add_subcommand("sweep", "magnitude over a list of scales");
  ShapeFlags sweep_shape;
  SolverFlags sweep_solver;
  std::string sweep_scales, sweep_out, sweep_manifest, sweep_write_manifest;
  bool sweep_caption_torus = false;
  sweep_shape.attach(cmd_sweep, false);
  sweep_solver.attach(cmd_sweep, false);
  cmd_sweep->add_option("--scales", sweep_scales, "min:max:log:count, min:max:lin:count or a,b,c");
  cmd_sweep->add_option("--out", sweep_out, "output table path (default stdout)");
  cmd_sweep->add_option("--manifest", sweep_manifest, "read shape, scales and solver from a JSON manifest");
  cmd_sweep->add_option("--write-manifest", sweep_write_manifest, "write the resolved run manifest");
  cmd_sweep->add_flag("--torus-caption", sweep_caption_torus,
                      "use t^2/10 instead of the surface-area valuation for tori");

  // weights
  auto* cmd_weights = app.add_subcommand("weights", "per-point weights for one shape and scale");
  ShapeFlags w_shape;
  SolverFlags w_solver;
  double w_t = 1.0;
  std::string w_out;
  w_shape.attach(cmd_weights, true);
  w_solver.attach(cmd_weights, false);
  cmd_weights->add_option("--t", w_t, "scale factor")->required();
  cmd_weights->add_option("--out", w_out, "output table path (default stdout)");

  // profile
  auto* cmd_profile = app.add_subcommand("profile", "bulk-normalized weights along the middle row of a square");
  SolverFlags p_solver;
  int p_m = 0;
  double p_t = 10.0;
  std::string p_out;
  p_solver.attach(cmd_profile, false);
  cmd_profile->add_option("--m", p_m, "points per side (odd)")->required();
  cmd_profile->add_option("--t", p_t, "side length")->capture_default_str();
  cmd_profile->add_option("--out", p_out, "output table path (default stdout)");

  // lattice-sum
  auto* cmd_lattice = app.add_subcommand("lattice-sum", "Riemann sum of exp(-|x|) over a cubic lattice");
  int l_dim = 2;
  double l_spacing = 0.05, l_cutoff = 40.0;
  cmd_lattice->add_option("--dim", l_dim, "dimension 1-3")->capture_default_str();
  cmd_lattice->add_option("--spacing", l_spacing, "lattice spacing")->capture_default_str();
  cmd_lattice->add_option("--cutoff", l_cutoff, "radius cutoff")->capture_default_str();

  // fit
  auto* cmd_fit = app.add_subcommand("fit", "growth-rate or Sierpinski fit of a sweep table");
  std::string f_table, f_window, f_pairs_out;
  bool f_sierpinski = false, f_include_saturated = false;
  cmd_fit->add_option("--table", f_table, "sweep table")->required();
  cmd_fit->add_option("--window", f_window, "t_min:t_max")->required();
  cmd_fit->add_flag("--sierpinski", f_sierpinski, "fit c t^log2(3) + 3/2 and check mag(2t) = 3 mag(t) - 3");
  cmd_fit->add_flag("--include-saturated", f_include_saturated,
                    "keep records whose scaled spacing exceeds 1");
  cmd_fit->add_option("--pairs-out", f_pairs_out, "write the (t, 2t) residual table here");

  // shapes-list
  auto* cmd_shapes = app.add_subcommand("shapes-list", "list shape kinds and their flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", e.what(), exit_usage);
  }

  try {
    if (*cmd_mag) {
      const auto spec = mag_shape.spec();
      const auto cloud = mg::generate(spec);
      double value = 0.0, res = 0.0;
      if (mag_solver.method == "speyer") {
        value = mg::speyer_magnitude(cloud, mag_t);
        const std::vector<double> w(cloud.size(), value / static_cast<double>(cloud.size()));
        res = mg::residual(cloud, mag_t, w);
      } else {
        const auto o = mag_solver.options();
        const auto w = mg::solve_cloud(cloud, mag_t, o.method, o.solve);
        value = mg::magnitude(w);
        res = w.residual_inf;
      }
      mg::Table table{{"t", "N", "magnitude", "residual"}, {}};
      table.add_row({mag_t, static_cast<double>(cloud.size()), value, res});
      emit(table, "");
      return exit_ok;
    }

    if (*cmd_sweep) {
      mg::RunManifest manifest;
      if (!sweep_manifest.empty()) {
        manifest = mg::read_manifest(sweep_manifest);
      } else {
        if (sweep_scales.empty()) {
          return report("usage", "sweep needs --scales or --manifest", exit_usage);
        }
        manifest.shape = sweep_shape.spec();
        manifest.scales = mg::parse_scales(sweep_scales);
        manifest.options = sweep_solver.options();
        if (sweep_caption_torus) manifest.options.torus = mg::TorusPenguin::printed_caption;
        manifest.output_table = sweep_out;
      }
      if (!sweep_out.empty()) manifest.output_table = sweep_out;
      if (!sweep_write_manifest.empty()) mg::write_manifest(manifest, sweep_write_manifest);

      const auto result = mg::sweep(manifest.shape, manifest.scales, manifest.options);
      for (const auto& w : result.warnings) std::cerr << "warning\t" << one_line(w) << '\n';
      if (const auto knee = mg::saturation_knee(result)) {
        std::cerr << "info\tsaturation knee at t=" << *knee << '\n';
      }
      emit(sweep_table(result), manifest.output_table);
      return exit_ok;
    }

    if (*cmd_weights) {
      const auto spec = w_shape.spec();
      const auto cloud = mg::generate(spec);
      const auto o = w_solver.options();
      const auto w = mg::solve_cloud(cloud, w_t, o.method, o.solve);
      std::optional<std::vector<double>> normalized;
      if (cloud.cells()) normalized = mg::bulk_normalized_weights(cloud, w);
      static constexpr const char* axes[] = {"x", "y", "z"};
      mg::Table table;
      for (int d = 0; d < cloud.dim(); ++d) table.columns.emplace_back(axes[d]);
      table.columns.emplace_back("weight");
      if (normalized) table.columns.emplace_back("normalized_weight");
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        std::vector<double> row;
        // coordinates are written at the requested scale
        for (double c : cloud.point(i)) row.push_back(c * w_t);
        row.push_back(w.weights[i]);
        if (normalized) row.push_back((*normalized)[i]);
        table.add_row(std::move(row));
      }
      std::cerr << "info\tmagnitude=" << mg::format_number(mg::magnitude(w))
                << "\tresidual=" << mg::format_number(w.residual_inf)
                << "\tsolver=" << mg::to_string(w.solver_tag) << '\n';
      emit(table, w_out);
      return exit_ok;
    }

    if (*cmd_profile) {
      const auto cloud = mg::gen_square_grid(p_m);
      const auto o = p_solver.options();
      const auto w = mg::solve_cloud(cloud, p_t, o.method, o.solve);
      const auto profile = mg::edge_profile(cloud, w);
      mg::Table table{{"d", "normalized_weight"}, {}};
      for (const auto& s : profile.samples) table.add_row({s.d, s.normalized_weight});
      std::cerr << "info\tboundary_weight=" << mg::format_number(profile.boundary_weight)
                << "\tresidual=" << mg::format_number(w.residual_inf) << '\n';
      emit(table, p_out);
      return exit_ok;
    }

    if (*cmd_lattice) {
      mg::Table table{{"value", "target"}, {}};
      table.add_row({mg::lattice_sum_check(l_dim, l_spacing, l_cutoff), mg::lattice_sum_target(l_dim)});
      emit(table, "");
      return exit_ok;
    }

    if (*cmd_fit) {
      const auto sweep = sweep_from_table(mg::read_table(std::filesystem::path(f_table)));
      const auto window = parse_window(f_window);
      if (f_sierpinski) {
        const auto fit = mg::sierpinski_fit(sweep, window, f_include_saturated);
        double worst = 0.0;
        mg::Table pairs{{"t", "absolute_residual", "relative_residual"}, {}};
        for (const auto& p : fit.functional_residuals) {
          worst = std::max(worst, p.relative);
          pairs.add_row({p.t, p.absolute, p.relative});
        }
        mg::Table table{{"coefficient", "exponent", "max_relative_residual", "pairs"}, {}};
        table.add_row({fit.coefficient, fit.exponent, worst,
                       static_cast<double>(fit.functional_residuals.size())});
        if (!f_pairs_out.empty()) mg::write_table(pairs, std::filesystem::path(f_pairs_out));
        emit(table, "");
      } else {
        const auto fit = mg::growth_rate(sweep, window, f_include_saturated);
        mg::Table table{{"exponent", "coefficient", "t_min", "t_max", "rms_residual", "records"}, {}};
        table.add_row({fit.exponent, fit.coefficient, fit.window.t_min, fit.window.t_max,
                       fit.rms_residual, static_cast<double>(fit.records_used)});
        emit(table, "");
      }
      return exit_ok;
    }

    if (*cmd_shapes) {
      std::cout << "point\t(no parameters)\n"
                << "segment\t--m\n"
                << "circle\t--m\n"
                << "bent_line\t--m --angle\n"
                << "square\t--m\n"
                << "disc\t--target-n\n"
                << "cube\t--m\n"
                << "annulus\t--n-r --n-theta [--r-in --r-out]\n"
                << "torus\t--m [--major --minor]\n"
                << "sierpinski\t--level\n"
                << "cantor\t--level\n";
      return exit_ok;
    }
  } catch (const mg::Error& e) {
    return report(mg::to_string(e.code()), e.what(), exit_code_for(e.code()));
  } catch (const std::bad_alloc&) {
    return report("internal", "out of memory", exit_internal);
  } catch (const std::exception& e) {
    return report("internal", e.what(), exit_internal);
  }
  return exit_usage;
}
