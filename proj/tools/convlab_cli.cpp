// Batch front end: parse an instance config, dispatch verification suites,
// emit JSON reports and plot-ready CSVs.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <convlab/convlab.hpp>

namespace {

using namespace convlab;
namespace fs = std::filesystem;

// Bundled corpus used when no config file is given; configs/default.json
// ships the same document.
const char *kDefaultConfig = R"json({
  "instances": [
    {"suite": "fubini", "model": {"kind": "cyclic", "n": 16, "volume": 16.0}, "count": 10, "exact": true},
    {"suite": "fubini", "model": {"kind": "circle", "n": 64, "volume": 1.0}, "count": 10, "mass1": 0.3, "mass2": 0.4},
    {"suite": "ft", "model": {"kind": "line", "h": 0.02, "half_width": 4.0}, "count": 20, "mass1": 0.8, "mass2": 1.2, "t": 0.3},
    {"suite": "main", "model": {"kind": "line", "h": 0.01, "half_width": 4.0}, "count": 5, "mass1": 1.0, "mass2": 2.0, "function": {"family": "power", "p": 2.0}},
    {"suite": "kemperman", "variant": "line", "h": 0.5, "b1": [[0, 2]], "b2": [[0, 2]]},
    {"suite": "kemperman", "variant": "circle", "h": 0.03125, "period": 32, "b1": [[0, 8]], "b2": [[4, 12]]},
    {"suite": "kemperman", "variant": "cells", "model": {"kind": "cayley", "name": "S3", "weight": 1.0}, "count": 10},
    {"suite": "probe", "model": {"kind": "circle", "n": 200, "volume": 1.0}, "a1": 0.7, "a2": 0.7, "t": 0.2},
    {"suite": "split", "model": {"kind": "cayley", "name": "Z8", "weight": 1.0}, "count": 10, "mass": 3.0, "mass1": 1.0, "t": 0.2},
    {"suite": "rearrange", "model": {"kind": "product", "connected": {"kind": "circle", "n": 32, "volume": 1.0}, "finite": {"kind": "cayley", "name": "Z2", "weight": 1.0}}, "mass1": 0.4, "mass2": 0.5, "t": 0.1, "target": {"h": 0.03125, "half_width": 1.2}}
  ],
  "search": {
    "model": {"kind": "line", "h": 0.05, "half_width": 3.0},
    "phi1_mass": 1.0,
    "t": [0.0, 0.25, 0.5],
    "I_grid": [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
  }
})json";

json load_config(const std::string &path) {
  if (path.empty())
    return json::parse(kDefaultConfig);
  std::ifstream in(path);
  if (!in)
    throw validation_error("cannot open config: " + path);
  return json::parse(in);
}

std::vector<int> random_cells(const GroupModel &model, std::mt19937_64 &rng) {
  std::uniform_int_distribution<int> count(1, std::max(1, model.size() / 2));
  const int k = count(rng);
  std::vector<int> all(model.size());
  for (int i = 0; i < model.size(); ++i)
    all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

// On a RealLineGrid, sample on the central half and embed so the support sum
// of two samples stays inside the grid.
StepFn sample_safe(GroupModelPtr model, double mass, std::uint64_t seed) {
  if (model->kind != GroupKind::RealLineGrid)
    return sample_B(model, mass, seed);
  const double h = model->step();
  auto narrow = make_real_grid(h, model->half_count() * h / 2.0 - h);
  auto s = sample_B(narrow, mass, seed);
  std::vector<double> vals(model->size(), 0.0);
  for (int c = 0; c < narrow->size(); ++c)
    vals[model->cell_of_signed(narrow->signed_of_cell(c))] = s[c];
  return StepFn(model, std::move(vals));
}

IntervalUnion union_from_json(const json &arr) {
  std::vector<std::pair<std::int64_t, std::int64_t>> ivs;
  for (const auto &p : arr)
    ivs.emplace_back(p.at(0).get<std::int64_t>(), p.at(1).get<std::int64_t>());
  return IntervalUnion::from_pairs(ivs);
}

void run_instance(const json &inst, std::uint64_t seed, double tol_scale, bool exact,
                  std::vector<CheckReport> &out) {
  const std::string suite = inst.at("suite").get<std::string>();
  const int count = inst.value("count", 1);

  if (suite == "fubini") {
    auto model = model_from_json(inst.at("model"));
    for (int k = 0; k < count; ++k) {
      std::mt19937_64 rng(seed + k);
      CheckReport r;
      if (exact || inst.value("exact", false)) {
        auto b1 = random_cells(*model, rng);
        auto b2 = random_cells(*model, rng);
        r = check_fubini(indicator_cells(model, b1), indicator_cells(model, b2));
      } else {
        const double m1 = inst.value("mass1", 0.3) * (inst.contains("mass1") ? 1.0 : model->total_volume());
        const double m2 = inst.value("mass2", 0.4) * (inst.contains("mass2") ? 1.0 : model->total_volume());
        r = check_fubini(sample_B(model, m1, seed + 2 * k), sample_B(model, m2, seed + 2 * k + 1));
      }
      r.seed = seed + k;
      out.push_back(std::move(r));
    }
    return;
  }

  if (suite == "ft") {
    auto model = model_from_json(inst.at("model"));
    const double t = inst.value("t", 0.25);
    for (int k = 0; k < count; ++k) {
      auto p1 = sample_safe(model, inst.value("mass1", 0.8), seed + 2 * k);
      auto p2 = sample_safe(model, inst.value("mass2", 1.2), seed + 2 * k + 1);
      CheckReport r = check_ft_bound(p1, p2, t, tol_scale);
      r.seed = seed + k;
      out.push_back(std::move(r));
    }
    return;
  }

  if (suite == "main") {
    auto model = model_from_json(inst.at("model"));
    const ConvexFn f = convex_from_json(inst.at("function"));
    for (int k = 0; k < count; ++k) {
      auto p1 = sample_safe(model, inst.value("mass1", 1.0), seed + 2 * k);
      auto p2 = sample_safe(model, inst.value("mass2", 2.0), seed + 2 * k + 1);
      CheckReport r = check_main(p1, p2, f, tol_scale);
      r.seed = seed + k;
      out.push_back(std::move(r));
    }
    return;
  }

  if (suite == "kemperman") {
    const std::string variant = inst.value("variant", "cells");
    if (variant == "line") {
      out.push_back(check_kemperman_line(inst.at("h").get<double>(),
                                         union_from_json(inst.at("b1")),
                                         union_from_json(inst.at("b2"))));
    } else if (variant == "circle") {
      out.push_back(check_kemperman_circle(inst.at("h").get<double>(),
                                           inst.at("period").get<std::int64_t>(),
                                           union_from_json(inst.at("b1")),
                                           union_from_json(inst.at("b2"))));
    } else if (variant == "cells") {
      auto model = model_from_json(inst.at("model"));
      for (int k = 0; k < count; ++k) {
        std::mt19937_64 rng(seed + k);
        auto b1 = random_cells(*model, rng);
        auto b2 = random_cells(*model, rng);
        CheckReport r = check_kemperman_cells(model, b1, b2);
        r.seed = seed + k;
        out.push_back(std::move(r));
      }
    } else {
      throw validation_error("kemperman: unknown variant '" + variant + "'");
    }
    return;
  }

  if (suite == "probe") {
    auto model = model_from_json(inst.at("model"));
    const double c = model->total_volume() / 2.0;
    auto p1 = indicator_arc(model, c, inst.at("a1").get<double>());
    auto p2 = indicator_arc(model, c, inst.at("a2").get<double>());
    CheckReport r = probe_connected_violation(p1, p2, inst.at("t").get<double>(), tol_scale);
    r.seed = seed;
    out.push_back(std::move(r));
    return;
  }

  if (suite == "split") {
    auto model = model_from_json(inst.at("model"));
    std::vector<int> all(model->size());
    for (int i = 0; i < model->size(); ++i)
      all[i] = i;
    for (int k = 0; k < count; ++k) {
      auto phi = sample_B(model, inst.value("mass", 3.0), seed + 2 * k);
      auto phi1 = sample_B(model, inst.value("mass1", 1.0), seed + 2 * k + 1);
      const double he = overlap_mass(phi, model->identity());
      const double i1p = inst.contains("i1_prime") ? inst.at("i1_prime").get<double>()
                                                   : (he + l1_norm(phi)) / 2.0;
      SplitCertificate cert = build_split(phi, i1p, all);
      CheckReport r = check_split_superadditivity(cert, phi, phi1, inst.value("t", 0.2));
      r.seed = seed + k;
      out.push_back(std::move(r));
    }
    return;
  }

  if (suite == "rearrange") {
    auto model = model_from_json(inst.at("model"));
    auto target = model_from_json(json{{"kind", "line"},
                                       {"h", inst.at("target").at("h").get<double>()},
                                       {"half_width", inst.at("target").at("half_width").get<double>()}});
    auto cs = product_cosets(model);
    auto p1 = sample_B(model, inst.value("mass1", 0.4), seed);
    auto p2 = sample_B(model, inst.value("mass2", 0.5), seed + 1);
    auto reports = check_rearrangement_domination(p1, p2, inst.value("t", 0.1), cs, target,
                                                  tol_scale);
    for (auto &r : reports) {
      r.seed = seed;
      out.push_back(std::move(r));
    }
    return;
  }

  throw validation_error("unknown suite '" + suite + "' in config");
}

int exit_code_for(const std::vector<CheckReport> &reports) {
  for (const auto &r : reports)
    if (r.verdict == Verdict::Fail)
      return 2;
  return 0;
}

void print_summary(const std::vector<CheckReport> &reports) {
  int pass = 0, fail = 0, skipped = 0;
  for (const auto &r : reports) {
    if (r.verdict == Verdict::Pass)
      ++pass;
    else if (r.verdict == Verdict::Fail)
      ++fail;
    else
      ++skipped;
    if (r.verdict == Verdict::Fail)
      std::cout << "FAIL " << r.statement << " lhs=" << r.lhs << " rhs=" << r.rhs
                << " margin=" << r.margin << " tol=" << r.tolerance << "\n";
  }
  std::cout << "pass=" << pass << " fail=" << fail << " skipped=" << skipped << "\n";
}

std::string instances_csv(const std::vector<CheckReport> &reports) {
  std::ostringstream os;
  os << "statement,lhs,rhs,margin,tol,hypothesis,verdict,instance_seed\n";
  for (const auto &r : reports)
    os << r.statement << "," << r.lhs << "," << r.rhs << "," << r.margin << "," << r.tolerance
       << "," << to_string(r.hypothesis) << "," << to_string(r.verdict) << "," << r.seed
       << "\n";
  return os.str();
}

int cmd_verify(const std::string &config_path, const std::string &suite, std::uint64_t seed,
               const std::string &out_dir, double tol_scale, bool exact) {
  const json cfg = load_config(config_path);
  std::vector<CheckReport> reports;
  std::uint64_t inst_seed = seed;
  for (const auto &inst : cfg.at("instances")) {
    inst_seed += 1000;
    if (suite != "all" && inst.at("suite").get<std::string>() != suite)
      continue;
    run_instance(inst, inst_seed, tol_scale, exact, reports);
  }
  fs::create_directories(out_dir);
  write_report_json((fs::path(out_dir) / "report.json").string(), reports);
  write_text_file((fs::path(out_dir) / "instances.csv").string(), instances_csv(reports));
  print_summary(reports);
  return exit_code_for(reports);
}

int cmd_sweep(const std::string &config_path, const std::string &param,
              const std::vector<double> &values, std::uint64_t seed,
              const std::string &out_dir, double tol_scale) {
  (void)config_path;
  if (values.empty())
    throw CLI::ValidationError("--values must be nonempty");
  std::ostringstream csv;
  csv << "value,worst_margin\n";
  for (double v : values) {
    double worst = 0.0;
    if (param == "h") {
      // Tent equality case: worst |lhs - rhs| over the bundled test functions.
      auto model = make_real_grid(v, 4.0);
      auto p1 = indicator_interval(model, 1.0);
      auto p2 = indicator_interval(model, 2.0);
      for (const ConvexFn &f : {ConvexFn::power(2.0), ConvexFn::ft(0.3)}) {
        CheckReport r = check_main(p1, p2, f, tol_scale);
        worst = std::max(worst, std::abs(r.margin));
      }
    } else if (param == "n") {
      // Max chord gap of the piecewise-linear upper approximation of y^2.
      const int n = static_cast<int>(v);
      const ConvexFn f = ConvexFn::power(2.0);
      for (int i = 0; i <= 1024; ++i) {
        const double y = static_cast<double>(i) / 1024.0;
        worst = std::max(worst, pl_approx(f, n, y) - f(y));
      }
    } else if (param == "I") {
      auto model = make_real_grid(0.02, 4.0);
      auto p1 = sample_B(model, 0.8, seed);
      auto p2 = sample_B(model, v, seed + 1);
      CheckReport r = check_ft_bound(p1, p2, 0.25, tol_scale);
      worst = r.margin;
    } else {
      throw CLI::ValidationError("--param must be h, n, or I");
    }
    csv << v << "," << worst << "\n";
  }
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "sweep.csv").string(), csv.str());
  std::cout << csv.str();
  return 0;
}

int cmd_search(const std::string &config_path, const std::vector<double> &i_grid_arg,
               long budget, std::uint64_t seed, const std::string &out_dir,
               double tol_scale) {
  const json cfg = load_config(config_path);
  const json &sc = cfg.at("search");
  auto model = model_from_json(sc.at("model"));
  std::vector<double> i_grid = i_grid_arg;
  if (i_grid.empty())
    i_grid = sc.at("I_grid").get<std::vector<double>>();
  std::sort(i_grid.begin(), i_grid.end());
  std::vector<double> ts = sc.value("t", std::vector<double>{0.25});

  std::vector<CheckReport> reports;
  std::ostringstream csv;
  csv << "t,I,S_hat,bound,gap,budget,seed\n";
  for (double t : ts) {
    SContext ctx = make_scontext(indicator_interval(model, sc.value("phi1_mass", 1.0)), t);
    for (const auto &row : gap_curve(ctx, i_grid, budget, seed))
      csv << t << "," << row.I << "," << row.s_hat << "," << row.bound << "," << row.gap
          << "," << row.budget << "," << row.seed << "\n";
    auto props = check_S_properties(ctx, i_grid, budget, seed, tol_scale);
    reports.insert(reports.end(), props.begin(), props.end());
  }
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "gap_curve.csv").string(), csv.str());
  write_report_json((fs::path(out_dir) / "search_report.json").string(), reports);
  if (budget == 0)
    std::cout << "low-budget: estimates from initial candidates only\n";
  print_summary(reports);
  return exit_code_for(reports);
}

double bench_checksum(const StepFn &conv) {
  // Quantized to the kernel-equivalence tolerance so direct and FFT agree.
  return std::round(l1_norm(conv) * 1e9) / 1e9;
}

int cmd_bench(const std::vector<std::string> &models, const std::vector<int> &sizes,
              const std::string &out_dir) {
  using clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  for (const auto &name : models) {
    for (int n : sizes) {
      GroupModelPtr model;
      bool fft_supported = true;
      if (name == "circle") {
        model = make_cyclic(n, 1.0, true);
      } else if (name == "line") {
        model = make_real_grid(1.0 / n, 0.5);
      } else if (name == "circleXS3") {
        model = make_product(make_cyclic(std::max(1, n / 6), 1.0, true),
                             make_finite_cayley(s3_table(), 1.0));
        fft_supported = false; // finite factor is not cyclic
      } else {
        std::cerr << "unknown model name: " << name << "\n";
        return 1;
      }
      auto p1 = sample_B(model, 0.3 * model->total_volume(), 1);
      auto p2 = sample_B(model, 0.4 * model->total_volume(), 2);
      auto t0 = clock::now();
      const StepFn direct = convolve(p1, p2);
      auto t1 = clock::now();
      rows.push_back({name, model->size(), "direct",
                      std::chrono::duration<double>(t1 - t0).count(),
                      bench_checksum(direct)});
      if (fft_supported) {
        auto t2 = clock::now();
        const StepFn fft = convolve_fft(p1, p2);
        auto t3 = clock::now();
        rows.push_back({name, model->size(), "fft",
                        std::chrono::duration<double>(t3 - t2).count(),
                        bench_checksum(fft)});
      }
    }
  }
  fs::create_directories(out_dir);
  const std::string csv = bench_rows_to_csv(rows);
  write_text_file((fs::path(out_dir) / "bench.csv").string(), csv);
  std::cout << csv;
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"convlab: numerical verification of convolution-convexity inequalities"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 12345;
  int threads = 1;
  double tol_scale = 4.0;
  bool exact = false;
  app.add_option("--seed", seed, "base RNG seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "parallelism cap (runs are sequential at 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--tolerance-scale", tol_scale, "C in the tau(h) tolerance model");
  app.add_flag("--exact", exact, "prefer exact integer instances where available");

  std::string suite = "all";
  auto *verify = app.add_subcommand("verify", "run inequality suites from a config");
  verify->add_option("config", config_path, "config JSON (bundled corpus when omitted)");
  verify->add_option("--suite", suite,
                     "fubini | ft | main | kemperman | probe | split | rearrange | all");

  std::string param = "h";
  std::vector<double> values;
  auto *sweep = app.add_subcommand("sweep", "re-run a study across parameter values");
  sweep->add_option("config", config_path, "config JSON");
  sweep->add_option("--param", param, "h | n | I");
  sweep->add_option("--values", values, "parameter values");

  std::vector<double> i_grid;
  long budget = 2000;
  auto *search = app.add_subcommand("search", "extremal S(I) search and envelope check");
  search->add_option("config", config_path, "config JSON");
  search->add_option("--I-grid", i_grid, "masses to probe");
  search->add_option("--budget", budget, "objective evaluation budget");

  std::vector<std::string> bench_models{"circle"};
  std::vector<int> bench_sizes{256, 1024, 4096, 16384};
  auto *bench = app.add_subcommand("bench", "direct vs FFT kernel timings");
  bench->add_option("--models", bench_models, "circle | line | circleXS3");
  bench->add_option("--sizes", bench_sizes, "cell counts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed())
      return cmd_verify(config_path, suite, seed, out_dir, tol_scale, exact);
    if (sweep->parsed())
      return cmd_sweep(config_path, param, values, seed, out_dir, tol_scale);
    if (search->parsed())
      return cmd_search(config_path, i_grid, budget, seed, out_dir, tol_scale);
    if (bench->parsed())
      return cmd_bench(bench_models, bench_sizes, out_dir);
  } catch (const CLI::ValidationError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
