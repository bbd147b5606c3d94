#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.
//
// Precedence: built-in defaults < config file (--config, else $DEGEN_CONFIG)
// < command-line flags.
//
// Exit status: 0 success, 1 validation error (including bad flags and
// malformed config), 2 I/O error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "degen/degen.hpp"

namespace degen::cli {

inline constexpr const char* kConfigEnv = "DEGEN_CONFIG";
inline constexpr const char* kTimestampEnv = "DEGEN_TIMESTAMP";

namespace detail {

struct MetricFlags {
  double delta = 0, a_min = 0, r_min = 0, mission_time = 0, epsilon = 0, sigma = 0, gamma = 0;
  int m = 0, k = 0;
  std::string weight_mode;
  std::vector<CLI::Option*> opts;

  void attach(CLI::App* app) {
    opts = {app->add_option("--delta", delta, "structural threshold"),
            app->add_option("--a-min", a_min, "availability threshold"),
            app->add_option("--r-min", r_min, "reliability threshold"),
            app->add_option("--mission-time", mission_time, "mission time T in hours"),
            app->add_option("--weight-mode", weight_mode, "None | Availability | Reliability | Joint"),
            app->add_option("--epsilon", epsilon, "functional-similarity threshold on the kernel scale"),
            app->add_option("--sigma", sigma, "kernel width"),
            app->add_option("--gamma", gamma, "cross-layer weighting factor (recorded only)"),
            app->add_option("--m", m, "function count"),
            app->add_option("--k", k, "layer count")};
  }

  void apply(io::RunConfig& c) const {
    auto set = [](const CLI::Option* o) { return o->count() > 0; };
    auto& mc = c.metric;
    if (set(opts[0])) mc.delta = delta;
    if (set(opts[1])) mc.a_min = a_min;
    if (set(opts[2])) mc.r_min = r_min;
    if (set(opts[3])) mc.mission_time = mission_time;
    if (set(opts[4])) mc.weight_mode = parse_weight_mode(weight_mode);
    if (set(opts[5])) mc.epsilon = epsilon;
    if (set(opts[6])) mc.sigma = sigma;
    if (set(opts[7])) mc.gamma = gamma;
    if (set(opts[8])) {
      mc.m = m;
      c.explicit_m = true;
    }
    if (set(opts[9])) {
      mc.k = k;
      c.explicit_k = true;
    }
  }
};

inline io::RunConfig resolve_config(const std::string& config_path) {
  std::string path = config_path;
  if (path.empty())
    if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
  io::RunConfig c;
  if (!path.empty()) c = io::load_config(path);
  return c;
}

/// m and k follow the instance unless the user pinned them.
inline void fit_to_instance(io::RunConfig& c, const DeploymentInstance& inst) {
  if (!c.explicit_m) c.metric.m = static_cast<int>(inst.functions.size());
  if (!c.explicit_k) c.metric.k = static_cast<int>(std::max<std::size_t>(1, inst.topology.layers.size()));
}

inline std::string now_utc(const std::string& pinned) {
  if (!pinned.empty()) return pinned;
  if (const char* env = std::getenv(kTimestampEnv); env && *env) return env;
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string basename(const std::string& path) { return std::filesystem::path(path).filename().string(); }

inline std::string sidecar_for(const std::string& path) {
  auto p = std::filesystem::path(path);
  p.replace_extension(".manifest.json");
  return p.string();
}

inline io::json manifest_with_inputs(const io::RunManifest& m, const std::string& sidecar,
                                     const std::vector<std::string>& inputs) {
  auto j = io::embedded_manifest(m, basename(sidecar));
  j["inputs"] = inputs;
  return j;
}

inline void write_manifest(const io::RunManifest& m, const std::string& sidecar, const std::vector<std::string>& inputs) {
  auto j = io::to_json(m);
  j["inputs"] = inputs;
  io::write_text(sidecar, io::dump(j));
}

inline InstanceFixture fixture_by_name(const std::string& name, std::uint64_t seed) {
  if (name == "redundancy") return make_redundancy_fixture(seed);
  if (name == "collapse") return make_fss_collapse_fixture(seed);
  if (name == "layered") return make_layered_fixture(seed);
  throw ValidationError("unknown fixture '" + name + "' (expected redundancy, collapse, layered or five-algorithm)");
}

inline std::vector<double> parse_q_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(io::parse_double(tok));
  return out;
}

inline std::string fmt(double v) { return io::format_double(v); }

}  // namespace detail

/// Runs one CLI invocation. `args[0]` is the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"degen: degeneracy-aware resilience metrics and disruption sweeps", "degen"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (default: $DEGEN_CONFIG)");

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic instance or portfolio");
  std::string gen_out = "instance.json", gen_portfolio_out, gen_fixture, gen_timestamp;
  std::uint64_t gen_seed = 0;
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "instance output path");
  gen->add_option("--portfolio-out", gen_portfolio_out, "also write a generated portfolio here");
  gen->add_option("--fixture", gen_fixture, "redundancy | collapse | layered | five-algorithm");
  gen->add_option("--timestamp", gen_timestamp, "pin the manifest timestamp");

  // fss
  auto* fss = app.add_subcommand("fss", "functional substitution scores for an instance");
  std::string fss_instance, fss_function, fss_out = "fss_report.json";
  detail::MetricFlags fss_flags;
  fss->add_option("--instance", fss_instance, "instance file")->required();
  fss->add_option("--function", fss_function, "function id (default: every function)");
  fss->add_option("--out", fss_out, "JSON report path");
  fss_flags.attach(fss);

  // arq
  auto* arq = app.add_subcommand("arq", "algorithmic resilience quotients for a portfolio");
  std::string arq_portfolio, arq_out = "arq_report.json", arq_heatmap;
  detail::MetricFlags arq_flags;
  arq->add_option("--portfolio", arq_portfolio, "portfolio file")->required();
  arq->add_option("--out", arq_out, "JSON report path");
  arq->add_option("--heatmap-prefix", arq_heatmap, "write <prefix>_kernel.csv and <prefix>_dissim.csv");
  arq_flags.attach(arq);

  // mldi
  auto* mldi = app.add_subcommand("mldi", "multi-layer degeneracy indices for an instance");
  std::string mldi_instance, mldi_out = "mldi_report.json";
  std::vector<std::string> mldi_fail;
  detail::MetricFlags mldi_flags;
  mldi->add_option("--instance", mldi_instance, "instance file")->required();
  mldi->add_option("--fail", mldi_fail, "element ids that fail directly")->delimiter(',');
  mldi->add_option("--out", mldi_out, "JSON report path");
  mldi_flags.attach(mldi);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "targeted-removal sweep");
  std::string sw_instance, sw_fixture, sw_target, sw_function, sw_q, sw_attack, sw_prefix = "sweep", sw_timestamp;
  std::vector<std::string> sw_portfolios;
  int sw_trials = 0, sw_threads = 0;
  std::uint64_t sw_seed = 0;
  bool sw_no_resample = false;
  detail::MetricFlags sw_flags;
  sweep->add_option("--instance", sw_instance, "instance file (FSS/MLDI)");
  sweep->add_option("--portfolio", sw_portfolios, "portfolio file(s) (ARQ)");
  sweep->add_option("--fixture", sw_fixture, "built-in fixture: redundancy | collapse | layered | five-algorithm");
  auto* t_opt = sweep->add_option("--target", sw_target, "fss | arq | mldi");
  auto* f_opt = sweep->add_option("--function", sw_function, "function id for fss targets");
  auto* q_opt = sweep->add_option("--q-list", sw_q, "comma-separated removal fractions");
  auto* tr_opt = sweep->add_option("--trials", sw_trials, "trials per q");
  auto* sd_opt = sweep->add_option("--seed", sw_seed, "master seed");
  auto* at_opt = sweep->add_option("--attack", sw_attack, "Targeted | Random");
  auto* th_opt = sweep->add_option("--threads", sw_threads, "worker threads for trials");
  sweep->add_flag("--no-resample", sw_no_resample, "every trial evaluates the input unchanged");
  sweep->add_option("--out-prefix", sw_prefix, "writes <prefix>.csv, <prefix>.json, <prefix>.manifest.json");
  sweep->add_option("--timestamp", sw_timestamp, "pin the manifest timestamp");
  sw_flags.attach(sweep);

  // report
  auto* report = app.add_subcommand("report", "merge sweep CSV tables");
  std::vector<std::string> rep_inputs;
  std::string rep_out = "report.csv";
  report->add_option("inputs", rep_inputs, "sweep CSV files")->required();
  report->add_option("--out", rep_out, "merged CSV path");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    io::RunConfig cfg = detail::resolve_config(config_path);

    if (*gen) {
      if (gen_seed_opt->count()) cfg.generator.seed = gen_seed;
      io::RunManifest man{cfg, cfg.generator.seed, io::kToolVersion, detail::now_utc(gen_timestamp)};
      const auto sidecar = detail::sidecar_for(gen_out);
      if (gen_fixture == "five-algorithm") {
        io::NamedPortfolio p{"five-algorithm", make_five_algorithm_fixture()};
        auto j = io::to_json(p);
        j["manifest"] = detail::manifest_with_inputs(man, sidecar, {});
        io::write_text(gen_out, io::dump(j));
        out << "wrote portfolio " << gen_out << " (" << p.algorithms.size() << " algorithms)\n";
      } else {
        const auto inst = gen_fixture.empty() ? generate_instance(cfg.generator)
                                              : detail::fixture_by_name(gen_fixture, cfg.generator.seed).instance;
        auto j = io::to_json(inst);
        j["manifest"] = detail::manifest_with_inputs(man, sidecar, {});
        io::write_text(gen_out, io::dump(j));
        out << "wrote instance " << gen_out << " (" << inst.size() << " elements, " << inst.functions.size()
            << " functions)\n";
      }
      if (!gen_portfolio_out.empty()) {
        io::NamedPortfolio p{"portfolio", generate_portfolio(cfg.portfolio)};
        auto j = io::to_json(p);
        j["manifest"] = detail::manifest_with_inputs(man, sidecar, {});
        io::write_text(gen_portfolio_out, io::dump(j));
        out << "wrote portfolio " << gen_portfolio_out << " (" << p.algorithms.size() << " algorithms)\n";
      }
      detail::write_manifest(man, sidecar, {});
      return 0;
    }

    if (*fss) {
      const auto inst = io::load_instance(fss_instance);
      detail::fit_to_instance(cfg, inst);
      fss_flags.apply(cfg);
      validate(cfg.metric);
      std::vector<FssReport> reps;
      if (fss_function.empty()) reps = fss_all(inst, cfg.metric);
      else reps.push_back(fss_weighted(inst, fss_function, cfg.metric));
      io::json arr = io::json::array();
      for (const auto& r : reps) {
        out << "FSS(" << r.function_id << "): n=" << r.n << " baseline=" << detail::fmt(r.baseline)
            << " weighted=" << detail::fmt(r.weighted) << " admissible=" << r.admissible_count << "\n";
        arr.push_back(io::to_json(r));
      }
      io::RunManifest man{cfg, cfg.generator.seed, io::kToolVersion, ""};
      io::write_text(fss_out, io::dump({{"manifest", detail::manifest_with_inputs(man, "", {fss_instance})},
                                        {"weight_mode", weight_mode_name(cfg.metric.weight_mode)},
                                        {"reports", arr}}));
      return 0;
    }

    if (*arq) {
      const auto p = io::load_portfolio(arq_portfolio);
      arq_flags.apply(cfg);
      validate(cfg.metric);
      const auto rep = arq_report(p.algorithms, cfg.metric.epsilon, cfg.metric.delta, cfg.metric.sigma);
      out << "ARQ(" << p.name << "): n=" << p.algorithms.size() << " hard=" << detail::fmt(rep.hard)
          << " soft=" << detail::fmt(rep.soft) << "\n";
      io::RunManifest man{cfg, cfg.portfolio.seed, io::kToolVersion, ""};
      io::write_text(arq_out, io::dump({{"manifest", detail::manifest_with_inputs(man, "", {arq_portfolio})},
                                        {"portfolio", p.name},
                                        {"report", io::to_json(rep, p.algorithms)}}));
      if (!arq_heatmap.empty()) {
        std::vector<std::string> labels;
        for (const auto& a : p.algorithms) labels.push_back(a.id);
        io::write_text(arq_heatmap + "_kernel.csv", io::matrix_csv(rep.kernel, labels));
        io::write_text(arq_heatmap + "_dissim.csv", io::matrix_csv(rep.struct_dissim, labels));
      }
      return 0;
    }

    if (*mldi) {
      const auto inst = io::load_instance(mldi_instance);
      detail::fit_to_instance(cfg, inst);
      mldi_flags.apply(cfg);
      std::vector<bool> failed(inst.size(), false);
      for (const auto& id : mldi_fail) {
        const auto idx = inst.index_of(id);
        if (!idx) throw ValidationError("unknown element id '" + id + "'");
        failed[*idx] = true;
      }
      const auto state = propagate_failures(inst, failed);
      const auto rep = mldi_report(inst, state, cfg.metric);
      out << "MLDI: baseline=" << detail::fmt(rep.baseline) << " enhanced=" << detail::fmt(rep.enhanced) << "\n";
      for (const auto& d : rep.per_layer)
        out << "  " << layer_name(d.layer) << ": tau=" << detail::fmt(d.tau) << " H=" << detail::fmt(d.entropy_raw)
            << " H_norm=" << detail::fmt(d.entropy_norm) << " active=" << d.active << "/" << d.layer_size << "\n";
      io::RunManifest man{cfg, cfg.generator.seed, io::kToolVersion, ""};
      io::write_text(mldi_out, io::dump({{"manifest", detail::manifest_with_inputs(man, "", {mldi_instance})},
                                         {"failed", mldi_fail},
                                         {"report", io::to_json(rep)}}));
      return 0;
    }

    if (*sweep) {
      auto& sc = cfg.sweep;
      if (t_opt->count()) {
        if (sw_target == "fss") sc.target = FssTarget{sw_function.empty() ? "F1" : sw_function};
        else if (sw_target == "arq") sc.target = ArqTarget{"portfolio"};
        else if (sw_target == "mldi") sc.target = MldiTarget{};
        else throw ValidationError("--target must be fss, arq or mldi");
      }
      if (f_opt->count()) {
        if (auto* f = std::get_if<FssTarget>(&sc.target)) f->function_id = sw_function;
        else throw ValidationError("--function only applies to fss targets");
      }
      if (q_opt->count()) sc.q_list = detail::parse_q_list(sw_q);
      if (tr_opt->count()) sc.trials = sw_trials;
      if (sd_opt->count()) sc.seed = sw_seed;
      if (at_opt->count()) sc.attack = parse_attack(sw_attack);
      if (th_opt->count()) sc.threads = sw_threads;
      if (sw_no_resample) sc.resample = false;

      std::vector<std::string> inputs;
      std::vector<SweepResult> results;
      if (std::holds_alternative<ArqTarget>(sc.target)) {
        sw_flags.apply(cfg);
        std::vector<io::NamedPortfolio> ports;
        std::optional<PortfolioConfig> regen;
        for (const auto& path : sw_portfolios) {
          ports.push_back(io::load_portfolio(path));
          inputs.push_back(path);
        }
        if (sw_fixture == "five-algorithm") {
          ports.push_back({"five-algorithm", make_five_algorithm_fixture()});
          inputs.push_back("fixture:five-algorithm");
        } else if (!sw_fixture.empty()) {
          throw ValidationError("ARQ sweeps accept only the five-algorithm fixture");
        }
        if (ports.empty()) {
          ports.push_back({"generated", generate_portfolio(cfg.portfolio)});
          regen = cfg.portfolio;
          inputs.push_back("generated:portfolio");
        }
        for (const auto& p : ports) {
          auto local = sc;
          local.target = ArqTarget{p.name};
          results.push_back(run_sweep(p.algorithms, local, cfg.metric, regen));
        }
      } else {
        DeploymentInstance inst;
        std::optional<OperationalLaws> laws = cfg.generator.laws;
        if (!sw_instance.empty()) {
          inst = io::load_instance(sw_instance);
          inputs.push_back(sw_instance);
        } else if (!sw_fixture.empty()) {
          auto fx = detail::fixture_by_name(sw_fixture, cfg.generator.seed);
          inst = std::move(fx.instance);
          laws = fx.laws;
          inputs.push_back("fixture:" + sw_fixture);
        } else {
          inst = generate_instance(cfg.generator);
          inputs.push_back("generated:instance");
        }
        detail::fit_to_instance(cfg, inst);
        sw_flags.apply(cfg);
        results.push_back(run_sweep(inst, sc, cfg.metric, laws));
      }

      io::RunManifest man{cfg, sc.seed, io::kToolVersion, detail::now_utc(sw_timestamp)};
      const std::string csv_path = sw_prefix + ".csv", json_path = sw_prefix + ".json";
      const std::string sidecar = sw_prefix + ".manifest.json";
      const auto embedded = detail::manifest_with_inputs(man, sidecar, inputs);

      std::string csv;
      io::json detail_results = io::json::array();
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto part = io::sweep_csv(results[i], detail::basename(sidecar));
        // keep the comment and header from the first table only
        csv += i == 0 ? part : part.substr(part.find('\n', part.find('\n') + 1) + 1);
        detail_results.push_back(io::to_json(results[i]));
      }
      io::write_text(csv_path, csv);
      io::write_text(json_path, io::dump({{"manifest", embedded}, {"results", detail_results}}));
      detail::write_manifest(man, sidecar, inputs);

      for (const auto& r : results)
        for (const auto& a : r.aggregates)
          if (a.metric.find('_') == std::string::npos || a.metric.rfind("fss_", 0) == 0 ||
              a.metric.rfind("arq_", 0) == 0 || a.metric == "mldi_enhanced")
            out << r.target << " " << a.metric << " q=" << detail::fmt(a.q) << " mean=" << detail::fmt(a.mean)
                << " std=" << detail::fmt(a.std) << "\n";
      out << "wrote " << csv_path << ", " << json_path << ", " << sidecar << "\n";
      return 0;
    }

    if (*report) {
      std::vector<std::pair<std::string, std::string>> texts;
      for (const auto& path : rep_inputs) texts.emplace_back(path, io::read_text(path));
      const auto merged = io::merge_sweep_csv(texts);
      io::write_text(rep_out, merged);
      out << "wrote " << rep_out << "\n";
      return 0;
    }
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace degen::cli
