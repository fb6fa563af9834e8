#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbvp/harness.hpp"

namespace {

using nlohmann::json;

// `--set solver.N=256` style dotted-path overrides onto the config JSON.
void apply_override(json& j, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw sbvp::ConfigError("override `" + kv + "` is not key=value");
  std::string path = kv.substr(0, eq);
  std::string value = kv.substr(eq + 1);
  json* cur = &j;
  std::size_t pos = 0;
  while (true) {
    auto dot = path.find('.', pos);
    std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (dot == std::string::npos) {
      json parsed;
      try {
        parsed = json::parse(value);
      } catch (...) {
        parsed = value;  // plain string
      }
      (*cur)[key] = parsed;
      return;
    }
    cur = &(*cur)[key];
    pos = dot + 1;
  }
}

int status_code(const sbvp::RunResult& r) { return static_cast<int>(r.status); }

void print_reports(const std::vector<sbvp::HypothesisReport>& reports) {
  for (const auto& rep : reports) {
    const char* v = rep.verdict == sbvp::HypothesisReport::Verdict::Holds ? "holds"
                    : rep.verdict == sbvp::HypothesisReport::Verdict::Fails
                        ? "fails"
                        : "inconclusive";
    std::printf("  %-4s %-13s margin=% .6g%s  %s\n", rep.label.c_str(), v, rep.margin,
                rep.trending_unbounded ? " (unbounded)" : "", rep.notes.c_str());
  }
}

void print_summary(const sbvp::RunResult& result) {
  if (!result.reports.empty()) {
    std::printf("hypotheses:\n");
    print_reports(result.reports);
  }
  if (result.solution) {
    const auto& d = result.solution->diag;
    std::printf("solve: converged=%d reg_cauchy=%d n_final=%ld\n", d.converged,
                d.reg_cauchy, d.n_final);
    std::printf("  fp_residual=%.3e ode_residual=%.3e bc_residual=%.3e\n",
                d.fp_residual, d.ode_residual, d.bc_residual);
    std::printf("  positivity=%d cone=%d stage_diff=%.3e\n", d.positivity_ok,
                d.cone_ok, d.stage_diff);
    if (d.m_final > 0)
      std::printf("  m_final=%g tail=%.3e compact_diff=%.3e\n", d.m_final, d.tail,
                  d.compact_diff);
    if (!d.flag.empty()) std::printf("  flag: %s\n", d.flag.c_str());
  }
  if (!result.message.empty()) std::printf("note: %s\n", result.message.c_str());
}

int run_config_json(json j, const std::vector<std::string>& overrides,
                    const std::string& out_path, bool solve) {
  for (const std::string& kv : overrides) apply_override(j, kv);
  sbvp::RunConfig cfg = sbvp::config_from_json(j);
  if (!out_path.empty()) cfg.output_path = out_path;
  if (cfg.output_path.empty() && solve)
    cfg.output_path = sbvp::default_output_dir() + "/sbvp_out." +
                      (cfg.output_format == "csv" ? "csv" : "json");
  sbvp::RunResult result = sbvp::run(cfg, solve);
  print_summary(result);
  if (!cfg.output_path.empty())
    std::printf("artifacts: %s\n", cfg.output_path.c_str());
  return status_code(result);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular boundary-value system toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::vector<std::string> overrides;

  auto* solve = app.add_subcommand("solve", "solve the configured system");
  solve->add_option("config", config_path, "JSON config file")->required();
  solve->add_option("-o,--output", out_path, "artifact path");
  solve->add_option("--set", overrides, "dotted-path override key=value");

  auto* check = app.add_subcommand("check", "run only the hypothesis audit");
  check->add_option("config", config_path, "JSON config file")->required();
  check->add_option("--set", overrides, "dotted-path override key=value");

  auto* kern = app.add_subcommand("kernels", "dump a kernel table");
  std::string bc_name = "three_point";
  int grid_k = 11;
  double alpha = 2.0, beta = 0.0, xi = 0.0, eta = 1.0 / 3.0;
  double a1 = 1, b1 = 1, a2 = 1, b2 = 1;
  long trunc_n = 0;
  kern->add_option("--bc", bc_name, "boundary family");
  kern->add_option("--grid", grid_k, "points per axis");
  kern->add_option("--alpha", alpha);
  kern->add_option("--beta", beta);
  kern->add_option("--xi", xi);
  kern->add_option("--eta", eta);
  kern->add_option("--a1", a1);
  kern->add_option("--b1", b1);
  kern->add_option("--a2", a2);
  kern->add_option("--b2", b2);
  kern->add_option("--n", trunc_n, "truncation index");

  auto* examples = app.add_subcommand("examples", "registry of worked examples");
  examples->require_subcommand(1);
  auto* ex_list = examples->add_subcommand("list", "list registered examples");
  auto* ex_run = examples->add_subcommand("run", "run one example");
  std::string example_id;
  ex_run->add_option("id", example_id, "example id")->required();
  ex_run->add_option("-o,--output", out_path, "artifact path");
  ex_run->add_option("--set", overrides, "dotted-path override key=value");
  auto* ex_all = examples->add_subcommand("run-all", "run every example");
  ex_all->add_option("--set", overrides, "dotted-path override key=value");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed() || check->parsed()) {
      std::ifstream in(config_path);
      if (!in) throw sbvp::ConfigError("cannot open config `" + config_path + "`");
      json j;
      in >> j;
      return run_config_json(std::move(j), overrides, out_path, solve->parsed());
    }

    if (kern->parsed()) {
      json bc_json{{"type", bc_name}, {"alpha", alpha}, {"beta", beta},
                   {"xi", xi},        {"eta", eta},     {"a1", a1},
                   {"b1", b1},        {"a2", a2},       {"b2", b2}};
      sbvp::BoundarySpec bc;
      json cfg_json{
          {"problem",
           {{"interval", json::array({0.0, 1.0})}, {"bc", bc_json}, {"f", "0"}, {"g", "0"}}}};
      sbvp::RunConfig cfg = sbvp::config_from_json(cfg_json);
      bc = cfg.problem.bc;
      bc.n = trunc_n;
      double lo = 0.0, hi = 1.0;
      if (bc.kind == sbvp::BoundarySpec::Kind::ThreePointTruncated) {
        if (bc.n == 0) bc.n = bc.min_truncation_index();
        lo = 1.0 / static_cast<double>(bc.n);
        hi = 1.0 - lo;
      }
      bc.validate();
      std::printf("t,s,K\n");
      for (int i = 0; i < grid_k; ++i) {
        double t = lo + (hi - lo) * i / (grid_k - 1);
        for (int j2 = 0; j2 < grid_k; ++j2) {
          double s = lo + (hi - lo) * j2 / (grid_k - 1);
          double v = 0;
          if (bc.kind == sbvp::BoundarySpec::Kind::FourPointCoupled)
            v = sbvp::kernels::four_point_F(t, s, bc.alpha, bc.beta, bc.xi, bc.eta);
          else
            v = sbvp::kernels::two_point(t, s, bc, lo, hi);
          std::printf("%.12g,%.12g,%.12g\n", t, s, v);
        }
      }
      return 0;
    }

    if (ex_list->parsed()) {
      for (const sbvp::ExampleRecord& rec : sbvp::registry()) {
        std::printf("%-28s %-38s %s\n", rec.id.c_str(), rec.anchor.c_str(),
                    rec.description.c_str());
      }
      return 0;
    }
    if (ex_run->parsed()) {
      const sbvp::ExampleRecord& rec = sbvp::registry_get(example_id);
      json j = rec.config.to_json();
      std::printf("== %s (%s)\n", rec.id.c_str(), rec.anchor.c_str());
      return run_config_json(std::move(j), overrides, out_path, true);
    }
    if (ex_all->parsed()) {
      int worst = 0;
      for (const sbvp::ExampleRecord& rec : sbvp::registry()) {
        json j = rec.config.to_json();
        std::printf("== %s (%s)\n", rec.id.c_str(), rec.anchor.c_str());
        int rc = run_config_json(std::move(j), overrides,
                                 sbvp::default_output_dir() + "/" + rec.id + ".json",
                                 true);
        worst = std::max(worst, rc);
      }
      return worst;
    }
  } catch (const sbvp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 0;
}
