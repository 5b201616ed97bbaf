#include "attnalloc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "attnalloc/config.hpp"
#include "attnalloc/errors.hpp"
#include "attnalloc/model_io.hpp"
#include "attnalloc/records_io.hpp"
#include "attnalloc/report_io.hpp"
#include "attnalloc/world_io.hpp"

namespace attnalloc {

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string config_path;
  std::string out_path;
};

// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw IoError("failed writing '" + path + "'");
}

ExperimentConfig resolve_config(const GlobalOptions& g) {
  ExperimentConfig config = g.config_path.empty() ? ExperimentConfig{} : load_config(g.config_path);
  if (g.seed_given) config.seed = g.seed;
  config.validate();
  return config;
}

std::vector<double> read_weights_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "': file not found or unreadable");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line.rfind("object_id,weight", 0) != 0)
    throw ParseError(path, 1, "expected header 'object_id,weight'");
  std::vector<double> weights;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing comma");
      const auto id = std::stoul(line.substr(0, comma));
      if (id != weights.size()) throw std::invalid_argument("object ids must be 0..n-1 in order");
      weights.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception& e) {
      throw ParseError(path, line_no, std::string("bad weight row: ") + e.what());
    }
  }
  return weights;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attention-aware rendering capacity allocation: synthetic attention data, "
               "matrix-factorization prediction and log-QoE allocation.",
               "attnalloc"};
  app.require_subcommand(0, 1);

  GlobalOptions g;
  bool print_config = false;
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--config", g.config_path, "Experiment configuration (INI sections)");
  app.add_option("--out", g.out_path, "Output path (stdout when omitted)");
  app.add_flag("--print-config", print_config, "Print the effective configuration and exit");

  std::function<void()> action;

  auto* generate = app.add_subcommand("generate", "Generate a synthetic world (JSON)")->fallthrough();
  generate->callback([&] {
    action = [&] {
      const auto config = resolve_config(g);
      const World world = generate_world(config.world, config.seed);
      emit(g.out_path, out, [&](std::ostream& os) { os << world_to_json(world).dump(1) << '\n'; });
    };
  });

  std::string world_path, truth_out;
  int sparsify_user = -1;
  auto* sparsify_cmd = app.add_subcommand("sparsify", "Sparse attention records (CSV)")->fallthrough();
  sparsify_cmd->add_option("--world", world_path, "World file; generated from config and seed when omitted");
  sparsify_cmd->add_option("--user", sparsify_user, "Single user (all users when omitted)");
  sparsify_cmd->add_option("--ground-truth", truth_out, "Also write the dense ground-truth level table here");
  sparsify_cmd->callback([&] {
    action = [&] {
      const auto config = resolve_config(g);
      const World world = world_path.empty() ? generate_world(config.world, config.seed) : load_world(world_path);
      const auto records =
          sparsify_user >= 0 ? sparsify(world, sparsify_user, config.seed) : sparsify_all(world, config.seed);
      emit(g.out_path, out, [&](std::ostream& os) { write_records_csv(os, records); });
      if (!truth_out.empty()) save_ground_truth(ground_truth_levels(world), truth_out);
    };
  });

  std::string records_path;
  FitConfig fit_overrides;
  int shape_users = 0, shape_objects = 0;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a latent factor model (JSON)")->fallthrough();
  fit_cmd->add_option("--records", records_path, "Training records CSV")->required();
  auto* f_opt = fit_cmd->add_option("--factors", fit_overrides.factors);
  auto* lr_opt = fit_cmd->add_option("--learning-rate", fit_overrides.learning_rate);
  auto* reg_opt = fit_cmd->add_option("--regularization", fit_overrides.regularization);
  auto* ep_opt = fit_cmd->add_option("--epochs", fit_overrides.epochs);
  auto* init_opt = fit_cmd->add_option("--init-scale", fit_overrides.init_scale);
  fit_cmd->add_option("--num-users", shape_users, "Model rows (default: largest user id + 1)");
  fit_cmd->add_option("--num-objects", shape_objects, "Model columns (default: largest object id + 1)");
  fit_cmd->callback([&] {
    action = [&] {
      const auto config = resolve_config(g);
      FitConfig fit = config.fit;
      if (f_opt->count()) fit.factors = fit_overrides.factors;
      if (lr_opt->count()) fit.learning_rate = fit_overrides.learning_rate;
      if (reg_opt->count()) fit.regularization = fit_overrides.regularization;
      if (ep_opt->count()) fit.epochs = fit_overrides.epochs;
      if (init_opt->count()) fit.init_scale = fit_overrides.init_scale;
      fit.seed = config.seed;
      const auto records = load_records(records_path);
      std::optional<ModelShape> shape;
      if (shape_users > 0 || shape_objects > 0)
        shape = ModelShape{std::max(shape_users, records.user_extent()), std::max(shape_objects, records.object_extent())};
      const auto model = fit_mf(records, fit, shape);
      emit(g.out_path, out, [&](std::ostream& os) { os << model_to_json(model).dump(1) << '\n'; });
    };
  });

  std::string model_path, truth_path;
  int max_per_user = -1;
  auto* eval_cmd = app.add_subcommand("eval", "Held-out RMSE/MAE of a model and the mean baseline (JSON)")->fallthrough();
  eval_cmd->add_option("--model", model_path, "Model JSON")->required();
  eval_cmd->add_option("--records", records_path, "Training records; held-out pairs are those not listed here")->required();
  eval_cmd->add_option("--truth", truth_path, "Dense ground-truth CSV")->required();
  eval_cmd->add_option("--max-per-user", max_per_user, "Held-out pairs sampled per user (all when negative)");
  eval_cmd->callback([&] {
    action = [&] {
      const auto config = resolve_config(g);
      const auto model = load_model(model_path);
      const auto records = load_records(records_path);
      const auto truth_records = load_records(truth_path);
      const auto truth = to_level_matrix(truth_records, truth_records.user_extent(), truth_records.object_extent());
      const auto mask = holdout_mask(records, truth, config.seed, max_per_user);
      const auto mf = evaluate([&](UserId u, ObjectId o) { return model.predict(u, o); }, truth, mask);
      const auto baseline_model = fit_baseline(records);
      const auto base = evaluate([&](UserId u, ObjectId o) { return baseline_model.predict(u, o); }, truth, mask);
      const nlohmann::json doc = {{"version", kReportVersion},
                                  {"seed", config.seed},
                                  {"heldout_pairs", mask.size()},
                                  {"mf", {{"rmse", mf.rmse}, {"mae", mf.mae}}},
                                  {"baseline", {{"rmse", base.rmse}, {"mae", base.mae}}}};
      emit(g.out_path, out, [&](std::ostream& os) { os << doc.dump(1) << '\n'; });
    };
  });

  std::vector<double> weights;
  std::string weights_path, summary_path;
  double budget = 0.0, floor = 15.0;
  bool uniform = false;
  auto* alloc_cmd = app.add_subcommand("allocate", "Solve one allocation problem (CSV)")->fallthrough();
  auto* w_opt = alloc_cmd->add_option("--weights", weights, "Comma-separated attention weights")->delimiter(',');
  auto* in_opt = alloc_cmd->add_option("--input", weights_path, "CSV with header object_id,weight");
  w_opt->excludes(in_opt);
  alloc_cmd->add_option("--budget", budget, "Total rendering capacity (K)")->required();
  alloc_cmd->add_option("--floor", floor, "Per-object minimum capacity (K)")->capture_default_str();
  alloc_cmd->add_flag("--uniform", uniform, "Uniform split instead of the weighted optimum");
  alloc_cmd->add_option("--summary", summary_path, "Also write a JSON summary here");
  alloc_cmd->callback([&] {
    if (weights.empty() && weights_path.empty()) throw CLI::RequiredError("--weights or --input");
    action = [&] {
      if (!weights_path.empty()) weights = read_weights_csv(weights_path);
      const AllocationProblem problem{weights, budget, floor};
      problem.validate();
      auto result = uniform ? allocate_uniform(static_cast<int>(weights.size()), budget, floor)
                            : allocate_weighted(problem);
      if (uniform) result.objective = log_objective(weights, result.capacities);
      emit(g.out_path, out, [&](std::ostream& os) { write_allocation_csv(os, weights, result); });
      if (!summary_path.empty())
        emit(summary_path, out, [&](std::ostream& os) { os << allocation_summary_json(problem, result).dump(1) << '\n'; });
    };
  });

  std::string json_path;
  auto* exp_cmd = app.add_subcommand("experiment", "Per-user uniform / aware / oracle comparison (CSV + JSON)")->fallthrough();
  exp_cmd->add_option("--json", json_path, "JSON summary path (default: --out with .json extension)");
  exp_cmd->callback([&] {
    action = [&] {
      const auto config = resolve_config(g);
      const auto report = run_all(config);
      emit(g.out_path, out, [&](std::ostream& os) { write_user_reports_csv(os, report.users); });
      std::string summary = json_path;
      if (summary.empty() && !g.out_path.empty())
        summary = std::filesystem::path(g.out_path).replace_extension(".json").string();
      if (!summary.empty())
        emit(summary, out, [&](std::ostream& os) { os << run_report_json(report, config).dump(1) << '\n'; });
    };
  });

  int sweep_user = -1;
  bool all_users = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Improvement versus per-object budget (CSV)")->fallthrough();
  auto* user_opt = sweep_cmd->add_option("--user", sweep_user, "User to sweep (default from config)");
  sweep_cmd->add_flag("--all-users", all_users, "Average the improvement over every user")->excludes(user_opt);
  sweep_cmd->add_option("--json", json_path, "JSON summary path");
  sweep_cmd->callback([&] {
    action = [&] {
      const auto config = resolve_config(g);
      const auto context = prepare_experiment(config);
      std::vector<UserId> users;
      if (all_users) {
        for (UserId u = 0; u < context.world.num_users(); ++u) users.push_back(u);
      } else {
        users.push_back(sweep_user >= 0 ? sweep_user : config.sweep_user);
      }
      const auto report = run_sweep(config, context, users);
      emit(g.out_path, out, [&](std::ostream& os) { write_sweep_csv(os, report); });
      if (!json_path.empty())
        emit(json_path, out, [&](std::ostream& os) { os << sweep_report_json(report, config, users).dump(1) << '\n'; });
    };
  });

  std::vector<std::string> argv_storage{"attnalloc"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return e.get_exit_code() == 0 ? 0 : 1;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (print_config) {
      write_config(out, resolve_config(g));
      return 0;
    }
    if (!action) {
      err << app.help();
      return 1;
    }
    action();
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, out, err);
}

}  // namespace attnalloc
