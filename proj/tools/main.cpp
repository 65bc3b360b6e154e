// turbuq command line: synthesize paired datasets, train the correction
// network, evaluate held-out stations, and perturb single tensors.
//
// Exit codes: 0 success, 2 usage/validation, 3 I/O, 4 dataset, 5 checkpoint.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "turbuq/checkpoint.hpp"
#include "turbuq/dataset.hpp"
#include "turbuq/epm.hpp"
#include "turbuq/errors.hpp"
#include "turbuq/numfmt.hpp"
#include "turbuq/pipeline.hpp"
#include "turbuq/synth.hpp"
#include "turbuq/train.hpp"

namespace {

using namespace turbuq;

nlohmann::json tensor_json(const SymTensor3& t) {
  return {{"xx", t.xx}, {"yy", t.yy}, {"zz", t.zz}, {"xy", t.xy}, {"xz", t.xz}, {"yz", t.yz}};
}

std::vector<double> parse_components(const std::string& text) {
  std::vector<double> out;
  std::string cur;
  std::istringstream ss(text);
  while (std::getline(ss, cur, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cur, &used));
      if (used != cur.size()) throw std::invalid_argument(cur);
    } catch (const std::exception&) {
      throw InvalidConfig("bad tensor component '" + cur + "'");
    }
  }
  if (out.size() != 6)
    throw InvalidConfig("expected 6 comma-separated components xx,yy,zz,xy,xz,yz, got " +
                        std::to_string(out.size()));
  return out;
}

LimitingState parse_target(const std::string& token) {
  if (token == "1c" || token == "1C") return LimitingState::OneComponent;
  if (token == "2c" || token == "2C") return LimitingState::TwoComponent;
  if (token == "3c" || token == "3C") return LimitingState::ThreeComponent;
  throw InvalidConfig("unknown perturbation target '" + token + "', expected 1c, 2c, or 3c");
}

struct SynthArgs {
  std::string out;
  data::SynthConfig cfg;
  std::string law = "powerlaw";
};

struct TrainArgs {
  std::string data_path;
  std::string out;
  double u_inf = 0.0;
  ml::TrainingConfig cfg;
  std::string loss = "mae";
};

struct EvaluateArgs {
  std::string data_path;
  std::string model;
  std::string report;
  double u_inf = 0.0;
};

struct PerturbArgs {
  double k = 1.0;
  std::string b = "0,0,0,0,0,0";
  double delta_b = 1.0;
  std::string targets = "1c,2c,3c";
};

int run_synth(const SynthArgs& a) {
  data::SynthConfig cfg = a.cfg;
  if (a.law == "powerlaw") {
    cfg.law = data::DiscrepancyLaw::PowerLaw;
  } else if (a.law == "identity") {
    cfg.law = data::DiscrepancyLaw::Identity;
  } else {
    throw InvalidConfig("unknown law '" + a.law + "', expected powerlaw or identity");
  }
  const data::ProfileSet ps = data::synthesize(cfg);
  data::write_dataset(ps, a.out);
  std::cout << "wrote " << ps.profiles.size() << " profiles (" << ps.record_count()
            << " records) to " << a.out << "\n";
  return 0;
}

int run_train(const TrainArgs& a) {
  ml::TrainingConfig cfg = a.cfg;
  if (a.loss == "mae") {
    cfg.loss = ml::Loss::Mae;
  } else if (a.loss == "mse") {
    cfg.loss = ml::Loss::Mse;
  } else {
    throw InvalidConfig("unknown loss '" + a.loss + "', expected mae or mse");
  }
  cfg.validate();

  const data::ProfileSet ps = data::load_dataset(a.data_path, a.u_inf);
  const data::SplitAssignment split = data::split_profiles(
      ps, cfg.train_fraction, cfg.val_fraction, cfg.test_fraction, cfg.seed);
  const data::SplitWindows sw = data::prepare_training_windows(ps, split);

  ml::CnnModel model = ml::CnnModel::init(ml::CnnArchitecture::conv_net(), cfg.seed);
  const ml::TrainResult result = ml::train(std::move(model), sw.train, sw.val, cfg);

  Checkpoint ckpt;
  ckpt.model = result.model;
  ckpt.standardization = sw.stats;
  ckpt.seed = cfg.seed;
  save_checkpoint(ckpt, a.out);

  std::filesystem::path history_path(a.out);
  history_path.replace_extension();
  history_path += ".history.json";
  nlohmann::json h{{"loss", a.loss},
                   {"learning_rate", cfg.learning_rate},
                   {"patience", cfg.patience},
                   {"max_epochs", cfg.max_epochs},
                   {"batch_size", cfg.batch_size},
                   {"seed", cfg.seed},
                   {"epochs_run", result.history.train_loss.size()},
                   {"best_epoch", result.history.best_epoch},
                   {"stopped_early", result.history.stopped_early},
                   {"train_loss", result.history.train_loss},
                   {"val_loss", result.history.val_loss}};
  std::ofstream hout(history_path);
  if (!hout) throw IoError("cannot write history file " + history_path.string());
  hout << h.dump(2) << "\n";

  const int best = result.history.best_epoch;
  std::cout << "trained on " << sw.train.size() << " windows (" << sw.val.size() << " val, "
            << sw.test.size() << " test held out)\n";
  std::cout << "best epoch " << best << ": train loss "
            << format_double(result.history.train_loss.at(static_cast<std::size_t>(best)))
            << ", val loss "
            << format_double(result.history.val_loss.at(static_cast<std::size_t>(best))) << "\n";
  std::cout << "checkpoint " << a.out << " (history " << history_path.string() << ")\n";
  return 0;
}

int run_evaluate(const EvaluateArgs& a) {
  const Checkpoint ckpt = load_checkpoint(a.model);
  const data::ProfileSet ps = data::load_dataset(a.data_path, a.u_inf);
  const data::SplitAssignment split = data::split_profiles(ps, 0.75, 0.05, 0.20, ckpt.seed);

  std::vector<uq::StationEvaluation> evals;
  for (std::size_t i = 0; i < ps.profiles.size(); ++i) {
    if (split.partition[i] != data::Partition::Test) continue;
    evals.push_back(uq::evaluate_station(ps.profiles[i], ckpt));
  }
  if (evals.empty())
    throw TooFewProfiles("test partition is empty; the dataset has too few profiles");

  uq::write_report(evals, a.report);
  const uq::StationReport pooled = uq::pooled_report(evals);
  std::cout << "evaluated " << evals.size() << " test stations -> " << a.report << "\n";
  std::cout << "aggregate: mae_baseline " << format_double(pooled.mae_baseline)
            << ", mae_corrected " << format_double(pooled.mae_corrected) << ", improvement "
            << format_double(pooled.improvement_factor) << ", coverage "
            << format_double(pooled.coverage) << "\n";
  return 0;
}

int run_perturb(const PerturbArgs& a) {
  if (!(a.k > 0.0) || !std::isfinite(a.k))
    throw InvalidConfig("k must be positive and finite, got " + format_double(a.k));
  const std::vector<double> c = parse_components(a.b);
  const SymTensor3 b{c[0], c[1], c[2], c[3], c[4], c[5]};
  const SymTensor3 third = SymTensor3::diag(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
  const SymTensor3 r = 2.0 * a.k * (b + third);
  if (!is_realizable(r))
    throw InvalidConfig("input tensor is not realizable (k = " + format_double(a.k) +
                        ", b = " + a.b + ")");

  std::vector<PerturbationSpec> specs;
  nlohmann::json members = nlohmann::json::array();
  std::string token;
  std::istringstream ts(a.targets);
  while (std::getline(ts, token, ',')) {
    PerturbationSpec spec;
    spec.target = parse_target(token);
    spec.delta_b = a.delta_b;
    spec.validate();
    specs.push_back(spec);
    members.push_back(
        {{"target", corner_name(spec.target)}, {"tensor", tensor_json(apply_perturbation(r, spec))}});
  }
  if (specs.empty()) throw InvalidConfig("no perturbation targets given");

  const Envelope env = envelope(r, specs);
  const nlohmann::json out{{"k", a.k},
                           {"delta_b", a.delta_b},
                           {"input", tensor_json(r)},
                           {"members", members},
                           {"envelope", {{"lower", tensor_json(env.lower)},
                                         {"upper", tensor_json(env.upper)}}}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reynolds-stress uncertainty toolkit: eigenspace perturbation with a "
               "learned turbulent-kinetic-energy correction"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic paired dataset");
  synth->add_option("--out", synth_args.out, "output csv path")->required();
  synth->add_option("--profiles", synth_args.cfg.profiles, "number of station profiles");
  synth->add_option("--points", synth_args.cfg.points, "points per profile");
  synth->add_option("--noise", synth_args.cfg.noise_sigma, "gaussian noise sigma on targets");
  synth->add_option("--seed", synth_args.cfg.seed, "random seed");
  synth->add_option("--law", synth_args.law, "discrepancy law: powerlaw or identity");

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train the correction network");
  train->add_option("--data", train_args.data_path, "input dataset csv")->required();
  train->add_option("--out", train_args.out, "checkpoint output path")->required();
  train->add_option("--seed", train_args.cfg.seed, "split/init/shuffle seed");
  train->add_option("--lr", train_args.cfg.learning_rate, "Adam learning rate");
  train->add_option("--patience", train_args.cfg.patience, "early stopping patience");
  train->add_option("--max-epochs", train_args.cfg.max_epochs, "epoch budget");
  train->add_option("--batch-size", train_args.cfg.batch_size, "mini-batch size");
  train->add_option("--loss", train_args.loss, "objective: mae or mse");
  train->add_option("--u-inf", train_args.u_inf, "freestream velocity override");

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "report on held-out test stations");
  evaluate->add_option("--data", eval_args.data_path, "input dataset csv")->required();
  evaluate->add_option("--model", eval_args.model, "checkpoint path")->required();
  evaluate->add_option("--report", eval_args.report, "report output directory")->required();
  evaluate->add_option("--u-inf", eval_args.u_inf, "freestream velocity override");

  PerturbArgs perturb_args;
  CLI::App* perturb = app.add_subcommand("perturb", "perturb one Reynolds stress");
  perturb->add_option("--k", perturb_args.k, "turbulent kinetic energy")->required();
  perturb->add_option("--b", perturb_args.b, "anisotropy components xx,yy,zz,xy,xz,yz");
  perturb->add_option("--delta-b", perturb_args.delta_b, "perturbation magnitude in [0, 1]");
  perturb->add_option("--targets", perturb_args.targets, "comma list of 1c, 2c, 3c");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(synth)) return run_synth(synth_args);
    if (app.got_subcommand(train)) return run_train(train_args);
    if (app.got_subcommand(evaluate)) return run_evaluate(eval_args);
    if (app.got_subcommand(perturb)) return run_perturb(perturb_args);
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const DatasetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
