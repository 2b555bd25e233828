#include "commands.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>

int main(int argc, char** argv) {
  using namespace colp::cli;
  CLI::App app{"Poisson neural networks for Lie-Poisson optimal control"};
  app.set_version_flag("--version", tool_version);
  app.require_subcommand(1);

  generate_options gen;
  auto* g = app.add_subcommand("generate", "integrate ground-truth trajectories into a pair dataset");
  g->add_option("--group", gen.group, "so3 or se3")->required()->check(CLI::IsMember({"so3", "se3"}));
  g->add_option("--topology", gen.topology, "dictatorship or democracy")
      ->check(CLI::IsMember({"dictatorship", "democracy"}));
  g->add_option("--particles", gen.particles)->check(CLI::PositiveNumber);
  g->add_option("--chi", gen.chi)->check(CLI::NonNegativeNumber);
  g->add_option("--dt", gen.dt)->check(CLI::PositiveNumber);
  g->add_option("--trajectories", gen.trajectories, "default 40 for so3, 80 for se3")->check(CLI::PositiveNumber);
  g->add_option("--points", gen.points, "points per trajectory")->check(CLI::Range(2, 1 << 30));
  g->add_option("--seed", gen.seed);
  g->add_option("--ic-box", gen.ic_box, "initial states uniform in [-b, b]")->check(CLI::PositiveNumber);
  g->add_option("--substeps", gen.substeps)->check(CLI::PositiveNumber);
  g->add_option("--out", gen.out, "output directory")->required();

  train_options tr;
  auto* t = app.add_subcommand("train", "fit a learned Poisson map to a dataset");
  t->add_option("--data", tr.data, "dataset directory")->required();
  t->add_option("--out", tr.out, "output directory")->required();
  t->add_option("--epochs", tr.epochs)->check(CLI::NonNegativeNumber);
  t->add_option("--lr", tr.lr)->check(CLI::PositiveNumber);
  t->add_option("--width", tr.width, "hidden neurons per map")->check(CLI::PositiveNumber);
  t->add_option("--passes", tr.passes, "sweeps over all (particle, component) maps")->check(CLI::PositiveNumber);
  t->add_option("--init", tr.init, "glorot (uniform, default) or normal (std --init-scale)")
      ->check(CLI::IsMember({"normal", "glorot"}));
  t->add_option("--init-scale", tr.init_scale)->check(CLI::NonNegativeNumber);
  t->add_option("--seed", tr.seed);

  evaluate_options ev;
  auto* e = app.add_subcommand("evaluate", "compare learned and ground-truth rollouts on unseen initial states");
  e->add_option("--model", ev.model, "model.json or the train output directory")->required();
  e->add_option("--data", ev.data, "dataset directory; defaults to the model's recorded provenance");
  e->add_option("--out", ev.out, "output directory")->required();
  e->add_option("--num-initials", ev.num_initials)->check(CLI::PositiveNumber);
  e->add_option("--steps", ev.steps, "default 1000 for so3, 200 for se3")->check(CLI::PositiveNumber);
  e->add_option("--seed", ev.seed);
  e->add_option("--substeps", ev.substeps)->check(CLI::PositiveNumber);
  e->add_option("--ic-box", ev.ic_box)->check(CLI::PositiveNumber);

  selftest_options st;
  auto* s = app.add_subcommand("selftest", "run the fast invariant suite");
  s->add_flag("--quick", st.quick, "skip training-dependent checks");
  s->add_flag("--corrupt-gamma", st.corrupt_gamma, "flip one structure-constant sign to exercise the detectors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  try {
    if (*g) return run_generate(gen);
    if (*t) return run_train(tr);
    if (*e) return run_evaluate(ev);
    if (*s) return run_selftest(st);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 2;
}
