// Copyright 2026 The myolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "myolab/loop.h"
#include "myolab/svg.h"
#include "myolab/util.h"

namespace fs = std::filesystem;
using namespace myolab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitTransport = 3;

struct PlannerFlags {
  PlannerConfig config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--horizon", config.horizon,
                    "planning horizon in control steps")
        ->capture_default_str();
    cmd->add_option("--n-samples", config.n_samples,
                    "posture candidates per plan")
        ->capture_default_str();
    cmd->add_option("--noise-sigma", config.noise_sigma,
                    "candidate sampling noise (rad)")
        ->capture_default_str();
    cmd->add_option("--lambda", config.temperature, "MPPI temperature")
        ->capture_default_str();
    cmd->add_option("--instant-fraction", config.instant_fraction,
                    "fraction of candidates sampled around the current posture")
        ->capture_default_str();
    cmd->add_option("--replan-interval", config.replan_interval,
                    "control steps between plans")
        ->capture_default_str();
    cmd->add_option("--k-bar", config.k_bar,
                    "global gain of the low-level force law")
        ->capture_default_str();
  }
};

std::string require_file(const std::string& path) {
  if (!fs::exists(path)) {
    std::cerr << "error: file not found: " << path << "\n";
    std::exit(kExitUsage);
  }
  return read_file(path);
}

RewardProgram load_program_or_default(const std::string& path,
                                      const std::string& task_id) {
  if (path.empty()) return parse_program(default_program_text(task_id));
  return parse_program(require_file(path));
}

Eigen::VectorXd load_controls(const std::string& path, int nu) {
  std::ifstream file(path);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(nu);
  for (int i = 0; i < nu; ++i) {
    if (!(file >> u[i])) {
      throw SimError("controls file must hold " + std::to_string(nu) +
                     " values: " + path);
    }
  }
  return u;
}

void write_frames(const std::string& dir, const FrameSequence& seq) {
  fs::create_directories(dir);
  for (size_t f = 0; f < seq.frames.size(); ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "/frame_%04d.png", static_cast<int>(f));
    write_png(dir + name, seq.frames[f]);
  }
}

int cmd_simulate(const std::string& task_id, const std::string& program_path,
                 int steps, uint64_t seed, const std::string& out_dir,
                 const std::string& controls_path, double rate) {
  const TaskBundle task = build_task(task_id, seed);
  const RewardProgram program = load_program_or_default(program_path, task_id);

  TaskContext context;
  context.spec = task.spec;
  Kinematics kin;
  forward_kinematics(task.morphology, task.initial_state.joints.q,
                     task.initial_state.joints.qdot, kin);
  context.start_x = kin.pos[static_cast<size_t>(task.morphology.torso_link)].x();

  SimConfig sim_config;
  Simulator sim(task.morphology, task.terrain, sim_config);
  FeatureExtractor extractor(sim.morphology(), sim.terrain(), context);

  Eigen::VectorXd constant =
      Eigen::VectorXd::Zero(task.morphology.muscle_count());
  if (!controls_path.empty()) {
    require_file(controls_path);
    constant = load_controls(controls_path, task.morphology.muscle_count());
  }
  const Policy policy = [&](const SystemState&) { return constant; };

  const Trajectory traj =
      rollout(sim, extractor, policy, task.initial_state, steps, program);
  fs::create_directories(out_dir);
  write_trajectory_csv(out_dir + "/trajectory.csv", traj, task.morphology);
  RenderOptions ro;
  ro.rate = rate;
  write_frames(out_dir + "/frames",
               render_frames(traj, task.morphology, task.terrain, task.spec, ro));
  std::cout << "rows: " << traj.steps.size() << "\n"
            << "trajectory: " << out_dir << "/trajectory.csv\n";
  if (traj.truncated) std::cout << "truncated at row " << traj.truncated_at << "\n";
  return kExitOk;
}

int cmd_plan(const std::string& task_id, const std::string& program_path,
             double duration, uint64_t seed, const std::string& out_dir,
             const PlannerConfig& planner, int jobs, double rate) {
  const TaskBundle task = build_task(task_id, seed);
  const RewardProgram program = load_program_or_default(program_path, task_id);

  TaskContext context;
  context.spec = task.spec;
  Kinematics kin;
  forward_kinematics(task.morphology, task.initial_state.joints.q,
                     task.initial_state.joints.qdot, kin);
  context.start_x = kin.pos[static_cast<size_t>(task.morphology.torso_link)].x();

  SimConfig sim_config;
  PlannerConfig pc = planner;
  pc.jobs = jobs;
  Simulator sim(task.morphology, task.terrain, sim_config);
  FeatureExtractor extractor(sim.morphology(), sim.terrain(), context);
  MpcPolicy policy(task.morphology, task.terrain, sim_config, context, pc,
                   program, seed);

  const int steps = static_cast<int>(std::lround(duration / sim_config.dt));
  const Trajectory traj = rollout(
      sim, extractor, [&](const SystemState& s) { return policy(s); },
      task.initial_state, steps, program, sim_config.control_substeps);

  fs::create_directories(out_dir);
  write_trajectory_csv(out_dir + "/trajectory.csv", traj, task.morphology);
  RenderOptions ro;
  ro.rate = rate;
  write_frames(out_dir + "/frames",
               render_frames(traj, task.morphology, task.terrain, task.spec, ro));

  const double score = oracle_score(task.spec, task.morphology, traj);
  std::cout << "oracle score: " << format_double(score) << "\n";
  if (!task.spec.locomotion && task.spec.target_position) {
    FeatureExtractor fx(task.morphology, task.terrain, context);
    const FeatureFrame& frame = fx.extract(
        traj.steps.back().state, traj.steps.back().control, nullptr);
    std::cout << "final position error: "
              << format_double(frame.scalar(FeatureId::kTargetPositionError))
              << "\nfinal orientation error: "
              << format_double(frame.scalar(FeatureId::kTargetOrientationError))
              << "\n";
  }
  return kExitOk;
}

int cmd_learn(RunConfig config, const std::string& program_path, bool do_resume) {
  if (!program_path.empty()) {
    config.initial_program = require_file(program_path);
  }
  const bool out_exists =
      fs::exists(config.out_dir) && !fs::is_empty(config.out_dir);
  if (out_exists && !do_resume) {
    std::cerr << "error: output directory " << config.out_dir
              << " is not empty (use --resume to continue a run)\n";
    return kExitUsage;
  }

  LoopDeps deps;
  const RunHistory history = do_resume && out_exists
                                 ? myolab::resume(config.out_dir, deps)
                                 : myolab::run(config, deps);

  std::cout << "iter  incumbent_score\n";
  for (const auto& rec : history.iterations) {
    std::cout << rec.index << "     "
              << (rec.incumbent_score ? format_double(*rec.incumbent_score)
                                      : std::string("-"))
              << "\n";
  }
  if (history.failed) {
    std::cerr << "run failed: " << history.failure << "\n";
    return kExitTransport;
  }
  std::cout << "final program: " << config.out_dir << "/"
            << history.final_program_path << "\n";
  return kExitOk;
}

int cmd_export_heatmap(const std::string& run_dir) {
  if (!fs::exists(run_dir + "/history.json")) {
    std::cerr << "error: no history.json in " << run_dir << "\n";
    return kExitUsage;
  }
  const HeatmapFiles files = export_heatmap(run_dir);
  std::cout << files.csv << "\n" << files.raw_csv << "\n" << files.svg << "\n";
  return kExitOk;
}

int cmd_render(const std::string& trajectory_path, const std::string& task_id,
               uint64_t seed, double rate, const std::string& out_dir) {
  require_file(trajectory_path);
  const TaskBundle task = build_task(task_id, seed);
  const Trajectory traj = read_trajectory_csv(trajectory_path, task.morphology);
  RenderOptions ro;
  ro.rate = rate;
  const FrameSequence seq =
      render_frames(traj, task.morphology, task.terrain, task.spec, ro);
  write_frames(out_dir, seq);
  std::cout << "frames: " << seq.frames.size() << " -> " << out_dir << "\n";
  return kExitOk;
}

int cmd_tasks() {
  for (const auto& id : task_catalog()) {
    const TaskBundle task = build_task(id, 0);
    std::cout << id << "  [" << task.spec.morphology_preset << "]  "
              << task.spec.motion_description << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar musculoskeletal control lab with automatic reward learning"};
  app.require_subcommand(1);

  // ----- simulate ----- //
  auto* simulate = app.add_subcommand(
      "simulate", "roll a task under zero or constant controls");
  std::string sim_task = "walker_flat", sim_program, sim_out = "out/simulate";
  std::string sim_controls;
  int sim_steps = 1000;
  uint64_t sim_seed = 1;
  double sim_rate = 10.0;
  simulate->add_option("--task", sim_task, "task id")->capture_default_str();
  simulate->add_option("--program", sim_program,
                       "reward program path (default: task preset)");
  simulate->add_option("--steps", sim_steps, "sim steps")->capture_default_str();
  simulate->add_option("--seed", sim_seed, "task seed")->capture_default_str();
  simulate->add_option("--out", sim_out, "output directory")
      ->capture_default_str();
  simulate->add_option("--controls", sim_controls,
                       "file of constant muscle commands");
  simulate->add_option("--rate", sim_rate, "frame rate (Hz)")
      ->capture_default_str();

  // ----- plan ----- //
  auto* plan = app.add_subcommand("plan", "run the MPC policy once and score it");
  std::string plan_task = "walker_flat", plan_program, plan_out = "out/plan";
  double plan_duration = 10.0, plan_rate = 10.0;
  uint64_t plan_seed = 1;
  int plan_jobs = 1;
  PlannerFlags plan_flags;
  plan->add_option("--task", plan_task, "task id")->capture_default_str();
  plan->add_option("--program", plan_program,
                   "reward program path (default: task preset)");
  plan->add_option("--duration", plan_duration, "sim time (s)")
      ->capture_default_str();
  plan->add_option("--seed", plan_seed, "planner + task seed")
      ->capture_default_str();
  plan->add_option("--out", plan_out, "output directory")->capture_default_str();
  plan->add_option("--jobs", plan_jobs, "worker threads")->capture_default_str();
  plan->add_option("--rate", plan_rate, "frame rate (Hz)")->capture_default_str();
  plan_flags.attach(plan);

  // ----- learn ----- //
  auto* learn =
      app.add_subcommand("learn", "run the full reward-learning loop");
  RunConfig learn_config;
  std::string learn_program;
  bool learn_resume = false;
  uint64_t learn_seed = 1;
  PlannerFlags learn_flags;
  learn->add_option("--task", learn_config.task_id, "task id")
      ->capture_default_str();
  learn->add_option("--program", learn_program,
                    "initial reward program path (default: task preset)");
  learn->add_option("--iters", learn_config.iterations, "max iterations N")
      ->capture_default_str();
  learn->add_option("--samples", learn_config.samples_per_iter,
                    "candidate programs per iteration")
      ->capture_default_str();
  learn->add_option("--seed", learn_seed,
                    "master seed (sets sim/planner/synthesis seeds)")
      ->capture_default_str();
  learn->add_option("--seed-sim", learn_config.seed_sim, "simulation seed")
      ->capture_default_str();
  learn->add_option("--seed-planner", learn_config.seed_planner, "planner seed")
      ->capture_default_str();
  learn->add_option("--seed-synth", learn_config.seed_synth, "synthesis seed")
      ->capture_default_str();
  learn
      ->add_option("--judge", [&](const CLI::results_t& res) {
        if (res[0] == "oracle") {
          learn_config.judge_mode = RunConfig::JudgeMode::kOracle;
        } else if (res[0] == "endpoint") {
          learn_config.judge_mode = RunConfig::JudgeMode::kEndpoint;
        } else {
          return false;
        }
        return true;
      })
      ->description("judge mode: oracle | endpoint")
      ->default_str("oracle");
  learn
      ->add_option("--synth", [&](const CLI::results_t& res) {
        if (res[0] == "mock") {
          learn_config.synth_mode = RunConfig::SynthMode::kMock;
        } else if (res[0] == "endpoint") {
          learn_config.synth_mode = RunConfig::SynthMode::kEndpoint;
        } else {
          return false;
        }
        return true;
      })
      ->description("synthesizer mode: mock | endpoint")
      ->default_str("mock");
  learn->add_option("--duration", learn_config.horizon_seconds,
                    "rollout sim time per candidate (s)")
      ->capture_default_str();
  learn->add_option("--out", learn_config.out_dir, "run directory")
      ->required();
  learn->add_flag("--resume", learn_resume,
                  "continue an interrupted run in --out");
  learn->add_option("--jobs", learn_config.jobs, "worker threads")
      ->capture_default_str();
  learn->add_option("--max-weight", learn_config.max_weight,
                    "upper bound for term weights")
      ->capture_default_str();
  learn_flags.attach(learn);

  // ----- export-heatmap ----- //
  auto* heatmap = app.add_subcommand(
      "export-heatmap", "write weight-evolution CSV + SVG for a run");
  std::string heatmap_run;
  heatmap->add_option("--run", heatmap_run, "run directory")->required();

  // ----- render ----- //
  auto* render =
      app.add_subcommand("render", "draw frames from a stored trajectory CSV");
  std::string render_traj, render_task = "walker_flat", render_out = "out/render";
  uint64_t render_seed = 1;
  double render_rate = 10.0;
  render->add_option("--trajectory", render_traj, "trajectory csv")->required();
  render->add_option("--task", render_task, "task id for the morphology")
      ->capture_default_str();
  render->add_option("--seed", render_seed, "task seed")->capture_default_str();
  render->add_option("--rate", render_rate, "frame rate (Hz)")
      ->capture_default_str();
  render->add_option("--out", render_out, "frame directory")
      ->capture_default_str();

  // ----- tasks ----- //
  app.add_subcommand("tasks", "list the task catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      return cmd_simulate(sim_task, sim_program, sim_steps, sim_seed, sim_out,
                          sim_controls, sim_rate);
    }
    if (plan->parsed()) {
      return cmd_plan(plan_task, plan_program, plan_duration, plan_seed,
                      plan_out, plan_flags.config, plan_jobs, plan_rate);
    }
    if (learn->parsed()) {
      if (learn->count("--seed") &&
          !learn->count("--seed-sim") && !learn->count("--seed-planner") &&
          !learn->count("--seed-synth")) {
        learn_config.seed_sim = learn_seed;
        learn_config.seed_planner = learn_seed + 1;
        learn_config.seed_synth = learn_seed + 2;
      }
      learn_config.planner = learn_flags.config;
      return cmd_learn(learn_config, learn_program, learn_resume);
    }
    if (heatmap->parsed()) return cmd_export_heatmap(heatmap_run);
    if (render->parsed()) {
      return cmd_render(render_traj, render_task, render_seed, render_rate,
                        render_out);
    }
    return cmd_tasks();
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
