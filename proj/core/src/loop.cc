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

#include "myolab/loop.h"

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "json.hpp"
#include "myolab/svg.h"
#include "myolab/util.h"

namespace myolab {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string iter_dirname(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "iter_%03d", i);
  return buf;
}

std::string proposal_name(int j, const char* suffix) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "proposal_%02d%s", j, suffix);
  return buf;
}

ordered_json history_to_json(const RunHistory& history) {
  ordered_json j;
  j["task_id"] = history.config.task_id;
  j["iterations"] = ordered_json::array();
  for (const auto& rec : history.iterations) {
    ordered_json jr;
    jr["index"] = rec.index;
    jr["proposals"] = ordered_json::array();
    for (const auto& p : rec.proposals) {
      ordered_json jp;
      jp["program"] = p.program_path;
      jp["trajectory"] = p.trajectory_path;
      jp["verdict"] = p.verdict_path;
      if (p.oracle_score) jp["oracle_score"] = *p.oracle_score;
      jp["accepted"] = p.accepted;
      jr["proposals"].push_back(std::move(jp));
    }
    jr["incumbent_program"] = rec.incumbent_program_path;
    jr["incumbent_trajectory"] = rec.incumbent_trajectory_path;
    if (rec.incumbent_score) jr["incumbent_score"] = *rec.incumbent_score;
    jr["feedback"] = rec.feedback_path;
    jr["frames"] = rec.frames_dir;
    jr["next_programs"] = rec.next_program_paths;
    j["iterations"].push_back(std::move(jr));
  }
  j["final_program"] = history.final_program_path;
  j["failed"] = history.failed;
  j["failure"] = history.failure;
  return j;
}

void persist_history(const RunHistory& history) {
  write_file_atomic(history.config.out_dir + "/history.json",
                    history_to_json(history).dump(2) + "\n");
  ordered_json timings;
  timings["iterations"] = ordered_json::array();
  for (const auto& rec : history.iterations) {
    timings["iterations"].push_back(
        {{"index", rec.index}, {"seconds", rec.wall_seconds}});
  }
  write_file_atomic(history.config.out_dir + "/timings.json",
                    timings.dump(2) + "\n");
}

// Shared state of one learning run.
struct Runner {
  RunConfig config;
  TaskBundle task;
  TaskContext context;
  MotionDescription description;

  std::unique_ptr<Simulator> sim;
  std::unique_ptr<FeatureExtractor> extractor;

  std::unique_ptr<Transport> owned_transport;
  std::unique_ptr<RecordingTransport> recording;
  std::unique_ptr<Judge> owned_judge;
  std::unique_ptr<Synthesizer> owned_synth;
  Judge* judge = nullptr;
  Synthesizer* synth = nullptr;

  RunHistory history;
  RewardProgram incumbent_program;
  Trajectory incumbent_trajectory;
  bool have_incumbent = false;

  int rollout_steps() const {
    return static_cast<int>(
        std::lround(config.horizon_seconds / config.sim.dt));
  }

  void init(const LoopDeps& deps, int transcript_start) {
    task = build_task(config.task_id, config.seed_sim);
    context.spec = task.spec;
    {
      Kinematics kin;
      forward_kinematics(task.morphology, task.initial_state.joints.q,
                         task.initial_state.joints.qdot, kin);
      context.start_x =
          kin.pos[static_cast<size_t>(task.morphology.torso_link)].x();
    }
    description.text = task.spec.motion_description;
    description.task_id = task.spec.task_id;

    sim = std::make_unique<Simulator>(task.morphology, task.terrain, config.sim);
    extractor = std::make_unique<FeatureExtractor>(sim->morphology(),
                                                   sim->terrain(), context);

    const bool needs_transport =
        config.judge_mode == RunConfig::JudgeMode::kEndpoint ||
        config.synth_mode == RunConfig::SynthMode::kEndpoint;
    Transport* transport = deps.transport;
    EndpointConfig endpoint;
    if (needs_transport) {
      endpoint = EndpointConfig::from_env();
      if (!transport) {
        owned_transport = std::make_unique<HttpTransport>(endpoint);
        transport = owned_transport.get();
      }
      recording = std::make_unique<RecordingTransport>(
          *transport, config.out_dir + "/transcripts", transcript_start);
      transport = recording.get();
    }

    if (deps.judge) {
      judge = deps.judge;
    } else if (config.judge_mode == RunConfig::JudgeMode::kOracle) {
      owned_judge = std::make_unique<OracleJudge>(task.spec, task.morphology);
      judge = owned_judge.get();
    } else {
      EndpointJudgeOptions options;
      options.frame_rate = config.frame_rate;
      options.max_weight = config.max_weight;
      owned_judge = std::make_unique<EndpointJudge>(
          *transport, endpoint, task.spec, task.morphology, task.terrain,
          options);
      judge = owned_judge.get();
    }

    if (deps.synth) {
      synth = deps.synth;
    } else if (config.synth_mode == RunConfig::SynthMode::kMock) {
      owned_synth = std::make_unique<MockSynthesizer>();
      synth = owned_synth.get();
    } else {
      auto validator = [this](const RewardProgram& p) {
        return validate_proposal(p, task.morphology, task.terrain, context,
                                 task.initial_state, config.max_weight);
      };
      owned_synth = std::make_unique<EndpointSynthesizer>(*transport, endpoint,
                                                          validator);
      synth = owned_synth.get();
    }
  }

  SynthesisContext synthesis_context(const Feedback& feedback) const {
    SynthesisContext ctx;
    ctx.description = description;
    ctx.catalog = catalog_summary();
    ctx.feedback = feedback;
    ctx.incumbent = incumbent_program;
    ctx.history = incumbent_history();
    ctx.history.push_back(incumbent_program);  // stages up to and including now
    ctx.max_weight = config.max_weight;
    ctx.task = context;
    return ctx;
  }

  std::vector<RewardProgram> incumbent_history() const {
    std::vector<RewardProgram> programs;
    for (const auto& rec : history.iterations) {
      programs.push_back(parse_program(
          read_file(config.out_dir + "/" + rec.incumbent_program_path)));
      programs.back().stage_id = rec.index;
    }
    return programs;
  }

  // Runs iterations [first, N). `candidates` seeds the first one.
  void iterate(int first, std::vector<RewardProgram> candidates) {
    for (int i = first; i < config.iterations; ++i) {
      const auto t_begin = std::chrono::steady_clock::now();
      const std::string iter_rel = iter_dirname(i);
      const std::string iter_abs = config.out_dir + "/" + iter_rel;
      fs::create_directories(iter_abs);

      IterationRecord rec;
      rec.index = i;
      try {
        // ----- rollout + judgment, incumbent updated in index order ----- //
        for (size_t j = 0; j < candidates.size(); ++j) {
          RewardProgram& program = candidates[j];
          program.stage_id = i;
          const std::string program_rel =
              iter_rel + "/" + proposal_name(static_cast<int>(j), ".reward");
          write_file_atomic(config.out_dir + "/" + program_rel,
                            serialize_program(program));

          MpcPolicy policy(task.morphology, task.terrain, config.sim, context,
                           config.planner, program,
                           mix_seed(config.seed_planner, i, j));
          Trajectory traj = rollout(
              *sim, *extractor, [&](const SystemState& s) { return policy(s); },
              task.initial_state, rollout_steps(), program,
              config.sim.control_substeps);

          const std::string traj_rel =
              iter_rel + "/" +
              proposal_name(static_cast<int>(j), "_trajectory.csv");
          write_trajectory_csv(config.out_dir + "/" + traj_rel, traj,
                               task.morphology);

          const Verdict verdict = judge->compare(
              description, traj, have_incumbent ? &incumbent_trajectory : nullptr);
          const std::string verdict_rel =
              iter_rel + "/" +
              proposal_name(static_cast<int>(j), "_verdict.json");
          write_file_atomic(config.out_dir + "/" + verdict_rel,
                            verdict_to_json(verdict) + "\n");

          ProposalRecord pr;
          pr.program_path = program_rel;
          pr.trajectory_path = traj_rel;
          pr.verdict_path = verdict_rel;
          if (config.judge_mode == RunConfig::JudgeMode::kOracle) {
            pr.oracle_score = oracle_score(task.spec, task.morphology, traj);
          }
          if (verdict.choice == Verdict::Choice::kFirst) {
            incumbent_program = program;
            incumbent_trajectory = std::move(traj);
            have_incumbent = true;
            pr.accepted = true;
          }
          rec.proposals.push_back(std::move(pr));
        }

        // ----- persist the incumbent ----- //
        rec.incumbent_program_path = iter_rel + "/incumbent.reward";
        rec.incumbent_trajectory_path = iter_rel + "/incumbent_trajectory.csv";
        write_file_atomic(config.out_dir + "/" + rec.incumbent_program_path,
                          serialize_program(incumbent_program));
        write_trajectory_csv(
            config.out_dir + "/" + rec.incumbent_trajectory_path,
            incumbent_trajectory, task.morphology);
        if (config.judge_mode == RunConfig::JudgeMode::kOracle) {
          rec.incumbent_score =
              oracle_score(task.spec, task.morphology, incumbent_trajectory);
        }

        rec.frames_dir = iter_rel + "/frames";
        fs::create_directories(config.out_dir + "/" + rec.frames_dir);
        RenderOptions ro;
        ro.rate = config.frame_rate;
        const FrameSequence frames =
            render_frames(incumbent_trajectory, task.morphology, task.terrain,
                          task.spec, ro);
        for (size_t f = 0; f < frames.frames.size(); ++f) {
          char name[32];
          std::snprintf(name, sizeof(name), "/frame_%04d.png",
                        static_cast<int>(f));
          write_png(config.out_dir + "/" + rec.frames_dir + name,
                    frames.frames[f]);
        }

        // ----- critique + next proposals ----- //
        const Feedback feedback =
            judge->critique(description, incumbent_trajectory, incumbent_program);
        rec.feedback_path = iter_rel + "/feedback.json";
        write_file_atomic(config.out_dir + "/" + rec.feedback_path,
                          feedback_to_json(feedback) + "\n");

        std::vector<Proposal> next =
            synth->propose(synthesis_context(feedback), config.samples_per_iter,
                           mix_seed(config.seed_synth, static_cast<uint64_t>(i) + 1));
        candidates.clear();
        for (size_t j = 0; j < next.size(); ++j) {
          char name[32];
          std::snprintf(name, sizeof(name), "/next_%02d.reward",
                        static_cast<int>(j));
          const std::string rel = iter_rel + name;
          write_file_atomic(config.out_dir + "/" + rel,
                            serialize_program(next[j].program));
          rec.next_program_paths.push_back(rel);
          candidates.push_back(std::move(next[j].program));
        }
      } catch (const TransportError& e) {
        history.failed = true;
        history.failure = e.what();
        persist_history(history);
        return;
      }

      rec.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        t_begin)
              .count();
      history.iterations.push_back(std::move(rec));
      history.final_program_path =
          history.iterations.back().incumbent_program_path;
      persist_history(history);
    }
  }
};

int count_transcripts(const std::string& out_dir) {
  const std::string dir = out_dir + "/transcripts";
  if (!fs::exists(dir)) return 0;
  int count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") ++count;
  }
  return count / 2;
}

}  // namespace

std::string run_config_to_json(const RunConfig& config) {
  ordered_json j;
  j["task_id"] = config.task_id;
  j["iterations"] = config.iterations;
  j["samples_per_iter"] = config.samples_per_iter;
  j["seed_sim"] = config.seed_sim;
  j["seed_planner"] = config.seed_planner;
  j["seed_synth"] = config.seed_synth;
  j["judge"] =
      config.judge_mode == RunConfig::JudgeMode::kOracle ? "oracle" : "endpoint";
  j["synth"] =
      config.synth_mode == RunConfig::SynthMode::kMock ? "mock" : "endpoint";
  j["initial_program"] = config.initial_program;
  j["horizon_seconds"] = config.horizon_seconds;
  j["frame_rate"] = config.frame_rate;
  j["max_weight"] = config.max_weight;
  j["jobs"] = config.jobs;
  j["planner"] = {{"horizon", config.planner.horizon},
                  {"n_samples", config.planner.n_samples},
                  {"noise_sigma", config.planner.noise_sigma},
                  {"temperature", config.planner.temperature},
                  {"instant_fraction", config.planner.instant_fraction},
                  {"replan_interval", config.planner.replan_interval},
                  {"k_bar", config.planner.k_bar}};
  j["sim"] = {{"dt", config.sim.dt},
              {"gravity", config.sim.gravity},
              {"contact_stiffness", config.sim.contact_stiffness},
              {"contact_damping", config.sim.contact_damping},
              {"friction_coeff", config.sim.friction_coeff},
              {"limit_stiffness", config.sim.limit_stiffness},
              {"limit_damping", config.sim.limit_damping},
              {"control_substeps", config.sim.control_substeps}};
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  RunConfig c;
  c.task_id = j.at("task_id");
  c.iterations = j.at("iterations");
  c.samples_per_iter = j.at("samples_per_iter");
  c.seed_sim = j.at("seed_sim");
  c.seed_planner = j.at("seed_planner");
  c.seed_synth = j.at("seed_synth");
  c.judge_mode = j.at("judge") == "oracle" ? RunConfig::JudgeMode::kOracle
                                           : RunConfig::JudgeMode::kEndpoint;
  c.synth_mode = j.at("synth") == "mock" ? RunConfig::SynthMode::kMock
                                         : RunConfig::SynthMode::kEndpoint;
  c.initial_program = j.at("initial_program");
  c.horizon_seconds = j.at("horizon_seconds");
  c.frame_rate = j.at("frame_rate");
  c.max_weight = j.at("max_weight");
  c.jobs = j.at("jobs");
  const auto& p = j.at("planner");
  c.planner.horizon = p.at("horizon");
  c.planner.n_samples = p.at("n_samples");
  c.planner.noise_sigma = p.at("noise_sigma");
  c.planner.temperature = p.at("temperature");
  c.planner.instant_fraction = p.at("instant_fraction");
  c.planner.replan_interval = p.at("replan_interval");
  c.planner.k_bar = p.at("k_bar");
  const auto& s = j.at("sim");
  c.sim.dt = s.at("dt");
  c.sim.gravity = s.at("gravity");
  c.sim.contact_stiffness = s.at("contact_stiffness");
  c.sim.contact_damping = s.at("contact_damping");
  c.sim.friction_coeff = s.at("friction_coeff");
  c.sim.limit_stiffness = s.at("limit_stiffness");
  c.sim.limit_damping = s.at("limit_damping");
  c.sim.control_substeps = s.at("control_substeps");
  return c;
}

RunHistory run(const RunConfig& config_in, const LoopDeps& deps) {
  RunConfig config = config_in;
  if (config.iterations < 1) throw SimError("run: iterations must be >= 1");
  if (config.samples_per_iter < 1) {
    throw SimError("run: samples_per_iter must be >= 1");
  }
  if (config.out_dir.empty()) throw SimError("run: out_dir not set");
  if (config.initial_program.empty()) {
    config.initial_program = default_program_text(config.task_id);
  }
  config.planner.jobs = config.jobs;

  fs::create_directories(config.out_dir);
  write_file_atomic(config.out_dir + "/config.json",
                    run_config_to_json(config));

  Runner runner;
  runner.config = config;
  runner.history.config = config;
  runner.init(deps, 0);

  // the initial program must be executable on the task
  RewardProgram r0 = parse_program(config.initial_program);
  const Validation v0 =
      validate_proposal(r0, runner.task.morphology, runner.task.terrain,
                        runner.context, runner.task.initial_state,
                        config.max_weight);
  if (!v0.accepted) {
    throw SimError("initial program rejected: " + v0.reason);
  }

  // iteration 0 searches around r0: the program itself plus synthesized
  // variants (feedback is empty at this point)
  std::vector<RewardProgram> candidates;
  candidates.push_back(std::move(r0));
  if (config.samples_per_iter > 1) {
    SynthesisContext ctx;
    ctx.description = runner.description;
    ctx.catalog = catalog_summary();
    ctx.incumbent = candidates.front();
    ctx.max_weight = config.max_weight;
    ctx.task = runner.context;
    try {
      std::vector<Proposal> extras = runner.synth->propose(
          ctx, config.samples_per_iter - 1, mix_seed(config.seed_synth, 0));
      for (auto& p : extras) candidates.push_back(std::move(p.program));
    } catch (const TransportError& e) {
      runner.history.failed = true;
      runner.history.failure = e.what();
      persist_history(runner.history);
      return runner.history;
    }
  }

  runner.iterate(0, std::move(candidates));
  if (!runner.history.failed && !runner.history.iterations.empty()) {
    export_heatmap(config.out_dir);
  }
  return runner.history;
}

RunHistory load_history(const std::string& out_dir) {
  RunHistory history;
  const std::string config_path = out_dir + "/config.json";
  if (!fs::exists(config_path)) {
    throw std::runtime_error("no config.json in " + out_dir);
  }
  history.config = run_config_from_json(read_file(config_path));
  history.config.out_dir = out_dir;

  const std::string history_path = out_dir + "/history.json";
  if (!fs::exists(history_path)) {
    throw std::runtime_error("no history.json in " + out_dir);
  }
  const auto j = ordered_json::parse(read_file(history_path));

  auto require = [&](const std::string& rel, int index) {
    if (rel.empty() || !fs::exists(out_dir + "/" + rel)) {
      throw std::runtime_error("history record " + std::to_string(index) +
                               ": missing file " + rel);
    }
  };

  int expected = 0;
  for (const auto& jr : j.at("iterations")) {
    IterationRecord rec;
    rec.index = jr.at("index");
    if (rec.index != expected++) {
      throw std::runtime_error("history record " + std::to_string(rec.index) +
                               ": indices not contiguous");
    }
    for (const auto& jp : jr.at("proposals")) {
      ProposalRecord pr;
      pr.program_path = jp.at("program");
      pr.trajectory_path = jp.at("trajectory");
      pr.verdict_path = jp.at("verdict");
      if (jp.contains("oracle_score")) pr.oracle_score = jp["oracle_score"];
      pr.accepted = jp.at("accepted");
      require(pr.program_path, rec.index);
      require(pr.trajectory_path, rec.index);
      require(pr.verdict_path, rec.index);
      rec.proposals.push_back(std::move(pr));
    }
    rec.incumbent_program_path = jr.at("incumbent_program");
    rec.incumbent_trajectory_path = jr.at("incumbent_trajectory");
    if (jr.contains("incumbent_score")) {
      rec.incumbent_score = jr["incumbent_score"];
    }
    rec.feedback_path = jr.at("feedback");
    rec.frames_dir = jr.at("frames");
    require(rec.incumbent_program_path, rec.index);
    require(rec.incumbent_trajectory_path, rec.index);
    require(rec.feedback_path, rec.index);
    require(rec.frames_dir, rec.index);
    for (const auto& next : jr.at("next_programs")) {
      rec.next_program_paths.push_back(next);
      require(rec.next_program_paths.back(), rec.index);
    }
    history.iterations.push_back(std::move(rec));
  }
  history.final_program_path = j.at("final_program");
  history.failed = j.at("failed");
  history.failure = j.at("failure");
  return history;
}

RunHistory resume(const std::string& out_dir, const LoopDeps& deps) {
  RunHistory persisted = load_history(out_dir);
  if (static_cast<int>(persisted.iterations.size()) >=
      persisted.config.iterations) {
    return persisted;
  }
  if (persisted.iterations.empty()) {
    // nothing completed: start over with the stored config
    return run(persisted.config, deps);
  }

  Runner runner;
  runner.config = persisted.config;
  runner.history = persisted;
  runner.history.failed = false;
  runner.history.failure.clear();
  runner.init(deps, count_transcripts(out_dir));

  const IterationRecord& last = persisted.iterations.back();
  runner.incumbent_program =
      parse_program(read_file(out_dir + "/" + last.incumbent_program_path));
  runner.incumbent_trajectory = read_trajectory_csv(
      out_dir + "/" + last.incumbent_trajectory_path, runner.task.morphology);
  // recorded rows begin one step in; the true initial state is the task's
  runner.incumbent_trajectory.initial_state = runner.task.initial_state;
  runner.have_incumbent = true;

  std::vector<RewardProgram> candidates;
  for (const auto& rel : last.next_program_paths) {
    candidates.push_back(parse_program(read_file(out_dir + "/" + rel)));
  }
  if (candidates.empty()) {
    throw std::runtime_error("history record " + std::to_string(last.index) +
                             ": no synthesized candidates to resume from");
  }

  runner.iterate(last.index + 1, std::move(candidates));
  if (!runner.history.failed) export_heatmap(out_dir);
  return runner.history;
}

HeatmapFiles export_heatmap(const std::string& out_dir) {
  const RunHistory history = load_history(out_dir);
  if (history.iterations.empty()) {
    throw std::runtime_error("export_heatmap: empty history");
  }
  std::vector<RewardProgram> stages;
  for (const auto& rec : history.iterations) {
    stages.push_back(parse_program(
        read_file(out_dir + "/" + rec.incumbent_program_path)));
    stages.back().stage_id = rec.index;
  }
  const WeightMatrix wm = weight_matrix(stages);
  HeatmapFiles files;
  files.csv = out_dir + "/heatmap.csv";
  files.raw_csv = out_dir + "/heatmap_raw.csv";
  files.svg = out_dir + "/heatmap.svg";
  write_weight_matrix_csv(files.csv, wm.terms, wm.normalized);
  write_weight_matrix_csv(files.raw_csv, wm.terms, wm.raw);
  write_heatmap_svg(files.svg, wm);
  return files;
}

}  // namespace myolab
