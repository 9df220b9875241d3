#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqot/engine.hpp"
#include "cqot/gateway.hpp"
#include "cqot/transcript.hpp"

namespace cqot {

struct RunRequest {
  std::string question_id = "adhoc";
  int turn_index = 1;
  std::string query;
  History history;
};

struct RunOptions {
  /// Feed the previously failed question indices back into the next plan
  /// request. Off by default: the loop restarts unconditionally.
  bool feedback = false;
  /// One stricter-format re-ask of the assessment when 4+ answers are
  /// unparseable. Off by default: one assessment call per iteration.
  bool reformat_reask = false;
  /// Wall-clock budget in seconds; exceeded runs finish as Aborted.
  std::optional<double> time_budget_seconds;
};

/// Plan, assess against the critical questions, gate, answer. Loops until the
/// gate proceeds (or is forced to), then answers from the latest plan.
PipelineTranscript run_cqot(const Engine& engine, Gateway& gateway,
                            const ProviderProfile& profile, const RunRequest& request,
                            const RunOptions& options = {});

/// Single plain call; no iterations recorded.
PipelineTranscript run_standard(const Engine& engine, Gateway& gateway,
                                const ProviderProfile& profile,
                                const RunRequest& request,
                                const RunOptions& options = {});

/// Single step-by-step call; no iterations recorded.
PipelineTranscript run_cot(const Engine& engine, Gateway& gateway,
                           const ProviderProfile& profile, const RunRequest& request,
                           const RunOptions& options = {});

/// Ablation: plan once, answer from that plan. Exactly two calls, one
/// iteration with no verdict.
PipelineTranscript run_step1_4(const Engine& engine, Gateway& gateway,
                               const ProviderProfile& profile,
                               const RunRequest& request,
                               const RunOptions& options = {});

/// Dispatch by mode.
PipelineTranscript run_turn(const Engine& engine, Gateway& gateway,
                            const ProviderProfile& profile, TechniqueMode mode,
                            const RunRequest& request, const RunOptions& options = {});

/// Both turns of a benchmark question; turn 2 sees the turn-1 exchange as
/// history. Each turn is an independent run with a fresh iteration counter.
/// If turn 1 aborts, turn 2 is not attempted.
std::vector<PipelineTranscript> run_conversation(const Engine& engine,
                                                 Gateway& gateway,
                                                 const ProviderProfile& profile,
                                                 const BenchQuestion& question,
                                                 TechniqueMode mode,
                                                 const RunOptions& options = {});

}  // namespace cqot
