#include "cqot/orchestrator.hpp"

#include <chrono>
#include <sstream>

#include "cqot/errors.hpp"
#include "cqot/prompting.hpp"

namespace cqot {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

using SteadyPoint = std::chrono::steady_clock::time_point;

struct RunState {
  const Engine& engine;
  Gateway& gateway;
  const ProviderProfile& profile;
  const RunRequest& request;
  const RunOptions& options;
  PipelineTranscript transcript;
  std::optional<SteadyPoint> deadline;

  RunState(const Engine& engine_, Gateway& gateway_,
           const ProviderProfile& profile_, const RunRequest& request_,
           const RunOptions& options_, TechniqueMode mode)
      : engine(engine_),
        gateway(gateway_),
        profile(profile_),
        request(request_),
        options(options_) {
    if (trim(request.query).empty()) {
      raise(ErrorKind::EmptyQuery, "question turn must be non-empty");
    }
    if (request.turn_index != 1 && request.turn_index != 2) {
      raise(ErrorKind::OutOfRange, "turn_index must be 1 or 2");
    }
    transcript.question_id = request.question_id;
    transcript.turn_index = request.turn_index;
    transcript.mode = mode;
    transcript.started_at = engine.now_iso();
    if (options.time_budget_seconds.has_value()) {
      deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(*options.time_budget_seconds));
    }
  }

  bool should_abort() const {
    if (engine.abort_requested()) return true;
    return deadline.has_value() && std::chrono::steady_clock::now() > *deadline;
  }

  PipelineTranscript finish(TranscriptStatus status) {
    transcript.status = status;
    transcript.finished_at = engine.now_iso();
    return std::move(transcript);
  }

  /// One model call; gateway errors come back annotated with step and
  /// iteration so a ten-minute run names its failure point.
  ChatResponse call(StepKind step, int iteration, const std::string& prompt) {
    ChatRequest request_out;
    request_out.model_id = profile.model_id;
    request_out.messages = {{Role::User, prompt}};
    request_out.params = sampling_for_step(profile, step);
    request_out.tag = RequestTag{step, iteration, request.turn_index};
    try {
      ChatResponse response = gateway.complete(request_out);
      if (response.usage.has_value()) {
        transcript.token_usage.push_back({step, iteration,
                                          response.usage->input_tokens,
                                          response.usage->output_tokens});
      }
      return response;
    } catch (const CqotError& error) {
      std::ostringstream oss;
      oss << to_string(step) << " (iteration " << iteration << ", turn "
          << request.turn_index << "): " << error.what();
      throw CqotError(error.kind(), oss.str(), error.transient());
    }
  }
};

std::vector<int> failed_indices(const CqVerdict& verdict) {
  std::vector<int> failed;
  for (const auto& [index, answer] : verdict.answers) {
    if (answer != CqAnswer::Yes) failed.push_back(index);
  }
  return failed;
}

PipelineTranscript run_single_call(const Engine& engine, Gateway& gateway,
                                   const ProviderProfile& profile,
                                   const RunRequest& request,
                                   const RunOptions& options, TechniqueMode mode,
                                   StepKind step) {
  RunState state(engine, gateway, profile, request, options, mode);
  if (state.should_abort()) return state.finish(TranscriptStatus::Aborted);

  RenderedPrompt prompt =
      step == StepKind::CoT
          ? render_cot(engine.templates(), request.query, request.history)
          : render_standard(engine.templates(), request.query, request.history);
  state.transcript.final_answer = state.call(step, 1, prompt.text).content;
  return state.finish(TranscriptStatus::Completed);
}

}  // namespace

PipelineTranscript run_standard(const Engine& engine, Gateway& gateway,
                                const ProviderProfile& profile,
                                const RunRequest& request,
                                const RunOptions& options) {
  return run_single_call(engine, gateway, profile, request, options,
                         TechniqueMode::Standard, StepKind::Standard);
}

PipelineTranscript run_cot(const Engine& engine, Gateway& gateway,
                           const ProviderProfile& profile,
                           const RunRequest& request, const RunOptions& options) {
  return run_single_call(engine, gateway, profile, request, options,
                         TechniqueMode::CoT, StepKind::CoT);
}

PipelineTranscript run_step1_4(const Engine& engine, Gateway& gateway,
                               const ProviderProfile& profile,
                               const RunRequest& request,
                               const RunOptions& options) {
  RunState state(engine, gateway, profile, request, options,
                 TechniqueMode::Step1_4);
  if (state.should_abort()) return state.finish(TranscriptStatus::Aborted);

  RenderedPrompt step1 =
      render_step1(engine.templates(), request.query, request.history);
  std::string plan_text = state.call(StepKind::Step1, 1, step1.text).content;
  if (trim(plan_text).empty()) {
    raise(ErrorKind::EmptyCompletion, "step1 returned an empty plan");
  }
  ReasoningPlan plan{plan_text, 1};
  state.transcript.iterations.push_back({1, plan, std::nullopt, std::nullopt});

  if (state.should_abort()) return state.finish(TranscriptStatus::Aborted);
  RenderedPrompt step4 =
      render_step4(engine.templates(), request.query, plan, request.history);
  state.transcript.final_answer =
      state.call(StepKind::Step4, 1, step4.text).content;
  return state.finish(TranscriptStatus::Completed);
}

PipelineTranscript run_cqot(const Engine& engine, Gateway& gateway,
                            const ProviderProfile& profile,
                            const RunRequest& request, const RunOptions& options) {
  RunState state(engine, gateway, profile, request, options, TechniqueMode::CQoT);
  const LoopPolicy& policy = engine.policy();

  std::vector<int> last_failed;
  for (int iteration = 1; iteration <= policy.total_max_iterations; ++iteration) {
    if (state.should_abort()) return state.finish(TranscriptStatus::Aborted);

    Step1Options step1_options;
    if (options.feedback && iteration > 1) {
      step1_options.failed_cq_indices = last_failed;
    }
    RenderedPrompt step1 = render_step1(engine.templates(), request.query,
                                        request.history, step1_options);
    std::string plan_text =
        state.call(StepKind::Step1, iteration, step1.text).content;
    if (trim(plan_text).empty()) {
      raise(ErrorKind::EmptyCompletion,
            "step1 returned an empty plan at iteration " +
                std::to_string(iteration));
    }
    ReasoningPlan plan{plan_text, iteration};

    if (state.should_abort()) {
      state.transcript.iterations.push_back(
          {iteration, plan, std::nullopt, std::nullopt});
      return state.finish(TranscriptStatus::Aborted);
    }
    RenderedPrompt step2 =
        render_step2(engine.templates(), request.query, plan, engine.catalog());
    std::string reply = state.call(StepKind::Step2, iteration, step2.text).content;
    CqVerdict verdict = parse_cq_answers(reply, policy.num_cqs);

    bool reformat_used = false;
    if (options.reformat_reask && count_unparseable(verdict) >= 4) {
      RenderedPrompt strict =
          render_step2(engine.templates(), request.query, plan, engine.catalog(),
                       {.strict_format = true});
      reply = state.call(StepKind::Step2, iteration, strict.text).content;
      verdict = parse_cq_answers(reply, policy.num_cqs);
      reformat_used = true;
    }

    Decision decision = decide(iteration, count_positives(verdict), policy);
    // A human verifier may override the gate, but never the iteration cap.
    if (engine.decision_hook() && decision.kind != DecisionKind::ForcedProceed) {
      Decision overridden = engine.decision_hook()(verdict, decision);
      overridden.iteration = decision.iteration;
      overridden.positives = decision.positives;
      if (overridden.kind != DecisionKind::ForcedProceed) decision = overridden;
    }

    IterationRecord record{iteration, plan, verdict, decision, reformat_used};
    state.transcript.iterations.push_back(std::move(record));
    state.transcript.decision_trail.push_back(decision);
    last_failed = failed_indices(verdict);

    if (decision.kind != DecisionKind::Retry) break;
  }

  const IterationRecord& last = state.transcript.iterations.back();
  if (state.should_abort()) return state.finish(TranscriptStatus::Aborted);
  RenderedPrompt step4 = render_step4(engine.templates(), request.query,
                                      last.plan, request.history);
  state.transcript.final_answer =
      state.call(StepKind::Step4, last.index, step4.text).content;
  return state.finish(TranscriptStatus::Completed);
}

PipelineTranscript run_turn(const Engine& engine, Gateway& gateway,
                            const ProviderProfile& profile, TechniqueMode mode,
                            const RunRequest& request, const RunOptions& options) {
  switch (mode) {
    case TechniqueMode::Standard:
      return run_standard(engine, gateway, profile, request, options);
    case TechniqueMode::CoT:
      return run_cot(engine, gateway, profile, request, options);
    case TechniqueMode::Step1_4:
      return run_step1_4(engine, gateway, profile, request, options);
    case TechniqueMode::CQoT:
      return run_cqot(engine, gateway, profile, request, options);
  }
  raise(ErrorKind::InvalidArgument, "unknown technique mode");
}

std::vector<PipelineTranscript> run_conversation(const Engine& engine,
                                                 Gateway& gateway,
                                                 const ProviderProfile& profile,
                                                 const BenchQuestion& question,
                                                 TechniqueMode mode,
                                                 const RunOptions& options) {
  if (question.turns.size() != 2) {
    raise(ErrorKind::InvalidArgument,
          "question '" + question.id + "' must have exactly 2 turns");
  }

  RunRequest first{question.id, 1, question.turns[0], {}};
  PipelineTranscript turn1 =
      run_turn(engine, gateway, profile, mode, first, options);
  if (turn1.status == TranscriptStatus::Aborted) return {std::move(turn1)};

  RunRequest second{question.id, 2, question.turns[1],
                    {{question.turns[0], turn1.final_answer}}};
  PipelineTranscript turn2 =
      run_turn(engine, gateway, profile, mode, second, options);
  return {std::move(turn1), std::move(turn2)};
}

}  // namespace cqot
