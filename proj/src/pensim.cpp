#include "pentest/pensim.hpp"

#include <algorithm>
#include <cmath>

#include "pentest/errors.hpp"

namespace pentest {

PenState::PenState(double ink) : ink_(ink) {
  if (!(ink >= 0.0)) throw DomainError("ink must be non-negative");
}

Signal PenState::test(double theta) {
  if (!(theta >= 0.0)) throw DomainError("writing time must be non-negative");
  if (expended_) return theta == 0.0 ? Signal::kSuccess : Signal::kFailure;
  // Cumulative form of "residual >= theta", so that the check matches a
  // bidder comparing its value with the new price bit for bit.
  const double total = written_ + theta;
  written_ = total;
  if (ink_ >= total) return Signal::kSuccess;
  expended_ = true;
  return Signal::kFailure;
}

namespace {

class PenResponder final : public Responder {
 public:
  PenResponder(std::vector<PenState>& pens, std::vector<PenTestRecord>& log) : pens_(pens), log_(log) {}

  bool on_raise(int agent, double old_price, double delta) override {
    PenState& pen = pens_[agent];
    if (pen.written() != old_price) throw InvariantViolation("pen writing drifted from the posted price");
    const Signal s = pen.test(delta);
    log_.push_back({agent, delta, s});
    return s == Signal::kSuccess;
  }

  void on_reject(int agent) override { pens_[agent].discard(); }

 private:
  std::vector<PenState>& pens_;
  std::vector<PenTestRecord>& log_;
};

}  // namespace

PenRun run_pen_algorithm(const DAMechanism& mech, const std::vector<double>& inks,
                         const FeasibilityConstraint& constraint, Rng& rng, bool pad) {
  std::vector<PenState> pens;
  pens.reserve(inks.size());
  for (double ink : inks) pens.emplace_back(ink);

  PenRun run;
  PenResponder responder(pens, run.test_log);
  const Execution exec = execute(mech, inks, responder, rng);

  run.chosen_before_padding = exec.winners;
  for (int i : exec.winners) run.total_residual_before_padding += pens[i].residual();
  run.chosen = pad ? constraint.pad_to_maximal(exec.winners) : exec.winners;
  for (int i : run.chosen) run.total_residual += pens[i].residual();
  for (const auto& pen : pens) {
    run.written.push_back(pen.written());
    run.expended.push_back(pen.expended() ? 1 : 0);
  }
  return run;
}

double omniscient_value(const std::vector<double>& inks, const FeasibilityConstraint& constraint) {
  return constraint.max_weight_feasible(inks).total;
}

}  // namespace pentest
