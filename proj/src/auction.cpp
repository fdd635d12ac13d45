#include "pentest/auction.hpp"

#include <cmath>

#include "pentest/distribution.hpp"
#include "pentest/errors.hpp"

namespace pentest {

namespace {

Subset active_subset(const std::vector<char>& active) {
  Subset s;
  for (int i = 0; i < static_cast<int>(active.size()); ++i) {
    if (active[i]) s.push_back(i);
  }
  return s;
}

}  // namespace

std::string to_string(MechanismMode mode) {
  switch (mode) {
    case MechanismMode::kOfflineClock:
      return "offline-clock";
    case MechanismMode::kOnlineOblivious:
      return "online-oblivious";
    case MechanismMode::kOnlineSequential:
      return "online-sequential";
  }
  return "?";
}

Execution execute(const DAMechanism& mech, const std::vector<double>& bids, Responder& responder, Rng& rng) {
  const int n = mech.n();
  if (static_cast<int>(bids.size()) != n) throw DomainError("one bid per agent expected");
  const auto& constraint = mech.constraint();
  const bool clock = mech.mode() == MechanismMode::kOfflineClock;

  Execution exec;
  exec.prices.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<char> active(static_cast<std::size_t>(n), 1);
  auto session = mech.start(bids, rng);

  // Each agent can only be touched finitely often by a well-formed rule;
  // the cap turns a stuck rule into an error instead of a hang.
  const long long step_cap = 64LL * (n + 1) * (n + 1) + 1024;
  int stage = 0;
  for (long long steps = 0;; ++steps) {
    if (steps > step_cap) throw InvariantViolation(mech.name() + ": pricing rule does not terminate");
    if (clock && constraint.is_feasible(active_subset(active))) break;
    const auto action = session->next(active);
    if (!action) {
      if (clock) throw InvariantViolation(mech.name() + ": clock stopped while the active set is infeasible");
      break;
    }
    const int i = action->agent;
    if (i < 0 || i >= n) throw InvariantViolation(mech.name() + ": action for unknown agent");
    if (!active[i]) throw InvariantViolation(mech.name() + ": price update for an inactive agent");
    const double old_price = exec.prices[i];
    if (action->reject || action->price == kUnbounded) {
      responder.on_reject(i);
      active[i] = 0;
      exec.prices[i] = kUnbounded;
      exec.trace.push_back({++stage, i, old_price, kUnbounded, false});
      continue;
    }
    const double target = action->price;
    if (std::isnan(target) || target < old_price) {
      throw InvariantViolation(mech.name() + ": price of agent " + std::to_string(i) + " decreased");
    }
    if (target == old_price) continue;
    const double delta = target - old_price;
    const bool stays = responder.on_raise(i, old_price, delta);
    exec.prices[i] = old_price + delta;
    if (!stays) active[i] = 0;
    exec.trace.push_back({++stage, i, old_price, exec.prices[i], stays});
  }
  exec.winners = active_subset(active);
  if (!constraint.is_feasible(exec.winners)) {
    throw InvariantViolation(mech.name() + ": final active set is infeasible");
  }
  return exec;
}

Outcome make_outcome(const Execution& exec, const std::vector<double>& values) {
  Outcome out;
  out.winners = exec.winners;
  out.trace = exec.trace;
  for (int i : exec.winners) {
    const double pay = exec.prices[i];
    out.payments.push_back(pay);
    out.surplus += values[i];
    out.consumer_surplus += values[i] - pay;
  }
  return out;
}

Outcome run_da(const DAMechanism& mech, const std::vector<double>& values, Rng& rng) {
  TruthfulResponder responder(values);
  return make_outcome(execute(mech, values, responder, rng), values);
}

}  // namespace pentest
