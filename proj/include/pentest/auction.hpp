#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pentest/feasibility.hpp"
#include "pentest/random.hpp"

namespace pentest {

enum class MechanismMode {
  kOfflineClock,       // deferred acceptance: stops as soon as the active set is feasible
  kOnlineOblivious,    // posted prices in a fixed arrival order
  kOnlineSequential,   // posted prices in a mechanism-chosen order
};

std::string to_string(MechanismMode mode);

/// One price update emitted by a pricing session.
struct Action {
  int agent = 0;
  double price = 0.0;   // target price; ignored for rejections
  bool reject = false;  // price jumps above every type; the agent leaves

  static Action raise(int agent, double price) { return {agent, price, false}; }
  static Action reject_agent(int agent) { return {agent, 0.0, true}; }
};

/// Stateful price trajectory for one realization. `next` is called with
/// the current active flags after every processed action; returning
/// nullopt ends the run.
class PricingSession {
 public:
  virtual ~PricingSession() = default;
  virtual std::optional<Action> next(const std::vector<char>& active) = 0;
};

/// A deferred-acceptance mechanism: a pricing rule over a constraint.
///
/// `start` receives the realized bids. Clock rules use them only to place
/// their price ladder at the points where some agent's response changes,
/// which reproduces a continuous ascending clock exactly.
class DAMechanism {
 public:
  virtual ~DAMechanism() = default;
  virtual std::string name() const = 0;
  virtual MechanismMode mode() const { return MechanismMode::kOfflineClock; }
  virtual const FeasibilityConstraint& constraint() const = 0;
  virtual std::unique_ptr<PricingSession> start(const std::vector<double>& bids, Rng& rng) const = 0;
  int n() const { return constraint().n(); }
};

using MechanismPtr = std::shared_ptr<const DAMechanism>;

/// Reacts to price increments. Both the truthful bidder and the pen
/// simulator implement it with the same floating-point expression, which
/// keeps the two execution paths bit-identical.
class Responder {
 public:
  virtual ~Responder() = default;
  /// Price of `agent` moves from `old_price` to `old_price + delta`.
  /// Returns whether the agent stays active.
  virtual bool on_raise(int agent, double old_price, double delta) = 0;
  virtual void on_reject(int agent) = 0;
};

/// Truthful bidder: stays iff value >= new price.
class TruthfulResponder final : public Responder {
 public:
  explicit TruthfulResponder(const std::vector<double>& values) : values_(values) {}
  bool on_raise(int agent, double old_price, double delta) override { return values_[agent] >= old_price + delta; }
  void on_reject(int) override {}

 private:
  const std::vector<double>& values_;
};

struct TraceEntry {
  int stage = 0;
  int agent = 0;
  double from = 0.0;
  double to = 0.0;  // kUnbounded for rejections
  bool stayed = false;
};

/// Result of driving a session: who is active at the end and at what price.
struct Execution {
  Subset winners;
  std::vector<double> prices;  // final price per agent (kUnbounded once rejected)
  std::vector<TraceEntry> trace;
};

struct Outcome {
  Subset winners;
  std::vector<double> payments;  // one per winner, same order
  double surplus = 0.0;
  /// Sum over winners of value - payment, accumulated in winner order.
  double consumer_surplus = 0.0;
  std::vector<TraceEntry> trace;
};

/// Drives `mech` against `responder`. Enforces the deferred-acceptance
/// invariants: prices never decrease (InvariantViolation otherwise),
/// active sets only shrink, offline clocks stop exactly when the active set
/// becomes feasible, and the final active set is feasible.
Execution execute(const DAMechanism& mech, const std::vector<double>& bids, Responder& responder, Rng& rng);

/// Truthful run: execute with a TruthfulResponder on `values`.
Outcome run_da(const DAMechanism& mech, const std::vector<double>& values, Rng& rng);

/// Outcome bookkeeping for a finished execution.
Outcome make_outcome(const Execution& exec, const std::vector<double>& values);

}  // namespace pentest
