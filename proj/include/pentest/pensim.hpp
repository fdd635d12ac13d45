#pragma once

#include <string>
#include <vector>

#include "pentest/auction.hpp"
#include "pentest/feasibility.hpp"
#include "pentest/random.hpp"

namespace pentest {

enum class Signal { kSuccess, kFailure };

/// One pen. The ink level is private: algorithms only see test signals and
/// the amount they have written.
class PenState {
 public:
  explicit PenState(double ink);

  /// Writes for `theta` more units. Succeeds iff the ink covers everything
  /// written so far including this test (equivalently residual >= theta);
  /// a failure empties the pen for good. Throws DomainError for theta < 0.
  Signal test(double theta);

  double written() const noexcept { return written_; }
  bool expended() const noexcept { return expended_; }
  /// Ink left: ink - written, or 0 once expended.
  double residual() const noexcept { return expended_ ? 0.0 : ink_ - written_; }
  /// Marks the pen as thrown away without a test.
  void discard() noexcept { discarded_ = true; }
  bool discarded() const noexcept { return discarded_; }

 private:
  friend class PenBenchmarkAccess;
  double ink_;
  double written_ = 0.0;
  bool expended_ = false;
  bool discarded_ = false;
};

/// Benchmark-only view of the hidden ink levels.
class PenBenchmarkAccess {
 public:
  static double true_ink(const PenState& pen) noexcept { return pen.ink_; }
};

struct PenTestRecord {
  int pen = 0;
  double theta = 0.0;
  Signal signal = Signal::kSuccess;
};

struct PenRun {
  Subset chosen;                // after padding (if requested)
  Subset chosen_before_padding; // the mechanism's winners
  double total_residual = 0.0;  // over chosen
  double total_residual_before_padding = 0.0;
  std::vector<double> written;  // per pen
  std::vector<char> expended;   // per pen
  std::vector<PenTestRecord> test_log;
};

/// Executes `mech` as a pen-testing algorithm: every price increase of
/// pen i from p to p' becomes test(i, p' - p), a failed test is a drop, a
/// rejection discards the pen, and the mechanism's winners are chosen.
/// With `pad`, the chosen set is extended with lowest-index pens to a
/// maximal feasible set of `constraint`.
///
/// The clock ladder is placed at the ink levels, which is how a continuous
/// ascending clock would observe pens running dry; test outcomes come only
/// from PenState::test.
PenRun run_pen_algorithm(const DAMechanism& mech, const std::vector<double>& inks,
                         const FeasibilityConstraint& constraint, Rng& rng, bool pad = false);

/// max_weight_feasible(constraint, inks).total.
double omniscient_value(const std::vector<double>& inks, const FeasibilityConstraint& constraint);

}  // namespace pentest
