#pragma once

#include <span>
#include <vector>

#include "it2pf/fuzzy_core.hpp"

namespace it2pf {

/// One sampled tick of a channel, as stored in the dataset CSV.
struct Tick {
  double t = 0.0;
  int trial_id = 0;
  VectorXd x;
  VectorXd v;
  VectorXd y;
};

/// Raw per-tick trajectories of one channel, grouped into trials.
struct Recording {
  Channel channel = Channel::Environment;
  double dt = 0.0;
  int n = 0;
  int m = 0;
  std::vector<Tick> ticks;

  /// Rows sorted by (trial_id, t), t stepping by dt within a trial, consistent shapes.
  void validate() const;
  std::vector<int> trials() const;
  /// Training pairs: v_next of tick k is v of tick k+1; the last tick of each trial is dropped.
  Dataset to_dataset() const;
  void append(const Recording& other);
};

}  // namespace it2pf
