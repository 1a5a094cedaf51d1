// recorder.hpp: shared trajectory bookkeeping for both propagation paths
#pragma once

#include "polariton/propagator.hpp"

namespace polariton::detail {

void check_options(const PropagationOptions& options);

class Recorder {
 public:
  Recorder(const StateVector& psi0, const PropagationOptions& options);

  double time_of(std::size_t k) const;
  void record(std::size_t k, const StateVector& psi);
  Trajectory take() { return std::move(traj_); }

 private:
  const PropagationOptions& options_;
  Trajectory traj_;
};

}  // namespace polariton::detail
