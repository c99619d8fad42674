// Smallest end-to-end use of the library: sweep the control parameter on
// a tiny problem and print the success curve.

#include <cstdio>

#include "lpl/experiment.hpp"
#include "lpl/io.hpp"

int main() {
  lpl::ExperimentConfig config;
  config.p_list = {64};
  config.regime = lpl::SparsityRegime::fractional_power;
  config.theta_grid = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  config.trials = 50;
  config.base_seed = 42;

  const lpl::SweepResult result = lpl::run_sweep(config);
  std::fputs(lpl::to_csv(result).c_str(), stdout);

  for (const lpl::SweepCell& cell : result.cells)
    std::printf("theta=%-5g success=%5.2f  [%0.2f, %0.2f]\n", cell.theta,
                cell.p_hat, cell.ci_lo, cell.ci_hi);
  return 0;
}
