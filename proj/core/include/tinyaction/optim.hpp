#pragma once

#include <cstdint>
#include <vector>

#include "tinyaction/mlp.hpp"

namespace tinyaction {

struct AdamWParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

/// First/second moment estimates, one flat array per parameter tensor,
/// in the same order as param_views().
struct AdamWState {
  AdamWParams hp;
  std::int64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

AdamWState init_adamw(const std::vector<ParamView>& params, const AdamWParams& hp);

/// One decoupled-weight-decay Adam update:
///   m <- b1*m + (1-b1)*g,  v <- b2*v + (1-b2)*g^2
///   param <- param - lr*(mhat/(sqrt(vhat)+eps) + wd*param)
/// Decay is applied to weight tensors only, never biases.
void adamw_step(std::vector<ParamView>& params, const std::vector<ConstParamView>& grads,
                AdamWState& state, double lr);

/// Linear warmup into cosine annealing with warm restarts. Cycle lengths are
/// cycle_steps, cycle_steps*cycle_mult, cycle_steps*cycle_mult^2, ...
struct LrSchedule {
  double base_lr = 1e-4;
  int warmup_steps = 0;
  int cycle_steps = 10;   // T_0
  int cycle_mult = 2;     // T_mult
  double eta_min = 0.0;
};

void validate_schedule(const LrSchedule& schedule);

/// lr for a global step index. Steps below warmup_steps ramp linearly from
/// base_lr/warmup_steps up to base_lr; afterwards the cosine clock starts at
/// zero, and every cycle restart returns base_lr exactly.
double lr_at(std::int64_t step, const LrSchedule& schedule);

}  // namespace tinyaction
