#include "tinyaction/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace tinyaction {

AdamWState init_adamw(const std::vector<ParamView>& params, const AdamWParams& hp) {
  if (!(hp.beta1 >= 0.0 && hp.beta1 < 1.0) || !(hp.beta2 >= 0.0 && hp.beta2 < 1.0)) {
    throw std::invalid_argument("init_adamw: betas must lie in [0,1)");
  }
  if (hp.eps <= 0.0 || hp.weight_decay < 0.0) {
    throw std::invalid_argument("init_adamw: eps must be > 0 and weight_decay >= 0");
  }
  AdamWState state;
  state.hp = hp;
  for (const auto& p : params) {
    state.m.emplace_back(p.size, 0.0);
    state.v.emplace_back(p.size, 0.0);
  }
  return state;
}

void adamw_step(std::vector<ParamView>& params, const std::vector<ConstParamView>& grads,
                AdamWState& state, double lr) {
  if (lr < 0.0) throw std::invalid_argument("adamw_step: lr must be >= 0");
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adamw_step: tensor count mismatch");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t].size != grads[t].size || params[t].size != state.m[t].size()) {
      throw std::invalid_argument("adamw_step: tensor size mismatch");
    }
    for (std::size_t i = 0; i < grads[t].size; ++i) {
      if (!std::isfinite(grads[t].data[i])) throw std::invalid_argument("adamw_step: non-finite gradient");
    }
  }

  state.step += 1;
  double b1 = state.hp.beta1, b2 = state.hp.beta2;
  double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

  for (std::size_t t = 0; t < params.size(); ++t) {
    double* p = params[t].data;
    const double* g = grads[t].data;
    double* m = state.m[t].data();
    double* v = state.v[t].data();
    double wd = params[t].decay ? state.hp.weight_decay : 0.0;
    for (std::size_t i = 0; i < params[t].size; ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      p[i] -= lr * (mhat / (std::sqrt(vhat) + state.hp.eps) + wd * p[i]);
    }
  }
}

void validate_schedule(const LrSchedule& schedule) {
  if (schedule.base_lr <= 0.0) throw std::invalid_argument("schedule: base_lr must be > 0");
  if (schedule.warmup_steps < 0) throw std::invalid_argument("schedule: warmup_steps must be >= 0");
  if (schedule.cycle_steps < 1) throw std::invalid_argument("schedule: cycle_steps must be >= 1");
  if (schedule.cycle_mult < 1) throw std::invalid_argument("schedule: cycle_mult must be >= 1");
  if (schedule.eta_min < 0.0 || schedule.eta_min > schedule.base_lr) {
    throw std::invalid_argument("schedule: eta_min must lie in [0, base_lr]");
  }
}

double lr_at(std::int64_t step, const LrSchedule& schedule) {
  validate_schedule(schedule);
  if (step < 0) throw std::invalid_argument("lr_at: step must be >= 0");

  if (step < schedule.warmup_steps) {
    return schedule.base_lr * static_cast<double>(step + 1) /
           static_cast<double>(schedule.warmup_steps);
  }

  // Walk the geometric cycle lengths to locate the current cycle.
  std::int64_t s = step - schedule.warmup_steps;
  std::int64_t cycle_len = schedule.cycle_steps;
  if (schedule.cycle_mult == 1) {
    s %= cycle_len;
  } else {
    while (s >= cycle_len) {
      s -= cycle_len;
      cycle_len *= schedule.cycle_mult;
    }
  }
  if (s == 0) return schedule.base_lr;  // cos(0) == 1, exact at restarts
  double pos = static_cast<double>(s) / static_cast<double>(cycle_len);
  return schedule.eta_min +
         0.5 * (schedule.base_lr - schedule.eta_min) * (1.0 + std::cos(3.141592653589793238462643383279502884 * pos));
}

}  // namespace tinyaction
