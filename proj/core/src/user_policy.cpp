#include "decbit/user_policy.hpp"

#include <algorithm>
#include <cmath>

#include "decbit/errors.hpp"

namespace decbit {

Decision signal_filter(long ones, long total, double cutoff) {
  if (total < 1) {
    throw DomainError("signal_filter: no bits to filter");
  }
  if (ones < 0 || ones > total) {
    throw DomainError("signal_filter: set-bit count out of range");
  }
  return static_cast<double>(ones) >= cutoff * static_cast<double>(total)
             ? Decision::kDecrease
             : Decision::kIncrease;
}

int round_window(double w) { return static_cast<int>(std::floor(w + 0.5)); }

WindowController::WindowController(UserPolicyConfig config) : config_(config) {
  if (config_.w_max < 1) {
    throw ConfigError("window ceiling must be at least 1");
  }
  if (!(config_.cutoff > 0.0 && config_.cutoff < 1.0)) {
    throw ConfigError("cutoff must lie in (0, 1)");
  }
  if (!(config_.decrease_factor > 0.0 && config_.decrease_factor < 1.0)) {
    throw ConfigError("decrease factor must lie in (0, 1)");
  }
  if (!(config_.increase_amount > 0.0)) {
    throw ConfigError("increase amount must be positive");
  }
  w_ = std::clamp(config_.initial_window, 1.0, static_cast<double>(config_.w_max));
  w_used_ = round_window(w_);
  cycle_window_ = w_used_;
}

std::optional<Decision> WindowController::record_ack(bool bit) {
  ++acks_in_turn_;
  if (turn_ == Turn::kSecond || first_cycle_) {
    ++bits_total_;
    if (bit) ++bits_ones_;
  }
  if (acks_in_turn_ < cycle_window_) return std::nullopt;

  acks_in_turn_ = 0;
  if (turn_ == Turn::kFirst) {
    turn_ = Turn::kSecond;
    return std::nullopt;
  }
  Decision d = signal_filter(bits_ones_, bits_total_, config_.cutoff);
  bits_ones_ = 0;
  bits_total_ = 0;
  turn_ = Turn::kFirst;
  first_cycle_ = false;
  return d;
}

void WindowController::increase() {
  w_ += config_.increase_amount;
  w_ = std::min(w_, w_used_ + config_.increase_amount);
  w_ = std::min(w_, static_cast<double>(config_.w_max));
  w_used_ = round_window(w_);
  cycle_window_ = w_used_;
}

void WindowController::decrease() {
  w_ *= config_.decrease_factor;
  w_ = std::max(w_, 1.0);
  w_used_ = round_window(w_);
  cycle_window_ = w_used_;
}

void WindowController::apply(Decision d) {
  if (d == Decision::kIncrease) {
    increase();
  } else {
    decrease();
  }
}

}  // namespace decbit
