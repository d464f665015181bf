#pragma once

#include <optional>

namespace decbit {

enum class Decision { kIncrease, kDecrease };

struct UserPolicyConfig {
  // Fraction of set bits at or above which the window decreases.
  double cutoff = 0.5;
  double decrease_factor = 0.875;
  double increase_amount = 1.0;
  // Destination-imposed window ceiling.
  int w_max = 32;
  double initial_window = 1.0;
};

// Compress one decision cycle's feedback bits into a direction. Ties at the
// cutoff decrease. Requires total >= 1.
Decision signal_filter(long ones, long total, double cutoff = 0.5);

// Nearest integer, halves rounded up.
int round_window(double w);

// Endpoint window controller.
//
// Decisions are taken once every two window turns. A turn is w_used
// acknowledgments; bits acknowledged in the first turn after an adjustment
// still describe the previous window and are dropped, bits from the second
// turn feed the signal filter. The very first cycle has no previous control,
// so both of its turns are counted.
class WindowController {
 public:
  enum class Turn { kFirst, kSecond };

  explicit WindowController(UserPolicyConfig config = {});

  // Account one acknowledgment carrying `bit`. Returns the decision when the
  // second turn completes; the caller applies it with apply().
  std::optional<Decision> record_ack(bool bit);

  void increase();
  void decrease();
  void apply(Decision d);

  double window() const { return w_; }
  int window_used() const { return w_used_; }
  int window_max() const { return config_.w_max; }
  long bits_ones() const { return bits_ones_; }
  long bits_total() const { return bits_total_; }
  Turn turn() const { return turn_; }
  int acks_in_turn() const { return acks_in_turn_; }
  const UserPolicyConfig& config() const { return config_; }

 private:
  UserPolicyConfig config_;
  double w_;
  int w_used_;
  long bits_ones_ = 0;
  long bits_total_ = 0;
  Turn turn_ = Turn::kFirst;
  int acks_in_turn_ = 0;
  // Window in force when the current decision cycle began.
  int cycle_window_;
  bool first_cycle_ = true;
};

}  // namespace decbit
