#pragma once

#include <cstdint>
#include <vector>

#include "hybridrl/linear.hpp"

namespace hybridrl {

// Scaled-down Tetris: a narrow board, rectangular pieces of extent at most
// 2x2, and rotation as the only control. The drop column cycles with the
// step index, so rotating a piece is what decides how it lands. The raw
// reward is the negative increase of the stack height beyond the penalty
// threshold; agents see it rescaled into [0,1].
struct TetrisConfig {
  int board_width = 6;
  int episode_length = 40;
  int num_rotations = 4;
  int height_penalty_threshold = 2;
  int game_over_height = 12;   // stacks above this clear the board (logged)
  int num_state_buckets = 160; // encoded board+piece configurations
  int encode_height_cap = 4;   // per-column height cap used by the encoding

  int num_pieces() const { return 4; }  // 1x1, 1x2, 2x1, 2x2
  int feature_dim() const { return num_state_buckets * num_rotations; }
};

class TetrisEnv : public CodedEnv {
 public:
  explicit TetrisEnv(const TetrisConfig& config);

  int num_codes() const override { return config_.num_state_buckets; }
  int num_actions() const override { return config_.num_rotations; }
  int horizon() const override { return config_.episode_length; }
  int reset(Rng& rng) override;
  Step step(int action, Rng& rng) override;

  // Raw reward lies in [-2, 0]; scaled = (raw + 2) / 2.
  static double raw_from_scaled(double scaled) { return scaled * 2.0 - 2.0; }

  int board_resets() const { return resets_; }
  const std::vector<int>& column_heights() const { return heights_; }
  int current_piece() const { return piece_; }

  // Deterministic bucket for the current (capped column heights, piece)
  // configuration; FNV-1a over the tuple, reduced mod num_state_buckets.
  int encode() const;

  const TetrisConfig& config() const { return config_; }

 private:
  void clear_board();
  void rebuild_heights();
  bool cell(int row, int col) const { return grid_[static_cast<std::size_t>(row) * config_.board_width + col] != 0; }
  void set_cell(int row, int col) { grid_[static_cast<std::size_t>(row) * config_.board_width + col] = 1; }

  TetrisConfig config_;
  std::vector<std::uint8_t> grid_;  // rows x width, row 0 at the bottom
  std::vector<int> heights_;
  int rows_ = 0;
  int piece_ = 0;
  int step_index_ = 0;
  int resets_ = 0;
};

// One-hot encoding of (state bucket, action); exactly one entry is 1 and the
// dimension is num_state_buckets * num_rotations (640 under defaults).
int one_hot_index(const TetrisConfig& config, int state_code, int action);
FeatureMap tetris_one_hot_features(const TetrisConfig& config);

}  // namespace hybridrl
