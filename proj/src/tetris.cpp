#include "hybridrl/tetris.hpp"

#include <algorithm>
#include <stdexcept>

namespace hybridrl {

namespace {

struct PieceShape {
  int w, h;
};

// 1x1, flat domino, tall domino, square.
constexpr PieceShape kPieces[4] = {{1, 1}, {2, 1}, {1, 2}, {2, 2}};

PieceShape rotated(int piece, int rotation) {
  PieceShape p = kPieces[piece];
  if (rotation % 2 != 0) std::swap(p.w, p.h);
  return p;
}

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= data[i];
    hash *= 0x100000001B3ull;
  }
  return hash;
}

}  // namespace

TetrisEnv::TetrisEnv(const TetrisConfig& config) : config_(config) {
  if (config_.board_width < 2) throw std::invalid_argument("tetris board too narrow for 2x2 pieces");
  if (config_.num_rotations != 4) throw std::invalid_argument("tetris uses exactly 4 rotations");
  if (config_.episode_length < 1) throw std::invalid_argument("episode_length must be positive");
  if (config_.num_state_buckets < 2) throw std::invalid_argument("need at least 2 state buckets");
  heights_.assign(config_.board_width, 0);
}

void TetrisEnv::clear_board() {
  grid_.clear();
  rows_ = 0;
  std::fill(heights_.begin(), heights_.end(), 0);
}

void TetrisEnv::rebuild_heights() {
  for (int c = 0; c < config_.board_width; ++c) {
    int h = 0;
    for (int r = rows_ - 1; r >= 0; --r) {
      if (cell(r, c)) {
        h = r + 1;
        break;
      }
    }
    heights_[c] = h;
  }
}

int TetrisEnv::encode() const {
  std::vector<std::uint8_t> key;
  key.reserve(heights_.size() + 1);
  for (int h : heights_) key.push_back(static_cast<std::uint8_t>(std::min(h, config_.encode_height_cap)));
  key.push_back(static_cast<std::uint8_t>(piece_));
  return static_cast<int>(fnv1a(key.data(), key.size()) % static_cast<std::uint64_t>(config_.num_state_buckets));
}

int TetrisEnv::reset(Rng& rng) {
  clear_board();
  resets_ = 0;
  step_index_ = 0;
  piece_ = rng.uniform_int(config_.num_pieces());
  return encode();
}

CodedEnv::Step TetrisEnv::step(int action, Rng& rng) {
  const int W = config_.board_width;
  const PieceShape shape = rotated(piece_, action % config_.num_rotations);

  // Cycling drop rule: the target column follows the step index, clamped so
  // the piece stays on the board.
  int col = step_index_ % W;
  col = std::min(col, W - shape.w);

  int rest = 0;
  for (int c = col; c < col + shape.w; ++c) rest = std::max(rest, heights_[c]);
  const int old_max = *std::max_element(heights_.begin(), heights_.end());

  const int top = rest + shape.h;
  if (top > rows_) {
    grid_.resize(static_cast<std::size_t>(top) * W, 0);
    rows_ = top;
  }
  for (int r = rest; r < top; ++r)
    for (int c = col; c < col + shape.w; ++c) set_cell(r, c);

  // Resolve full rows from the top down so erase offsets stay valid.
  bool cleared = false;
  for (int r = top - 1; r >= rest; --r) {
    bool full = true;
    for (int c = 0; c < W; ++c)
      if (!cell(r, c)) {
        full = false;
        break;
      }
    if (full) {
      grid_.erase(grid_.begin() + static_cast<std::ptrdiff_t>(r) * W,
                  grid_.begin() + static_cast<std::ptrdiff_t>(r + 1) * W);
      --rows_;
      cleared = true;
    }
  }
  if (cleared)
    rebuild_heights();
  else
    for (int c = col; c < col + shape.w; ++c) heights_[c] = top;

  const int new_max = *std::max_element(heights_.begin(), heights_.end());
  const double raw = -static_cast<double>(
      std::max(0, new_max - std::max(old_max, config_.height_penalty_threshold)));

  if (new_max > config_.game_over_height) {
    clear_board();
    ++resets_;
  }

  piece_ = rng.uniform_int(config_.num_pieces());
  ++step_index_;

  Step out;
  out.reward_raw = raw;
  out.reward_scaled = (raw + 2.0) / 2.0;
  out.next_code = encode();
  return out;
}

int one_hot_index(const TetrisConfig& config, int state_code, int action) {
  if (state_code < 0 || state_code >= config.num_state_buckets)
    throw std::invalid_argument("state code out of range");
  if (action < 0 || action >= config.num_rotations)
    throw std::invalid_argument("action out of range");
  return state_code * config.num_rotations + action;
}

FeatureMap tetris_one_hot_features(const TetrisConfig& config) {
  return one_hot_feature_map(config.num_state_buckets, config.num_rotations);
}

}  // namespace hybridrl
