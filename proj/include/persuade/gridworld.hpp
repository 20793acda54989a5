#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "persuade/core.hpp"
#include "persuade/rng.hpp"

// Apple/diamond gridworld with a partially observing Receiver.
namespace persuade::envs {

/// (x, y); x is the column, y the row, y grows downwards.
using Cell = Eigen::Vector2i;

inline int manhattan(const Cell& a, const Cell& b) { return (a - b).cwiseAbs().sum(); }

enum class Action : std::uint8_t { Up, Down, Left, Right, Stay };
inline constexpr int kActionCount = 5;
inline constexpr std::array<Action, kActionCount> kAllActions = {
    Action::Up, Action::Down, Action::Left, Action::Right, Action::Stay};

Cell action_offset(Action a);
std::string_view action_name(Action a);

struct GridConfig {
  int width = 10;
  int height = 10;
  int visibility = 1;
  double theta_degrees = 0.0;
  int episode_len = 500;
  double step_cost = 0.042;
  bool contract_mode = false;

  void validate() const;
  bool in_bounds(const Cell& c) const {
    return c.x() >= 0 && c.y() >= 0 && c.x() < width && c.y() < height;
  }
  int cells() const { return width * height; }
};

struct GridState {
  Cell receiver = Cell::Zero();
  Cell apple = Cell::Zero();
  Cell diamond = Cell::Zero();
  int step = 0;

  bool operator==(const GridState& o) const {
    return receiver == o.receiver && apple == o.apple && diamond == o.diamond &&
           step == o.step;
  }
};

/// Thrown when stepping an episode that has run its full length.
class EpisodeFinished : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Receiver uniform over all cells, apple then diamond uniform over the
/// remaining ones.
GridState grid_reset(const GridConfig& cfg, Rng& rng);

struct StepResult {
  GridState state;
  bool apple_collected = false;
  bool diamond_collected = false;
  double re_r = 0.0;
  double re_s = 0.0;
};

/// Moves the Receiver (off-grid moves are no-ops), collects on entry and
/// respawns a collected object away from the Receiver and the other object.
StepResult grid_step(const GridConfig& cfg, const GridState& st, Action action, Rng& rng);

enum class CellContent : std::int8_t {
  OutOfBounds = -1,
  Empty = 0,
  Apple = 1,
  Diamond = 2,
  Receiver = 3,
};

using Window = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// What the Receiver sees: the (2v+1)^2 Moore window centred on itself
/// (row = dy + v, col = dx + v), its own cell, and whatever the Sender sent.
struct GridObservation {
  Window window;
  Cell receiver = Cell::Zero();
  std::optional<Action> advice;
  std::optional<ContractProposal> contract;

  int radius() const { return static_cast<int>(window.rows() / 2); }
  CellContent at(int dx, int dy) const {
    return static_cast<CellContent>(window(dy + radius(), dx + radius()));
  }
  /// Offset of the apple from the Receiver, if it lies in the window.
  std::optional<Cell> visible_apple() const;
};

GridObservation grid_observe(const GridConfig& cfg, const GridState& st,
                             std::optional<Action> advice = std::nullopt,
                             std::optional<ContractProposal> contract = std::nullopt);

/// Average fraction of the grid inside the window over all Receiver cells.
double average_window_coverage(const GridConfig& cfg);

}  // namespace persuade::envs
