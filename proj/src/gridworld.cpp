#include "persuade/gridworld.hpp"

#include <algorithm>

namespace persuade::envs {

Cell action_offset(Action a) {
  switch (a) {
    case Action::Up: return Cell(0, -1);
    case Action::Down: return Cell(0, 1);
    case Action::Left: return Cell(-1, 0);
    case Action::Right: return Cell(1, 0);
    case Action::Stay: return Cell(0, 0);
  }
  return Cell(0, 0);
}

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Left: return "left";
    case Action::Right: return "right";
    case Action::Stay: return "stay";
  }
  return "?";
}

void GridConfig::validate() const {
  if (width <= 0 || height <= 0 || width * height < 3) {
    throw DomainError("grid needs room for the Receiver and two objects");
  }
  if (visibility < 0) throw DomainError("visibility must be non-negative");
  if (episode_len <= 0) throw DomainError("episode length must be positive");
  if (!(step_cost >= 0.0)) throw DomainError("step cost must be non-negative");
  sender_reward_vector(theta_degrees);
}

namespace {

Cell cell_at(const GridConfig& cfg, std::size_t index) {
  return Cell(static_cast<int>(index % cfg.width), static_cast<int>(index / cfg.width));
}

// Uniform over cells not in `excluded` (rejection sampling).
template <typename... Cells>
Cell sample_free_cell(const GridConfig& cfg, Rng& rng, const Cells&... excluded) {
  for (;;) {
    const Cell c = cell_at(cfg, rng.index(static_cast<std::size_t>(cfg.cells())));
    if (((c != excluded) && ...)) return c;
  }
}

}  // namespace

GridState grid_reset(const GridConfig& cfg, Rng& rng) {
  GridState st;
  st.receiver = sample_free_cell(cfg, rng);
  st.apple = sample_free_cell(cfg, rng, st.receiver);
  st.diamond = sample_free_cell(cfg, rng, st.receiver, st.apple);
  st.step = 0;
  return st;
}

StepResult grid_step(const GridConfig& cfg, const GridState& st, Action action, Rng& rng) {
  if (st.step >= cfg.episode_len) throw EpisodeFinished("episode already finished");
  StepResult out;
  out.state = st;
  GridState& next = out.state;
  const Cell target = st.receiver + action_offset(action);
  if (cfg.in_bounds(target)) next.receiver = target;

  ObjectCounts collected = ObjectCounts::Zero();
  if (next.receiver == next.apple) {
    out.apple_collected = true;
    collected.x() = 1.0;
    next.apple = sample_free_cell(cfg, rng, next.receiver, next.diamond);
  } else if (next.receiver == next.diamond) {
    out.diamond_collected = true;
    collected.y() = 1.0;
    next.diamond = sample_free_cell(cfg, rng, next.receiver, next.apple);
  }
  out.re_r = receiver_reward_vector().dot(collected) - cfg.step_cost;
  out.re_s = sender_reward_vector(cfg.theta_degrees).dot(collected) - cfg.step_cost;
  ++next.step;
  return out;
}

std::optional<Cell> GridObservation::visible_apple() const {
  for (Eigen::Index r = 0; r < window.rows(); ++r) {
    for (Eigen::Index c = 0; c < window.cols(); ++c) {
      if (window(r, c) == static_cast<std::int8_t>(CellContent::Apple)) {
        return Cell(static_cast<int>(c) - radius(), static_cast<int>(r) - radius());
      }
    }
  }
  return std::nullopt;
}

GridObservation grid_observe(const GridConfig& cfg, const GridState& st,
                             std::optional<Action> advice,
                             std::optional<ContractProposal> contract) {
  const int v = cfg.visibility;
  GridObservation obs;
  obs.window.resize(2 * v + 1, 2 * v + 1);
  for (int dy = -v; dy <= v; ++dy) {
    for (int dx = -v; dx <= v; ++dx) {
      const Cell c = st.receiver + Cell(dx, dy);
      CellContent content = CellContent::Empty;
      if (!cfg.in_bounds(c)) {
        content = CellContent::OutOfBounds;
      } else if (c == st.receiver) {
        content = CellContent::Receiver;
      } else if (c == st.apple) {
        content = CellContent::Apple;
      } else if (c == st.diamond) {
        content = CellContent::Diamond;
      }
      obs.window(dy + v, dx + v) = static_cast<std::int8_t>(content);
    }
  }
  obs.receiver = st.receiver;
  obs.advice = advice;
  obs.contract = contract;
  return obs;
}

double average_window_coverage(const GridConfig& cfg) {
  // Coverage factorises over the axes.
  auto axis_mean = [v = cfg.visibility](int n) {
    double total = 0.0;
    for (int x = 0; x < n; ++x) {
      total += std::min(x + v, n - 1) - std::max(x - v, 0) + 1;
    }
    return total / n;
  };
  return axis_mean(cfg.width) * axis_mean(cfg.height) / cfg.cells();
}

}  // namespace persuade::envs
