#include "lambdarep/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lambdarep/error.hpp"

namespace lambdarep {

namespace {

constexpr double kStochasticTol = 1e-9;

// Row/column offsets for up, right, down, left.
constexpr int kDr[4] = {-1, 0, 1, 0};
constexpr int kDc[4] = {0, 1, 0, -1};

std::string cell_name(int cell, int cols) {
  std::ostringstream os;
  os << "cell (" << cell / cols << "," << cell % cols << ")";
  return os.str();
}

}  // namespace

const char* action_name(int action) {
  switch (action) {
    case kUp: return "up";
    case kRight: return "right";
    case kDown: return "down";
    case kLeft: return "left";
    case kStay: return "stay";
    default: return "?";
  }
}

TabularMDP::TabularMDP(Matrix transitions, int n_actions, double gamma, Vector start_distribution)
    : n_states_(static_cast<int>(transitions.cols())),
      n_actions_(n_actions),
      gamma_(gamma),
      transitions_(std::move(transitions)),
      start_(std::move(start_distribution)) {
  if (n_actions_ <= 0 || n_states_ <= 0 || transitions_.rows() != Eigen::Index(n_states_) * n_actions_) {
    throw StructuralError("transition matrix must have |S|*|A| rows and |S| columns");
  }
  outcomes_.resize(transitions_.rows());
  for (Eigen::Index r = 0; r < transitions_.rows(); ++r) {
    for (int s = 0; s < n_states_; ++s) {
      if (transitions_(r, s) > 0.0) outcomes_[r].push_back({transitions_(r, s), s, false});
    }
  }
  validate();
}

TabularMDP::TabularMDP(int n_states, int n_actions, std::vector<std::vector<Outcome>> outcomes,
                       double gamma, Vector start_distribution)
    : n_states_(n_states),
      n_actions_(n_actions),
      gamma_(gamma),
      transitions_(Matrix::Zero(Eigen::Index(n_states) * n_actions, n_states)),
      start_(std::move(start_distribution)),
      outcomes_(std::move(outcomes)) {
  if (n_states_ <= 0 || n_actions_ <= 0 || outcomes_.size() != std::size_t(n_states_) * n_actions_) {
    throw StructuralError("outcome table must have |S|*|A| entries");
  }
  for (std::size_t r = 0; r < outcomes_.size(); ++r) {
    for (const auto& o : outcomes_[r]) {
      if (o.next < 0 || o.next >= n_states_) throw StructuralError("outcome state out of range");
      transitions_(Eigen::Index(r), o.next) += o.prob;
    }
  }
  validate();
}

void TabularMDP::validate() const {
  if (!(gamma_ >= 0.0 && gamma_ < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!transitions_.allFinite() || transitions_.minCoeff() < 0.0) {
    throw NumericError("transition probabilities must be finite and nonnegative");
  }
  for (Eigen::Index r = 0; r < transitions_.rows(); ++r) {
    double sum = transitions_.row(r).sum();
    if (std::abs(sum - 1.0) > kStochasticTol) {
      std::ostringstream os;
      os << "transition row (s=" << r / n_actions_ << ", a=" << r % n_actions_ << ") sums to " << sum;
      throw NumericError(os.str());
    }
  }
  if (start_.size() != n_states_ || start_.minCoeff() < 0.0 ||
      std::abs(start_.sum() - 1.0) > kStochasticTol) {
    throw ConfigError("start distribution must be a probability vector over states");
  }
}

bool TabularMDP::is_deterministic() const {
  for (Eigen::Index r = 0; r < transitions_.rows(); ++r) {
    if (transitions_.row(r).maxCoeff() < 1.0 - 1e-12) return false;
  }
  return true;
}

TabularMDP TabularMDP::with_gamma(double gamma) const {
  TabularMDP copy = *this;
  copy.gamma_ = gamma;
  copy.validate();
  return copy;
}

TabularMDP TabularMDP::with_start(Vector start_distribution) const {
  TabularMDP copy = *this;
  copy.start_ = std::move(start_distribution);
  copy.validate();
  return copy;
}

Policy::Policy(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() == 0 || probs_.cols() == 0) throw StructuralError("empty policy");
  if (!probs_.allFinite() || probs_.minCoeff() < 0.0) {
    throw NumericError("policy probabilities must be finite and nonnegative");
  }
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    if (std::abs(probs_.row(s).sum() - 1.0) > kStochasticTol) {
      throw NumericError("policy row " + std::to_string(s) + " does not sum to 1");
    }
  }
}

Policy Policy::uniform(int n_states, int n_actions) {
  return Policy(Matrix::Constant(n_states, n_actions, 1.0 / n_actions));
}

Policy Policy::deterministic(std::span<const int> actions, int n_actions) {
  Matrix probs = Matrix::Zero(static_cast<Eigen::Index>(actions.size()), n_actions);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] < 0 || actions[s] >= n_actions) throw StructuralError("action index out of range");
    probs(Eigen::Index(s), actions[s]) = 1.0;
  }
  return Policy(std::move(probs));
}

std::optional<std::vector<int>> Policy::deterministic_actions() const {
  std::vector<int> actions(probs_.rows());
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    Eigen::Index a;
    if (probs_.row(s).maxCoeff(&a) < 1.0 - 1e-12) return std::nullopt;
    actions[s] = static_cast<int>(a);
  }
  return actions;
}

Matrix policy_action_weights(const TabularMDP& mdp, const Policy& pi) {
  if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions()) {
    throw StructuralError("policy shape does not match the MDP");
  }
  const int n = mdp.n_states();
  const int na = mdp.n_actions();
  Matrix w = Matrix::Zero(n, Eigen::Index(n) * na);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < na; ++a) w(s, mdp.row(s, a)) = pi(s, a);
  }
  return w;
}

Matrix policy_transition_matrix(const TabularMDP& mdp, const Policy& pi) {
  return policy_action_weights(mdp, pi) * mdp.transitions();
}

Policy greedy_policy(const Matrix& q) {
  if (q.hasNaN()) throw NumericError("greedy_policy: Q contains NaN");
  std::vector<int> actions(q.rows());
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    int best = 0;
    for (Eigen::Index a = 1; a < q.cols(); ++a) {
      if (q(s, a) > q(s, best)) best = static_cast<int>(a);
    }
    actions[s] = best;
  }
  return Policy::deterministic(actions, static_cast<int>(q.cols()));
}

void GridSpec::validate() const {
  if (rows <= 0 || cols <= 0) throw ConfigError("grid must have positive dimensions");
  if (cells.size() != std::size_t(rows) * cols) {
    throw ConfigError("grid has " + std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(rows * cols));
  }
  if (!(noise_prob >= 0.0 && noise_prob <= 1.0)) throw ConfigError("noise_prob must lie in [0, 1]");
  bool any_open = false;
  for (int i = 0; i < rows * cols; ++i) {
    char ch = cells[i];
    if (ch != '#' && ch != '.' && ch != 'S' && ch != 'G') {
      throw ConfigError("unknown character '" + std::string(1, ch) + "' at " + cell_name(i, cols));
    }
    if (ch != '#') any_open = true;
    if (ch == 'G' && !goal_annotations.contains(i)) {
      throw ConfigError("goal at " + cell_name(i, cols) + " has no annotation");
    }
  }
  if (!any_open) throw ConfigError("grid has no open cell");
  for (const auto& [cell, ann] : goal_annotations) {
    if (cell < 0 || cell >= rows * cols || cells[cell] != 'G') {
      throw ConfigError("annotation references non-goal " + cell_name(cell, cols));
    }
    if (!(ann.lambda >= 0.0 && ann.lambda <= 1.0)) {
      throw ConfigError("lambda at " + cell_name(cell, cols) + " must lie in [0, 1]");
    }
  }
}

int GridWorld::state_at(int r, int c) const {
  if (r < 0 || r >= rows || c < 0 || c >= cols) throw StructuralError("coordinates outside the grid");
  int s = cell_to_state[r * cols + c];
  if (s < 0) throw StructuralError("coordinates point at a wall");
  return s;
}

std::pair<int, int> GridWorld::coords(int state) const {
  int cell = state_to_cell.at(state);
  return {cell / cols, cell % cols};
}

GridWorld build_mdp_from_grid(const GridSpec& spec, double gamma, std::span<const int> start_cells) {
  spec.validate();
  const int n_cells = spec.rows * spec.cols;
  std::vector<int> cell_to_state(n_cells, -1);
  std::vector<int> state_to_cell;
  for (int cell = 0; cell < n_cells; ++cell) {
    if (spec.cells[cell] != '#') {
      cell_to_state[cell] = static_cast<int>(state_to_cell.size());
      state_to_cell.push_back(cell);
    }
  }
  const int n = static_cast<int>(state_to_cell.size());

  auto move = [&](int s, int dir) -> Outcome {
    int cell = state_to_cell[s];
    int r = cell / spec.cols + kDr[dir];
    int c = cell % spec.cols + kDc[dir];
    if (r < 0 || r >= spec.rows || c < 0 || c >= spec.cols || spec.cells[r * spec.cols + c] == '#') {
      return {0.0, s, true};
    }
    return {0.0, cell_to_state[r * spec.cols + c], false};
  };

  std::vector<std::vector<Outcome>> outcomes(std::size_t(n) * kNumGridActions);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < kNumGridActions; ++a) {
      auto& list = outcomes[std::size_t(s) * kNumGridActions + a];
      auto add = [&](Outcome o, double p) {
        if (p <= 0.0) return;
        for (auto& existing : list) {
          if (existing.next == o.next && existing.bumped == o.bumped) {
            existing.prob += p;
            return;
          }
        }
        o.prob = p;
        list.push_back(o);
      };
      Outcome intended = a == kStay ? Outcome{0.0, s, false} : move(s, a);
      add(intended, 1.0 - spec.noise_prob);
      for (int dir = 0; dir < 4; ++dir) add(move(s, dir), spec.noise_prob / 4.0);
    }
  }

  Vector start = Vector::Zero(n);
  if (!start_cells.empty()) {
    for (int cell : start_cells) {
      if (cell < 0 || cell >= n_cells || cell_to_state[cell] < 0) {
        throw ConfigError("start " + cell_name(cell, spec.cols) + " is not an open cell");
      }
      start[cell_to_state[cell]] += 1.0;
    }
  } else {
    for (int s = 0; s < n; ++s) {
      if (spec.cells[state_to_cell[s]] == 'S') start[s] = 1.0;
    }
    if (start.sum() == 0.0) start.setOnes();
  }
  start /= start.sum();

  GridWorld world{TabularMDP(n, kNumGridActions, std::move(outcomes), gamma, std::move(start)),
                  spec.rows,
                  spec.cols,
                  state_to_cell,
                  cell_to_state,
                  {},
                  Vector::Zero(n),
                  Vector::Ones(n),
                  spec.wall_penalty};
  for (const auto& [cell, ann] : spec.goal_annotations) {
    int s = cell_to_state[cell];
    world.goal_states.push_back(s);
    world.r_bar[s] = ann.reward;
    world.lambda[s] = ann.lambda;
  }
  return world;
}

int sample_action(const Policy& pi, int s, Rng& rng) {
  const auto row = pi.probs().row(s);
  double u = rng.uniform();
  double acc = 0.0;
  int last = 0;
  for (int a = 0; a < pi.n_actions(); ++a) {
    if (row[a] <= 0.0) continue;
    last = a;
    acc += row[a];
    if (u < acc) return a;
  }
  return last;
}

const Outcome& sample_outcome(const TabularMDP& mdp, int s, int a, Rng& rng) {
  const auto outcomes = mdp.outcomes(s, a);
  double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].prob <= 0.0) continue;
    last = i;
    acc += outcomes[i].prob;
    if (u < acc) return outcomes[i];
  }
  return outcomes[last];
}

namespace {

Vector dirichlet_row(int n, Rng& rng) {
  Vector w(n);
  for (int i = 0; i < n; ++i) w[i] = -std::log(1.0 - rng.uniform());
  return w / w.sum();
}

}  // namespace

TabularMDP random_mdp(int n_states, int n_actions, double gamma, Rng& rng, int support) {
  if (n_states <= 0 || n_actions <= 0) throw ConfigError("random MDP needs positive sizes");
  Matrix T = Matrix::Zero(Eigen::Index(n_states) * n_actions, n_states);
  const int k = (support <= 0 || support > n_states) ? n_states : support;
  for (Eigen::Index r = 0; r < T.rows(); ++r) {
    std::vector<int> idx(n_states);
    for (int i = 0; i < n_states; ++i) idx[i] = i;
    for (int i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n_states - i)]);
    const Vector w = dirichlet_row(k, rng);
    for (int i = 0; i < k; ++i) T(r, idx[i]) = w[i];
  }
  return TabularMDP(std::move(T), n_actions, gamma, Vector::Constant(n_states, 1.0 / n_states));
}

Policy random_policy(int n_states, int n_actions, Rng& rng) {
  Matrix probs(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) probs.row(s) = dirichlet_row(n_actions, rng).transpose();
  return Policy(std::move(probs));
}

std::vector<int> nominal_successor(const TabularMDP& mdp) {
  std::vector<int> next(std::size_t(mdp.n_states()) * mdp.n_actions());
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      Eigen::Index best;
      mdp.transitions().row(mdp.row(s, a)).maxCoeff(&best);
      next[mdp.row(s, a)] = static_cast<int>(best);
    }
  }
  return next;
}

}  // namespace lambdarep
