#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lambdarep/linalg.hpp"
#include "lambdarep/rng.hpp"

namespace lambdarep {

/// Grid actions. The numeric order is also the argmax tie-break order.
enum Action : int { kUp = 0, kRight = 1, kDown = 2, kLeft = 3, kStay = 4 };
inline constexpr int kNumGridActions = 5;

const char* action_name(int action);

/// One possible result of taking an action: where the agent lands, with what
/// probability, and whether the move was blocked by a wall or the grid edge.
struct Outcome {
  double prob = 0.0;
  int next = 0;
  bool bumped = false;
};

/// Finite MDP with a dense transition tensor stored as an (|S|*|A|) x |S|
/// matrix; row `s * n_actions + a` is p(. | s, a).
class TabularMDP {
 public:
  TabularMDP(Matrix transitions, int n_actions, double gamma, Vector start_distribution);

  /// Builds the dense tensor from per-(s, a) outcome lists. Outcomes landing on
  /// the same state are merged in the dense view but kept apart for sampling so
  /// that wall bumps stay observable.
  TabularMDP(int n_states, int n_actions, std::vector<std::vector<Outcome>> outcomes, double gamma,
             Vector start_distribution);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double gamma() const { return gamma_; }
  const Matrix& transitions() const { return transitions_; }
  const Vector& start_distribution() const { return start_; }

  int row(int s, int a) const { return s * n_actions_ + a; }
  double p(int s, int a, int next) const { return transitions_(row(s, a), next); }
  std::span<const Outcome> outcomes(int s, int a) const { return outcomes_[row(s, a)]; }

  /// True when every (s, a) row is one-hot.
  bool is_deterministic() const;

  TabularMDP with_gamma(double gamma) const;
  TabularMDP with_start(Vector start_distribution) const;

 private:
  void validate() const;

  int n_states_;
  int n_actions_;
  double gamma_;
  Matrix transitions_;
  Vector start_;
  std::vector<std::vector<Outcome>> outcomes_;
};

/// Stationary stochastic policy pi(a|s), one row per state.
class Policy {
 public:
  explicit Policy(Matrix probs);

  static Policy uniform(int n_states, int n_actions);
  static Policy deterministic(std::span<const int> actions, int n_actions);

  const Matrix& probs() const { return probs_; }
  int n_states() const { return static_cast<int>(probs_.rows()); }
  int n_actions() const { return static_cast<int>(probs_.cols()); }
  double operator()(int s, int a) const { return probs_(s, a); }

  /// The chosen action per state if every row is one-hot.
  std::optional<std::vector<int>> deterministic_actions() const;

 private:
  Matrix probs_;
};

/// P^pi(s, s') = sum_a pi(a|s) p(s'|s, a).
Matrix policy_transition_matrix(const TabularMDP& mdp, const Policy& pi);

/// sum_a pi(a|s) p(.|s, a) weights as an |S| x (|S|*|A|) matrix; multiplying
/// an action-conditioned table by it averages rows over the policy.
Matrix policy_action_weights(const TabularMDP& mdp, const Policy& pi);

/// Draws a ~ pi(.|s).
int sample_action(const Policy& pi, int s, Rng& rng);

/// Draws the outcome of taking `a` in `s`.
const Outcome& sample_outcome(const TabularMDP& mdp, int s, int a, Rng& rng);

/// Random MDP with Dirichlet(1) rows. support > 0 restricts each row to that many
/// distinct successors.
TabularMDP random_mdp(int n_states, int n_actions, double gamma, Rng& rng, int support = 0);

/// Random stochastic policy with Dirichlet(1) rows.
Policy random_policy(int n_states, int n_actions, Rng& rng);

/// Deterministic argmax policy; ties go to the lowest action index.
Policy greedy_policy(const Matrix& q);

struct GoalAnnotation {
  double reward = 0.0;
  double lambda = 1.0;
};

/// Text gridworld description. Cells are row-major over '#', '.', 'S', 'G'.
struct GridSpec {
  int rows = 0;
  int cols = 0;
  std::string cells;
  std::map<int, GoalAnnotation> goal_annotations;  // keyed by cell index
  double noise_prob = 0.0;
  double wall_penalty = -1.0;

  void validate() const;
};

/// A grid compiled to a tabular MDP plus the bookkeeping to map between
/// cells and states.
struct GridWorld {
  TabularMDP mdp;
  int rows = 0;
  int cols = 0;
  std::vector<int> state_to_cell;
  std::vector<int> cell_to_state;  // -1 for walls
  std::vector<int> goal_states;    // in increasing cell order
  Vector r_bar;                    // initial reward per state, 0 off-goal
  Vector lambda;                   // decay per state, 1 off-goal
  double wall_penalty = -1.0;

  int state_at(int r, int c) const;
  std::pair<int, int> coords(int state) const;
};

/// Compiles a grid. When `start_cells` is empty the start distribution is
/// uniform over 'S' cells, or over all open cells if there are none.
GridWorld build_mdp_from_grid(const GridSpec& spec, double gamma,
                              std::span<const int> start_cells = {});

/// Most likely next state per (s, a) ignoring noise; used for path planning helpers.
std::vector<int> nominal_successor(const TabularMDP& mdp);

}  // namespace lambdarep
