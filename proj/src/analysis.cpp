#include "lambdarep/analysis.hpp"

#include <cmath>
#include <deque>
#include <memory>

#include "lambdarep/compose.hpp"
#include "lambdarep/error.hpp"
#include "lambdarep/td_learn.hpp"

namespace lambdarep {
namespace {

bool rewarded(const RewardSpec& spec, int s) { return spec.r_bar[s] != 0.0; }

std::vector<PatchRecord> find_patches(const EpisodeTrace& trace, const RewardSpec& spec) {
  std::vector<PatchRecord> out;
  const auto& rec = trace.records;
  std::size_t i = 0;
  while (i < rec.size()) {
    const int s = rec[i].state;
    std::size_t j = i + 1;
    while (j < rec.size() && rec[j].state == s) ++j;
    if (rewarded(spec, s)) {
      PatchRecord p;
      p.state = s;
      p.enter_t = rec[i].t;
      p.leave_t = rec[j - 1].t + 1;
      out.push_back(p);
    }
    i = j;
  }
  return out;
}

// First action of a shortest nominal path from `from` to any state flagged in `target`, or -1.
int first_step_towards(const TabularMDP& mdp, const std::vector<int>& next, int from, const std::vector<char>& target) {
  const int nS = mdp.n_states();
  const int nA = mdp.n_actions();
  std::vector<int> first(nS, -1);
  std::vector<char> seen(nS, 0);
  std::deque<int> queue;
  seen[from] = 1;
  queue.push_back(from);
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (int a = 0; a < nA; ++a) {
      const int s1 = next[mdp.row(s, a)];
      if (seen[s1]) continue;
      seen[s1] = 1;
      first[s1] = s == from ? a : first[s];
      if (target[s1]) return first[s1];
      queue.push_back(s1);
    }
  }
  return -1;
}

int stay_action(const TabularMDP& mdp, const std::vector<int>& next, int s) {
  if (mdp.n_actions() == kNumGridActions) return kStay;
  for (int a = 0; a < mdp.n_actions(); ++a) {
    if (next[mdp.row(s, a)] == s) return a;
  }
  return 0;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

int mvt_rule_leave(const EpisodeTrace& trace, const RewardSpec& spec, const PatchRecord& patch, double R, double T,
                   bool discounted, double gamma) {
  if (!(T > 0.0)) throw ConfigError("episode length T must be positive");
  const double g = discounted ? gamma : 1.0;
  double before = 0.0;  // reward received before step t
  double w = 1.0;       // g^t
  for (const auto& rec : trace.records) {
    if (rec.t >= patch.leave_t) break;
    if (rec.t >= patch.enter_t) {
      const double r_t = before + w * rec.state_reward;
      const double incoming = w * g * spec.lambda[patch.state] * rec.state_reward;
      if (incoming < (R - r_t) / T) return rec.t + 1;
    }
    before += w * rec.reward;
    w *= g;
  }
  return patch.leave_t;
}

PatchReport mvt_leave_times(const EpisodeTrace& trace, const RewardSpec& spec, const MvtParams& params) {
  if (trace.records.empty()) throw StateError("cannot analyse an empty trace");
  PatchReport report;
  report.R = params.R;
  report.T = params.T;
  report.patches = find_patches(trace, spec);
  for (auto& p : report.patches) {
    p.mvt_leave_t = mvt_rule_leave(trace, spec, p, params.R, params.T, false, 1.0);
    p.discounted_mvt_leave_t = mvt_rule_leave(trace, spec, p, params.R_discounted, params.T, true, params.gamma);
  }
  return report;
}

LeaveSummary agent_vs_mvt(const std::string& environment, const std::vector<std::vector<EpisodeTrace>>& traces_by_seed,
                          const RewardSpec& spec, const MvtParams& params, std::vector<LeaveDiffRow>* rows) {
  if (traces_by_seed.size() < 3) throw ConfigError("leave-time comparison needs at least three seeds");
  LeaveSummary out;
  out.environment = environment;
  std::vector<double> seed_disc;
  std::vector<double> seed_undisc;
  for (std::size_t seed = 0; seed < traces_by_seed.size(); ++seed) {
    std::vector<double> disc;
    std::vector<double> undisc;
    int patch_idx = 0;
    for (const auto& trace : traces_by_seed[seed]) {
      if (trace.records.empty()) continue;
      for (const auto& p : mvt_leave_times(trace, spec, params).patches) {
        const int dd = p.leave_t - p.discounted_mvt_leave_t;
        const int du = p.leave_t - p.mvt_leave_t;
        disc.push_back(dd);
        undisc.push_back(du);
        if (rows) rows->push_back(LeaveDiffRow{environment, static_cast<int>(seed), patch_idx, dd, du});
        ++patch_idx;
      }
    }
    out.patches += patch_idx;
    if (!disc.empty()) {
      seed_disc.push_back(mean_of(disc));
      seed_undisc.push_back(mean_of(undisc));
    }
  }
  out.mean_diff_discounted = mean_of(seed_disc);
  out.se_diff_discounted = se_of(seed_disc);
  out.mean_diff_undiscounted = mean_of(seed_undisc);
  out.se_diff_undiscounted = se_of(seed_undisc);
  return out;
}

MvtParams calibrate_mvt(const std::vector<EpisodeTrace>& traces, double gamma) {
  if (traces.empty()) throw ConfigError("calibration needs at least one episode");
  MvtParams p;
  p.gamma = gamma;
  std::vector<double> und;
  std::vector<double> dis;
  std::vector<double> len;
  for (const auto& tr : traces) {
    double total = 0.0;
    double disc = 0.0;
    double w = 1.0;
    for (const auto& rec : tr.records) {
      total += rec.reward;
      disc += w * rec.reward;
      w *= gamma;
    }
    und.push_back(total);
    dis.push_back(disc);
    len.push_back(static_cast<double>(tr.size()));
  }
  p.R = mean_of(und);
  p.R_discounted = mean_of(dis);
  p.T = std::max(1.0, mean_of(len));
  return p;
}

Agent mvt_rule_agent(const TabularMDP& mdp, const RewardSpec& spec, const MvtParams& params, bool discounted) {
  const auto next = nominal_successor(mdp);
  // Running reward sum discounted with the rule's gamma, rebuilt from the undiscounted total.
  struct Memory {
    double weighted = 0.0;
    double last_cumulative = 0.0;
  };
  auto memory = std::make_shared<Memory>();
  return [&mdp, spec, params, discounted, next, memory](const EpisodeState& ep) {
    const int s = ep.current;
    const int nS = mdp.n_states();
    const double g = discounted ? params.gamma : 1.0;
    if (ep.t == 0) *memory = Memory{};
    const double w = std::pow(g, ep.t);
    if (ep.t > 0) memory->weighted += (w / g) * (ep.cumulative_return - memory->last_cumulative);
    memory->last_cumulative = ep.cumulative_return;
    if (rewarded(spec, s)) {
      const double R = discounted ? params.R_discounted : params.R;
      const double r_now = ep.reward_vector[s];
      const double r_t = memory->weighted + w * r_now;
      const double incoming = w * g * spec.lambda[s] * r_now;
      if (!(incoming < (R - r_t) / params.T)) return stay_action(mdp, next, s);
    }
    std::vector<char> target(nS, 0);
    bool any = false;
    for (int goal : spec.goal_states()) {
      if (goal != s && ep.reward_vector[goal] > 0.0) {
        target[goal] = 1;
        any = true;
      }
    }
    if (!any) {
      for (int goal : spec.goal_states()) {
        if (goal != s) {
          target[goal] = 1;
          any = true;
        }
      }
    }
    const int a = any ? first_step_towards(mdp, next, s, target) : -1;
    return a < 0 ? stay_action(mdp, next, s) : a;
  };
}

std::vector<std::pair<double, double>> self_transition_pairs(const EpisodeTrace& trace, const RewardSpec& spec) {
  std::vector<std::pair<double, double>> out;
  const auto& rec = trace.records;
  for (std::size_t i = 0; i + 1 < rec.size(); ++i) {
    if (rec[i].state == rec[i + 1].state && rewarded(spec, rec[i].state)) {
      out.emplace_back(rec[i].state_reward, rec[i + 1].state_reward);
    }
  }
  return out;
}

ForageResult run_forage(const TabularMDP& mdp, const RewardSpec& spec,
                        const std::vector<std::pair<std::string, Policy>>& policies, const ForageOptions& options) {
  if (options.episodes <= 0) throw ConfigError("episodes must be positive");
  if (policies.empty()) throw ConfigError("foraging needs at least one base policy");
  const int nS = mdp.n_states();
  LambdaEstimator estimator(options.lambda_hat, options.eta);
  double built_for = options.lambda_hat;
  PolicySet set = PolicySet::build(mdp, policies, uniform_lambda(nS, built_for), options.solve);

  ForageResult out;
  for (int e = 0; e < options.episodes; ++e) {
    const double lam = options.learn_lambda ? estimator.value() : options.lambda_hat;
    if (std::abs(lam - built_for) > 1e-3) {
      set = PolicySet::build(mdp, policies, uniform_lambda(nS, lam), options.solve);
      built_for = lam;
    }
    EpisodeOptions eo;
    eo.horizon = options.horizon;
    eo.seed = mix_seed(options.seed, static_cast<std::uint64_t>(e));
    EpisodeTrace trace = run_episode(mdp, spec, gpi_agent(set), eo);
    out.lambda_hat.push_back(lam);
    out.returns.push_back(trace.undiscounted_return);
    out.discounted_returns.push_back(trace.discounted_return);
    if (options.learn_lambda) estimator.update(self_transition_pairs(trace, spec));
    out.traces.push_back(std::move(trace));
  }
  out.final_lambda_hat = options.learn_lambda ? estimator.value() : options.lambda_hat;
  return out;
}

}  // namespace lambdarep
