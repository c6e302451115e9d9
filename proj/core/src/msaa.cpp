#include "trajmine/msaa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>

#include "trajmine/errors.hpp"

namespace trajmine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kObjTol = 1e-9;    // objective / accel comparison tolerance
constexpr double kTimeTol = 1e-7;   // slack when verifying time separations
constexpr double kTinyAccel = 1e-9; // minimal positive accel for a stopped agent
constexpr std::size_t kScanPoints = 4096;
constexpr std::size_t kTreeScan = 256;         // intervals in the 1-D tree scan
constexpr std::size_t kMaxTreeCandidates = 32;
constexpr std::size_t kMaxCombos = 20000;      // cap on pair-label combinations
constexpr int kMaxSweeps = 400;

// ------------------------------------------------------------- kinematics

// Relative tolerance that treats a barely negative discriminant as zero, so
// the boundary accel (stop exactly at the point) keeps a finite time.
double disc_floor(double v, double a, double d) {
  return -1e-12 * (v * v + std::abs(2.0 * a * d) + 1.0);
}

// Smallest nonnegative t with v t + a t^2 / 2 = d, or +inf when the agent
// stops short. d <= 0 counts as already passed.
double pass_time_raw(double v, double d, double a) {
  if (d <= 0.0) return 0.0;
  if (a == 0.0) return v > 0.0 ? d / v : kInf;
  double disc = v * v + 2.0 * a * d;
  if (disc < disc_floor(v, a, d)) return kInf;
  if (disc < 0.0) disc = 0.0;
  const double root = std::sqrt(disc);
  if (a > 0.0) return (root - v) / a;
  return (v - root) / (-a);
}

// Stops at or before the point (boundary inclusive).
bool yields(double v, double d, double a) {
  if (d <= 0.0) return false;
  if (v <= 0.0) return a <= 0.0;
  if (a >= 0.0) return false;
  return v * v + 2.0 * a * d <= 1e-9 * (v * v + 1.0);
}

// Lower accel bound that still reaches the point.
double min_pass_accel(double v, double d) {
  if (d <= 0.0) return -kInf;
  if (v <= 0.0) return kTinyAccel;
  return -(v * v) / (2.0 * d);
}

// Upper accel bound that stops at or before the point; -inf when no accel
// can (the agent is already there).
double max_yield_accel(double v, double d) {
  if (d <= 0.0) return -kInf;
  if (v <= 0.0) return 0.0;
  return -(v * v) / (2.0 * d);
}

// Accel arriving exactly at time T. For T beyond the latest reachable
// arrival the result drops below min_pass_accel, which callers clamp.
double accel_for_time(double v, double d, double T) {
  if (T <= 0.0) return kInf;
  return 2.0 * (d - v * T) / (T * T);
}

double earliest_pass_time(double v, double d, double a_max) {
  return pass_time_raw(v, d, a_max);
}

double latest_pass_time(double v, double d, double a_min) {
  if (d <= 0.0) return 0.0;
  if (v <= 0.0) return kInf;
  if (a_min <= min_pass_accel(v, d)) return 2.0 * d / v;
  return pass_time_raw(v, d, a_min);
}

// Cost to arrive at or before T (push forward when the free arrival is late).
double push_cost(double v, double d, double T, double t_free) {
  if (t_free <= T) return 0.0;
  return std::abs(accel_for_time(v, d, T));
}

// Cost to arrive at or after T while still passing.
double delay_cost(double v, double d, double T, double t_free) {
  if (t_free >= T) return 0.0;
  return std::abs(accel_for_time(v, d, T));
}

bool pair_resolved(double va, double da, double aa, double vb, double db,
                   double ab, double tau) {
  if (yields(va, da, aa) || yields(vb, db, ab)) return true;
  const double ta = pass_time_raw(va, da, aa);
  const double tb = pass_time_raw(vb, db, ab);
  if (std::isinf(ta) || std::isinf(tb)) return true;
  return std::abs(ta - tb) >= tau - kTimeTol;
}

// ------------------------------------------------------- problem plumbing

struct PairProb {
  std::size_t a = 0;  // agent indices, a is the pair's id_a side
  std::size_t b = 0;
  double da = 0.0;
  double db = 0.0;
};

struct ChainProb {
  std::vector<std::string> ids;  // sorted ascending
  std::vector<double> v;
  std::vector<PairProb> pairs;
  MsaaParams params;

  double dist(std::size_t agent, const PairProb& p) const {
    return agent == p.a ? p.da : p.db;
  }
  std::size_t other(std::size_t agent, const PairProb& p) const {
    return agent == p.a ? p.b : p.a;
  }
};

bool all_resolved(const ChainProb& prob, const std::vector<double>& acc) {
  for (const PairProb& p : prob.pairs) {
    if (!pair_resolved(prob.v[p.a], p.da, acc[p.a], prob.v[p.b], p.db,
                       acc[p.b], prob.params.tau_safe)) {
      return false;
    }
  }
  return true;
}

double objective_of(const std::vector<double>& acc) {
  double s = 0.0;
  for (double a : acc) s += std::abs(a);
  return s;
}

// Preference order for equal-quality solutions: lower objective, then lower
// peak |accel|, then more delay assigned to the larger track id.
bool better_solution(const ChainProb& prob, const std::vector<double>& x,
                     double fx, const std::vector<double>& y, double fy) {
  if (fx < fy - kObjTol) return true;
  if (fx > fy + kObjTol) return false;
  double mx = 0.0;
  double my = 0.0;
  for (double a : x) mx = std::max(mx, std::abs(a));
  for (double a : y) my = std::max(my, std::abs(a));
  if (mx < my - kObjTol) return true;
  if (mx > my + kObjTol) return false;
  for (std::size_t r = prob.ids.size(); r-- > 0;) {
    if (x[r] < y[r] - kObjTol) return true;
    if (x[r] > y[r] + kObjTol) return false;
  }
  return false;
}

// ------------------------------------------------------- exact pair solve

struct PairOutcome {
  std::vector<double> acc;
  double obj = kInf;
  bool feasible = false;
};

// 1-D convex scan for the ordered branch: `first` arrives at s, `second` at
// or after s + tau. Returns the branch minimum or nothing when the window
// is empty.
struct OrderedBranch {
  double s_lo = 0.0;
  double s_hi = 0.0;
  double vf, df, vs, ds, tau;
  double tf_free, ts_free;

  double cost(double s) const {
    return push_cost(vf, df, s, tf_free) + delay_cost(vs, ds, s + tau, ts_free);
  }
};

std::optional<OrderedBranch> make_branch(double vf, double df, double vs,
                                         double ds, const MsaaParams& prm) {
  OrderedBranch br;
  br.vf = vf;
  br.df = df;
  br.vs = vs;
  br.ds = ds;
  br.tau = prm.tau_safe;
  br.tf_free = pass_time_raw(vf, df, 0.0);
  br.ts_free = pass_time_raw(vs, ds, 0.0);
  br.s_lo = earliest_pass_time(vf, df, prm.a_max);
  const double lf = latest_pass_time(vf, df, prm.a_min);
  const double ls = latest_pass_time(vs, ds, prm.a_min);
  br.s_hi = std::min(lf, ls - prm.tau_safe);
  if (std::isinf(br.s_hi)) br.s_hi = std::max(br.tf_free, br.s_lo) + prm.tau_safe;
  if (!(br.s_lo <= br.s_hi) || std::isinf(br.s_lo)) return std::nullopt;
  return br;
}

double minimize_branch(const OrderedBranch& br, double* s_best) {
  double lo = br.s_lo;
  double hi = br.s_hi;
  double best_s = lo;
  double best = br.cost(lo);
  const auto consider = [&](double s) {
    if (s < lo || s > hi) return;
    const double c = br.cost(s);
    if (c < best) {
      best = c;
      best_s = s;
    }
  };
  consider(hi);
  consider(br.tf_free);
  consider(br.ts_free - br.tau);
  const double span = hi - lo;
  for (std::size_t i = 1; i < kScanPoints; ++i) {
    consider(lo + span * static_cast<double>(i) /
                      static_cast<double>(kScanPoints));
  }
  // Golden-section refinement around the best sample.
  double a = std::max(lo, best_s - span / static_cast<double>(kScanPoints));
  double b = std::min(hi, best_s + span / static_cast<double>(kScanPoints));
  constexpr double kGolden = 0.618033988749894848;
  for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
    const double x1 = b - kGolden * (b - a);
    const double x2 = a + kGolden * (b - a);
    if (br.cost(x1) <= br.cost(x2))
      b = x2;
    else
      a = x1;
  }
  consider((a + b) / 2.0);
  *s_best = best_s;
  return best;
}

void branch_accels(const OrderedBranch& br, double s, double* af, double* as) {
  *af = br.tf_free <= s ? 0.0 : accel_for_time(br.vf, br.df, s);
  *as = br.ts_free >= s + br.tau ? 0.0
                                 : accel_for_time(br.vs, br.ds, s + br.tau);
}

// Exact minimum for a two-agent, one-pair problem.
PairOutcome solve_pair_core(const ChainProb& prob) {
  const PairProb& p = prob.pairs.front();
  const double va = prob.v[p.a];
  const double vb = prob.v[p.b];
  const MsaaParams& prm = prob.params;

  PairOutcome best;
  const auto consider = [&](std::vector<double> acc) {
    for (double a : acc) {
      if (a < prm.a_min - kObjTol || a > prm.a_max + kObjTol) return;
    }
    if (!all_resolved(prob, acc)) return;
    const double obj = objective_of(acc);
    if (!best.feasible || better_solution(prob, acc, obj, best.acc, best.obj)) {
      best.acc = std::move(acc);
      best.obj = obj;
      best.feasible = true;
    }
  };

  std::vector<double> zero(prob.ids.size(), 0.0);
  consider(zero);

  const double ya = max_yield_accel(va, p.da);
  if (ya >= prm.a_min) {
    std::vector<double> acc = zero;
    acc[p.a] = std::min(ya, 0.0);
    consider(std::move(acc));
  }
  const double yb = max_yield_accel(vb, p.db);
  if (yb >= prm.a_min) {
    std::vector<double> acc = zero;
    acc[p.b] = std::min(yb, 0.0);
    consider(std::move(acc));
  }

  if (auto br = make_branch(va, p.da, vb, p.db, prm)) {
    double s = 0.0;
    minimize_branch(*br, &s);
    std::vector<double> acc = zero;
    branch_accels(*br, s, &acc[p.a], &acc[p.b]);
    consider(std::move(acc));
  }
  if (auto br = make_branch(vb, p.db, va, p.da, prm)) {
    double s = 0.0;
    minimize_branch(*br, &s);
    std::vector<double> acc = zero;
    branch_accels(*br, s, &acc[p.b], &acc[p.a]);
    consider(std::move(acc));
  }
  return best;
}

// ----------------------------------------------------------- chain solve
//
// Exact search over per-pair resolution labels:
//   yield_a / yield_b : that endpoint brakes to a stop before the point,
//   tight_a_first     : both endpoints arrive and the gap is exactly tau,
//   tight_b_first     : the same with roles swapped,
//   slack             : resolved with room to spare, imposing no structure.
// Some optimum always fits one labeling: with a separable |a| objective an
// agent sits away from zero and away from its yield/box bounds only when a
// pair separation is exactly tau, and tight pairs forming a cycle pin an
// isolated point that is also a feasibility boundary of the family obtained
// by relabeling one cycle edge as slack. Tight edges therefore only need to
// be enumerated over forests. Each tree is a one-parameter family driven by
// its root accel: arrival times propagate along tight edges, and every
// interior local minimum, domain endpoint and feasibility boundary of the
// tree cost is kept as a candidate. Candidates combine across trees and the
// assembled plan is re-verified in full before acceptance.

enum class Label : std::uint8_t {
  slack,
  yield_a,
  yield_b,
  tight_a_first,
  tight_b_first,
};

struct ChainOutcome {
  std::vector<double> acc;
  double obj = kInf;
  bool feasible = false;
  bool approximate = false;
};

void consider_outcome(const ChainProb& prob, std::vector<double> acc,
                      ChainOutcome* best) {
  if (!all_resolved(prob, acc)) return;
  for (double a : acc) {
    if (a < prob.params.a_min - kObjTol || a > prob.params.a_max + kObjTol)
      return;
  }
  const double obj = objective_of(acc);
  if (!best->feasible ||
      better_solution(prob, acc, obj, best->acc, best->obj)) {
    best->acc = std::move(acc);
    best->obj = obj;
    best->feasible = true;
  }
}

double clamp_to(double x, double lo, double hi) {
  return std::min(std::max(x, lo), hi);
}

// One tree of tight pairs. nodes[0] is the root; every other node hangs off
// nodes[parent] through pair via_pair and crosses tau after the parent when
// parent_first, tau before it otherwise.
struct TreeNode {
  std::size_t agent = 0;
  std::size_t parent = 0;
  std::size_t via_pair = 0;
  bool parent_first = false;
};

struct TreeProblem {
  std::vector<TreeNode> nodes;
  std::vector<std::size_t> check_pairs;  // pairs decided by this tree + frees
};

struct TreeEval {
  double theta = 0.0;
  double cost = kInf;
  std::vector<double> acc;  // aligned with TreeProblem::nodes
};

// Accels and cost of the tree at root accel theta, or nothing when a tight
// edge cannot be honored, a bound is violated, or a pair decided by this
// tree is unresolved. `work` is agent-count scratch prefilled from `base`.
std::optional<TreeEval> eval_tree(const ChainProb& prob,
                                  const TreeProblem& tree,
                                  const std::vector<double>& ub, double theta,
                                  const std::vector<double>& base,
                                  std::vector<double>& work) {
  const double tau = prob.params.tau_safe;
  TreeEval ev;
  ev.theta = theta;
  ev.acc.resize(tree.nodes.size());
  work = base;
  ev.acc[0] = theta;
  work[tree.nodes[0].agent] = theta;
  ev.cost = std::abs(theta);
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    const TreeNode& nd = tree.nodes[i];
    const PairProb& p = prob.pairs[nd.via_pair];
    const std::size_t u = tree.nodes[nd.parent].agent;
    const double tu =
        pass_time_raw(prob.v[u], prob.dist(u, p), ev.acc[nd.parent]);
    if (std::isinf(tu)) return std::nullopt;
    const double tw = nd.parent_first ? tu + tau : tu - tau;
    if (tw <= 0.0) return std::nullopt;
    const double vw = prob.v[nd.agent];
    const double dw = prob.dist(nd.agent, p);
    const double aw = accel_for_time(vw, dw, tw);
    if (aw < prob.params.a_min - kObjTol || aw > ub[nd.agent] + kObjTol)
      return std::nullopt;
    // Past the latest reachable arrival accel_for_time answers with the
    // second crossing of the point; reject unless the first crossing is tw.
    const double back = pass_time_raw(vw, dw, aw);
    if (std::abs(back - tw) > 1e-9 * (1.0 + tw)) return std::nullopt;
    ev.acc[i] = aw;
    work[nd.agent] = aw;
    ev.cost += std::abs(aw);
  }
  for (std::size_t ip : tree.check_pairs) {
    const PairProb& p = prob.pairs[ip];
    if (!pair_resolved(prob.v[p.a], p.da, work[p.a], prob.v[p.b], p.db,
                       work[p.b], tau)) {
      return std::nullopt;
    }
  }
  return ev;
}

// Candidate root accels for one tree: interior local minima of the cost,
// the domain endpoints, zero, and the feasible side of every feasibility
// boundary the scan sees. `bound` drops candidates that cannot beat the
// incumbent once the other components' nonnegative costs are added.
std::vector<TreeEval> tree_candidates(const ChainProb& prob,
                                      const TreeProblem& tree,
                                      const std::vector<double>& ub,
                                      const std::vector<double>& base,
                                      std::vector<double>& work,
                                      double bound) {
  std::vector<TreeEval> out;
  const double lo = prob.params.a_min;
  const double hi = ub[tree.nodes[0].agent];
  if (hi < lo) return out;

  const auto feval = [&](double th) {
    return eval_tree(prob, tree, ub, th, base, work);
  };
  const auto record = [&](double th) {
    th = clamp_to(th, lo, hi);
    if (auto ev = feval(th); ev && ev->cost <= bound) {
      out.push_back(std::move(*ev));
    }
  };
  // Shrink-scan refinement, robust at kinks where a tree accel changes sign.
  const auto refine = [&](double l, double r) {
    for (int round = 0; round < 40; ++round) {
      constexpr int kPts = 16;
      std::array<double, kPts + 1> pts{};
      int best_i = -1;
      double best_c = kInf;
      for (int i = 0; i <= kPts; ++i) {
        pts[i] = l + (r - l) * i / kPts;
        if (auto ev = feval(pts[i]); ev && ev->cost < best_c) {
          best_c = ev->cost;
          best_i = i;
        }
      }
      if (best_i < 0) return;
      l = pts[best_i > 0 ? best_i - 1 : 0];
      r = pts[best_i < kPts ? best_i + 1 : kPts];
      if (r - l <= 1e-12 * (1.0 + std::abs(l) + std::abs(r))) break;
    }
    record((l + r) / 2.0);
  };

  std::vector<double> th(kTreeScan + 1);
  std::vector<double> cost(kTreeScan + 1, kInf);
  for (std::size_t j = 0; j <= kTreeScan; ++j) {
    th[j] = lo + (hi - lo) * static_cast<double>(j) /
                     static_cast<double>(kTreeScan);
    if (auto ev = feval(th[j])) cost[j] = ev->cost;
  }
  for (std::size_t j = 0; j <= kTreeScan; ++j) {
    if (std::isinf(cost[j])) continue;
    const double left = j == 0 ? kInf : cost[j - 1];
    const double right = j == kTreeScan ? kInf : cost[j + 1];
    if (cost[j] <= left && cost[j] <= right) {
      refine(th[j == 0 ? 0 : j - 1], th[j == kTreeScan ? kTreeScan : j + 1]);
    }
  }
  for (std::size_t j = 0; j + 1 <= kTreeScan; ++j) {
    const bool fl = !std::isinf(cost[j]);
    const bool fr = !std::isinf(cost[j + 1]);
    if (fl == fr) continue;
    double fa = fl ? th[j] : th[j + 1];
    double fb = fl ? th[j + 1] : th[j];
    for (int it = 0; it < 60; ++it) {
      const double mid = (fa + fb) / 2.0;
      if (feval(mid)) fa = mid; else fb = mid;
    }
    record(fa);
  }
  record(lo);
  record(hi);
  if (lo <= 0.0 && 0.0 <= hi) record(0.0);

  std::sort(out.begin(), out.end(),
            [](const TreeEval& x, const TreeEval& y) { return x.theta < y.theta; });
  std::vector<TreeEval> dedup;
  for (TreeEval& ev : out) {
    if (!dedup.empty() &&
        std::abs(ev.theta - dedup.back().theta) <=
            1e-9 * (1.0 + std::abs(ev.theta))) {
      if (ev.cost < dedup.back().cost) dedup.back() = std::move(ev);
    } else {
      dedup.push_back(std::move(ev));
    }
  }
  std::stable_sort(dedup.begin(), dedup.end(),
                   [](const TreeEval& x, const TreeEval& y) {
                     return x.cost < y.cost;
                   });
  if (dedup.size() > kMaxTreeCandidates) dedup.resize(kMaxTreeCandidates);
  return dedup;
}

ChainOutcome solve_labelings(const ChainProb& prob) {
  ChainOutcome best;
  const MsaaParams& prm = prob.params;
  const std::size_t na = prob.ids.size();
  const std::size_t np = prob.pairs.size();
  constexpr std::size_t kNoTree = std::numeric_limits<std::size_t>::max();

  // Feasible labels per pair; slack is always on the list. A tight ordering
  // needs the ordered window to be wide enough, a yield needs the stopping
  // accel to fit the box.
  std::vector<std::vector<Label>> options(np, {Label::slack});
  std::size_t combos = 1;
  for (std::size_t ip = 0; ip < np; ++ip) {
    const PairProb& p = prob.pairs[ip];
    if (max_yield_accel(prob.v[p.a], p.da) >= prm.a_min - kObjTol)
      options[ip].push_back(Label::yield_a);
    if (max_yield_accel(prob.v[p.b], p.db) >= prm.a_min - kObjTol)
      options[ip].push_back(Label::yield_b);
    const double ea = earliest_pass_time(prob.v[p.a], p.da, prm.a_max);
    const double la = latest_pass_time(prob.v[p.a], p.da, prm.a_min);
    const double eb = earliest_pass_time(prob.v[p.b], p.db, prm.a_max);
    const double lb = latest_pass_time(prob.v[p.b], p.db, prm.a_min);
    if (lb - ea >= prm.tau_safe - kTimeTol)
      options[ip].push_back(Label::tight_a_first);
    if (la - eb >= prm.tau_safe - kTimeTol)
      options[ip].push_back(Label::tight_b_first);
    combos *= options[ip].size();
    if (combos > kMaxCombos) {
      best.approximate = true;
      return best;
    }
  }

  std::vector<Label> label(np);
  std::vector<double> ub(na);
  std::vector<double> base(na);
  std::vector<double> work(na);
  std::vector<std::size_t> dsu(na);
  std::vector<bool> tight_agent(na);
  std::vector<std::vector<std::size_t>> incident(na);
  std::vector<char> placed(na);
  std::vector<std::size_t> tree_of(na);
  const auto find = [&](std::size_t x) {
    while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
    return x;
  };

  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t rem = c;
    for (std::size_t ip = 0; ip < np; ++ip) {
      label[ip] = options[ip][rem % options[ip].size()];
      rem /= options[ip].size();
    }

    bool ok = true;
    std::fill(ub.begin(), ub.end(), prm.a_max);
    std::iota(dsu.begin(), dsu.end(), std::size_t{0});
    std::fill(tight_agent.begin(), tight_agent.end(), false);
    for (auto& inc : incident) inc.clear();
    for (std::size_t ip = 0; ip < np && ok; ++ip) {
      const PairProb& p = prob.pairs[ip];
      switch (label[ip]) {
        case Label::yield_a:
          ub[p.a] = std::min(ub[p.a], max_yield_accel(prob.v[p.a], p.da));
          break;
        case Label::yield_b:
          ub[p.b] = std::min(ub[p.b], max_yield_accel(prob.v[p.b], p.db));
          break;
        case Label::tight_a_first:
        case Label::tight_b_first: {
          const std::size_t ra = find(p.a);
          const std::size_t rb = find(p.b);
          if (ra == rb) {
            ok = false;  // tight cycle; covered as a spanning-tree boundary
            break;
          }
          dsu[ra] = rb;
          tight_agent[p.a] = true;
          tight_agent[p.b] = true;
          incident[p.a].push_back(ip);
          incident[p.b].push_back(ip);
          break;
        }
        case Label::slack:
          break;
      }
    }
    for (std::size_t k = 0; k < na && ok; ++k) {
      if (ub[k] < prm.a_min - kObjTol) ok = false;
    }
    if (!ok) continue;

    // Agents outside every tight edge take the cheapest accel their bounds
    // allow; pairs between two such agents must already be resolved.
    for (std::size_t k = 0; k < na; ++k) {
      base[k] = tight_agent[k] ? 0.0 : clamp_to(0.0, prm.a_min, ub[k]);
    }
    for (std::size_t ip = 0; ip < np && ok; ++ip) {
      const PairProb& p = prob.pairs[ip];
      if (tight_agent[p.a] || tight_agent[p.b]) continue;
      ok = pair_resolved(prob.v[p.a], p.da, base[p.a], prob.v[p.b], p.db,
                         base[p.b], prm.tau_safe);
    }
    if (!ok) continue;

    // Build each tight tree breadth-first from its lowest agent index.
    std::vector<TreeProblem> trees;
    std::fill(placed.begin(), placed.end(), 0);
    for (std::size_t r = 0; r < na; ++r) {
      if (!tight_agent[r] || placed[r]) continue;
      TreeProblem tree;
      tree.nodes.push_back({r, 0, 0, false});
      placed[r] = 1;
      for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const std::size_t u = tree.nodes[i].agent;
        for (std::size_t ip : incident[u]) {
          const PairProb& p = prob.pairs[ip];
          const std::size_t w = prob.other(u, p);
          if (placed[w]) continue;
          const bool u_first =
              (label[ip] == Label::tight_a_first) == (u == p.a);
          tree.nodes.push_back({w, i, ip, u_first});
          placed[w] = 1;
        }
      }
      trees.push_back(std::move(tree));
    }
    std::fill(tree_of.begin(), tree_of.end(), kNoTree);
    for (std::size_t t = 0; t < trees.size(); ++t) {
      for (const TreeNode& nd : trees[t].nodes) tree_of[nd.agent] = t;
    }
    for (std::size_t ip = 0; ip < np; ++ip) {
      const std::size_t ta = tree_of[prob.pairs[ip].a];
      const std::size_t tb = tree_of[prob.pairs[ip].b];
      if (ta == kNoTree && tb == kNoTree) continue;  // both free, prechecked
      if (ta != kNoTree && tb != kNoTree && ta != tb) continue;  // assembly
      trees[ta != kNoTree ? ta : tb].check_pairs.push_back(ip);
    }

    const double spent = objective_of(base);
    const double bound =
        best.feasible ? best.obj + 2.0 * kObjTol - spent : kInf;
    std::vector<std::vector<TreeEval>> cands;
    for (const TreeProblem& tree : trees) {
      cands.push_back(tree_candidates(prob, tree, ub, base, work, bound));
      if (cands.back().empty()) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    std::vector<std::size_t> pick(trees.size(), 0);
    while (true) {
      std::vector<double> acc = base;
      for (std::size_t t = 0; t < trees.size(); ++t) {
        const TreeEval& ev = cands[t][pick[t]];
        for (std::size_t i = 0; i < trees[t].nodes.size(); ++i) {
          acc[trees[t].nodes[i].agent] = ev.acc[i];
        }
      }
      consider_outcome(prob, std::move(acc), &best);
      std::size_t t = 0;
      for (; t < trees.size(); ++t) {
        if (++pick[t] < cands[t].size()) break;
        pick[t] = 0;
      }
      if (t == trees.size()) break;
    }
  }
  return best;
}

// ------------------------------------------------- approximate fallback

struct IntervalSet {
  // Sorted, disjoint closed intervals.
  std::vector<std::pair<double, double>> iv;

  static IntervalSet all() { return IntervalSet{{{-kInf, kInf}}}; }
  void add(double lo, double hi) {
    if (lo <= hi) iv.emplace_back(lo, hi);
  }
  void normalize() {
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& [lo, hi] : iv) {
      if (!out.empty() && lo <= out.back().second) {
        out.back().second = std::max(out.back().second, hi);
      } else {
        out.emplace_back(lo, hi);
      }
    }
    iv = std::move(out);
  }
  IntervalSet intersect(const IntervalSet& o) const {
    IntervalSet r;
    for (const auto& [a, b] : iv) {
      for (const auto& [c, d] : o.iv) {
        const double lo = std::max(a, c);
        const double hi = std::min(b, d);
        if (lo <= hi) r.iv.emplace_back(lo, hi);
      }
    }
    r.normalize();
    return r;
  }
  std::optional<double> closest_to_zero() const {
    std::optional<double> best;
    for (const auto& [lo, hi] : iv) {
      const double x = clamp_to(0.0, lo, hi);
      if (!best || std::abs(x) < std::abs(*best)) best = x;
    }
    return best;
  }
};

// Allowed accel set for `agent` against one pair, with the partner fixed.
IntervalSet pair_allowed(const ChainProb& prob, const PairProb& p,
                         std::size_t agent, const std::vector<double>& acc) {
  const std::size_t o = prob.other(agent, p);
  const double d = prob.dist(agent, p);
  const double v = prob.v[agent];
  const double t_o = pass_time_raw(prob.v[o], prob.dist(o, p), acc[o]);
  if (std::isinf(t_o)) return IntervalSet::all();

  IntervalSet s;
  const double yu = max_yield_accel(v, d);
  if (std::isfinite(yu)) s.add(-kInf, yu);
  const double before = t_o - prob.params.tau_safe;
  if (before > 0.0) {
    s.add(std::max(min_pass_accel(v, d), accel_for_time(v, d, before)), kInf);
  }
  const double after_bound = accel_for_time(v, d, t_o + prob.params.tau_safe);
  s.add(min_pass_accel(v, d), after_bound);
  s.normalize();
  return s;
}

ChainOutcome solve_approximate(const ChainProb& prob) {
  ChainOutcome best;
  best.approximate = true;

  const auto run = [&](std::vector<double> acc) {
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      double max_change = 0.0;
      for (std::size_t k = 0; k < acc.size(); ++k) {
        IntervalSet allowed = IntervalSet::all();
        for (const PairProb& p : prob.pairs) {
          if (p.a != k && p.b != k) continue;
          allowed = allowed.intersect(pair_allowed(prob, p, k, acc));
        }
        IntervalSet box;
        box.add(prob.params.a_min, prob.params.a_max);
        allowed = allowed.intersect(box);
        if (const auto pick = allowed.closest_to_zero()) {
          max_change = std::max(max_change, std::abs(*pick - acc[k]));
          acc[k] = *pick;
        }
      }
      if (all_resolved(prob, acc)) {
        const double obj = objective_of(acc);
        if (!best.feasible ||
            better_solution(prob, acc, obj, best.acc, best.obj)) {
          best.acc = acc;
          best.obj = obj;
          best.feasible = true;
        }
      }
      if (max_change < 1e-12) break;
    }
  };

  std::vector<double> zero(prob.ids.size(), 0.0);
  run(zero);
  // Restart from everyone braking toward their nearest conflict point.
  std::vector<double> braking(prob.ids.size(), 0.0);
  for (std::size_t k = 0; k < braking.size(); ++k) {
    double bound = 0.0;
    bool any = false;
    for (const PairProb& p : prob.pairs) {
      if (p.a != k && p.b != k) continue;
      const double yu = max_yield_accel(prob.v[k], prob.dist(k, p));
      if (std::isfinite(yu)) {
        bound = any ? std::min(bound, yu) : yu;
        any = true;
      }
    }
    braking[k] = any ? clamp_to(bound, prob.params.a_min, 0.0) : 0.0;
  }
  run(braking);
  return best;
}

// --------------------------------------------------------- public shims

ChainOutcome solve_core(const ChainProb& prob) {
  if (prob.ids.size() == 2 && prob.pairs.size() == 1) {
    const PairOutcome po = solve_pair_core(prob);
    ChainOutcome out;
    out.acc = po.acc;
    out.obj = po.obj;
    out.feasible = po.feasible;
    if (!po.feasible) out.acc.assign(prob.ids.size(), 0.0);
    return out;
  }
  if (prob.ids.size() <=
      static_cast<std::size_t>(std::max(prob.params.exact_agent_limit, 2))) {
    ChainOutcome out = solve_labelings(prob);
    if (!out.approximate) {
      if (!out.feasible) out.acc.assign(prob.ids.size(), 0.0);
      return out;
    }
  }
  ChainOutcome out = solve_approximate(prob);
  if (!out.feasible) out.acc.assign(prob.ids.size(), 0.0);
  return out;
}

MsaaSolution finish_solution(const ChainProb& prob, const ChainOutcome& oc) {
  MsaaSolution sol;
  sol.feasible = oc.feasible;
  sol.approximate = oc.approximate;
  sol.objective = oc.feasible ? oc.obj : kInf;
  std::vector<double> acc = oc.acc;
  if (acc.empty()) acc.assign(prob.ids.size(), 0.0);
  for (std::size_t k = 0; k < prob.ids.size(); ++k) {
    sol.accels[prob.ids[k]] = acc[k];
  }
  std::vector<std::size_t> order(prob.ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double ax = std::abs(acc[x]);
    const double ay = std::abs(acc[y]);
    if (ax != ay) return ax > ay;
    return prob.ids[x] < prob.ids[y];
  });
  for (std::size_t k : order) sol.key_agents.push_back(prob.ids[k]);
  for (const PairProb& p : prob.pairs) {
    if (yields(prob.v[p.a], p.da, acc[p.a])) {
      sol.orderings.push_back(PairResolution::a_yields);
    } else if (yields(prob.v[p.b], p.db, acc[p.b])) {
      sol.orderings.push_back(PairResolution::b_yields);
    } else {
      const double ta = pass_time_raw(prob.v[p.a], p.da, acc[p.a]);
      const double tb = pass_time_raw(prob.v[p.b], p.db, acc[p.b]);
      sol.orderings.push_back(ta <= tb ? PairResolution::a_first
                                       : PairResolution::b_first);
    }
  }
  return sol;
}

ChainProb build_problem(const std::vector<AgentConflictState>& states,
                        const std::vector<ConflictPair>& pairs,
                        const MsaaParams& params) {
  if (pairs.empty()) throw ContractViolation("chain has no conflict pairs");
  ChainProb prob;
  prob.params = params;
  std::vector<const AgentConflictState*> sorted;
  for (const auto& s : states) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(),
            [](const AgentConflictState* a, const AgentConflictState* b) {
              return a->track_id < b->track_id;
            });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i]->track_id == sorted[i + 1]->track_id)
      throw ContractViolation("duplicate agent state: " + sorted[i]->track_id);
  }
  for (const auto* s : sorted) {
    prob.ids.push_back(s->track_id);
    prob.v.push_back(s->speed);
  }
  const auto index_of = [&](const std::string& id) {
    const auto it = std::lower_bound(prob.ids.begin(), prob.ids.end(), id);
    if (it == prob.ids.end() || *it != id)
      throw ContractViolation("pair references unknown agent: " + id);
    return static_cast<std::size_t>(it - prob.ids.begin());
  };
  const auto dist_of = [&](std::size_t agent, std::size_t pair_index,
                           const ConflictPair& pair) {
    const auto& dm = sorted[agent]->distances;
    const auto it = dm.find(pair_index);
    if (it != dm.end()) return it->second;
    if (dm.size() == 1 && pairs.size() == 1) return dm.begin()->second;
    throw ContractViolation("agent " + prob.ids[agent] +
                            " missing distance for pair " + pair.id_a + "/" +
                            pair.id_b);
  };
  for (std::size_t ip = 0; ip < pairs.size(); ++ip) {
    PairProb p;
    p.a = index_of(pairs[ip].id_a);
    p.b = index_of(pairs[ip].id_b);
    p.da = dist_of(p.a, ip, pairs[ip]);
    p.db = dist_of(p.b, ip, pairs[ip]);
    prob.pairs.push_back(p);
  }

  std::vector<std::size_t> root(prob.ids.size());
  std::iota(root.begin(), root.end(), std::size_t{0});
  const auto find = [&](std::size_t x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (const PairProb& p : prob.pairs) root[find(p.a)] = find(p.b);
  for (std::size_t k = 0; k < prob.ids.size(); ++k) {
    if (find(k) != find(0))
      throw ContractViolation("conflict pairs do not connect all agents");
  }
  return prob;
}

}  // namespace

const char* to_string(PairResolution r) {
  switch (r) {
    case PairResolution::a_first:
      return "a_first";
    case PairResolution::b_first:
      return "b_first";
    case PairResolution::a_yields:
      return "a_yields";
    case PairResolution::b_yields:
      return "b_yields";
  }
  return "a_first";
}

std::optional<double> passage_time(double v, double d, double a) {
  const double t = pass_time_raw(v, d, a);
  if (std::isinf(t)) return std::nullopt;
  return t;
}

MsaaSolution solve_pair(const AgentConflictState& sa,
                        const AgentConflictState& sb, const ConflictPair& pair,
                        const MsaaParams& params) {
  if (!pair.involves(sa.track_id) || !pair.involves(sb.track_id) ||
      sa.track_id == sb.track_id) {
    throw ContractViolation("pair does not match the two agent states");
  }
  return solve_chain({sa, sb}, {pair}, params);
}

MsaaSolution solve_chain(const std::vector<AgentConflictState>& states,
                         const std::vector<ConflictPair>& pairs,
                         const MsaaParams& params) {
  const ChainProb prob = build_problem(states, pairs, params);
  return finish_solution(prob, solve_core(prob));
}

std::vector<AgentConflictState> states_from_component(
    const ChainComponent& comp, const std::vector<FuturePath>& paths) {
  std::vector<AgentConflictState> out;
  for (const std::string& id : comp.agent_ids) {
    const auto it =
        std::find_if(paths.begin(), paths.end(),
                     [&](const FuturePath& f) { return f.track_id == id; });
    if (it == paths.end())
      throw ContractViolation("no future path for agent " + id);
    AgentConflictState st;
    st.track_id = id;
    st.speed = it->assumed_speed;
    for (std::size_t ip = 0; ip < comp.pairs.size(); ++ip) {
      if (comp.pairs[ip].involves(id)) {
        st.distances[ip] = comp.pairs[ip].time_of(id) * st.speed;
      }
    }
    out.push_back(std::move(st));
  }
  return out;
}

Intensity intensity_at(const ChainComponent& comp,
                       const std::vector<AgentConflictState>& states,
                       const MsaaParams& params) {
  const MsaaSolution sol = solve_chain(states, comp.pairs, params);
  Intensity out;
  out.msaa = sol.feasible ? sol.objective : params.infeasible_cap;
  double peak = 0.0;
  for (const auto& [id, a] : sol.accels) peak = std::max(peak, std::abs(a));
  if (peak > 0.0) {
    for (const std::string& id : sol.key_agents) {
      if (std::abs(sol.accels.at(id)) >= 0.9 * peak) out.key_agents.push_back(id);
    }
  }
  return out;
}

}  // namespace trajmine
