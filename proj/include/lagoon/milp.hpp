// Mixed-integer linear model of the lagoon scheduling problem, built
// solver-agnostically: named variables, sparse linear rows and a maximize
// objective. The nonconvex pieces are linearized exactly: the hill chart
// through per-segment indicator binaries with tight big-M rows, and the
// mode-gated flow/power products through the standard bound-based
// replacement of a binary times a bounded continuous variable.
//
// The model can be exported as LP text for any external MILP solver, and a
// schedule trajectory can be checked row by row against it.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lagoon/core.hpp"
#include "lagoon/physics.hpp"

namespace lagoon::milp {

/// Upper bound on per-turbine generation flow (m3/s): the hill chart tops
/// out at 441.27 just under the 7 m break; 450 covers it with margin.
inline constexpr double kGenFlowBound = 450.0;

enum class VarType { Continuous, Binary };

struct Variable {
  std::string name;
  VarType type = VarType::Continuous;
  double lo = 0.0;
  double hi = 0.0;
};

enum class Sense { LE, GE, EQ };

struct LinearTerm {
  int var = 0;
  double coeff = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Sense sense = Sense::EQ;
  double rhs = 0.0;
};

struct Violation {
  std::string row;      // constraint name, or "bound:<variable>"
  double residual = 0.0;  // how far past the admissible side, always > 0
};

struct MilpModel {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<LinearTerm> objective;  // maximized
  std::unordered_map<std::string, int> name_to_index;

  // Instance metadata, enough to rebuild the variable assignment that a
  // schedule trajectory induces.
  std::size_t steps = 0;
  int n_turbines = 0;
  LagoonConfig config;
  std::vector<double> tide_levels_m;

  int index(const std::string& name) const {
    auto it = name_to_index.find(name);
    if (it == name_to_index.end())
      throw std::invalid_argument("unknown variable " + name);
    return it->second;
  }

  std::size_t binary_count() const {
    std::size_t n = 0;
    for (const auto& v : variables)
      if (v.type == VarType::Binary) ++n;
    return n;
  }
};

namespace detail {

inline int add_var(MilpModel& m, std::string name, VarType type, double lo,
                   double hi) {
  const int idx = static_cast<int>(m.variables.size());
  if (!m.name_to_index.emplace(name, idx).second)
    throw std::logic_error("duplicate variable name " + name);
  m.variables.push_back({std::move(name), type, lo, hi});
  return idx;
}

inline void add_row(MilpModel& m, std::string name,
                    std::vector<LinearTerm> terms, Sense sense, double rhs) {
  m.constraints.push_back({std::move(name), std::move(terms), sense, rhs});
}

inline std::string sub(const std::string& base, std::size_t t) {
  return base + "_" + std::to_string(t);
}
inline std::string sub(const std::string& base, int i, std::size_t t) {
  return base + "_" + std::to_string(i) + "_" + std::to_string(t);
}
inline std::string sub(const std::string& base, int k, int i, std::size_t t) {
  return base + "_" + std::to_string(k) + "_" + std::to_string(i) + "_" +
         std::to_string(t);
}

/// Range of an affine a + b*H over a head interval.
inline Interval affine_range(double a, double b, const Interval& h) {
  const double at_lo = a + b * h.lo;
  const double at_hi = a + b * h.hi;
  return {std::min(at_lo, at_hi), std::max(at_lo, at_hi)};
}

struct Segment {
  double h_lo = 0.0;  // head interval covered by this indicator
  double h_hi = 0.0;
  double flow_a = 0.0, flow_b = 0.0;
  double power_a = 0.0, power_b = 0.0;
};

/// Common refinement of the flow and power hill-chart branches over the full
/// head range: the zero branch is extended downward over negative heads,
/// where turbines pass no generation flow.
inline std::vector<Segment> hill_segments(const LagoonConfig& c) {
  using namespace hillchart;
  return {
      {c.h_bounds_m.lo, c.h_min_m, 0.0, 0.0, 0.0, 0.0},
      {c.h_min_m, kFlowBreak1, kFlowA1, kFlowB1, kPowerA, kPowerB},
      {kFlowBreak1, kFlowBreak2, kFlowA2, kFlowB2, kPowerA, kPowerB},
      {kFlowBreak2, kHillChartHeadMax, kFlowA3, kFlowB3, kPowerCap, 0.0},
  };
}

/// Canonical segment of a head value: intervals are closed on the left and
/// open on the right, the last closed, and heads below the first interval
/// fall into the zero branch.
inline int segment_of(const std::vector<Segment>& segs, double h) {
  for (std::size_t k = 0; k + 1 < segs.size(); ++k)
    if (h < segs[k].h_hi) return static_cast<int>(k);
  return static_cast<int>(segs.size()) - 1;
}

}  // namespace detail

/// Builds the full MILP for the given instance: basin levels and heads per
/// step, fill flows under the linear law, per-turbine hill-chart variables
/// with segment indicators, fill/generation gating binaries, the linearized
/// mode-flow products, and the energy or revenue objective.
inline MilpModel build_milp(const LagoonConfig& config, const TideSeries& tide,
                            const PriceSeries& prices, Objective objective) {
  validated(config);
  if (tide.levels_m.size() < 2)
    throw std::invalid_argument("tide series needs at least two samples");
  if (prices.prices.size() + 1 != tide.levels_m.size())
    throw std::invalid_argument("price series must have one entry per step");
  if (config.h_bounds_m.hi > kHillChartHeadMax)
    throw std::invalid_argument(
        "upper head bound exceeds the hill-chart domain");

  using detail::add_row;
  using detail::add_var;
  using detail::sub;

  MilpModel m;
  const std::size_t T = tide.steps();
  const int n = config.n_turbines;
  m.steps = T;
  m.n_turbines = n;
  m.config = config;
  m.tide_levels_m = tide.levels_m;

  const Interval head = config.h_bounds_m;
  double tide_lo = tide.levels_m[0], tide_hi = tide.levels_m[0];
  for (double z : tide.levels_m) {
    tide_lo = std::min(tide_lo, z);
    tide_hi = std::max(tide_hi, z);
  }
  const Interval level{tide_lo + head.lo, tide_hi + head.hi};

  const double qs_coef = config.k_sluice * config.sluice_area_m2;
  const double qtf_coef = config.k_turbine * config.turbine_flow_area_m2;
  const Interval qs_rng = detail::affine_range(0.0, qs_coef, head);
  const Interval qtf_rng = detail::affine_range(0.0, qtf_coef, head);
  // Aggregate fill flow n_s*QS + n_T*QTF and its symmetric big-M bound.
  const double fill_coef = config.n_sluices * qs_coef + n * qtf_coef;
  const Interval fill_rng = detail::affine_range(0.0, fill_coef, head);
  const double fill_bar =
      std::max(std::abs(fill_rng.lo), std::abs(fill_rng.hi));
  const double dt_h = config.dt_s / 3600.0;
  const double power_cap = hillchart::kPowerCap;

  const auto segments = detail::hill_segments(config);

  // --- variables ---
  for (std::size_t t = 0; t <= T; ++t)
    add_var(m, sub("zin", t), VarType::Continuous, level.lo, level.hi);
  for (std::size_t t = 0; t < T; ++t) {
    add_var(m, sub("H", t), VarType::Continuous, head.lo, head.hi);
    add_var(m, sub("QS", t), VarType::Continuous, qs_rng.lo, qs_rng.hi);
    add_var(m, sub("QTF", t), VarType::Continuous, qtf_rng.lo, qtf_rng.hi);
    add_var(m, sub("zF", t), VarType::Continuous, fill_rng.lo, fill_rng.hi);
    add_var(m, sub("QTL", t), VarType::Continuous, fill_rng.lo,
            fill_rng.hi + n * kGenFlowBound);
    add_var(m, sub("PTL", t), VarType::Continuous, 0.0, n * power_cap);
    add_var(m, sub("E", t), VarType::Continuous, 0.0, n * power_cap * dt_h);
    add_var(m, sub("dF", t), VarType::Binary, 0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      add_var(m, sub("QTG", i, t), VarType::Continuous, 0.0, kGenFlowBound);
      add_var(m, sub("PT", i, t), VarType::Continuous, 0.0, power_cap);
      add_var(m, sub("zTG", i, t), VarType::Continuous, 0.0, kGenFlowBound);
      add_var(m, sub("zP", i, t), VarType::Continuous, 0.0, power_cap);
      add_var(m, sub("dG", i, t), VarType::Binary, 0.0, 1.0);
      for (std::size_t k = 0; k < segments.size(); ++k)
        add_var(m, sub("seg", static_cast<int>(k), i, t), VarType::Binary,
                0.0, 1.0);
    }
  }

  auto vi = [&](const std::string& name) { return m.index(name); };

  // --- constraints ---
  // Initial condition: the basin starts at sea level.
  add_row(m, "init_level", {{vi("zin_0"), 1.0}}, Sense::EQ, tide.levels_m[0]);

  for (std::size_t t = 0; t < T; ++t) {
    // Mass balance: zin_{t+1} = zin_t - (dt/A) QTL_t.
    add_row(m, sub("mass", t),
            {{vi(sub("zin", t + 1)), 1.0},
             {vi(sub("zin", t)), -1.0},
             {vi(sub("QTL", t)), config.dt_s / config.surface_area_m2}},
            Sense::EQ, 0.0);
    // Head definition at the step start: H_t = zin_t - zout_t.
    add_row(m, sub("headdef", t),
            {{vi(sub("H", t)), 1.0}, {vi(sub("zin", t)), -1.0}}, Sense::EQ,
            -tide.levels_m[t]);
    // Linear fill-flow laws.
    add_row(m, sub("qs", t),
            {{vi(sub("QS", t)), 1.0}, {vi(sub("H", t)), -qs_coef}}, Sense::EQ,
            0.0);
    add_row(m, sub("qtf", t),
            {{vi(sub("QTF", t)), 1.0}, {vi(sub("H", t)), -qtf_coef}},
            Sense::EQ, 0.0);
    // Total flow: the gated fill aggregate plus the gated generation flows.
    {
      std::vector<LinearTerm> terms{{vi(sub("QTL", t)), 1.0},
                                    {vi(sub("zF", t)), -1.0}};
      for (int i = 0; i < n; ++i) terms.push_back({vi(sub("zTG", i, t)), -1.0});
      add_row(m, sub("flowsum", t), std::move(terms), Sense::EQ, 0.0);
    }
    // zF_t = dF_t * (n_s QS_t + n_T QTF_t), linearized with the signed
    // aggregate bound since fill flow may point either way.
    {
      const int zf = vi(sub("zF", t));
      const int df = vi(sub("dF", t));
      const int qs = vi(sub("QS", t));
      const int qtf = vi(sub("QTF", t));
      const double ns = config.n_sluices;
      const double nt = n;
      add_row(m, sub("fillub", t), {{zf, 1.0}, {df, -fill_bar}}, Sense::LE,
              0.0);
      add_row(m, sub("filllb", t), {{zf, 1.0}, {df, fill_bar}}, Sense::GE,
              0.0);
      add_row(m, sub("fillgap_ub", t),
              {{zf, 1.0}, {qs, -ns}, {qtf, -nt}, {df, fill_bar}}, Sense::LE,
              fill_bar);
      add_row(m, sub("fillgap_lb", t),
              {{zf, 1.0}, {qs, -ns}, {qtf, -nt}, {df, -fill_bar}}, Sense::GE,
              -fill_bar);
    }
    // Plant power and energy.
    {
      std::vector<LinearTerm> terms{{vi(sub("PTL", t)), 1.0}};
      for (int i = 0; i < n; ++i) terms.push_back({vi(sub("zP", i, t)), -1.0});
      add_row(m, sub("powsum", t), std::move(terms), Sense::EQ, 0.0);
    }
    add_row(m, sub("energy", t),
            {{vi(sub("E", t)), 1.0}, {vi(sub("PTL", t)), -dt_h}}, Sense::EQ,
            0.0);

    for (int i = 0; i < n; ++i) {
      const int qtg = vi(sub("QTG", i, t));
      const int pt = vi(sub("PT", i, t));
      const int ztg = vi(sub("zTG", i, t));
      const int zp = vi(sub("zP", i, t));
      const int dg = vi(sub("dG", i, t));
      const int df = vi(sub("dF", t));
      const int h = vi(sub("H", t));

      // zTG = dG * QTG over QTG in [0, kGenFlowBound].
      add_row(m, sub("genprod_ub", i, t), {{ztg, 1.0}, {dg, -kGenFlowBound}},
              Sense::LE, 0.0);
      add_row(m, sub("genprod_flow", i, t), {{ztg, 1.0}, {qtg, -1.0}},
              Sense::LE, 0.0);
      add_row(m, sub("genprod_lb", i, t),
              {{ztg, 1.0}, {qtg, -1.0}, {dg, -kGenFlowBound}}, Sense::GE,
              -kGenFlowBound);
      add_row(m, sub("genprod_pos", i, t), {{ztg, 1.0}}, Sense::GE, 0.0);

      // zP = dG * PT over PT in [0, 20].
      add_row(m, sub("powprod_ub", i, t), {{zp, 1.0}, {dg, -power_cap}},
              Sense::LE, 0.0);
      add_row(m, sub("powprod_pow", i, t), {{zp, 1.0}, {pt, -1.0}}, Sense::LE,
              0.0);
      add_row(m, sub("powprod_lb", i, t),
              {{zp, 1.0}, {pt, -1.0}, {dg, -power_cap}}, Sense::GE,
              -power_cap);
      add_row(m, sub("powprod_pos", i, t), {{zp, 1.0}}, Sense::GE, 0.0);

      // A turbine cannot fill and generate in the same step.
      add_row(m, sub("excl", i, t), {{df, 1.0}, {dg, 1.0}}, Sense::LE, 1.0);

      // Exactly one hill-chart segment active.
      {
        std::vector<LinearTerm> terms;
        for (std::size_t k = 0; k < segments.size(); ++k)
          terms.push_back({vi(sub("seg", static_cast<int>(k), i, t)), 1.0});
        add_row(m, sub("segsum", i, t), std::move(terms), Sense::EQ, 1.0);
      }
      for (std::size_t k = 0; k < segments.size(); ++k) {
        const auto& seg = segments[k];
        const int sk = vi(sub("seg", static_cast<int>(k), i, t));
        // The active segment pins the head into its interval.
        add_row(m, sub("seghlo", static_cast<int>(k), i, t),
                {{h, 1.0}, {sk, -(seg.h_lo - head.lo)}}, Sense::GE, head.lo);
        add_row(m, sub("seghhi", static_cast<int>(k), i, t),
                {{h, 1.0}, {sk, head.hi - seg.h_hi}}, Sense::LE, head.hi);
        // ... and pins the curve variables onto its affine branch, with the
        // tightest constants the curve ranges admit.
        const Interval fr = detail::affine_range(seg.flow_a, seg.flow_b, head);
        const double mq_ub = kGenFlowBound - fr.lo;
        const double mq_lb = fr.hi;
        add_row(m, sub("segq_ub", static_cast<int>(k), i, t),
                {{qtg, 1.0}, {h, -seg.flow_b}, {sk, mq_ub}}, Sense::LE,
                seg.flow_a + mq_ub);
        add_row(m, sub("segq_lb", static_cast<int>(k), i, t),
                {{qtg, 1.0}, {h, -seg.flow_b}, {sk, -mq_lb}}, Sense::GE,
                seg.flow_a - mq_lb);
        const Interval pr =
            detail::affine_range(seg.power_a, seg.power_b, head);
        const double mp_ub = power_cap - pr.lo;
        const double mp_lb = pr.hi;
        add_row(m, sub("segp_ub", static_cast<int>(k), i, t),
                {{pt, 1.0}, {h, -seg.power_b}, {sk, mp_ub}}, Sense::LE,
                seg.power_a + mp_ub);
        add_row(m, sub("segp_lb", static_cast<int>(k), i, t),
                {{pt, 1.0}, {h, -seg.power_b}, {sk, -mp_lb}}, Sense::GE,
                seg.power_a - mp_lb);
      }
    }
  }

  // Objective: total energy, or price-weighted energy.
  for (std::size_t t = 0; t < T; ++t) {
    const double coeff =
        objective == Objective::MaxEnergy ? 1.0 : prices.prices[t];
    m.objective.push_back({vi(sub("E", t)), coeff});
  }
  return m;
}

namespace detail {

inline std::string fmt9(double v) {
  if (v == 0.0) v = 0.0;  // never print -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline void append_terms(std::string& out, const MilpModel& m,
                         const std::vector<LinearTerm>& terms) {
  bool first = true;
  for (const auto& term : terms) {
    const double c = term.coeff;
    if (first) {
      out += (c < 0.0 ? "-" : "");
      first = false;
    } else {
      out += (c < 0.0 ? " - " : " + ");
    }
    out += fmt9(std::abs(c));
    out += ' ';
    out += m.variables[static_cast<std::size_t>(term.var)].name;
  }
}

}  // namespace detail

/// Renders the model in LP text format (Maximize / Subject To / Bounds /
/// Binary), one constraint per line, deterministic variable order, numbers
/// with 9 significant digits.
inline std::string export_lp(const MilpModel& m) {
  if (m.steps == 0) throw std::invalid_argument("empty horizon");
  std::string out;
  out.reserve(1 << 16);
  out += "Maximize\n obj: ";
  detail::append_terms(out, m, m.objective);
  out += "\nSubject To\n";
  for (const auto& row : m.constraints) {
    out += ' ';
    out += row.name;
    out += ": ";
    detail::append_terms(out, m, row.terms);
    switch (row.sense) {
      case Sense::LE: out += " <= "; break;
      case Sense::GE: out += " >= "; break;
      case Sense::EQ: out += " = "; break;
    }
    out += detail::fmt9(row.rhs);
    out += '\n';
  }
  out += "Bounds\n";
  for (const auto& v : m.variables) {
    if (v.type == VarType::Binary) continue;
    out += ' ';
    out += detail::fmt9(v.lo);
    out += " <= ";
    out += v.name;
    out += " <= ";
    out += detail::fmt9(v.hi);
    out += '\n';
  }
  out += "Binary\n";
  for (const auto& v : m.variables) {
    if (v.type != VarType::Binary) continue;
    out += ' ';
    out += v.name;
    out += '\n';
  }
  out += "End\n";
  return out;
}

/// Expands a schedule trajectory into the canonical full variable
/// assignment it induces: binaries from the modes (a Generate(n) step turns
/// the first n turbines on), segment indicators from the head, curve
/// variables from the hill chart for idle turbines and from the schedule's
/// claims for active ones.
inline std::vector<double> assignment_from_schedule(const MilpModel& m,
                                                    const Schedule& s) {
  if (s.steps() != m.steps || s.z_in_m.size() != m.steps + 1)
    throw std::invalid_argument("schedule dimensions do not match model");
  const LagoonConfig& c = m.config;
  const auto segments = detail::hill_segments(c);
  std::vector<double> x(m.variables.size(), 0.0);
  auto set = [&](const std::string& name, double v) {
    x[static_cast<std::size_t>(m.index(name))] = v;
  };
  using detail::sub;

  for (std::size_t t = 0; t <= m.steps; ++t) set(sub("zin", t), s.z_in_m[t]);
  for (std::size_t t = 0; t < m.steps; ++t) {
    const double head = s.head_m[t];
    const Mode mode = s.modes[t];
    const int n_on = mode.is_generate() ? mode.n_active() : 0;
    const double df = mode.is_fill() ? 1.0 : 0.0;
    const double qs = c.k_sluice * c.sluice_area_m2 * head;
    const double qtf = c.k_turbine * c.turbine_flow_area_m2 * head;
    const double h_chart =
        std::clamp(head, 0.0, kHillChartHeadMax);  // curve evaluation point
    const int seg = detail::segment_of(segments, head);

    set(sub("H", t), head);
    set(sub("QS", t), qs);
    set(sub("QTF", t), qtf);
    set(sub("dF", t), df);
    set(sub("zF", t), df * (c.n_sluices * qs + c.n_turbines * qtf));
    set(sub("QTL", t), s.q_total_m3s[t]);
    set(sub("PTL", t), s.power_mw[t]);
    set(sub("E", t), s.energy_mwh[t]);
    for (int i = 0; i < m.n_turbines; ++i) {
      const bool on = i < n_on;
      const double qtg = on ? s.q_turbine_gen_m3s[t] / n_on
                            : turbine_gen_flow(h_chart, c.h_min_m);
      const double pt =
          on ? s.power_mw[t] / n_on : turbine_power(h_chart, c.h_min_m);
      set(sub("QTG", i, t), qtg);
      set(sub("PT", i, t), pt);
      set(sub("dG", i, t), on ? 1.0 : 0.0);
      set(sub("zTG", i, t), on ? qtg : 0.0);
      set(sub("zP", i, t), on ? pt : 0.0);
      for (std::size_t k = 0; k < segments.size(); ++k)
        set(sub("seg", static_cast<int>(k), i, t),
            static_cast<int>(k) == seg ? 1.0 : 0.0);
    }
  }
  return x;
}

/// Evaluates every constraint row and every variable bound at the given
/// assignment; entries whose violation exceeds tol are reported.
inline std::vector<Violation> check_assignment(const MilpModel& m,
                                               const std::vector<double>& x,
                                               double tol) {
  if (x.size() != m.variables.size())
    throw std::invalid_argument("assignment size does not match model");
  std::vector<Violation> out;
  for (const auto& v : m.variables) {
    const double val = x[static_cast<std::size_t>(m.index(v.name))];
    if (val < v.lo - tol)
      out.push_back({"bound:" + v.name, v.lo - val});
    else if (val > v.hi + tol)
      out.push_back({"bound:" + v.name, val - v.hi});
  }
  for (const auto& row : m.constraints) {
    double lhs = 0.0;
    for (const auto& term : row.terms)
      lhs += term.coeff * x[static_cast<std::size_t>(term.var)];
    double violation = 0.0;
    switch (row.sense) {
      case Sense::LE: violation = lhs - row.rhs; break;
      case Sense::GE: violation = row.rhs - lhs; break;
      case Sense::EQ: violation = std::abs(lhs - row.rhs); break;
    }
    if (violation > tol) out.push_back({row.name, violation});
  }
  return out;
}

/// Checks a schedule against the model: maps it to the canonical assignment
/// and reports every violated row or bound. An empty report means the
/// schedule is feasible for the MILP at the given tolerance.
inline std::vector<Violation> check_schedule(const MilpModel& m,
                                             const Schedule& s, double tol) {
  return check_assignment(m, assignment_from_schedule(m, s), tol);
}

/// Objective value of an assignment (for cross-checking against the
/// schedule-level objective evaluation).
inline double objective_value(const MilpModel& m,
                              const std::vector<double>& x) {
  double total = 0.0;
  for (const auto& term : m.objective)
    total += term.coeff * x[static_cast<std::size_t>(term.var)];
  return total;
}

}  // namespace lagoon::milp
