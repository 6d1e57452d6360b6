#pragma once

#include <optional>
#include <string>
#include <vector>

#include "restless/engine.hpp"

namespace restless {

enum class Verdict { pass, fail, inconclusive, skipped };

const char* verdict_name(Verdict v);

struct PairWitness {
  double x = 0.0;
  double z = 0.0;
  double value = 0.0;
};

// Positive-marginal-resource check: certifies g(x,z) > 0 on the grid via
// the truncation bounds.  fail carries a witness whose g is provably <= 0;
// pairs that are negative only inside the noise band give inconclusive.
struct Pcli1Result {
  Verdict verdict = Verdict::skipped;
  double min_certified_g = 0.0;  // min over pairs of g_k - fg_err
  double min_gk = 0.0;           // raw g_k at that pair
  PairWitness witness;           // the minimizing pair
  int horizon = 0;
  std::string note;
};

// Index monotonicity + refinement-stability continuity proxy.
struct Pcli2Result {
  Verdict verdict = Verdict::skipped;
  double min_monotonicity_margin = 0.0;
  double max_gap = 0.0;
  double refined_max_gap = 0.0;
  double required_shrink = 0.0;
  std::vector<double> jump_locations;
  std::optional<std::pair<double, double>> witness;  // adjacent pair on fail
  std::string note;
};

// Reward metric as threshold integral of the index against the resource
// metric, checked as a finite sum over the reachable jump ladder.
struct Pcli3Result {
  Verdict verdict = Verdict::skipped;
  double max_residual = 0.0;
  double allowance_at_max = 0.0;  // certified error budget at the argmax
  std::string method;             // piecewise-constant-exact | quadrature
  double witness_x = 0.0, witness_z1 = 0.0, witness_z2 = 0.0;
  int pairs_checked = 0;
  bool conditional = false;  // earlier conditions not passed
  std::string note;
};

struct VerifyTols {
  double pcli1_tol = 1e-9;   // bound on the g-certificate truncation slack
  double mono_tol = 1e-9;    // extra monotonicity slack
  int refinement_factor = 4; // grid refinement for the continuity proxy
  double pcli3_tol = 1e-8;   // residual budget beyond certified errors
  double index_tol = 1e-9;   // engine tolerance for index tables
};

struct PCLReport {
  std::string model_name;
  Verdict overall = Verdict::skipped;
  Pcli1Result pcli1;
  Pcli2Result pcli2;
  Pcli3Result pcli3;
  std::vector<double> state_grid;
  std::vector<double> threshold_grid;  // includes the +/-inf sentinels
  VerifyTols tols;
  std::string conclusion;

  bool passed() const { return overall == Verdict::pass; }
};

Pcli1Result check_pcli1(const BanditModel& model,
                        const std::vector<double>& state_grid,
                        const std::vector<double>& threshold_grid, double tol,
                        EngineConfig cfg = {});

Pcli2Result check_pcli2(const BanditModel& model,
                        const std::vector<double>& state_grid,
                        double tol_mono, int refinement_factor,
                        double index_tol, EngineConfig cfg = {});

Pcli3Result check_pcli3(const BanditModel& model,
                        const std::vector<double>& state_grid,
                        const std::vector<std::pair<double, double>>& pairs,
                        double tol, EngineConfig cfg = {},
                        bool conditional = false);

PCLReport full_report(const BanditModel& model,
                      const std::vector<double>& state_grid,
                      const std::vector<double>& threshold_grid,
                      VerifyTols tols = {}, EngineConfig cfg = {});

// Report with default 201-point grids over the (bounded) state interval.
PCLReport full_report(const BanditModel& model, VerifyTols tols = {},
                      EngineConfig cfg = {});

}  // namespace restless
