#pragma once

#include "restless/model.hpp"

namespace restless {

// Counterexample project violating the positive-marginal-resource condition.
// Passive drift x -> sqrt(x) climbs toward the absorbing top state 1; the
// active action holds the state when x >= sticky and resets it to the
// absorbing bottom state 0 otherwise.  Rewards are identically 0 and the
// active cost is c_active, so activating a weak state silences all future
// cost while resting it lets the state climb into the sticky zone where the
// policy pays forever: g(0.6, 0.5) = c_active * (1 - beta/(1-beta)) < 0 at
// the default parameters.
struct ResetParams {
  double beta = 0.9;
  double c_active = 0.1;
  double sticky = 0.7;

  void validate() const {
    if (!(beta >= 0.0 && beta < 1.0))
      throw domain_error("reset: beta must be in [0,1)");
    if (!(c_active > 0.0)) throw domain_error("reset: c_active must be > 0");
    if (!(sticky > 0.0 && sticky < 1.0))
      throw domain_error("reset: sticky must be in (0,1)");
  }
};

BanditModel make_reset_model(const ResetParams& p);

}  // namespace restless
