#include "restless/models/reset.hpp"

#include <cmath>

namespace restless {

BanditModel make_reset_model(const ResetParams& p) {
  p.validate();
  const double c = p.c_active, sticky = p.sticky;
  BanditModel m{
      StateInterval(0.0, 1.0),
      [](double, int) { return 0.0; },
      [c](double, int a) { return a ? c : 0.0; },
      {},
      p.beta,
      {},
      "reset"};
  m.kernel.action[0] = {
      {[](double) { return 1.0; }, [](double x) { return std::sqrt(x); }}};
  m.kernel.action[1] = {{[](double) { return 1.0; },
                         [sticky](double x) { return x >= sticky ? x : 0.0; }}};
  m.weight_bound.M = c;
  m.weight_bound.gamma = p.beta;
  return m;
}

}  // namespace restless
