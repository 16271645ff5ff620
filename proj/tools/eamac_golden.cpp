// Regenerates tests/fixtures/golden_mi.txt. Values are computed at twice the
// working cutoff so the tests can check the working cutoff against them.
#include <cstdio>
#include <fstream>
#include <iostream>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "eamac/mac_channel.hpp"
#include "eamac/rate_region.hpp"

int main(int argc, char** argv) {
  using namespace eamac;
  std::ofstream file;
  if (argc > 1) file.open(argv[1]);
  std::ostream& out = argc > 1 ? static_cast<std::ostream&>(file) : std::cout;
  if (!out) {
    std::fprintf(stderr, "cannot open %s\n", argv[1]);
    return 1;
  }

  region::Numerics num;
  num.cutoff = 48;
  num.psk_order = 64;

  const mac::EffectiveChannel eff{0.25, 0.525, 0.1};
  const auto mi = region::continuous_phase_mi(eff, num);
  fmt::print(out, "# eamac golden values, regenerate with eamac_golden\n");
  fmt::print(out, "version = 1\n\n");
  fmt::print(out, "mi.kappa_eff = {}\nmi.n_t_eff = {}\nmi.n_s = {}\n", eff.kappa_eff, eff.n_t_eff, eff.n_s);
  fmt::print(out, "mi.psk_order = {}\nmi.cutoff = {}\nmi.tail = {:.3e}\n", num.psk_order, num.cutoff, mi.tail);
  fmt::print(out, "mi.avg_entropy = {:.17g}\nmi.cond_entropy = {:.17g}\nmi.value = {:.17g}\n\n",
             mi.avg_entropy, mi.cond_entropy, mi.value);

  const mac::MacParams p(0.5, 0.5, 1.0);
  const mac::ModulationConfig m{0.1, num.psk_order};
  const auto r = region::achievable_region(p, m, num);
  fmt::print(out, "region.tau = {}\nregion.kappa = {}\nregion.n_b = {}\nregion.n_s = {}\n", p.tau(),
             p.kappa(), p.n_b(), m.n_s);
  fmt::print(out, "region.psk_order = {}\nregion.cutoff = {}\nregion.tail = {:.3e}\n", num.psk_order,
             num.cutoff, r.max_tail);
  fmt::print(out, "region.x_bound = {:.17g}\nregion.y_bound = {:.17g}\nregion.sum_bound = {:.17g}\n",
             r.bound("X-bound"), r.bound("Y-bound"), r.bound("sum-bound"));
  fmt::print(out, "region.sum_branch = {}\nregion.vertices = {}\n", r.sum_branch, r.vertices.size());
  return 0;
}
