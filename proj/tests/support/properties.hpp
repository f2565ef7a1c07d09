#pragma once

#include <cstdint>
#include <string>

namespace weyl::testing {

inline constexpr std::uint64_t default_seed = 20240611;
inline constexpr int default_cases = 1000;

struct PropertyOutcome {
  std::string name;
  int cases = 0;
  int failures = 0;
  double worst = 0.0;  // largest observed defect, in the units of `tolerance`
  double tolerance = 0.0;

  bool passed() const noexcept { return cases > 0 && failures == 0; }
};

/// hf_energy(Gamma + t (Pi - Gamma)) against the closed-form quadratic, relative to
/// the sum of the absolute energy components.
PropertyOutcome quadratic_expansion_property(std::uint64_t seed, int cases = default_cases);
/// Ex_w(Gamma) <= D_w(rho, rho) for pointwise nonnegative w.
PropertyOutcome exchange_below_direct_property(std::uint64_t seed, int cases = default_cases);
/// ||P^2 - P||_F for spectral projectors of random symmetric operators, plus the trace
/// against an independent negative-eigenvalue count.
PropertyOutcome projector_idempotence_property(std::uint64_t seed, int cases = default_cases);
/// Convex mixes, and the Fermi-shell triangle mixes, of admissible states stay in [0, 1].
PropertyOutcome mixing_admissibility_property(std::uint64_t seed, int cases = default_cases);
/// Two SCF solves of the same random model produce byte-identical JSON and CSV.
PropertyOutcome determinism_property(std::uint64_t seed, int cases = default_cases);

}  // namespace weyl::testing
