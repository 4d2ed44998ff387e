#include "qcurv/corpus.hpp"

#include <cstdio>

namespace qcurv {

std::vector<CorpusEntry> profile_corpus(const Dim& dim) {
  using T = AnalyticTerm;
  std::vector<CorpusEntry> out;
  out.push_back({"flat", flat_profile(dim)});
  for (double a : {-1.0, -0.75, -0.5, -0.25, 0.5}) {
    char name[32];
    std::snprintf(name, sizeof name, "w_a(%g)", a);
    out.push_back({name, w_a_profile(dim, a)});
  }
  out.push_back({"round_sphere", round_sphere_profile(dim)});
  out.push_back({"mix", RadialProfile::analytic(dim, {T::log1p_sq(0.3, 2.0), T::log1p_sq(-0.7, 1.0)})});
  out.push_back({"three_term", RadialProfile::analytic(
                                   dim, {T::log1p_sq(-0.4, 0.5), T::log1p_sq(0.25, 1.5), T::log1p_sq(-0.6, 2.0)})});
  out.push_back({"cylinder", cylinder_profile(dim)});
  out.push_back({"punctured_mix", RadialProfile::analytic(dim, {T::log(-1.5), T::log1p_sq(0.5, 1.0)}, true)});
  return out;
}

}  // namespace qcurv
