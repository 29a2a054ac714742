#include "mlbalance/remedial.hpp"

#include <map>

#include "mlbalance/metrics.hpp"

namespace mlbalance {

Dataset remedial(const Dataset& data, std::vector<std::string>* warnings) {
  const auto profile = computeProfile(data);
  const LabelSet minority = profile.minorityMask();

  std::map<std::size_t, LabelSet> relabels;
  std::vector<Instance> additions;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(profile.scumbleIns[i] > profile.scumble)) continue;
    const auto& labels = data.instance(i).labels;
    const LabelSet minorPart = labels & minority;
    const LabelSet majorPart = labels ^ minorPart;
    if (minorPart.none() || majorPart.none()) {
      if (warnings) {
        warnings->push_back("REMEDIAL: instance " + std::to_string(i) +
                            " has only " + (minorPart.none() ? "majority" : "minority") +
                            " labels; left unsplit");
      }
      continue;
    }
    relabels.emplace(i, majorPart);
    additions.push_back(Instance{data.instance(i).features, minorPart});
  }
  return editInstances(data, {}, std::move(additions), relabels);
}

}  // namespace mlbalance
