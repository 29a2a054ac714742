#include "mlbalance/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mlbalance/errors.hpp"

namespace mlbalance {

bool ImbalanceProfile::isMinority(std::size_t label) const {
  return std::binary_search(minorityLabels.begin(), minorityLabels.end(), label);
}

LabelSet ImbalanceProfile::minorityMask() const {
  LabelSet mask(counts.size());
  for (auto l : minorityLabels) mask.set(l);
  return mask;
}

IrLbl computeIRLbl(std::span<const std::size_t> counts) {
  const std::size_t maxCount = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  if (maxCount == 0) throw MetricError("no active labels");
  IrLbl out(counts.size());
  for (std::size_t l = 0; l < counts.size(); ++l) {
    if (counts[l] > 0) out[l] = static_cast<double>(maxCount) / static_cast<double>(counts[l]);
  }
  return out;
}

IrLbl computeIRLbl(const Dataset& data) { return computeIRLbl(labelCounts(data)); }

double computeMeanIR(const IrLbl& irlbl) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : irlbl) {
    if (!v) continue;
    sum += *v;
    ++n;
  }
  if (n == 0) throw MetricError("no active labels");
  return sum / static_cast<double>(n);
}

double computeMeanIR(const Dataset& data) { return computeMeanIR(computeIRLbl(data)); }

ScumbleScores computeScumble(const Dataset& data, const IrLbl& irlbl) {
  ScumbleScores out;
  out.perInstance.assign(data.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto active = data.instance(i).labels.active();
    if (active.size() <= 1) continue;
    double logSum = 0.0;
    double sum = 0.0;
    for (auto l : active) {
      // An active label always has a positive count, hence a defined irlbl.
      const double ir = *irlbl[l];
      logSum += std::log(ir);
      sum += ir;
    }
    const double n = static_cast<double>(active.size());
    const double geometric = std::exp(logSum / n);
    const double arithmetic = sum / n;
    const double score = std::clamp(1.0 - geometric / arithmetic, 0.0, 1.0);
    out.perInstance[i] = score;
    total += score;
  }
  out.mean = data.empty() ? 0.0 : total / static_cast<double>(data.size());
  return out;
}

ScumbleScores computeScumble(const Dataset& data) { return computeScumble(data, computeIRLbl(data)); }

LabelPartition minorityMajoritySplit(const IrLbl& irlbl, double meanIR) {
  LabelPartition out;
  for (std::size_t l = 0; l < irlbl.size(); ++l) {
    if (!irlbl[l]) continue;
    if (*irlbl[l] > meanIR)
      out.minority.push_back(l);
    else
      out.majority.push_back(l);
  }
  return out;
}

LabelPartition minorityMajoritySplit(const ImbalanceProfile& profile) {
  return minorityMajoritySplit(profile.irlbl, profile.meanIR);
}

ImbalanceProfile computeProfile(const Dataset& data) {
  ImbalanceProfile p;
  p.counts = labelCounts(data);
  p.irlbl = computeIRLbl(p.counts);
  p.meanIR = computeMeanIR(p.irlbl);
  auto scumble = computeScumble(data, p.irlbl);
  p.scumbleIns = std::move(scumble.perInstance);
  p.scumble = scumble.mean;
  auto split = minorityMajoritySplit(p.irlbl, p.meanIR);
  p.minorityLabels = std::move(split.minority);
  p.majorityLabels = std::move(split.majority);
  return p;
}

}  // namespace mlbalance
