#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlbalance/algorithms.hpp"
#include "mlbalance/dataset.hpp"

namespace mlbalance {

/// Where to find a dataset and how to tell labels from features.
///
/// MULAN: label names listed in an XML file. MEKA: `-C n` selects the first
/// n attributes as labels (n > 0) or the last |n| (n < 0). When neither is
/// given, a sibling `<stem>.xml` is tried, then a `-C n` option embedded in
/// the relation name.
struct DatasetSource {
  std::filesystem::path arff;
  std::optional<std::filesystem::path> xml;
  std::optional<int> mekaLabels;
};

/// Label selection for an already-open ARFF stream.
struct LabelSelection {
  std::optional<std::vector<std::string>> names;  // MULAN
  std::optional<int> mekaLabels;                  // MEKA; from the relation name when both are empty
};

Dataset readDataset(const DatasetSource& source);
Dataset readArff(std::istream& in, const LabelSelection& labels);

/// Label names from a MULAN labels file, in document order (nested
/// hierarchies are flattened).
std::vector<std::string> parseMulanLabels(std::string_view xml);
std::vector<std::string> readMulanLabels(const std::filesystem::path& path);

/// Dense ARFF with features first, then labels as nominal {0,1}.
void writeArff(std::ostream& out, const Dataset& data);
void writeMulanLabels(std::ostream& out, const Dataset& data);

/// Writes `<dir>/<baseName>.arff` and `<dir>/<baseName>.xml`; returns the
/// ARFF path. Throws IoError when the files cannot be written.
std::filesystem::path writeDataset(const Dataset& data, const std::filesystem::path& directory,
                                   std::string_view baseName);

/// Shortest decimal text that reads back to the same double ("25", "0.5").
std::string formatNumber(double value);

/// `<base>_<ALGORITHM>[_P=..][_k=..][_threshold=..].arff`
std::string outputName(std::string_view baseName, std::string_view algorithm,
                       const AlgorithmParams& params);

}  // namespace mlbalance
