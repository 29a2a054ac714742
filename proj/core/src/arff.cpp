#include "mlbalance/arff.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mlbalance/errors.hpp"

namespace mlbalance {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool startsWithKeyword(std::string_view line, std::string_view keyword) {
  if (line.size() < keyword.size()) return false;
  for (std::size_t i = 0; i < keyword.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(line[i])) != keyword[i]) return false;
  }
  return line.size() == keyword.size() ||
         std::isspace(static_cast<unsigned char>(line[keyword.size()]));
}

struct Token {
  std::string text;
  bool quoted = false;
};

/// Reads one possibly quoted token starting at `pos`; stops at whitespace or
/// any character in `stops` when unquoted.
Token readToken(std::string_view s, std::size_t& pos, std::string_view stops) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  Token tok;
  if (pos < s.size() && (s[pos] == '\'' || s[pos] == '"')) {
    const char quote = s[pos++];
    tok.quoted = true;
    while (pos < s.size() && s[pos] != quote) {
      if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
      tok.text.push_back(s[pos++]);
    }
    if (pos >= s.size()) throw FormatError("unterminated quote in: " + std::string(s));
    ++pos;
    return tok;
  }
  while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
         stops.find(s[pos]) == std::string_view::npos) {
    tok.text.push_back(s[pos++]);
  }
  return tok;
}

/// Splits on commas outside quotes; each field is trimmed and unquoted.
std::vector<Token> splitFields(std::string_view s) {
  std::vector<Token> out;
  std::size_t pos = 0;
  while (true) {
    Token tok = readToken(s, pos, ",");
    // Unquoted fields may contain inner spaces ("a b") in the wild; keep them.
    while (!tok.quoted && pos < s.size() && s[pos] != ',') {
      std::size_t save = pos;
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos >= s.size() || s[pos] == ',') break;
      tok.text.append(s.substr(save, pos - save));
      Token more = readToken(s, pos, ",");
      tok.text += more.text;
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    out.push_back(std::move(tok));
    if (pos >= s.size()) break;
    if (s[pos] != ',') throw FormatError("malformed field list: " + std::string(s));
    ++pos;
  }
  return out;
}

enum class AttrType { numeric, nominal };

struct Attribute {
  std::string name;
  AttrType type = AttrType::numeric;
  std::vector<std::string> values;
  std::unordered_map<std::string, std::size_t> lookup;
};

std::optional<int> mekaOption(std::string_view relation) {
  static const std::regex pattern(R"((?:^|\s|:)-C\s+(-?\d+))");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(relation.begin(), relation.end(), m, pattern)) {
    return std::stoi(m[1].str());
  }
  return std::nullopt;
}

bool isBinaryDomain(const Attribute& a) {
  if (a.type == AttrType::numeric) return true;
  if (a.values.size() != 2) return false;
  return (a.values[0] == "0" && a.values[1] == "1") || (a.values[0] == "1" && a.values[1] == "0");
}

std::string quoteIfNeeded(std::string_view s) {
  const bool plain = !s.empty() && s != "?" &&
                     s.find_first_of(" \t,'\"%{}\\") == std::string_view::npos;
  if (plain) return std::string(s);
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string xmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string xmlUnescape(std::string_view s) {
  static const std::pair<std::string_view, char> entities[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    bool matched = false;
    if (s[i] == '&') {
      for (const auto& [entity, ch] : entities) {
        if (s.substr(i, entity.size()) == entity) {
          out.push_back(ch);
          i += entity.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out.push_back(s[i++]);
  }
  return out;
}

std::string location(std::size_t row, std::size_t column, const Attribute& attr) {
  return "instance " + std::to_string(row) + ", column " + std::to_string(column) + " ('" +
         attr.name + "')";
}

}  // namespace

// ---------------------------------------------------------------------------
// Reading

std::vector<std::string> parseMulanLabels(std::string_view xml) {
  static const std::regex pattern(R"re(<label\b[^>]*?\bname\s*=\s*(?:"([^"]*)"|'([^']*)'))re");
  std::vector<std::string> names;
  std::match_results<std::string_view::const_iterator> m;
  auto begin = xml.begin();
  while (std::regex_search(begin, xml.end(), m, pattern)) {
    names.push_back(xmlUnescape(m[1].matched ? m[1].str() : m[2].str()));
    begin = m[0].second;
  }
  return names;
}

std::vector<std::string> readMulanLabels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open labels file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  auto names = parseMulanLabels(buf.str());
  if (names.empty()) throw FormatError("no <label> entries in '" + path.string() + "'");
  return names;
}

Dataset readArff(std::istream& in, const LabelSelection& selection) {
  std::string relation;
  std::vector<Attribute> attrs;
  std::string line;
  bool inData = false;

  while (!inData && std::getline(in, line)) {
    const auto text = trim(line);
    if (text.empty() || text.front() == '%') continue;
    if (startsWithKeyword(text, "@relation")) {
      std::size_t pos = 9;
      auto rest = trim(text.substr(pos));
      if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
        std::size_t p = 0;
        relation = readToken(rest, p, "").text;
      } else {
        relation = std::string(rest);
      }
    } else if (startsWithKeyword(text, "@attribute")) {
      std::size_t pos = 10;
      Attribute attr;
      attr.name = readToken(text, pos, "{").text;
      auto type = trim(text.substr(pos));
      if (!type.empty() && type.front() == '{') {
        const auto close = type.rfind('}');
        if (close == std::string_view::npos) {
          throw FormatError("unterminated nominal domain for attribute '" + attr.name + "'");
        }
        attr.type = AttrType::nominal;
        for (auto& tok : splitFields(type.substr(1, close - 1))) attr.values.push_back(tok.text);
        for (std::size_t v = 0; v < attr.values.size(); ++v) {
          if (!attr.lookup.emplace(attr.values[v], v).second) {
            throw FormatError("duplicate value '" + attr.values[v] + "' in attribute '" + attr.name + "'");
          }
        }
      } else {
        std::string kind(type);
        std::transform(kind.begin(), kind.end(), kind.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (kind == "numeric" || kind == "real" || kind == "integer") {
          attr.type = AttrType::numeric;
        } else {
          throw FormatError("unsupported type '" + std::string(type) + "' for attribute '" +
                            attr.name + "'");
        }
      }
      attrs.push_back(std::move(attr));
    } else if (startsWithKeyword(text, "@data")) {
      inData = true;
    } else {
      throw FormatError("unexpected header line: " + std::string(text));
    }
  }
  if (!inData) throw FormatError("missing @data section");

  // Decide which attributes are labels.
  std::vector<bool> isLabel(attrs.size(), false);
  std::string name = relation;
  if (selection.names) {
    std::unordered_map<std::string, std::size_t> byName;
    for (std::size_t a = 0; a < attrs.size(); ++a) byName.emplace(attrs[a].name, a);
    for (const auto& l : *selection.names) {
      auto it = byName.find(l);
      if (it == byName.end()) throw FormatError("label '" + l + "' not found in ARFF header");
      isLabel[it->second] = true;
    }
  } else {
    auto meka = selection.mekaLabels;
    if (!meka) {
      meka = mekaOption(relation);
      if (!meka) throw FormatError("no label specification (XML file or -C option)");
      name = std::string(trim(relation.substr(0, relation.find(':'))));
    }
    const auto count = static_cast<std::size_t>(std::abs(*meka));
    if (count == 0 || count > attrs.size()) {
      throw FormatError("-C " + std::to_string(*meka) + " does not fit " +
                        std::to_string(attrs.size()) + " attributes");
    }
    for (std::size_t c = 0; c < count; ++c) {
      isLabel[*meka > 0 ? c : attrs.size() - 1 - c] = true;
    }
  }

  std::vector<FeatureSpec> features;
  std::vector<std::string> labelNames;
  std::vector<std::size_t> slot(attrs.size());  // feature or label position
  for (std::size_t a = 0; a < attrs.size(); ++a) {
    if (isLabel[a]) {
      if (!isBinaryDomain(attrs[a])) {
        throw FormatError("label attribute '" + attrs[a].name + "' is not binary");
      }
      slot[a] = labelNames.size();
      labelNames.push_back(attrs[a].name);
    } else {
      slot[a] = features.size();
      features.push_back(attrs[a].type == AttrType::numeric
                             ? FeatureSpec::numeric(attrs[a].name)
                             : FeatureSpec::nominal(attrs[a].name, attrs[a].values));
    }
  }

  auto assign = [&](Instance& inst, std::size_t row, std::size_t a, const Token& tok) {
    const auto& attr = attrs[a];
    if (!tok.quoted && tok.text == "?") {
      throw LoadError(location(row, a, attr) + ": missing value");
    }
    if (isLabel[a]) {
      if (tok.text == "1") {
        inst.labels.set(slot[a]);
      } else if (tok.text != "0") {
        throw FormatError(location(row, a, attr) + ": label value '" + tok.text + "' is not 0/1");
      }
      return;
    }
    if (attr.type == AttrType::numeric) {
      double v = 0.0;
      const char* first = tok.text.data();
      const char* last = first + tok.text.size();
      if (!tok.text.empty() && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        throw LoadError(location(row, a, attr) + ": '" + tok.text + "' is not a number");
      }
      inst.features[slot[a]] = v;
    } else {
      auto it = attr.lookup.find(tok.text);
      if (it == attr.lookup.end()) {
        throw LoadError(location(row, a, attr) + ": '" + tok.text + "' is not in the domain");
      }
      inst.features[slot[a]] = static_cast<double>(it->second);
    }
  };

  std::vector<Instance> rows;
  while (std::getline(in, line)) {
    const auto text = trim(line);
    if (text.empty() || text.front() == '%') continue;
    const std::size_t row = rows.size();
    Instance inst{std::vector<double>(features.size(), 0.0), LabelSet(labelNames.size())};
    if (text.front() == '{') {
      const auto close = text.rfind('}');
      if (close == std::string_view::npos) throw FormatError("unterminated sparse row " + std::to_string(row));
      const auto body = trim(text.substr(1, close - 1));
      std::size_t pos = 0;
      while (pos < body.size()) {
        const auto idxText = readToken(body, pos, ",");
        std::size_t a = 0;
        auto [p, ec] = std::from_chars(idxText.text.data(), idxText.text.data() + idxText.text.size(), a);
        if (ec != std::errc() || p != idxText.text.data() + idxText.text.size() || a >= attrs.size()) {
          throw FormatError("instance " + std::to_string(row) + ": bad sparse index '" + idxText.text + "'");
        }
        assign(inst, row, a, readToken(body, pos, ","));
        while (pos < body.size() && std::isspace(static_cast<unsigned char>(body[pos]))) ++pos;
        if (pos < body.size()) {
          if (body[pos] != ',') throw FormatError("instance " + std::to_string(row) + ": malformed sparse row");
          ++pos;
        }
      }
    } else {
      const auto fields = splitFields(text);
      if (fields.size() != attrs.size()) {
        throw FormatError("instance " + std::to_string(row) + ": expected " +
                          std::to_string(attrs.size()) + " values, got " + std::to_string(fields.size()));
      }
      for (std::size_t a = 0; a < attrs.size(); ++a) assign(inst, row, a, fields[a]);
    }
    rows.push_back(std::move(inst));
  }

  return buildDataset(std::move(name), std::move(features), std::move(labelNames), std::move(rows));
}

Dataset readDataset(const DatasetSource& source) {
  std::ifstream in(source.arff);
  if (!in) throw IoError("cannot open '" + source.arff.string() + "'");
  LabelSelection selection;
  if (source.xml) {
    selection.names = readMulanLabels(*source.xml);
  } else if (source.mekaLabels) {
    selection.mekaLabels = source.mekaLabels;
  } else {
    auto sibling = source.arff;
    sibling.replace_extension(".xml");
    if (std::filesystem::exists(sibling)) selection.names = readMulanLabels(sibling);
  }
  return readArff(in, selection);
}

// ---------------------------------------------------------------------------
// Writing

std::string formatNumber(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw IoError("cannot format number");
  return std::string(buf, ptr);
}

void writeArff(std::ostream& out, const Dataset& data) {
  out << "@relation " << quoteIfNeeded(data.name().empty() ? "dataset" : data.name()) << "\n\n";
  for (const auto& f : data.features()) {
    out << "@attribute " << quoteIfNeeded(f.name) << ' ';
    if (f.isNominal()) {
      out << '{';
      for (std::size_t v = 0; v < f.domain.size(); ++v) {
        if (v) out << ',';
        out << quoteIfNeeded(f.domain[v]);
      }
      out << "}\n";
    } else {
      out << "numeric\n";
    }
  }
  for (const auto& l : data.labelNames()) out << "@attribute " << quoteIfNeeded(l) << " {0,1}\n";
  out << "\n@data\n";
  std::string row;
  for (const auto& inst : data.instances()) {
    row.clear();
    for (std::size_t f = 0; f < inst.features.size(); ++f) {
      if (f) row.push_back(',');
      const auto& spec = data.feature(f);
      if (spec.isNominal()) {
        row += quoteIfNeeded(spec.domain[static_cast<std::size_t>(inst.features[f])]);
      } else {
        row += formatNumber(inst.features[f]);
      }
    }
    for (std::size_t l = 0; l < data.labelCount(); ++l) {
      if (l > 0 || !inst.features.empty()) row.push_back(',');
      row.push_back(inst.labels.test(l) ? '1' : '0');
    }
    out << row << '\n';
  }
}

void writeMulanLabels(std::ostream& out, const Dataset& data) {
  out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  out << "<labels xmlns=\"http://mulan.sourceforge.net/labels\">\n";
  for (const auto& l : data.labelNames()) out << "  <label name=\"" << xmlEscape(l) << "\"></label>\n";
  out << "</labels>\n";
}

std::filesystem::path writeDataset(const Dataset& data, const std::filesystem::path& directory,
                                   std::string_view baseName) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  const auto arffPath = directory / (std::string(baseName) + ".arff");
  const auto xmlPath = directory / (std::string(baseName) + ".xml");
  {
    std::ofstream out(arffPath, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + arffPath.string() + "'");
    writeArff(out, data);
    if (!out) throw IoError("failed writing '" + arffPath.string() + "'");
  }
  {
    std::ofstream out(xmlPath, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + xmlPath.string() + "'");
    writeMulanLabels(out, data);
    if (!out) throw IoError("failed writing '" + xmlPath.string() + "'");
  }
  return arffPath;
}

std::string outputName(std::string_view baseName, std::string_view algorithm,
                       const AlgorithmParams& params) {
  std::string name(baseName);
  name += '_';
  name += algorithm;
  if (params.percentage) name += "_P=" + formatNumber(*params.percentage);
  if (params.k) name += "_k=" + std::to_string(*params.k);
  if (params.threshold) name += "_threshold=" + formatNumber(*params.threshold);
  name += ".arff";
  return name;
}

}  // namespace mlbalance
