#include "saddle/harness.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_set>

namespace saddle {

LibsvmError::LibsvmError(std::size_t line, const std::string& what)
    : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_index(std::string_view s, long long& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

LabeledData parse_libsvm(std::istream& in, std::vector<std::string>* warnings, Index min_cols) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> labels;
  Index cols = min_cols;
  std::string line;
  std::size_t line_no = 0;
  std::unordered_set<long long> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;
    double label = 0.0;
    if (!parse_double(tok, label)) throw LibsvmError(line_no, "bad label '" + tok + "'");
    const Index row = static_cast<Index>(labels.size());
    labels.push_back(label);
    seen.clear();
    std::size_t position = 1;
    while (tokens >> tok) {
      ++position;
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw LibsvmError(line_no, "token " + std::to_string(position) + " '" + tok + "' is not idx:val");
      long long idx = 0;
      double val = 0.0;
      const std::string_view view(tok);
      if (!parse_index(view.substr(0, colon), idx) || idx < 1)
        throw LibsvmError(line_no, "token " + std::to_string(position) + ": bad index '" + tok + "'");
      if (!parse_double(view.substr(colon + 1), val))
        throw LibsvmError(line_no, "token " + std::to_string(position) + ": bad value '" + tok + "'");
      if (!seen.insert(idx).second)
        throw LibsvmError(line_no, "token " + std::to_string(position) + ": duplicate index " + std::to_string(idx));
      cols = std::max<Index>(cols, static_cast<Index>(idx));
      if (val != 0.0) triplets.emplace_back(row, static_cast<Index>(idx - 1), val);
    }
  }
  if (labels.empty()) throw LibsvmError(0, "no data lines");

  std::set<double> distinct(labels.begin(), labels.end());
  const bool zero_one = distinct.count(0.0) && std::all_of(distinct.begin(), distinct.end(),
                                                           [](double v) { return v == 0.0 || v == 1.0; });
  if (zero_one) {
    for (double& v : labels) v = v == 0.0 ? -1.0 : 1.0;
    if (warnings) warnings->push_back("labels in {0,1} mapped to {-1,+1}");
  }

  CouplingMatrix::RowMajor m(static_cast<Index>(labels.size()), std::max<Index>(cols, 1));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  LabeledData data;
  data.K = std::make_shared<CouplingMatrix>(std::move(m));
  data.labels = Eigen::Map<const Vector>(labels.data(), static_cast<Index>(labels.size()));
  return data;
}

LabeledData load_libsvm(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_libsvm(in, warnings);
}

}  // namespace saddle
