#include "saddle/harness.hpp"

#include <cmath>
#include <sstream>

namespace saddle {

LabeledData synth_instance(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.d < 1) throw std::invalid_argument("synthetic sizes must be positive");
  if (spec.n > kSyntheticLimit || spec.d > kSyntheticLimit)
    throw std::invalid_argument("synthetic instance exceeds the size guard of " + std::to_string(kSyntheticLimit));
  if (!(spec.density > 0.0 && spec.density <= 1.0)) throw std::invalid_argument("density must lie in (0, 1]");
  if (!(spec.skew >= 0.0) || !std::isfinite(spec.skew)) throw std::invalid_argument("skew must be nonnegative");

  Rng rng(spec.seed);
  const Index test_rows = spec.heldout ? spec.n / 4 : 0;
  const Index total = spec.n + test_rows;
  Vector planted(spec.d);
  for (Index k = 0; k < spec.d; ++k) planted[k] = rng.normal() / std::sqrt(static_cast<double>(spec.d));

  std::vector<Eigen::Triplet<double>> train, test;
  Vector labels(spec.n), test_labels(test_rows);
  for (Index j = 0; j < total; ++j) {
    const double scale = std::exp(spec.skew * rng.normal());
    double score = 0.0;
    auto& sink = j < spec.n ? train : test;
    const Index row = j < spec.n ? j : j - spec.n;
    for (Index k = 0; k < spec.d; ++k) {
      if (spec.density < 1.0 && rng.uniform01() >= spec.density) continue;
      const double v = scale * rng.normal();
      sink.emplace_back(row, k, v);
      score += v * planted[k];
    }
    score += spec.label_noise * scale * rng.normal();
    (j < spec.n ? labels : test_labels)[row] = score >= 0.0 ? 1.0 : -1.0;
  }

  LabeledData data;
  CouplingMatrix::RowMajor m(spec.n, spec.d);
  m.setFromTriplets(train.begin(), train.end());
  data.K = std::make_shared<CouplingMatrix>(std::move(m));
  data.labels = std::move(labels);
  if (test_rows > 0) {
    CouplingMatrix::RowMajor t(test_rows, spec.d);
    t.setFromTriplets(test.begin(), test.end());
    data.test_K = std::make_shared<CouplingMatrix>(std::move(t));
    data.test_labels = std::move(test_labels);
  }
  return data;
}

SyntheticSpec parse_synthetic(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 4) throw std::invalid_argument("synthetic spec must be n,d,density,skew");
  SyntheticSpec spec;
  try {
    std::size_t used = 0;
    const long long n = std::stoll(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("n");
    const long long d = std::stoll(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("d");
    spec.n = static_cast<Index>(n);
    spec.d = static_cast<Index>(d);
    spec.density = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("density");
    spec.skew = std::stod(parts[3], &used);
    if (used != parts[3].size()) throw std::invalid_argument("skew");
  } catch (const std::logic_error&) {
    throw std::invalid_argument("synthetic spec must be n,d,density,skew with numeric fields, got '" + text + "'");
  }
  return spec;
}

}  // namespace saddle
