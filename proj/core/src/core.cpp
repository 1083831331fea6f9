#include <algorithm>
#include <cmath>
#include <set>

#include "voi/error.hpp"
#include "voi/model.hpp"
#include "voi/types.hpp"

namespace voi {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFiniteReduction: return "NonFiniteReduction";
    case ErrorKind::ModelEvaluation: return "ModelEvaluation";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DegenerateFocal: return "DegenerateFocal";
    case ErrorKind::FocalDimension: return "FocalDimension";
    case ErrorKind::InvalidCount: return "InvalidCount";
    case ErrorKind::DegenerateWeights: return "DegenerateWeights";
    case ErrorKind::UnsupportedDependence: return "UnsupportedDependence";
    case ErrorKind::VarianceInflation: return "VarianceInflation";
    case ErrorKind::Validation: return "Validation";
  }
  return "Unknown";
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::MomentMatching: return "moment_matching";
    case Method::NestedMc: return "nested_mc";
    case Method::Analytic: return "analytic";
  }
  return "unknown";
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

namespace {

void check_names(std::span<const std::string> names) {
  std::set<std::string_view> seen;
  for (const auto& n : names) {
    if (n.empty()) throw Error(ErrorKind::InvalidArgument, "parameter name is empty");
    if (!seen.insert(n).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate parameter name '" + n + "'");
  }
}

}  // namespace

ParameterVector::ParameterVector(std::vector<std::string> names, std::vector<double> values)
    : names_(std::move(names)), values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorKind::InvalidArgument, "parameter vector is empty");
  if (names_.size() != values_.size())
    throw Error(ErrorKind::InvalidArgument, "parameter names and values differ in length");
  check_names(names_);
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw Error(ErrorKind::InvalidArgument, "parameter '" + names_[i] + "' is not finite", i);
}

double ParameterVector::at(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return values_[i];
  throw Error(ErrorKind::InvalidArgument, "unknown parameter '" + std::string(name) + "'");
}

FocalSubset::FocalSubset(std::vector<std::size_t> indices, std::size_t parameter_count)
    : indices_(std::move(indices)), parameter_count_(parameter_count) {
  if (indices_.empty()) throw Error(ErrorKind::InvalidArgument, "focal subset is empty");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] >= parameter_count_)
      throw Error(ErrorKind::InvalidArgument, "focal index out of range", indices_[i]);
    if (i > 0 && indices_[i] <= indices_[i - 1])
      throw Error(ErrorKind::InvalidArgument, "focal indices must be strictly increasing");
  }
}

FocalSubset FocalSubset::from_names(std::span<const std::string> wanted,
                                    std::span<const std::string> all) {
  std::vector<std::size_t> idx;
  for (const auto& w : wanted) {
    auto it = std::find(all.begin(), all.end(), w);
    if (it == all.end()) {
      std::string valid;
      for (const auto& a : all) valid += (valid.empty() ? "" : ", ") + a;
      throw Error(ErrorKind::InvalidArgument,
                  "unknown focal parameter '" + w + "' (valid: " + valid + ")");
    }
    idx.push_back(static_cast<std::size_t>(it - all.begin()));
  }
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
    throw Error(ErrorKind::InvalidArgument, "focal parameter listed twice");
  return FocalSubset(std::move(idx), all.size());
}

std::vector<std::size_t> FocalSubset::complement() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < parameter_count_; ++i)
    if (!contains(i)) out.push_back(i);
  return out;
}

bool FocalSubset::contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

void PsaResult::validate() const {
  if (inb.size() < 2) throw Error(ErrorKind::InvalidArgument, "PSA needs at least 2 simulations");
  if (params.rows() != inb.size())
    throw Error(ErrorKind::InvalidArgument, "PSA parameter rows do not match INB length");
  if (params.cols() != names.size() || names.empty())
    throw Error(ErrorKind::InvalidArgument, "PSA column names do not match parameter columns");
  check_names(names);
  for (std::size_t s = 0; s < inb.size(); ++s) {
    if (!std::isfinite(inb[s])) throw Error(ErrorKind::InvalidArgument, "non-finite INB", s);
    for (double v : params.row(s))
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite parameter", s);
  }
}

std::int64_t StudyDesign::size(const std::string& key) const {
  auto it = sizes.find(key);
  if (it == sizes.end()) throw Error(ErrorKind::InvalidArgument, "design has no size '" + key + "'");
  return it->second;
}

const Observation& FutureDataset::get(std::string_view name) const {
  for (const auto& o : outcomes)
    if (o.name == name) return o;
  throw Error(ErrorKind::InvalidArgument, "dataset has no outcome '" + std::string(name) + "'");
}

std::int64_t FutureDataset::count(std::string_view name) const {
  return static_cast<std::int64_t>(get(name).value);
}

void FutureDataset::validate() const {
  for (const auto& o : outcomes) {
    if (!o.denominator) continue;
    if (o.value < 0 || o.value != std::floor(o.value) || o.value > static_cast<double>(*o.denominator))
      throw Error(ErrorKind::InvalidCount, "outcome '" + o.name + "' is not a count within its denominator");
  }
}

ParameterVector EconomicModel::draw_prior(Rng& rng) const {
  std::vector<double> v(parameter_count());
  draw_prior(rng, v);
  return ParameterVector(parameter_names(), std::move(v));
}

PosteriorDraws DataGenerator::sample_posterior(const FutureDataset&, std::size_t, Rng&) const {
  throw Error(ErrorKind::InvalidArgument, "generator does not provide a conjugate posterior");
}

}  // namespace voi
