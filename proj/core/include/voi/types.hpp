#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace voi {

/// Dense row-major matrix; rows are simulations, columns are parameters.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const;

  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class ParameterVector {
 public:
  ParameterVector(std::vector<std::string> names, std::vector<double> values);

  const std::vector<std::string>& names() const noexcept { return names_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  /// Throws InvalidArgument for an unknown name.
  double at(std::string_view name) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
};

/// Strictly increasing positions of the focal parameters (phi) within a
/// model's parameter list; the complement is psi.
class FocalSubset {
 public:
  FocalSubset(std::vector<std::size_t> indices, std::size_t parameter_count);

  /// Resolve names against a parameter list. Indices are sorted, so the
  /// subset order always follows the model's parameter order.
  static FocalSubset from_names(std::span<const std::string> wanted,
                                std::span<const std::string> all);

  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t parameter_count() const noexcept { return parameter_count_; }
  std::vector<std::size_t> complement() const;
  bool contains(std::size_t index) const;

  bool operator==(const FocalSubset&) const = default;

 private:
  std::vector<std::size_t> indices_;
  std::size_t parameter_count_;
};

struct PsaResult {
  std::vector<std::string> names;
  Matrix params;
  std::vector<double> inb;

  std::size_t size() const noexcept { return inb.size(); }

  /// Throws InvalidArgument if any invariant is broken (shape, S >= 2,
  /// finiteness, unique non-empty names).
  void validate() const;
};

/// Study design: named sample sizes ("n", "n_per_arm", ...).
struct StudyDesign {
  std::map<std::string, std::int64_t> sizes;

  std::int64_t size(const std::string& key) const;
  bool operator==(const StudyDesign&) const = default;
};

struct Observation {
  std::string name;
  double value = 0.0;
  /// Present for counts; value is then integral and within [0, denominator].
  std::optional<std::int64_t> denominator;
};

struct FutureDataset {
  std::vector<Observation> outcomes;
  StudyDesign design;

  /// Throws InvalidArgument for an unknown outcome.
  const Observation& get(std::string_view name) const;
  std::int64_t count(std::string_view name) const;

  /// Throws InvalidCount when a count is negative, fractional or exceeds
  /// its denominator.
  void validate() const;
};

struct PosteriorDraws {
  Matrix params;  // R x |focal|
  std::size_t size() const noexcept { return params.rows(); }
};

struct VarianceBundle {
  double mu_theta = 0.0;
  double sigma2_theta = 0.0;
  double sigma2_phi = 0.0;
  std::vector<double> sigma2_q;
  double sigma2_x = 0.0;
};

enum class Method { MomentMatching, NestedMc, Analytic };

std::string_view to_string(Method method) noexcept;

struct EvsiEstimate {
  double value = 0.0;
  Method method = Method::MomentMatching;
  std::size_t S = 0;
  std::optional<std::size_t> Q;
  std::optional<std::size_t> R;
  std::uint64_t seed = 0;
  std::optional<VarianceBundle> bundle;
  /// Monte Carlo standard error, when the method can report one.
  std::optional<double> standard_error;
  std::vector<std::string> warnings;
};

}  // namespace voi
