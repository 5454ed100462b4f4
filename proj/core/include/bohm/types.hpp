#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bohm {

using Complex = std::complex<double>;

// Configuration points live in at most this many dimensions; the small-vector
// storage keeps trajectory right-hand sides off the heap.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using CMatrix = Eigen::MatrixXcd;

enum class Errc {
  node_encountered,
  out_of_domain,
  dimension_mismatch,
  on_singular_set,
  unsupported_field,
  axiom_violation,
  bad_start,
  provider_window,
  degenerate_density,
  too_few_survivors,
  box_too_large,
  window_exceeded,
  wrong_codimension,
  invalid_argument,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Which defining property of a current failed during validation.
enum class Axiom { smoothness, divergence_free, positivity, normalization };

std::string_view to_string(Axiom axiom) noexcept;

class AxiomViolation : public Error {
 public:
  AxiomViolation(Axiom axiom, const std::string& what)
      : Error(Errc::axiom_violation, std::string(to_string(axiom)) + ": " + what), axiom_(axiom) {}

  Axiom axiom() const noexcept { return axiom_; }

 private:
  Axiom axiom_;
};

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

inline Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace bohm
