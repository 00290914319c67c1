#pragma once

#include <stdexcept>
#include <string>

namespace zr3b {

/// Invalid argument to a numerical routine (non-finite input, out-of-domain
/// parameter, malformed charge spec).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// An adaptive routine ran out of budget before meeting its tolerance. The
/// best available estimate travels with the exception.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string &what, double best_estimate,
                   double error_estimate)
      : std::runtime_error(what), m_best(best_estimate),
        m_error(error_estimate) {}

  double best_estimate() const { return m_best; }
  double error_estimate() const { return m_error; }

private:
  double m_best;
  double m_error;
};

} // namespace zr3b
