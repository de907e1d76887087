#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace sievelab {

namespace detail {
inline std::string format_quantity(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}
}  // namespace detail

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine could not reach its target accuracy. Carries the
// error estimate that was actually achieved when the routine gave up.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double achieved_error)
      : Error(what + " (achieved error estimate " +
              detail::format_quantity(achieved_error) + ")"),
        achieved_(achieved_error) {}

  double achieved_error() const { return achieved_; }

 private:
  double achieved_;
};

// A configured work budget would be exceeded. Names the offending amount.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, double amount, double budget)
      : Error(what + " (required " + detail::format_quantity(amount) +
              ", budget " + detail::format_quantity(budget) + ")"),
        amount_(amount),
        budget_(budget) {}

  double amount() const { return amount_; }
  double budget() const { return budget_; }

 private:
  double amount_;
  double budget_;
};

// Input data violates a structural precondition, e.g. coincident points
// where the model guarantees almost-sure distinctness.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace sievelab
