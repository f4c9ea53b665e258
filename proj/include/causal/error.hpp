#pragma once

#include <stdexcept>
#include <string>

namespace causal {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments that do not fit the space they are used with: non-subset masks,
/// overlapping product domains, malformed weights, bad atoms.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Conditioning on an atom of (numerically) zero mass.
class NullSetError : public Error {
 public:
  using Error::Error;
};

/// A caller-side precondition that is not a domain mismatch, e.g. asking for
/// a dormant-effect witness of an effect that is not dormant.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Something the mathematics says cannot happen did happen.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Malformed documents and expressions. `where` names the offending location
/// (a JSON pointer or a character offset).
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(where) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace causal
