// errors.hpp: exception taxonomy for the library.
#pragma once

#include <stdexcept>
#include <string>

#include "wqs/types.hpp"

namespace wqs {

// Base type for everything thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Market file syntax or grammar violation; positions are 1-based.
class ParseError : public Error {
  public:
    ParseError(int line, int column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

// A sweep would exceed the market's configured enumeration budget.
class BudgetError : public Error {
  public:
    using Error::Error;
};

// A worker was assigned to more than one firm.
class OverlapError : public Error {
  public:
    OverlapError(WorkerId worker, const std::string& what) : Error(what), worker_(worker) {}
    WorkerId worker() const { return worker_; }

  private:
    WorkerId worker_;
};

// Gate refusal: an order/lattice operation was invoked on a market with a
// non-substitutable firm.
class SubstitutabilityError : public Error {
  public:
    SubstitutabilityError(FirmId firm, const std::string& what) : Error(what), firm_(firm) {}
    FirmId firm() const { return firm_; }

  private:
    FirmId firm_;
};

// Gate refusal: a LAD-conditional operation was invoked on a market with a
// firm violating the law of aggregate demand.
class LadError : public Error {
  public:
    LadError(FirmId firm, const std::string& what) : Error(what), firm_(firm) {}
    FirmId firm() const { return firm_; }

  private:
    FirmId firm_;
};

// An operation that requires worker-quasi-stable input was given something else.
class NotWqsError : public Error {
  public:
    using Error::Error;
};

class NotInLatticeError : public Error {
  public:
    using Error::Error;
};

// Matching literal syntax.
class FormatError : public Error {
  public:
    using Error::Error;
};

// An invariant the theory guarantees was violated: a bug, never a valid outcome.
class InternalError : public Error {
  public:
    using Error::Error;
};

}  // namespace wqs
