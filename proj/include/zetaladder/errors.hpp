#pragma once

#include <stdexcept>
#include <string>

namespace zl {

// Every failure raised by the library derives from Error so callers can
// catch one type at stage boundaries.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Evaluation too close to the pole of zeta at s = 1.
class PoleError : public Error {
public:
    using Error::Error;
};

// Requested tolerance cannot be met (precision floor, sieve too small,
// quadrature failed to converge).
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double achieved = 0.0)
        : Error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Dirichlet series requested where it does not converge absolutely.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// Point or window outside the admissible local window [x_r, x_r + h].
class WindowError : public Error {
public:
    using Error::Error;
};

// Target outside the span of a tabulated function; required_high names the
// right end the table would need to reach, when known.
class RangeError : public Error {
public:
    RangeError(const std::string& what, double required_high = 0.0)
        : Error(what), required_high_(required_high) {}
    double required_high() const noexcept { return required_high_; }

private:
    double required_high_;
};

// Root scan found no sign change at the finest allowed resolution.
class ResolutionError : public Error {
public:
    using Error::Error;
};

// Iterated images escaped the segment they must belong to.
class ChainError : public Error {
public:
    using Error::Error;
};

// |Z| below the zero guard at a point used as a denominator.
class SingularPointError : public Error {
public:
    SingularPointError(const std::string& what, int index)
        : Error(what), index_(index) {}
    int index() const noexcept { return index_; }

private:
    int index_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

// Failure of one stage of the metamorphosis pipeline, wrapping the cause.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& cause)
        : Error(stage + ": " + cause), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace zl
