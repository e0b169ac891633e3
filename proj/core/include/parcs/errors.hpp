#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace parcs {

// Base class for every failure the engine can signal.  The CLI maps these to
// exit code 2 (bad input / bad model) and IoError to exit code 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

// estimate_moments over a constant column, or too few samples to take moments.
class DegenerateSample : public Error {
public:
    using Error::Error;
};

// offset calibration: no root inside the search interval.
class NonBracketable : public Error {
public:
    using Error::Error;
};

class CycleDetected : public Error {
public:
    explicit CycleDetected(const std::string& msg, std::vector<std::string> cycle = {})
        : Error(msg), cycle_(std::move(cycle)) {}
    const std::vector<std::string>& cycle() const { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class UnknownNode : public Error {
public:
    using Error::Error;
};

class UnknownParent : public Error {
public:
    using Error::Error;
};

class DuplicateNode : public Error {
public:
    using Error::Error;
};

// Parse diagnostic: 1-based line/column plus what was expected there.
class SyntaxError : public Error {
public:
    SyntaxError(int line, int col, const std::string& expected, const std::string& msg)
        : Error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + msg +
                (expected.empty() ? "" : " (expected " + expected + ")")),
          line_(line), col_(col), expected_(expected) {}
    int line() const { return line_; }
    int col() const { return col_; }
    const std::string& expected() const { return expected_; }

private:
    int line_;
    int col_;
    std::string expected_;
};

// parameter expression with a term above total degree 2
class NonQuadraticTerm : public SyntaxError {
public:
    using SyntaxError::SyntaxError;
};

class UnknownParentInExpression : public SyntaxError {
public:
    using SyntaxError::SyntaxError;
};

class EmptyChoiceList : public Error {
public:
    using Error::Error;
};

class InvalidRange : public Error {
public:
    using Error::Error;
};

class TraceMismatch : public Error {
public:
    using Error::Error;
};

class MaskConflict : public Error {
public:
    using Error::Error;
};

class InvalidObservedSet : public Error {
public:
    using Error::Error;
};

// sample() called on a graph whose corrections were never frozen
class NotCalibrated : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace parcs
