#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geoflow {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed mesh file content; `line` is 1-based, 0 when not line-specific.
class ParseError : public Error
{
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what)
        , line_(line)
    {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Structural mesh defect (index range, non-manifold edge, inconsistent winding).
class ValidationError : public Error
{
public:
    ValidationError(const std::string& what, long element)
        : Error(what)
        , element_(element)
    {}
    long element() const { return element_; }

private:
    long element_;
};

class DegenerateFaceError : public Error
{
public:
    explicit DegenerateFaceError(long face)
        : Error("degenerate face " + std::to_string(face))
        , face_(face)
    {}
    long face() const { return face_; }

private:
    long face_;
};

class IoError : public Error
{
public:
    using Error::Error;
};

/// Invalid configuration or shape parameters.
class ConfigError : public Error
{
public:
    using Error::Error;
};

class SolverError : public Error
{
public:
    SolverError(const std::string& what, double residual, long iterations)
        : Error(what)
        , residual_(residual)
        , iterations_(iterations)
    {}
    double residual() const { return residual_; }
    long iterations() const { return iterations_; }

private:
    double residual_;
    long iterations_;
};

class BlowUpError : public Error
{
public:
    explicit BlowUpError(long step)
        : Error("blow-up at step " + std::to_string(step))
        , step_(step)
    {}
    long step() const { return step_; }

private:
    long step_;
};

} // namespace geoflow
