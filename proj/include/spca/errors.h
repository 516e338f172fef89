#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spca
{

// Root of every error thrown by the library. The CLI maps the two families
// below onto exit codes: input problems (2) and numerical problems (3).
class Error : public std::runtime_error
{
   public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error
{
   public:
    using Error::Error;
};

class NumericalFailure : public Error
{
   public:
    using Error::Error;
};

class ParseError : public InputError
{
   public:
    ParseError(const std::string& what, std::size_t row, std::size_t col)
        : InputError(what), row_(row), col_(col)
    {
    }
    // 1-based line and cell position in the source file; 0 when unknown.
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

   private:
    std::size_t row_;
    std::size_t col_;
};

class EmptyInput : public InputError
{
   public:
    using InputError::InputError;
};

class DimensionError : public InputError
{
   public:
    using InputError::InputError;
};

class FormatError : public InputError
{
   public:
    using InputError::InputError;
};

class DomainError : public InputError
{
   public:
    using InputError::InputError;
};

class DegenerateVariable : public NumericalFailure
{
   public:
    DegenerateVariable(const std::string& what, std::size_t row)
        : NumericalFailure(what), row_(row)
    {
    }
    // 0-based variable index.
    std::size_t row() const noexcept { return row_; }

   private:
    std::size_t row_;
};

class DegenerateMatrix : public NumericalFailure
{
   public:
    using NumericalFailure::NumericalFailure;
};

class DegenerateInput : public NumericalFailure
{
   public:
    using NumericalFailure::NumericalFailure;
};

class DegenerateRegressor : public NumericalFailure
{
   public:
    using NumericalFailure::NumericalFailure;
};

class NotIdentifiable : public NumericalFailure
{
   public:
    using NumericalFailure::NumericalFailure;
};

class NumericalError : public NumericalFailure
{
   public:
    using NumericalFailure::NumericalFailure;
};

}  // namespace spca
