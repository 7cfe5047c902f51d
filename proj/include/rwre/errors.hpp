#pragma once

#include <stdexcept>
#include <string>

namespace rwre
{

//! Invalid model, config field, or argument outside its documented domain.
class DomainError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//! An allocation would exceed the configured memory budget.
class ResourceError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! A computed quantity violated an invariant that must hold exactly.
class InvariantError : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

}  // namespace rwre
