#pragma once

//! \file parallel.hpp
//! Carry exceptions out of OpenMP worksharing loops, which must not throw.

#include <exception>

namespace rwre
{

class ExceptionSlot
{
  public:
    //! Run f; keep the first exception raised by any thread.
    template<class F>
    void run(F&& f) noexcept
    {
        try
        {
            f();
        }
        catch (...)
        {
#pragma omp critical(rwre_exception_slot)
            if (!first_)
                first_ = std::current_exception();
        }
    }

    void rethrow() const
    {
        if (first_)
            std::rethrow_exception(first_);
    }

  private:
    std::exception_ptr first_;
};

}  // namespace rwre
