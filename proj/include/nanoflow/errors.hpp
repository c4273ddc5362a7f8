#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nanoflow {

// Elimination hit a block whose pivot is numerically zero.
class singular_block_error : public std::runtime_error {
public:
    singular_block_error(std::size_t block_index, const std::string& what_arg)
        : std::runtime_error(what_arg), block_index_(block_index) {}

    std::size_t block_index() const noexcept { return block_index_; }

private:
    std::size_t block_index_;
};

// Trajectory magnitude exceeded the guard bound before reaching eta_max.
class blow_up_error : public std::runtime_error {
public:
    blow_up_error(double eta_reached, const std::string& what_arg)
        : std::runtime_error(what_arg), eta_reached_(eta_reached) {}

    double eta_reached() const noexcept { return eta_reached_; }

private:
    double eta_reached_;
};

// Iteration could not proceed (singular correction system, stalled damping).
class solver_failure : public std::runtime_error {
public:
    solver_failure(int iteration, const std::string& what_arg)
        : std::runtime_error(what_arg), iteration_(iteration) {}

    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

} // namespace nanoflow
