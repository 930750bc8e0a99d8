#pragma once

#include <stdexcept>
#include <string>

namespace blindsearch {

enum class Errc {
    zero_mass,        // all raw weights zero
    negative_weight,  // negative or non-finite raw weight
    length_mismatch,  // raw weight vector length != n
    out_of_range,     // state / index outside [0, n]
    overflow,         // normalization not representable
    cap_exceeded,     // n above the configured O(n^2) cap
    too_large,        // n above the enumeration limit
    mu1_zero,         // operation requires mu(1) > 0
    all_censored,     // every simulated run hit max_steps
    invalid_c,        // drop constant below the computed maximum (strict mode)
    unknown_name,     // unrecognized strategy name
    bad_input,        // malformed spec string / file / argument
    consistency,      // internal cross-check failed
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace blindsearch
