#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "qcmix/observable.hpp"

namespace qcmix::exprio {

/// Syntax or semantic error with the 0-based offset into the source text.
struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(std::size_t pos, const std::string& msg)
      : std::runtime_error("parse error at position " + std::to_string(pos) +
                           ": " + msg),
        position(pos) {}
};

/// Grammar: atoms q, p, x, k (indexed q1, x2, ... when a sector has more than
/// one degree of freedom), hbar, hbarc, i, integer and rational literals a/b;
/// operators + - * ^ (nonnegative integer powers only) and parentheses.
/// ^ binds tighter than *, * tighter than + and -; * is mandatory between
/// factors and order-preserving.
Observable<Scalar> parse(std::string_view src, Dims dims);

/// Canonical text: monomials in graded-lexicographic order (highest degree
/// first), each coefficient in a fixed form. parse(format(A)) == A.
std::string format(const Observable<Scalar>& A);
std::string format(const Observable<GaussRat>& A);

/// Coefficient rendered in the same canonical style (no monomial part).
std::string format_scalar(const Scalar& s);

}  // namespace qcmix::exprio
