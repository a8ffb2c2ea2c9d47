#pragma once

#include <string>

#include <doctest.h>

#include "errors.hpp"

namespace testutil {

// Runs fn, requires that it throws rtplan::Error, and returns the kind so
// callers can assert on it.
template <typename Fn>
rtplan::ErrorKind thrown_kind(Fn&& fn) {
  try {
    fn();
  } catch (const rtplan::Error& e) {
    return e.kind();
  } catch (const std::exception& e) {
    FAIL((std::string("expected rtplan::Error, got: ") + e.what()));
  }
  FAIL("expected rtplan::Error, nothing was thrown");
  return rtplan::ErrorKind::InvalidArgument;
}

template <typename Fn>
std::string thrown_message(Fn&& fn) {
  try {
    fn();
  } catch (const rtplan::Error& e) {
    return e.what();
  }
  FAIL("expected rtplan::Error, nothing was thrown");
  return {};
}

}  // namespace testutil
