#pragma once

#include <doctest.h>

#include "cavqed/error.hpp"

// Kind of the cavqed::Error thrown by f, failing the test if nothing is thrown.
template <class F>
cavqed::ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const cavqed::Error& e) {
    return e.kind();
  }
  FAIL("expected a cavqed::Error");
  return cavqed::ErrorKind::domain;
}
