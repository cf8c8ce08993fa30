#pragma once

#include <stdexcept>

namespace ulab {

/// Composite Simpson rule on [a, b] with an even number of panels.
template <class F>
auto simpson(F&& f, double a, double b, int panels) -> decltype(f(a)) {
  if (panels < 2 || panels % 2 != 0) throw std::invalid_argument("simpson: panels must be even and >= 2");
  const double step = (b - a) / panels;
  auto acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * step);
  return acc * (step / 3.0);
}

}  // namespace ulab
