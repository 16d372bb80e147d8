#pragma once

#include <array>

namespace dfsqec {

template <typename F>
void for_each_pauli_of_weight(int n, int w, PauliClass cls, F&& f) {
  if (w < 0 || w > n) return;
  std::array<int, PauliString::kMaxQubits> pos{};
  for (int i = 0; i < w; ++i) pos[i] = i;
  const int letters = cls == PauliClass::Any ? 3 : 1;
  while (true) {
    int combos = 1;
    for (int i = 0; i < w; ++i) combos *= letters;
    for (int c = 0; c < combos; ++c) {
      std::uint64_t x = 0, z = 0;
      int code = c;
      for (int i = 0; i < w; ++i) {
        int l = letters == 3 ? code % 3 : 0;
        code /= letters;
        std::uint64_t bit = std::uint64_t{1} << pos[i];
        if (cls == PauliClass::ZOnly) {
          z |= bit;
        } else if (cls == PauliClass::XOnly) {
          x |= bit;
        } else if (l == 0) {
          x |= bit;
        } else if (l == 1) {
          x |= bit;
          z |= bit;
        } else {
          z |= bit;
        }
      }
      f(PauliString(n, x, z, 0));
    }
    int i = w - 1;
    while (i >= 0 && pos[i] == n - w + i) --i;
    if (i < 0) return;
    ++pos[i];
    for (int j = i + 1; j < w; ++j) pos[j] = pos[j - 1] + 1;
  }
}

}  // namespace dfsqec
