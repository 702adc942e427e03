#include "qmh/linalg.hpp"

#include "qmh/error.hpp"

namespace qmh {

std::optional<std::vector<Rational>> solve_rational(RatMatrix a,
                                                    std::vector<Rational> b) {
  const size_t m = a.size();
  require(b.size() == m, Errc::InvalidArgument, "solve: rhs size mismatch");
  const size_t n = m == 0 ? 0 : a[0].size();
  for (const auto& row : a)
    require(row.size() == n, Errc::InvalidArgument, "solve: ragged matrix");

  std::vector<std::optional<size_t>> pivot_row(n);
  size_t row = 0;
  for (size_t col = 0; col < n && row < m; ++col) {
    size_t sel = row;
    while (sel < m && a[sel][col] == 0) ++sel;
    if (sel == m) continue;
    std::swap(a[sel], a[row]);
    std::swap(b[sel], b[row]);

    const Rational piv = a[row][col];
    for (size_t j = col; j < n; ++j) a[row][j] /= piv;
    b[row] /= piv;
    for (size_t i = 0; i < m; ++i) {
      if (i == row || a[i][col] == 0) continue;
      const Rational f = a[i][col];
      for (size_t j = col; j < n; ++j) a[i][j] -= f * a[row][j];
      b[i] -= f * b[row];
    }
    pivot_row[col] = row;
    ++row;
  }

  for (size_t i = row; i < m; ++i)
    if (b[i] != 0) return std::nullopt;

  std::vector<Rational> x(n, Rational(0));
  for (size_t col = 0; col < n; ++col)
    if (pivot_row[col]) x[col] = b[*pivot_row[col]];
  return x;
}

}  // namespace qmh
