#include "iwalab/arith.hpp"

#include <algorithm>
#include <cassert>

namespace iwalab {

long vp(const Int& x, const Int& p, long cap) {
  if (x == 0) return cap;
  Int t = x, r;
  long v = 0;
  while (true) {
    Int q;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
    if (r != 0) break;
    t = q;
    ++v;
    if (v >= cap) return cap;
  }
  return v;
}

long vp(const Rat& x, const Int& p, long cap) {
  if (x == 0) return cap;
  return vp(Int(x.get_num()), p, cap) - vp(Int(x.get_den()), p, cap);
}

Int pow_int(const Int& b, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

Int pow_ui(unsigned long b, unsigned long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), b, e);
  return r;
}

bool is_prime(const Int& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

std::vector<long> primes_up_to(long bound) {
  std::vector<long> out;
  if (bound < 2) return out;
  std::vector<bool> comp(bound + 1, false);
  for (long i = 2; i <= bound; ++i) {
    if (!comp[i]) {
      out.push_back(i);
      for (long j = 2 * i; j <= bound; j += i) comp[j] = true;
    }
  }
  return out;
}

QMat QMat::identity(long n) {
  QMat m(n, n);
  for (long i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

QMat QMat::operator*(const QMat& o) const {
  assert(cols_ == o.rows_);
  QMat r(rows_, o.cols_);
  for (long i = 0; i < rows_; ++i)
    for (long k = 0; k < cols_; ++k) {
      const Rat& x = at(i, k);
      if (x == 0) continue;
      for (long j = 0; j < o.cols_; ++j) {
        if (o.at(k, j) == 0) continue;
        r.at(i, j) += x * o.at(k, j);
      }
    }
  return r;
}

QMat QMat::operator+(const QMat& o) const {
  assert(rows_ == o.rows_ && cols_ == o.cols_);
  QMat r(rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
  return r;
}

QMat QMat::operator-(const QMat& o) const {
  assert(rows_ == o.rows_ && cols_ == o.cols_);
  QMat r(rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
  return r;
}

QMat QMat::transpose() const {
  QMat r(cols_, rows_);
  for (long i = 0; i < rows_; ++i)
    for (long j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

bool QMat::is_zero() const {
  for (const auto& x : a_)
    if (x != 0) return false;
  return true;
}

QMat QMat::vstack(const QMat& o) const {
  assert(cols_ == o.cols_);
  QMat r(rows_ + o.rows_, cols_);
  for (long i = 0; i < rows_; ++i)
    for (long j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
  for (long i = 0; i < o.rows_; ++i)
    for (long j = 0; j < cols_; ++j) r.at(rows_ + i, j) = o.at(i, j);
  return r;
}

namespace {

// Fraction-free Bareiss echelon form of the denominator-cleared matrix.
// Pivot rows are chosen by smallest nonzero absolute value to keep the
// intermediate integers small.  Returns the echelon matrix together with
// the pivot (row, col) list; rows of `m` are scaled copies, columns keep
// their Q-kernel.
struct Echelon {
  std::vector<std::vector<Int>> a;
  std::vector<std::pair<long, long>> pivots;  // (row, col), in column order
};

Echelon bareiss(const QMat& m) {
  long rows = m.rows(), cols = m.cols();
  Echelon e;
  e.a.assign(rows, std::vector<Int>(cols, 0));
  for (long i = 0; i < rows; ++i) {
    Int lcm = 1;
    for (long j = 0; j < cols; ++j) lcm = ::lcm(lcm, Int(m.at(i, j).get_den()));
    for (long j = 0; j < cols; ++j) {
      Rat x = m.at(i, j) * Rat(lcm);
      x.canonicalize();
      assert(x.get_den() == 1);
      e.a[i][j] = x.get_num();
    }
  }
  Int prev = 1;
  long r = 0;
  for (long c = 0; c < cols && r < rows; ++c) {
    long best = -1;
    for (long i = r; i < rows; ++i) {
      if (e.a[i][c] == 0) continue;
      if (best < 0 || mpz_cmpabs(e.a[i][c].get_mpz_t(), e.a[best][c].get_mpz_t()) < 0) best = i;
    }
    if (best < 0) continue;
    std::swap(e.a[r], e.a[best]);
    for (long i = r + 1; i < rows; ++i) {
      for (long j = c + 1; j < cols; ++j) {
        Int t = e.a[r][c] * e.a[i][j] - e.a[i][c] * e.a[r][j];
        assert(t % prev == 0);
        e.a[i][j] = t / prev;
      }
      e.a[i][c] = 0;
    }
    prev = e.a[r][c];
    e.pivots.emplace_back(r, c);
    ++r;
  }
  return e;
}

}  // namespace

std::vector<std::vector<Rat>> kernel(const QMat& m) {
  long cols = m.cols();
  Echelon e = bareiss(m);
  std::vector<long> pivot_of_col(cols, -1);
  for (auto [r, c] : e.pivots) pivot_of_col[c] = r;

  std::vector<std::vector<Rat>> basis;
  for (long c = 0; c < cols; ++c) {
    if (pivot_of_col[c] >= 0) continue;
    std::vector<Rat> v(cols, Rat(0));
    v[c] = 1;
    // Back-substitute through pivot rows, bottom-up.
    for (auto it = e.pivots.rbegin(); it != e.pivots.rend(); ++it) {
      auto [r, pc] = *it;
      Rat s(0);
      for (long j = pc + 1; j < cols; ++j) {
        if (v[j] == 0) continue;
        s += Rat(e.a[r][j]) * v[j];
      }
      v[pc] = -s / Rat(e.a[r][pc]);
    }
    // Clear denominators so the basis vectors are primitive integer vectors.
    Int l = 1;
    for (auto& x : v) l = ::lcm(l, Int(x.get_den()));
    Int g = 0;
    for (auto& x : v) {
      x *= Rat(l);
      x.canonicalize();
      g = gcd(g, Int(x.get_num()));
    }
    if (g > 1)
      for (auto& x : v) x /= Rat(g);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<std::vector<Rat>> eigenspace(const QMat& m, const Rat& lam) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenspace: matrix not square");
  QMat s = m;
  for (long i = 0; i < m.rows(); ++i) s.at(i, i) -= lam;
  return kernel(s);
}

std::vector<Rat> charpoly(const QMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("charpoly: matrix not square");
  long n = m.rows();
  // Faddeev-LeVerrier: exact over Q, fine at these dimensions.
  std::vector<Rat> c(n + 1, Rat(0));
  c[n] = 1;
  QMat mk = m;
  for (long k = 1; k <= n; ++k) {
    Rat tr(0);
    for (long i = 0; i < n; ++i) tr += mk.at(i, i);
    c[n - k] = -tr / Rat(k);
    if (k == n) break;
    for (long i = 0; i < n; ++i) mk.at(i, i) += c[n - k];
    mk = m * mk;
  }
  return c;
}

long rank(const QMat& m) { return static_cast<long>(bareiss(m).pivots.size()); }

std::optional<std::vector<Rat>> solve(const QMat& m, const std::vector<Rat>& b) {
  assert(static_cast<long>(b.size()) == m.rows());
  QMat aug(m.rows(), m.cols() + 1);
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols()) = b[i];
  }
  Echelon e = bareiss(aug);
  std::vector<Rat> x(m.cols(), Rat(0));
  for (auto it = e.pivots.rbegin(); it != e.pivots.rend(); ++it) {
    auto [r, c] = *it;
    if (c == m.cols()) return std::nullopt;  // inconsistent row 0 ... 0 | *
    Rat s = Rat(e.a[r][m.cols()]);
    for (long j = c + 1; j < m.cols(); ++j) {
      if (x[j] == 0) continue;
      s -= Rat(e.a[r][j]) * x[j];
    }
    x[c] = s / Rat(e.a[r][c]);
  }
  for (long i = 0; i < m.rows(); ++i) {
    Rat s(0);
    for (long j = 0; j < m.cols(); ++j) s += m.at(i, j) * x[j];
    if (s != b[i]) return std::nullopt;
  }
  return x;
}

std::vector<Rat> mat_vec(const QMat& m, const std::vector<Rat>& v) {
  assert(static_cast<long>(v.size()) == m.cols());
  std::vector<Rat> r(m.rows(), Rat(0));
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) {
      if (m.at(i, j) == 0 || v[j] == 0) continue;
      r[i] += m.at(i, j) * v[j];
    }
  return r;
}

std::vector<Rat> vec_mat(const std::vector<Rat>& v, const QMat& m) {
  assert(static_cast<long>(v.size()) == m.rows());
  std::vector<Rat> r(m.cols(), Rat(0));
  for (long i = 0; i < m.rows(); ++i) {
    if (v[i] == 0) continue;
    for (long j = 0; j < m.cols(); ++j) {
      if (m.at(i, j) == 0) continue;
      r[j] += v[i] * m.at(i, j);
    }
  }
  return r;
}

}  // namespace iwalab
