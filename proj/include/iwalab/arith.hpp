#ifndef IWALAB_ARITH_HPP
#define IWALAB_ARITH_HPP

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <vector>

namespace iwalab {

using Int = mpz_class;
using Rat = mpq_class;

// p-adic valuation; returns `cap` for x = 0.
long vp(const Int& x, const Int& p, long cap = 1 << 30);
long vp(const Rat& x, const Int& p, long cap = 1 << 30);

Int pow_int(const Int& b, unsigned long e);
Int pow_ui(unsigned long b, unsigned long e);

bool is_prime(const Int& n);
std::vector<long> primes_up_to(long bound);

// Dense matrix over Q.  Row-reduction is exact; no rounding ever.
class QMat {
public:
  QMat() : rows_(0), cols_(0) {}
  QMat(long rows, long cols) : rows_(rows), cols_(cols), a_(rows * cols, Rat(0)) {}

  static QMat identity(long n);

  long rows() const { return rows_; }
  long cols() const { return cols_; }

  Rat& at(long i, long j) { return a_[i * cols_ + j]; }
  const Rat& at(long i, long j) const { return a_[i * cols_ + j]; }

  QMat operator*(const QMat& o) const;
  QMat operator+(const QMat& o) const;
  QMat operator-(const QMat& o) const;
  QMat transpose() const;
  bool is_zero() const;

  // Stack rows of `o` below this matrix.
  QMat vstack(const QMat& o) const;

private:
  long rows_, cols_;
  std::vector<Rat> a_;
};

// Basis of the right null space { v : m v = 0 }.
std::vector<std::vector<Rat>> kernel(const QMat& m);

// Basis of ker(m - lam I); m must be square.
std::vector<std::vector<Rat>> eigenspace(const QMat& m, const Rat& lam);

// Characteristic polynomial of a square matrix, monic, little-endian
// coefficients c[0] + c[1] x + ... + c[n] x^n with c[n] = 1.
std::vector<Rat> charpoly(const QMat& m);

long rank(const QMat& m);

// One solution of m x = b, if any.
std::optional<std::vector<Rat>> solve(const QMat& m, const std::vector<Rat>& b);

std::vector<Rat> mat_vec(const QMat& m, const std::vector<Rat>& v);
std::vector<Rat> vec_mat(const std::vector<Rat>& v, const QMat& m);

}  // namespace iwalab

#endif
