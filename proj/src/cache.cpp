#include "iwalab/cache.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace iwalab {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string rat_str(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

void write_mat(std::ostream& os, const QMat& m) {
  os << m.rows() << " " << m.cols() << "\n";
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) os << (j ? " " : "") << rat_str(m.at(i, j));
    os << "\n";
  }
}

QMat read_mat(std::istream& is) {
  long r, c;
  is >> r >> c;
  QMat m(r, c);
  for (long i = 0; i < r; ++i)
    for (long j = 0; j < c; ++j) {
      std::string t;
      is >> t;
      m.at(i, j) = Rat(t);
      m.at(i, j).canonicalize();
    }
  return m;
}

}  // namespace

std::string ModSymSpace::serialize() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!boundary_) build_boundary();
  std::ostringstream os;
  os << N_ << " " << k_ << " " << dim_ << "\n";
  for (long b = 0; b < dim_; ++b) os << (b ? " " : "") << basis_[b];
  os << "\n";
  for (long g = 0; g < ngens(); ++g) {
    for (long b = 0; b < dim_; ++b) os << (b ? " " : "") << rat_str(expr_[g][b]);
    os << "\n";
  }
  os << "cusps " << cusp_reps_.size() << "\n";
  for (const auto& [n, d] : cusp_reps_) os << n << " " << d << "\n";
  os << "boundary\n";
  write_mat(os, *boundary_);
  if (!star_) {
    // force star through the public accessor pattern without re-locking
    QMat m(dim_, dim_);
    // compute inline (duplicate of star(); kept trivial)
    for (long col = 0; col < dim_; ++col) {
      long gen = basis_[col];
      long p1idx = gen / (k_ - 1), j = gen % (k_ - 1);
      auto [c, d] = p1_.rep(p1idx);
      SymPoly P = sym_monomial(k_, j);
      P.c[j] = ((k_ - 2 - j) % 2 == 0) ? 1 : -1;
      auto v = manin_coords(P, Int(-c), Int(d));
      for (long i = 0; i < dim_; ++i) m.at(i, col) = v[i];
    }
    star_ = std::move(m);
  }
  os << "star\n";
  write_mat(os, *star_);
  os << "hecke " << hecke_.size() << "\n";
  for (const auto& [q, m] : hecke_) {
    os << q << "\n";
    write_mat(os, m);
  }
  std::string body = os.str();
  std::ostringstream out;
  out << "iwalab-space/1 " << std::hex << fnv1a(body) << "\n" << body;
  return out.str();
}

std::shared_ptr<const ModSymSpace> ModSymSpace::deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string magic, hash;
  is >> magic >> hash;
  if (magic != "iwalab-space/1") throw std::runtime_error("space cache: bad magic");
  std::string rest;
  {
    std::string line;
    std::getline(is, line);  // end of header line
    std::ostringstream os;
    os << is.rdbuf();
    rest = os.str();
  }
  std::ostringstream chk;
  chk << std::hex << fnv1a(rest);
  if (chk.str() != hash) throw std::runtime_error("space cache: checksum mismatch");

  std::istringstream body(rest);
  long N, k, dim;
  body >> N >> k >> dim;
  auto s = std::shared_ptr<ModSymSpace>(new ModSymSpace(N, k));
  s->dim_ = dim;
  s->basis_.resize(dim);
  for (long b = 0; b < dim; ++b) body >> s->basis_[b];
  s->expr_.assign(s->ngens(), std::vector<Rat>(dim, Rat(0)));
  for (long g = 0; g < s->ngens(); ++g)
    for (long b = 0; b < dim; ++b) {
      std::string t;
      body >> t;
      s->expr_[g][b] = Rat(t);
    }
  std::string tag;
  body >> tag;
  if (tag != "cusps") throw std::runtime_error("space cache: expected cusps");
  size_t nc;
  body >> nc;
  s->cusp_reps_.clear();
  for (size_t i = 0; i < nc; ++i) {
    std::string a, b;
    body >> a >> b;
    s->cusp_reps_.emplace_back(Int(a), Int(b));
  }
  body >> tag;
  if (tag != "boundary") throw std::runtime_error("space cache: expected boundary");
  s->boundary_ = read_mat(body);
  body >> tag;
  if (tag != "star") throw std::runtime_error("space cache: expected star");
  s->star_ = read_mat(body);
  body >> tag;
  if (tag != "hecke") throw std::runtime_error("space cache: expected hecke");
  size_t nh;
  body >> nh;
  for (size_t i = 0; i < nh; ++i) {
    long q;
    body >> q;
    s->hecke_.emplace(q, read_mat(body));
  }
  return s;
}

}  // namespace iwalab

namespace iwalab::cache {

namespace {

std::string g_dir;
std::map<std::pair<long, long>, std::shared_ptr<const ModSymSpace>> g_mem;
std::mutex g_mu;

std::string path_for(long N, long k) {
  std::ostringstream os;
  os << g_dir << "/space_N" << N << "_k" << k << ".txt";
  return os.str();
}

}  // namespace

void set_dir(const std::string& dir) {
  std::lock_guard<std::mutex> lock(g_mu);
  g_dir = dir;
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

const std::string& dir() {
  return g_dir;
}

std::shared_ptr<const ModSymSpace> space(long N, long k) {
  {
    std::lock_guard<std::mutex> lock(g_mu);
    auto it = g_mem.find({N, k});
    if (it != g_mem.end()) return it->second;
    if (!g_dir.empty()) {
      std::ifstream f(path_for(N, k));
      if (f) {
        std::ostringstream os;
        os << f.rdbuf();
        try {
          auto s = ModSymSpace::deserialize(os.str());
          g_mem[{N, k}] = s;
          return s;
        } catch (const std::exception&) {
          // corrupted cache: fall through and rebuild
        }
      }
    }
  }
  auto s = ModSymSpace::build(N, k);
  std::lock_guard<std::mutex> lock(g_mu);
  g_mem[{N, k}] = s;
  return s;
}

void persist(const std::shared_ptr<const ModSymSpace>& s) {
  if (g_dir.empty()) return;
  std::ofstream f(path_for(s->N(), s->k()), std::ios::trunc);
  f << s->serialize();
}

void persist_all() {
  std::lock_guard<std::mutex> lock(g_mu);
  if (g_dir.empty()) return;
  for (auto& [key, s] : g_mem) {
    std::ofstream f(path_for(key.first, key.second), std::ios::trunc);
    f << s->serialize();
  }
}

void clear_memory() {
  std::lock_guard<std::mutex> lock(g_mu);
  g_mem.clear();
}

std::vector<std::pair<long, long>> memory_keys() {
  std::lock_guard<std::mutex> lock(g_mu);
  std::vector<std::pair<long, long>> out;
  for (auto& [key, _] : g_mem) out.push_back(key);
  return out;
}

}  // namespace iwalab::cache
