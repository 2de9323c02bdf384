#include "lomac/snapshot.hpp"

#include "lomac/errors.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lomac {

namespace {

constexpr std::array<char, 8> kMagic{'L', 'O', 'M', 'A', 'C', 'S', 'N', 'P'};

std::uint64_t to_little(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(x);
  return x;
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u64(std::uint64_t x) {
    x = to_little(x);
    out_.write(reinterpret_cast<const char*>(&x), sizeof x);
  }
  void i64(std::int64_t x) { u64(static_cast<std::uint64_t>(x)); }
  void f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }
  void block(const Matrix& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) f64(m.data()[i]);
  }
  void block(const Vector& v) { block(Matrix(v)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint64_t u64() {
    std::uint64_t x = 0;
    in_.read(reinterpret_cast<char*>(&x), sizeof x);
    if (in_.gcount() != sizeof x) throw IoError("snapshot truncated");
    return to_little(x);
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  Matrix block() {
    const std::uint64_t rows = u64();
    const std::uint64_t cols = u64();
    if (rows > (1ull << 32) || cols > (1ull << 32)) throw IoError("snapshot block size is corrupt");
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = f64();
    return m;
  }
  Vector vector() {
    const Matrix m = block();
    if (m.cols() != 1 && m.size() != 0) throw IoError("snapshot: expected a column block");
    return m.size() == 0 ? Vector() : Vector(m.col(0));
  }

 private:
  std::istream& in_;
};

void write_macro(Writer& w, const MacroState& u) {
  w.i64(u.dims);
  w.block(u.rho);
  w.block(u.j1);
  w.block(u.j2);
  w.block(u.e);
}

MacroState read_macro(Reader& r) {
  MacroState u;
  u.dims = static_cast<int>(r.i64());
  u.rho = r.vector();
  u.j1 = r.vector();
  u.j2 = r.vector();
  u.e = r.vector();
  return u;
}

}  // namespace

void snapshot_write(const Snapshot& snap, std::ostream& out) {
  const SolverConfig& c = snap.config;
  out.write(kMagic.data(), kMagic.size());
  Writer w(out);
  w.u64(kSnapshotVersion);
  w.i64(c.dims);
  w.i64(static_cast<std::int64_t>(c.preset));
  w.i64(static_cast<std::int64_t>(c.variant));
  w.u64(c.nx);
  w.u64(c.nv);
  w.f64(c.v_max);
  w.f64(c.beta);
  w.f64(c.eps);
  w.i64(c.trunc_mode == TruncationMode::absolute ? 0 : 1);
  w.f64(c.cfl);
  w.f64(c.t_end);
  w.f64(c.dt);
  w.i64(c.poisson_sign);
  w.u64(c.rank_cap);
  w.f64(c.params.alpha);
  w.f64(c.params.k);
  w.f64(c.params.v0);
  w.u64(c.output_every);
  w.u64(c.snapshot_every);
  w.u64(snap.history.step);
  w.u64(snap.history.levels.size());
  for (const Level& level : snap.history.levels) {
    w.f64(level.t);
    if (c.dims == 1) {
      w.block(level.f.coef);
      w.block(level.f.x);
      w.block(level.f.v);
      w.u64(level.f.canonical ? 1 : 0);
    } else {
      w.block(level.g.u12);
      w.block(level.g.root);
      w.block(level.g.b34);
      w.block(level.g.u3);
      w.block(level.g.u4);
      w.u64(level.g.canonical ? 1 : 0);
    }
    write_macro(w, level.macro);
  }
}

void snapshot_write(const Snapshot& snap, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  snapshot_write(snap, out);
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Snapshot snapshot_read(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size())) throw IoError("snapshot truncated");
  if (magic != kMagic) throw IoError("not a snapshot file (bad magic)");
  Reader r(in);
  const std::uint64_t version = r.u64();
  if (version != kSnapshotVersion)
    throw IoError("snapshot version " + std::to_string(version) + " is not supported (expected " +
                  std::to_string(kSnapshotVersion) + ")");
  Snapshot snap;
  SolverConfig& c = snap.config;
  c.dims = static_cast<int>(r.i64());
  c.preset = static_cast<Preset>(r.i64());
  c.variant = static_cast<Variant>(r.i64());
  c.nx = r.u64();
  c.nv = r.u64();
  c.v_max = r.f64();
  c.beta = r.f64();
  c.eps = r.f64();
  c.trunc_mode = r.i64() == 0 ? TruncationMode::absolute : TruncationMode::relative;
  c.cfl = r.f64();
  c.t_end = r.f64();
  c.dt = r.f64();
  c.poisson_sign = static_cast<int>(r.i64());
  c.rank_cap = r.u64();
  c.params.alpha = r.f64();
  c.params.k = r.f64();
  c.params.v0 = r.f64();
  c.output_every = r.u64();
  c.snapshot_every = r.u64();
  if (c.dims != 1 && c.dims != 2) throw IoError("snapshot: corrupt dimensionality");
  snap.history.step = r.u64();
  const std::uint64_t n_levels = r.u64();
  if (n_levels < 1 || n_levels > 3) throw IoError("snapshot: corrupt level count");
  for (std::uint64_t l = 0; l < n_levels; ++l) {
    Level level;
    level.t = r.f64();
    if (c.dims == 1) {
      level.f.coef = r.vector();
      level.f.x = r.block();
      level.f.v = r.block();
      level.f.canonical = r.u64() != 0;
    } else {
      level.g.u12 = r.block();
      level.g.root = r.block();
      level.g.b34 = r.block();
      level.g.u3 = r.block();
      level.g.u4 = r.block();
      level.g.canonical = r.u64() != 0;
    }
    level.macro = read_macro(r);
    snap.history.levels.push_back(std::move(level));
  }
  return snap;
}

Snapshot snapshot_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return snapshot_read(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

Snapshot snapshot_of(const Solver& solver) { return {solver.config(), solver.history()}; }

std::string snapshot_summary(const Snapshot& snap) {
  const SolverConfig& c = snap.config;
  std::ostringstream os;
  os << "snapshot version " << kSnapshotVersion << "\n"
     << "preset        " << preset_name(c.preset) << " (" << c.dims << "D" << c.dims << "V)\n"
     << "variant       " << variant_name(c.variant) << "\n"
     << "grid          nx=" << c.nx << " nv=" << c.nv << " v_max=" << c.v_max << "\n"
     << "weight beta   " << c.beta << "\n"
     << "eps           " << c.eps << "\n"
     << "step          " << snap.history.step << "\n";
  for (std::size_t l = 0; l < snap.history.levels.size(); ++l) {
    const Level& level = snap.history.levels[l];
    os << "level n-" << l << "       t=" << level.t << " ranks=";
    if (c.dims == 1) {
      os << level.f.rank();
    } else {
      const auto r = level.g.ranks();
      os << "{" << r[0] << "," << r[1] << "," << r[2] << "," << r[3] << "}";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace lomac
