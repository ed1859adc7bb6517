#include "qpns/snapshot.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "qpns/errors.hpp"

namespace qpns {

namespace {

constexpr const char* kMagic = "qpns-snapshot";

void write_header(std::ostream& os, const char* kind, const GridSpec& g, const SnapshotMeta& meta) {
  os << "# " << kMagic << " kind=" << kind << " nu=" << g.nu << " d=" << g.d << " Kphi=" << g.Kphi
     << " Kx=" << g.Kx << " ncomp=" << g.ncomp << '\n';
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& s, int line_no) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigParse("snapshot line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

double parse_double(const std::string& s, int line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigParse("snapshot line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

struct Parsed {
  std::string kind;
  GridSpec grid;
  SnapshotMeta meta;
  struct Record {
    std::vector<int> l, j;
    int comp;
    Complex value;
  };
  std::vector<Record> records;
};

Parsed parse(std::istream& is) {
  Parsed p;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto toks = split_ws(line.substr(1));
      if (toks.empty()) continue;
      if (!have_header) {
        if (toks[0] != kMagic) throw ConfigParse("snapshot: missing '# qpns-snapshot' header");
        std::map<std::string, std::string> kv;
        for (std::size_t i = 1; i < toks.size(); ++i) {
          const auto eq = toks[i].find('=');
          if (eq == std::string::npos) throw ConfigParse("snapshot: malformed header token " + toks[i]);
          kv[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
        }
        try {
          p.kind = kv.at("kind");
          p.grid.nu = parse_int(kv.at("nu"), line_no);
          p.grid.d = parse_int(kv.at("d"), line_no);
          p.grid.Kphi = parse_int(kv.at("Kphi"), line_no);
          p.grid.Kx = parse_int(kv.at("Kx"), line_no);
          p.grid.ncomp = parse_int(kv.at("ncomp"), line_no);
        } catch (const std::out_of_range&) {
          throw ConfigParse("snapshot: header lacks a grid field");
        }
        try {
          p.grid.validate();
        } catch (const std::invalid_argument& e) {
          throw ConfigParse(std::string("snapshot: ") + e.what());
        }
        have_header = true;
      } else {
        const std::string rest = line.substr(line.find_first_not_of("# "));
        const auto eq = rest.find('=');
        if (eq != std::string::npos) p.meta[rest.substr(0, eq)] = rest.substr(eq + 1);
      }
      continue;
    }
    if (!have_header) throw ConfigParse("snapshot: record before header");
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    const int nl = p.kind == "spacetime" ? p.grid.nu : 0;
    const std::size_t expected = static_cast<std::size_t>(nl + p.grid.d + 3);
    if (toks.size() != expected) {
      throw ConfigParse("snapshot line " + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                        " columns");
    }
    Parsed::Record r;
    std::size_t t = 0;
    for (int i = 0; i < nl; ++i) r.l.push_back(parse_int(toks[t++], line_no));
    for (int i = 0; i < p.grid.d; ++i) r.j.push_back(parse_int(toks[t++], line_no));
    r.comp = parse_int(toks[t++], line_no);
    const double re = parse_double(toks[t++], line_no);
    const double im = parse_double(toks[t++], line_no);
    r.value = Complex(re, im);
    if (r.comp < 0 || r.comp >= p.grid.ncomp) {
      throw ConfigParse("snapshot line " + std::to_string(line_no) + ": component out of range");
    }
    p.records.push_back(std::move(r));
  }
  if (!have_header) throw ConfigParse("snapshot: empty input");
  return p;
}

void check_reality(double defect, double scale) {
  if (defect > 1e-12 * (1.0 + scale)) {
    throw SnapshotMismatch("snapshot: coefficients violate conjugate symmetry");
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

void write_snapshot(std::ostream& os, const SpaceTimeField& U, const SnapshotMeta& meta) {
  const GridSpec& g = U.grid();
  write_header(os, "spacetime", g, meta);
  std::vector<int> l(g.nu), j(g.d);
  for (std::size_t a = 0; a < U.angle_modes(); ++a) {
    U.angle_lattice().unravel(a, l);
    for (std::size_t m = 0; m < U.space_modes(); ++m) {
      U.space_lattice().unravel(m, j);
      for (int c = 0; c < g.ncomp; ++c) {
        const Complex z = U(c, U.mode_index(a, m));
        for (int v : l) os << v << ' ';
        for (int v : j) os << v << ' ';
        os << c << ' ' << format_double(z.real()) << ' ' << format_double(z.imag()) << '\n';
      }
    }
  }
}

void write_snapshot(std::ostream& os, const SpaceField& u, const SnapshotMeta& meta) {
  const GridSpec& g = u.grid();
  write_header(os, "space", g, meta);
  std::vector<int> j(g.d);
  for (std::size_t m = 0; m < u.num_modes(); ++m) {
    u.lattice().unravel(m, j);
    for (int c = 0; c < g.ncomp; ++c) {
      for (int v : j) os << v << ' ';
      os << c << ' ' << format_double(u(c, m).real()) << ' ' << format_double(u(c, m).imag()) << '\n';
    }
  }
}

SpaceTimeField read_spacetime_snapshot(std::istream& is, SnapshotMeta* meta, SnapshotReadOptions opts) {
  Parsed p = parse(is);
  if (p.kind != "spacetime") throw SnapshotMismatch("snapshot: expected kind=spacetime, got " + p.kind);
  SpaceTimeField U(p.grid);
  for (const auto& r : p.records) {
    if (!U.angle_lattice().contains(r.l) || !U.space_lattice().contains(r.j)) {
      throw SnapshotMismatch("snapshot: record outside the declared truncation");
    }
    if (opts.conjugate_implied) {
      U.set_pair(r.comp, r.l, r.j, r.value);
    } else {
      U.at(r.comp, r.l, r.j) = r.value;
    }
  }
  check_reality(U.reality_defect(), U.max_abs());
  if (meta) *meta = std::move(p.meta);
  return U;
}

SpaceField read_space_snapshot(std::istream& is, SnapshotMeta* meta, SnapshotReadOptions opts) {
  Parsed p = parse(is);
  if (p.kind != "space") throw SnapshotMismatch("snapshot: expected kind=space, got " + p.kind);
  SpaceField u(p.grid);
  for (const auto& r : p.records) {
    if (!u.lattice().contains(r.j)) throw SnapshotMismatch("snapshot: record outside the declared truncation");
    if (opts.conjugate_implied) {
      u.set_pair(r.comp, r.j, r.value);
    } else {
      u.at(r.comp, r.j) = r.value;
    }
  }
  check_reality(u.reality_defect(), u.max_abs());
  if (meta) *meta = std::move(p.meta);
  return u;
}

void save_snapshot(const std::filesystem::path& path, const SpaceTimeField& U, const SnapshotMeta& meta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_snapshot(os, U, meta);
  if (!os) throw IoError("failed writing " + path.string());
}

SpaceTimeField load_spacetime_snapshot(const std::filesystem::path& path, SnapshotMeta* meta,
                                       SnapshotReadOptions opts) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_spacetime_snapshot(is, meta, opts);
}

}  // namespace qpns
