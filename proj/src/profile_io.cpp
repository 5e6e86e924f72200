#include "mcflab/profile_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "mcflab/error.hpp"

namespace mcf {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

const char* geometry_name(Geometry g) {
  switch (g) {
    case Geometry::interval: return "interval";
    case Geometry::slab2d: return "slab2d";
    case Geometry::radial: return "radial";
  }
  return "interval";
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr == first)
    fail(ErrorCode::io_error, "profile table: bad number '" + s + "'");
  return v;
}

// Recovers a uniform grid from a sorted list of distinct coordinates.
Grid1D grid_from_nodes(const std::vector<double>& xs) {
  if (xs.size() < 9) fail(ErrorCode::io_error, "profile table: too few nodes");
  const Grid1D g(xs.front(), xs.back(), static_cast<int>(xs.size()) - 1);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(g.node(static_cast<int>(i)) - xs[i]) > 1e-9 * (1.0 + std::abs(xs[i])))
      fail(ErrorCode::io_error, "profile table: nodes are not uniform");
  return g;
}

}  // namespace

void write_table(std::ostream& os, const Field& f,
                 const std::map<std::string, std::string>& header) {
  auto h = header;
  h["geometry"] = geometry_name(f.geometry());
  if (f.geometry() == Geometry::radial && !h.count("n"))
    h["n"] = std::to_string(f.radial_dim());
  os << "#";
  // kind first, then the documented keys, then the rest.
  const char* ordered[] = {"kind", "n", "b", "theta", "residual_sup"};
  for (const char* key : ordered)
    if (auto it = h.find(key); it != h.end()) os << ' ' << key << '=' << it->second;
  for (const auto& [k, v] : h) {
    bool seen = false;
    for (const char* key : ordered) seen = seen || k == key;
    if (!seen) os << ' ' << k << '=' << v;
  }
  os << '\n';
  if (f.dims() == 1) {
    for (int i = 0; i < f.n_nodes(0); ++i)
      os << format_double(f.grid(0).node(i)) << ',' << format_double(f(i)) << '\n';
  } else {
    for (int i = 0; i < f.n_nodes(0); ++i)
      for (int j = 0; j < f.n_nodes(1); ++j)
        os << format_double(f.grid(0).node(i)) << ','
           << format_double(f.grid(1).node(j)) << ',' << format_double(f(i, j))
           << '\n';
  }
}

FieldTable read_table(std::istream& is) {
  std::map<std::string, std::string> header;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string tok;
      while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) header[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      continue;
    }
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = line.find(',', pos);
      row.push_back(parse_double(line.substr(pos, comma - pos)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorCode::io_error, "profile table: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::io_error, "profile table: no data rows");
  const std::string geom = header.count("geometry") ? header["geometry"]
                           : rows.front().size() == 3 ? "slab2d"
                                                      : "interval";
  if (rows.front().size() == 2) {
    std::vector<double> xs, us;
    for (const auto& r : rows) {
      xs.push_back(r[0]);
      us.push_back(r[1]);
    }
    const Grid1D g = grid_from_nodes(xs);
    if (geom == "radial") {
      const int n = header.count("n") ? std::stoi(header["n"]) : 2;
      return {Field::radial(Grid1D(0.0, g.hi(), g.n_cells()), n, std::move(us)),
              header};
    }
    return {Field::interval(g, std::move(us)), header};
  }
  if (rows.front().size() != 3)
    fail(ErrorCode::io_error, "profile table: expected 2 or 3 columns");
  std::vector<double> x1s, x2s;
  for (const auto& r : rows) {
    if (x1s.empty() || r[0] != x1s.back()) x1s.push_back(r[0]);
    if (x1s.size() == 1) x2s.push_back(r[1]);
  }
  if (x1s.size() * x2s.size() != rows.size())
    fail(ErrorCode::io_error, "profile table: slab rows do not form a grid");
  std::vector<double> us;
  us.reserve(rows.size());
  for (const auto& r : rows) us.push_back(r[2]);
  return {Field::slab(grid_from_nodes(x1s), grid_from_nodes(x2s), std::move(us)),
          header};
}

void save_table(const std::string& path, const Field& f,
                const std::map<std::string, std::string>& header) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::io_error, "cannot write " + path);
  write_table(os, f, header);
  if (!os) fail(ErrorCode::io_error, "write failed for " + path);
}

FieldTable load_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::io_error, "cannot read " + path);
  return read_table(is);
}

void save_profile(const std::string& path, const TranslatorProfile& p) {
  require(p.table() != nullptr, "save_profile: closed-form profile has no table");
  std::map<std::string, std::string> h;
  h["kind"] = p.kind() == ProfileKind::bowl ? "bowl" : p.label();
  h["n"] = std::to_string(p.n());
  h["b"] = format_double(p.b().value_or(0.0));
  h["theta"] = format_double(p.theta());
  h["residual_sup"] = format_double(p.residual_sup());
  save_table(path, *p.table(), h);
}

TranslatorProfile load_profile(const std::string& path) {
  FieldTable t = load_table(path);
  auto get = [&](const char* key, double dflt) {
    auto it = t.header.find(key);
    return it == t.header.end() ? dflt : parse_double(it->second);
  };
  if (!t.header.count("residual_sup"))
    fail(ErrorCode::io_error, path + ": tabulated profile lacks residual_sup");
  const std::string kind = t.header.count("kind") ? t.header["kind"] : "tabulated";
  const double res = get("residual_sup", 0.0);
  if (kind == "bowl") {
    const int n = static_cast<int>(get("n", 2));
    return TranslatorProfile::bowl_table(n, std::move(t.field), res);
  }
  return TranslatorProfile::tabulated(kind, std::move(t.field), res,
                                      static_cast<int>(get("n", 0)),
                                      get("b", 0.0), get("theta", 0.0));
}

}  // namespace mcf
