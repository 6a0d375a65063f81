#include "molmimo/csv.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace molmimo {

std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Metadata& Metadata::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return *this;
    }
  entries_.emplace_back(key, value);
  return *this;
}

Metadata& Metadata::set(const std::string& key, double value) { return set(key, format_sig(value, 12)); }
Metadata& Metadata::set(const std::string& key, std::int64_t value) { return set(key, std::to_string(value)); }
Metadata& Metadata::set(const std::string& key, std::uint64_t value) { return set(key, std::to_string(value)); }

const std::string* Metadata::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

double Metadata::number(const std::string& key) const {
  const auto* v = find(key);
  if (!v) throw std::runtime_error("metadata: missing key '" + key + "'");
  try {
    std::size_t used = 0;
    const double x = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument(key);
    return x;
  } catch (const std::logic_error&) {
    throw std::runtime_error("metadata: key '" + key + "' is not a number");
  }
}

void Metadata::write(std::ostream& os) const {
  for (const auto& [k, v] : entries_) os << "# " << k << '=' << v << '\n';
}

Metadata base_metadata(const std::string& kind) {
  Metadata md;
  md.set("tool", std::string("molmimo ") + MOLMIMO_VERSION);
  md.set("kind", kind);
  md.set("receivers", std::string("free-standing absorbing spheres (no reflecting body)"));
  return md;
}

void add_geometry(Metadata& md, const Geometry& g) {
  md.set("d", g.d).set("a", g.a).set("r", g.r).set("D", g.D).set("Ts", g.Ts).set("L", g.L);
}

Geometry geometry_from(const Metadata& md) {
  Geometry g;
  g.d = md.number("d");
  g.a = md.number("a");
  g.r = md.number("r");
  g.D = md.number("D");
  g.Ts = md.number("Ts");
  g.L = static_cast<int>(md.number("L"));
  return g;
}

namespace {

// Splits the stream into metadata (from `# key=value` lines) and data rows;
// the first non-comment line is the column header.
struct Table {
  Metadata md;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table read_table(std::istream& is, const std::vector<std::string>& expected_header) {
  Table t;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::size_t start = 1;
      while (start < eq && line[start] == ' ') ++start;
      t.md.set(line.substr(start, eq - start), line.substr(eq + 1));
      continue;
    }
    if (t.header.empty()) {
      t.header = split(line);
      if (t.header != expected_header) throw std::runtime_error("csv: unexpected header '" + line + "'");
      continue;
    }
    auto cells = split(line);
    if (cells.size() != t.header.size()) throw std::runtime_error("csv: wrong column count in '" + line + "'");
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw std::runtime_error("csv: missing header");
  return t;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw std::runtime_error("csv: '" + s + "' is not a number");
  }
}

long long to_int(const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw std::runtime_error("csv: '" + s + "' is not an integer");
  }
}

}  // namespace

void write_taps_csv(std::ostream& os, const TapSet& taps, const Metadata& md) {
  md.write(os);
  os << "rx,tx,lag,prob\n";
  for (int j = 1; j <= taps.n_rx(); ++j)
    for (int i = 1; i <= taps.n_tx(); ++i)
      for (int l = 0; l <= taps.L(); ++l) os << j << ',' << i << ',' << l << ',' << format_sig(taps.at(j, i, l), 12) << '\n';
}

TapSet read_taps_csv(std::istream& is) {
  const Table t = read_table(is, {"rx", "tx", "lag", "prob"});
  int n_rx = 0, n_tx = 0, L = -1;
  for (const auto& row : t.rows) {
    n_rx = std::max(n_rx, static_cast<int>(to_int(row[0])));
    n_tx = std::max(n_tx, static_cast<int>(to_int(row[1])));
    L = std::max(L, static_cast<int>(to_int(row[2])));
  }
  if (t.rows.size() != static_cast<std::size_t>(n_rx * n_tx * (L + 1)))
    throw std::runtime_error("csv: tap table is incomplete");
  TapSet taps(n_rx, n_tx, L);
  for (const auto& row : t.rows)
    taps.at(static_cast<int>(to_int(row[0])), static_cast<int>(to_int(row[1])), static_cast<int>(to_int(row[2]))) =
        to_double(row[3]);
  taps.validate();
  return taps;
}

void write_histogram_csv(std::ostream& os, const HitHistogram& hist, Metadata md) {
  md.set("bin_width", hist.bin_width).set("released", hist.released);
  md.write(os);
  os << "absorber,bin,count\n";
  for (std::size_t k = 0; k < hist.n_absorbers(); ++k)
    for (std::size_t b = 0; b < hist.n_bins(); ++b) os << k + 1 << ',' << b << ',' << hist.counts[k][b] << '\n';
}

std::pair<HitHistogram, Metadata> read_histogram_csv(std::istream& is) {
  Table t = read_table(is, {"absorber", "bin", "count"});
  HitHistogram h;
  h.bin_width = t.md.number("bin_width");
  h.released = static_cast<std::uint64_t>(t.md.number("released"));
  std::size_t n_abs = 0, n_bins = 0;
  for (const auto& row : t.rows) {
    const auto k = to_int(row[0]), b = to_int(row[1]);
    if (k < 1 || b < 0) throw std::runtime_error("csv: bad histogram index");
    n_abs = std::max(n_abs, static_cast<std::size_t>(k));
    n_bins = std::max(n_bins, static_cast<std::size_t>(b) + 1);
  }
  h.counts.assign(n_abs, std::vector<std::uint64_t>(n_bins, 0));
  for (const auto& row : t.rows) {
    const auto c = to_int(row[2]);
    if (c < 0) throw std::runtime_error("csv: negative histogram count");
    h.counts[static_cast<std::size_t>(to_int(row[0]) - 1)][static_cast<std::size_t>(to_int(row[1]))] =
        static_cast<std::uint64_t>(c);
  }
  if (h.total() > h.released) throw std::runtime_error("csv: more hits than released molecules");
  return {std::move(h), std::move(t.md)};
}

void write_fit_table_csv(std::ostream& os, std::span<const FitTableEntry> rows, const Metadata& md) {
  md.write(os);
  os << "d,a,r,D,b1,b2,b3,b4,b5,b6\n";
  for (const auto& e : rows) {
    const auto& g = e.geometry;
    const auto& p = e.params;
    os << format_sig(g.d, 12) << ',' << format_sig(g.a, 12) << ',' << format_sig(g.r, 12) << ','
       << format_sig(g.D, 12);
    for (double b : {p.b1, p.b2, p.b3, p.b4, p.b5, p.b6}) os << ',' << format_sig(b, 12);
    os << '\n';
  }
}

std::vector<FitTableEntry> read_fit_table_csv(std::istream& is) {
  const Table t = read_table(is, {"d", "a", "r", "D", "b1", "b2", "b3", "b4", "b5", "b6"});
  std::vector<FitTableEntry> out;
  for (const auto& row : t.rows) {
    FitTableEntry e;
    e.geometry.d = to_double(row[0]);
    e.geometry.a = to_double(row[1]);
    e.geometry.r = to_double(row[2]);
    e.geometry.D = to_double(row[3]);
    e.params = {to_double(row[4]), to_double(row[5]), to_double(row[6]),
                to_double(row[7]), to_double(row[8]), to_double(row[9])};
    e.params.validate();
    out.push_back(e);
  }
  return out;
}

void write_ber_csv(std::ostream& os, std::span<const BerRecord> records, const Metadata& md) {
  md.write(os);
  os << "scheme,detector,N,a,D,Ts,L,bits,errors,ber,ci_low,ci_high,seed\n";
  for (const auto& rec : records) {
    const auto& c = rec.config;
    os << to_string(c.scheme) << ',' << to_string(c.detector) << ',' << c.N << ',' << format_sig(c.geometry.a, 6)
       << ',' << format_sig(c.geometry.D, 6) << ',' << format_sig(c.geometry.Ts, 6) << ',' << c.geometry.L << ','
       << rec.bits << ',' << rec.errors << ',' << format_sig(rec.ber, 6) << ',' << format_sig(rec.ci_low, 6) << ','
       << format_sig(rec.ci_high, 6) << ',' << c.seed << '\n';
  }
}

}  // namespace molmimo
