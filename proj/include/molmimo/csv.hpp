#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "molmimo/fit.hpp"
#include "molmimo/harness.hpp"
#include "molmimo/particle.hpp"

namespace molmimo {

/// Ordered `# key=value` header lines written ahead of every CSV table.
class Metadata {
 public:
  Metadata& set(const std::string& key, const std::string& value);
  Metadata& set(const std::string& key, double value);
  Metadata& set(const std::string& key, std::int64_t value);
  Metadata& set(const std::string& key, std::uint64_t value);
  Metadata& set(const std::string& key, int value) { return set(key, static_cast<std::int64_t>(value)); }

  const std::string* find(const std::string& key) const;
  double number(const std::string& key) const;  // throws if absent or malformed
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  void write(std::ostream& os) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Tool banner, receiver model note and the geometry fields.
Metadata base_metadata(const std::string& kind);
void add_geometry(Metadata& md, const Geometry& g);
Geometry geometry_from(const Metadata& md);

/// Fixed-precision formatting helpers shared by all writers.
std::string format_sig(double v, int digits);

/// `rx,tx,lag,prob`, probabilities at 12 significant digits.
void write_taps_csv(std::ostream& os, const TapSet& taps, const Metadata& md);
TapSet read_taps_csv(std::istream& is);

/// `absorber,bin,count` with 1-based absorbers and 0-based bins. The header
/// records bin_width and released, which the reader needs.
void write_histogram_csv(std::ostream& os, const HitHistogram& hist, Metadata md);
std::pair<HitHistogram, Metadata> read_histogram_csv(std::istream& is);

/// `d,a,r,D,b1,b2,b3,b4,b5,b6`, one row per scenario.
void write_fit_table_csv(std::ostream& os, std::span<const FitTableEntry> rows, const Metadata& md);
std::vector<FitTableEntry> read_fit_table_csv(std::istream& is);

/// `scheme,detector,N,a,D,Ts,L,bits,errors,ber,ci_low,ci_high,seed`, floats at
/// 6 significant digits. Wall-clock time is not part of the file.
void write_ber_csv(std::ostream& os, std::span<const BerRecord> records, const Metadata& md);

}  // namespace molmimo
