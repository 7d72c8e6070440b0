#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nehari/bubbles.hpp"
#include "nehari/constants.hpp"
#include "nehari/energy.hpp"
#include "nehari/fibering.hpp"
#include "nehari/field.hpp"
#include "nehari/grid.hpp"
#include "nehari/params.hpp"
#include "nehari/solver.hpp"

namespace nehari {

using Json = nlohmann::ordered_json;

/// Lowercase hex SHA-256 digest.
[[nodiscard]] std::string sha256_hex(std::string_view bytes);

/// Shortest round-trip decimal form of x ('.' decimal point).
[[nodiscard]] std::string format_double(double x);

/// Raw little-endian f64 bytes of a field, and of u followed by v.
[[nodiscard]] std::string field_bytes(const Field& f);
[[nodiscard]] std::string field_bytes(const FieldPair& pair);

[[nodiscard]] Json to_json(const ModelParams& prm);
[[nodiscard]] Json to_json(const GridSpec& spec);
[[nodiscard]] Json domain_json(const GridDomain& dom, const ModelParams& prm);
/// Hash of the domain description (lattice and kernel exponent).
[[nodiscard]] std::string domain_hash(const GridDomain& dom, const ModelParams& prm);

[[nodiscard]] Json to_json(const EnergyBreakdown& e);
[[nodiscard]] Json to_json(const ReducedTriple& t);
[[nodiscard]] Json to_json(const FiberingReport& r);
[[nodiscard]] Json to_json(const ConstantsReport& r);
[[nodiscard]] Json to_json(const HypothesesFlags& f);
[[nodiscard]] Json to_json(const SolutionReport& r);
[[nodiscard]] Json to_json(const TwoSolutions& r);
[[nodiscard]] Json to_json(const DecayReport& r);
[[nodiscard]] Json to_json(const NormScan& r);
[[nodiscard]] Json to_json(const SupScan& r);
[[nodiscard]] Json to_json(const std::vector<Check>& checks);

/// Writes text exactly (binary mode, LF line endings preserved).
void write_text(const std::filesystem::path& path, std::string_view text);
[[nodiscard]] std::string read_text(const std::filesystem::path& path);

/// Writes <base>.json (sidecar) and <base>.f64 (raw little-endian values).
void write_field(const std::filesystem::path& base, const GridDomain& dom, const ModelParams& prm, const Field& f);
/// Loads a field through its sidecar; throws InputError on a domain-hash or size mismatch.
[[nodiscard]] Field read_field(const std::filesystem::path& sidecar, const GridDomain& dom, const ModelParams& prm);

/// Minimal CSV builder: ',' separator, LF endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& cells);
  [[nodiscard]] const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace nehari
