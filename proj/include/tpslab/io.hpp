#pragma once

// JSON encodings of the lab's values and CSV emission of numeric tables.
//
//   matrix  {"rows", "cols", "entries": [[re, im], ...]}   row-major
//   state   {"dim", "amplitudes": [[re, im], ...]}
//   tps     {"dims": [...], "T": matrix}
//   label   {"coefficients": [[re, im], ...]}
//   sumset  {"locals": [[...], ...], "offset_convention": "first-absorbs"}

#include "construction.hpp"
#include "klocal.hpp"
#include "labeling.hpp"
#include "linalg.hpp"
#include "spectra.hpp"
#include "tps.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpslab {

using Json = nlohmann::json;

/// Malformed input document; `path` names the offending field.
class FormatError : public std::invalid_argument {
 public:
  FormatError(const std::string& path, const std::string& what)
      : std::invalid_argument(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

namespace io {

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(path + "." + key, "missing field");
  return j.at(key);
}

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw FormatError(path, "expected [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<double> reals_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw FormatError(path + "[" + std::to_string(i) + "]", "not a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

}  // namespace io

inline Json to_json(const ComplexMatrix& m) {
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(io::complex_to_json(m(i, j)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline ComplexMatrix matrix_from_json(const Json& j, const std::string& path = "matrix") {
  const auto rows = io::field(j, "rows", path).get<long long>();
  const auto cols = io::field(j, "cols", path).get<long long>();
  const Json& entries = io::field(j, "entries", path);
  if (rows < 1 || cols < 1) throw FormatError(path, "rows and cols must be positive");
  if (!entries.is_array() || static_cast<long long>(entries.size()) != rows * cols) {
    throw FormatError(path + ".entries", "expected rows*cols = " + std::to_string(rows * cols) +
                                             " entries");
  }
  ComplexMatrix m(rows, cols);
  for (long long i = 0; i < rows; ++i)
    for (long long c = 0; c < cols; ++c) {
      const auto idx = static_cast<std::size_t>(i * cols + c);
      m(i, c) = io::complex_from_json(entries[idx], path + ".entries[" + std::to_string(idx) + "]");
    }
  if (!all_finite(m)) throw FormatError(path, "non-finite entry");
  return m;
}

inline Json to_json(const StateVector& psi) {
  Json amps = Json::array();
  for (Eigen::Index i = 0; i < psi.dim(); ++i) amps.push_back(io::complex_to_json(psi[i]));
  return {{"dim", psi.dim()}, {"amplitudes", std::move(amps)}};
}

inline StateVector state_from_json(const Json& j, const std::string& path = "state") {
  const auto dim = io::field(j, "dim", path).get<long long>();
  const Json& amps = io::field(j, "amplitudes", path);
  if (!amps.is_array() || static_cast<long long>(amps.size()) != dim) {
    throw FormatError(path + ".amplitudes", "expected " + std::to_string(dim) + " amplitudes");
  }
  ComplexVector v(dim);
  for (long long i = 0; i < dim; ++i) {
    v(i) = io::complex_from_json(amps[static_cast<std::size_t>(i)],
                                 path + ".amplitudes[" + std::to_string(i) + "]");
  }
  try {
    return StateVector(std::move(v));
  } catch (const std::invalid_argument& e) {
    throw FormatError(path, e.what());
  }
}

inline HermitianOperator hermitian_from_json(const Json& j, const std::string& path = "hamiltonian") {
  try {
    return HermitianOperator(matrix_from_json(j, path));
  } catch (const FormatError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw FormatError(path, e.what());
  }
}

inline Json to_json(const TpsShape& shape) { return shape.dims(); }

inline TpsShape shape_from_json(const Json& j, const std::string& path = "dims") {
  if (!j.is_array() || j.empty()) throw FormatError(path, "expected a non-empty array of dims");
  std::vector<int> dims;
  for (const auto& d : j) {
    if (!d.is_number_integer()) throw FormatError(path, "dims must be integers");
    dims.push_back(d.get<int>());
  }
  try {
    return TpsShape(std::move(dims));
  } catch (const std::invalid_argument& e) {
    throw FormatError(path, e.what());
  }
}

inline Json to_json(const Tps& tps) {
  return {{"dims", to_json(tps.shape())}, {"T", to_json(tps.matrix())}};
}

inline Tps tps_from_json(const Json& j, const std::string& path = "tps") {
  TpsShape shape = shape_from_json(io::field(j, "dims", path), path + ".dims");
  try {
    return Tps(std::move(shape), matrix_from_json(io::field(j, "T", path), path + ".T"));
  } catch (const FormatError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw FormatError(path, e.what());
  }
}

inline Json to_json(const EquivalenceVerdict& v) {
  Json locals = Json::array();
  for (const auto& u : v.local_unitaries) locals.push_back(to_json(u));
  return {{"equivalent", v.equivalent},
          {"permutation", v.permutation},
          {"local_unitaries", std::move(locals)},
          {"residual", v.residual},
          {"schmidt_ratio", v.schmidt_ratio}};
}

inline Json to_json(const LabelPolynomial& r) {
  Json c = Json::array();
  for (const auto& a : r.coefficients()) c.push_back(io::complex_to_json(a));
  return {{"coefficients", std::move(c)}};
}

inline LabelPolynomial label_from_json(const Json& j, const std::string& path = "label") {
  const Json& c = io::field(j, "coefficients", path);
  if (!c.is_array() || c.empty()) throw FormatError(path + ".coefficients", "expected an array");
  std::vector<Complex> coeffs;
  for (std::size_t i = 0; i < c.size(); ++i) {
    coeffs.push_back(io::complex_from_json(c[i], path + ".coefficients[" + std::to_string(i) + "]"));
  }
  return LabelPolynomial(std::move(coeffs));
}

inline Json to_json(const SumsetDecomposition& d) {
  return {{"locals", d.local_spectra}, {"offset_convention", SumsetDecomposition::kOffsetConvention}};
}

inline SumsetDecomposition sumset_from_json(const Json& j, const std::string& path = "sumset") {
  const Json& locals = io::field(j, "locals", path);
  if (!locals.is_array()) throw FormatError(path + ".locals", "expected an array of arrays");
  SumsetDecomposition d;
  for (std::size_t k = 0; k < locals.size(); ++k) {
    d.local_spectra.push_back(io::reals_from_json(locals[k], path + ".locals[" + std::to_string(k) + "]"));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Numeric tables: JSON for structure, CSV for plotting.

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string to_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    os << (c ? "," : "") << table.columns[c];
  }
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ",";
      const Json& v = row[c];
      if (v.is_number_float()) {
        os << format_number(v.get<double>());
      } else if (v.is_boolean()) {
        os << (v.get<bool>() ? 1 : 0);
      } else if (v.is_string()) {
        os << v.get<std::string>();
      } else {
        os << v.dump();
      }
    }
    os << "\n";
  }
  return os.str();
}

inline Json to_json(const Table& t) { return {{"columns", t.columns}, {"rows", t.rows}}; }

inline Table table_from_json(const Json& j, const std::string& path = "table") {
  Table t;
  t.columns = io::field(j, "columns", path).get<std::vector<std::string>>();
  for (const auto& row : io::field(j, "rows", path)) {
    t.rows.emplace_back(row.begin(), row.end());
  }
  return t;
}

/// time, subsystem, comoving_entropy, fixed_entropy
inline Table entropy_table(const TrilemmaReport& rep) {
  Table t{{"time", "subsystem", "comoving_entropy", "fixed_entropy"}, {}};
  for (std::size_t i = 0; i < rep.time_grid.size(); ++i)
    for (std::size_t k = 0; k < rep.entropies_comoving[i].size(); ++k)
      t.rows.push_back({rep.time_grid[i], k, rep.entropies_comoving[i][k], rep.entropies_fixed[i][k]});
  return t;
}

inline Json to_json(const TrilemmaReport& rep) {
  Json pairs = Json::array();
  for (const auto& p : rep.tps_equivalence) {
    pairs.push_back({{"first", p.first}, {"second", p.second}, {"equivalent", p.equivalent},
                     {"residual", p.residual}});
  }
  Json out = {{"time_grid", rep.time_grid},
              {"tps_equivalence", std::move(pairs)},
              {"covariance_residuals", rep.covariance_residuals},
              {"entropies_comoving", rep.entropies_comoving},
              {"entropies_fixed", rep.entropies_fixed}};
  if (rep.locking) {
    out["locking"] = {{"verdict", to_json(rep.locking->verdict)},
                      {"input_entropies_first", rep.locking->input_entropies_first},
                      {"input_entropies_second", rep.locking->input_entropies_second},
                      {"cross_entropies", rep.locking->cross_entropies},
                      {"moduli_match", rep.locking->moduli_match}};
  }
  return out;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(path, std::string("invalid JSON: ") + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace tpslab
