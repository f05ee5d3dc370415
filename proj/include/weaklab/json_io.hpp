#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "weaklab/classical.hpp"
#include "weaklab/instrument.hpp"

namespace weaklab {

using Json = nlohmann::json;

// Complex numbers serialize as [re, im]; operators as row-major nested
// arrays.
Json to_json(const Complex& z);
Json to_json(const Mat& m);
Json to_json(const RealMat& m);
Json to_json(const RealVec& v);
Json to_json(const Vec& v);

Complex complex_from_json(const Json& j);
Mat mat_from_json(const Json& j);
RealMat real_mat_from_json(const Json& j);
RealVec real_vec_from_json(const Json& j);
Vec vec_from_json(const Json& j);

Json to_json(const ClassicalInstrument& inst);
ClassicalInstrument classical_instrument_from_json(const Json& j);

/// Series data only; exact-mode instruments are declared by builder name.
Json to_json(const QuantumInstrument& inst);
QuantumInstrument quantum_instrument_from_json(const Json& j);

/// Deterministic rendering: object keys sorted (nlohmann maps are ordered),
/// floating-point values at 17 significant digits, "\n" line ends.
std::string stable_json(const Json& j, int indent = 2);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string render_csv(const CsvTable& table);

}  // namespace weaklab
