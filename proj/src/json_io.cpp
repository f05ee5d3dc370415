#include "weaklab/json_io.hpp"

#include <cmath>
#include <cstdio>

namespace weaklab {

Json to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(to_json(m(i, j)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const RealMat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const RealVec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i));
  }
  return out;
}

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(to_json(v(i)));
  }
  return out;
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) {
    return Complex{j.get<double>(), 0.0};
  }
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number()) {
    throw ValidationError("complex_from_json: expected [re, im]");
  }
  return Complex{j[0].get<double>(), j[1].get<double>()};
}

Mat mat_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError("mat_from_json: expected a nested array");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw ValidationError("mat_from_json: ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = complex_from_json(j[r][c]);
    }
  }
  return m;
}

RealMat real_mat_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError("real_mat_from_json: expected a nested array");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  RealMat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw ValidationError("real_mat_from_json: ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        throw ValidationError("real_mat_from_json: non-numeric entry");
      }
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

RealVec real_vec_from_json(const Json& j) {
  if (!j.is_array()) {
    throw ValidationError("real_vec_from_json: expected an array");
  }
  RealVec v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!j[i].is_number()) {
      throw ValidationError("real_vec_from_json: non-numeric entry");
    }
    v(i) = j[i].get<double>();
  }
  return v;
}

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) {
    throw ValidationError("vec_from_json: expected an array");
  }
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = complex_from_json(j[i]);
  }
  return v;
}

Json to_json(const ClassicalInstrument& inst) {
  Json outcomes = Json::array();
  for (int m = 0; m < inst.n_outcomes(); ++m) {
    const ClassicalOutcome& out = inst.outcomes()[m];
    Json prob_series = Json::array();
    for (const RealVec& c : out.prob_coeffs) {
      prob_series.push_back(to_json(c));
    }
    Json transition_series = Json::array();
    for (const RealMat& t : out.transition_coeffs) {
      transition_series.push_back(to_json(t));
    }
    outcomes.push_back(Json{{"A", out.value},
                            {"P0", out.prob_coeffs[0](0)},
                            {"prob_series", std::move(prob_series)},
                            {"transition_series",
                             std::move(transition_series)}});
  }
  return Json{{"n_states", inst.n_states()},
              {"outcomes", std::move(outcomes)},
              {"lambda_max", inst.lambda_max()},
              {"contextual_shift", inst.contextual_shift()}};
}

ClassicalInstrument classical_instrument_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n_states") || !j.contains("outcomes")) {
    throw ValidationError(
        "classical_instrument_from_json: need n_states and outcomes");
  }
  const int n_states = j.at("n_states").get<int>();
  std::vector<ClassicalOutcome> outcomes;
  for (const Json& out_json : j.at("outcomes")) {
    ClassicalOutcome out;
    out.value = out_json.at("A").get<double>();
    for (const Json& c : out_json.at("prob_series")) {
      out.prob_coeffs.push_back(real_vec_from_json(c));
    }
    for (const Json& t : out_json.at("transition_series")) {
      out.transition_coeffs.push_back(real_mat_from_json(t));
    }
    outcomes.push_back(std::move(out));
  }
  const double hint =
      j.contains("lambda_max") ? j.at("lambda_max").get<double>() : 0.5;
  return ClassicalInstrument(n_states, std::move(outcomes), hint);
}

Json to_json(const QuantumInstrument& inst) {
  const char* mode = nullptr;
  switch (inst.mode()) {
    case InstrumentMode::Series:
      mode = "series";
      break;
    case InstrumentMode::Exact:
      mode = "exact";
      break;
    case InstrumentMode::SqrtLambda:
      mode = "sqrt-lambda";
      break;
  }
  Json outcomes = Json::array();
  for (const InstrumentOutcome& out : inst.outcomes()) {
    Json kraus = Json::array();
    for (const KrausSeries& ks : out.kraus) {
      Json entry{{"K0", ks.k0}, {"dK", to_json(ks.first_order)}};
      if (ks.second_order) {
        entry["d2K"] = to_json(*ks.second_order);
      }
      kraus.push_back(std::move(entry));
    }
    outcomes.push_back(Json{{"A", out.value}, {"kraus", std::move(kraus)}});
  }
  return Json{{"dim", inst.dim()},
              {"mode", mode},
              {"outcomes", std::move(outcomes)},
              {"lambda_max", inst.lambda_max()},
              {"contextual_shift", inst.contextual_shift()}};
}

QuantumInstrument quantum_instrument_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("outcomes")) {
    throw ValidationError(
        "quantum_instrument_from_json: need dim and outcomes");
  }
  const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
  InstrumentMode mode = InstrumentMode::Series;
  if (j.contains("mode")) {
    const std::string name = j.at("mode").get<std::string>();
    if (name == "series") {
      mode = InstrumentMode::Series;
    } else if (name == "sqrt-lambda") {
      mode = InstrumentMode::SqrtLambda;
    } else if (name == "exact") {
      throw ValidationError(
          "quantum_instrument_from_json: exact instruments are declared via "
          "a builder");
    } else {
      throw ValidationError("quantum_instrument_from_json: unknown mode");
    }
  }
  std::vector<InstrumentOutcome> outcomes;
  for (const Json& out_json : j.at("outcomes")) {
    InstrumentOutcome out;
    out.value = out_json.at("A").get<double>();
    for (const Json& k : out_json.at("kraus")) {
      KrausSeries ks;
      ks.k0 = k.at("K0").get<double>();
      ks.first_order = mat_from_json(k.at("dK"));
      if (k.contains("d2K")) {
        ks.second_order = mat_from_json(k.at("d2K"));
      }
      out.kraus.push_back(std::move(ks));
    }
    outcomes.push_back(std::move(out));
  }
  const double lambda_max =
      j.contains("lambda_max") ? j.at("lambda_max").get<double>() : 5e-2;
  return QuantumInstrument(dim, mode, std::move(outcomes), lambda_max);
}

namespace {

std::string format_double(double value) {
  if (std::isnan(value)) {
    return "null";
  }
  if (std::isinf(value)) {
    return value > 0 ? "1e999" : "-1e999";
  }
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_json(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_inner(static_cast<std::size_t>(indent) * (depth + 1),
                              ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",\n";
        }
        first = false;
        out += pad_inner;
        out += Json(it.key()).dump();
        out += ": ";
        write_json(it.value(), out, indent, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Numeric-only arrays stay on one line.
      bool flat = true;
      for (const auto& item : j) {
        if (item.is_structured()) {
          flat = false;
          break;
        }
      }
      if (flat) {
        out += "[";
        bool first = true;
        for (const auto& item : j) {
          if (!first) {
            out += ", ";
          }
          first = false;
          write_json(item, out, indent, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : j) {
        if (!first) {
          out += ",\n";
        }
        first = false;
        out += pad_inner;
        write_json(item, out, indent, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string stable_json(const Json& j, int indent) {
  std::string out;
  write_json(j, out, indent, 0);
  out += "\n";
  return out;
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i > 0) {
      out += ",";
    }
    out += table.header[i];
  }
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) {
        out += ",";
      }
      out += format_double(row[i]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace weaklab
