#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "rblspi/eval.hpp"

namespace rblspi {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  SufficientStats stats;
  std::optional<Posterior> posterior;
};

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index k) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != k) throw IoError("checkpoint: bad matrix shape");
  Matrix m(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != k) throw IoError("checkpoint: bad matrix shape");
    for (Eigen::Index c = 0; c < k; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

inline nlohmann::json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Vector vector_from_json(const nlohmann::json& j, Eigen::Index k) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != k) throw IoError("checkpoint: bad vector length");
  return Eigen::Map<const Vector>(v.data(), k);
}

}  // namespace detail

inline nlohmann::json checkpoint_to_json(const Checkpoint& c) {
  nlohmann::json j;
  j["version"] = kCheckpointVersion;
  j["k"] = c.stats.k();
  j["stats"] = {{"n", c.stats.n},
                {"A", detail::matrix_to_json(c.stats.A)},
                {"C", detail::matrix_to_json(c.stats.C)},
                {"b", detail::vector_to_json(c.stats.b)}};
  if (c.posterior)
    j["posterior"] = {{"alpha", c.posterior->alpha},
                      {"beta", c.posterior->beta},
                      {"m", detail::vector_to_json(c.posterior->m)},
                      {"S", detail::matrix_to_json(c.posterior->S)}};
  return j;
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != kCheckpointVersion) throw IoError("checkpoint: unsupported version");
    const auto k = j.at("k").get<Eigen::Index>();
    Checkpoint c;
    c.stats = SufficientStats(k);
    const auto& s = j.at("stats");
    c.stats.n = s.at("n").get<std::size_t>();
    c.stats.A = detail::matrix_from_json(s.at("A"), k);
    c.stats.C = detail::matrix_from_json(s.at("C"), k);
    c.stats.b = detail::vector_from_json(s.at("b"), k);
    if (j.contains("posterior")) {
      const auto& p = j.at("posterior");
      c.posterior = Posterior{detail::vector_from_json(p.at("m"), k), detail::matrix_from_json(p.at("S"), k),
                              p.at("alpha").get<double>(), p.at("beta").get<double>()};
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << checkpoint_to_json(c).dump() << '\n';
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("checkpoint: ") + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace rblspi
