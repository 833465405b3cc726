#ifndef ICTK_CHANNEL_IO_HPP
#define ICTK_CHANNEL_IO_HPP

// Channel-file ingestion: a JSON format for single- and two-user channels,
// plus compiled-in presets (`example1`, `bsc:<p>`, `identity:<k>`).
//
// Single user:
//   {"type": "single", "P_Y_given_X": [[...],...], "P_Z": [[...],...],
//    "labels": ["a","b",...]}            (labels optional)
// Two user:
//   {"type": "two_user", "P_Y1_given_X1": ..., "P_Y2_given_X2": ...,
//    "P_Z": [[[...],...],...]}           (3-axis nested: [x1][x2][z])
//
// Rows whose mass deviates from 1 by at most 1e-9 are renormalized; larger
// deviations are rejected with the offending location in the message.

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ictk/capacity.hpp"
#include "ictk/coord.hpp"

namespace ictk {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChannelSpecFile {
  std::variant<SingleUserChannel, TwoUserChannel> channel;
  std::vector<std::string> labels;

  bool is_single() const {
    return std::holds_alternative<SingleUserChannel>(channel);
  }
  const SingleUserChannel& single() const {
    return std::get<SingleUserChannel>(channel);
  }
  const TwoUserChannel& two_user() const {
    return std::get<TwoUserChannel>(channel);
  }
};

namespace iodetail {

inline std::vector<double> checked_row(const nlohmann::json& row,
                                       const std::string& where,
                                       std::size_t row_index) {
  if (!row.is_array() || row.empty())
    throw ParseError(where + ": row " + std::to_string(row_index) +
                     " is not a non-empty array");
  std::vector<double> out;
  out.reserve(row.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (!row[c].is_number())
      throw ParseError(where + ": row " + std::to_string(row_index) +
                       ", column " + std::to_string(c) + " is not a number");
    const double v = row[c].get<double>();
    if (v < 0.0)
      throw ParseError(where + ": row " + std::to_string(row_index) +
                       ", column " + std::to_string(c) + " is negative");
    out.push_back(v);
    sum += v;
  }
  if (std::abs(sum - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg << where << ": row " << row_index << " sums to " << sum
        << ", outside tolerance 1e-9 of 1";
    throw ParseError(msg.str());
  }
  return out;
}

inline CondPmf parse_matrix(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw ParseError("missing key '" + key + "'");
  const auto& mat = j.at(key);
  if (!mat.is_array() || mat.empty())
    throw ParseError(key + ": expected a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < mat.size(); ++r)
    rows.push_back(checked_row(mat[r], key, r));
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != rows[0].size())
      throw ParseError(key + ": row " + std::to_string(r) +
                       " has a different length than row 0");
  return CondPmf(std::move(rows));
}

}  // namespace iodetail

inline ChannelSpecFile parse_channel_json(const nlohmann::json& j) {
  if (!j.contains("type") || !j.at("type").is_string())
    throw ParseError("missing or non-string 'type'");
  const std::string type = j.at("type").get<std::string>();

  ChannelSpecFile out{SingleUserChannel(CondPmf::identity(1), CondPmf::identity(1)), {}};
  if (type == "single") {
    CondPmf py = iodetail::parse_matrix(j, "P_Y_given_X");
    CondPmf pz = iodetail::parse_matrix(j, "P_Z");
    if (py.in_size() != pz.in_size())
      throw ParseError("P_Y_given_X and P_Z disagree on the input alphabet (" +
                       std::to_string(py.in_size()) + " vs " +
                       std::to_string(pz.in_size()) + " rows)");
    out.channel = SingleUserChannel(std::move(py), std::move(pz));
  } else if (type == "two_user") {
    CondPmf py1 = iodetail::parse_matrix(j, "P_Y1_given_X1");
    CondPmf py2 = iodetail::parse_matrix(j, "P_Y2_given_X2");
    if (!j.contains("P_Z")) throw ParseError("missing key 'P_Z'");
    const auto& pz = j.at("P_Z");
    if (!pz.is_array() || pz.size() != py1.in_size())
      throw ParseError("P_Z: expected " + std::to_string(py1.in_size()) +
                       " outer entries (one per x1)");
    std::vector<std::vector<double>> rows;
    for (std::size_t a = 0; a < pz.size(); ++a) {
      const auto& block = pz[a];
      if (!block.is_array() || block.size() != py2.in_size())
        throw ParseError("P_Z[" + std::to_string(a) + "]: expected " +
                         std::to_string(py2.in_size()) + " entries (one per x2)");
      for (std::size_t b = 0; b < block.size(); ++b)
        rows.push_back(iodetail::checked_row(
            block[b], "P_Z[" + std::to_string(a) + "]", b));
    }
    out.channel = TwoUserChannel(std::move(py1), std::move(py2),
                                 CondPmf(std::move(rows)));
  } else {
    throw ParseError("unknown channel type '" + type + "'");
  }

  if (j.contains("labels")) {
    const auto& labels = j.at("labels");
    if (!labels.is_array())
      throw ParseError("labels: expected an array of strings");
    std::size_t in_size = out.is_single()
                              ? out.single().p_y_given_x.in_size()
                              : out.two_user().x1_size();
    if (labels.size() != in_size)
      throw ParseError("labels: expected " + std::to_string(in_size) +
                       " entries, got " + std::to_string(labels.size()));
    for (const auto& l : labels) out.labels.push_back(l.get<std::string>());
  }
  return out;
}

inline nlohmann::json serialize_channel(const ChannelSpecFile& spec) {
  nlohmann::json j;
  auto matrix = [](const CondPmf& w) {
    nlohmann::json m = nlohmann::json::array();
    for (std::size_t x = 0; x < w.in_size(); ++x)
      m.push_back(w.row(x).probs());
    return m;
  };
  if (spec.is_single()) {
    j["type"] = "single";
    j["P_Y_given_X"] = matrix(spec.single().p_y_given_x);
    j["P_Z"] = matrix(spec.single().p_z_given_x);
  } else {
    const auto& ch = spec.two_user();
    j["type"] = "two_user";
    j["P_Y1_given_X1"] = matrix(ch.p_y1_given_x1);
    j["P_Y2_given_X2"] = matrix(ch.p_y2_given_x2);
    nlohmann::json pz = nlohmann::json::array();
    for (std::size_t a = 0; a < ch.x1_size(); ++a) {
      nlohmann::json block = nlohmann::json::array();
      for (std::size_t b = 0; b < ch.x2_size(); ++b)
        block.push_back(ch.p_z_given_x1x2.row(a * ch.x2_size() + b).probs());
      pz.push_back(block);
    }
    j["P_Z"] = pz;
  }
  if (!spec.labels.empty()) j["labels"] = spec.labels;
  return j;
}

// Preset names: `example1`, `bsc:<p>` (Z = Y), `identity:<k>` (Z = Y = X).
inline std::optional<ChannelSpecFile> channel_preset(const std::string& name) {
  if (name == "example1")
    return ChannelSpecFile{example1_channel(), {}};
  if (name.rfind("bsc:", 0) == 0) {
    const double p = std::stod(name.substr(4));
    return ChannelSpecFile{SingleUserChannel(CondPmf::bsc(p), CondPmf::bsc(p)), {}};
  }
  if (name.rfind("identity:", 0) == 0) {
    const auto k = static_cast<std::size_t>(std::stoul(name.substr(9)));
    if (k == 0) throw ParseError("identity:<k> requires k >= 1");
    return ChannelSpecFile{
        SingleUserChannel(CondPmf::identity(k), CondPmf::identity(k)), {}};
  }
  return std::nullopt;
}

inline ChannelSpecFile parse_channel_file(const std::string& path_or_preset) {
  if (auto preset = channel_preset(path_or_preset)) return *preset;
  std::ifstream in(path_or_preset);
  if (!in) throw ParseError("cannot open channel file '" + path_or_preset + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path_or_preset + ": " + e.what());
  }
  return parse_channel_json(j);
}

}  // namespace ictk

#endif  // ICTK_CHANNEL_IO_HPP
