// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "semx/derive.h"
#include "semx/error.h"
#include "semx/io.h"

namespace semx {
namespace {

using ojson = nlohmann::ordered_json;

ojson side_json(const PairSide& s) {
  ojson j;
  j["text"] = s.text;
  if (s.lf) j["lf"] = *s.lf;
  j["image_id"] = s.image_id;
  if (s.entity_id) j["entity_id"] = *s.entity_id;
  j["text_id"] = s.text_id;
  return j;
}

PairSide side_from_json(const nlohmann::json& j) {
  PairSide s;
  s.text = j.at("text").get<std::string>();
  if (j.contains("lf")) s.lf = j["lf"].get<std::string>();
  s.image_id = j.at("image_id").get<std::string>();
  if (j.contains("entity_id")) s.entity_id = j["entity_id"].get<std::string>();
  s.text_id = j.at("text_id").get<std::string>();
  return s;
}

}  // namespace

bool Dataset::operator==(const Dataset& o) const {
  // Thread count is an execution detail and is not part of the artifact.
  return recipe == o.recipe && config.seed == o.config.seed && config.n_pairs == o.config.n_pairs &&
         config.balance == o.config.balance && config.distractor_mode == o.config.distractor_mode &&
         config.exhaustive == o.config.exhaustive && pairs == o.pairs;
}

ojson to_json(const DerivedPair& p) {
  ojson j;
  j["recipe"] = to_string(p.recipe);
  j["label"] = to_string(p.label);
  j["distractor_mode"] = to_string(p.distractor_mode);
  j["anchor"] = side_json(p.anchor);
  j["candidate"] = side_json(p.candidate);
  j["provenance"] = p.provenance;
  return j;
}

DerivedPair pair_from_json(const nlohmann::json& j) {
  DerivedPair p;
  p.recipe = recipe_from_string(j.at("recipe").get<std::string>());
  p.label = label_from_string(j.at("label").get<std::string>());
  p.distractor_mode = distractor_mode_from_string(j.at("distractor_mode").get<std::string>());
  p.anchor = side_from_json(j.at("anchor"));
  p.candidate = side_from_json(j.at("candidate"));
  p.provenance = j.at("provenance").get<std::vector<std::string>>();
  return p;
}

std::string serialize_dataset(const Dataset& ds) {
  ojson header;
  header["format"] = kDatasetFormat;
  header["version"] = kDatasetVersion;
  header["recipe"] = to_string(ds.recipe);
  header["seed"] = ds.config.seed;
  header["n_pairs"] = ds.config.n_pairs;
  header["balance"] = ds.config.balance;
  header["distractor_mode"] = to_string(ds.config.distractor_mode);
  header["exhaustive"] = ds.config.exhaustive;
  std::string out = header.dump() + "\n";
  for (const auto& p : ds.pairs) out += to_json(p).dump() + "\n";
  return out;
}

Dataset parse_dataset(std::string_view text) {
  Dataset ds;
  std::size_t pos = 0;
  std::size_t lineno = 0;
  bool have_header = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("dataset line " + std::to_string(lineno) + ": " + e.what(), lineno,
                       e.byte > 0 ? e.byte - 1 : 0);
    }
    try {
      if (!have_header) {
        if (!j.is_object() || j.value("format", "") != kDatasetFormat) {
          throw FormatError("dataset line " + std::to_string(lineno) + ": missing '" +
                            std::string(kDatasetFormat) + "' header");
        }
        const int version = j.at("version").get<int>();
        if (version != kDatasetVersion) {
          throw FormatError("dataset version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kDatasetVersion) + ")");
        }
        ds.recipe = recipe_from_string(j.at("recipe").get<std::string>());
        ds.config.seed = j.at("seed").get<std::uint64_t>();
        ds.config.n_pairs = j.at("n_pairs").get<std::size_t>();
        ds.config.balance = j.at("balance").get<double>();
        ds.config.distractor_mode = distractor_mode_from_string(j.at("distractor_mode").get<std::string>());
        ds.config.exhaustive = j.at("exhaustive").get<bool>();
        have_header = true;
        continue;
      }
      ds.pairs.push_back(pair_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("dataset line " + std::to_string(lineno) + ": " + e.what(), lineno, 0);
    } catch (const ConfigError& e) {
      throw ParseError("dataset line " + std::to_string(lineno) + ": " + e.what(), lineno, 0);
    }
  }
  if (!have_header) throw FormatError("dataset is empty; expected a '" + std::string(kDatasetFormat) + "' header");
  return ds;
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds) {
  write_file_atomic(path, serialize_dataset(ds));
}

Dataset read_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path)); }

}  // namespace semx
