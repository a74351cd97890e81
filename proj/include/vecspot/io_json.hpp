#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vecspot/bfr.hpp"
#include "vecspot/features.hpp"
#include "vecspot/geometry.hpp"
#include "vecspot/predictions.hpp"

namespace vecspot {

// Structured parse/validation failure; `where` is a JSON pointer path.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Strict mode rejects unknown fields; lenient mode records a warning per
// unknown field instead.
Drawing parse_drawing(const std::string& bytes, bool strict = true,
                      std::vector<std::string>* warnings = nullptr);
std::string serialize_drawing(const Drawing& drawing);

Predictions parse_predictions(const std::string& bytes);
std::string serialize_predictions(const Predictions& preds);

PanopticAssignment parse_panoptic(const std::string& bytes, const Drawing& drawing);
std::string serialize_panoptic(const PanopticAssignment& assignment,
                               const Drawing& drawing);

// Token tensor files: row-major real64 coords (N x 3) and feats (N x 7).
std::string serialize_tokens_json(const TokenSet& tokens);
std::vector<char> serialize_tokens_binary(const TokenSet& tokens);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);
void write_file(const std::string& path, const std::vector<char>& bytes);

}  // namespace vecspot
