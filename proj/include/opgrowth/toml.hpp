// Copyright 2026 The opgrowth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Reader for the TOML subset used by experiment configs: tables, dotted and quoted keys,
// strings, integers, floats, booleans, arrays and inline tables. Dates and arrays of tables
// are rejected.

#include <cctype>
#include <cmath>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "opgrowth/errors.hpp"

namespace opgrowth::toml {

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : s_(src) {}

  nlohmann::json parse() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    for (;;) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        ++i_;
        if (!eof() && peek() == '[') fail("arrays of tables are not supported");
        skip_ws();
        const auto path = key_path();
        skip_ws();
        expect(']');
        table = &root;
        for (const auto& k : path) {
          auto& next = (*table)[k];
          if (next.is_null()) next = nlohmann::json::object();
          if (!next.is_object()) fail("key '" + k + "' is not a table");
          table = &next;
        }
      } else {
        key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;

  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return s_[i_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1;
    for (std::size_t k = 0; k < i_ && k < s_.size(); ++k) line += s_[k] == '\n';
    throw ConfigError("toml line " + std::to_string(line) + ": " + msg);
  }

  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++i_;
  }

  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') ++i_;
  }

  void skip_ws_comments_newlines() {
    for (;;) {
      skip_ws();
      skip_comment();
      if (!eof() && (peek() == '\n' || peek() == '\r')) {
        ++i_;
        continue;
      }
      return;
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (!eof() && peek() == '\r') ++i_;
    if (!eof() && peek() != '\n') fail("unexpected trailing characters");
  }

  std::string key() {
    if (eof()) fail("expected a key");
    if (peek() == '"' || peek() == '\'') return string();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
      k += s_[i_++];
    if (k.empty()) fail("expected a key");
    return k;
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> path{key()};
    for (;;) {
      skip_ws();
      if (eof() || peek() != '.') return path;
      ++i_;
      skip_ws();
      path.push_back(key());
    }
  }

  void key_value(nlohmann::json& table) {
    const auto path = key_path();
    skip_ws();
    expect('=');
    skip_ws();
    nlohmann::json* t = &table;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      auto& next = (*t)[path[k]];
      if (next.is_null()) next = nlohmann::json::object();
      if (!next.is_object()) fail("key '" + path[k] + "' is not a table");
      t = &next;
    }
    if (t->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*t)[path.back()] = value();
  }

  std::string string() {
    const char q = peek();
    ++i_;
    std::string out;
    while (!eof() && peek() != q) {
      char c = s_[i_++];
      if (c == '\n') fail("unterminated string");
      if (q == '"' && c == '\\') {
        if (eof()) fail("unterminated escape");
        const char e = s_[i_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out += c;
    }
    expect(q);
    return out;
  }

  nlohmann::json value() {
    if (eof()) fail("expected a value");
    const char c = peek();
    if (c == '"' || c == '\'') return string();
    if (c == '[') return array();
    if (c == '{') return inline_table();
    if (s_.substr(i_, 4) == "true") return i_ += 4, true;
    if (s_.substr(i_, 5) == "false") return i_ += 5, false;
    return number();
  }

  nlohmann::json array() {
    expect('[');
    nlohmann::json arr = nlohmann::json::array();
    for (;;) {
      skip_ws_comments_newlines();
      if (!eof() && peek() == ']') break;
      arr.push_back(value());
      skip_ws_comments_newlines();
      if (!eof() && peek() == ',') {
        ++i_;
        continue;
      }
      break;
    }
    expect(']');
    return arr;
  }

  nlohmann::json inline_table() {
    expect('{');
    nlohmann::json t = nlohmann::json::object();
    skip_ws();
    if (!eof() && peek() == '}') return ++i_, t;
    for (;;) {
      skip_ws();
      key_value(t);
      skip_ws();
      if (!eof() && peek() == ',') {
        ++i_;
        continue;
      }
      break;
    }
    expect('}');
    return t;
  }

  nlohmann::json number() {
    std::string tok;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || std::string_view("+-._").find(peek()) !=
                                                                              std::string_view::npos))
      if (s_[i_++] != '_') tok += s_[i_ - 1];
    if (tok.empty()) fail("expected a value");
    const std::string body = (tok[0] == '+' || tok[0] == '-') ? tok.substr(1) : tok;
    const double sign = tok[0] == '-' ? -1.0 : 1.0;
    if (body == "inf") return sign * INFINITY;
    if (body == "nan") return NAN;
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    try {
      std::size_t used = 0;
      if (is_float) {
        const double v = std::stod(tok, &used);
        if (used == tok.size()) return v;
      } else {
        const long long v = std::stoll(tok, &used, 10);
        if (used == tok.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("invalid value '" + tok + "'");
  }
};

}  // namespace detail

/// Parse a TOML document into the equivalent JSON value.
inline nlohmann::json parse(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace opgrowth::toml
