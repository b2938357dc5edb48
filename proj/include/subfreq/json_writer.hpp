#pragma once

#include <cassert>
#include <string>
#include <vector>

#include "subfreq/io.hpp"

namespace subfreq {

/// Minimal JSON emitter for reports: insertion-ordered keys, two-space
/// indentation, doubles with 17 significant digits. Byte-stable output is
/// part of the CLI's reproducibility contract, which is why reports do not
/// go through a general-purpose serializer.
class JsonWriter {
 public:
  JsonWriter& begin_object() {
    prefix_value();
    out_ += '{';
    stack_.push_back({true, 0});
    return *this;
  }
  JsonWriter& end_object() {
    assert(!stack_.empty() && stack_.back().is_object);
    const bool had = stack_.back().count > 0;
    stack_.pop_back();
    if (had) newline_indent();
    out_ += '}';
    return *this;
  }
  JsonWriter& begin_array() {
    prefix_value();
    out_ += '[';
    stack_.push_back({false, 0});
    return *this;
  }
  JsonWriter& end_array() {
    assert(!stack_.empty() && !stack_.back().is_object);
    const bool had = stack_.back().count > 0;
    stack_.pop_back();
    if (had) newline_indent();
    out_ += ']';
    return *this;
  }

  JsonWriter& key(const std::string& k) {
    assert(!stack_.empty() && stack_.back().is_object);
    next_item();
    out_ += '"';
    append_escaped(k);
    out_ += "\": ";
    pending_key_ = true;
    return *this;
  }

  JsonWriter& value(double v) {
    prefix_value();
    out_ += format_g17(v);
    return *this;
  }
  JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(unsigned long v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(unsigned long long v) {
    prefix_value();
    out_ += std::to_string(v);
    return *this;
  }
  JsonWriter& value(long long v) {
    prefix_value();
    out_ += std::to_string(v);
    return *this;
  }
  JsonWriter& value(bool v) {
    prefix_value();
    out_ += v ? "true" : "false";
    return *this;
  }
  JsonWriter& value(const std::string& v) {
    prefix_value();
    out_ += '"';
    append_escaped(v);
    out_ += '"';
    return *this;
  }
  JsonWriter& value(const char* v) { return value(std::string(v)); }

  const std::string& str() const { return out_; }

 private:
  struct Frame {
    bool is_object;
    int count;
  };

  void newline_indent() {
    out_ += '\n';
    out_.append(2 * stack_.size(), ' ');
  }

  void next_item() {
    if (stack_.back().count > 0) out_ += ',';
    ++stack_.back().count;
    newline_indent();
  }

  void prefix_value() {
    if (pending_key_) {
      pending_key_ = false;
      return;
    }
    if (!stack_.empty() && !stack_.back().is_object) next_item();
  }

  void append_escaped(const std::string& s) {
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        default: out_ += c;
      }
    }
  }

  std::string out_;
  std::vector<Frame> stack_;
  bool pending_key_ = false;
};

} // namespace subfreq
