#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace salad {

/// Base of every error raised by the library. `code` is the stable
/// machine-readable identifier surfaced by the CLI and the HTTP API;
/// `stage` names the pipeline stage when one applies (empty otherwise).
class Error : public std::runtime_error {
 public:
  Error(std::string code, std::string message, std::string stage = {})
      : std::runtime_error(std::move(message)), code_(std::move(code)), stage_(std::move(stage)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string code_;
  std::string stage_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(std::string message) : Error("InvalidArgument", std::move(message)) {}
};

class UnmappableCodePoint : public Error {
 public:
  explicit UnmappableCodePoint(std::size_t position, std::string detail = {})
      : Error("UnmappableCodePoint",
              "unmappable code point at position " + std::to_string(position) +
                  (detail.empty() ? "" : ": " + detail)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UntranslatableInput : public Error {
 public:
  explicit UntranslatableInput(std::string details) : Error("UntranslatableInput", std::move(details)) {}
};

class UnrecognizableAudio : public Error {
 public:
  explicit UnrecognizableAudio(std::string details) : Error("UnrecognizableAudio", std::move(details)) {}
};

class UnknownWord : public Error {
 public:
  explicit UnknownWord(const std::string& surface)
      : Error("UnknownWord", "no meaning known for '" + surface + "'"), surface_(surface) {}

  const std::string& surface() const noexcept { return surface_; }

 private:
  std::string surface_;
};

class EmptyScore : public Error {
 public:
  EmptyScore() : Error("EmptyScore", "score has no notes") {}
};

/// A live provider failed after retries, or answered with a malformed body.
class UpstreamFailure : public Error {
 public:
  explicit UpstreamFailure(std::string details) : Error("UpstreamFailure", std::move(details)) {}
};

class InvalidAudio : public Error {
 public:
  explicit InvalidAudio(std::string details) : Error("InvalidAudio", std::move(details)) {}
};

class CorruptStore : public Error {
 public:
  explicit CorruptStore(std::string details) : Error("CorruptStore", std::move(details)) {}
};

class IoFailure : public Error {
 public:
  explicit IoFailure(std::string details) : Error("IoFailure", std::move(details)) {}
};

class NotFound : public Error {
 public:
  explicit NotFound(std::string what) : Error("NotFound", std::move(what)) {}
};

}  // namespace salad
