#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biostego {

enum class ErrorCode {
  // image-core
  MissingFile,
  UnsupportedFormat,
  CorruptFile,
  IoError,
  InvalidBlockSize,
  InvalidImage,
  // enhancement
  ImageTooSmall,
  // minutiae
  NotThinned,
  EmptySkeleton,
  CorruptTemplate,
  // stego-lsb
  PayloadTooLarge,
  NoMagic,
  TruncatedPayload,
  // listega
  EmptyBank,
  InadequateBank,
  InvalidCodeLetter,
  OddNibbleCount,
  MissingTerminator,
  // cli-auth
  UserExists,
  UnknownUser,
  InvalidUserId,
  TooFewMinutiae,
  AuthenticationFailed,
  InvalidConfig,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidBlockSize: return "InvalidBlockSize";
    case ErrorCode::InvalidImage: return "InvalidImage";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::NotThinned: return "NotThinned";
    case ErrorCode::EmptySkeleton: return "EmptySkeleton";
    case ErrorCode::CorruptTemplate: return "CorruptTemplate";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::NoMagic: return "NoMagic";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::EmptyBank: return "EmptyBank";
    case ErrorCode::InadequateBank: return "InadequateBank";
    case ErrorCode::InvalidCodeLetter: return "InvalidCodeLetter";
    case ErrorCode::OddNibbleCount: return "OddNibbleCount";
    case ErrorCode::MissingTerminator: return "MissingTerminator";
    case ErrorCode::UserExists: return "UserExists";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::InvalidUserId: return "InvalidUserId";
    case ErrorCode::TooFewMinutiae: return "TooFewMinutiae";
    case ErrorCode::AuthenticationFailed: return "AuthenticationFailed";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace biostego
