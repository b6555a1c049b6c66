// Copyright 2026 The Authorid Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal UTF-8 decoding and character classes for tokenization. Letter
// classification and case folding cover Latin, Greek, Cyrillic and the main
// CJK/Hangul/kana blocks; code points outside these are separators.

#ifndef AUTHORID_SRC_LEXICON_UTF8_H_
#define AUTHORID_SRC_LEXICON_UTF8_H_

#include <optional>
#include <string>
#include <string_view>

#include "authorid/errors.h"

namespace authorid::utf8 {

class Decoder {
 public:
  explicit Decoder(std::string_view bytes) : bytes_(bytes) {}

  // Next code point, nullopt at end. Throws EncodingError on malformed,
  // overlong, surrogate or out-of-range sequences.
  std::optional<char32_t> Next() {
    if (pos_ >= bytes_.size()) return std::nullopt;
    const auto lead = static_cast<unsigned char>(bytes_[pos_]);
    if (lead < 0x80) {
      ++pos_;
      return lead;
    }
    int extra;
    char32_t cp;
    char32_t min;
    if ((lead & 0xE0) == 0xC0) {
      extra = 1, cp = lead & 0x1F, min = 0x80;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2, cp = lead & 0x0F, min = 0x800;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3, cp = lead & 0x07, min = 0x10000;
    } else {
      Fail();
    }
    if (pos_ + extra >= bytes_.size()) Fail();
    for (int i = 1; i <= extra; ++i) {
      const auto cont = static_cast<unsigned char>(bytes_[pos_ + i]);
      if ((cont & 0xC0) != 0x80) Fail();
      cp = (cp << 6) | (cont & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) Fail();
    pos_ += extra + 1;
    return cp;
  }

 private:
  [[noreturn]] void Fail() const {
    throw EncodingError("invalid UTF-8 at byte " + std::to_string(pos_));
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

inline bool IsValid(std::string_view bytes) {
  try {
    Decoder decoder(bytes);
    while (decoder.Next()) {
    }
    return true;
  } catch (const EncodingError&) {
    return false;
  }
}

inline void Append(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// ASCII apostrophe, left/right single quotation marks, modifier apostrophe.
inline bool IsApostrophe(char32_t cp) {
  return cp == U'\'' || cp == 0x2018 || cp == 0x2019 || cp == 0x02BC;
}

inline bool IsLetter(char32_t cp) {
  if (cp < 0x80) return (cp | 0x20) >= U'a' && (cp | 0x20) <= U'z';
  if (cp == 0xAA || cp == 0xB5 || cp == 0xBA) return true;
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
  if (cp >= 0x250 && cp <= 0x2AF) return true;  // IPA
  if (cp >= 0x300 && cp <= 0x36F) return true;  // combining marks
  if (cp >= 0x370 && cp <= 0x3FF) {
    return cp != 0x375 && cp != 0x37E && cp != 0x384 && cp != 0x385 &&
           cp != 0x387;
  }
  if (cp >= 0x400 && cp <= 0x52F) return cp < 0x482 || cp > 0x489;
  if (cp >= 0x531 && cp <= 0x587) return true;   // Armenian
  if (cp >= 0x5D0 && cp <= 0x5EA) return true;   // Hebrew
  if (cp >= 0x620 && cp <= 0x64A) return true;   // Arabic
  if (cp >= 0x900 && cp <= 0xDFF) return true;   // Indic scripts
  if (cp >= 0x1E00 && cp <= 0x1FFF) return true;
  if (cp >= 0x3040 && cp <= 0x30FF) return cp != 0x30FB;  // kana
  if (cp >= 0x3400 && cp <= 0x4DBF) return true;
  if (cp >= 0x4E00 && cp <= 0x9FFF) return true;
  if (cp >= 0xAC00 && cp <= 0xD7A3) return true;  // Hangul
  if (cp >= 0xF900 && cp <= 0xFAFF) return true;
  if (cp >= 0xFF21 && cp <= 0xFF3A) return true;  // fullwidth Latin
  if (cp >= 0xFF41 && cp <= 0xFF5A) return true;
  return false;
}

inline char32_t ToLower(char32_t cp) {
  if (cp < 0x80) return (cp >= U'A' && cp <= U'Z') ? cp + 0x20 : cp;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x17F) {
    if (cp == 0x130) return U'i';
    if (cp == 0x178) return 0xFF;
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
      return (cp % 2 == 1) ? cp + 1 : cp;
    }
    if (cp == 0x131 || cp == 0x138 || cp == 0x149 || cp == 0x17F) return cp;
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (cp == 0x386) return 0x3AC;
  if (cp >= 0x388 && cp <= 0x38A) return cp + 0x25;
  if (cp == 0x38C) return 0x3CC;
  if (cp == 0x38E || cp == 0x38F) return cp + 0x3F;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if ((cp >= 0x460 && cp <= 0x481) || (cp >= 0x48A && cp <= 0x4BF)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (cp >= 0xFF21 && cp <= 0xFF3A) return cp + 0x20;
  return cp;
}

}  // namespace authorid::utf8

#endif  // AUTHORID_SRC_LEXICON_UTF8_H_
