// Copyright 2026 The invgrid Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>

namespace invgrid {

/// Monospace font metric, all values in em units.
struct FontMetric {
  std::string name;
  double advance = 0.6;
  double ascent = 0.629;
  double descent = -0.157;

  double line_height(double font_size) const { return (ascent - descent) * font_size; }
  // Width of `glyphs` characters.
  double text_width(std::size_t glyphs, double font_size) const {
    return static_cast<double>(glyphs) * advance * font_size;
  }
};

// Base-14 Courier: 600/1000 em advance, ascender 629, descender -157.
inline FontMetric courier() { return FontMetric{"Courier", 0.6, 0.629, -0.157}; }

}  // namespace invgrid
