// SPDX-License-Identifier: Apache-2.0
#include "nuva/phone_classes.hpp"

#include <string>

#include "nuva/util.hpp"

namespace nuva {

const std::array<std::string_view, kNumPhoneClasses>& phone_class_names() {
  static const std::array<std::string_view, kNumPhoneClasses> kNames = {
      "aa", "ae", "ah", "ao", "aw", "ax", "ay", "b",  "ch", "d",
      "dh", "ea", "eh", "er", "ey", "f",  "g",  "hh", "ia", "ih",
      "iy", "jh", "k",  "l",  "m",  "n",  "ng", "oh", "ow", "oy",
      "p",  "r",  "s",  "sh", "t",  "th", "ua", "uh", "uw", "v",
      "w",  "y",  "z",  "zh", "sil"};
  return kNames;
}

uint64_t phone_class_list_hash() {
  static const uint64_t kHash = [] {
    std::string joined;
    for (auto name : phone_class_names()) {
      joined += name;
      joined += '\n';
    }
    return fnv1a64(joined);
  }();
  return kHash;
}

} // namespace nuva
