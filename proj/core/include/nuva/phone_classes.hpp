// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_PHONE_CLASSES_HPP
#define NUVA_PHONE_CLASSES_HPP

#include <array>
#include <cstdint>
#include <string_view>

namespace nuva {

// 44 British English monophones plus "sil" in the final slot. Posteriorgram
// column k carries the posterior of phone_class_names()[k].
inline constexpr int kNumPhoneClasses = 45;
inline constexpr int kSilenceClass = kNumPhoneClasses - 1;

const std::array<std::string_view, kNumPhoneClasses>& phone_class_names();

// FNV-1a over the newline joined list; identifies the class inventory.
uint64_t phone_class_list_hash();

} // namespace nuva

#endif
