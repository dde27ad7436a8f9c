// Copyright 2026 The qnet Authors
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

#ifndef QNET_SPECIAL_FUNCTIONS_HPP
#define QNET_SPECIAL_FUNCTIONS_HPP

namespace qnet::special {

/// Natural log of the modified Bessel function of the second kind K_nu(x),
/// real order, x > 0. Temme's series for x < 2, Steed's continued fraction
/// otherwise, followed by upward recurrence from |mu| <= 1/2. Target
/// accuracy is 1e-10 relative over the orders and arguments used by the
/// turbulence density. Integer orders need no special handling.
///
/// Throws std::domain_error for x <= 0 or non-finite input.
double log_bessel_k(double nu, double x);

/// K_nu(x); may underflow to 0 for large x where log_bessel_k does not.
double bessel_k(double nu, double x);

}  // namespace qnet::special

#endif  // QNET_SPECIAL_FUNCTIONS_HPP
