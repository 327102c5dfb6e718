// Copyright 2026 The Basketry Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Fixed-precision rendering shared by every CSV writer.
//!
//! Ratios that come from integer counts are rounded exactly (half-up) with
//! integer arithmetic so that printed tables never depend on binary
//! floating-point representation.

/// Renders `numerator / denominator * scale` rounded half-up to `decimals`
/// places. `denominator` must be nonzero.
pub fn ratio_half_up(numerator: u128, denominator: u128, scale: u128, decimals: u32) -> String {
    assert!(denominator > 0, "ratio_half_up: zero denominator");
    let pow = 10u128.pow(decimals);
    let scaled = (2 * numerator * scale * pow + denominator) / (2 * denominator);
    if decimals == 0 {
        return scaled.to_string();
    }
    format!(
        "{}.{:0width$}",
        scaled / pow,
        scaled % pow,
        width = decimals as usize
    )
}

/// `count / total` as a percentage, half-up to `decimals` places.
pub fn percent_half_up(count: u64, total: u64, decimals: u32) -> String {
    ratio_half_up(count as u128, total as u128, 100, decimals)
}

/// Drops a trailing `.0…0` so that `50.0` renders as `50`.
pub fn trim_zero_fraction(s: String) -> String {
    match s.split_once('.') {
        Some((int, frac)) if frac.bytes().all(|b| b == b'0') => int.to_string(),
        _ => s,
    }
}

/// Half-up rendering of an arbitrary finite float.
pub fn float_half_up(value: f64, decimals: u32) -> String {
    let pow = 10f64.powi(decimals as i32);
    let rounded = (value * pow + 0.5).floor() / pow;
    format!("{:.*}", decimals as usize, rounded)
}
