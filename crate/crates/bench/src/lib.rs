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

//! Corpora shared by the benchmarks.

use basketry::synth::{generate, SynthSpec};
use basketry::Basket;

/// The planted-rule demo corpus scaled to `n_baskets`.
pub fn demo_corpus(n_baskets: usize, seed: u64) -> Vec<Basket> {
    let mut spec = SynthSpec::planted_demo(seed);
    spec.n_baskets = n_baskets;
    generate(&spec).expect("demo spec is valid").baskets
}

/// A small dense corpus the brute-force miner can still enumerate.
pub fn dense_corpus(n_items: usize, n_baskets: usize, seed: u64) -> Vec<Basket> {
    let mut spec = SynthSpec::planted_demo(seed);
    spec.n_items = n_items;
    spec.n_baskets = n_baskets;
    spec.planted.clear();
    spec.base_item_probability = basketry::synth::BaseProbability::Uniform(0.35);
    generate(&spec).expect("dense spec is valid").baskets
}
